//! Small-step reduction of configurations `(M | V)`.

use std::fmt;
use std::rc::Rc;

use serde_json::json;
use thiserror::Error;

use crate::frontend::Printer;
use crate::syntax::{desugar_if, Name, Pos, Term};
pub use crate::value::{Value, ValueAssignment};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Configuration {
    pub term: Term,
    pub store: ValueAssignment,
}

impl Configuration {
    pub fn new(term: Term, store: ValueAssignment) -> Self {
        Configuration { term, store }
    }

    pub fn is_terminal(&self) -> bool {
        matches!(self.term, Term::Skip)
    }
}

impl fmt::Display for Configuration {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let p = Printer::sugared();
        write!(f, "{} | {}", p.term_inline(&self.term), p.store(&self.store))
    }
}

/// Why no reduction rule applies.
#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum Stuck {
    #[error("variable `{0}` is not in the store")]
    Unbound(Name),
    #[error("variable `{0}` is already in the store")]
    AlreadyBound(Name),
    #[error("`{var}` holds {found}, expected {expected}")]
    WrongShape { var: Name, expected: &'static str, found: Value },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Step {
    Next(Configuration),
    Terminal,
    Stuck(Stuck),
}

fn take(store: &mut ValueAssignment, var: &str) -> Result<Value, Stuck> {
    store.take(var).ok_or_else(|| Stuck::Unbound(var.to_string()))
}

fn bind(store: &mut ValueAssignment, var: &str, value: Value) -> Result<(), Stuck> {
    if store.bind(var.to_string(), value) {
        Ok(())
    } else {
        Err(Stuck::AlreadyBound(var.to_string()))
    }
}

/// The configuration that `while guard do body` unfolds to:
/// `if guard then { body; while guard do body }`.
pub fn unfold_while(guard: &str, body: &Rc<Term>, store: &ValueAssignment) -> Term {
    let again = Term::Seq(
        Rc::clone(body),
        Rc::new(Term::While { guard: guard.to_string(), body: Rc::clone(body), pos: Pos::default() }),
    );
    desugar_if(guard, again, |n| store.contains(n))
}

fn reduce(term: &Term, store: &ValueAssignment) -> Result<Option<Configuration>, Stuck> {
    let mut next = store.clone();
    let out = match term {
        Term::Skip => return Ok(None),
        Term::Seq(first, second) => {
            if matches!(**first, Term::Skip) {
                return Ok(Some(Configuration::new(Term::clone(second), next)));
            }
            let inner = reduce(first, store)?.expect("non-skip term reduces or sticks");
            return Ok(Some(Configuration::new(Term::Seq(Rc::new(inner.term), Rc::clone(second)), inner.store)));
        }
        Term::NewUnit { var, .. } => {
            bind(&mut next, var, Value::Star)?;
            Term::Skip
        }
        Term::Discard { var, .. } => {
            take(&mut next, var)?;
            Term::Skip
        }
        Term::While { guard, body, .. } => {
            if !store.contains(guard) {
                return Err(Stuck::Unbound(guard.clone()));
            }
            unfold_while(guard, body, store)
        }
        Term::Left { dst, left_ty, right_ty, src, .. } => {
            let v = take(&mut next, src)?;
            bind(&mut next, dst, Value::left(left_ty.clone(), right_ty.clone(), v))?;
            Term::Skip
        }
        Term::Right { dst, left_ty, right_ty, src, .. } => {
            let v = take(&mut next, src)?;
            bind(&mut next, dst, Value::right(left_ty.clone(), right_ty.clone(), v))?;
            Term::Skip
        }
        Term::Case { scrutinee, left_var, left_body, right_var, right_body, .. } => match take(&mut next, scrutinee)? {
            Value::Left { inner, .. } => {
                bind(&mut next, left_var, *inner)?;
                Term::clone(left_body)
            }
            Value::Right { inner, .. } => {
                bind(&mut next, right_var, *inner)?;
                Term::clone(right_body)
            }
            found => return Err(Stuck::WrongShape { var: scrutinee.clone(), expected: "an injection", found }),
        },
        Term::Pair { dst, fst, snd, .. } => {
            let a = take(&mut next, fst)?;
            let b = take(&mut next, snd)?;
            bind(&mut next, dst, Value::pair(a, b))?;
            Term::Skip
        }
        Term::Unpair { fst, snd, src, .. } => match take(&mut next, src)? {
            Value::Pair(a, b) => {
                bind(&mut next, fst, *a)?;
                bind(&mut next, snd, *b)?;
                Term::Skip
            }
            found => return Err(Stuck::WrongShape { var: src.clone(), expected: "a pair", found }),
        },
        Term::Fold { dst, mu_ty, src, .. } => {
            let v = take(&mut next, src)?;
            bind(&mut next, dst, Value::fold(mu_ty.clone(), v))?;
            Term::Skip
        }
        Term::Unfold { dst, src, .. } => match take(&mut next, src)? {
            Value::Fold { inner, .. } => {
                bind(&mut next, dst, *inner)?;
                Term::Skip
            }
            found => return Err(Stuck::WrongShape { var: src.clone(), expected: "a fold", found }),
        },
    };
    Ok(Some(Configuration::new(out, next)))
}

/// One reduction step. The input configuration is left untouched.
pub fn step(c: &Configuration) -> Step {
    match reduce(&c.term, &c.store) {
        Ok(Some(next)) => Step::Next(next),
        Ok(None) => Step::Terminal,
        Err(e) => Step::Stuck(e),
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum RunOutcome {
    Terminated { store: ValueAssignment, steps: u64 },
    OutOfFuel(Configuration),
    Stuck { reason: Stuck, at: Configuration, steps: u64 },
}

impl RunOutcome {
    pub fn terminated(&self) -> Option<&ValueAssignment> {
        match self {
            RunOutcome::Terminated { store, .. } => Some(store),
            _ => None,
        }
    }
}

/// Steps at most `fuel` times.
pub fn run(c: &Configuration, fuel: u64) -> RunOutcome {
    let mut current = c.clone();
    let mut steps = 0;
    loop {
        if current.is_terminal() {
            return RunOutcome::Terminated { store: current.store, steps };
        }
        if steps == fuel {
            return RunOutcome::OutOfFuel(current);
        }
        match step(&current) {
            Step::Next(next) => current = next,
            Step::Terminal => unreachable!("checked above"),
            Step::Stuck(reason) => return RunOutcome::Stuck { reason, at: current, steps },
        }
        steps += 1;
    }
}

/// The configurations visited by [`run`], starting with `c`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Trace {
    pub configurations: Vec<Configuration>,
    pub stuck: Option<Stuck>,
}

impl Trace {
    pub fn last(&self) -> &Configuration {
        self.configurations.last().expect("trace starts with the initial configuration")
    }

    pub fn terminated(&self) -> bool {
        self.stuck.is_none() && self.last().is_terminal()
    }

    /// One line per configuration: `term | store`.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for c in &self.configurations {
            out.push_str(&c.to_string());
            out.push('\n');
        }
        if let Some(reason) = &self.stuck {
            out.push_str(&format!("STUCK: {reason}\n"));
        }
        out
    }

    /// JSON lines, one record per configuration.
    pub fn to_records(&self) -> String {
        let p = Printer::sugared();
        let mut out = String::new();
        for (i, c) in self.configurations.iter().enumerate() {
            let store: serde_json::Map<String, serde_json::Value> =
                c.store.iter().map(|(n, v)| (n.clone(), json!(p.value(v)))).collect();
            let rec = json!({"step": i, "term": p.term_inline(&c.term), "store": store});
            out.push_str(&rec.to_string());
            out.push('\n');
        }
        if let Some(reason) = &self.stuck {
            out.push_str(&json!({"stuck": reason.to_string()}).to_string());
            out.push('\n');
        }
        out
    }
}

pub fn trace(c: &Configuration, fuel: u64) -> Trace {
    let mut configurations = vec![c.clone()];
    let mut stuck = None;
    for _ in 0..fuel {
        match step(configurations.last().unwrap()) {
            Step::Next(next) => configurations.push(next),
            Step::Terminal => break,
            Step::Stuck(reason) => {
                stuck = Some(reason);
                break;
            }
        }
    }
    Trace { configurations, stuck }
}

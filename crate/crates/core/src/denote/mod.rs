//! Denotational semantics in the category of sets and partial functions.
//!
//! `⟦A⟧` is the set of closed values of type `A` ([`elems`]), discarding
//! maps are synthesized from types ([`discard`]), and a well-typed term
//! denotes a fuel-indexed partial map between value assignments. Loops are
//! evaluated as least fixpoints by iterating `W` pointwise; running out of
//! fuel yields `⊥`.

pub mod discard;
pub mod elems;
mod eval;

use std::fmt;

use crate::frontend::Printer;
use crate::interp::Configuration;
use crate::syntax::{AtomTable, Term, Type, VarContext};
use crate::typecheck::{Checker, TypingError};
use crate::value::{Value, ValueAssignment};

pub use discard::{discard, AffineType, DiscardEntry, DiscardEnv, Discarder};
pub use elems::{env_elems, sem_elems, sem_elems_with, Binding, Enumerator, TypeEnv};
pub use eval::{cost, FuelModel};

use eval::{Op, Tank};

/// Result of evaluating a denotation at some fuel.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Outcome {
    Defined(ValueAssignment),
    Bottom,
}

impl Outcome {
    pub fn is_bottom(&self) -> bool {
        matches!(self, Outcome::Bottom)
    }

    pub fn defined(&self) -> Option<&ValueAssignment> {
        match self {
            Outcome::Defined(v) => Some(v),
            Outcome::Bottom => None,
        }
    }
}

impl fmt::Display for Outcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Outcome::Defined(v) => f.write_str(&Printer::sugared().store(v)),
            Outcome::Bottom => f.write_str("BOTTOM"),
        }
    }
}

/// `⟦⊢ ⟨Γ⟩ M ⟨Σ⟩⟧` with `Γ` and `Σ` in canonical layout.
#[derive(Clone, Debug)]
pub struct Denotation {
    pub input: VarContext,
    pub output: VarContext,
    op: Op,
}

impl Denotation {
    /// Applies the denotation to the tuple `(v₁, …, vₙ)` laid out as `Γ`.
    pub fn eval_tuple(&self, tuple: Vec<Value>, fuel: u64, model: FuelModel) -> Option<Vec<Value>> {
        assert_eq!(tuple.len(), self.input.len(), "input arity");
        let mut tank = Tank { model, left: fuel };
        eval::eval(&self.op, tuple, &mut tank)
    }

    /// Evaluates on a value assignment over `Γ`.
    pub fn eval(&self, input: &ValueAssignment, fuel: u64, model: FuelModel) -> Outcome {
        let tuple =
            self.input.names().map(|n| input.get(n).cloned().unwrap_or_else(|| panic!("input lacks `{n}`"))).collect();
        match self.eval_tuple(tuple, fuel, model) {
            Some(out) => Outcome::Defined(self.output.names().cloned().zip(out).collect()),
            None => Outcome::Bottom,
        }
    }

    /// Least fuel at which the denotation is defined on `input`, searching
    /// up to `limit`.
    pub fn least_fuel(&self, input: &ValueAssignment, limit: u64, model: FuelModel) -> Option<u64> {
        if self.eval(input, limit, model).is_bottom() {
            return None;
        }
        let (mut lo, mut hi) = (0, limit);
        while lo < hi {
            let mid = lo + (hi - lo) / 2;
            if self.eval(input, mid, model).is_bottom() {
                lo = mid + 1;
            } else {
                hi = mid;
            }
        }
        Some(lo)
    }
}

pub fn denote_term_with(atoms: &AtomTable, gamma: &VarContext, term: &Term) -> Result<Denotation, TypingError> {
    let output = Checker::new(atoms).check_term(gamma, term)?;
    let mut layout = gamma.clone();
    let op = eval::compile(atoms, &mut layout, term);
    debug_assert_eq!(layout, output);
    Ok(Denotation { input: gamma.clone(), output: layout, op })
}

pub fn denote_term(gamma: &VarContext, term: &Term) -> Result<Denotation, TypingError> {
    denote_term_with(&AtomTable::default(), gamma, term)
}

/// `⟦V⟧` followed by `⟦M⟧`, with `Γ` reconstructed from `V`.
pub fn denote_configuration_with(
    atoms: &AtomTable,
    c: &Configuration,
    fuel: u64,
    model: FuelModel,
) -> Result<Outcome, TypingError> {
    let (gamma, _) = Checker::new(atoms).check_configuration(&c.term, &c.store)?;
    Ok(denote_term_with(atoms, &gamma, &c.term)?.eval(&c.store, fuel, model))
}

pub fn denote_configuration(c: &Configuration, fuel: u64, model: FuelModel) -> Result<Outcome, TypingError> {
    denote_configuration_with(&AtomTable::default(), c, fuel, model)
}

/// `⟦⊢ v : A⟧`, the element of `⟦A⟧` a value names. The carrier is the set
/// of values itself, so this is the embedding.
pub fn denote_value(value: &Value) -> Value {
    value.clone()
}

/// `fold_{μX.A} : ⟦A[μX.A/X]⟧ → ⟦μX.A⟧`
pub fn fold_iso(mu_ty: &Type, v: &Value) -> Value {
    Value::fold(mu_ty.clone(), v.clone())
}

/// `unfold_{μX.A} : ⟦μX.A⟧ → ⟦A[μX.A/X]⟧`
pub fn unfold_iso(_mu_ty: &Type, w: &Value) -> Value {
    match w {
        Value::Fold { inner, .. } => (**inner).clone(),
        other => panic!("unfold of non-fold value {other}"),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::frontend::parse_term;
    use crate::interp::run;

    fn store(pairs: &[(&str, Value)]) -> ValueAssignment {
        ValueAssignment::from_pairs(pairs.iter().cloned())
    }

    fn config(src: &str, pairs: &[(&str, Value)]) -> Configuration {
        Configuration::new(parse_term(src).unwrap(), store(pairs))
    }

    const FLIP: &str = "while b do { discard b; new unit u; b = left[I,I] u }";

    #[test]
    fn discard_clause() {
        let gamma = VarContext::from_pairs([("x", Type::Unit)]).unwrap();
        let d = denote_term(&gamma, &Term::discard("x")).unwrap();
        for fuel in [0, 1, 5] {
            assert_eq!(
                d.eval(&store(&[("x", Value::Star)]), fuel, FuelModel::Unfoldings),
                Outcome::Defined(store(&[]))
            );
        }
    }

    #[test]
    fn flip_loop_needs_two_unfoldings() {
        let c = config(FLIP, &[("b", Value::tt())]);
        assert!(denote_configuration(&c, 1, FuelModel::Unfoldings).unwrap().is_bottom());
        for fuel in 2..6 {
            assert_eq!(
                denote_configuration(&c, fuel, FuelModel::Unfoldings).unwrap(),
                Outcome::Defined(store(&[("b", Value::ff())]))
            );
        }
    }

    #[test]
    fn identity_loop_is_bottom() {
        let c = config("while b do { skip }", &[("b", Value::tt())]);
        for fuel in [0, 1, 100, 10_000] {
            assert!(denote_configuration(&c, fuel, FuelModel::Unfoldings).unwrap().is_bottom());
            assert!(denote_configuration(&c, fuel, FuelModel::OperationalSteps).unwrap().is_bottom());
        }
    }

    #[test]
    fn configuration_examples() {
        let skip = config("skip", &[("x", Value::nat(2))]);
        assert_eq!(
            denote_configuration(&skip, 0, FuelModel::Unfoldings).unwrap(),
            Outcome::Defined(skip.store.clone())
        );
        let c = config("discard x; new unit y", &[("x", Value::tt())]);
        // Oracle: discard leaves {}, then new unit extends with y = *.
        let expected = store(&[("y", Value::Star)]);
        assert_eq!(denote_configuration(&c, 0, FuelModel::Unfoldings).unwrap(), Outcome::Defined(expected));
    }

    #[test]
    fn calibrated_fuel_is_exact_step_count() {
        let c = config(
            "m = unfold n; case m of { left z -> discard z | right p -> discard p }; while b do { discard b; new unit u; b = left[I,I] u }",
            &[("n", Value::nat(3)), ("b", Value::tt())],
        );
        let crate::interp::RunOutcome::Terminated { store, steps } = run(&c, 1000) else { panic!() };
        let d = denote_configuration(&c, steps, FuelModel::OperationalSteps).unwrap();
        assert_eq!(d, Outcome::Defined(store));
        assert!(denote_configuration(&c, steps - 1, FuelModel::OperationalSteps).unwrap().is_bottom());
    }

    #[test]
    fn case_permutes_right_branch_into_left_layout() {
        let c = config(
            "case x of { left a -> new unit p; new unit q; discard a | right c -> new unit q; new unit p; discard c }",
            &[("x", Value::tt())],
        );
        let out = denote_configuration(&c, 0, FuelModel::Unfoldings).unwrap();
        assert_eq!(out, Outcome::Defined(store(&[("p", Value::Star), ("q", Value::Star)])));
    }

    #[test]
    fn least_fuel_search() {
        let c = config(FLIP, &[("b", Value::tt())]);
        let gamma = VarContext::from_pairs([("b", Type::bit())]).unwrap();
        let d = denote_term(&gamma, &c.term).unwrap();
        assert_eq!(d.least_fuel(&c.store, 100, FuelModel::Unfoldings), Some(2));
    }

    #[test]
    fn fold_isos_are_inverse() {
        let nat = Type::nat();
        let zero = Value::left(Type::Unit, nat.clone(), Value::Star);
        assert_eq!(fold_iso(&nat, &zero), Value::nat(0));
        for v in sem_elems(&nat.unfold_mu().unwrap(), 9) {
            assert_eq!(unfold_iso(&nat, &fold_iso(&nat, &v)), v);
        }
        assert_eq!(denote_value(&Value::Star), Value::Star);
    }
}

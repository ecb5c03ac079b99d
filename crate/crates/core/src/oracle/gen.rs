//! Random well-typed configurations, built rule by rule.

use std::collections::{BTreeSet, HashMap};
use std::rc::Rc;
use std::sync::Arc;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::denote::Enumerator;
use crate::interp::Configuration;
use crate::syntax::{AtomTable, Name, Term, TermKind, Type, VarContext};
use crate::typecheck::check_term;
use crate::value::{Value, ValueAssignment};

/// Bounds for random generation. Generation is a function of these fields.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GenConfig {
    pub seed: u64,
    /// Statements per block, before nesting.
    pub max_term_size: usize,
    pub max_type_depth: usize,
    pub max_value_size: usize,
    pub fuel: u64,
}

impl Default for GenConfig {
    fn default() -> Self {
        GenConfig { seed: 0, max_term_size: 8, max_type_depth: 3, max_value_size: 9, fuel: 10_000 }
    }
}

impl GenConfig {
    pub fn with_seed(&self, seed: u64) -> GenConfig {
        GenConfig { seed, ..self.clone() }
    }
}

/// Which loop shapes a block may contain.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Loops {
    None,
    Terminating,
    Any,
}

const MAX_LOOP_DEPTH: usize = 2;

pub struct Generator {
    rng: ChaCha8Rng,
    cfg: GenConfig,
    counter: usize,
    atoms: AtomTable,
    values: HashMap<Type, Rc<Vec<Value>>>,
    smallest: HashMap<Type, Value>,
}

impl Generator {
    pub fn new(cfg: &GenConfig) -> Self {
        Generator {
            rng: ChaCha8Rng::seed_from_u64(cfg.seed),
            cfg: cfg.clone(),
            counter: 0,
            atoms: AtomTable::default(),
            values: HashMap::new(),
            smallest: HashMap::new(),
        }
    }

    pub fn rng(&mut self) -> &mut ChaCha8Rng {
        &mut self.rng
    }

    fn fresh(&mut self) -> Name {
        const BASES: &[&str] = &["x", "y", "z", "v", "w", "acc", "tmp"];
        let base = BASES[self.rng.gen_range(0..BASES.len())];
        self.counter += 1;
        if self.rng.gen_ratio(1, 8) {
            format!("{base}{}'", self.counter)
        } else {
            format!("{base}{}", self.counter)
        }
    }

    fn chance(&mut self, num: u32, den: u32) -> bool {
        self.rng.gen_ratio(num, den)
    }

    // -----------------------------------------------------------------------
    // Types and values
    // -----------------------------------------------------------------------

    /// A closed type in which every `μ` has a base case, so every type it
    /// contains is inhabited.
    pub fn closed_type(&mut self, depth: usize) -> Type {
        self.open_type(depth, &mut Vec::new())
    }

    /// A type whose free variables all lie in `scope`, each `μ` having a
    /// base case that avoids its own binder.
    pub fn open_type(&mut self, depth: usize, scope: &mut Vec<Name>) -> Type {
        if depth == 0 || self.chance(1, 4) {
            return match self.rng.gen_range(0..4) {
                0 if !scope.is_empty() => Type::var(scope.choose(&mut self.rng).unwrap().clone()),
                1 => Type::bit(),
                2 if depth > 0 => Type::nat(),
                _ => Type::Unit,
            };
        }
        match self.rng.gen_range(0..7) {
            0 | 1 => Type::sum(self.open_type(depth - 1, scope), self.open_type(depth - 1, scope)),
            2 | 3 => Type::tensor(self.open_type(depth - 1, scope), self.open_type(depth - 1, scope)),
            4 => Type::list(self.open_type(depth - 1, &mut Vec::new())),
            _ => {
                let binder =
                    ["X", "Y", "Z", "W"].iter().find(|b| !scope.iter().any(|s| s == *b)).map(|b| b.to_string());
                let Some(binder) = binder else { return Type::Unit };
                let base = self.open_type(depth - 1, scope);
                scope.push(binder.clone());
                let step = self.open_type(depth - 1, scope);
                scope.pop();
                Type::mu(binder, Type::sum(base, step))
            }
        }
    }

    fn values_of(&mut self, ty: &Type) -> Rc<Vec<Value>> {
        if let Some(hit) = self.values.get(ty) {
            return hit.clone();
        }
        let vs = Rc::new(Enumerator::new(&self.atoms).up_to(ty, self.cfg.max_value_size));
        self.values.insert(ty.clone(), vs.clone());
        vs
    }

    pub fn smallest_value(&mut self, ty: &Type) -> Value {
        if let Some(v) = self.smallest.get(ty) {
            return v.clone();
        }
        let mut e = Enumerator::new(&self.atoms);
        let v = (1..).find_map(|n| e.exact(ty, n).first().cloned()).expect("inhabited type");
        self.smallest.insert(ty.clone(), v.clone());
        v
    }

    pub fn random_value(&mut self, ty: &Type) -> Value {
        let vs = self.values_of(ty);
        match vs.choose(&mut self.rng) {
            Some(v) => v.clone(),
            None => self.smallest_value(ty),
        }
    }

    // -----------------------------------------------------------------------
    // Terms
    // -----------------------------------------------------------------------

    /// Statements binding `name` to `value`, built from `new unit` upward.
    pub fn construct(&mut self, name: &str, value: &Value) -> Vec<Term> {
        match value {
            Value::Star => vec![Term::new_unit(name)],
            Value::Left { left_ty, right_ty, inner } | Value::Right { left_ty, right_ty, inner } => {
                let tmp = self.fresh();
                let mut out = self.construct(&tmp, inner);
                out.push(if matches!(value, Value::Left { .. }) {
                    Term::left(name, left_ty.clone(), right_ty.clone(), tmp)
                } else {
                    Term::right(name, left_ty.clone(), right_ty.clone(), tmp)
                });
                out
            }
            Value::Pair(a, b) => {
                let (s, t) = (self.fresh(), self.fresh());
                let mut out = self.construct(&s, a);
                out.extend(self.construct(&t, b));
                out.push(Term::pair(name, s, t));
                out
            }
            Value::Fold { mu_ty, inner } => {
                let tmp = self.fresh();
                let mut out = self.construct(&tmp, inner);
                out.push(Term::fold(name, mu_ty.clone(), tmp));
                out
            }
            Value::Atom { .. } => panic!("generator does not use atomic types"),
        }
    }

    /// Statements turning `from` into `target`: mismatches are discarded,
    /// missing variables rebuilt from smallest values.
    fn repair(&mut self, from: &VarContext, target: &VarContext) -> Vec<Term> {
        let mut out = Vec::new();
        for (n, t) in from.iter() {
            if target.get(n) != Some(t) {
                out.push(Term::discard(n.clone()));
            }
        }
        let missing: Vec<(Name, Type)> =
            target.iter().filter(|(n, t)| from.get(n) != Some(*t)).map(|(n, t)| (n.clone(), t.clone())).collect();
        for (n, t) in missing {
            let v = self.smallest_value(&t);
            out.extend(self.construct(&n, &v));
        }
        out
    }

    fn apply(ctx: &mut VarContext, stmts: &[Term]) {
        for s in stmts {
            *ctx = check_term(ctx, s).unwrap_or_else(|e| panic!("generator produced ill-typed `{s}`: {e}"));
        }
    }

    fn pick_var(&mut self, ctx: &VarContext, pred: impl Fn(&Type) -> bool) -> Option<(Name, Type)> {
        let matching: Vec<(Name, Type)> =
            ctx.iter().filter(|(_, t)| pred(t)).map(|(n, t)| (n.clone(), t.clone())).collect();
        matching.choose(&mut self.rng).cloned()
    }

    fn mu_pool(ctx: &VarContext) -> Vec<Type> {
        fn collect(t: &Type, out: &mut Vec<Type>) {
            if t.is_closed() && matches!(t, Type::Mu(..)) && !out.contains(t) {
                out.push(t.clone());
            }
            match t {
                Type::Sum(a, b) | Type::Tensor(a, b) => {
                    collect(a, out);
                    collect(b, out);
                }
                Type::Mu(_, body) => collect(body, out),
                _ => {}
            }
        }
        let mut out = vec![Type::nat(), Type::list(Type::bit())];
        for (_, t) in ctx.iter() {
            collect(t, &mut out);
        }
        out
    }

    /// A block of up to `budget` statements starting from `ctx`; `ctx` is
    /// updated to the block's output context.
    fn block(&mut self, ctx: &mut VarContext, budget: usize, loops: Loops, depth: usize) -> Term {
        let n = self.rng.gen_range(1..=budget.max(1));
        let mut stmts = Vec::new();
        for _ in 0..n {
            let s = self.statement(ctx, budget, loops, depth);
            Self::apply(ctx, &s);
            stmts.extend(s);
        }
        Term::seq_all(stmts)
    }

    fn statement(&mut self, ctx: &VarContext, budget: usize, loops: Loops, depth: usize) -> Vec<Term> {
        let sub = budget / 2;
        loop {
            let choice = self.rng.gen_range(0..16);
            let stmt = match choice {
                0 => Some(vec![Term::new_unit(self.fresh())]),
                1 => self.pick_var(ctx, |_| true).map(|(x, _)| vec![Term::discard(x)]),
                2 if ctx.len() < 6 => {
                    let ty = self.closed_type(self.cfg.max_type_depth);
                    let v = self.random_value(&ty);
                    let name = self.fresh();
                    Some(self.construct(&name, &v))
                }
                3 => Some(vec![Term::Skip]),
                4 | 5 => self.pick_var(ctx, |_| true).map(|(x, a)| {
                    let other = self.closed_type(1);
                    let dst = if self.chance(1, 3) { x.clone() } else { self.fresh() };
                    if self.chance(1, 2) {
                        vec![Term::left(dst, a, other, x)]
                    } else {
                        vec![Term::right(dst, other, a, x)]
                    }
                }),
                6 | 7 if sub > 0 => self
                    .pick_var(ctx, |t| matches!(t, Type::Sum(..)))
                    .map(|(y, _)| vec![self.case(&y, ctx, sub, loops, depth)]),
                8 => {
                    if ctx.len() < 2 {
                        None
                    } else {
                        let names: Vec<Name> = ctx.names().cloned().collect();
                        let picked: Vec<&Name> = names.choose_multiple(&mut self.rng, 2).collect();
                        let dst = if self.chance(1, 4) { picked[0].clone() } else { self.fresh() };
                        Some(vec![Term::pair(dst, picked[0].clone(), picked[1].clone())])
                    }
                }
                9 => self.pick_var(ctx, |t| matches!(t, Type::Tensor(..))).map(|(x, _)| {
                    let a = if self.chance(1, 4) { x.clone() } else { self.fresh() };
                    vec![Term::unpair(a, self.fresh(), x)]
                }),
                10 => self.pick_var(ctx, |t| matches!(t, Type::Mu(..))).map(|(x, t)| {
                    let y = if self.chance(1, 4) { x.clone() } else { self.fresh() };
                    let mut out = vec![Term::unfold(y.clone(), x)];
                    if self.chance(1, 2) {
                        let z = if self.chance(1, 2) { y.clone() } else { self.fresh() };
                        out.push(Term::fold(z, t, y));
                    }
                    out
                }),
                11 => {
                    let pool = Self::mu_pool(ctx);
                    let candidates: Vec<(Name, Type)> = ctx
                        .iter()
                        .filter_map(|(n, t)| {
                            pool.iter().find(|m| m.unfold_mu().as_ref() == Some(t)).map(|m| (n.clone(), m.clone()))
                        })
                        .collect();
                    candidates.choose(&mut self.rng).cloned().map(|(x, m)| {
                        let y = if self.chance(1, 2) { x.clone() } else { self.fresh() };
                        vec![Term::fold(y, m, x)]
                    })
                }
                12..=15 if loops != Loops::None && depth < MAX_LOOP_DEPTH && sub > 0 => {
                    match self.rng.gen_range(0..7) {
                        0 | 1 => Some(self.flip_loop(ctx, sub, loops, depth)),
                        2..=4 => Some(self.countdown_loop(ctx, sub, loops, depth)),
                        5 if loops == Loops::Any => Some(self.guard_loop(ctx, sub, loops, depth)),
                        _ => None,
                    }
                }
                _ => None,
            };
            if let Some(s) = stmt {
                return s;
            }
        }
    }

    fn case(&mut self, y: &str, ctx: &VarContext, budget: usize, loops: Loops, depth: usize) -> Term {
        let Some(Type::Sum(a, b)) = ctx.get(y).cloned() else { unreachable!() };
        let mut rest = ctx.clone();
        rest.remove(y);
        let (x1, x2) = (self.fresh(), self.fresh());

        let mut lctx = rest.clone();
        lctx.insert(x1.clone(), Arc::unwrap_or_clone(a)).unwrap();
        let left = self.block(&mut lctx, budget, loops, depth);

        let mut rctx = rest.clone();
        rctx.insert(x2.clone(), Arc::unwrap_or_clone(b)).unwrap();
        let right = self.block(&mut rctx, budget, loops, depth);
        let fix = self.repair(&rctx, &lctx);
        let right = Term::seq_all(std::iter::once(right).chain(fix));
        Term::case(y, x1, left, x2, right)
    }

    /// Loop body over `ctx` minus `keep`, restoring that context exactly.
    fn body_over(&mut self, ctx: &VarContext, keep: &[&str], budget: usize, loops: Loops, depth: usize) -> Term {
        let mut frame = ctx.clone();
        for k in keep {
            frame.remove(k);
        }
        let mut inner = frame.clone();
        let m = self.block(&mut inner, budget, loops, depth + 1);
        let fix = self.repair(&inner, &frame);
        Term::seq_all(std::iter::once(m).chain(fix))
    }

    /// Statements yielding a fresh bit variable, plus its name.
    fn make_guard(&mut self, value: bool) -> (Name, Vec<Term>) {
        let (g, t) = (self.fresh(), self.fresh());
        let intro = if value {
            Term::right(g.clone(), Type::Unit, Type::Unit, t.clone())
        } else {
            Term::left(g.clone(), Type::Unit, Type::Unit, t.clone())
        };
        (g, vec![Term::new_unit(t), intro])
    }

    fn guard_from(&mut self, ctx: &VarContext) -> (Name, Vec<Term>) {
        match self.pick_var(ctx, Type::is_bit) {
            Some((b, _)) if self.chance(1, 2) => (b, Vec::new()),
            _ => {
                let v = self.chance(3, 4);
                self.make_guard(v)
            }
        }
    }

    /// The body clears the guard: at most one iteration.
    fn flip_loop(&mut self, ctx: &VarContext, budget: usize, loops: Loops, depth: usize) -> Vec<Term> {
        let (b, mut out) = self.guard_from(ctx);
        let mut full = ctx.clone();
        Self::apply(&mut full, &out);
        let t = self.fresh();
        let body = Term::seq_all([
            Term::discard(b.clone()),
            self.body_over(&full, &[&b], budget, loops, depth),
            Term::new_unit(t.clone()),
            Term::left(b.clone(), Type::Unit, Type::Unit, t),
        ]);
        out.push(Term::while_do(b, body));
        out
    }

    /// Walks an inductive value down to its base case, one constructor per
    /// iteration, clearing the guard at the base.
    fn countdown_loop(&mut self, ctx: &VarContext, budget: usize, loops: Loops, depth: usize) -> Vec<Term> {
        let shapes = [Type::nat(), Type::list(Type::bit()), Type::list(Type::nat())];
        let countable = |t: &Type| countdown_shape(t).is_some();
        let mut out = Vec::new();
        let n = match self.pick_var(ctx, countable) {
            Some((n, _)) if self.chance(2, 3) => n,
            _ => {
                let ty = shapes.choose(&mut self.rng).unwrap().clone();
                let v = self.random_value(&ty);
                let n = self.fresh();
                out.extend(self.construct(&n, &v));
                n
            }
        };
        let mut full = ctx.clone();
        Self::apply(&mut full, &out);
        let (b, guard) = {
            let v = self.chance(3, 4);
            self.make_guard(v)
        };
        Self::apply(&mut full, &guard);
        out.extend(guard);

        let mu = full.get(&n).unwrap().clone();
        let elem = countdown_shape(&mu).unwrap();
        let Some(Type::Sum(base, step)) = mu.unfold_mu() else { unreachable!() };
        let (m, z, w, u, p, r) = (self.fresh(), self.fresh(), self.fresh(), self.fresh(), self.fresh(), self.fresh());
        let at_base = Term::seq_all([
            Term::left(w.clone(), (*base).clone(), (*step).clone(), z.clone()),
            Term::fold(n.clone(), mu.clone(), w),
            Term::discard(b.clone()),
            Term::new_unit(u.clone()),
            Term::left(b.clone(), Type::Unit, Type::Unit, u),
        ]);
        let shrink = match elem {
            None => Term::seq_all([Term::unfold(r.clone(), p.clone()), Term::fold(n.clone(), mu.clone(), r)]),
            Some(_) => {
                let (h, t) = (self.fresh(), self.fresh());
                Term::seq_all([
                    Term::unpair(h.clone(), t.clone(), p.clone()),
                    Term::discard(h),
                    Term::unfold(r.clone(), t),
                    Term::fold(n.clone(), mu.clone(), r),
                ])
            }
        };
        let body = Term::seq_all([
            Term::unfold(m.clone(), n.clone()),
            Term::case(m, z, at_base, p, shrink),
            self.body_over(&full, &[&n, &b], budget, loops, depth),
        ]);
        out.push(Term::while_do(b, body));
        out
    }

    /// A loop whose body never mentions the guard: diverges iff it starts tt.
    fn guard_loop(&mut self, ctx: &VarContext, budget: usize, loops: Loops, depth: usize) -> Vec<Term> {
        let (b, out) = self.guard_from(ctx);
        let mut full = ctx.clone();
        Self::apply(&mut full, &out);
        let body = self.body_over(&full, &[&b], budget, loops, depth);
        let mut out = out;
        out.push(Term::while_do(b, body));
        out
    }

    // -----------------------------------------------------------------------
    // Entry points
    // -----------------------------------------------------------------------

    /// A random well-typed configuration. Loops may diverge.
    pub fn configuration(&mut self) -> Configuration {
        self.configuration_with(Loops::Any)
    }

    /// A configuration whose loops all terminate by construction.
    pub fn terminating_configuration(&mut self) -> Configuration {
        self.configuration_with(Loops::Terminating)
    }

    fn configuration_with(&mut self, loops: Loops) -> Configuration {
        let mut gamma = VarContext::new();
        let mut store = ValueAssignment::new();
        for _ in 0..self.rng.gen_range(0..=4) {
            let ty = self.closed_type(self.cfg.max_type_depth);
            let v = self.random_value(&ty);
            let x = self.fresh();
            gamma.insert(x.clone(), ty).unwrap();
            store.bind(x, v);
        }
        let mut ctx = gamma;
        let term = self.block(&mut ctx, self.cfg.max_term_size, loops, 0);
        Configuration::new(term, store)
    }

    /// A closed program `⊢ ⟨·⟩ M ⟨Σ⟩`. With `divergent`, the program runs a
    /// loop whose guard starts true and is never touched by the body.
    pub fn closed_program(&mut self, divergent: bool) -> Term {
        let mut ctx = VarContext::new();
        let mut parts = Vec::new();
        for _ in 0..self.rng.gen_range(1..=3) {
            let ty = self.closed_type(self.cfg.max_type_depth);
            let v = self.random_value(&ty);
            let x = self.fresh();
            let s = self.construct(&x, &v);
            Self::apply(&mut ctx, &s);
            parts.extend(s);
        }
        let budget = self.cfg.max_term_size;
        parts.push(self.block(&mut ctx, budget, Loops::Terminating, 0));
        if divergent {
            let (b, guard) = self.make_guard(true);
            Self::apply(&mut ctx, &guard);
            parts.extend(guard);
            let body = self.body_over(&ctx, &[&b], budget / 2, Loops::Terminating, 0);
            let l = Term::while_do(b, body);
            Self::apply(&mut ctx, std::slice::from_ref(&l));
            parts.push(l);
        }
        parts.push(self.block(&mut ctx, budget / 2, Loops::Terminating, 0));
        Term::seq_all(parts)
    }
}

/// For `μX. I + X` returns `Some(None)`; for `μX. I + A ⊗ X` returns
/// `Some(Some(A))`.
fn countdown_shape(t: &Type) -> Option<Option<Type>> {
    let Some(Type::Sum(base, step)) = t.unfold_mu() else { return None };
    if *base != Type::Unit {
        return None;
    }
    if *step == *t {
        return Some(None);
    }
    match &*step {
        Type::Tensor(a, tail) if **tail == *t && a.is_closed() => Some(Some(Type::clone(a))),
        _ => None,
    }
}

/// Term constructors occurring in `t`.
pub fn constructors(t: &Term) -> BTreeSet<TermKind> {
    let mut out = BTreeSet::new();
    t.for_each_subterm(&mut |s| {
        out.insert(s.kind());
    });
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::typecheck::check_configuration;

    #[test]
    fn configurations_are_well_formed() {
        for seed in 0..200 {
            let c = Generator::new(&GenConfig::default().with_seed(seed)).configuration();
            check_configuration(&c.term, &c.store).unwrap_or_else(|e| panic!("seed {seed}: {e}\n{}", c.term));
        }
    }

    #[test]
    fn deterministic_per_seed() {
        let a = Generator::new(&GenConfig::default().with_seed(5)).configuration();
        let b = Generator::new(&GenConfig::default().with_seed(5)).configuration();
        assert_eq!(a, b);
    }

    #[test]
    fn closed_programs_check_in_empty_context() {
        for seed in 0..50 {
            let mut g = Generator::new(&GenConfig::default().with_seed(seed));
            let t = g.closed_program(seed % 2 == 0);
            check_term(&VarContext::new(), &t).unwrap();
        }
    }

    #[test]
    fn countdown_shapes() {
        assert_eq!(countdown_shape(&Type::nat()), Some(None));
        assert_eq!(countdown_shape(&Type::list(Type::bit())), Some(Some(Type::bit())));
        assert_eq!(countdown_shape(&Type::bit()), None);
    }
}

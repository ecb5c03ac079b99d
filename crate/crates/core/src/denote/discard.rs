//! Discarding maps `⋄_A : ⟦A⟧ → I`, synthesized from the structure of `A`.

use std::rc::Rc;

use crate::syntax::{AtomSpec, AtomTable, Name, Type};
use crate::value::Value;

/// A discarding map in closed form. `Param(i)` refers to the `i`-th
/// enclosing type variable counting from the innermost.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Discarder {
    /// `⋄_I = id`
    Unit,
    /// Taken from the model's atom table.
    Atom(Name, AtomSpec),
    /// `[⋄_A, ⋄_B]`
    Copair(Box<Discarder>, Box<Discarder>),
    /// `λ ∘ (⋄_A ⊗ ⋄_B)`
    Tensor(Box<Discarder>, Box<Discarder>),
    Param(usize),
    /// The map induced on the initial algebra: `⋄(fold v) = ⋄_body(v)` with
    /// the bound variable interpreted by this map itself.
    Mu(Box<Discarder>),
    /// Atomic type missing from the table: empty carrier, empty map.
    Empty,
}

/// Failure to synthesize: a free type variable outside `Θ`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UnboundParam(pub Name);

impl Discarder {
    /// Synthesizes `⋄` for `Θ ⊢ A`; `theta` lists binders outermost first.
    pub fn synthesize(atoms: &AtomTable, theta: &[Name], ty: &Type) -> Result<Discarder, UnboundParam> {
        let mut scope = theta.to_vec();
        synth(atoms, &mut scope, ty)
    }

    pub fn for_closed(atoms: &AtomTable, ty: &Type) -> Discarder {
        Discarder::synthesize(atoms, &[], ty).expect("closed type")
    }

    /// Applies the map; `None` is undefinedness.
    pub fn apply(&self, value: &Value, env: &DiscardEnv) -> Option<Value> {
        apply(self, value, env).then_some(Value::Star)
    }
}

fn synth(atoms: &AtomTable, scope: &mut Vec<Name>, ty: &Type) -> Result<Discarder, UnboundParam> {
    Ok(match ty {
        Type::Unit => Discarder::Unit,
        Type::Atomic(name) => match atoms.get(name) {
            Some(spec) => Discarder::Atom(name.clone(), spec.clone()),
            None => Discarder::Empty,
        },
        Type::Var(x) => {
            let depth = scope.iter().rev().position(|n| n == x).ok_or_else(|| UnboundParam(x.clone()))?;
            Discarder::Param(depth)
        }
        Type::Sum(a, b) => Discarder::Copair(Box::new(synth(atoms, scope, a)?), Box::new(synth(atoms, scope, b)?)),
        Type::Tensor(a, b) => Discarder::Tensor(Box::new(synth(atoms, scope, a)?), Box::new(synth(atoms, scope, b)?)),
        Type::Mu(x, body) => {
            scope.push(x.clone());
            let inner = synth(atoms, scope, body);
            scope.pop();
            Discarder::Mu(Box::new(inner?))
        }
    })
}

/// A discardability test supplied from outside.
pub type Predicate = Rc<dyn Fn(&Value) -> bool>;

/// Interpretation of the parameters of an open discarder.
#[derive(Clone)]
pub enum DiscardEntry {
    Given(Predicate),
    Fix(Discarder, DiscardEnv),
}

/// Linked environment; the head is parameter 0.
#[derive(Clone, Default)]
pub struct DiscardEnv(Option<Rc<(DiscardEntry, DiscardEnv)>>);

impl DiscardEnv {
    pub fn empty() -> Self {
        DiscardEnv(None)
    }

    /// Extends with a new innermost parameter.
    pub fn push(&self, entry: DiscardEntry) -> DiscardEnv {
        DiscardEnv(Some(Rc::new((entry, self.clone()))))
    }

    /// Environment for `theta` (outermost first) from one predicate per
    /// variable.
    pub fn from_params(params: Vec<Predicate>) -> DiscardEnv {
        params.into_iter().fold(DiscardEnv::empty(), |env, p| env.push(DiscardEntry::Given(p)))
    }

    fn get(&self, mut index: usize) -> Option<&DiscardEntry> {
        let mut cur = self;
        loop {
            let node = cur.0.as_ref()?;
            if index == 0 {
                return Some(&node.0);
            }
            index -= 1;
            cur = &node.1;
        }
    }
}

fn apply(d: &Discarder, v: &Value, env: &DiscardEnv) -> bool {
    match (d, v) {
        (Discarder::Unit, Value::Star) => true,
        (Discarder::Atom(name, spec), Value::Atom { ty, token }) => name == ty && spec.discards(*token),
        (Discarder::Copair(a, _), Value::Left { inner, .. }) => apply(a, inner, env),
        (Discarder::Copair(_, b), Value::Right { inner, .. }) => apply(b, inner, env),
        (Discarder::Tensor(a, b), Value::Pair(x, y)) => apply(a, x, env) && apply(b, y, env),
        (Discarder::Param(i), _) => match env.get(*i) {
            Some(DiscardEntry::Given(f)) => f(v),
            Some(DiscardEntry::Fix(mu, outer)) => apply(mu, v, outer),
            None => false,
        },
        (Discarder::Mu(body), Value::Fold { inner, .. }) => {
            let inner_env = env.push(DiscardEntry::Fix(d.clone(), env.clone()));
            apply(body, inner, &inner_env)
        }
        _ => false,
    }
}

/// `⋄_A(v)` for closed `A`.
pub fn discard(atoms: &AtomTable, ty: &Type, value: &Value) -> Option<Value> {
    Discarder::for_closed(atoms, ty).apply(value, &DiscardEnv::empty())
}

/// The affine interpretation `⦇A⦈ = (⟦A⟧, ⋄_A)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AffineType {
    carrier: Type,
    pub discard: Discarder,
}

impl AffineType {
    pub fn interpret(atoms: &AtomTable, ty: &Type) -> AffineType {
        AffineType { carrier: ty.clone(), discard: Discarder::for_closed(atoms, ty) }
    }

    /// The forgetful projection onto the standard interpretation.
    pub fn carrier(&self) -> &Type {
        &self.carrier
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::denote::elems::sem_elems;

    fn no_atoms() -> AtomTable {
        AtomTable::default()
    }

    #[test]
    fn examples() {
        assert_eq!(discard(&no_atoms(), &Type::Unit, &Value::Star), Some(Value::Star));
        assert_eq!(discard(&no_atoms(), &Type::nat(), &Value::nat(1)), Some(Value::Star));
        let bb = Type::tensor(Type::bit(), Type::bit());
        assert_eq!(discard(&no_atoms(), &bb, &Value::pair(Value::tt(), Value::ff())), Some(Value::Star));
    }

    #[test]
    fn synthesis_shape() {
        let d = Discarder::for_closed(&no_atoms(), &Type::nat());
        assert_eq!(
            d,
            Discarder::Mu(Box::new(Discarder::Copair(Box::new(Discarder::Unit), Box::new(Discarder::Param(0)))))
        );
        assert_eq!(Discarder::synthesize(&no_atoms(), &[], &Type::var("X")), Err(UnboundParam("X".into())));
    }

    #[test]
    fn partial_atoms_make_partial_discards() {
        let spec = AtomSpec { carrier: 2, discardable: Some([0].into_iter().collect()) };
        let atoms = AtomTable::new().with("Q", spec);
        let ty = Type::list(Type::atomic("Q"));
        let q = |t| Value::Atom { ty: "Q".into(), token: t };
        let nil =
            Value::fold(ty.clone(), Value::left(Type::Unit, Type::tensor(Type::atomic("Q"), ty.clone()), Value::Star));
        let cons = |h: Value, t: Value| {
            Value::fold(
                ty.clone(),
                Value::right(Type::Unit, Type::tensor(Type::atomic("Q"), ty.clone()), Value::pair(h, t)),
            )
        };
        assert!(discard(&atoms, &ty, &cons(q(0), nil.clone())).is_some());
        assert!(discard(&atoms, &ty, &cons(q(0), cons(q(1), nil))).is_none());
    }

    #[test]
    fn parameter_environment() {
        // X ⊢ I + X with ⋄_X given as "only tt is discardable".
        let d = Discarder::synthesize(&no_atoms(), &["X".into()], &Type::sum(Type::Unit, Type::var("X"))).unwrap();
        let env = DiscardEnv::from_params(vec![Rc::new(|v: &Value| v.is_bit() == Some(true))]);
        let mk = |v| Value::right(Type::Unit, Type::bit(), v);
        assert!(d.apply(&mk(Value::tt()), &env).is_some());
        assert!(d.apply(&mk(Value::ff()), &env).is_none());
        assert!(d.apply(&Value::left(Type::Unit, Type::bit(), Value::Star), &env).is_some());
    }

    #[test]
    fn affine_interpretation_keeps_carrier() {
        let ty = Type::list(Type::bit());
        let affine = AffineType::interpret(&no_atoms(), &ty);
        assert_eq!(sem_elems(affine.carrier(), 10), sem_elems(&ty, 10));
    }
}

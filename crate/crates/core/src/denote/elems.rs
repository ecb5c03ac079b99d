//! Finite truncations of the carriers `⟦A⟧`.

use std::collections::{BTreeMap, HashMap};
use std::rc::Rc;

use crate::syntax::{AtomTable, Name, Type};
use crate::value::Value;

/// Bottom-up enumeration by exact node count, memoized per `(type, size)`.
pub struct Enumerator<'a> {
    atoms: &'a AtomTable,
    memo: HashMap<(Type, usize), Rc<Vec<Value>>>,
}

impl<'a> Enumerator<'a> {
    pub fn new(atoms: &'a AtomTable) -> Self {
        Enumerator { atoms, memo: HashMap::new() }
    }

    /// All values of `ty` with exactly `n` nodes.
    pub fn exact(&mut self, ty: &Type, n: usize) -> Rc<Vec<Value>> {
        if n == 0 {
            return Rc::new(Vec::new());
        }
        let key = (ty.clone(), n);
        if let Some(hit) = self.memo.get(&key) {
            return hit.clone();
        }
        let mut out = Vec::new();
        match ty {
            Type::Var(x) => panic!("cannot enumerate open type (free `{x}`)"),
            Type::Unit => {
                if n == 1 {
                    out.push(Value::Star);
                }
            }
            Type::Atomic(name) => {
                if let (1, Some(spec)) = (n, self.atoms.get(name)) {
                    out.extend((0..spec.carrier).map(|token| Value::Atom { ty: name.clone(), token }));
                }
            }
            Type::Sum(a, b) => {
                for v in self.exact(a, n - 1).iter() {
                    out.push(Value::left((**a).clone(), (**b).clone(), v.clone()));
                }
                for v in self.exact(b, n - 1).iter() {
                    out.push(Value::right((**a).clone(), (**b).clone(), v.clone()));
                }
            }
            Type::Tensor(a, b) => {
                for k in 1..n.saturating_sub(1) {
                    let lefts = self.exact(a, k);
                    if lefts.is_empty() {
                        continue;
                    }
                    let rights = self.exact(b, n - 1 - k);
                    for v in lefts.iter() {
                        for w in rights.iter() {
                            out.push(Value::pair(v.clone(), w.clone()));
                        }
                    }
                }
            }
            Type::Mu(..) => {
                let unfolded = ty.unfold_mu().expect("mu");
                for v in self.exact(&unfolded, n - 1).iter() {
                    out.push(Value::fold(ty.clone(), v.clone()));
                }
            }
        }
        let out = Rc::new(out);
        self.memo.insert(key, out.clone());
        out
    }

    /// All values of `ty` with at most `bound` nodes, smallest first.
    pub fn up_to(&mut self, ty: &Type, bound: usize) -> Vec<Value> {
        (1..=bound).flat_map(|n| self.exact(ty, n).as_ref().clone()).collect()
    }

    pub fn count_up_to(&mut self, ty: &Type, bound: usize) -> usize {
        (1..=bound).map(|n| self.exact(ty, n).len()).sum()
    }
}

/// Values of the closed type `ty` with at most `bound` nodes, with no
/// atomic types registered.
pub fn sem_elems(ty: &Type, bound: usize) -> Vec<Value> {
    sem_elems_with(&AtomTable::default(), ty, bound)
}

pub fn sem_elems_with(atoms: &AtomTable, ty: &Type, bound: usize) -> Vec<Value> {
    Enumerator::new(atoms).up_to(ty, bound)
}

/// Interpretation of a free type variable.
#[derive(Clone, Debug)]
pub enum Binding {
    /// `X ↦ ⟦B⟧` for a closed `B`.
    Closed(Type),
    /// The carrier of an enclosing `μ`, in the environment it was opened in.
    Fix { mu: Type, env: TypeEnv },
}

/// `Θ`-indexed environment for interpreting open types, innermost last.
#[derive(Clone, Debug, Default)]
pub struct TypeEnv(Vec<(Name, Rc<Binding>)>);

impl TypeEnv {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn bind(&self, var: impl Into<Name>, binding: Binding) -> TypeEnv {
        let mut next = self.0.clone();
        next.push((var.into(), Rc::new(binding)));
        TypeEnv(next)
    }

    fn lookup(&self, var: &str) -> Option<&Binding> {
        self.0.iter().rev().find(|(n, _)| n == var).map(|(_, b)| b.as_ref())
    }

    /// The closing substitution this environment induces on `ty`.
    pub fn close(&self, ty: &Type) -> Type {
        let mut map = BTreeMap::new();
        for var in ty.free_vars() {
            let closed = match self.lookup(&var) {
                Some(Binding::Closed(b)) => b.clone(),
                Some(Binding::Fix { mu, env }) => env.close(mu),
                None => continue,
            };
            map.insert(var, closed);
        }
        ty.substitute_all(&map)
    }
}

/// Enumerates `⟦Θ ⊢ A⟧(ρ)` semantically: variables draw from the
/// environment and `μ` binds its own carrier instead of unfolding
/// syntactically. Exact node count `n`.
pub fn env_elems_exact(atoms: &AtomTable, ty: &Type, env: &TypeEnv, n: usize) -> Vec<Value> {
    if n == 0 {
        return Vec::new();
    }
    match ty {
        Type::Var(x) => match env.lookup(x) {
            Some(Binding::Closed(b)) => Enumerator::new(atoms).exact(b, n).as_ref().clone(),
            Some(Binding::Fix { mu, env }) => env_elems_exact(atoms, mu, env, n),
            None => panic!("type variable `{x}` not in environment"),
        },
        Type::Unit => {
            if n == 1 {
                vec![Value::Star]
            } else {
                Vec::new()
            }
        }
        Type::Atomic(name) => match (n, atoms.get(name)) {
            (1, Some(spec)) => (0..spec.carrier).map(|token| Value::Atom { ty: name.clone(), token }).collect(),
            _ => Vec::new(),
        },
        Type::Sum(a, b) => {
            let (ca, cb) = (env.close(a), env.close(b));
            let mut out: Vec<Value> = env_elems_exact(atoms, a, env, n - 1)
                .into_iter()
                .map(|v| Value::left(ca.clone(), cb.clone(), v))
                .collect();
            out.extend(
                env_elems_exact(atoms, b, env, n - 1).into_iter().map(|v| Value::right(ca.clone(), cb.clone(), v)),
            );
            out
        }
        Type::Tensor(a, b) => {
            let mut out = Vec::new();
            for k in 1..n.saturating_sub(1) {
                let lefts = env_elems_exact(atoms, a, env, k);
                if lefts.is_empty() {
                    continue;
                }
                let rights = env_elems_exact(atoms, b, env, n - 1 - k);
                for v in &lefts {
                    for w in &rights {
                        out.push(Value::pair(v.clone(), w.clone()));
                    }
                }
            }
            out
        }
        Type::Mu(y, body) => {
            let closed = env.close(ty);
            let inner = env.bind(y.clone(), Binding::Fix { mu: ty.clone(), env: env.clone() });
            env_elems_exact(atoms, body, &inner, n - 1).into_iter().map(|v| Value::fold(closed.clone(), v)).collect()
        }
    }
}

pub fn env_elems(atoms: &AtomTable, ty: &Type, env: &TypeEnv, bound: usize) -> Vec<Value> {
    (1..=bound).flat_map(|n| env_elems_exact(atoms, ty, env, n)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::typecheck::check_value;

    #[test]
    fn fixed_points() {
        assert_eq!(sem_elems(&Type::bit(), 2), vec![Value::ff(), Value::tt()]);
        assert_eq!(sem_elems(&Type::nat(), 7), vec![Value::nat(0), Value::nat(1), Value::nat(2)]);
        for k in 1..6 {
            assert_eq!(sem_elems(&Type::Unit, k), vec![Value::Star]);
        }
        assert_eq!(sem_elems(&Type::list(Type::bit()), 8).len(), 3);
    }

    #[test]
    fn elements_are_well_typed_and_bounded() {
        let ty = Type::list(Type::tensor(Type::bit(), Type::Unit));
        for v in sem_elems(&ty, 12) {
            assert!(check_value(&v, &ty));
            assert!(v.size() <= 12);
        }
    }

    #[test]
    fn atomic_carriers() {
        use crate::syntax::AtomSpec;
        let atoms = AtomTable::new().with("Q", AtomSpec::total(3));
        assert_eq!(sem_elems_with(&atoms, &Type::atomic("Q"), 4).len(), 3);
        assert!(sem_elems(&Type::atomic("Q"), 4).is_empty());
    }

    #[test]
    fn environment_enumeration_matches_substitution() {
        let a = Type::sum(Type::Unit, Type::tensor(Type::var("X"), Type::list(Type::var("X"))));
        let b = Type::nat();
        let env = TypeEnv::new().bind("X", Binding::Closed(b.clone()));
        let mut lhs = sem_elems(&a.substitute("X", &b), 11);
        let mut rhs = env_elems(&AtomTable::default(), &a, &env, 11);
        lhs.sort_by_key(|v| v.to_string());
        rhs.sort_by_key(|v| v.to_string());
        assert_eq!(lhs, rhs);
        assert!(!lhs.is_empty());
    }
}

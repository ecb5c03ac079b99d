//! Reference enumeration for value sets, written without the memoized
//! enumerator: top-down with a shrinking node budget, every candidate
//! filtered through the value typing judgement.

use std::collections::HashSet;

use crate::syntax::{AtomTable, Type};
use crate::typecheck::Checker;
use crate::value::Value;

fn raw(atoms: &AtomTable, ty: &Type, budget: usize, out: &mut Vec<Value>) {
    if budget == 0 {
        return;
    }
    match ty {
        Type::Unit => out.push(Value::Star),
        Type::Atomic(name) => {
            if let Some(spec) = atoms.get(name) {
                out.extend((0..spec.carrier).map(|token| Value::Atom { ty: name.clone(), token }));
            }
        }
        Type::Var(_) => {}
        Type::Sum(a, b) => {
            let mut inner = Vec::new();
            raw(atoms, a, budget - 1, &mut inner);
            out.extend(inner.drain(..).map(|v| Value::left((**a).clone(), (**b).clone(), v)));
            raw(atoms, b, budget - 1, &mut inner);
            out.extend(inner.drain(..).map(|v| Value::right((**a).clone(), (**b).clone(), v)));
        }
        Type::Tensor(a, b) => {
            if budget < 3 {
                return;
            }
            let mut firsts = Vec::new();
            raw(atoms, a, budget - 2, &mut firsts);
            for v in firsts {
                let mut seconds = Vec::new();
                raw(atoms, b, budget - 1 - v.size(), &mut seconds);
                for w in seconds {
                    out.push(Value::pair(v.clone(), w));
                }
            }
        }
        Type::Mu(x, body) => {
            let unrolled = body.substitute(x, ty);
            let mut inner = Vec::new();
            raw(atoms, &unrolled, budget - 1, &mut inner);
            out.extend(inner.into_iter().map(|v| Value::fold(ty.clone(), v)));
        }
    }
}

/// Distinct values of `ty` with at most `bound` nodes.
pub fn brute_values(atoms: &AtomTable, ty: &Type, bound: usize) -> HashSet<Value> {
    let checker = Checker::new(atoms);
    let mut candidates = Vec::new();
    raw(atoms, ty, bound, &mut candidates);
    candidates.into_iter().filter(|v| v.size() <= bound && checker.check_value(v, ty)).collect()
}

pub fn brute_count_values(ty: &Type, bound: usize) -> usize {
    brute_values(&AtomTable::default(), ty, bound).len()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reference_counts() {
        assert_eq!(brute_count_values(&Type::bit(), 2), 2);
        assert_eq!(brute_count_values(&Type::nat(), 7), 3);
        assert_eq!(brute_count_values(&Type::list(Type::bit()), 8), 3);
        assert_eq!(brute_count_values(&Type::Unit, 9), 1);
    }
}

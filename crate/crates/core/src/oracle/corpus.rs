//! The example programs shipped in `corpus/`, embedded for the suites.

use crate::frontend::{parse_program, SourceProgram};
use crate::syntax::{Term, Type};

pub const CORPUS: &[(&str, &str)] = &[
    ("divergent.afl", include_str!("../../../../corpus/divergent.afl")),
    ("flip_loop.afl", include_str!("../../../../corpus/flip_loop.afl")),
    ("list_bit.afl", include_str!("../../../../corpus/list_bit.afl")),
    ("nat.afl", include_str!("../../../../corpus/nat.afl")),
    ("nested_mu.afl", include_str!("../../../../corpus/nested_mu.afl")),
    ("pairs.afl", include_str!("../../../../corpus/pairs.afl")),
    ("trees.afl", include_str!("../../../../corpus/trees.afl")),
];

pub fn corpus_programs() -> Vec<(&'static str, SourceProgram)> {
    CORPUS.iter().map(|(name, src)| (*name, parse_program(src).unwrap_or_else(|e| panic!("{name}: {e}")))).collect()
}

fn push_closed(t: &Type, out: &mut Vec<Type>) {
    if t.is_closed() && !out.contains(t) {
        out.push(t.clone());
    }
    match t {
        Type::Sum(a, b) | Type::Tensor(a, b) => {
            push_closed(a, out);
            push_closed(b, out);
        }
        Type::Mu(_, body) => push_closed(body, out),
        _ => {}
    }
}

/// Every closed type written in `program`, with its closed subterms.
pub fn program_types(program: &SourceProgram, out: &mut Vec<Type>) {
    for a in &program.abbreviations {
        if a.params.is_empty() {
            push_closed(&a.body, out);
        }
    }
    for i in &program.inputs {
        push_closed(&i.ty, out);
    }
    program.term.for_each_subterm(&mut |t| match t {
        Term::Left { left_ty, right_ty, .. } | Term::Right { left_ty, right_ty, .. } => {
            push_closed(&Type::sum(left_ty.clone(), right_ty.clone()), out);
        }
        Term::Fold { mu_ty, .. } => push_closed(mu_ty, out),
        _ => {}
    });
}

/// Closed types of the corpus, in first-occurrence order.
pub fn corpus_types() -> Vec<Type> {
    let mut out = Vec::new();
    for (_, p) in corpus_programs() {
        program_types(&p, &mut out);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn corpus_types_include_the_standard_ones() {
        let types = corpus_types();
        for t in [Type::bit(), Type::nat(), Type::list(Type::bit()), Type::Unit] {
            assert!(types.contains(&t), "{t}");
        }
        assert!(types.iter().all(Type::is_closed));
    }
}

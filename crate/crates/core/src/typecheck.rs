//! Syntax-directed checking of `⊢ ⟨Γ⟩ M ⟨Σ⟩`, of values, and of
//! configurations.
//!
//! `check_term` infers the output context Σ from the input context Γ rule by
//! rule. Introductions never rebind a live variable; a statement may reuse
//! the name of a variable it consumes (`x = left[A,B] x`).

use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use crate::frontend::Printer;
use crate::syntax::{
    check_well_formed, AtomTable, ContextError, IllFormedType, Name, Pos, Term, Type, TypeContext, VarContext,
};
use crate::value::{Value, ValueAssignment};

/// What a statement needed to find in the context.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Expected {
    Exactly(Type),
    AnySum,
    AnyTensor,
    AnyMu,
}

impl fmt::Display for Expected {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expected::Exactly(t) => write!(f, "{}", Printer::sugared().ty(t)),
            Expected::AnySum => f.write_str("a sum type"),
            Expected::AnyTensor => f.write_str("a tensor type"),
            Expected::AnyMu => f.write_str("an inductive (mu) type"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum TypingErrorKind {
    #[error("unbound variable `{0}`")]
    UnboundVariable(Name),
    #[error("variable `{0}` is already bound")]
    DuplicateVariable(Name),
    #[error("type mismatch for `{var}`: expected {expected}, found {}", Printer::sugared().ty(.found))]
    TypeMismatch { var: Name, expected: Expected, found: Type },
    #[error("contexts differ: {} vs {}", Printer::sugared().context(.0), Printer::sugared().context(.1))]
    BranchContextMismatch(VarContext, VarContext),
    #[error("loop guard `{var}` must have type bit, found {}", Printer::sugared().ty(.found))]
    GuardNotBit { var: Name, found: Type },
    #[error("ill-formed annotation `{}`: {reason}", Printer::sugared().ty(.annotation))]
    IllFormedAnnotation { annotation: Type, reason: String },
    #[error("value `{}` does not have type {}", Printer::sugared().value(.value), Printer::sugared().ty(.ty))]
    IllTypedValue { var: Name, value: Value, ty: Type },
    #[error("cannot reconstruct a type for the value of `{var}`")]
    AmbiguousValueType { var: Name },
    #[error("store and declared context disagree on `{0}`")]
    StoreMismatch(Name),
    #[error("{0}")]
    IllFormedContext(ContextError),
}

impl TypingErrorKind {
    /// Stable machine-readable code.
    pub fn code(&self) -> &'static str {
        match self {
            TypingErrorKind::UnboundVariable(_) => "unbound-variable",
            TypingErrorKind::DuplicateVariable(_) => "duplicate-variable",
            TypingErrorKind::TypeMismatch { .. } => "type-mismatch",
            TypingErrorKind::BranchContextMismatch(..) => "branch-context-mismatch",
            TypingErrorKind::GuardNotBit { .. } => "guard-not-bit",
            TypingErrorKind::IllFormedAnnotation { .. } => "ill-formed-annotation",
            TypingErrorKind::IllTypedValue { .. } => "ill-typed-value",
            TypingErrorKind::AmbiguousValueType { .. } => "ambiguous-value-type",
            TypingErrorKind::StoreMismatch(_) => "store-mismatch",
            TypingErrorKind::IllFormedContext(_) => "ill-formed-context",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
#[error("{pos}: error[{}]: {kind}", kind.code())]
pub struct TypingError {
    pub kind: TypingErrorKind,
    pub pos: Pos,
}

impl TypingError {
    fn at(pos: Pos, kind: TypingErrorKind) -> Self {
        TypingError { kind, pos }
    }
}

type TResult<T> = Result<T, TypingError>;

/// Typechecker over a fixed table of atomic types.
#[derive(Clone, Copy, Debug)]
pub struct Checker<'a> {
    atoms: &'a AtomTable,
}

static NO_ATOMS: std::sync::OnceLock<AtomTable> = std::sync::OnceLock::new();

impl Default for Checker<'static> {
    fn default() -> Self {
        Checker { atoms: NO_ATOMS.get_or_init(AtomTable::default) }
    }
}

impl<'a> Checker<'a> {
    pub fn new(atoms: &'a AtomTable) -> Self {
        Checker { atoms }
    }

    pub fn atoms(&self) -> &'a AtomTable {
        self.atoms
    }

    fn closed_annotation(&self, ty: &Type, pos: Pos) -> TResult<()> {
        check_well_formed(self.atoms, &TypeContext::empty(), ty).map_err(|e| {
            let reason = match e {
                IllFormedType::UnboundTypeVar { var, .. } => format!("type variable `{var}` is not bound"),
                IllFormedType::UnknownAtomic { name } => format!("unknown atomic type `{name}`"),
            };
            TypingError::at(pos, TypingErrorKind::IllFormedAnnotation { annotation: ty.clone(), reason })
        })
    }

    fn check_context(&self, gamma: &VarContext) -> TResult<()> {
        for (_, ty) in gamma.iter() {
            self.closed_annotation(ty, Pos::default())?;
        }
        Ok(())
    }

    /// Returns the unique Σ with `⊢ ⟨Γ⟩ M ⟨Σ⟩`.
    pub fn check_term(&self, gamma: &VarContext, term: &Term) -> TResult<VarContext> {
        self.check_context(gamma)?;
        let mut ctx = gamma.clone();
        self.infer(&mut ctx, term)?;
        Ok(ctx)
    }

    fn consume(ctx: &mut VarContext, var: &str, pos: Pos) -> TResult<Type> {
        ctx.remove(var).ok_or_else(|| TypingError::at(pos, TypingErrorKind::UnboundVariable(var.to_string())))
    }

    fn introduce(ctx: &mut VarContext, var: &str, ty: Type, pos: Pos) -> TResult<()> {
        ctx.insert(var.to_string(), ty).map_err(|e| match e {
            ContextError::Duplicate(name) => TypingError::at(pos, TypingErrorKind::DuplicateVariable(name)),
            other => TypingError::at(pos, TypingErrorKind::IllFormedContext(other)),
        })
    }

    fn mismatch(var: &str, expected: Expected, found: Type, pos: Pos) -> TypingError {
        TypingError::at(pos, TypingErrorKind::TypeMismatch { var: var.to_string(), expected, found })
    }

    fn infer(&self, ctx: &mut VarContext, term: &Term) -> TResult<()> {
        match term {
            Term::NewUnit { var, pos } => Self::introduce(ctx, var, Type::Unit, *pos),
            Term::Discard { var, pos } => Self::consume(ctx, var, *pos).map(|_| ()),
            Term::Seq(first, second) => {
                self.infer(ctx, first)?;
                self.infer(ctx, second)
            }
            Term::Skip => Ok(()),
            Term::While { guard, body, pos } => {
                let guard_ty = ctx
                    .get(guard)
                    .ok_or_else(|| TypingError::at(*pos, TypingErrorKind::UnboundVariable(guard.clone())))?;
                if !guard_ty.is_bit() {
                    return Err(TypingError::at(
                        *pos,
                        TypingErrorKind::GuardNotBit { var: guard.clone(), found: guard_ty.clone() },
                    ));
                }
                let mut inner = ctx.clone();
                self.infer(&mut inner, body)?;
                if inner != *ctx {
                    return Err(TypingError::at(*pos, TypingErrorKind::BranchContextMismatch(ctx.clone(), inner)));
                }
                Ok(())
            }
            Term::Left { dst, left_ty, right_ty, src, pos } | Term::Right { dst, left_ty, right_ty, src, pos } => {
                self.closed_annotation(left_ty, *pos)?;
                self.closed_annotation(right_ty, *pos)?;
                let found = Self::consume(ctx, src, *pos)?;
                let side = if matches!(term, Term::Left { .. }) { left_ty } else { right_ty };
                if found != *side {
                    return Err(Self::mismatch(src, Expected::Exactly(side.clone()), found, *pos));
                }
                Self::introduce(ctx, dst, Type::sum(left_ty.clone(), right_ty.clone()), *pos)
            }
            Term::Case { scrutinee, left_var, left_body, right_var, right_body, pos } => {
                let found = Self::consume(ctx, scrutinee, *pos)?;
                let (a, b) = match found {
                    Type::Sum(a, b) => (Arc::unwrap_or_clone(a), Arc::unwrap_or_clone(b)),
                    other => return Err(Self::mismatch(scrutinee, Expected::AnySum, other, *pos)),
                };
                let mut left_ctx = ctx.clone();
                Self::introduce(&mut left_ctx, left_var, a, *pos)?;
                self.infer(&mut left_ctx, left_body)?;
                let mut right_ctx = ctx.clone();
                Self::introduce(&mut right_ctx, right_var, b, *pos)?;
                self.infer(&mut right_ctx, right_body)?;
                if left_ctx != right_ctx {
                    return Err(TypingError::at(*pos, TypingErrorKind::BranchContextMismatch(left_ctx, right_ctx)));
                }
                *ctx = left_ctx;
                Ok(())
            }
            Term::Pair { dst, fst, snd, pos } => {
                let a = Self::consume(ctx, fst, *pos)?;
                let b = Self::consume(ctx, snd, *pos)?;
                Self::introduce(ctx, dst, Type::tensor(a, b), *pos)
            }
            Term::Unpair { fst, snd, src, pos } => {
                let found = Self::consume(ctx, src, *pos)?;
                let (a, b) = match found {
                    Type::Tensor(a, b) => (Arc::unwrap_or_clone(a), Arc::unwrap_or_clone(b)),
                    other => return Err(Self::mismatch(src, Expected::AnyTensor, other, *pos)),
                };
                Self::introduce(ctx, fst, a, *pos)?;
                Self::introduce(ctx, snd, b, *pos)
            }
            Term::Fold { dst, mu_ty, src, pos } => {
                self.closed_annotation(mu_ty, *pos)?;
                let unfolded = mu_ty.unfold_mu().ok_or_else(|| {
                    TypingError::at(
                        *pos,
                        TypingErrorKind::IllFormedAnnotation {
                            annotation: mu_ty.clone(),
                            reason: "fold needs a mu type".into(),
                        },
                    )
                })?;
                let found = Self::consume(ctx, src, *pos)?;
                if found != unfolded {
                    return Err(Self::mismatch(src, Expected::Exactly(unfolded), found, *pos));
                }
                Self::introduce(ctx, dst, mu_ty.clone(), *pos)
            }
            Term::Unfold { dst, src, pos } => {
                let found = Self::consume(ctx, src, *pos)?;
                let unfolded = match found.unfold_mu() {
                    Some(t) => t,
                    None => return Err(Self::mismatch(src, Expected::AnyMu, found, *pos)),
                };
                Self::introduce(ctx, dst, unfolded, *pos)
            }
        }
    }

    /// Decides `⊢ v : A`.
    pub fn check_value(&self, value: &Value, ty: &Type) -> bool {
        self.value_failure(value, ty).is_none()
    }

    /// The innermost failing sub-derivation of `⊢ v : A`, if any.
    pub fn value_failure(&self, value: &Value, ty: &Type) -> Option<(Value, Type)> {
        let fail = || Some((value.clone(), ty.clone()));
        match (value, ty) {
            (Value::Star, Type::Unit) => None,
            (Value::Left { left_ty, right_ty, inner }, Type::Sum(a, b)) => {
                if *left_ty != **a || *right_ty != **b {
                    return fail();
                }
                self.value_failure(inner, a)
            }
            (Value::Right { left_ty, right_ty, inner }, Type::Sum(a, b)) => {
                if *left_ty != **a || *right_ty != **b {
                    return fail();
                }
                self.value_failure(inner, b)
            }
            (Value::Pair(v, w), Type::Tensor(a, b)) => self.value_failure(v, a).or_else(|| self.value_failure(w, b)),
            (Value::Fold { mu_ty, inner }, Type::Mu(..)) => {
                if mu_ty != ty {
                    return fail();
                }
                let unfolded = ty.unfold_mu().expect("mu type");
                self.value_failure(inner, &unfolded)
            }
            (Value::Atom { ty: name, token }, Type::Atomic(atomic)) => match self.atoms.get(atomic) {
                Some(spec) if name == atomic && *token < spec.carrier => None,
                _ => fail(),
            },
            _ => fail(),
        }
    }

    /// The type a value's annotations determine, provided the value checks
    /// against it.
    pub fn synthesize_value_type(&self, value: &Value) -> Option<Type> {
        let ty = value.annotated_type()?;
        if !ty.is_closed() || check_well_formed(self.atoms, &TypeContext::empty(), &ty).is_err() {
            return None;
        }
        self.check_value(value, &ty).then_some(ty)
    }

    /// `Γ ⊢ V` against a declared context.
    pub fn check_store(&self, gamma: &VarContext, store: &ValueAssignment) -> TResult<()> {
        for (name, ty) in gamma.iter() {
            let value = store
                .get(name)
                .ok_or_else(|| TypingError::at(Pos::default(), TypingErrorKind::StoreMismatch(name.clone())))?;
            if !self.check_value(value, ty) {
                return Err(TypingError::at(
                    Pos::default(),
                    TypingErrorKind::IllTypedValue { var: name.clone(), value: value.clone(), ty: ty.clone() },
                ));
            }
        }
        if let Some(extra) = store.names().find(|n| !gamma.contains(n)) {
            return Err(TypingError::at(Pos::default(), TypingErrorKind::StoreMismatch(extra.clone())));
        }
        Ok(())
    }

    /// Reconstructs Γ from the store's value annotations, then checks the
    /// term: `Γ; Σ ⊢ (M | V)`.
    pub fn check_configuration(&self, term: &Term, store: &ValueAssignment) -> TResult<(VarContext, VarContext)> {
        let mut gamma = VarContext::new();
        for (name, value) in store.iter() {
            let ty = self.synthesize_value_type(value).ok_or_else(|| {
                TypingError::at(Pos::default(), TypingErrorKind::AmbiguousValueType { var: name.clone() })
            })?;
            Self::introduce(&mut gamma, name, ty, Pos::default())?;
        }
        let sigma = self.check_term(&gamma, term)?;
        Ok((gamma, sigma))
    }

    /// As [`Checker::check_configuration`], with Γ given by declaration.
    pub fn check_declared_configuration(
        &self,
        gamma: &VarContext,
        term: &Term,
        store: &ValueAssignment,
    ) -> TResult<VarContext> {
        self.check_context(gamma)?;
        self.check_store(gamma, store)?;
        self.check_term(gamma, term)
    }
}

pub fn check_term(gamma: &VarContext, term: &Term) -> Result<VarContext, TypingError> {
    Checker::default().check_term(gamma, term)
}

pub fn check_value(value: &Value, ty: &Type) -> bool {
    Checker::default().check_value(value, ty)
}

pub fn check_configuration(term: &Term, store: &ValueAssignment) -> Result<(VarContext, VarContext), TypingError> {
    Checker::default().check_configuration(term, store)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::frontend::parse_term;

    fn ctx(pairs: &[(&str, Type)]) -> VarContext {
        VarContext::from_pairs(pairs.iter().map(|(n, t)| (n.to_string(), t.clone()))).unwrap()
    }

    #[test]
    fn discard_removes_variable() {
        let sigma = check_term(&ctx(&[("x", Type::nat())]), &Term::discard("x")).unwrap();
        assert!(sigma.is_empty());
    }

    #[test]
    fn fold_of_unbound_variable() {
        let err = check_term(&ctx(&[("x", Type::Unit)]), &Term::fold("y", Type::nat(), "z")).unwrap_err();
        assert_eq!(err.kind, TypingErrorKind::UnboundVariable("z".into()));
    }

    #[test]
    fn branch_mismatch_reports_both_contexts() {
        let term = parse_term("case x of {left u -> skip | right u -> new unit w}").unwrap();
        let err = check_term(&ctx(&[("x", Type::bit())]), &term).unwrap_err();
        // Oracle: check each branch in isolation and compare.
        let left = check_term(&ctx(&[("u", Type::Unit)]), &Term::Skip).unwrap();
        let right = check_term(&ctx(&[("u", Type::Unit)]), &Term::new_unit("w")).unwrap();
        assert_eq!(err.kind, TypingErrorKind::BranchContextMismatch(left.clone(), right.clone()));
        assert_eq!(left, ctx(&[("u", Type::Unit)]));
        assert_eq!(right, ctx(&[("u", Type::Unit), ("w", Type::Unit)]));
        assert_eq!(err.kind.code(), "branch-context-mismatch");
    }

    #[test]
    fn every_rule_infers_expected_output() {
        let nat = Type::nat();
        let g = ctx(&[("b", Type::bit()), ("n", nat.clone())]);
        let cases: Vec<(&str, Vec<(&str, Type)>)> = vec![
            ("new unit u", vec![("b", Type::bit()), ("n", nat.clone()), ("u", Type::Unit)]),
            ("discard n", vec![("b", Type::bit())]),
            ("skip", vec![("b", Type::bit()), ("n", nat.clone())]),
            ("m = unfold n", vec![("b", Type::bit()), ("m", Type::sum(Type::Unit, nat.clone()))]),
            ("m = unfold n; k = fold[mu X. I + X] m", vec![("b", Type::bit()), ("k", nat.clone())]),
            ("p = (b, n)", vec![("p", Type::tensor(Type::bit(), nat.clone()))]),
            ("p = (b, n); (c, d) = p", vec![("c", Type::bit()), ("d", nat.clone())]),
            ("y = left[I + I, I] b", vec![("n", nat.clone()), ("y", Type::sum(Type::bit(), Type::Unit))]),
            ("y = right[I, I + I] b", vec![("n", nat.clone()), ("y", Type::sum(Type::Unit, Type::bit()))]),
            ("b = left[I + I, I] b", vec![("n", nat.clone()), ("b", Type::sum(Type::bit(), Type::Unit))]),
            ("case b of {left u -> discard u | right v -> discard v}", vec![("n", nat.clone())]),
            ("while b do { skip }", vec![("b", Type::bit()), ("n", nat.clone())]),
        ];
        for (src, expected) in cases {
            let term = parse_term(src).unwrap();
            assert_eq!(check_term(&g, &term).unwrap(), ctx(&expected), "{src}");
        }
    }

    #[test]
    fn rejections() {
        let g = ctx(&[("b", Type::bit()), ("x", Type::Unit)]);
        let expect = |src: &str, code: &str| {
            let err = check_term(&g, &parse_term(src).unwrap()).unwrap_err();
            assert_eq!(err.kind.code(), code, "{src}: {err}");
        };
        expect("new unit x", "duplicate-variable");
        expect("y = left[I, I] b", "type-mismatch");
        expect("x = unfold b", "type-mismatch");
        expect("(p, q) = b", "type-mismatch");
        expect("case x of {left a -> skip | right c -> skip}", "type-mismatch");
        expect("while x do { skip }", "guard-not-bit");
        expect("while b do { discard x }", "branch-context-mismatch");
        expect("y = fold[I + I] x", "ill-formed-annotation");
        expect("y = left[X, I] x", "ill-formed-annotation");
        expect("p = (x, x)", "unbound-variable");
        expect("b = left[I, I] x", "duplicate-variable");
        expect("case b of {left x -> skip | right y -> skip}", "duplicate-variable");
    }

    #[test]
    fn error_carries_position() {
        let term = parse_term("new unit u;\n  discard z").unwrap();
        let err = check_term(&VarContext::new(), &term).unwrap_err();
        assert_eq!((err.pos.line, err.pos.col), (2, 3));
        assert!(err.to_string().starts_with("2:3: error[unbound-variable]"));
    }

    #[test]
    fn value_typing_examples() {
        assert!(check_value(&Value::Star, &Type::Unit));
        assert!(check_value(&Value::nat(0), &Type::nat()));
        assert!(!check_value(&Value::ff(), &Type::tensor(Type::Unit, Type::Unit)));
        let wrong_annotation = Value::left(Type::Unit, Type::bit(), Value::Star);
        assert!(!check_value(&wrong_annotation, &Type::bit()));
        let renamed = Type::mu("Z", Type::sum(Type::Unit, Type::var("Z")));
        assert!(check_value(&Value::nat(3), &renamed));
    }

    #[test]
    fn configuration_examples() {
        let checker = Checker::default();
        let (g, s) = checker.check_configuration(&Term::Skip, &ValueAssignment::new()).unwrap();
        assert!(g.is_empty() && s.is_empty());

        let store = ValueAssignment::from_pairs([("x", Value::Star)]);
        let declared = ctx(&[("x", Type::Unit)]);
        let sigma = checker.check_declared_configuration(&declared, &Term::discard("x"), &store).unwrap();
        assert!(sigma.is_empty());
        let (g, _) = checker.check_configuration(&Term::discard("x"), &store).unwrap();
        assert_eq!(g, declared);

        let err = checker.check_declared_configuration(&declared, &Term::unfold("y", "x"), &store).unwrap_err();
        assert_eq!(err.kind.code(), "type-mismatch");
    }

    #[test]
    fn ill_typed_store_rejected() {
        let store = ValueAssignment::from_pairs([("x", Value::left(Type::bit(), Type::Unit, Value::Star))]);
        let err = check_configuration(&Term::Skip, &store).unwrap_err();
        assert_eq!(err.kind.code(), "ambiguous-value-type");
    }

    #[test]
    fn atomic_values_need_registered_tokens() {
        use crate::syntax::AtomSpec;
        let atoms = AtomTable::new().with("Q", AtomSpec::total(2));
        let checker = Checker::new(&atoms);
        assert!(checker.check_value(&Value::Atom { ty: "Q".into(), token: 1 }, &Type::atomic("Q")));
        assert!(!checker.check_value(&Value::Atom { ty: "Q".into(), token: 2 }, &Type::atomic("Q")));
        assert!(!Checker::default().check_value(&Value::Atom { ty: "Q".into(), token: 0 }, &Type::atomic("Q")));
    }
}

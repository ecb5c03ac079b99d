//! Abstract syntax: types, terms, variable contexts and type-level
//! substitution.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::hash::{Hash, Hasher};
use std::rc::Rc;
use std::sync::Arc;

use indexmap::IndexMap;
use thiserror::Error;

pub type Name = String;

/// Source position (1-based). Positions never take part in term equality,
/// so a parsed term compares equal to the same term built by hand.
#[derive(Clone, Copy, Debug, Default)]
pub struct Pos {
    pub line: u32,
    pub col: u32,
}

impl Pos {
    pub fn new(line: u32, col: u32) -> Self {
        Pos { line, col }
    }

    pub fn is_known(&self) -> bool {
        self.line > 0
    }
}

impl PartialEq for Pos {
    fn eq(&self, _: &Self) -> bool {
        true
    }
}

impl Eq for Pos {}

impl Hash for Pos {
    fn hash<H: Hasher>(&self, _: &mut H) {}
}

impl fmt::Display for Pos {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.col)
    }
}

// ---------------------------------------------------------------------------
// Types
// ---------------------------------------------------------------------------

/// Type expressions `X | I | A | A + B | A ⊗ B | μX. A`.
///
/// Equality and hashing are up to renaming of μ-bound variables.
#[derive(Clone, Debug)]
pub enum Type {
    Var(Name),
    Unit,
    Atomic(Name),
    Sum(Arc<Type>, Arc<Type>),
    Tensor(Arc<Type>, Arc<Type>),
    Mu(Name, Arc<Type>),
}

impl Type {
    pub fn var(name: impl Into<Name>) -> Type {
        Type::Var(name.into())
    }

    pub fn atomic(name: impl Into<Name>) -> Type {
        Type::Atomic(name.into())
    }

    pub fn sum(a: Type, b: Type) -> Type {
        Type::Sum(Arc::new(a), Arc::new(b))
    }

    pub fn tensor(a: Type, b: Type) -> Type {
        Type::Tensor(Arc::new(a), Arc::new(b))
    }

    pub fn mu(binder: impl Into<Name>, body: Type) -> Type {
        Type::Mu(binder.into(), Arc::new(body))
    }

    /// `bit := I + I`
    pub fn bit() -> Type {
        Type::sum(Type::Unit, Type::Unit)
    }

    /// `Nat := μX. I + X`
    pub fn nat() -> Type {
        Type::mu("X", Type::sum(Type::Unit, Type::var("X")))
    }

    /// `List(A) := μY. I + A ⊗ Y` for closed `A`.
    pub fn list(elem: Type) -> Type {
        let binder = fresh_name("Y", |n| elem.free_vars().contains(n));
        Type::mu(binder.clone(), Type::sum(Type::Unit, Type::tensor(elem, Type::Var(binder))))
    }

    pub fn is_bit(&self) -> bool {
        matches!(self, Type::Sum(a, b) if matches!(**a, Type::Unit) && matches!(**b, Type::Unit))
    }

    pub fn alpha_eq(&self, other: &Type) -> bool {
        alpha_eq_in(self, other, &mut Vec::new(), &mut Vec::new())
    }

    pub fn free_vars(&self) -> BTreeSet<Name> {
        let mut out = BTreeSet::new();
        collect_free(self, &mut Vec::new(), &mut out);
        out
    }

    pub fn is_closed(&self) -> bool {
        fn go<'a>(t: &'a Type, bound: &mut Vec<&'a str>) -> bool {
            match t {
                Type::Var(x) => bound.contains(&x.as_str()),
                Type::Unit | Type::Atomic(_) => true,
                Type::Sum(a, b) | Type::Tensor(a, b) => go(a, bound) && go(b, bound),
                Type::Mu(x, body) => {
                    bound.push(x);
                    let r = go(body, bound);
                    bound.pop();
                    r
                }
            }
        }
        go(self, &mut Vec::new())
    }

    /// Capture-avoiding substitution `self[replacement / var]`.
    pub fn substitute(&self, var: &str, replacement: &Type) -> Type {
        if replacement.is_closed() {
            return subst_closed(self, var, replacement);
        }
        let mut map = BTreeMap::new();
        map.insert(var.to_string(), replacement.clone());
        self.substitute_all(&map)
    }

    /// Simultaneous capture-avoiding substitution.
    pub fn substitute_all(&self, map: &BTreeMap<Name, Type>) -> Type {
        if map.is_empty() {
            return self.clone();
        }
        let mut incoming = BTreeSet::new();
        for ty in map.values() {
            incoming.extend(ty.free_vars());
        }
        subst_in(self, map, &incoming)
    }

    /// For `μX. A` returns `A[μX. A / X]`.
    pub fn unfold_mu(&self) -> Option<Type> {
        match self {
            Type::Mu(x, body) => Some(body.substitute(x, self)),
            _ => None,
        }
    }

    /// Node count of the type expression.
    pub fn size(&self) -> usize {
        match self {
            Type::Var(_) | Type::Unit | Type::Atomic(_) => 1,
            Type::Sum(a, b) | Type::Tensor(a, b) => 1 + a.size() + b.size(),
            Type::Mu(_, body) => 1 + body.size(),
        }
    }

    /// Renames every μ-binder to `X0, X1, ...` by nesting depth.
    pub fn canonical(&self) -> Type {
        fn go(t: &Type, env: &mut Vec<(Name, Name)>) -> Type {
            match t {
                Type::Var(x) => match env.iter().rev().find(|(from, _)| from == x) {
                    Some((_, to)) => Type::Var(to.clone()),
                    None => t.clone(),
                },
                Type::Unit | Type::Atomic(_) => t.clone(),
                Type::Sum(a, b) => Type::sum(go(a, env), go(b, env)),
                Type::Tensor(a, b) => Type::tensor(go(a, env), go(b, env)),
                Type::Mu(x, body) => {
                    let fresh = format!("X{}", env.len());
                    env.push((x.clone(), fresh.clone()));
                    let body = go(body, env);
                    env.pop();
                    Type::Mu(fresh, Arc::new(body))
                }
            }
        }
        go(self, &mut Vec::new())
    }
}

fn bound_index(stack: &[&str], name: &str) -> Option<usize> {
    stack.iter().rev().position(|b| *b == name)
}

fn alpha_eq_in<'a>(a: &'a Type, b: &'a Type, sa: &mut Vec<&'a str>, sb: &mut Vec<&'a str>) -> bool {
    match (a, b) {
        (Type::Var(x), Type::Var(y)) => match (bound_index(sa, x), bound_index(sb, y)) {
            (Some(i), Some(j)) => i == j,
            (None, None) => x == y,
            _ => false,
        },
        (Type::Unit, Type::Unit) => true,
        (Type::Atomic(x), Type::Atomic(y)) => x == y,
        (Type::Sum(a1, a2), Type::Sum(b1, b2)) | (Type::Tensor(a1, a2), Type::Tensor(b1, b2)) => {
            alpha_eq_in(a1, b1, sa, sb) && alpha_eq_in(a2, b2, sa, sb)
        }
        (Type::Mu(x, ba), Type::Mu(y, bb)) => {
            sa.push(x);
            sb.push(y);
            let eq = alpha_eq_in(ba, bb, sa, sb);
            sa.pop();
            sb.pop();
            eq
        }
        _ => false,
    }
}

fn hash_in<'a, H: Hasher>(t: &'a Type, stack: &mut Vec<&'a str>, state: &mut H) {
    match t {
        Type::Var(x) => match bound_index(stack, x) {
            Some(i) => {
                0u8.hash(state);
                i.hash(state);
            }
            None => {
                1u8.hash(state);
                x.hash(state);
            }
        },
        Type::Unit => 2u8.hash(state),
        Type::Atomic(x) => {
            3u8.hash(state);
            x.hash(state);
        }
        Type::Sum(a, b) => {
            4u8.hash(state);
            hash_in(a, stack, state);
            hash_in(b, stack, state);
        }
        Type::Tensor(a, b) => {
            5u8.hash(state);
            hash_in(a, stack, state);
            hash_in(b, stack, state);
        }
        Type::Mu(x, body) => {
            6u8.hash(state);
            stack.push(x);
            hash_in(body, stack, state);
            stack.pop();
        }
    }
}

impl PartialEq for Type {
    fn eq(&self, other: &Type) -> bool {
        self.alpha_eq(other)
    }
}

impl Eq for Type {}

impl Hash for Type {
    fn hash<H: Hasher>(&self, state: &mut H) {
        hash_in(self, &mut Vec::new(), state)
    }
}

fn collect_free<'a>(t: &'a Type, bound: &mut Vec<&'a str>, out: &mut BTreeSet<Name>) {
    match t {
        Type::Var(x) => {
            if !bound.contains(&x.as_str()) {
                out.insert(x.clone());
            }
        }
        Type::Unit | Type::Atomic(_) => {}
        Type::Sum(a, b) | Type::Tensor(a, b) => {
            collect_free(a, bound, out);
            collect_free(b, bound, out);
        }
        Type::Mu(x, body) => {
            bound.push(x);
            collect_free(body, bound, out);
            bound.pop();
        }
    }
}

/// Substitution of a closed type, which can never be captured.
fn subst_closed(t: &Type, var: &str, rep: &Type) -> Type {
    match t {
        Type::Var(x) if x == var => rep.clone(),
        Type::Var(_) | Type::Unit | Type::Atomic(_) => t.clone(),
        Type::Sum(a, b) => Type::sum(subst_closed(a, var, rep), subst_closed(b, var, rep)),
        Type::Tensor(a, b) => Type::tensor(subst_closed(a, var, rep), subst_closed(b, var, rep)),
        Type::Mu(x, _) if x == var => t.clone(),
        Type::Mu(x, body) => Type::Mu(x.clone(), Arc::new(subst_closed(body, var, rep))),
    }
}

fn subst_in(t: &Type, map: &BTreeMap<Name, Type>, incoming: &BTreeSet<Name>) -> Type {
    match t {
        Type::Var(x) => map.get(x).cloned().unwrap_or_else(|| t.clone()),
        Type::Unit | Type::Atomic(_) => t.clone(),
        Type::Sum(a, b) => Type::sum(subst_in(a, map, incoming), subst_in(b, map, incoming)),
        Type::Tensor(a, b) => Type::tensor(subst_in(a, map, incoming), subst_in(b, map, incoming)),
        Type::Mu(x, body) => {
            let mut inner = map.clone();
            inner.remove(x);
            if inner.is_empty() {
                return t.clone();
            }
            let body_free = body.free_vars();
            let relevant = inner.keys().any(|k| body_free.contains(k));
            if !relevant {
                return t.clone();
            }
            if incoming.contains(x) {
                let fresh = fresh_name(x, |n| incoming.contains(n) || body_free.contains(n) || inner.contains_key(n));
                let renamed = body.substitute(x, &Type::Var(fresh.clone()));
                Type::Mu(fresh, Arc::new(subst_in(&renamed, &inner, incoming)))
            } else {
                Type::Mu(x.clone(), Arc::new(subst_in(body, &inner, incoming)))
            }
        }
    }
}

/// Returns `base`, or `base'`, `base''`, ... whichever is the first name not
/// rejected by `taken`.
pub fn fresh_name(base: &str, taken: impl Fn(&str) -> bool) -> Name {
    let mut candidate = base.to_string();
    while taken(&candidate) {
        candidate.push('\'');
    }
    candidate
}

// ---------------------------------------------------------------------------
// Type contexts and well-formedness
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("duplicate type variable `{0}` in type context")]
pub struct DuplicateTypeVar(pub Name);

/// An ordered list of distinct type variables.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct TypeContext(Vec<Name>);

impl TypeContext {
    pub fn empty() -> Self {
        TypeContext(Vec::new())
    }

    pub fn new<I, S>(names: I) -> Result<Self, DuplicateTypeVar>
    where
        I: IntoIterator<Item = S>,
        S: Into<Name>,
    {
        let mut out = Vec::new();
        for name in names {
            let name = name.into();
            if out.contains(&name) {
                return Err(DuplicateTypeVar(name));
            }
            out.push(name);
        }
        Ok(TypeContext(out))
    }

    pub fn contains(&self, name: &str) -> bool {
        self.0.iter().any(|n| n == name)
    }

    pub fn names(&self) -> &[Name] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// Carrier and discard behaviour of one atomic type in the concrete model.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AtomSpec {
    pub carrier: u32,
    /// Tokens on which the discarding map is defined; `None` means all.
    pub discardable: Option<BTreeSet<u32>>,
}

impl AtomSpec {
    pub fn total(carrier: u32) -> Self {
        AtomSpec { carrier, discardable: None }
    }

    pub fn discards(&self, token: u32) -> bool {
        token < self.carrier && self.discardable.as_ref().is_none_or(|set| set.contains(&token))
    }
}

/// Registered atomic types. Empty by default: atomic types are uninhabited.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct AtomTable {
    entries: BTreeMap<Name, AtomSpec>,
}

impl AtomTable {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with(mut self, name: impl Into<Name>, spec: AtomSpec) -> Self {
        self.entries.insert(name.into(), spec);
        self
    }

    pub fn get(&self, name: &str) -> Option<&AtomSpec> {
        self.entries.get(name)
    }

    pub fn contains(&self, name: &str) -> bool {
        self.entries.contains_key(name)
    }

    pub fn names(&self) -> impl Iterator<Item = &Name> {
        self.entries.keys()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum IllFormedType {
    #[error("type variable `{var}` is not in scope in `{subterm}`")]
    UnboundTypeVar { var: Name, subterm: Type },
    #[error("atomic type `{name}` is not registered")]
    UnknownAtomic { name: Name },
}

/// Decides `Θ ⊢ A`, reporting the offending subterm on failure.
pub fn check_well_formed(atoms: &AtomTable, theta: &TypeContext, ty: &Type) -> Result<(), IllFormedType> {
    fn go<'a>(atoms: &AtomTable, scope: &mut Vec<&'a str>, t: &'a Type, parent: &'a Type) -> Result<(), IllFormedType> {
        match t {
            Type::Var(x) => {
                if scope.contains(&x.as_str()) {
                    Ok(())
                } else {
                    Err(IllFormedType::UnboundTypeVar { var: x.clone(), subterm: parent.clone() })
                }
            }
            Type::Unit => Ok(()),
            Type::Atomic(name) => {
                if atoms.contains(name) {
                    Ok(())
                } else {
                    Err(IllFormedType::UnknownAtomic { name: name.clone() })
                }
            }
            Type::Sum(a, b) | Type::Tensor(a, b) => {
                go(atoms, scope, a, t)?;
                go(atoms, scope, b, t)
            }
            Type::Mu(x, body) => {
                scope.push(x);
                let r = go(atoms, scope, body, t);
                scope.pop();
                r
            }
        }
    }
    let mut scope: Vec<&str> = theta.names().iter().map(String::as_str).collect();
    go(atoms, &mut scope, ty, ty)
}

pub fn type_well_formed(atoms: &AtomTable, theta: &TypeContext, ty: &Type) -> bool {
    check_well_formed(atoms, theta, ty).is_ok()
}

// ---------------------------------------------------------------------------
// Terms
// ---------------------------------------------------------------------------

/// Statements of the language. Positions are carried for diagnostics only.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Term {
    NewUnit { var: Name, pos: Pos },
    Discard { var: Name, pos: Pos },
    Seq(Rc<Term>, Rc<Term>),
    Skip,
    While { guard: Name, body: Rc<Term>, pos: Pos },
    Left { dst: Name, left_ty: Type, right_ty: Type, src: Name, pos: Pos },
    Right { dst: Name, left_ty: Type, right_ty: Type, src: Name, pos: Pos },
    Case { scrutinee: Name, left_var: Name, left_body: Rc<Term>, right_var: Name, right_body: Rc<Term>, pos: Pos },
    Pair { dst: Name, fst: Name, snd: Name, pos: Pos },
    Unpair { fst: Name, snd: Name, src: Name, pos: Pos },
    Fold { dst: Name, mu_ty: Type, src: Name, pos: Pos },
    Unfold { dst: Name, src: Name, pos: Pos },
}

/// The twelve statement forms, used for coverage accounting.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum TermKind {
    NewUnit,
    Discard,
    Seq,
    Skip,
    While,
    Left,
    Right,
    Case,
    Pair,
    Unpair,
    Fold,
    Unfold,
}

impl TermKind {
    pub const ALL: [TermKind; 12] = [
        TermKind::NewUnit,
        TermKind::Discard,
        TermKind::Seq,
        TermKind::Skip,
        TermKind::While,
        TermKind::Left,
        TermKind::Right,
        TermKind::Case,
        TermKind::Pair,
        TermKind::Unpair,
        TermKind::Fold,
        TermKind::Unfold,
    ];
}

impl Term {
    pub fn new_unit(var: impl Into<Name>) -> Term {
        Term::NewUnit { var: var.into(), pos: Pos::default() }
    }

    pub fn discard(var: impl Into<Name>) -> Term {
        Term::Discard { var: var.into(), pos: Pos::default() }
    }

    pub fn seq(first: Term, second: Term) -> Term {
        Term::Seq(Rc::new(first), Rc::new(second))
    }

    /// Right-nested sequence; the empty sequence is `skip`.
    pub fn seq_all(terms: impl IntoIterator<Item = Term>) -> Term {
        let mut items: Vec<Term> = terms.into_iter().collect();
        let mut acc = match items.pop() {
            Some(t) => t,
            None => return Term::Skip,
        };
        while let Some(t) = items.pop() {
            acc = Term::seq(t, acc);
        }
        acc
    }

    pub fn while_do(guard: impl Into<Name>, body: Term) -> Term {
        Term::While { guard: guard.into(), body: Rc::new(body), pos: Pos::default() }
    }

    pub fn left(dst: impl Into<Name>, left_ty: Type, right_ty: Type, src: impl Into<Name>) -> Term {
        Term::Left { dst: dst.into(), left_ty, right_ty, src: src.into(), pos: Pos::default() }
    }

    pub fn right(dst: impl Into<Name>, left_ty: Type, right_ty: Type, src: impl Into<Name>) -> Term {
        Term::Right { dst: dst.into(), left_ty, right_ty, src: src.into(), pos: Pos::default() }
    }

    pub fn case(
        scrutinee: impl Into<Name>,
        left_var: impl Into<Name>,
        left_body: Term,
        right_var: impl Into<Name>,
        right_body: Term,
    ) -> Term {
        Term::Case {
            scrutinee: scrutinee.into(),
            left_var: left_var.into(),
            left_body: Rc::new(left_body),
            right_var: right_var.into(),
            right_body: Rc::new(right_body),
            pos: Pos::default(),
        }
    }

    pub fn pair(dst: impl Into<Name>, fst: impl Into<Name>, snd: impl Into<Name>) -> Term {
        Term::Pair { dst: dst.into(), fst: fst.into(), snd: snd.into(), pos: Pos::default() }
    }

    pub fn unpair(fst: impl Into<Name>, snd: impl Into<Name>, src: impl Into<Name>) -> Term {
        Term::Unpair { fst: fst.into(), snd: snd.into(), src: src.into(), pos: Pos::default() }
    }

    pub fn fold(dst: impl Into<Name>, mu_ty: Type, src: impl Into<Name>) -> Term {
        Term::Fold { dst: dst.into(), mu_ty, src: src.into(), pos: Pos::default() }
    }

    pub fn unfold(dst: impl Into<Name>, src: impl Into<Name>) -> Term {
        Term::Unfold { dst: dst.into(), src: src.into(), pos: Pos::default() }
    }

    pub fn kind(&self) -> TermKind {
        match self {
            Term::NewUnit { .. } => TermKind::NewUnit,
            Term::Discard { .. } => TermKind::Discard,
            Term::Seq(..) => TermKind::Seq,
            Term::Skip => TermKind::Skip,
            Term::While { .. } => TermKind::While,
            Term::Left { .. } => TermKind::Left,
            Term::Right { .. } => TermKind::Right,
            Term::Case { .. } => TermKind::Case,
            Term::Pair { .. } => TermKind::Pair,
            Term::Unpair { .. } => TermKind::Unpair,
            Term::Fold { .. } => TermKind::Fold,
            Term::Unfold { .. } => TermKind::Unfold,
        }
    }

    pub fn pos(&self) -> Pos {
        match self {
            Term::Seq(first, _) => first.pos(),
            Term::Skip => Pos::default(),
            Term::NewUnit { pos, .. }
            | Term::Discard { pos, .. }
            | Term::While { pos, .. }
            | Term::Left { pos, .. }
            | Term::Right { pos, .. }
            | Term::Case { pos, .. }
            | Term::Pair { pos, .. }
            | Term::Unpair { pos, .. }
            | Term::Fold { pos, .. }
            | Term::Unfold { pos, .. } => *pos,
        }
    }

    /// Every term variable mentioned anywhere in the term.
    pub fn variables(&self) -> BTreeSet<Name> {
        let mut out = BTreeSet::new();
        self.collect_vars(&mut out);
        out
    }

    fn collect_vars(&self, out: &mut BTreeSet<Name>) {
        match self {
            Term::NewUnit { var, .. } | Term::Discard { var, .. } => {
                out.insert(var.clone());
            }
            Term::Seq(a, b) => {
                a.collect_vars(out);
                b.collect_vars(out);
            }
            Term::Skip => {}
            Term::While { guard, body, .. } => {
                out.insert(guard.clone());
                body.collect_vars(out);
            }
            Term::Left { dst, src, .. }
            | Term::Right { dst, src, .. }
            | Term::Fold { dst, src, .. }
            | Term::Unfold { dst, src, .. } => {
                out.insert(dst.clone());
                out.insert(src.clone());
            }
            Term::Case { scrutinee, left_var, left_body, right_var, right_body, .. } => {
                out.insert(scrutinee.clone());
                out.insert(left_var.clone());
                out.insert(right_var.clone());
                left_body.collect_vars(out);
                right_body.collect_vars(out);
            }
            Term::Pair { dst, fst, snd, .. } | Term::Unpair { fst, snd, src: dst, .. } => {
                out.insert(dst.clone());
                out.insert(fst.clone());
                out.insert(snd.clone());
            }
        }
    }

    /// Visits every subterm, outermost first.
    pub fn for_each_subterm(&self, f: &mut impl FnMut(&Term)) {
        f(self);
        match self {
            Term::Seq(a, b) => {
                a.for_each_subterm(f);
                b.for_each_subterm(f);
            }
            Term::While { body, .. } => body.for_each_subterm(f),
            Term::Case { left_body, right_body, .. } => {
                left_body.for_each_subterm(f);
                right_body.for_each_subterm(f);
            }
            _ => {}
        }
    }

    pub fn size(&self) -> usize {
        let mut n = 0;
        self.for_each_subterm(&mut |_| n += 1);
        n
    }
}

/// `if b then { body }` as the case term
/// `case b of { left u → b = left u | right u → b = right u; body }`,
/// with `u` chosen outside `avoid` and the variables of `body`.
pub fn desugar_if(guard: &str, body: Term, avoid: impl Fn(&str) -> bool) -> Term {
    let body_vars = body.variables();
    let u = fresh_name("u", |n| n == guard || avoid(n) || body_vars.contains(n));
    Term::case(
        guard,
        u.clone(),
        Term::left(guard, Type::Unit, Type::Unit, u.clone()),
        u.clone(),
        Term::seq(Term::right(guard, Type::Unit, Type::Unit, u), body),
    )
}

// ---------------------------------------------------------------------------
// Variable contexts
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ContextError {
    #[error("variable `{0}` bound twice")]
    Duplicate(Name),
    #[error("variable `{name}` has open type `{ty}`")]
    OpenType { name: Name, ty: Type },
}

/// Variable context `x₁ : A₁, …, xₙ : Aₙ`.
///
/// Equality is association equality. Iteration follows insertion order,
/// which fixes the tuple layout used by the denotational model.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct VarContext(IndexMap<Name, Type>);

impl VarContext {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_pairs<I, S>(pairs: I) -> Result<Self, ContextError>
    where
        I: IntoIterator<Item = (S, Type)>,
        S: Into<Name>,
    {
        let mut ctx = VarContext::new();
        for (name, ty) in pairs {
            ctx.insert(name.into(), ty)?;
        }
        Ok(ctx)
    }

    pub fn insert(&mut self, name: Name, ty: Type) -> Result<(), ContextError> {
        if self.0.contains_key(&name) {
            return Err(ContextError::Duplicate(name));
        }
        if !ty.is_closed() {
            return Err(ContextError::OpenType { name, ty });
        }
        self.0.insert(name, ty);
        Ok(())
    }

    pub fn remove(&mut self, name: &str) -> Option<Type> {
        self.0.shift_remove(name)
    }

    pub fn get(&self, name: &str) -> Option<&Type> {
        self.0.get(name)
    }

    pub fn contains(&self, name: &str) -> bool {
        self.0.contains_key(name)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Name, &Type)> {
        self.0.iter()
    }

    pub fn names(&self) -> impl Iterator<Item = &Name> {
        self.0.keys()
    }

    /// Index of `name` in the canonical (insertion) order.
    pub fn position(&self, name: &str) -> Option<usize> {
        self.0.get_index_of(name)
    }
}

impl fmt::Display for VarContext {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, (name, ty)) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{name} : {ty}")?;
        }
        write!(f, "}}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn x() -> Type {
        Type::var("X")
    }

    #[test]
    fn well_formed_examples() {
        let atoms = AtomTable::new();
        let theta = TypeContext::new(["X"]).unwrap();
        assert!(type_well_formed(&atoms, &theta, &x()));
        assert!(type_well_formed(&atoms, &TypeContext::empty(), &Type::nat()));
        assert!(!type_well_formed(&atoms, &TypeContext::empty(), &Type::var("Y")));
        assert!(!type_well_formed(&atoms, &TypeContext::empty(), &Type::atomic("qubit")));
        let atoms = atoms.with("qubit", AtomSpec::total(2));
        assert!(type_well_formed(&atoms, &TypeContext::empty(), &Type::atomic("qubit")));
    }

    #[test]
    fn ill_formed_reports_variable() {
        let err = check_well_formed(&AtomTable::new(), &TypeContext::empty(), &Type::sum(Type::Unit, Type::var("Y")))
            .unwrap_err();
        match err {
            IllFormedType::UnboundTypeVar { var, .. } => assert_eq!(var, "Y"),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn duplicate_type_context_rejected() {
        assert_eq!(TypeContext::new(["X", "X"]), Err(DuplicateTypeVar("X".into())));
    }

    #[test]
    fn substitution_examples() {
        let nat = Type::nat();
        let body = Type::sum(Type::Unit, x());
        assert_eq!(body.substitute("X", &nat), Type::sum(Type::Unit, nat.clone()));
        assert_eq!(x().substitute("X", &Type::bit()), Type::bit());
        assert_eq!(nat.substitute("X", &Type::bit()), nat);
    }

    #[test]
    fn substitution_avoids_capture() {
        // (μY. X + Y)[Y / X] must not capture the incoming Y.
        let a = Type::mu("Y", Type::sum(x(), Type::var("Y")));
        let out = a.substitute("X", &Type::var("Y"));
        match &out {
            Type::Mu(binder, _) => assert_ne!(binder, "Y"),
            _ => panic!(),
        }
        assert_eq!(out.free_vars(), BTreeSet::from(["Y".to_string()]));
    }

    #[test]
    fn free_vars_examples() {
        assert_eq!(Type::tensor(Type::Unit, x()).free_vars(), BTreeSet::from(["X".to_string()]));
        assert!(Type::nat().free_vars().is_empty());
        let t = Type::mu("Y", Type::sum(Type::Unit, Type::tensor(x(), Type::var("Y"))));
        assert_eq!(t.free_vars(), BTreeSet::from(["X".to_string()]));
    }

    #[test]
    fn alpha_equivalence() {
        let a = Type::mu("X", Type::sum(Type::Unit, Type::var("X")));
        let b = Type::mu("Z", Type::sum(Type::Unit, Type::var("Z")));
        assert_eq!(a, b);
        assert_eq!(a.canonical(), b.canonical());
        let open = Type::mu("Z", Type::sum(Type::var("X"), Type::var("Z")));
        assert_ne!(a, open);
        let mut h1 = std::collections::hash_map::DefaultHasher::new();
        let mut h2 = std::collections::hash_map::DefaultHasher::new();
        a.hash(&mut h1);
        b.hash(&mut h2);
        assert_eq!(h1.finish(), h2.finish());
    }

    #[test]
    fn bit_desugars_to_unit_sum() {
        assert!(matches!(Type::bit(), Type::Sum(a, b) if matches!(*a, Type::Unit) && matches!(*b, Type::Unit)));
    }

    #[test]
    fn if_sugar_shape() {
        let t = desugar_if("b", Term::Skip, |_| false);
        let expected = Term::case(
            "b",
            "u",
            Term::left("b", Type::Unit, Type::Unit, "u"),
            "u",
            Term::seq(Term::right("b", Type::Unit, Type::Unit, "u"), Term::Skip),
        );
        assert_eq!(t, expected);
    }

    #[test]
    fn if_sugar_renames_binder() {
        let t = desugar_if("b", Term::Skip, |n| n == "u");
        match t {
            Term::Case { left_var, right_var, .. } => {
                assert_eq!(left_var, "u'");
                assert_eq!(right_var, "u'");
            }
            _ => panic!(),
        }
    }

    #[test]
    fn var_context_rejects_duplicates_and_open_types() {
        let mut ctx = VarContext::new();
        ctx.insert("x".into(), Type::Unit).unwrap();
        assert_eq!(ctx.insert("x".into(), Type::Unit), Err(ContextError::Duplicate("x".into())));
        assert!(matches!(ctx.insert("y".into(), x()), Err(ContextError::OpenType { .. })));
    }

    #[test]
    fn var_context_equality_ignores_order() {
        let a = VarContext::from_pairs([("x", Type::Unit), ("y", Type::bit())]).unwrap();
        let b = VarContext::from_pairs([("y", Type::bit()), ("x", Type::Unit)]).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn seq_all_is_right_nested() {
        let t = Term::seq_all([Term::Skip, Term::new_unit("u"), Term::discard("u")]);
        assert_eq!(t, Term::seq(Term::Skip, Term::seq(Term::new_unit("u"), Term::discard("u"))));
        assert_eq!(Term::seq_all([]), Term::Skip);
    }
}

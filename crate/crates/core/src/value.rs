//! Values and value assignments.

use std::fmt;

use indexmap::IndexMap;

use crate::syntax::{Name, Type};

/// `v, w ::= * | left_{A,B} v | right_{A,B} v | (v, w) | fold_{μX.A} v`,
/// plus carrier tokens for atomic types registered in an [`AtomTable`].
///
/// [`AtomTable`]: crate::syntax::AtomTable
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Value {
    Star,
    Left { left_ty: Type, right_ty: Type, inner: Box<Value> },
    Right { left_ty: Type, right_ty: Type, inner: Box<Value> },
    Pair(Box<Value>, Box<Value>),
    Fold { mu_ty: Type, inner: Box<Value> },
    Atom { ty: Name, token: u32 },
}

impl Value {
    pub fn left(left_ty: Type, right_ty: Type, inner: Value) -> Value {
        Value::Left { left_ty, right_ty, inner: Box::new(inner) }
    }

    pub fn right(left_ty: Type, right_ty: Type, inner: Value) -> Value {
        Value::Right { left_ty, right_ty, inner: Box::new(inner) }
    }

    pub fn pair(fst: Value, snd: Value) -> Value {
        Value::Pair(Box::new(fst), Box::new(snd))
    }

    pub fn fold(mu_ty: Type, inner: Value) -> Value {
        Value::Fold { mu_ty, inner: Box::new(inner) }
    }

    /// `ff := left_{I,I} *`
    pub fn ff() -> Value {
        Value::left(Type::Unit, Type::Unit, Value::Star)
    }

    /// `tt := right_{I,I} *`
    pub fn tt() -> Value {
        Value::right(Type::Unit, Type::Unit, Value::Star)
    }

    /// The natural number `n` as a value of `Nat`.
    pub fn nat(n: usize) -> Value {
        let nat = Type::nat();
        let mut v = Value::fold(nat.clone(), Value::left(Type::Unit, nat.clone(), Value::Star));
        for _ in 0..n {
            v = Value::fold(nat.clone(), Value::right(Type::Unit, nat.clone(), v));
        }
        v
    }

    /// AST node count; each constructor and `*` counts one.
    pub fn size(&self) -> usize {
        match self {
            Value::Star | Value::Atom { .. } => 1,
            Value::Left { inner, .. } | Value::Right { inner, .. } | Value::Fold { inner, .. } => 1 + inner.size(),
            Value::Pair(a, b) => 1 + a.size() + b.size(),
        }
    }

    /// The type read off the value's annotations, without checking that the
    /// value actually inhabits it.
    pub fn annotated_type(&self) -> Option<Type> {
        match self {
            Value::Star => Some(Type::Unit),
            Value::Left { left_ty, right_ty, .. } | Value::Right { left_ty, right_ty, .. } => {
                Some(Type::sum(left_ty.clone(), right_ty.clone()))
            }
            Value::Pair(a, b) => Some(Type::tensor(a.annotated_type()?, b.annotated_type()?)),
            Value::Fold { mu_ty, .. } => Some(mu_ty.clone()),
            Value::Atom { ty, .. } => Some(Type::Atomic(ty.clone())),
        }
    }

    pub fn is_bit(&self) -> Option<bool> {
        match self {
            Value::Left { left_ty, right_ty, inner }
                if matches!(left_ty, Type::Unit) && matches!(right_ty, Type::Unit) && **inner == Value::Star =>
            {
                Some(false)
            }
            Value::Right { left_ty, right_ty, inner }
                if matches!(left_ty, Type::Unit) && matches!(right_ty, Type::Unit) && **inner == Value::Star =>
            {
                Some(true)
            }
            _ => None,
        }
    }
}

/// Value assignment `{x₁ = v₁, …, xₙ = vₙ}`. Equality ignores order.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ValueAssignment(IndexMap<Name, Value>);

impl ValueAssignment {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_pairs<I, S>(pairs: I) -> Self
    where
        I: IntoIterator<Item = (S, Value)>,
        S: Into<Name>,
    {
        ValueAssignment(pairs.into_iter().map(|(n, v)| (n.into(), v)).collect())
    }

    pub fn get(&self, name: &str) -> Option<&Value> {
        self.0.get(name)
    }

    pub fn contains(&self, name: &str) -> bool {
        self.0.contains_key(name)
    }

    /// Returns false (and leaves the store untouched) if `name` is bound.
    pub fn bind(&mut self, name: Name, value: Value) -> bool {
        if self.0.contains_key(&name) {
            return false;
        }
        self.0.insert(name, value);
        true
    }

    pub fn take(&mut self, name: &str) -> Option<Value> {
        self.0.shift_remove(name)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Name, &Value)> {
        self.0.iter()
    }

    pub fn names(&self) -> impl Iterator<Item = &Name> {
        self.0.keys()
    }

    /// Entries sorted by variable name, for stable output.
    pub fn sorted(&self) -> Vec<(&Name, &Value)> {
        let mut out: Vec<_> = self.0.iter().collect();
        out.sort_by(|a, b| a.0.cmp(b.0));
        out
    }
}

impl FromIterator<(Name, Value)> for ValueAssignment {
    fn from_iter<T: IntoIterator<Item = (Name, Value)>>(iter: T) -> Self {
        ValueAssignment(iter.into_iter().collect())
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&crate::frontend::Printer::plain().value(self))
    }
}

impl fmt::Display for ValueAssignment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&crate::frontend::Printer::plain().store(self))
    }
}

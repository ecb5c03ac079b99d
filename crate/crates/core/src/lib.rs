//! An affine first-order language with sums, tensors and inductive types.
//!
//! The crate provides a parser and printer ([`frontend`]), a typechecker
//! ([`typecheck`]), a small-step interpreter ([`interp`]), a denotational
//! evaluator over finite value sets ([`denote`]) and randomized and
//! exhaustive checks of the metatheory ([`oracle`]).

#![allow(clippy::result_large_err)]

pub mod denote;
pub mod frontend;
pub mod interp;
pub mod oracle;
pub mod syntax;
pub mod typecheck;
pub mod value;

pub use syntax::{AtomSpec, AtomTable, Name, Pos, Term, TermKind, Type, VarContext};
pub use typecheck::{Checker, TypingError, TypingErrorKind};
pub use value::{Value, ValueAssignment};

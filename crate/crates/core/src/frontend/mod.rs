//! Concrete syntax: parser and pretty-printer for `.afl` programs.
//!
//! ```text
//! // Nat and a one-step countdown
//! type Nat = mu X. I + X;
//! input n : Nat = fold[Nat](left[I,Nat] *);
//! m = unfold n;
//! case m of { left z -> discard z | right p -> discard p }
//! ```
//!
//! `left`, `right` and `fold` require bracketed type annotations; `unfold`
//! takes none. `bit`, `tt`, `ff` and `if b { M }` are sugar.

mod lexer;
mod parser;
mod printer;

use std::fmt;

use thiserror::Error;

use crate::syntax::{AtomTable, ContextError, Name, Pos, Term, Type, VarContext};
use crate::value::{Value, ValueAssignment};

pub use printer::Printer;

use parser::Parser;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub struct ParseError {
    pub pos: Pos,
    pub expected: Vec<String>,
    pub found: String,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: syntax error: expected ", self.pos)?;
        match self.expected.as_slice() {
            [one] => write!(f, "{one}")?,
            many => write!(f, "one of {}", many.join(", "))?,
        }
        write!(f, ", found {}", self.found)
    }
}

/// `type Name(params) = body;`
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Abbreviation {
    pub name: Name,
    pub params: Vec<Name>,
    pub body: Type,
}

/// `input name : type (= value)?;`
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InputDecl {
    pub name: Name,
    pub ty: Type,
    pub value: Option<Value>,
    pub pos: Pos,
}

/// A parsed `.afl` file. Types in `inputs` and `term` have every
/// abbreviation expanded.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SourceProgram {
    pub abbreviations: Vec<Abbreviation>,
    pub inputs: Vec<InputDecl>,
    pub term: Term,
}

impl SourceProgram {
    pub fn from_term(term: Term) -> Self {
        SourceProgram { abbreviations: Vec::new(), inputs: Vec::new(), term }
    }

    pub fn declared_context(&self) -> Result<VarContext, ContextError> {
        VarContext::from_pairs(self.inputs.iter().map(|d| (d.name.clone(), d.ty.clone())))
    }

    /// The initial store, if every input carries a value.
    pub fn initial_store(&self) -> Option<ValueAssignment> {
        self.inputs.iter().map(|d| d.value.clone().map(|v| (d.name.clone(), v))).collect()
    }

    pub fn abbreviation(&self, name: &str) -> Option<&Abbreviation> {
        self.abbreviations.iter().find(|a| a.name == name)
    }
}

pub fn parse_program(src: &str) -> Result<SourceProgram, ParseError> {
    parse_program_with(src, &AtomTable::default())
}

pub fn parse_program_with(src: &str, atoms: &AtomTable) -> Result<SourceProgram, ParseError> {
    Parser::new(src, atoms)?.program()
}

pub fn parse_term(src: &str) -> Result<Term, ParseError> {
    let atoms = AtomTable::default();
    let mut p = Parser::new(src, &atoms)?;
    let t = p.term()?;
    p.finish()?;
    Ok(t)
}

pub fn parse_type(src: &str) -> Result<Type, ParseError> {
    parse_type_in(src, &[])
}

/// Parses a type with the given abbreviations in scope.
pub fn parse_type_in(src: &str, abbreviations: &[Abbreviation]) -> Result<Type, ParseError> {
    let atoms = AtomTable::default();
    let mut p = Parser::new(src, &atoms)?.with_abbreviations(abbreviations);
    let t = p.ty()?;
    p.finish()?;
    Ok(t)
}

pub fn parse_value(src: &str) -> Result<Value, ParseError> {
    parse_value_in(src, &[])
}

pub fn parse_value_in(src: &str, abbreviations: &[Abbreviation]) -> Result<Value, ParseError> {
    let atoms = AtomTable::default();
    let mut p = Parser::new(src, &atoms)?.with_abbreviations(abbreviations);
    let v = p.value()?;
    p.finish()?;
    Ok(v)
}

pub fn print_program(p: &SourceProgram) -> String {
    Printer::for_program(p).program(p)
}

pub fn print_type(t: &Type) -> String {
    Printer::sugared().ty(t)
}

pub fn print_value(v: &Value) -> String {
    Printer::sugared().value(v)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn nat_abbrev() -> Vec<Abbreviation> {
        vec![Abbreviation { name: "Nat".into(), params: vec![], body: Type::nat() }]
    }

    #[test]
    fn parses_sequence_of_intro_forms() {
        let t = parse_term("new unit u; y = left[I,I] u").unwrap();
        assert_eq!(t, Term::seq(Term::new_unit("u"), Term::left("y", Type::Unit, Type::Unit, "u")));
    }

    #[test]
    fn parses_fold_with_abbreviation() {
        let p = parse_program("type Nat = mu X. I + X;\ny = fold[Nat] x").unwrap();
        assert_eq!(p.term, Term::fold("y", Type::nat(), "x"));
        match &p.term {
            Term::Fold { pos, .. } => assert_eq!((pos.line, pos.col), (2, 1)),
            _ => unreachable!(),
        }
    }

    #[test]
    fn parses_while() {
        let t = parse_term("while b do { skip }").unwrap();
        assert_eq!(t, Term::while_do("b", Term::Skip));
    }

    #[test]
    fn parses_if_sugar() {
        let t = parse_term("if b then { skip }").unwrap();
        assert_eq!(t, crate::syntax::desugar_if("b", Term::Skip, |_| false));
        let t2 = parse_term("new unit u; discard u; if b { skip }").unwrap();
        match t2 {
            Term::Seq(_, rest) => match &*rest {
                Term::Seq(_, last) => match &**last {
                    Term::Case { left_var, .. } => assert_eq!(left_var, "u'"),
                    other => panic!("{other:?}"),
                },
                other => panic!("{other:?}"),
            },
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn parses_case_and_pairs() {
        let t = parse_term("case x of { left a -> (p, q) = a | right b -> c = (b, d); discard c }").unwrap();
        let expected = Term::case(
            "x",
            "a",
            Term::unpair("p", "q", "a"),
            "b",
            Term::seq(Term::pair("c", "b", "d"), Term::discard("c")),
        );
        assert_eq!(t, expected);
    }

    #[test]
    fn missing_annotation_is_a_syntax_error() {
        let err = parse_term("y = left x").unwrap_err();
        assert_eq!(err.expected, vec!["`[`".to_string()]);
        assert_eq!((err.pos.line, err.pos.col), (1, 10));
        assert!(parse_term("y = fold x").is_err());
        assert!(parse_term("y = unfold x").is_ok());
    }

    #[test]
    fn error_lists_expected_tokens() {
        let err = parse_term("while b { skip }").unwrap_err();
        assert_eq!(err.expected, vec!["`do`".to_string()]);
        let msg = err.to_string();
        assert!(msg.starts_with("1:9: syntax error"), "{msg}");
    }

    #[test]
    fn type_precedence() {
        let t = parse_type("I + I * I").unwrap();
        assert_eq!(t, Type::sum(Type::Unit, Type::tensor(Type::Unit, Type::Unit)));
        let t = parse_type("I + mu X. I + X").unwrap();
        assert_eq!(t, Type::sum(Type::Unit, Type::nat()));
        let t = parse_type("μX. I ⊗ X").unwrap();
        assert_eq!(t, Type::mu("X", Type::tensor(Type::Unit, Type::var("X"))));
    }

    #[test]
    fn parametric_abbreviation() {
        let p = parse_program("type List(A) = mu Y. I + A * Y;\ninput l : List(bit);\ndiscard l").unwrap();
        assert_eq!(p.inputs[0].ty, Type::list(Type::bit()));
    }

    #[test]
    fn abbreviation_must_be_defined_before_use() {
        let err = parse_program("type A = B; type B = I;").unwrap_err();
        assert!(err.found.contains("undefined type name `B`"), "{err}");
        assert!(parse_program("type A = I; type A = I;").is_err());
    }

    #[test]
    fn prints_values_with_abbreviations() {
        let v = Value::nat(0);
        let printer = Printer::sugared().with_abbreviation("Nat", Type::nat());
        assert_eq!(printer.value(&v), "fold[Nat](left[I,Nat] *)");
        assert_eq!(parse_value_in("fold[Nat](left[I,Nat] *)", &nat_abbrev()).unwrap(), v);
    }

    #[test]
    fn prints_bit() {
        assert_eq!(print_type(&Type::bit()), "bit");
        assert_eq!(Printer::plain().ty(&Type::bit()), "I + I");
        assert_eq!(print_value(&Value::tt()), "tt");
    }

    #[test]
    fn mu_operands_are_parenthesized() {
        let t = Type::sum(Type::nat(), Type::Unit);
        let s = Printer::plain().ty(&t);
        assert_eq!(s, "(mu X. I + X) + I");
        assert_eq!(parse_type(&s).unwrap(), t);
    }

    #[test]
    fn abbreviation_not_used_under_shadowing_binder() {
        let printer = Printer::sugared().with_abbreviation("X", Type::Unit);
        let t = Type::mu("X", Type::sum(Type::Unit, Type::var("X")));
        let s = printer.ty(&t);
        assert_eq!(s, "mu X. I + X");
    }

    #[test]
    fn program_roundtrip() {
        let src = "type Nat = mu X. I + X;\ntype List(A) = mu Y. I + A * Y;\n\
                   input n : Nat = fold[Nat](left[I,Nat] *), b : bit = tt;\n\
                   while b do { discard b; new unit u; b = left[I,I] u };\n\
                   { m = unfold n; case m of { left z -> discard z | right p -> discard p } };\n\
                   skip";
        let p = parse_program(src).unwrap();
        let printed = print_program(&p);
        let q = parse_program(&printed).unwrap();
        assert_eq!(p, q, "{printed}");
        let inline = Printer::plain().term_inline(&p.term);
        assert_eq!(parse_term(&inline).unwrap(), p.term);
    }

    #[test]
    fn initial_store_requires_every_value() {
        let p = parse_program("input x : I = *, y : I;\nskip").unwrap();
        assert!(p.initial_store().is_none());
        let p = parse_program("input x : I = *;\nskip").unwrap();
        assert_eq!(p.initial_store().unwrap().len(), 1);
    }
}

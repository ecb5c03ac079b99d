use std::collections::{BTreeMap, BTreeSet};
use std::rc::Rc;

use crate::syntax::{desugar_if, AtomTable, Name, Pos, Term, Type};
use crate::value::Value;

use super::lexer::{is_keyword, lex, Tok, Token};
use super::{Abbreviation, InputDecl, ParseError, SourceProgram};

type PResult<T> = Result<T, ParseError>;

pub(crate) struct Parser<'a> {
    toks: Vec<Token>,
    at: usize,
    atoms: &'a AtomTable,
    abbrevs: Vec<Abbreviation>,
    scope: Vec<Name>,
    idents: BTreeSet<String>,
}

impl<'a> Parser<'a> {
    pub(crate) fn new(src: &str, atoms: &'a AtomTable) -> PResult<Self> {
        let (toks, idents) = lex(src)?;
        Ok(Parser { toks, at: 0, atoms, abbrevs: Vec::new(), scope: Vec::new(), idents })
    }

    pub(crate) fn with_abbreviations(mut self, abbrevs: &[Abbreviation]) -> Self {
        self.abbrevs = abbrevs.to_vec();
        self
    }

    fn peek(&self) -> &Tok {
        &self.toks[self.at].tok
    }

    fn pos(&self) -> Pos {
        self.toks[self.at].pos
    }

    fn bump(&mut self) -> Token {
        let t = self.toks[self.at].clone();
        if self.at + 1 < self.toks.len() {
            self.at += 1;
        }
        t
    }

    fn error<T>(&self, expected: &[&str]) -> PResult<T> {
        Err(ParseError {
            pos: self.pos(),
            expected: expected.iter().map(|s| s.to_string()).collect(),
            found: self.peek().describe(),
        })
    }

    fn eat(&mut self, tok: &Tok) -> bool {
        if self.peek() == tok {
            self.bump();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, tok: Tok) -> PResult<Pos> {
        if self.peek() == &tok {
            Ok(self.bump().pos)
        } else {
            self.error(&[&tok.describe()])
        }
    }

    fn at_keyword(&self, kw: &str) -> bool {
        matches!(self.peek(), Tok::Ident(s) if s == kw)
    }

    fn expect_keyword(&mut self, kw: &str) -> PResult<Pos> {
        if self.at_keyword(kw) {
            Ok(self.bump().pos)
        } else {
            self.error(&[&format!("`{kw}`")])
        }
    }

    /// A non-keyword identifier.
    fn name(&mut self, what: &str) -> PResult<Name> {
        match self.peek() {
            Tok::Ident(s) if !is_keyword(s) => {
                let s = s.clone();
                self.bump();
                Ok(s)
            }
            _ => self.error(&[what]),
        }
    }

    pub(crate) fn finish(&mut self) -> PResult<()> {
        if self.peek() == &Tok::Eof {
            Ok(())
        } else {
            self.error(&["end of input"])
        }
    }

    // -----------------------------------------------------------------------
    // Programs
    // -----------------------------------------------------------------------

    pub(crate) fn program(&mut self) -> PResult<SourceProgram> {
        let mut inputs: Vec<InputDecl> = Vec::new();
        loop {
            if self.at_keyword("type") {
                self.type_decl()?;
            } else if self.at_keyword("input") {
                self.bump();
                loop {
                    let pos = self.pos();
                    let name = self.name("an input variable")?;
                    if inputs.iter().any(|d| d.name == name) {
                        return Err(ParseError {
                            pos,
                            expected: vec!["a fresh input variable".into()],
                            found: format!("`{name}` (already declared)"),
                        });
                    }
                    self.expect(Tok::Colon)?;
                    let ty = self.ty()?;
                    let value = if self.eat(&Tok::Eq) { Some(self.value()?) } else { None };
                    inputs.push(InputDecl { name, ty, value, pos });
                    if !self.eat(&Tok::Comma) {
                        break;
                    }
                }
                self.expect(Tok::Semi)?;
            } else {
                break;
            }
        }
        let term = if self.peek() == &Tok::Eof { Term::Skip } else { self.term()? };
        self.finish()?;
        Ok(SourceProgram { abbreviations: self.abbrevs.clone(), inputs, term })
    }

    fn type_decl(&mut self) -> PResult<()> {
        self.expect_keyword("type")?;
        let pos = self.pos();
        let name = self.name("a type name")?;
        if self.abbrevs.iter().any(|a| a.name == name) {
            return Err(ParseError {
                pos,
                expected: vec!["a fresh type name".into()],
                found: format!("`{name}` (already defined)"),
            });
        }
        let mut params = Vec::new();
        if self.eat(&Tok::LParen) {
            loop {
                let p = self.name("a type parameter")?;
                if params.contains(&p) {
                    return self.error(&["a distinct type parameter"]);
                }
                params.push(p);
                if !self.eat(&Tok::Comma) {
                    break;
                }
            }
            self.expect(Tok::RParen)?;
        }
        self.expect(Tok::Eq)?;
        let saved = std::mem::replace(&mut self.scope, params.clone());
        let body = self.ty();
        self.scope = saved;
        let body = body?;
        if let Some(stray) = body.free_vars().into_iter().find(|v| !params.contains(v)) {
            return Err(ParseError {
                pos,
                expected: vec!["a type whose names are parameters or earlier definitions".into()],
                found: format!("undefined type name `{stray}` in `{name}`"),
            });
        }
        self.expect(Tok::Semi)?;
        self.abbrevs.push(Abbreviation { name, params, body });
        Ok(())
    }

    // -----------------------------------------------------------------------
    // Terms
    // -----------------------------------------------------------------------

    fn at_term_end(&self) -> bool {
        matches!(self.peek(), Tok::RBrace | Tok::Bar | Tok::Eof)
    }

    pub(crate) fn term(&mut self) -> PResult<Term> {
        let first = self.stmt()?;
        if self.eat(&Tok::Semi) && !self.at_term_end() {
            let rest = self.term()?;
            Ok(Term::seq(first, rest))
        } else {
            Ok(first)
        }
    }

    fn block(&mut self) -> PResult<Term> {
        self.expect(Tok::LBrace)?;
        let t = self.term()?;
        self.expect(Tok::RBrace)?;
        Ok(t)
    }

    fn stmt(&mut self) -> PResult<Term> {
        let pos = self.pos();
        match self.peek().clone() {
            Tok::LBrace => self.block(),
            Tok::LParen => {
                self.bump();
                let fst = self.name("a variable")?;
                self.expect(Tok::Comma)?;
                let snd = self.name("a variable")?;
                self.expect(Tok::RParen)?;
                self.expect(Tok::Eq)?;
                let src = self.name("a variable")?;
                Ok(Term::Unpair { fst, snd, src, pos })
            }
            Tok::Ident(word) => match word.as_str() {
                "new" => {
                    self.bump();
                    self.expect_keyword("unit")?;
                    let var = self.name("a variable")?;
                    Ok(Term::NewUnit { var, pos })
                }
                "discard" => {
                    self.bump();
                    let var = self.name("a variable")?;
                    Ok(Term::Discard { var, pos })
                }
                "skip" => {
                    self.bump();
                    Ok(Term::Skip)
                }
                "while" => {
                    self.bump();
                    let guard = self.name("a guard variable")?;
                    self.expect_keyword("do")?;
                    let body = self.block()?;
                    Ok(Term::While { guard, body: Rc::new(body), pos })
                }
                "if" => {
                    self.bump();
                    let guard = self.name("a guard variable")?;
                    if self.at_keyword("then") {
                        self.bump();
                    }
                    let body = self.block()?;
                    let idents = self.idents.clone();
                    Ok(desugar_if(&guard, body, |n| idents.contains(n)))
                }
                "case" => {
                    self.bump();
                    let scrutinee = self.name("a variable")?;
                    self.expect_keyword("of")?;
                    self.expect(Tok::LBrace)?;
                    self.expect_keyword("left")?;
                    let left_var = self.name("a variable")?;
                    self.expect(Tok::Arrow)?;
                    let left_body = self.term()?;
                    self.expect(Tok::Bar)?;
                    self.expect_keyword("right")?;
                    let right_var = self.name("a variable")?;
                    self.expect(Tok::Arrow)?;
                    let right_body = self.term()?;
                    self.expect(Tok::RBrace)?;
                    Ok(Term::Case {
                        scrutinee,
                        left_var,
                        left_body: Rc::new(left_body),
                        right_var,
                        right_body: Rc::new(right_body),
                        pos,
                    })
                }
                w if !is_keyword(w) => {
                    let dst = self.name("a variable")?;
                    self.expect(Tok::Eq)?;
                    self.assignment(dst, pos)
                }
                _ => self.statement_error(),
            },
            _ => self.statement_error(),
        }
    }

    fn statement_error<T>(&self) -> PResult<T> {
        self.error(&["`new`", "`discard`", "`skip`", "`while`", "`if`", "`case`", "`(`", "`{`", "a variable"])
    }

    fn assignment(&mut self, dst: Name, pos: Pos) -> PResult<Term> {
        match self.peek().clone() {
            Tok::LParen => {
                self.bump();
                let fst = self.name("a variable")?;
                self.expect(Tok::Comma)?;
                let snd = self.name("a variable")?;
                self.expect(Tok::RParen)?;
                Ok(Term::Pair { dst, fst, snd, pos })
            }
            Tok::Ident(w) if w == "left" || w == "right" => {
                self.bump();
                let (left_ty, right_ty) = self.sum_annotation()?;
                let src = self.name("a variable")?;
                Ok(if w == "left" {
                    Term::Left { dst, left_ty, right_ty, src, pos }
                } else {
                    Term::Right { dst, left_ty, right_ty, src, pos }
                })
            }
            Tok::Ident(w) if w == "fold" => {
                self.bump();
                self.expect(Tok::LBrack)?;
                let mu_ty = self.ty()?;
                self.expect(Tok::RBrack)?;
                let src = self.name("a variable")?;
                Ok(Term::Fold { dst, mu_ty, src, pos })
            }
            Tok::Ident(w) if w == "unfold" => {
                self.bump();
                let src = self.name("a variable")?;
                Ok(Term::Unfold { dst, src, pos })
            }
            _ => self.error(&["`left`", "`right`", "`fold`", "`unfold`", "`(`"]),
        }
    }

    fn sum_annotation(&mut self) -> PResult<(Type, Type)> {
        self.expect(Tok::LBrack)?;
        let a = self.ty()?;
        self.expect(Tok::Comma)?;
        let b = self.ty()?;
        self.expect(Tok::RBrack)?;
        Ok((a, b))
    }

    // -----------------------------------------------------------------------
    // Types
    // -----------------------------------------------------------------------

    pub(crate) fn ty(&mut self) -> PResult<Type> {
        let mut acc = self.tensor_ty()?;
        while self.eat(&Tok::Plus) {
            let rhs = self.tensor_ty()?;
            acc = Type::sum(acc, rhs);
        }
        Ok(acc)
    }

    fn tensor_ty(&mut self) -> PResult<Type> {
        let mut acc = self.prim_ty()?;
        while self.eat(&Tok::Star) {
            let rhs = self.prim_ty()?;
            acc = Type::tensor(acc, rhs);
        }
        Ok(acc)
    }

    fn prim_ty(&mut self) -> PResult<Type> {
        let pos = self.pos();
        match self.peek().clone() {
            Tok::LParen => {
                self.bump();
                let t = self.ty()?;
                self.expect(Tok::RParen)?;
                Ok(t)
            }
            Tok::Ident(w) => match w.as_str() {
                "I" => {
                    self.bump();
                    Ok(Type::Unit)
                }
                "bit" => {
                    self.bump();
                    Ok(Type::bit())
                }
                "mu" => {
                    self.bump();
                    let binder = self.name("a type variable")?;
                    self.expect(Tok::Dot)?;
                    self.scope.push(binder.clone());
                    let body = self.ty();
                    self.scope.pop();
                    Ok(Type::mu(binder, body?))
                }
                w if is_keyword(w) => self.type_error(),
                _ => {
                    self.bump();
                    self.resolve_type_name(w, pos)
                }
            },
            _ => self.type_error(),
        }
    }

    fn type_error<T>(&self) -> PResult<T> {
        self.error(&["`I`", "`bit`", "`mu`", "`(`", "a type name"])
    }

    fn resolve_type_name(&mut self, name: String, pos: Pos) -> PResult<Type> {
        if self.scope.contains(&name) {
            return Ok(Type::Var(name));
        }
        if let Some(abbrev) = self.abbrevs.iter().find(|a| a.name == name).cloned() {
            let mut args = Vec::new();
            if !abbrev.params.is_empty() {
                self.expect(Tok::LParen)?;
                loop {
                    args.push(self.ty()?);
                    if !self.eat(&Tok::Comma) {
                        break;
                    }
                }
                self.expect(Tok::RParen)?;
            }
            if args.len() != abbrev.params.len() {
                return Err(ParseError {
                    pos,
                    expected: vec![format!("{} type argument(s) for `{name}`", abbrev.params.len())],
                    found: format!("{}", args.len()),
                });
            }
            let map: BTreeMap<Name, Type> = abbrev.params.iter().cloned().zip(args).collect();
            return Ok(abbrev.body.substitute_all(&map));
        }
        if self.atoms.contains(&name) {
            return Ok(Type::Atomic(name));
        }
        Ok(Type::Var(name))
    }

    // -----------------------------------------------------------------------
    // Values
    // -----------------------------------------------------------------------

    pub(crate) fn value(&mut self) -> PResult<Value> {
        match self.peek().clone() {
            Tok::Star => {
                self.bump();
                Ok(Value::Star)
            }
            Tok::LParen => {
                self.bump();
                let first = self.value()?;
                if self.eat(&Tok::Comma) {
                    let second = self.value()?;
                    self.expect(Tok::RParen)?;
                    Ok(Value::pair(first, second))
                } else {
                    self.expect(Tok::RParen)?;
                    Ok(first)
                }
            }
            Tok::Ident(w) => match w.as_str() {
                "tt" => {
                    self.bump();
                    Ok(Value::tt())
                }
                "ff" => {
                    self.bump();
                    Ok(Value::ff())
                }
                "left" | "right" => {
                    self.bump();
                    let (a, b) = self.sum_annotation()?;
                    let inner = self.value()?;
                    Ok(if w == "left" { Value::left(a, b, inner) } else { Value::right(a, b, inner) })
                }
                "fold" => {
                    self.bump();
                    self.expect(Tok::LBrack)?;
                    let mu_ty = self.ty()?;
                    self.expect(Tok::RBrack)?;
                    let inner = self.value()?;
                    Ok(Value::fold(mu_ty, inner))
                }
                "atom" => {
                    self.bump();
                    self.expect(Tok::LBrack)?;
                    let ty = self.name("an atomic type name")?;
                    self.expect(Tok::RBrack)?;
                    match self.peek().clone() {
                        Tok::Int(token) => {
                            self.bump();
                            Ok(Value::Atom { ty, token })
                        }
                        _ => self.error(&["a token index"]),
                    }
                }
                _ => self.value_error(),
            },
            _ => self.value_error(),
        }
    }

    fn value_error<T>(&self) -> PResult<T> {
        self.error(&["`*`", "`tt`", "`ff`", "`left`", "`right`", "`fold`", "`atom`", "`(`"])
    }
}

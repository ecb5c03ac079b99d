use std::collections::BTreeSet;

use crate::syntax::Pos;

use super::ParseError;

#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) enum Tok {
    Ident(String),
    Int(u32),
    Semi,
    Comma,
    Colon,
    LParen,
    RParen,
    LBrack,
    RBrack,
    LBrace,
    RBrace,
    Bar,
    Eq,
    Plus,
    Star,
    Dot,
    Arrow,
    Eof,
}

impl Tok {
    pub(crate) fn describe(&self) -> String {
        match self {
            Tok::Ident(s) => format!("`{s}`"),
            Tok::Int(n) => format!("`{n}`"),
            Tok::Semi => "`;`".into(),
            Tok::Comma => "`,`".into(),
            Tok::Colon => "`:`".into(),
            Tok::LParen => "`(`".into(),
            Tok::RParen => "`)`".into(),
            Tok::LBrack => "`[`".into(),
            Tok::RBrack => "`]`".into(),
            Tok::LBrace => "`{`".into(),
            Tok::RBrace => "`}`".into(),
            Tok::Bar => "`|`".into(),
            Tok::Eq => "`=`".into(),
            Tok::Plus => "`+`".into(),
            Tok::Star => "`*`".into(),
            Tok::Dot => "`.`".into(),
            Tok::Arrow => "`->`".into(),
            Tok::Eof => "end of input".into(),
        }
    }
}

#[derive(Clone, Debug)]
pub(crate) struct Token {
    pub tok: Tok,
    pub pos: Pos,
}

pub(crate) const KEYWORDS: &[&str] = &[
    "new", "unit", "discard", "skip", "while", "do", "if", "then", "case", "of", "left", "right", "fold", "unfold",
    "type", "input", "mu", "I", "bit", "tt", "ff", "atom",
];

pub(crate) fn is_keyword(s: &str) -> bool {
    KEYWORDS.contains(&s)
}

fn ident_start(c: char) -> bool {
    c.is_ascii_alphabetic() || c == '_'
}

fn ident_continue(c: char) -> bool {
    c.is_ascii_alphanumeric() || c == '_' || c == '\''
}

/// Tokenizes `src`; also returns every identifier seen, so desugaring can
/// pick binders that clash with nothing in the file.
pub(crate) fn lex(src: &str) -> Result<(Vec<Token>, BTreeSet<String>), ParseError> {
    let mut out = Vec::new();
    let mut idents = BTreeSet::new();
    let chars: Vec<char> = src.chars().collect();
    let (mut i, mut line, mut col) = (0usize, 1u32, 1u32);
    while i < chars.len() {
        let c = chars[i];
        let pos = Pos::new(line, col);
        let advance = |n: usize, i: &mut usize, col: &mut u32| {
            *i += n;
            *col += n as u32;
        };
        if c == '\n' {
            i += 1;
            line += 1;
            col = 1;
            continue;
        }
        if c.is_whitespace() {
            advance(1, &mut i, &mut col);
            continue;
        }
        if c == '/' && chars.get(i + 1) == Some(&'/') {
            while i < chars.len() && chars[i] != '\n' {
                i += 1;
            }
            continue;
        }
        if ident_start(c) {
            let start = i;
            while i < chars.len() && ident_continue(chars[i]) {
                i += 1;
            }
            let word: String = chars[start..i].iter().collect();
            col += (i - start) as u32;
            idents.insert(word.clone());
            out.push(Token { tok: Tok::Ident(word), pos });
            continue;
        }
        if c.is_ascii_digit() {
            let start = i;
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
            }
            let digits: String = chars[start..i].iter().collect();
            col += (i - start) as u32;
            let n = digits.parse::<u32>().map_err(|_| ParseError {
                pos,
                expected: vec!["a 32-bit integer".into()],
                found: digits.clone(),
            })?;
            out.push(Token { tok: Tok::Int(n), pos });
            continue;
        }
        let (tok, width) = match c {
            ';' => (Tok::Semi, 1),
            ',' => (Tok::Comma, 1),
            ':' => (Tok::Colon, 1),
            '(' => (Tok::LParen, 1),
            ')' => (Tok::RParen, 1),
            '[' => (Tok::LBrack, 1),
            ']' => (Tok::RBrack, 1),
            '{' => (Tok::LBrace, 1),
            '}' => (Tok::RBrace, 1),
            '|' => (Tok::Bar, 1),
            '=' => (Tok::Eq, 1),
            '+' => (Tok::Plus, 1),
            '*' | '⊗' | '∗' => (Tok::Star, 1),
            '.' => (Tok::Dot, 1),
            '→' => (Tok::Arrow, 1),
            '-' if chars.get(i + 1) == Some(&'>') => (Tok::Arrow, 2),
            'μ' => (Tok::Ident("mu".into()), 1),
            other => {
                return Err(ParseError { pos, expected: vec!["a token".into()], found: format!("character `{other}`") })
            }
        };
        advance(width, &mut i, &mut col);
        out.push(Token { tok, pos });
    }
    out.push(Token { tok: Tok::Eof, pos: Pos::new(line, col) });
    Ok((out, idents))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lexes_primes_comments_and_unicode() {
        let (toks, idents) = lex("u' = μ // hi\n→ ⊗").unwrap();
        let kinds: Vec<_> = toks.iter().map(|t| t.tok.clone()).collect();
        assert_eq!(
            kinds,
            vec![Tok::Ident("u'".into()), Tok::Eq, Tok::Ident("mu".into()), Tok::Arrow, Tok::Star, Tok::Eof]
        );
        assert!(idents.contains("u'"));
        assert_eq!(toks[3].pos.line, 2);
    }

    #[test]
    fn rejects_stray_characters() {
        let err = lex("x = $").unwrap_err();
        assert_eq!(err.pos.col, 5);
    }
}

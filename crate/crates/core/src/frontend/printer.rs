use std::fmt::{self, Write as _};

use crate::syntax::{Name, Term, Type, VarContext};
use crate::value::{Value, ValueAssignment};

use super::SourceProgram;

/// Pretty-printer for types, values, terms and programs.
///
/// Output always reparses to an alpha-equivalent tree. With sugar enabled,
/// closed subterms matching a nullary abbreviation print as its name, `I + I`
/// prints as `bit`, and the two bits print as `tt` / `ff`.
#[derive(Clone, Debug, Default)]
pub struct Printer {
    abbrevs: Vec<(Name, Type)>,
    sugar: bool,
}

impl Printer {
    pub fn plain() -> Self {
        Printer::default()
    }

    pub fn sugared() -> Self {
        Printer { abbrevs: Vec::new(), sugar: true }
    }

    pub fn for_program(program: &SourceProgram) -> Self {
        let mut p = Printer::sugared();
        for a in &program.abbreviations {
            if a.params.is_empty() {
                p.abbrevs.push((a.name.clone(), a.body.clone()));
            }
        }
        p
    }

    pub fn with_abbreviation(mut self, name: impl Into<Name>, ty: Type) -> Self {
        self.abbrevs.push((name.into(), ty));
        self
    }

    // -----------------------------------------------------------------------
    // Types
    // -----------------------------------------------------------------------

    pub fn ty(&self, t: &Type) -> String {
        let mut out = String::new();
        self.write_ty(&mut out, t, 0, false, &mut Vec::new());
        out
    }

    fn abbreviation_for(&self, t: &Type, scope: &[Name]) -> Option<&str> {
        if self.sugar && t.is_bit() && !scope.iter().any(|s| s == "bit") {
            return Some("bit");
        }
        self.abbrevs
            .iter()
            .rev()
            .find(|(name, body)| !scope.contains(name) && body.alpha_eq(t))
            .map(|(name, _)| name.as_str())
    }

    /// `prec`: 0 sum level, 1 tensor level, 2 atom level. Left-associative
    /// binary operators, so right operands print one level tighter.
    fn write_ty(&self, out: &mut String, t: &Type, prec: u8, operand: bool, scope: &mut Vec<Name>) {
        if let Some(name) = self.abbreviation_for(t, scope) {
            out.push_str(name);
            return;
        }
        match t {
            Type::Var(x) | Type::Atomic(x) => out.push_str(x),
            Type::Unit => out.push('I'),
            Type::Sum(a, b) => {
                let paren = prec > 0;
                if paren {
                    out.push('(');
                }
                self.write_ty(out, a, 0, true, scope);
                out.push_str(" + ");
                self.write_ty(out, b, 1, true, scope);
                if paren {
                    out.push(')');
                }
            }
            Type::Tensor(a, b) => {
                let paren = prec > 1;
                if paren {
                    out.push('(');
                }
                self.write_ty(out, a, 1, true, scope);
                out.push_str(" * ");
                self.write_ty(out, b, 2, true, scope);
                if paren {
                    out.push(')');
                }
            }
            Type::Mu(x, body) => {
                if operand {
                    out.push('(');
                }
                let _ = write!(out, "mu {x}. ");
                scope.push(x.clone());
                self.write_ty(out, body, 0, false, scope);
                scope.pop();
                if operand {
                    out.push(')');
                }
            }
        }
    }

    // -----------------------------------------------------------------------
    // Values
    // -----------------------------------------------------------------------

    pub fn value(&self, v: &Value) -> String {
        let mut out = String::new();
        self.write_value(&mut out, v);
        out
    }

    fn write_value(&self, out: &mut String, v: &Value) {
        if self.sugar {
            match v.is_bit() {
                Some(true) => return out.push_str("tt"),
                Some(false) => return out.push_str("ff"),
                None => {}
            }
        }
        match v {
            Value::Star => out.push('*'),
            Value::Left { left_ty, right_ty, inner } | Value::Right { left_ty, right_ty, inner } => {
                let ctor = if matches!(v, Value::Left { .. }) { "left" } else { "right" };
                let _ = write!(out, "{ctor}[{},{}]", self.ty(left_ty), self.ty(right_ty));
                self.write_arg(out, inner);
            }
            Value::Pair(a, b) => {
                out.push('(');
                self.write_value(out, a);
                out.push_str(", ");
                self.write_value(out, b);
                out.push(')');
            }
            Value::Fold { mu_ty, inner } => {
                let _ = write!(out, "fold[{}]", self.ty(mu_ty));
                self.write_arg(out, inner);
            }
            Value::Atom { ty, token } => {
                let _ = write!(out, "atom[{ty}] {token}");
            }
        }
    }

    fn write_arg(&self, out: &mut String, v: &Value) {
        let bare = matches!(v, Value::Star) || (self.sugar && v.is_bit().is_some());
        if bare {
            out.push(' ');
            self.write_value(out, v);
        } else if matches!(v, Value::Pair(..)) {
            self.write_value(out, v);
        } else {
            out.push('(');
            self.write_value(out, v);
            out.push(')');
        }
    }

    pub fn store(&self, store: &ValueAssignment) -> String {
        let mut out = String::from("{");
        for (i, (name, v)) in store.iter().enumerate() {
            if i > 0 {
                out.push_str(", ");
            }
            let _ = write!(out, "{name} = {}", self.value(v));
        }
        out.push('}');
        out
    }

    pub fn context(&self, ctx: &VarContext) -> String {
        let mut out = String::from("{");
        for (i, (name, ty)) in ctx.iter().enumerate() {
            if i > 0 {
                out.push_str(", ");
            }
            let _ = write!(out, "{name} : {}", self.ty(ty));
        }
        out.push('}');
        out
    }

    // -----------------------------------------------------------------------
    // Terms
    // -----------------------------------------------------------------------

    /// Multi-line layout, two-space indentation.
    pub fn term(&self, t: &Term) -> String {
        let mut out = String::new();
        self.write_term(&mut out, t, Some(0));
        out
    }

    /// Single-line layout, as used in traces.
    pub fn term_inline(&self, t: &Term) -> String {
        let mut out = String::new();
        self.write_term(&mut out, t, None);
        out
    }

    fn newline(out: &mut String, indent: Option<usize>) {
        match indent {
            Some(n) => {
                out.push('\n');
                out.push_str(&"  ".repeat(n));
            }
            None => out.push(' '),
        }
    }

    fn write_block(&self, out: &mut String, t: &Term, indent: Option<usize>) {
        out.push('{');
        let inner = indent.map(|n| n + 1);
        Self::newline(out, inner);
        self.write_term(out, t, inner);
        Self::newline(out, indent);
        out.push('}');
    }

    fn write_term(&self, out: &mut String, t: &Term, indent: Option<usize>) {
        match t {
            Term::NewUnit { var, .. } => {
                let _ = write!(out, "new unit {var}");
            }
            Term::Discard { var, .. } => {
                let _ = write!(out, "discard {var}");
            }
            Term::Skip => out.push_str("skip"),
            Term::Seq(first, second) => {
                if matches!(**first, Term::Seq(..)) {
                    self.write_block(out, first, indent);
                } else {
                    self.write_term(out, first, indent);
                }
                out.push(';');
                Self::newline(out, indent);
                self.write_term(out, second, indent);
            }
            Term::While { guard, body, .. } => {
                let _ = write!(out, "while {guard} do ");
                self.write_block(out, body, indent);
            }
            Term::Left { dst, left_ty, right_ty, src, .. } => {
                let _ = write!(out, "{dst} = left[{},{}] {src}", self.ty(left_ty), self.ty(right_ty));
            }
            Term::Right { dst, left_ty, right_ty, src, .. } => {
                let _ = write!(out, "{dst} = right[{},{}] {src}", self.ty(left_ty), self.ty(right_ty));
            }
            Term::Case { scrutinee, left_var, left_body, right_var, right_body, .. } => {
                let arm = indent.map(|n| n + 1);
                let body = indent.map(|n| n + 2);
                let _ = write!(out, "case {scrutinee} of {{");
                Self::newline(out, arm);
                let _ = write!(out, "left {left_var} ->");
                Self::newline(out, body);
                self.write_term(out, left_body, body);
                Self::newline(out, arm);
                let _ = write!(out, "| right {right_var} ->");
                Self::newline(out, body);
                self.write_term(out, right_body, body);
                Self::newline(out, indent);
                out.push('}');
            }
            Term::Pair { dst, fst, snd, .. } => {
                let _ = write!(out, "{dst} = ({fst}, {snd})");
            }
            Term::Unpair { fst, snd, src, .. } => {
                let _ = write!(out, "({fst}, {snd}) = {src}");
            }
            Term::Fold { dst, mu_ty, src, .. } => {
                let _ = write!(out, "{dst} = fold[{}] {src}", self.ty(mu_ty));
            }
            Term::Unfold { dst, src, .. } => {
                let _ = write!(out, "{dst} = unfold {src}");
            }
        }
    }

    // -----------------------------------------------------------------------
    // Programs
    // -----------------------------------------------------------------------

    pub fn program(&self, p: &SourceProgram) -> String {
        let mut out = String::new();
        let mut defs = Printer { abbrevs: Vec::new(), sugar: self.sugar };
        for a in &p.abbreviations {
            let _ = write!(out, "type {}", a.name);
            if !a.params.is_empty() {
                let _ = write!(out, "({})", a.params.join(", "));
            }
            let mut scope = a.params.clone();
            let mut body = String::new();
            defs.write_ty(&mut body, &a.body, 0, false, &mut scope);
            let _ = writeln!(out, " = {body};");
            if a.params.is_empty() && self.abbrevs.iter().any(|(n, _)| n == &a.name) {
                defs.abbrevs.push((a.name.clone(), a.body.clone()));
            }
        }
        for input in &p.inputs {
            let _ = write!(out, "input {} : {}", input.name, self.ty(&input.ty));
            if let Some(v) = &input.value {
                let _ = write!(out, " = {}", self.value(v));
            }
            out.push_str(";\n");
        }
        out.push_str(&self.term(&p.term));
        out.push('\n');
        out
    }
}

impl fmt::Display for Type {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&Printer::plain().ty(self))
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&Printer::plain().term_inline(self))
    }
}

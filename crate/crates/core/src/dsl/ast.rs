use std::fmt;

use crate::algebra::{fmt_q_abs, Q};

use super::Pos;

#[derive(Clone, Debug)]
pub struct Expr {
    pub kind: ExprKind,
    pub pos: Pos,
}

/// Expression nodes. Identifiers are resolved during elaboration.
#[derive(Clone, Debug, PartialEq)]
pub enum ExprKind {
    /// Nonnegative literal.
    Number(Q),
    Hbar,
    Ident(String),
    /// `d(e, var, k)`
    Derivative(Box<Expr>, String, u32),
    /// `inv(e)`
    Inv(Box<Expr>),
    Neg(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    /// Star product, operand order preserved.
    Mul(Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, i32),
}

/// Equality ignores source positions.
impl PartialEq for Expr {
    fn eq(&self, other: &Self) -> bool {
        self.kind == other.kind
    }
}

impl Expr {
    pub fn new(kind: ExprKind, pos: Pos) -> Self {
        Expr { kind, pos }
    }

    fn level(&self) -> u8 {
        match &self.kind {
            ExprKind::Add(..) | ExprKind::Sub(..) => 0,
            ExprKind::Mul(..) => 1,
            ExprKind::Neg(..) => 2,
            ExprKind::Pow(..) => 3,
            _ => 4,
        }
    }

    fn write_at(&self, f: &mut fmt::Formatter<'_>, min: u8) -> fmt::Result {
        if self.level() < min {
            write!(f, "(")?;
            self.write_at(f, 0)?;
            return write!(f, ")");
        }
        match &self.kind {
            ExprKind::Number(q) => write!(f, "{}", fmt_q_abs(q)),
            ExprKind::Hbar => write!(f, "hbar"),
            ExprKind::Ident(name) => write!(f, "{name}"),
            ExprKind::Derivative(e, var, k) => {
                write!(f, "d(")?;
                e.write_at(f, 0)?;
                write!(f, ", {var}, {k})")
            }
            ExprKind::Inv(e) => {
                write!(f, "inv(")?;
                e.write_at(f, 0)?;
                write!(f, ")")
            }
            ExprKind::Neg(e) => {
                write!(f, "-")?;
                e.write_at(f, 2)
            }
            ExprKind::Add(a, b) | ExprKind::Sub(a, b) => {
                a.write_at(f, 0)?;
                write!(f, "{}", if matches!(self.kind, ExprKind::Add(..)) { " + " } else { " - " })?;
                b.write_at(f, 1)
            }
            ExprKind::Mul(a, b) => {
                a.write_at(f, 1)?;
                write!(f, " * ")?;
                b.write_at(f, 2)
            }
            ExprKind::Pow(e, n) => {
                e.write_at(f, 4)?;
                write!(f, "^{n}")
            }
        }
    }

    /// Identifiers referenced anywhere in the expression, with positions.
    pub fn identifiers(&self) -> Vec<(&str, Pos)> {
        let mut out = Vec::new();
        self.collect_identifiers(&mut out);
        out
    }

    fn collect_identifiers<'a>(&'a self, out: &mut Vec<(&'a str, Pos)>) {
        match &self.kind {
            ExprKind::Ident(n) => out.push((n, self.pos)),
            ExprKind::Derivative(e, var, _) => {
                e.collect_identifiers(out);
                out.push((var, self.pos));
            }
            ExprKind::Inv(e) | ExprKind::Neg(e) | ExprKind::Pow(e, _) => e.collect_identifiers(out),
            ExprKind::Add(a, b) | ExprKind::Sub(a, b) | ExprKind::Mul(a, b) => {
                a.collect_identifiers(out);
                b.collect_identifiers(out);
            }
            ExprKind::Number(_) | ExprKind::Hbar => {}
        }
    }
}

/// Prints with the minimal parentheses that reparse to the same tree.
impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.write_at(f, 0)
    }
}

use num_bigint::BigInt;

use crate::algebra::Q;

use super::ast::{Expr, ExprKind};
use super::lexer::{lex, Tok, Token};
use super::{DslError, ErrorKind, Pos};

/// Parses one expression whose first character sits at `origin`.
pub fn parse_expr(src: &str, origin: Pos) -> Result<Expr, DslError> {
    let tokens = lex(src, origin)?;
    let end = Pos {
        line: origin.line,
        col: origin.col + src.chars().count(),
    };
    let mut p = Parser {
        tokens,
        at: 0,
        end,
    };
    let e = p.sum()?;
    if let Some(t) = p.peek() {
        return Err(DslError::new(
            ErrorKind::Syntax,
            t.pos,
            format!("unexpected {}", describe(&t.tok)),
        ));
    }
    Ok(e)
}

fn describe(t: &Tok) -> String {
    match t {
        Tok::Number(n, 1) => format!("number `{n}`"),
        Tok::Number(n, d) => format!("number `{n}/{d}`"),
        Tok::Ident(s) => format!("`{s}`"),
        Tok::Plus => "`+`".into(),
        Tok::Minus => "`-`".into(),
        Tok::Star => "`*`".into(),
        Tok::Caret => "`^`".into(),
        Tok::Comma => "`,`".into(),
        Tok::LParen => "`(`".into(),
        Tok::RParen => "`)`".into(),
    }
}

struct Parser {
    tokens: Vec<Token>,
    at: usize,
    end: Pos,
}

impl Parser {
    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.at)
    }

    fn here(&self) -> Pos {
        self.peek().map_or(self.end, |t| t.pos)
    }

    fn eat(&mut self, tok: &Tok) -> bool {
        if self.peek().is_some_and(|t| &t.tok == tok) {
            self.at += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, tok: &Tok) -> Result<Pos, DslError> {
        let pos = self.here();
        if self.eat(tok) {
            return Ok(pos);
        }
        let found = self
            .peek()
            .map_or("end of expression".to_string(), |t| describe(&t.tok));
        Err(DslError::new(
            ErrorKind::Syntax,
            pos,
            format!("expected {}, found {found}", describe(tok)),
        ))
    }

    fn sum(&mut self) -> Result<Expr, DslError> {
        let mut lhs = self.product()?;
        loop {
            let pos = self.here();
            let ctor: fn(Box<Expr>, Box<Expr>) -> ExprKind = if self.eat(&Tok::Plus) {
                ExprKind::Add
            } else if self.eat(&Tok::Minus) {
                ExprKind::Sub
            } else {
                return Ok(lhs);
            };
            let rhs = self.product()?;
            lhs = Expr::new(ctor(Box::new(lhs), Box::new(rhs)), pos);
        }
    }

    fn product(&mut self) -> Result<Expr, DslError> {
        let mut lhs = self.unary()?;
        loop {
            let pos = self.here();
            if !self.eat(&Tok::Star) {
                return Ok(lhs);
            }
            let rhs = self.unary()?;
            lhs = Expr::new(ExprKind::Mul(Box::new(lhs), Box::new(rhs)), pos);
        }
    }

    fn unary(&mut self) -> Result<Expr, DslError> {
        let pos = self.here();
        if self.eat(&Tok::Minus) {
            let e = self.unary()?;
            return Ok(Expr::new(ExprKind::Neg(Box::new(e)), pos));
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expr, DslError> {
        let base = self.primary()?;
        let pos = self.here();
        if !self.eat(&Tok::Caret) {
            return Ok(base);
        }
        let negative = self.eat(&Tok::Minus);
        let n = self.integer()?;
        let n = i32::try_from(n)
            .map_err(|_| DslError::new(ErrorKind::Syntax, pos, "exponent out of range"))?;
        let n = if negative { -n } else { n };
        Ok(Expr::new(ExprKind::Pow(Box::new(base), n), pos))
    }

    fn integer(&mut self) -> Result<u64, DslError> {
        let pos = self.here();
        match self.peek().map(|t| t.tok.clone()) {
            Some(Tok::Number(n, 1)) => {
                self.at += 1;
                Ok(n)
            }
            _ => Err(DslError::new(ErrorKind::Syntax, pos, "expected an integer")),
        }
    }

    fn primary(&mut self) -> Result<Expr, DslError> {
        let pos = self.here();
        let Some(tok) = self.peek().map(|t| t.tok.clone()) else {
            return Err(DslError::new(ErrorKind::Syntax, pos, "unexpected end of expression"));
        };
        self.at += 1;
        match tok {
            Tok::Number(n, d) => Ok(Expr::new(
                ExprKind::Number(Q::new(BigInt::from(n), BigInt::from(d))),
                pos,
            )),
            Tok::LParen => {
                let e = self.sum()?;
                self.expect(&Tok::RParen)?;
                Ok(e)
            }
            Tok::Ident(name) => match name.as_str() {
                "hbar" => Ok(Expr::new(ExprKind::Hbar, pos)),
                "inv" => {
                    self.expect(&Tok::LParen)?;
                    let e = self.sum()?;
                    self.expect(&Tok::RParen)?;
                    Ok(Expr::new(ExprKind::Inv(Box::new(e)), pos))
                }
                "d" => {
                    self.expect(&Tok::LParen)?;
                    let e = self.sum()?;
                    self.expect(&Tok::Comma)?;
                    let vpos = self.here();
                    let var = match self.peek().map(|t| t.tok.clone()) {
                        Some(Tok::Ident(v)) if !super::KEYWORDS.contains(&v.as_str()) => {
                            self.at += 1;
                            v
                        }
                        _ => {
                            return Err(DslError::new(
                                ErrorKind::Syntax,
                                vpos,
                                "expected a coordinate name",
                            ))
                        }
                    };
                    self.expect(&Tok::Comma)?;
                    let kpos = self.here();
                    let k = self.integer()?;
                    let k = u32::try_from(k)
                        .ok()
                        .filter(|k| *k >= 1)
                        .ok_or_else(|| {
                            DslError::new(ErrorKind::Syntax, kpos, "derivative order must be a positive integer")
                        })?;
                    self.expect(&Tok::RParen)?;
                    Ok(Expr::new(ExprKind::Derivative(Box::new(e), var, k), pos))
                }
                _ => Ok(Expr::new(ExprKind::Ident(name), pos)),
            },
            other => Err(DslError::new(
                ErrorKind::Syntax,
                pos,
                format!("unexpected {}", describe(&other)),
            )),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(s: &str) -> Expr {
        parse_expr(s, Pos { line: 1, col: 1 }).unwrap()
    }

    #[test]
    fn precedence() {
        assert_eq!(p("-x^2").to_string(), "-x^2");
        assert!(matches!(p("-x^2").kind, ExprKind::Neg(_)));
        assert!(matches!(p("-a * b").kind, ExprKind::Mul(..)));
        assert!(matches!(p("a - b * c").kind, ExprKind::Sub(..)));
        assert_eq!(p("a - (b - c)").to_string(), "a - (b - c)");
        assert_eq!(p("(a - b) - c").to_string(), "a - b - c");
        assert_eq!(p("a * (b * c)").to_string(), "a * (b * c)");
        assert_eq!(p("(-a)^2").to_string(), "(-a)^2");
        assert_eq!(p("f^-1 * 1/2").to_string(), "f^-1 * 1/2");
    }

    #[test]
    fn derivative_and_inverse() {
        let e = p("d(f * g, t2, 2) + inv(1 + hbar)");
        assert_eq!(e.to_string(), "d(f * g, t2, 2) + inv(1 + hbar)");
        assert_eq!(p(&e.to_string()), e);
    }

    #[test]
    fn errors_carry_position() {
        let err = parse_expr("f + * g", Pos { line: 4, col: 10 }).unwrap_err();
        assert_eq!(err.kind, ErrorKind::Syntax);
        assert_eq!(err.pos, Pos { line: 4, col: 14 });
        let err = parse_expr("d(f, t2, 0)", Pos { line: 1, col: 1 }).unwrap_err();
        assert_eq!(err.pos.col, 10);
        let err = parse_expr("(f", Pos { line: 1, col: 1 }).unwrap_err();
        assert_eq!(err.pos.col, 3);
        let err = parse_expr("f $ g", Pos { line: 2, col: 1 }).unwrap_err();
        assert_eq!(err.kind, ErrorKind::Lexical);
    }
}

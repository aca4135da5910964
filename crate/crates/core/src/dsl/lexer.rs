use super::{DslError, ErrorKind, Pos};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Tok {
    /// `n` or `n/d`
    Number(u64, u64),
    Ident(String),
    Plus,
    Minus,
    Star,
    Caret,
    Comma,
    LParen,
    RParen,
}

#[derive(Clone, Debug)]
pub struct Token {
    pub tok: Tok,
    pub pos: Pos,
}

fn int(text: &str, pos: Pos) -> Result<u64, DslError> {
    text.parse()
        .map_err(|_| DslError::new(ErrorKind::Lexical, pos, format!("integer literal `{text}` out of range")))
}

/// Tokenizes one expression starting at `origin` in the file.
pub fn lex(src: &str, origin: Pos) -> Result<Vec<Token>, DslError> {
    let chars: Vec<char> = src.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let pos = Pos {
            line: origin.line,
            col: origin.col + i,
        };
        if c.is_whitespace() {
            i += 1;
            continue;
        }
        let simple = match c {
            '+' => Some(Tok::Plus),
            '-' => Some(Tok::Minus),
            '*' => Some(Tok::Star),
            '^' => Some(Tok::Caret),
            ',' => Some(Tok::Comma),
            '(' => Some(Tok::LParen),
            ')' => Some(Tok::RParen),
            _ => None,
        };
        if let Some(tok) = simple {
            out.push(Token { tok, pos });
            i += 1;
            continue;
        }
        if c.is_ascii_digit() {
            let start = i;
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
            }
            let num = int(&chars[start..i].iter().collect::<String>(), pos)?;
            let mut den = 1;
            if i < chars.len() && chars[i] == '/' {
                i += 1;
                let ds = i;
                while i < chars.len() && chars[i].is_ascii_digit() {
                    i += 1;
                }
                if ds == i {
                    return Err(DslError::new(ErrorKind::Lexical, pos, "expected denominator after `/`"));
                }
                den = int(&chars[ds..i].iter().collect::<String>(), pos)?;
                if den == 0 {
                    return Err(DslError::new(ErrorKind::Lexical, pos, "zero denominator in literal"));
                }
            }
            out.push(Token {
                tok: Tok::Number(num, den),
                pos,
            });
            continue;
        }
        if c.is_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len() && (chars[i].is_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            out.push(Token {
                tok: Tok::Ident(chars[start..i].iter().collect()),
                pos,
            });
            continue;
        }
        return Err(DslError::new(ErrorKind::Lexical, pos, format!("unexpected character `{c}`")));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tokens_and_columns() {
        let toks = lex("3/4*f_1^-2", Pos { line: 2, col: 5 }).unwrap();
        let kinds: Vec<Tok> = toks.iter().map(|t| t.tok.clone()).collect();
        assert_eq!(
            kinds,
            [Tok::Number(3, 4), Tok::Star, Tok::Ident("f_1".into()), Tok::Caret, Tok::Minus, Tok::Number(2, 1)]
        );
        let cols: Vec<usize> = toks.iter().map(|t| t.pos.col).collect();
        assert_eq!(cols, [5, 8, 9, 12, 13, 14]);
    }

    #[test]
    fn lexical_errors() {
        let origin = Pos { line: 1, col: 1 };
        for src in ["1/0", "2/", "x $ y", "99999999999999999999999"] {
            assert_eq!(lex(src, origin).unwrap_err().kind, ErrorKind::Lexical, "{src}");
        }
    }
}

//! Recursive-descent parser for the surface expression language.
//!
//! ```text
//! expr     := term (('+' | '-') term)*
//! term     := unary (('*' | '/') unary)*
//! unary    := ('-' | '+') unary | power
//! power    := primary ('^' exponent)?
//! exponent := ('-' | '+')? INTEGER ('^' exponent)?
//! primary  := NUMBER | 'u' | 'v' | 'pi' | FUNC '(' expr ')' | '(' expr ')'
//! ```

use thiserror::Error;

use super::ast::{Expr, Func};

#[derive(Clone, Debug, Error, PartialEq)]
pub enum ParseError {
    #[error("unexpected {found} at byte {offset}, expected {}", expected.join(" or "))]
    Syntax {
        offset: usize,
        found: String,
        expected: Vec<String>,
    },
    #[error("unknown identifier `{name}` at byte {offset}")]
    UnknownIdentifier { name: String, offset: usize },
}

impl ParseError {
    pub fn offset(&self) -> usize {
        match self {
            ParseError::Syntax { offset, .. } | ParseError::UnknownIdentifier { offset, .. } => {
                *offset
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
enum Tok<'a> {
    Num(&'a str),
    Ident(&'a str),
    Op(char),
    End,
}

impl Tok<'_> {
    fn describe(&self) -> String {
        match self {
            Tok::Num(s) => format!("number `{s}`"),
            Tok::Ident(s) => format!("identifier `{s}`"),
            Tok::Op(c) => format!("`{c}`"),
            Tok::End => "end of input".to_string(),
        }
    }
}

struct Lexer<'a> {
    src: &'a str,
    pos: usize,
}

impl<'a> Lexer<'a> {
    fn skip_ws(&mut self) {
        let rest = &self.src[self.pos..];
        let trimmed = rest.trim_start();
        self.pos += rest.len() - trimmed.len();
    }

    /// Returns the next token and its byte offset.
    fn next(&mut self) -> Result<(Tok<'a>, usize), ParseError> {
        self.skip_ws();
        let start = self.pos;
        let bytes = self.src.as_bytes();
        let Some(&c) = bytes.get(start) else {
            return Ok((Tok::End, start));
        };
        if c.is_ascii_digit() || c == b'.' {
            let mut end = start;
            while end < bytes.len() && bytes[end].is_ascii_digit() {
                end += 1;
            }
            if end < bytes.len() && bytes[end] == b'.' {
                end += 1;
                while end < bytes.len() && bytes[end].is_ascii_digit() {
                    end += 1;
                }
            }
            let mantissa = &self.src[start..end];
            if mantissa == "." {
                return Err(ParseError::Syntax {
                    offset: start,
                    found: "`.`".into(),
                    expected: vec!["number".into()],
                });
            }
            if end < bytes.len() && (bytes[end] == b'e' || bytes[end] == b'E') {
                let mut k = end + 1;
                if k < bytes.len() && (bytes[k] == b'+' || bytes[k] == b'-') {
                    k += 1;
                }
                let digits_start = k;
                while k < bytes.len() && bytes[k].is_ascii_digit() {
                    k += 1;
                }
                if k == digits_start {
                    return Err(ParseError::Syntax {
                        offset: k,
                        found: describe_at(self.src, k),
                        expected: vec!["exponent digits".into()],
                    });
                }
                end = k;
            }
            self.pos = end;
            return Ok((Tok::Num(&self.src[start..end]), start));
        }
        if c.is_ascii_alphabetic() || c == b'_' {
            let mut end = start;
            while end < bytes.len() && (bytes[end].is_ascii_alphanumeric() || bytes[end] == b'_') {
                end += 1;
            }
            self.pos = end;
            return Ok((Tok::Ident(&self.src[start..end]), start));
        }
        if b"+-*/^()".contains(&c) {
            self.pos += 1;
            return Ok((Tok::Op(c as char), start));
        }
        Err(ParseError::Syntax {
            offset: start,
            found: describe_at(self.src, start),
            expected: vec!["number".into(), "identifier".into(), "operator".into()],
        })
    }
}

fn describe_at(src: &str, offset: usize) -> String {
    match src[offset..].chars().next() {
        Some(ch) => format!("`{ch}`"),
        None => "end of input".into(),
    }
}

struct Parser<'a> {
    lexer: Lexer<'a>,
    tok: Tok<'a>,
    at: usize,
}

impl<'a> Parser<'a> {
    fn new(src: &'a str) -> Result<Self, ParseError> {
        let mut lexer = Lexer { src, pos: 0 };
        let (tok, at) = lexer.next()?;
        Ok(Parser { lexer, tok, at })
    }

    fn bump(&mut self) -> Result<(), ParseError> {
        let (tok, at) = self.lexer.next()?;
        self.tok = tok;
        self.at = at;
        Ok(())
    }

    fn unexpected(&self, expected: &[&str]) -> ParseError {
        ParseError::Syntax {
            offset: self.at,
            found: self.tok.describe(),
            expected: expected.iter().map(|s| s.to_string()).collect(),
        }
    }

    fn expect_op(&mut self, op: char) -> Result<(), ParseError> {
        if self.tok == Tok::Op(op) {
            self.bump()
        } else {
            Err(self.unexpected(&[&format!("`{op}`")]))
        }
    }

    fn expr(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.term()?;
        loop {
            match self.tok {
                Tok::Op('+') => {
                    self.bump()?;
                    lhs = Expr::add(lhs, self.term()?);
                }
                Tok::Op('-') => {
                    self.bump()?;
                    lhs = Expr::sub(lhs, self.term()?);
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn term(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.unary()?;
        loop {
            match self.tok {
                Tok::Op('*') => {
                    self.bump()?;
                    lhs = Expr::mul(lhs, self.unary()?);
                }
                Tok::Op('/') => {
                    self.bump()?;
                    lhs = Expr::div(lhs, self.unary()?);
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn unary(&mut self) -> Result<Expr, ParseError> {
        match self.tok {
            Tok::Op('-') => {
                self.bump()?;
                Ok(Expr::neg(self.unary()?))
            }
            Tok::Op('+') => {
                self.bump()?;
                self.unary()
            }
            _ => self.power(),
        }
    }

    fn power(&mut self) -> Result<Expr, ParseError> {
        let base = self.primary()?;
        if self.tok == Tok::Op('^') {
            self.bump()?;
            let n = self.exponent()?;
            Ok(Expr::pow(base, n))
        } else {
            Ok(base)
        }
    }

    fn exponent(&mut self) -> Result<i32, ParseError> {
        let mut sign = 1i64;
        match self.tok {
            Tok::Op('-') => {
                sign = -1;
                self.bump()?;
            }
            Tok::Op('+') => self.bump()?,
            _ => {}
        }
        let at = self.at;
        let n: i64 = match self.tok {
            Tok::Num(s) if s.bytes().all(|b| b.is_ascii_digit()) => s
                .parse()
                .map_err(|_| self.unexpected(&["integer exponent"]))?,
            _ => return Err(self.unexpected(&["integer exponent"])),
        };
        self.bump()?;
        let mut value = sign * n;
        if self.tok == Tok::Op('^') {
            self.bump()?;
            let inner = self.exponent()?;
            value = if inner < 0 {
                return Err(ParseError::Syntax {
                    offset: at,
                    found: "negative nested exponent".into(),
                    expected: vec!["integer exponent".into()],
                });
            } else {
                value.checked_pow(inner as u32).unwrap_or(i64::MAX)
            };
        }
        i32::try_from(value).map_err(|_| ParseError::Syntax {
            offset: at,
            found: "exponent out of range".into(),
            expected: vec!["integer exponent".into()],
        })
    }

    fn primary(&mut self) -> Result<Expr, ParseError> {
        match self.tok.clone() {
            Tok::Num(s) => {
                let x: f64 = s.parse().map_err(|_| self.unexpected(&["number"]))?;
                self.bump()?;
                Ok(Expr::Num(x))
            }
            Tok::Ident(name) => {
                let at = self.at;
                self.bump()?;
                match name {
                    "u" => Ok(Expr::U),
                    "v" => Ok(Expr::V),
                    "pi" => Ok(Expr::Pi),
                    _ => match Func::from_name(name) {
                        Some(func) => {
                            self.expect_op('(')?;
                            let arg = self.expr()?;
                            self.expect_op(')')?;
                            Ok(Expr::call(func, arg))
                        }
                        None => Err(ParseError::UnknownIdentifier {
                            name: name.to_string(),
                            offset: at,
                        }),
                    },
                }
            }
            Tok::Op('(') => {
                self.bump()?;
                let e = self.expr()?;
                self.expect_op(')')?;
                Ok(e)
            }
            _ => Err(self.unexpected(&["number", "identifier", "`(`", "`-`"])),
        }
    }
}

/// Parses an expression over `u`, `v` and `pi`.
pub fn parse_expr(source: &str) -> Result<Expr, ParseError> {
    let mut p = Parser::new(source)?;
    let e = p.expr()?;
    if p.tok != Tok::End {
        return Err(p.unexpected(&["operator", "end of input"]));
    }
    Ok(e)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn simple_call() {
        assert_eq!(
            parse_expr("sin(u)").unwrap(),
            Expr::call(Func::Sin, Expr::U)
        );
    }

    #[test]
    fn product_of_calls() {
        assert_eq!(
            parse_expr("cos(u)*sin(v)").unwrap(),
            Expr::mul(
                Expr::call(Func::Cos, Expr::U),
                Expr::call(Func::Sin, Expr::V)
            )
        );
    }

    #[test]
    fn precedence() {
        assert_eq!(
            parse_expr("2*u^3 - v").unwrap(),
            Expr::sub(Expr::mul(Expr::num(2.0), Expr::pow(Expr::U, 3)), Expr::V)
        );
        assert_eq!(
            parse_expr("-u*v").unwrap(),
            Expr::mul(Expr::neg(Expr::U), Expr::V)
        );
        assert_eq!(
            parse_expr("-u^2").unwrap(),
            Expr::neg(Expr::pow(Expr::U, 2))
        );
        assert_eq!(parse_expr("u^2^3").unwrap(), Expr::pow(Expr::U, 8));
        assert_eq!(parse_expr("u^-2").unwrap(), Expr::pow(Expr::U, -2));
        assert_eq!(
            parse_expr("u - v - 1").unwrap(),
            Expr::sub(Expr::sub(Expr::U, Expr::V), Expr::num(1.0))
        );
    }

    #[test]
    fn whitespace_insensitive() {
        assert_eq!(
            parse_expr(" cos( u ) *\tsin(v) ").unwrap(),
            parse_expr("cos(u)*sin(v)").unwrap()
        );
    }

    #[test]
    fn literals() {
        assert_eq!(parse_expr("1.5e-3").unwrap(), Expr::num(1.5e-3));
        assert_eq!(parse_expr(".25").unwrap(), Expr::num(0.25));
        assert_eq!(parse_expr("2.").unwrap(), Expr::num(2.0));
    }

    #[test]
    fn errors_carry_offsets() {
        match parse_expr("sin(u) + ").unwrap_err() {
            ParseError::Syntax {
                offset, expected, ..
            } => {
                assert_eq!(offset, 9);
                assert!(expected.iter().any(|e| e == "number"));
            }
            e => panic!("unexpected {e:?}"),
        }
        assert_eq!(
            parse_expr("2*w").unwrap_err(),
            ParseError::UnknownIdentifier {
                name: "w".into(),
                offset: 2
            }
        );
        assert_eq!(parse_expr("u^2.5").unwrap_err().offset(), 2);
        assert_eq!(parse_expr("(u").unwrap_err().offset(), 2);
        assert_eq!(parse_expr("u $ v").unwrap_err().offset(), 2);
        assert!(parse_expr("").is_err());
        assert!(parse_expr("sin u").is_err());
        assert!(parse_expr("u v").is_err());
    }
}

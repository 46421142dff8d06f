//! Recursive-descent parser for the expression grammar:
//!
//! ```text
//! expr    = term { ("+" | "-") term } ;
//! term    = unary { ("*" | "/") unary } ;
//! unary   = "-" unary | power ;
//! power   = primary [ "^" exponent ] ;
//! exponent= [ "-" ] integer | "(" [ "-" ] integer ")" ;
//! primary = number [ "i" ] | "i" | "z" | ("exp" | "log") "(" expr ")" | "(" expr ")" ;
//! number  = digits [ "." digits ] [ ("e" | "E") [ "+" | "-" ] digits ] | "." digits ... ;
//! ```
//!
//! A number written directly against `i` (`0.5i`) is an imaginary literal.

use num_complex::Complex64;
use thiserror::Error;

use super::ast::{Expr, Node, MAX_EXPONENT};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ParseError {
    #[error("empty expression")]
    Empty,
    #[error("syntax error at offset {offset}: expected {}, found {found}", expected.join(" or "))]
    Syntax {
        offset: usize,
        expected: Vec<&'static str>,
        found: String,
    },
    #[error("exponent {value} at offset {offset} outside [-{MAX_EXPONENT}, {MAX_EXPONENT}]")]
    ExponentRange { offset: usize, value: i64 },
}

impl ParseError {
    pub fn offset(&self) -> Option<usize> {
        match self {
            ParseError::Empty => None,
            ParseError::Syntax { offset, .. } | ParseError::ExponentRange { offset, .. } => Some(*offset),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num {
        value: f64,
        imag: bool,
        integer: Option<i64>,
    },
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
    End,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Num { .. } => "number".into(),
            Tok::Ident(s) => format!("'{s}'"),
            Tok::Plus => "'+'".into(),
            Tok::Minus => "'-'".into(),
            Tok::Star => "'*'".into(),
            Tok::Slash => "'/'".into(),
            Tok::Caret => "'^'".into(),
            Tok::LParen => "'('".into(),
            Tok::RParen => "')'".into(),
            Tok::End => "end of input".into(),
        }
    }
}

fn lex(src: &str) -> Result<Vec<(Tok, usize)>, ParseError> {
    let bytes = src.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        let start = i;
        match c {
            b' ' | b'\t' | b'\n' | b'\r' => {
                i += 1;
                continue;
            }
            b'+' => out.push((Tok::Plus, start)),
            b'-' => out.push((Tok::Minus, start)),
            b'*' => out.push((Tok::Star, start)),
            b'/' => out.push((Tok::Slash, start)),
            b'^' => out.push((Tok::Caret, start)),
            b'(' => out.push((Tok::LParen, start)),
            b')' => out.push((Tok::RParen, start)),
            b'0'..=b'9' | b'.' => {
                while i < bytes.len() && bytes[i].is_ascii_digit() {
                    i += 1;
                }
                let mut is_int = true;
                if i < bytes.len() && bytes[i] == b'.' {
                    is_int = false;
                    i += 1;
                    while i < bytes.len() && bytes[i].is_ascii_digit() {
                        i += 1;
                    }
                }
                if i < bytes.len() && (bytes[i] == b'e' || bytes[i] == b'E') {
                    let mut j = i + 1;
                    if j < bytes.len() && (bytes[j] == b'+' || bytes[j] == b'-') {
                        j += 1;
                    }
                    if j < bytes.len() && bytes[j].is_ascii_digit() {
                        is_int = false;
                        while j < bytes.len() && bytes[j].is_ascii_digit() {
                            j += 1;
                        }
                        i = j;
                    }
                }
                let text = &src[start..i];
                let value: f64 = text.parse().map_err(|_| ParseError::Syntax {
                    offset: start,
                    expected: vec!["number"],
                    found: format!("'{text}'"),
                })?;
                let integer = if is_int { text.parse::<i64>().ok() } else { None };
                // An `i` glued to the number, not starting a longer identifier.
                let imag =
                    i < bytes.len() && bytes[i] == b'i' && !bytes.get(i + 1).is_some_and(|b| b.is_ascii_alphanumeric());
                if imag {
                    i += 1;
                }
                out.push((
                    Tok::Num {
                        value,
                        imag,
                        integer: if imag { None } else { integer },
                    },
                    start,
                ));
                continue;
            }
            c if c.is_ascii_alphabetic() => {
                while i < bytes.len() && bytes[i].is_ascii_alphanumeric() {
                    i += 1;
                }
                out.push((Tok::Ident(src[start..i].to_string()), start));
                continue;
            }
            _ => {
                let ch = src[start..].chars().next().unwrap_or('?');
                return Err(ParseError::Syntax {
                    offset: start,
                    expected: vec!["number", "'z'", "'i'", "operator", "'('"],
                    found: format!("'{ch}'"),
                });
            }
        }
        i += 1;
    }
    out.push((Tok::End, src.len()));
    Ok(out)
}

struct Parser {
    toks: Vec<(Tok, usize)>,
    at: usize,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.at].0
    }

    fn offset(&self) -> usize {
        self.toks[self.at].1
    }

    fn bump(&mut self) -> (Tok, usize) {
        let t = self.toks[self.at].clone();
        if self.at + 1 < self.toks.len() {
            self.at += 1;
        }
        t
    }

    fn fail<T>(&self, expected: Vec<&'static str>) -> Result<T, ParseError> {
        Err(ParseError::Syntax {
            offset: self.offset(),
            expected,
            found: self.peek().describe(),
        })
    }

    fn expr(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.term()?;
        loop {
            let pos = self.offset();
            let node = match self.peek() {
                Tok::Plus => Node::Add as fn(Box<Expr>, Box<Expr>) -> Node,
                Tok::Minus => Node::Sub,
                _ => return Ok(lhs),
            };
            self.bump();
            let rhs = self.term()?;
            lhs = Expr::new(node(Box::new(lhs), Box::new(rhs)), pos);
        }
    }

    fn term(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.unary()?;
        loop {
            let pos = self.offset();
            let node = match self.peek() {
                Tok::Star => Node::Mul as fn(Box<Expr>, Box<Expr>) -> Node,
                Tok::Slash => Node::Div,
                _ => return Ok(lhs),
            };
            self.bump();
            let rhs = self.unary()?;
            lhs = Expr::new(node(Box::new(lhs), Box::new(rhs)), pos);
        }
    }

    fn unary(&mut self) -> Result<Expr, ParseError> {
        if *self.peek() == Tok::Minus {
            let (_, pos) = self.bump();
            let inner = self.unary()?;
            return Ok(Expr::new(Node::Neg(Box::new(inner)), pos));
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expr, ParseError> {
        let base = self.primary()?;
        if *self.peek() != Tok::Caret {
            return Ok(base);
        }
        let (_, pos) = self.bump();
        let exponent = self.exponent()?;
        Ok(Expr::new(Node::Pow(Box::new(base), exponent), pos))
    }

    fn signed_integer(&mut self) -> Result<i32, ParseError> {
        let start = self.offset();
        let negative = if *self.peek() == Tok::Minus {
            self.bump();
            true
        } else {
            false
        };
        match self.peek().clone() {
            Tok::Num { integer: Some(n), .. } => {
                self.bump();
                let v = if negative { -n } else { n };
                if v.abs() > MAX_EXPONENT as i64 {
                    return Err(ParseError::ExponentRange {
                        offset: start,
                        value: v,
                    });
                }
                Ok(v as i32)
            }
            _ => self.fail(vec!["integer exponent"]),
        }
    }

    fn exponent(&mut self) -> Result<i32, ParseError> {
        if *self.peek() == Tok::LParen {
            self.bump();
            let n = self.signed_integer()?;
            if *self.peek() != Tok::RParen {
                return self.fail(vec!["')'"]);
            }
            self.bump();
            Ok(n)
        } else {
            self.signed_integer()
        }
    }

    fn primary(&mut self) -> Result<Expr, ParseError> {
        let pos = self.offset();
        match self.peek().clone() {
            Tok::Num { value, imag, .. } => {
                self.bump();
                let c = if imag {
                    Complex64::new(0.0, value)
                } else {
                    Complex64::new(value, 0.0)
                };
                Ok(Expr::new(Node::Literal(c), pos))
            }
            Tok::Ident(name) => match name.as_str() {
                "z" => {
                    self.bump();
                    Ok(Expr::new(Node::Z, pos))
                }
                "i" => {
                    self.bump();
                    Ok(Expr::new(Node::I, pos))
                }
                "exp" | "log" => {
                    self.bump();
                    if *self.peek() != Tok::LParen {
                        return self.fail(vec!["'('"]);
                    }
                    self.bump();
                    let arg = self.expr()?;
                    if *self.peek() != Tok::RParen {
                        return self.fail(vec!["')'"]);
                    }
                    self.bump();
                    let node = if name == "exp" {
                        Node::Exp(Box::new(arg))
                    } else {
                        Node::Log(Box::new(arg))
                    };
                    Ok(Expr::new(node, pos))
                }
                _ => self.fail(vec!["number", "'z'", "'i'", "'exp'", "'log'", "'('"]),
            },
            Tok::LParen => {
                self.bump();
                let inner = self.expr()?;
                if *self.peek() != Tok::RParen {
                    return self.fail(vec!["')'", "operator"]);
                }
                self.bump();
                Ok(inner)
            }
            _ => self.fail(vec!["number", "'z'", "'i'", "'exp'", "'log'", "'('"]),
        }
    }
}

/// Parse `text` into an expression tree.
pub fn parse(text: &str) -> Result<Expr, ParseError> {
    if text.trim().is_empty() {
        return Err(ParseError::Empty);
    }
    let mut p = Parser {
        toks: lex(text)?,
        at: 0,
    };
    let e = p.expr()?;
    if *p.peek() != Tok::End {
        return p.fail(vec!["operator", "end of input"]);
    }
    Ok(e)
}

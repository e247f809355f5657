//! Recursive-descent parser for the expression grammar.
//!
//! ```text
//! expr   := term (('+'|'-') term)*
//! term   := factor (('*'|'/') factor)*
//! factor := NUMBER | 'x'|'y'|'z' | 'pi' | ('sin'|'cos') '(' expr ')'
//!         | '(' expr ')' | '-' factor
//! ```
//!
//! Multiplication is always explicit (`cos(2*x)`, never `cos 2x`) and
//! `NUMBER` is an unsigned decimal literal; negative constants parse as a
//! unary minus applied to a literal.

use std::f64::consts::PI;
use std::fmt;

use thiserror::Error;

use super::ast::{Axis, Expr};

/// Parse failure, carrying the byte offset into the input.
#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum ParseError {
    /// Malformed input: what was found at `offset` and which tokens would
    /// have been accepted there.
    Syntax {
        offset: usize,
        found: String,
        expected: Vec<&'static str>,
    },
    /// An identifier other than `x`, `y`, `z`, `pi`, `sin`, `cos`.
    UnknownIdentifier { offset: usize, name: String },
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ParseError::Syntax {
                offset,
                found,
                expected,
            } => write!(
                f,
                "syntax error at offset {offset}: found {found}, expected one of {}",
                expected.join(", ")
            ),
            ParseError::UnknownIdentifier { offset, name } => {
                write!(f, "unknown identifier `{name}` at offset {offset}")
            }
        }
    }
}

impl ParseError {
    pub fn offset(&self) -> usize {
        match self {
            ParseError::Syntax { offset, .. } => *offset,
            ParseError::UnknownIdentifier { offset, .. } => *offset,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Number(f64),
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    LParen,
    RParen,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Number(n) => format!("number `{n}`"),
            Tok::Ident(s) => format!("`{s}`"),
            Tok::Plus => "`+`".into(),
            Tok::Minus => "`-`".into(),
            Tok::Star => "`*`".into(),
            Tok::Slash => "`/`".into(),
            Tok::LParen => "`(`".into(),
            Tok::RParen => "`)`".into(),
        }
    }
}

fn lex(text: &str) -> Result<Vec<(usize, Tok)>, ParseError> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i] as char;
        match c {
            ' ' | '\t' | '\r' | '\n' => i += 1,
            '+' => {
                out.push((i, Tok::Plus));
                i += 1;
            }
            '-' => {
                out.push((i, Tok::Minus));
                i += 1;
            }
            '*' => {
                out.push((i, Tok::Star));
                i += 1;
            }
            '/' => {
                out.push((i, Tok::Slash));
                i += 1;
            }
            '(' => {
                out.push((i, Tok::LParen));
                i += 1;
            }
            ')' => {
                out.push((i, Tok::RParen));
                i += 1;
            }
            '0'..='9' | '.' => {
                let start = i;
                while i < bytes.len() && bytes[i].is_ascii_digit() {
                    i += 1;
                }
                if i < bytes.len() && bytes[i] == b'.' {
                    i += 1;
                    while i < bytes.len() && bytes[i].is_ascii_digit() {
                        i += 1;
                    }
                }
                let slice = &text[start..i];
                let value: f64 = slice.parse().map_err(|_| ParseError::Syntax {
                    offset: start,
                    found: format!("`{slice}`"),
                    expected: vec!["number"],
                })?;
                out.push((start, Tok::Number(value)));
            }
            'a'..='z' | 'A'..='Z' | '_' => {
                let start = i;
                while i < bytes.len()
                    && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_')
                {
                    i += 1;
                }
                out.push((start, Tok::Ident(text[start..i].to_string())));
            }
            _ => {
                return Err(ParseError::Syntax {
                    offset: i,
                    found: format!("`{c}`"),
                    expected: vec!["number", "identifier", "`(`", "`-`"],
                })
            }
        }
    }
    Ok(out)
}

struct Parser<'a> {
    toks: &'a [(usize, Tok)],
    pos: usize,
    end: usize,
}

impl<'a> Parser<'a> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(_, t)| t)
    }

    fn offset(&self) -> usize {
        self.toks.get(self.pos).map_or(self.end, |(o, _)| *o)
    }

    fn bump(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.pos).map(|(_, t)| t.clone());
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    fn err(&self, expected: Vec<&'static str>) -> ParseError {
        ParseError::Syntax {
            offset: self.offset(),
            found: self
                .peek()
                .map_or("end of input".to_string(), |t| t.describe()),
            expected,
        }
    }

    fn expect_rparen(&mut self) -> Result<(), ParseError> {
        match self.peek() {
            Some(Tok::RParen) => {
                self.pos += 1;
                Ok(())
            }
            _ => Err(self.err(vec!["`)`", "`+`", "`-`", "`*`", "`/`"])),
        }
    }

    fn expr(&mut self) -> Result<Expr, ParseError> {
        let mut acc = self.term()?;
        loop {
            match self.peek() {
                Some(Tok::Plus) => {
                    self.pos += 1;
                    acc = Expr::Add(Box::new(acc), Box::new(self.term()?));
                }
                Some(Tok::Minus) => {
                    self.pos += 1;
                    acc = Expr::Sub(Box::new(acc), Box::new(self.term()?));
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> Result<Expr, ParseError> {
        let mut acc = self.factor()?;
        loop {
            match self.peek() {
                Some(Tok::Star) => {
                    self.pos += 1;
                    acc = Expr::Mul(Box::new(acc), Box::new(self.factor()?));
                }
                Some(Tok::Slash) => {
                    self.pos += 1;
                    acc = Expr::Div(Box::new(acc), Box::new(self.factor()?));
                }
                _ => return Ok(acc),
            }
        }
    }

    fn factor(&mut self) -> Result<Expr, ParseError> {
        let offset = self.offset();
        match self.bump() {
            Some(Tok::Number(v)) => Ok(Expr::Constant(v)),
            Some(Tok::Minus) => Ok(Expr::Neg(Box::new(self.factor()?))),
            Some(Tok::LParen) => {
                let inner = self.expr()?;
                self.expect_rparen()?;
                Ok(inner)
            }
            Some(Tok::Ident(name)) => match name.as_str() {
                "x" => Ok(Expr::Variable(Axis::X)),
                "y" => Ok(Expr::Variable(Axis::Y)),
                "z" => Ok(Expr::Variable(Axis::Z)),
                "pi" => Ok(Expr::Constant(PI)),
                "sin" | "cos" => {
                    match self.peek() {
                        Some(Tok::LParen) => self.pos += 1,
                        _ => return Err(self.err(vec!["`(`"])),
                    }
                    let inner = self.expr()?;
                    self.expect_rparen()?;
                    Ok(if name == "sin" {
                        Expr::Sin(Box::new(inner))
                    } else {
                        Expr::Cos(Box::new(inner))
                    })
                }
                _ => Err(ParseError::UnknownIdentifier { offset, name }),
            },
            None => {
                self.pos = self.toks.len();
                Err(self.err(vec!["number", "`x`", "`y`", "`z`", "`sin`", "`cos`", "`(`", "`-`"]))
            }
            Some(_) => {
                self.pos -= 1;
                Err(self.err(vec!["number", "`x`", "`y`", "`z`", "`sin`", "`cos`", "`(`", "`-`"]))
            }
        }
    }
}

/// Parse an expression string into an [`Expr`].
pub fn parse(text: &str) -> Result<Expr, ParseError> {
    let toks = lex(text)?;
    let mut p = Parser {
        toks: &toks,
        pos: 0,
        end: text.len(),
    };
    let e = p.expr()?;
    if p.pos != toks.len() {
        return Err(p.err(vec!["`+`", "`-`", "`*`", "`/`", "end of input"]));
    }
    Ok(e)
}

//! Recursive-descent parser for the expression grammar:
//!
//! ```text
//! expr     := term (('+'|'-') term)*
//! term     := factor (('*'|'/') factor)*
//! factor   := '-' factor | atom ('^' nat)?
//! atom     := rational | ident | '(' expr ')'
//! rational := nat ('/' nat)?
//! ident    := letter (letter|digit|'\'')*
//! ```
//!
//! Unary minus applies to the whole factor, so `-u1^2` is `-(u1^2)`.
//! A literal `2/3` is a single rational atom, so `2/3^2` is `4/9`.

use num_bigint::BigInt;
use num_traits::{ToPrimitive, Zero};

use super::ratfn::RatFn;
use super::var::VarTable;
use super::Rational;
use crate::error::ExprError;

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Num(BigInt),
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
            Tok::Num(n) => format!("number {n}"),
            Tok::Ident(s) => format!("identifier `{s}`"),
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

fn tokenize(text: &str) -> Result<Vec<(Tok, usize)>, ExprError> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let b = bytes[i];
        let start = i;
        let tok = match b {
            b' ' | b'\t' | b'\r' | b'\n' => {
                i += 1;
                continue;
            }
            b'+' => Tok::Plus,
            b'-' => Tok::Minus,
            b'*' => Tok::Star,
            b'/' => Tok::Slash,
            b'^' => Tok::Caret,
            b'(' => Tok::LParen,
            b')' => Tok::RParen,
            b'0'..=b'9' => {
                while i < bytes.len() && bytes[i].is_ascii_digit() {
                    i += 1;
                }
                out.push((Tok::Num(text[start..i].parse().expect("digits")), start));
                continue;
            }
            c if c.is_ascii_alphabetic() => {
                while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'\'') {
                    i += 1;
                }
                out.push((Tok::Ident(text[start..i].to_string()), start));
                continue;
            }
            _ => {
                let ch = text[start..].chars().next().unwrap();
                return Err(ExprError::Syntax {
                    offset: start,
                    message: format!("unexpected character {ch:?}"),
                });
            }
        };
        out.push((tok, start));
        i += 1;
    }
    out.push((Tok::End, text.len()));
    Ok(out)
}

struct Parser<'a> {
    toks: Vec<(Tok, usize)>,
    pos: usize,
    table: &'a VarTable,
}

impl Parser<'_> {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].0
    }

    fn offset(&self) -> usize {
        self.toks[self.pos].1
    }

    fn bump(&mut self) -> (Tok, usize) {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn expr(&mut self) -> Result<RatFn, ExprError> {
        let mut acc = self.term(None)?;
        loop {
            match self.peek() {
                Tok::Plus => {
                    let (_, at) = self.bump();
                    acc = acc.add(&self.term(Some(at))?);
                }
                Tok::Minus => {
                    let (_, at) = self.bump();
                    acc = acc.sub(&self.term(Some(at))?);
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self, after_op: Option<usize>) -> Result<RatFn, ExprError> {
        let mut acc = self.factor(after_op)?;
        loop {
            match self.peek() {
                Tok::Star => {
                    let (_, at) = self.bump();
                    acc = acc.mul(&self.factor(Some(at))?);
                }
                Tok::Slash => {
                    let (_, at) = self.bump();
                    let rhs = self.factor(Some(at))?;
                    acc = acc.checked_div(&rhs)?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn factor(&mut self, after_op: Option<usize>) -> Result<RatFn, ExprError> {
        if *self.peek() == Tok::Minus {
            let (_, at) = self.bump();
            return Ok(self.factor(Some(at))?.neg());
        }
        let base = self.atom(after_op)?;
        if *self.peek() != Tok::Caret {
            return Ok(base);
        }
        let (_, caret) = self.bump();
        match self.bump() {
            (Tok::Num(n), at) => {
                let e = n.to_u32().ok_or(ExprError::ExponentTooLarge { offset: at })?;
                Ok(base.pow(e))
            }
            (Tok::Minus, at) => Err(ExprError::NegativeExponent { offset: at }),
            (t, _) => Err(ExprError::Syntax {
                offset: caret,
                message: format!("expected a natural exponent after '^', found {}", t.describe()),
            }),
        }
    }

    fn atom(&mut self, after_op: Option<usize>) -> Result<RatFn, ExprError> {
        let (tok, at) = self.bump();
        match tok {
            Tok::Num(n) => {
                if *self.peek() == Tok::Slash {
                    if let Some((Tok::Num(d), d_at)) = self.toks.get(self.pos + 1).cloned() {
                        self.bump();
                        self.bump();
                        if d.is_zero() {
                            let _ = d_at;
                            return Err(ExprError::DivisionByZero);
                        }
                        return Ok(RatFn::constant(Rational::new(n, d)));
                    }
                }
                Ok(RatFn::constant(Rational::from_integer(n)))
            }
            Tok::Ident(name) => match self.table.lookup(&name) {
                Some(v) => Ok(RatFn::var(v)),
                None => Err(ExprError::UnknownIdentifier { name, offset: at }),
            },
            Tok::LParen => {
                let inner = self.expr()?;
                match self.bump() {
                    (Tok::RParen, _) => Ok(inner),
                    (t, off) => Err(ExprError::Syntax {
                        offset: off,
                        message: format!("expected ')', found {}", t.describe()),
                    }),
                }
            }
            other => {
                // A missing operand is reported at the operator that needed it.
                let (offset, message) = match after_op {
                    Some(op) => (op, format!("operator is missing its right operand (found {})", other.describe())),
                    None => (at, format!("expected an operand, found {}", other.describe())),
                };
                Err(ExprError::Syntax { offset, message })
            }
        }
    }
}

/// Parses `text` into a normalized rational function. Identifiers must be
/// declared in `table`.
pub fn parse_expr(text: &str, table: &VarTable) -> Result<RatFn, ExprError> {
    let toks = tokenize(text)?;
    let mut p = Parser { toks, pos: 0, table };
    let value = p.expr()?;
    match p.peek() {
        Tok::End => Ok(value),
        t => Err(ExprError::Syntax {
            offset: p.offset(),
            message: format!("unexpected {}", t.describe()),
        }),
    }
}

//! Infix expression parser.
//!
//! Grammar (documented in `docs/grammar.md`): binary `+ - * / ^`, unary
//! minus, function calls `cos(..) sin(..) exp(..) log(..) tan(..) sqrt(..)`,
//! decimal literals (optional exponent part), the variable `t`, parentheses.
//! Precedence `^` > unary minus > `* /` > `+ -`; `^` is right-associative.

use super::{BinaryOp, Expr, UnaryOp};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("empty expression")]
    Empty,
    #[error("unknown identifier `{name}` at byte {offset}")]
    UnknownIdentifier { name: String, offset: usize },
    #[error("unbalanced parenthesis at byte {offset}")]
    UnbalancedParen { offset: usize },
    #[error("wrong number of arguments for `{name}` at byte {offset}")]
    ArityMismatch { name: String, offset: usize },
    #[error("unexpected `{found}` at byte {offset}")]
    UnexpectedToken { found: String, offset: usize },
    #[error("malformed number `{text}` at byte {offset}")]
    InvalidNumber { text: String, offset: usize },
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(f64),
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
    Comma,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Num(v) => format!("{v}"),
            Tok::Ident(s) => s.clone(),
            Tok::Plus => "+".into(),
            Tok::Minus => "-".into(),
            Tok::Star => "*".into(),
            Tok::Slash => "/".into(),
            Tok::Caret => "^".into(),
            Tok::LParen => "(".into(),
            Tok::RParen => ")".into(),
            Tok::Comma => ",".into(),
        }
    }
}

fn lex(text: &str) -> Result<Vec<(Tok, usize)>, ParseError> {
    let bytes = text.as_bytes();
    let mut toks = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let b = bytes[i];
        match b {
            b' ' | b'\t' | b'\n' | b'\r' => i += 1,
            b'+' => {
                toks.push((Tok::Plus, i));
                i += 1;
            }
            b'-' => {
                toks.push((Tok::Minus, i));
                i += 1;
            }
            b'*' => {
                toks.push((Tok::Star, i));
                i += 1;
            }
            b'/' => {
                toks.push((Tok::Slash, i));
                i += 1;
            }
            b'^' => {
                toks.push((Tok::Caret, i));
                i += 1;
            }
            b'(' => {
                toks.push((Tok::LParen, i));
                i += 1;
            }
            b')' => {
                toks.push((Tok::RParen, i));
                i += 1;
            }
            b',' => {
                toks.push((Tok::Comma, i));
                i += 1;
            }
            b'0'..=b'9' | b'.' => {
                let start = i;
                while i < bytes.len() && (bytes[i].is_ascii_digit() || bytes[i] == b'.') {
                    i += 1;
                }
                // optional exponent part; backtracks if no digits follow
                if i < bytes.len() && (bytes[i] == b'e' || bytes[i] == b'E') {
                    let mut j = i + 1;
                    if j < bytes.len() && (bytes[j] == b'+' || bytes[j] == b'-') {
                        j += 1;
                    }
                    if j < bytes.len() && bytes[j].is_ascii_digit() {
                        i = j;
                        while i < bytes.len() && bytes[i].is_ascii_digit() {
                            i += 1;
                        }
                    }
                }
                let slice = &text[start..i];
                let value: f64 = slice.parse().map_err(|_| ParseError::InvalidNumber {
                    text: slice.to_string(),
                    offset: start,
                })?;
                if !value.is_finite() {
                    return Err(ParseError::InvalidNumber {
                        text: slice.to_string(),
                        offset: start,
                    });
                }
                toks.push((Tok::Num(value), start));
            }
            b'a'..=b'z' | b'A'..=b'Z' | b'_' => {
                let start = i;
                while i < bytes.len()
                    && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_')
                {
                    i += 1;
                }
                toks.push((Tok::Ident(text[start..i].to_string()), start));
            }
            _ => {
                return Err(ParseError::UnexpectedToken {
                    found: (b as char).to_string(),
                    offset: i,
                })
            }
        }
    }
    Ok(toks)
}

struct Parser {
    toks: Vec<(Tok, usize)>,
    pos: usize,
    end: usize,
}

impl Parser {
    fn peek(&self) -> Option<&(Tok, usize)> {
        self.toks.get(self.pos)
    }

    fn next(&mut self) -> Option<(Tok, usize)> {
        let t = self.toks.get(self.pos).cloned();
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    fn unexpected_end(&self) -> ParseError {
        ParseError::UnexpectedToken {
            found: "end of input".into(),
            offset: self.end,
        }
    }

    /// Precedence climbing. Binding powers: `+ -` 1, `* /` 2, `^` 4.
    /// Unary minus binds at 3, between `* /` and `^`.
    fn expr(&mut self, min_bp: u8) -> Result<Expr, ParseError> {
        let mut lhs = self.atom()?;
        while let Some((tok, _)) = self.peek() {
            let (op, bp, right_assoc) = match tok {
                Tok::Plus => (BinaryOp::Add, 1, false),
                Tok::Minus => (BinaryOp::Sub, 1, false),
                Tok::Star => (BinaryOp::Mul, 2, false),
                Tok::Slash => (BinaryOp::Div, 2, false),
                Tok::Caret => (BinaryOp::Pow, 4, true),
                _ => break,
            };
            if bp < min_bp {
                break;
            }
            self.next();
            let next_min = if right_assoc { bp } else { bp + 1 };
            let rhs = self.expr(next_min)?;
            lhs = Expr::binary(op, lhs, rhs);
        }
        Ok(lhs)
    }

    fn atom(&mut self) -> Result<Expr, ParseError> {
        let (tok, offset) = self.next().ok_or_else(|| self.unexpected_end())?;
        match tok {
            Tok::Num(v) => Ok(Expr::constant(v)),
            Tok::Minus => {
                // unary minus: binds tighter than * / but looser than ^
                let operand = self.expr(4)?;
                Ok(Expr::neg(operand))
            }
            Tok::LParen => {
                let inner = self.expr(0)?;
                match self.next() {
                    Some((Tok::RParen, _)) => Ok(inner),
                    _ => Err(ParseError::UnbalancedParen { offset }),
                }
            }
            Tok::Ident(name) => match name.as_str() {
                "t" => Ok(Expr::time()),
                "cos" | "sin" | "exp" | "log" | "tan" | "sqrt" => {
                    let op = match name.as_str() {
                        "cos" => UnaryOp::Cos,
                        "sin" => UnaryOp::Sin,
                        "exp" => UnaryOp::Exp,
                        "log" => UnaryOp::Log,
                        "tan" => UnaryOp::Tan,
                        _ => UnaryOp::Sqrt,
                    };
                    match self.next() {
                        Some((Tok::LParen, lparen_off)) => {
                            if matches!(self.peek(), Some((Tok::RParen, _))) {
                                return Err(ParseError::ArityMismatch { name, offset });
                            }
                            let arg = self.expr(0)?;
                            match self.next() {
                                Some((Tok::RParen, _)) => Ok(Expr::unary(op, arg)),
                                Some((Tok::Comma, _)) => {
                                    Err(ParseError::ArityMismatch { name, offset })
                                }
                                _ => Err(ParseError::UnbalancedParen { offset: lparen_off }),
                            }
                        }
                        _ => Err(ParseError::ArityMismatch { name, offset }),
                    }
                }
                _ => Err(ParseError::UnknownIdentifier { name, offset }),
            },
            Tok::RParen => Err(ParseError::UnbalancedParen { offset }),
            other => Err(ParseError::UnexpectedToken {
                found: other.describe(),
                offset,
            }),
        }
    }
}

/// Parse an infix expression string into an [`Expr`].
pub fn parse(text: &str) -> Result<Expr, ParseError> {
    let toks = lex(text)?;
    if toks.is_empty() {
        return Err(ParseError::Empty);
    }
    let mut p = Parser {
        toks,
        pos: 0,
        end: text.len(),
    };
    let e = p.expr(0)?;
    if let Some((tok, offset)) = p.peek() {
        if *tok == Tok::RParen {
            return Err(ParseError::UnbalancedParen { offset: *offset });
        }
        return Err(ParseError::UnexpectedToken {
            found: tok.describe(),
            offset: *offset,
        });
    }
    Ok(e)
}

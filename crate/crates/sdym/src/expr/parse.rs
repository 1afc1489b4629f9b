//! Recursive-descent parser for the expression grammar in the module docs.

use super::{Expr, Var};

#[derive(Debug, thiserror::Error, PartialEq)]
#[error("syntax error at byte {offset}: {message}")]
pub struct ParseError {
    pub offset: usize,
    pub message: String,
}

fn err<T>(offset: usize, message: impl Into<String>) -> Result<T, ParseError> {
    Err(ParseError {
        offset,
        message: message.into(),
    })
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
}

struct Lexer<'a> {
    src: &'a [u8],
    pos: usize,
}

impl<'a> Lexer<'a> {
    fn tokens(src: &'a str) -> Result<Vec<(Tok, usize)>, ParseError> {
        let mut lx = Lexer {
            src: src.as_bytes(),
            pos: 0,
        };
        let mut out = Vec::new();
        loop {
            lx.skip_ws();
            if lx.pos >= lx.src.len() {
                break;
            }
            let start = lx.pos;
            let b = lx.src[lx.pos];
            let tok = match b {
                b'+' => {
                    lx.pos += 1;
                    Tok::Plus
                }
                b'-' => {
                    lx.pos += 1;
                    Tok::Minus
                }
                b'*' => {
                    lx.pos += 1;
                    Tok::Star
                }
                b'/' => {
                    lx.pos += 1;
                    Tok::Slash
                }
                b'^' => {
                    lx.pos += 1;
                    Tok::Caret
                }
                b'(' => {
                    lx.pos += 1;
                    Tok::LParen
                }
                b')' => {
                    lx.pos += 1;
                    Tok::RParen
                }
                b'0'..=b'9' | b'.' => lx.number(start)?,
                b if b.is_ascii_alphabetic() || b == b'_' => lx.ident(start),
                other => {
                    return err(start, format!("unexpected character `{}`", other as char))
                }
            };
            out.push((tok, start));
        }
        Ok(out)
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn number(&mut self, start: usize) -> Result<Tok, ParseError> {
        let mut end = self.pos;
        let bytes = self.src;
        while end < bytes.len() && (bytes[end].is_ascii_digit() || bytes[end] == b'.') {
            end += 1;
        }
        // exponent part: e or E, optional sign, digits
        if end < bytes.len() && (bytes[end] == b'e' || bytes[end] == b'E') {
            let mut j = end + 1;
            if j < bytes.len() && (bytes[j] == b'+' || bytes[j] == b'-') {
                j += 1;
            }
            if j < bytes.len() && bytes[j].is_ascii_digit() {
                end = j;
                while end < bytes.len() && bytes[end].is_ascii_digit() {
                    end += 1;
                }
            }
        }
        let text = std::str::from_utf8(&bytes[start..end]).unwrap();
        let v: f64 = match text.parse() {
            Ok(v) => v,
            Err(_) => return err(start, format!("invalid number `{}`", text)),
        };
        self.pos = end;
        Ok(Tok::Num(v))
    }

    fn ident(&mut self, start: usize) -> Tok {
        let bytes = self.src;
        let mut end = self.pos;
        while end < bytes.len()
            && (bytes[end].is_ascii_alphanumeric() || bytes[end] == b'_')
        {
            end += 1;
        }
        self.pos = end;
        Tok::Ident(std::str::from_utf8(&bytes[start..end]).unwrap().to_string())
    }
}

struct Parser {
    toks: Vec<(Tok, usize)>,
    idx: usize,
    end: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.idx).map(|(t, _)| t)
    }

    fn offset(&self) -> usize {
        self.toks.get(self.idx).map(|(_, o)| *o).unwrap_or(self.end)
    }

    fn bump(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.idx).map(|(t, _)| t.clone());
        if t.is_some() {
            self.idx += 1;
        }
        t
    }

    fn expect(&mut self, tok: Tok, what: &str) -> Result<(), ParseError> {
        if self.peek() == Some(&tok) {
            self.idx += 1;
            Ok(())
        } else {
            err(self.offset(), format!("expected {}", what))
        }
    }

    fn expr(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.term()?;
        loop {
            match self.peek() {
                Some(Tok::Plus) => {
                    self.idx += 1;
                    lhs = lhs.add(&self.term()?);
                }
                Some(Tok::Minus) => {
                    self.idx += 1;
                    lhs = lhs.sub(&self.term()?);
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn term(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.unary()?;
        loop {
            match self.peek() {
                Some(Tok::Star) => {
                    self.idx += 1;
                    lhs = lhs.mul(&self.unary()?);
                }
                Some(Tok::Slash) => {
                    self.idx += 1;
                    lhs = lhs.div(&self.unary()?);
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn unary(&mut self) -> Result<Expr, ParseError> {
        if self.peek() == Some(&Tok::Minus) {
            self.idx += 1;
            return Ok(self.unary()?.neg());
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expr, ParseError> {
        let base = self.atom()?;
        if self.peek() == Some(&Tok::Caret) {
            self.idx += 1;
            let n = self.integer()?;
            return Ok(base.pow(n));
        }
        Ok(base)
    }

    fn integer(&mut self) -> Result<i32, ParseError> {
        let off = self.offset();
        let mut sign = 1i32;
        let mut parenthesized = false;
        if self.peek() == Some(&Tok::LParen) {
            parenthesized = true;
            self.idx += 1;
        }
        if self.peek() == Some(&Tok::Minus) {
            sign = -1;
            self.idx += 1;
        }
        let n = match self.bump() {
            Some(Tok::Num(v)) if v.fract() == 0.0 && v.abs() <= i32::MAX as f64 => v as i32,
            _ => return err(off, "expected integer exponent"),
        };
        if parenthesized {
            self.expect(Tok::RParen, "`)` closing exponent")?;
        }
        Ok(sign * n)
    }

    fn atom(&mut self) -> Result<Expr, ParseError> {
        let off = self.offset();
        match self.bump() {
            Some(Tok::Num(v)) => Ok(Expr::real(v)),
            Some(Tok::LParen) => {
                let e = self.expr()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(e)
            }
            Some(Tok::Ident(name)) => match name.as_str() {
                "i" => Ok(Expr::i()),
                "z" => Ok(Expr::var(Var::Z)),
                "w" => Ok(Expr::var(Var::W)),
                "zt" => Ok(Expr::var(Var::Zt)),
                "wt" => Ok(Expr::var(Var::Wt)),
                "exp" | "log" | "sqrt" | "conj" => {
                    self.expect(Tok::LParen, "`(` after function name")?;
                    let arg = self.expr()?;
                    self.expect(Tok::RParen, "`)` closing function argument")?;
                    Ok(match name.as_str() {
                        "exp" => arg.exp(),
                        "log" => arg.log(),
                        "sqrt" => arg.sqrt(),
                        _ => arg.conj(),
                    })
                }
                _ => {
                    if self.peek() == Some(&Tok::LParen) {
                        return err(off, format!("unknown function `{}`", name));
                    }
                    Ok(Expr::param(&name))
                }
            },
            Some(_) => err(off, "expected a value"),
            None => err(off, "unexpected end of input"),
        }
    }
}

/// Parse an expression string. Errors carry the byte offset of the offending
/// token.
pub fn parse(src: &str) -> Result<Expr, ParseError> {
    let toks = Lexer::tokens(src)?;
    let mut p = Parser {
        toks,
        idx: 0,
        end: src.len(),
    };
    let e = p.expr()?;
    if p.idx != p.toks.len() {
        return err(p.offset(), "unexpected trailing input");
    }
    Ok(e)
}

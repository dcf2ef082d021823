//! Arithmetic expressions over named geometry parameters.
//!
//! Grammar: real literals, identifiers, unary minus, binary `+ - * /`,
//! parentheses, standard precedence. Deliberately no functions or
//! conditionals; sweeps only need linear forms like `2*w` or `t/3`.

use crate::error::{Error, Result};
use crate::geometry::Parameters;

/// Evaluates `text` against `params`. Pure: identical inputs produce
/// identical result bits.
pub fn eval_param_expr(text: &str, params: &Parameters) -> Result<f64> {
    let mut p = Parser { src: text.as_bytes(), pos: 0, params };
    let value = p.expr()?;
    p.skip_ws();
    if p.pos != p.src.len() {
        return Err(p.syntax("unexpected trailing characters"));
    }
    Ok(value)
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
    params: &'a Parameters,
}

impl<'a> Parser<'a> {
    fn syntax(&self, msg: &str) -> Error {
        Error::ExprSyntax { pos: self.pos, msg: msg.to_string() }
    }

    fn skip_ws(&mut self) {
        while self.src.get(self.pos).is_some_and(|b| b.is_ascii_whitespace()) {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn expr(&mut self) -> Result<f64> {
        let mut acc = self.term()?;
        loop {
            match self.peek() {
                Some(b'+') => {
                    self.pos += 1;
                    acc += self.term()?;
                }
                Some(b'-') => {
                    self.pos += 1;
                    acc -= self.term()?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> Result<f64> {
        let mut acc = self.unary()?;
        loop {
            match self.peek() {
                Some(b'*') => {
                    self.pos += 1;
                    acc *= self.unary()?;
                }
                Some(b'/') => {
                    self.pos += 1;
                    let d = self.unary()?;
                    if d == 0.0 {
                        return Err(Error::DivisionByZero);
                    }
                    acc /= d;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn unary(&mut self) -> Result<f64> {
        if self.peek() == Some(b'-') {
            self.pos += 1;
            return Ok(-self.unary()?);
        }
        self.primary()
    }

    fn primary(&mut self) -> Result<f64> {
        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                let inner = self.expr()?;
                if self.peek() != Some(b')') {
                    return Err(self.syntax("expected `)`"));
                }
                self.pos += 1;
                Ok(inner)
            }
            Some(b) if b.is_ascii_digit() || b == b'.' => self.number(),
            Some(b) if b.is_ascii_alphabetic() || b == b'_' => self.identifier(),
            _ => Err(self.syntax("expected a number, identifier, or `(`")),
        }
    }

    fn number(&mut self) -> Result<f64> {
        let start = self.pos;
        while self.src.get(self.pos).is_some_and(|b| b.is_ascii_digit()) {
            self.pos += 1;
        }
        if self.src.get(self.pos) == Some(&b'.') {
            self.pos += 1;
            while self.src.get(self.pos).is_some_and(|b| b.is_ascii_digit()) {
                self.pos += 1;
            }
        }
        if matches!(self.src.get(self.pos), Some(b'e') | Some(b'E')) {
            let mark = self.pos;
            self.pos += 1;
            if matches!(self.src.get(self.pos), Some(b'+') | Some(b'-')) {
                self.pos += 1;
            }
            if self.src.get(self.pos).is_some_and(|b| b.is_ascii_digit()) {
                while self.src.get(self.pos).is_some_and(|b| b.is_ascii_digit()) {
                    self.pos += 1;
                }
            } else {
                // `1e` followed by a non-digit is the literal `1` and then `e...`
                self.pos = mark;
            }
        }
        let text = std::str::from_utf8(&self.src[start..self.pos]).expect("ascii slice");
        text.parse::<f64>().map_err(|_| Error::ExprSyntax {
            pos: start,
            msg: format!("invalid number literal `{text}`"),
        })
    }

    fn identifier(&mut self) -> Result<f64> {
        let start = self.pos;
        while self
            .src
            .get(self.pos)
            .is_some_and(|b| b.is_ascii_alphanumeric() || *b == b'_')
        {
            self.pos += 1;
        }
        let name = std::str::from_utf8(&self.src[start..self.pos]).expect("ascii slice");
        self.params
            .get(name)
            .ok_or_else(|| Error::UnknownIdentifier(name.to_string()))
    }
}

use std::f64::consts::{E, PI};

use super::{Expr, Func, SystemF};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(f64),
    Ident(String),
    Op(char),
    LParen,
    RParen,
    Comma,
}

fn syntax(pos: usize, msg: impl Into<String>) -> Error {
    Error::Syntax {
        pos,
        msg: msg.into(),
    }
}

fn lex(src: &str, offset: usize) -> Result<Vec<(Tok, usize)>> {
    let bytes = src.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i] as char;
        let pos = offset + i;
        if c.is_ascii_whitespace() {
            i += 1;
            continue;
        }
        if c.is_ascii_digit() || c == '.' {
            let start = i;
            while i < bytes.len() && (bytes[i].is_ascii_digit() || bytes[i] == b'.') {
                i += 1;
            }
            // exponent part: 1e-3, 2.5E+4
            if i < bytes.len() && (bytes[i] == b'e' || bytes[i] == b'E') {
                let mut j = i + 1;
                if j < bytes.len() && (bytes[j] == b'+' || bytes[j] == b'-') {
                    j += 1;
                }
                if j < bytes.len() && bytes[j].is_ascii_digit() {
                    while j < bytes.len() && bytes[j].is_ascii_digit() {
                        j += 1;
                    }
                    i = j;
                }
            }
            let text = &src[start..i];
            let value: f64 = text
                .parse()
                .map_err(|_| syntax(pos, format!("malformed number '{text}'")))?;
            out.push((Tok::Num(value), pos));
            continue;
        }
        if c.is_ascii_alphabetic() || c == '_' {
            let start = i;
            while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                i += 1;
            }
            out.push((Tok::Ident(src[start..i].to_string()), pos));
            continue;
        }
        let tok = match c {
            '+' | '-' | '*' | '/' | '^' => Tok::Op(c),
            '(' => Tok::LParen,
            ')' => Tok::RParen,
            ',' => Tok::Comma,
            _ => return Err(syntax(pos, format!("unexpected character '{c}'"))),
        };
        out.push((tok, pos));
        i += 1;
    }
    Ok(out)
}

struct Parser {
    toks: Vec<(Tok, usize)>,
    at: usize,
    end: usize,
    n: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.at).map(|(t, _)| t)
    }

    fn pos(&self) -> usize {
        self.toks.get(self.at).map_or(self.end, |(_, p)| *p)
    }

    fn bump(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.at).map(|(t, _)| t.clone());
        self.at += 1;
        t
    }

    fn expect(&mut self, want: Tok, what: &str) -> Result<()> {
        let pos = self.pos();
        match self.bump() {
            Some(t) if t == want => Ok(()),
            Some(t) => Err(syntax(pos, format!("expected {what}, found {t:?}"))),
            None => Err(syntax(pos, format!("expected {what}, found end of input"))),
        }
    }

    fn expr(&mut self) -> Result<Expr> {
        let mut lhs = self.term()?;
        loop {
            match self.peek() {
                Some(Tok::Op('+')) => {
                    self.bump();
                    let rhs = self.term()?;
                    lhs = Expr::Add(Box::new(lhs), Box::new(rhs));
                }
                Some(Tok::Op('-')) => {
                    self.bump();
                    let literal = matches!(self.peek(), Some(Tok::Num(_)));
                    let rhs = self.term()?;
                    // `a - 10` is stored as `a + (-10)`
                    lhs = match rhs {
                        Expr::Const(c) if literal => Expr::Add(Box::new(lhs), Box::new(Expr::Const(-c))),
                        rhs => Expr::Sub(Box::new(lhs), Box::new(rhs)),
                    };
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn term(&mut self) -> Result<Expr> {
        let mut lhs = self.unary()?;
        loop {
            match self.peek() {
                Some(Tok::Op('*')) => {
                    self.bump();
                    let rhs = self.unary()?;
                    lhs = Expr::Mul(Box::new(lhs), Box::new(rhs));
                }
                Some(Tok::Op('/')) => {
                    self.bump();
                    let rhs = self.unary()?;
                    lhs = Expr::Div(Box::new(lhs), Box::new(rhs));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn unary(&mut self) -> Result<Expr> {
        match self.peek() {
            Some(Tok::Op('-')) => {
                self.bump();
                Ok(match self.unary()? {
                    Expr::Const(c) => Expr::Const(-c),
                    e => Expr::Neg(Box::new(e)),
                })
            }
            Some(Tok::Op('+')) => {
                self.bump();
                self.unary()
            }
            _ => self.power(),
        }
    }

    fn power(&mut self) -> Result<Expr> {
        let base = self.primary()?;
        if !matches!(self.peek(), Some(Tok::Op('^'))) {
            return Ok(base);
        }
        self.bump();
        let pos = self.pos();
        let exponent = self.unary()?;
        if exponent.max_var().is_some() {
            return Err(syntax(pos, "exponent must be a real constant"));
        }
        let value = exponent.eval(&[], 0).map_err(|e| syntax(pos, e.to_string()))?;
        if value.im != 0.0 || !value.re.is_finite() {
            return Err(syntax(pos, "exponent must be a real constant"));
        }
        Ok(Expr::Pow(Box::new(base), value.re))
    }

    fn primary(&mut self) -> Result<Expr> {
        let pos = self.pos();
        match self.bump() {
            Some(Tok::Num(v)) => Ok(Expr::real(v)),
            Some(Tok::LParen) => {
                let e = self.expr()?;
                self.expect(Tok::RParen, "')'")?;
                Ok(e)
            }
            Some(Tok::Ident(name)) => {
                if matches!(self.peek(), Some(Tok::LParen)) {
                    return self.call(&name, pos);
                }
                self.identifier(&name, pos)
            }
            Some(t) => Err(syntax(pos, format!("unexpected {t:?}"))),
            None => Err(syntax(pos, "unexpected end of input")),
        }
    }

    fn call(&mut self, name: &str, pos: usize) -> Result<Expr> {
        let func = Func::from_name(name)
            .ok_or_else(|| Error::Arity(format!("unknown function '{name}' at byte {pos}")))?;
        self.bump();
        let arg = self.expr()?;
        if matches!(self.peek(), Some(Tok::Comma)) {
            return Err(Error::Arity(format!("{name} takes exactly one argument")));
        }
        self.expect(Tok::RParen, "')'")?;
        Ok(Expr::Call(func, Box::new(arg)))
    }

    fn identifier(&self, name: &str, pos: usize) -> Result<Expr> {
        match name {
            "pi" => return Ok(Expr::real(PI)),
            "e" => return Ok(Expr::real(E)),
            "x" if self.n == 1 => return Ok(Expr::Var(0)),
            "x" => {
                return Err(Error::Arity(format!(
                    "'x' is only allowed for one-dimensional systems (n = {})",
                    self.n
                )))
            }
            _ => {}
        }
        if let Some(digits) = name.strip_prefix('x') {
            if !digits.is_empty() && digits.bytes().all(|b| b.is_ascii_digit()) {
                let index: usize = digits
                    .parse()
                    .map_err(|_| syntax(pos, format!("bad variable '{name}'")))?;
                if index == 0 || index > self.n {
                    return Err(Error::Arity(format!(
                        "variable {name} outside x1..x{}",
                        self.n
                    )));
                }
                return Ok(Expr::Var(index - 1));
            }
        }
        if Func::from_name(name).is_some() {
            return Err(syntax(pos, format!("function '{name}' needs an argument")));
        }
        Err(syntax(pos, format!("unknown identifier '{name}'")))
    }
}

fn parse_segment(src: &str, offset: usize, n: usize) -> Result<Expr> {
    let toks = lex(src, offset)?;
    let mut p = Parser {
        toks,
        at: 0,
        end: offset + src.len(),
        n,
    };
    let e = p.expr()?;
    if p.at < p.toks.len() {
        let pos = p.pos();
        return Err(syntax(pos, format!("unexpected trailing {:?}", p.peek().unwrap())));
    }
    Ok(e)
}

/// Parse a single expression over `x1..xn`.
pub fn parse_expr(source: &str, n: usize) -> Result<Expr> {
    parse_segment(source, 0, n)
}

/// Parse a system of `n` equations separated by newlines or `;`.
pub fn parse(source: &str, n: usize) -> Result<SystemF> {
    let mut components = Vec::new();
    let mut offset = 0;
    for segment in source.split(['\n', ';']) {
        if !segment.trim().is_empty() {
            components.push(parse_segment(segment, offset, n)?);
        }
        offset += segment.len() + 1;
    }
    if components.len() != n {
        return Err(Error::Arity(format!(
            "expected {n} equations, found {}",
            components.len()
        )));
    }
    SystemF::new(components)
}

/// Parse one expression per string, e.g. the `equations` array of a problem file.
pub fn parse_equations<S: AsRef<str>>(equations: &[S], n: usize) -> Result<SystemF> {
    if equations.len() != n {
        return Err(Error::Arity(format!(
            "expected {n} equations, found {}",
            equations.len()
        )));
    }
    let components = equations
        .iter()
        .map(|s| parse_expr(s.as_ref(), n))
        .collect::<Result<Vec<_>>>()?;
    SystemF::new(components)
}

use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::{One, Signed};

use super::poly::Poly;
use super::ratfun::RationalFunction;
use super::vars::VarTable;
use super::Rational;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(BigInt),
    Ident(String),
    Op(u8),
    End,
}

fn lex(text: &str) -> Result<Vec<(Tok, usize)>> {
    let b = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < b.len() {
        let c = b[i];
        match c {
            b' ' | b'\t' | b'\r' | b'\n' => i += 1,
            b'#' => {
                while i < b.len() && b[i] != b'\n' {
                    i += 1;
                }
            }
            b'0'..=b'9' => {
                let start = i;
                while i < b.len() && b[i].is_ascii_digit() {
                    i += 1;
                }
                let n: BigInt = text[start..i].parse().expect("digits");
                out.push((Tok::Num(n), start));
            }
            b'a'..=b'z' | b'A'..=b'Z' | b'_' => {
                let start = i;
                while i < b.len() && (b[i].is_ascii_alphanumeric() || b[i] == b'_') {
                    i += 1;
                }
                out.push((Tok::Ident(text[start..i].to_string()), start));
            }
            b'+' | b'-' | b'*' | b'/' | b'^' | b'(' | b')' => {
                out.push((Tok::Op(c), i));
                i += 1;
            }
            _ => {
                return Err(Error::Syntax {
                    offset: i,
                    message: format!("unexpected character `{}`", text[i..].chars().next().unwrap()),
                })
            }
        }
    }
    out.push((Tok::End, text.len()));
    Ok(out)
}

struct Parser<'a> {
    toks: Vec<(Tok, usize)>,
    pos: usize,
    vars: &'a Arc<VarTable>,
    poly_only: bool,
}

fn syntax(offset: usize, message: impl Into<String>) -> Error {
    Error::Syntax {
        offset,
        message: message.into(),
    }
}

impl Parser<'_> {
    fn peek(&self) -> &(Tok, usize) {
        &self.toks[self.pos]
    }

    fn bump(&mut self) -> (Tok, usize) {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn expr(&mut self) -> Result<RationalFunction> {
        let mut acc = self.term()?;
        loop {
            match self.peek().0 {
                Tok::Op(b'+') => {
                    self.bump();
                    acc = acc.checked_add(&self.term()?)?;
                }
                Tok::Op(b'-') => {
                    self.bump();
                    acc = acc.checked_sub(&self.term()?)?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> Result<RationalFunction> {
        let mut acc = self.factor()?;
        loop {
            match self.peek().0 {
                Tok::Op(b'*') => {
                    self.bump();
                    acc = acc.checked_mul(&self.factor()?)?;
                }
                Tok::Op(b'/') => {
                    let at = self.bump().1;
                    let d = self.factor()?;
                    if d.is_zero() {
                        return Err(syntax(at, "division by zero"));
                    }
                    if self.poly_only && d.as_poly().and_then(|p| p.constant_value()).is_none() {
                        return Err(syntax(at, "division by a non-constant"));
                    }
                    acc = acc.checked_div(&d)?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn factor(&mut self) -> Result<RationalFunction> {
        match self.peek().0 {
            Tok::Op(b'-') => {
                self.bump();
                Ok(-self.factor()?)
            }
            Tok::Op(b'+') => {
                self.bump();
                self.factor()
            }
            _ => self.power(),
        }
    }

    fn power(&mut self) -> Result<RationalFunction> {
        let base = self.atom()?;
        if self.peek().0 != Tok::Op(b'^') {
            return Ok(base);
        }
        self.bump();
        match self.bump() {
            (Tok::Num(n), at) => {
                let e: u32 = n.try_into().map_err(|_| syntax(at, "exponent too large"))?;
                Ok(base.pow(e))
            }
            (_, at) => Err(syntax(at, "expected a nonnegative integer exponent")),
        }
    }

    fn atom(&mut self) -> Result<RationalFunction> {
        match self.bump() {
            (Tok::Num(n), _) => Ok(Poly::constant(self.vars, Rational::from_integer(n)).into()),
            (Tok::Ident(name), offset) => match self.vars.index(&name) {
                Some(i) => Ok(RationalFunction::var(self.vars, i)),
                None => Err(Error::UnknownIdentifier { name, offset }),
            },
            (Tok::Op(b'('), _) => {
                let inner = self.expr()?;
                match self.bump() {
                    (Tok::Op(b')'), _) => Ok(inner),
                    (_, at) => Err(syntax(at, "expected `)`")),
                }
            }
            (Tok::End, at) => Err(syntax(at, "unexpected end of input")),
            (Tok::Op(c), at) => Err(syntax(at, format!("unexpected `{}`", c as char))),
        }
    }
}

fn run(text: &str, vars: &Arc<VarTable>, poly_only: bool) -> Result<RationalFunction> {
    let mut p = Parser {
        toks: lex(text)?,
        pos: 0,
        vars,
        poly_only,
    };
    let r = p.expr()?;
    match p.peek() {
        (Tok::End, _) => Ok(r),
        (_, at) => Err(syntax(*at, "unexpected token")),
    }
}

/// Parses a polynomial; division is allowed by nonzero constants only.
pub fn parse_poly(text: &str, vars: &Arc<VarTable>) -> Result<Poly> {
    let r = run(text, vars, true)?;
    Ok(r.as_poly().cloned().expect("constant denominators fold"))
}

pub fn parse_rational_function(text: &str, vars: &Arc<VarTable>) -> Result<RationalFunction> {
    run(text, vars, false)
}

fn write_rational(f: &mut fmt::Formatter<'_>, c: &Rational) -> fmt::Result {
    if c.denom().is_one() {
        write!(f, "{}", c.numer())
    } else {
        write!(f, "{}/{}", c.numer(), c.denom())
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        for (k, (m, c)) in self.terms().iter().enumerate() {
            let neg = c.is_negative();
            match (k, neg) {
                (0, true) => f.write_str("-")?,
                (0, false) => {}
                (_, true) => f.write_str(" - ")?,
                (_, false) => f.write_str(" + ")?,
            }
            let a = c.abs();
            let mut first = true;
            if m.is_one() || !a.is_one() {
                write_rational(f, &a)?;
                first = false;
            }
            for (i, &e) in m.exps().iter().enumerate().take(self.vars().len()) {
                if e == 0 {
                    continue;
                }
                if !first {
                    f.write_str("*")?;
                }
                first = false;
                f.write_str(self.vars().name(i))?;
                if e > 1 {
                    write!(f, "^{e}")?;
                }
            }
        }
        Ok(())
    }
}

impl fmt::Display for RationalFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den().is_one() {
            write!(f, "{}", self.num())
        } else {
            write!(f, "({})/({})", self.num(), self.den())
        }
    }
}

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::{ToPrimitive, Zero};

use super::Diagnostic;
use crate::algebra::{GaussianRational, Q, RationalFunction};

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Int(BigInt),
    Imag(Q),
    Ident(String),
    Deriv(String),
    Op(char),
    LParen,
    RParen,
    End,
}

struct Lexer<'a> {
    src: &'a [u8],
    pos: usize,
    fields: bool,
}

fn ident_start(b: u8) -> bool {
    b.is_ascii_alphabetic()
}

fn ident_cont(b: u8) -> bool {
    b.is_ascii_alphanumeric() || b == b'_'
}

impl<'a> Lexer<'a> {
    fn peek_at(&self, k: usize) -> Option<u8> {
        self.src.get(self.pos + k).copied()
    }

    fn digits_at(&self, start: usize) -> usize {
        let mut k = start;
        while self.src.get(k).map(|b| b.is_ascii_digit()).unwrap_or(false) {
            k += 1;
        }
        k
    }

    fn standalone_i(&self, at: usize) -> bool {
        self.src.get(at) == Some(&b'i') && !self.src.get(at + 1).map(|&b| ident_cont(b)).unwrap_or(false)
    }

    fn text(&self, a: usize, b: usize) -> &str {
        std::str::from_utf8(&self.src[a..b]).unwrap_or("")
    }

    fn next(&mut self) -> Result<(Tok, usize), (usize, String)> {
        while self.peek_at(0).map(|b| b.is_ascii_whitespace()).unwrap_or(false) {
            self.pos += 1;
        }
        let start = self.pos;
        let b = match self.peek_at(0) {
            None => return Ok((Tok::End, start)),
            Some(b) => b,
        };
        if b.is_ascii_digit() {
            let end = self.digits_at(start);
            let n: BigInt = self.text(start, end).parse().map_err(|_| (start, "bad integer".to_string()))?;
            if self.standalone_i(end) {
                self.pos = end + 1;
                return Ok((Tok::Imag(Q::from_integer(n)), start));
            }
            // `p/qi` is one imaginary literal
            if self.src.get(end) == Some(&b'/') {
                let dend = self.digits_at(end + 1);
                if dend > end + 1 && self.standalone_i(dend) {
                    let d: BigInt = self.text(end + 1, dend).parse().map_err(|_| (start, "bad integer".to_string()))?;
                    if d.is_zero() {
                        return Err((start, "division by zero literal".to_string()));
                    }
                    self.pos = dend + 1;
                    return Ok((Tok::Imag(Q::new(n, d)), start));
                }
            }
            self.pos = end;
            return Ok((Tok::Int(n), start));
        }
        if ident_start(b) {
            let mut end = start + 1;
            while self.src.get(end).map(|&b| ident_cont(b)).unwrap_or(false) {
                end += 1;
            }
            let word = self.text(start, end).to_string();
            if self.fields && word == "d" && self.src.get(end) == Some(&b'/') && self.src.get(end + 1) == Some(&b'd') {
                let vs = end + 2;
                let mut ve = vs;
                while self.src.get(ve).map(|&b| ident_cont(b)).unwrap_or(false) {
                    ve += 1;
                }
                if ve > vs && ident_start(self.src[vs]) {
                    self.pos = ve;
                    return Ok((Tok::Deriv(self.text(vs, ve).to_string()), start));
                }
            }
            self.pos = end;
            if word == "i" {
                return Ok((Tok::Imag(Q::from_integer(BigInt::from(1))), start));
            }
            return Ok((Tok::Ident(word), start));
        }
        self.pos += 1;
        match b {
            b'+' | b'-' | b'*' | b'/' | b'^' => Ok((Tok::Op(b as char), start)),
            b'(' => Ok((Tok::LParen, start)),
            b')' => Ok((Tok::RParen, start)),
            _ => Err((start, format!("unexpected character `{}`", b as char))),
        }
    }
}

/// Scalar or formal vector field `sum f_j d/dz_j`.
#[derive(Debug, Clone, PartialEq)]
pub enum Value {
    Scalar(RationalFunction),
    Field(BTreeMap<String, RationalFunction>),
}

impl Value {
    fn neg(self) -> Value {
        match self {
            Value::Scalar(r) => Value::Scalar(-r),
            Value::Field(f) => Value::Field(f.into_iter().map(|(k, v)| (k, -v)).collect()),
        }
    }
}

fn add_fields(
    a: BTreeMap<String, RationalFunction>,
    b: BTreeMap<String, RationalFunction>,
    sign: i64,
) -> BTreeMap<String, RationalFunction> {
    let mut out = a;
    for (k, v) in b {
        let cur = out.remove(&k).unwrap_or_default();
        let nv = &cur + &v.scale(&GaussianRational::from_int(sign));
        if !nv.is_zero() {
            out.insert(k, nv);
        }
    }
    out
}

struct Parser<'a> {
    lex: Lexer<'a>,
    tok: Tok,
    at: usize,
    vars: &'a [String],
    params: &'a BTreeMap<String, GaussianRational>,
}

type PResult<T> = Result<T, (usize, String)>;

fn prec(op: char) -> u8 {
    match op {
        '+' | '-' => 1,
        '*' | '/' => 2,
        '^' => 3,
        _ => 0,
    }
}

impl<'a> Parser<'a> {
    fn bump(&mut self) -> PResult<()> {
        let (t, at) = self.lex.next()?;
        self.tok = t;
        self.at = at;
        Ok(())
    }

    /// Precedence climbing over binary operators; `^` is right-associative.
    fn climb(&mut self, min: u8) -> PResult<Value> {
        let mut lhs = self.unary()?;
        loop {
            let op = match &self.tok {
                Tok::Op(c) if prec(*c) >= min && prec(*c) > 0 => *c,
                _ => break,
            };
            let at = self.at;
            self.bump()?;
            let next_min = if op == '^' { prec(op) } else { prec(op) + 1 };
            let rhs = self.climb(next_min)?;
            lhs = self.apply(op, lhs, rhs, at)?;
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> PResult<Value> {
        match self.tok {
            Tok::Op('-') => {
                self.bump()?;
                Ok(self.climb(prec('^'))?.neg())
            }
            Tok::Op('+') => {
                self.bump()?;
                self.climb(prec('^'))
            }
            _ => self.atom(),
        }
    }

    fn atom(&mut self) -> PResult<Value> {
        let at = self.at;
        let v = match std::mem::replace(&mut self.tok, Tok::End) {
            Tok::Int(n) => Value::Scalar(RationalFunction::constant(GaussianRational::from_q(Q::from_integer(n)))),
            Tok::Imag(q) => Value::Scalar(RationalFunction::constant(GaussianRational::new(Q::zero(), q))),
            Tok::Ident(name) => {
                if self.vars.iter().any(|v| v == &name) {
                    Value::Scalar(RationalFunction::var(&name))
                } else if let Some(c) = self.params.get(&name) {
                    Value::Scalar(RationalFunction::constant(c.clone()))
                } else {
                    return Err((at, format!("unknown variable `{}`", name)));
                }
            }
            Tok::Deriv(name) => {
                if !self.vars.iter().any(|v| v == &name) {
                    return Err((at, format!("unknown variable `{}` in d/d{}", name, name)));
                }
                let mut f = BTreeMap::new();
                f.insert(name, RationalFunction::one());
                Value::Field(f)
            }
            Tok::LParen => {
                self.bump()?;
                let v = self.climb(1)?;
                if self.tok != Tok::RParen {
                    return Err((self.at, "expected `)`".to_string()));
                }
                v
            }
            Tok::End => return Err((at, "unexpected end of expression".to_string())),
            t => return Err((at, format!("unexpected token {:?}", t))),
        };
        self.bump()?;
        Ok(v)
    }

    fn apply(&self, op: char, a: Value, b: Value, at: usize) -> PResult<Value> {
        use Value::*;
        Ok(match (op, a, b) {
            ('+', Scalar(x), Scalar(y)) => Scalar(&x + &y),
            ('-', Scalar(x), Scalar(y)) => Scalar(&x - &y),
            ('+', Field(x), Field(y)) => Field(add_fields(x, y, 1)),
            ('-', Field(x), Field(y)) => Field(add_fields(x, y, -1)),
            ('*', Scalar(x), Scalar(y)) => Scalar(&x * &y),
            ('*', Scalar(s), Field(f)) | ('*', Field(f), Scalar(s)) => {
                Field(f.into_iter().map(|(k, v)| (k, &v * &s)).filter(|(_, v)| !v.is_zero()).collect())
            }
            ('/', Scalar(x), Scalar(y)) => Scalar(x.checked_div(&y).map_err(|_| (at, "division by zero".to_string()))?),
            ('/', Field(f), Scalar(y)) => {
                let inv = y.inv().map_err(|_| (at, "division by zero".to_string()))?;
                Field(f.into_iter().map(|(k, v)| (k, &v * &inv)).collect())
            }
            ('^', Scalar(x), Scalar(e)) => {
                let k = e
                    .as_constant()
                    .filter(|c| c.is_real() && c.re.is_integer() && c.re >= Q::zero())
                    .and_then(|c| c.re.to_integer().to_u32())
                    .ok_or((at, "exponent must be a nonnegative integer".to_string()))?;
                Scalar(x.pow(k))
            }
            (op, _, _) => return Err((at, format!("operator `{}` not defined between a scalar and a vector field", op))),
        })
    }
}

fn run(
    text: &str,
    vars: &[String],
    params: &BTreeMap<String, GaussianRational>,
    fields: bool,
) -> PResult<Value> {
    let mut p = Parser { lex: Lexer { src: text.as_bytes(), pos: 0, fields }, tok: Tok::End, at: 0, vars, params };
    p.bump()?;
    if p.tok == Tok::End {
        return Err((0, "empty expression".to_string()));
    }
    let v = p.climb(1)?;
    if p.tok != Tok::End {
        return Err((p.at, "unexpected trailing input".to_string()));
    }
    Ok(v)
}

fn diag(text: &str, line: usize, col: usize, at: usize, msg: String) -> Diagnostic {
    let at = at.min(text.len());
    let before = &text[..at];
    let extra_lines = before.matches('\n').count();
    let col = match before.rfind('\n') {
        Some(k) => at - k,
        None => col + at,
    };
    Diagnostic::error(line + extra_lines, col, msg)
}

/// Parse a scalar expression; `line`/`col` locate `text` in a larger source.
pub fn parse_scalar_at(
    text: &str,
    vars: &[String],
    params: &BTreeMap<String, GaussianRational>,
    line: usize,
    col: usize,
) -> Result<RationalFunction, Diagnostic> {
    match run(text, vars, params, false) {
        Ok(Value::Scalar(r)) => Ok(r),
        Ok(Value::Field(_)) => Err(Diagnostic::error(line, col, "expected a scalar expression".to_string())),
        Err((at, msg)) => Err(diag(text, line, col, at, msg)),
    }
}

/// Parse `f1*d/dz1 + ...`; returns components keyed by variable.
pub fn parse_field_at(
    text: &str,
    vars: &[String],
    params: &BTreeMap<String, GaussianRational>,
    line: usize,
    col: usize,
) -> Result<BTreeMap<String, RationalFunction>, Diagnostic> {
    match run(text, vars, params, true) {
        Ok(Value::Field(f)) => Ok(f),
        Ok(Value::Scalar(r)) if r.is_zero() => Ok(BTreeMap::new()),
        Ok(Value::Scalar(_)) => Err(Diagnostic::error(line, col, "expected a vector field `f*d/dz + ...`".to_string())),
        Err((at, msg)) => Err(diag(text, line, col, at, msg)),
    }
}

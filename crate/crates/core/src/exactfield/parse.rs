use alloc::format;
use alloc::string::{String, ToString};
use core::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::{FieldElem, FieldId};
use crate::{Error, Result};

/// Parse an arithmetic expression over integers and the field generator.
///
/// Accepted: `+ - * / ^ ( )`, decimal integers and the generator symbol of
/// `field` (`sqrt2`, `sqrt3`, `tau`, `sqrt6` or `lam7`). Exponents must be
/// integer literals, optionally negative.
pub fn parse_elem(src: &str, field: FieldId) -> Result<FieldElem> {
    let mut p = Parser { src: src.as_bytes(), pos: 0, field };
    let x = p.expr()?;
    p.skip_ws();
    if p.pos != p.src.len() {
        return Err(p.err("unexpected trailing input"));
    }
    Ok(x)
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
    field: FieldId,
}

impl Parser<'_> {
    fn err(&self, msg: &str) -> Error {
        Error::Parse { pos: self.pos, msg: msg.to_string() }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn expr(&mut self) -> Result<FieldElem> {
        let mut acc = self.term()?;
        while let Some(c) = self.peek() {
            match c {
                b'+' => {
                    self.pos += 1;
                    acc = &acc + &self.term()?;
                }
                b'-' => {
                    self.pos += 1;
                    acc = &acc - &self.term()?;
                }
                _ => break,
            }
        }
        Ok(acc)
    }

    fn term(&mut self) -> Result<FieldElem> {
        let mut acc = self.unary()?;
        while let Some(c) = self.peek() {
            match c {
                b'*' => {
                    self.pos += 1;
                    acc = &acc * &self.unary()?;
                }
                b'/' => {
                    self.pos += 1;
                    let at = self.pos;
                    let d = self.unary()?;
                    acc = acc.try_div(&d).map_err(|_| Error::Parse { pos: at, msg: "division by zero".to_string() })?;
                }
                _ => break,
            }
        }
        Ok(acc)
    }

    fn unary(&mut self) -> Result<FieldElem> {
        match self.peek() {
            Some(b'-') => {
                self.pos += 1;
                Ok(-self.unary()?)
            }
            Some(b'+') => {
                self.pos += 1;
                self.unary()
            }
            _ => self.power(),
        }
    }

    fn power(&mut self) -> Result<FieldElem> {
        let base = self.atom()?;
        if self.peek() == Some(b'^') {
            self.pos += 1;
            let neg = if self.peek() == Some(b'-') {
                self.pos += 1;
                true
            } else {
                false
            };
            self.skip_ws();
            let at = self.pos;
            let e = self.integer()?;
            let e: u32 = u32::try_from(&e)
                .ok()
                .filter(|&e| e <= 4096)
                .ok_or(Error::Parse { pos: at, msg: "exponent out of range".to_string() })?;
            let p = base.pow(e);
            return if neg {
                p.inverse().map_err(|_| Error::Parse { pos: at, msg: "zero to a negative power".to_string() })
            } else {
                Ok(p)
            };
        }
        Ok(base)
    }

    fn integer(&mut self) -> Result<BigInt> {
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.err("expected an integer"));
        }
        let s = core::str::from_utf8(&self.src[start..self.pos]).expect("ascii digits");
        Ok(s.parse().expect("valid digits"))
    }

    fn atom(&mut self) -> Result<FieldElem> {
        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                let x = self.expr()?;
                if self.peek() != Some(b')') {
                    return Err(self.err("expected ')'"));
                }
                self.pos += 1;
                Ok(x)
            }
            Some(c) if c.is_ascii_digit() => Ok(FieldElem::from_int(self.field, self.integer()?)),
            Some(c) if c.is_ascii_alphabetic() => {
                let start = self.pos;
                while self.pos < self.src.len() && self.src[self.pos].is_ascii_alphanumeric() {
                    self.pos += 1;
                }
                let name = core::str::from_utf8(&self.src[start..self.pos]).expect("ascii");
                if name == self.field.symbol() {
                    Ok(FieldElem::generator(self.field))
                } else if FieldId::from_symbol(name).is_some() {
                    Err(Error::Parse { pos: start, msg: format!("symbol {name} does not belong to {}", self.field) })
                } else {
                    Err(Error::Parse { pos: start, msg: format!("unknown symbol {name}") })
                }
            }
            Some(_) => Err(self.err("unexpected character")),
            None => Err(self.err("unexpected end of input")),
        }
    }
}

fn fmt_rational(q: &BigRational) -> String {
    if q.denom().is_one() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

impl fmt::Display for FieldElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        let sym = self.field().symbol();
        let mut first = true;
        for (i, c) in self.coords().iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let mag = c.abs();
            if first {
                if c.is_negative() {
                    f.write_str("-")?;
                }
            } else if c.is_negative() {
                f.write_str(" - ")?;
            } else {
                f.write_str(" + ")?;
            }
            first = false;
            let monomial = match i {
                0 => String::new(),
                1 => sym.to_string(),
                _ => format!("{sym}^{i}"),
            };
            if i == 0 {
                f.write_str(&fmt_rational(&mag))?;
            } else if mag.is_one() {
                f.write_str(&monomial)?;
            } else {
                write!(f, "{}*{}", fmt_rational(&mag), monomial)?;
            }
        }
        Ok(())
    }
}

//! Points of the projective line over a field, unimodular matrices acting on
//! them by Moebius transformations, and intervals of `[0, inf]`.

use alloc::format;
use alloc::string::ToString;
use alloc::vec::Vec;
use core::cmp::Ordering;
use core::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive};

use crate::exactfield::{euclid_gcd, parse_elem, FieldElem, FieldId, Sign};
use crate::{Error, Result};

/// A point `[a1 : a2]` with integral, coprime coordinates.
///
/// The sign is normalised so that `a2 > 0`, or `a2 = 0` and `a1 > 0`, in the
/// identity embedding. Coordinates are only fixed up to a unit, so equality is
/// by cross-multiplication.
#[derive(Clone, Debug)]
pub struct ProjPoint {
    a1: FieldElem,
    a2: FieldElem,
}

impl ProjPoint {
    pub fn infinity(field: FieldId) -> ProjPoint {
        ProjPoint { a1: FieldElem::one(field), a2: FieldElem::zero(field) }
    }

    pub fn zero(field: FieldId) -> ProjPoint {
        ProjPoint { a1: FieldElem::zero(field), a2: FieldElem::one(field) }
    }

    pub fn one(field: FieldId) -> ProjPoint {
        ProjPoint { a1: FieldElem::one(field), a2: FieldElem::one(field) }
    }

    /// `[a1 : a2]` for arbitrary (not necessarily integral) coordinates; the
    /// denominators are cleared and the common divisor removed.
    pub fn from_pair(a1: FieldElem, a2: FieldElem) -> Result<ProjPoint> {
        if a1.field() != a2.field() {
            return Err(Error::FieldMismatch(a1.field(), a2.field()));
        }
        if a1.is_zero() && a2.is_zero() {
            return Err(Error::Precondition("[0 : 0] is not a point".to_string()));
        }
        let field = a1.field();
        let l = a1.denom() * a2.denom();
        let l = FieldElem::from_int(field, l);
        let b1 = &a1 * &l;
        let b2 = &a2 * &l;
        let g = euclid_gcd(&b1, &b2)?;
        let p = ProjPoint { a1: b1.try_div(&g)?, a2: b2.try_div(&g)? };
        debug_assert!(p.a1.is_integral() && p.a2.is_integral());
        Ok(p.balanced().normalized())
    }

    pub fn from_elem(x: &FieldElem) -> ProjPoint {
        ProjPoint::from_pair(x.clone(), FieldElem::one(x.field())).expect("finite point")
    }

    /// Trust the caller that the pair is integral and coprime.
    pub(crate) fn from_coprime(a1: FieldElem, a2: FieldElem) -> ProjPoint {
        ProjPoint { a1, a2 }.balanced().normalized()
    }

    /// Multiply both coordinates by a unit so that their sizes are spread
    /// evenly over the real embeddings. Without this, long orbits drift
    /// towards representatives with huge coordinates and small height.
    fn balanced(self) -> ProjPoint {
        let field = self.field();
        let d = field.degree();
        let units = field.descriptor().units;
        let log_size = |p: &ProjPoint| -> Vec<f64> {
            (0..d)
                .map(|j| {
                    [&p.a1, &p.a2]
                        .iter()
                        .filter(|x| !x.is_zero())
                        .map(|x| x.ln_abs_at(j))
                        .fold(f64::NEG_INFINITY, f64::max)
                })
                .collect()
        };
        let centered = |v: &[f64]| -> Vec<f64> {
            let mean = v.iter().sum::<f64>() / d as f64;
            v.iter().map(|x| x - mean).collect()
        };
        let norm2 = |v: &[f64]| v.iter().map(|x| x * x).sum::<f64>();
        let ulogs: Vec<Vec<f64>> = units
            .iter()
            .map(|u| {
                let u = FieldElem::from_i64s(field, u);
                (0..d).map(|j| u.ln_abs_at(j)).collect()
            })
            .collect();
        let mut v = centered(&log_size(&self));
        let mut p = self;
        loop {
            let cur = norm2(&v);
            let mut best: Option<(usize, f64, f64)> = None;
            for (k, ul) in ulogs.iter().enumerate() {
                for s in [1.0, -1.0] {
                    let w: Vec<f64> = v.iter().zip(ul).map(|(a, b)| a - s * b).collect();
                    let n = norm2(&w);
                    if n < cur - 1e-6 && best.is_none_or(|(_, _, m)| n < m) {
                        best = Some((k, s, n));
                    }
                }
            }
            let Some((k, s, _)) = best else { break };
            let u = FieldElem::from_i64s(field, units[k]);
            // dividing by u^s
            let m = if s > 0.0 { u.inverse().expect("unit") } else { u };
            p = ProjPoint { a1: &p.a1 * &m, a2: &p.a2 * &m };
            v = v.iter().zip(&ulogs[k]).map(|(a, b)| a - s * b).collect();
        }
        p
    }

    /// `inf`, a field element, or `a : b`.
    pub fn parse(src: &str, field: FieldId) -> Result<ProjPoint> {
        let s = src.trim();
        if s == "inf" || s == "\u{221e}" {
            return Ok(ProjPoint::infinity(field));
        }
        if let Some((l, r)) = s.split_once(':') {
            let a = parse_elem(l, field)?;
            let b = parse_elem(r, field)?;
            return ProjPoint::from_pair(a, b);
        }
        Ok(ProjPoint::from_elem(&parse_elem(s, field)?))
    }

    fn normalized(self) -> ProjPoint {
        let flip = match self.a2.sign() {
            Sign::Negative => true,
            Sign::Zero => self.a1.is_negative(),
            Sign::Positive => false,
        };
        if flip {
            ProjPoint { a1: -self.a1, a2: -self.a2 }
        } else {
            self
        }
    }

    pub fn field(&self) -> FieldId {
        self.a1.field()
    }

    pub fn coords(&self) -> (&FieldElem, &FieldElem) {
        (&self.a1, &self.a2)
    }

    pub fn is_infinity(&self) -> bool {
        self.a2.is_zero()
    }

    /// `a1 / a2`, or `None` at infinity.
    pub fn value(&self) -> Option<FieldElem> {
        if self.is_infinity() {
            None
        } else {
            Some(self.a1.try_div(&self.a2).expect("nonzero"))
        }
    }

    pub fn to_f64(&self) -> f64 {
        match self.value() {
            None => f64::INFINITY,
            Some(v) => v.to_f64(),
        }
    }

    /// Whether the point lies in `[0, inf]`.
    pub fn in_base_interval(&self) -> bool {
        // a2 >= 0 by normalisation; at infinity a1 > 0
        self.a1.sign() != Sign::Negative
    }

    fn require_base(&self) -> Result<()> {
        if self.in_base_interval() {
            Ok(())
        } else {
            Err(Error::OutsideBaseInterval(self.to_string()))
        }
    }

    /// Exact order on `[0, inf]` with `inf` maximal.
    pub fn compare(&self, other: &ProjPoint) -> Result<Ordering> {
        self.require_base()?;
        other.require_base()?;
        Ok(self.cmp_unchecked(other))
    }

    /// Order of `a1/a2` against `b1/b2` for points with `a2, b2 >= 0`.
    pub(crate) fn cmp_unchecked(&self, other: &ProjPoint) -> Ordering {
        let d = &(&self.a1 * &other.a2) - &(&other.a1 * &self.a2);
        d.sign().to_ordering()
    }

    pub fn automorphism(&self, j: usize) -> (FieldElem, FieldElem) {
        (self.a1.automorphism(j), self.a2.automorphism(j))
    }
}

impl PartialEq for ProjPoint {
    fn eq(&self, other: &ProjPoint) -> bool {
        self.field() == other.field() && (&(&self.a1 * &other.a2) - &(&self.a2 * &other.a1)).is_zero()
    }
}

impl Eq for ProjPoint {}

impl fmt::Display for ProjPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.value() {
            None => f.write_str("inf"),
            Some(v) => write!(f, "{v}"),
        }
    }
}

/// Positivity class of a matrix up to sign.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Positivity {
    /// All entries nonzero of one sign.
    Strict,
    /// Entries of one sign with exactly one zero.
    Positive,
    None,
}

/// `[[a, b], [c, d]]` with integral entries and determinant `+-1`, taken up to
/// sign: the first nonzero entry in the order `a, c, b, d` is positive.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct UniMat {
    a: FieldElem,
    b: FieldElem,
    c: FieldElem,
    d: FieldElem,
    det: i8,
}

impl UniMat {
    pub fn new(a: FieldElem, b: FieldElem, c: FieldElem, d: FieldElem) -> Result<UniMat> {
        let f = a.field();
        for x in [&b, &c, &d] {
            if x.field() != f {
                return Err(Error::FieldMismatch(f, x.field()));
            }
        }
        for x in [&a, &b, &c, &d] {
            if !x.is_integral() {
                return Err(Error::NotIntegral(x.to_string()));
            }
        }
        let det = &(&a * &d) - &(&b * &c);
        let det = if det.is_one() {
            1
        } else if (-&det).is_one() {
            -1
        } else {
            return Err(Error::NotUnimodular(det.to_string()));
        };
        Ok(UniMat { a, b, c, d, det }.normalized())
    }

    pub fn from_i64s(field: FieldId, e: [&[i64]; 4]) -> Result<UniMat> {
        UniMat::new(
            FieldElem::from_i64s(field, e[0]),
            FieldElem::from_i64s(field, e[1]),
            FieldElem::from_i64s(field, e[2]),
            FieldElem::from_i64s(field, e[3]),
        )
    }

    /// Entries in the field grammar, row by row.
    pub fn parse(field: FieldId, entries: [&str; 4]) -> Result<UniMat> {
        let v: Vec<FieldElem> = entries.iter().map(|s| parse_elem(s, field)).collect::<Result<_>>()?;
        let mut it = v.into_iter();
        let (a, b, c, d) = (it.next().unwrap(), it.next().unwrap(), it.next().unwrap(), it.next().unwrap());
        UniMat::new(a, b, c, d)
    }

    pub fn identity(field: FieldId) -> UniMat {
        let o = FieldElem::one(field);
        let z = FieldElem::zero(field);
        UniMat { a: o.clone(), b: z.clone(), c: z, d: o, det: 1 }
    }

    fn normalized(self) -> UniMat {
        let first = [&self.a, &self.c, &self.b, &self.d].into_iter().find(|x| !x.is_zero()).expect("nonzero matrix");
        if first.is_negative() {
            UniMat { a: -self.a, b: -self.b, c: -self.c, d: -self.d, det: self.det }
        } else {
            self
        }
    }

    pub fn field(&self) -> FieldId {
        self.a.field()
    }

    pub fn a(&self) -> &FieldElem {
        &self.a
    }
    pub fn b(&self) -> &FieldElem {
        &self.b
    }
    pub fn c(&self) -> &FieldElem {
        &self.c
    }
    pub fn d(&self) -> &FieldElem {
        &self.d
    }

    pub fn entries(&self) -> [&FieldElem; 4] {
        [&self.a, &self.b, &self.c, &self.d]
    }

    pub fn det(&self) -> i32 {
        self.det as i32
    }

    pub fn trace(&self) -> FieldElem {
        &self.a + &self.d
    }

    pub fn mul(&self, other: &UniMat) -> UniMat {
        UniMat {
            a: &(&self.a * &other.a) + &(&self.b * &other.c),
            b: &(&self.a * &other.b) + &(&self.b * &other.d),
            c: &(&self.c * &other.a) + &(&self.d * &other.c),
            d: &(&self.c * &other.b) + &(&self.d * &other.d),
            det: self.det * other.det,
        }
        .normalized()
    }

    pub fn inverse(&self) -> UniMat {
        let s = FieldElem::from_int(self.field(), self.det as i64);
        UniMat {
            a: &self.d * &s,
            b: -&(&self.b * &s),
            c: -&(&self.c * &s),
            d: &self.a * &s,
            det: self.det,
        }
        .normalized()
    }

    pub fn pow(&self, k: u32) -> UniMat {
        let mut acc = UniMat::identity(self.field());
        let mut base = self.clone();
        let mut k = k;
        while k > 0 {
            if k & 1 == 1 {
                acc = acc.mul(&base);
            }
            base = base.mul(&base);
            k >>= 1;
        }
        acc
    }

    pub fn product<'a>(field: FieldId, ms: impl IntoIterator<Item = &'a UniMat>) -> UniMat {
        ms.into_iter().fold(UniMat::identity(field), |acc, m| acc.mul(m))
    }

    /// `|tr| = 2` with determinant one and not the identity.
    pub fn is_parabolic(&self) -> bool {
        if self.det != 1 || *self == UniMat::identity(self.field()) {
            return false;
        }
        let t = self.trace().abs();
        t == FieldElem::from_int(self.field(), 2)
    }

    /// Hyperbolic in the identity embedding: `|tr| > 2` for determinant one,
    /// or the square hyperbolic for determinant minus one.
    pub fn is_hyperbolic(&self) -> bool {
        let m = if self.det == 1 { self.clone() } else { self.mul(self) };
        let t = m.trace().abs();
        t.cmp_real(&FieldElem::from_int(self.field(), 2)) == Ordering::Greater
    }

    /// `[a1 : a2] -> [a a1 + b a2 : c a1 + d a2]`.
    ///
    /// A unimodular matrix maps a coprime pair to a coprime pair, so no gcd
    /// is taken here.
    pub fn act(&self, p: &ProjPoint) -> ProjPoint {
        let (x, y) = p.coords();
        ProjPoint::from_coprime(&(&self.a * x) + &(&self.b * y), &(&self.c * x) + &(&self.d * y))
    }

    pub fn act_inverse(&self, p: &ProjPoint) -> ProjPoint {
        self.inverse().act(p)
    }

    pub fn positivity(&self) -> Positivity {
        let signs: Vec<Sign> = self.entries().iter().map(|x| x.sign()).collect();
        let zeros = signs.iter().filter(|&&s| s == Sign::Zero).count();
        let nonneg = signs.iter().all(|&s| s != Sign::Negative);
        let nonpos = signs.iter().all(|&s| s != Sign::Positive);
        if !(nonneg || nonpos) {
            return Positivity::None;
        }
        match zeros {
            0 => Positivity::Strict,
            1 => Positivity::Positive,
            _ => Positivity::None,
        }
    }

    pub fn is_positive(&self) -> bool {
        self.positivity() != Positivity::None
    }

    /// `M * [lo, hi]` for a matrix that preserves `[0, inf]` and its order or
    /// reverses it (determinant sign), returned with endpoints in order.
    pub fn image_of_base(&self) -> OrderedInterval {
        let p = self.act(&ProjPoint::zero(self.field()));
        let q = self.act(&ProjPoint::infinity(self.field()));
        if p.cmp_unchecked(&q) == Ordering::Greater {
            OrderedInterval::closed(q, p)
        } else {
            OrderedInterval::closed(p, q)
        }
    }
}

impl fmt::Display for UniMat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[[{}, {}], [{}, {}]]", self.a, self.b, self.c, self.d)
    }
}

/// An interval of `[0, inf]` with endpoints `lo <= hi`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OrderedInterval {
    pub lo: ProjPoint,
    pub hi: ProjPoint,
    pub lo_open: bool,
    pub hi_open: bool,
}

impl OrderedInterval {
    pub fn new(lo: ProjPoint, hi: ProjPoint, lo_open: bool, hi_open: bool) -> Result<OrderedInterval> {
        if lo.compare(&hi)? == Ordering::Greater {
            return Err(Error::Precondition(format!("interval endpoints out of order: {lo} > {hi}")));
        }
        Ok(OrderedInterval { lo, hi, lo_open, hi_open })
    }

    pub fn closed(lo: ProjPoint, hi: ProjPoint) -> OrderedInterval {
        OrderedInterval { lo, hi, lo_open: false, hi_open: false }
    }

    pub fn base(field: FieldId) -> OrderedInterval {
        OrderedInterval::closed(ProjPoint::zero(field), ProjPoint::infinity(field))
    }

    pub fn contains(&self, p: &ProjPoint) -> Result<bool> {
        let l = self.lo.compare(p)?;
        let h = p.compare(&self.hi)?;
        let lo_ok = l == Ordering::Less || (l == Ordering::Equal && !self.lo_open);
        let hi_ok = h == Ordering::Less || (h == Ordering::Equal && !self.hi_open);
        Ok(lo_ok && hi_ok)
    }

    /// An upper bound for `hi - lo`, `inf` when `hi = inf`.
    pub fn diameter_bound(&self) -> f64 {
        let (Some(lo), Some(hi)) = (self.lo.value(), self.hi.value()) else { return f64::INFINITY };
        let eps = BigRational::new(BigInt::one(), BigInt::one() << 80usize);
        let (_, up) = (&hi - &lo).approx(0, &eps);
        // to_f64 rounds to nearest, so pad by a few ulps
        up.to_f64().map_or(f64::INFINITY, |x| x * (1.0 + 1e-12) + 1e-24)
    }

    /// Contained in `other` as sets.
    pub fn is_subset_of(&self, other: &OrderedInterval) -> Result<bool> {
        let l = other.lo.compare(&self.lo)?;
        let h = self.hi.compare(&other.hi)?;
        let lo_ok = l == Ordering::Less || (l == Ordering::Equal && (!other.lo_open || self.lo_open));
        let hi_ok = h == Ordering::Less || (h == Ordering::Equal && (!other.hi_open || self.hi_open));
        Ok(lo_ok && hi_ok)
    }
}

impl fmt::Display for OrderedInterval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let l = if self.lo_open { '(' } else { '[' };
        let r = if self.hi_open { ')' } else { ']' };
        write!(f, "{l}{}, {}{r}", self.lo, self.hi)
    }
}

/// `true` if `gcd(a1, a2)` is a unit, i.e. the coordinates are coprime.
pub fn is_coprime(p: &ProjPoint) -> bool {
    let (x, y) = p.coords();
    match euclid_gcd(x, y) {
        Ok(g) => crate::exactfield::is_unit(&g),
        Err(_) => false,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(s: &str, f: FieldId) -> ProjPoint {
        ProjPoint::parse(s, f).unwrap()
    }

    #[test]
    fn parabolic_fixes_infinity() {
        let m = UniMat::from_i64s(FieldId::Sqrt2, [&[1], &[1], &[0], &[1]]).unwrap();
        assert_eq!(m.act(&ProjPoint::infinity(FieldId::Sqrt2)), ProjPoint::infinity(FieldId::Sqrt2));
        assert!(m.is_parabolic());
    }

    #[test]
    fn column_read_off() {
        let f = FieldId::Tau;
        let a1 = UniMat::parse(f, ["0", "1", "1", "tau"]).unwrap();
        assert_eq!(a1.act(&ProjPoint::infinity(f)), ProjPoint::zero(f));
        let f = FieldId::Sqrt6;
        let a9 = UniMat::parse(f, ["2", "-1 + sqrt6", "3 + sqrt6", "2 + sqrt6"]).unwrap();
        assert_eq!(a9.act(&ProjPoint::zero(f)), p("(-1 + sqrt6)/(2 + sqrt6)", f));
        assert_eq!(a9.positivity(), Positivity::Strict);
    }

    #[test]
    fn positivity_classes() {
        let f = FieldId::Sqrt2;
        let a1 = UniMat::parse(f, ["1", "0", "2 + sqrt2", "1"]).unwrap();
        assert_eq!(a1.positivity(), Positivity::Positive);
        assert_eq!(UniMat::identity(f).positivity(), Positivity::None);
        let neg = UniMat::parse(f, ["-1", "0", "-2 - sqrt2", "-1"]).unwrap();
        assert_eq!(neg, a1);
    }

    #[test]
    fn ordering_examples() {
        let f = FieldId::Sqrt6;
        assert_eq!(ProjPoint::zero(f).compare(&ProjPoint::infinity(f)).unwrap(), Ordering::Less);
        assert_eq!(p("5 - 2*sqrt6", f).compare(&p("(8 - 3*sqrt6)/5", f)).unwrap(), Ordering::Less);
        let t = FieldId::Tau;
        assert_eq!(p("1/tau", t).compare(&ProjPoint::one(t)).unwrap(), Ordering::Less);
        assert!(p("-1", t).compare(&ProjPoint::one(t)).is_err());
    }

    #[test]
    fn rejects_non_unimodular() {
        assert!(matches!(
            UniMat::from_i64s(FieldId::Sqrt3, [&[2], &[0], &[0], &[1]]),
            Err(Error::NotUnimodular(_))
        ));
    }

    #[test]
    fn from_pair_removes_common_factor() {
        let f = FieldId::Sqrt2;
        let x = ProjPoint::from_pair(parse_elem("2 + sqrt2", f).unwrap(), parse_elem("sqrt2", f).unwrap()).unwrap();
        assert!(is_coprime(&x));
        assert_eq!(x, p("1 + sqrt2", f));
    }
}

use alloc::string::ToString;
use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Ordering;
use core::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::{FieldId, Sign};
use crate::{Error, Result};

/// An element `(n_0 + n_1 w + .. + n_(d-1) w^(d-1)) / den` of a field.
///
/// The representation is normalised (`den > 0`, `gcd(n_0, .., n_(d-1), den) = 1`)
/// so derived equality and hashing are structural.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct FieldElem {
    field: FieldId,
    num: Vec<BigInt>,
    den: BigInt,
}

impl FieldElem {
    pub fn from_parts(field: FieldId, num: Vec<BigInt>, den: BigInt) -> Result<FieldElem> {
        if den.is_zero() {
            return Err(Error::DivisionByZero);
        }
        let n = field.degree();
        if num.len() > n {
            return Err(Error::Precondition("too many coordinates".to_string()));
        }
        let mut num = num;
        num.resize(n, BigInt::zero());
        let mut x = FieldElem { field, num, den };
        x.normalize();
        Ok(x)
    }

    pub fn from_rationals(field: FieldId, coords: &[BigRational]) -> FieldElem {
        let n = field.degree();
        assert!(coords.len() <= n, "too many coordinates");
        let mut den = BigInt::one();
        for c in coords {
            den = den.lcm(c.denom());
        }
        let mut num: Vec<BigInt> = coords.iter().map(|c| c.numer() * (&den / c.denom())).collect();
        num.resize(n, BigInt::zero());
        let mut x = FieldElem { field, num, den };
        x.normalize();
        x
    }

    pub fn from_i64s(field: FieldId, coords: &[i64]) -> FieldElem {
        let num = coords.iter().map(|&c| BigInt::from(c)).collect();
        FieldElem::from_parts(field, num, BigInt::one()).expect("nonzero denominator")
    }

    pub fn from_int(field: FieldId, v: impl Into<BigInt>) -> FieldElem {
        FieldElem::from_rational(field, BigRational::from_integer(v.into()))
    }

    pub fn from_rational(field: FieldId, v: BigRational) -> FieldElem {
        FieldElem::from_rationals(field, &[v])
    }

    pub fn zero(field: FieldId) -> FieldElem {
        FieldElem { field, num: vec![BigInt::zero(); field.degree()], den: BigInt::one() }
    }

    pub fn one(field: FieldId) -> FieldElem {
        FieldElem::from_int(field, 1)
    }

    /// The generator `w` of the integral basis.
    pub fn generator(field: FieldId) -> FieldElem {
        let mut num = vec![BigInt::zero(); field.degree()];
        num[1] = BigInt::one();
        FieldElem { field, num, den: BigInt::one() }
    }

    fn normalize(&mut self) {
        if self.den.is_negative() {
            self.den = -core::mem::take(&mut self.den);
            for c in &mut self.num {
                *c = -core::mem::take(c);
            }
        }
        let mut g = self.den.clone();
        for c in &self.num {
            g = g.gcd(c);
        }
        if !g.is_one() && !g.is_zero() {
            self.den /= &g;
            for c in &mut self.num {
                *c /= &g;
            }
        }
        if self.num.iter().all(Zero::is_zero) {
            self.den = BigInt::one();
        }
    }

    pub fn field(&self) -> FieldId {
        self.field
    }

    /// Integer numerator coordinates.
    pub fn numer(&self) -> &[BigInt] {
        &self.num
    }

    pub fn denom(&self) -> &BigInt {
        &self.den
    }

    pub fn coords(&self) -> Vec<BigRational> {
        self.num.iter().map(|c| BigRational::new(c.clone(), self.den.clone())).collect()
    }

    pub fn coord(&self, i: usize) -> BigRational {
        BigRational::new(self.num[i].clone(), self.den.clone())
    }

    pub fn is_zero(&self) -> bool {
        self.num.iter().all(Zero::is_zero)
    }

    pub fn is_one(&self) -> bool {
        self.den.is_one() && self.num[0].is_one() && self.num[1..].iter().all(Zero::is_zero)
    }

    /// Integral in the sense of the basis `1, w, ..`, which is an integral basis
    /// of the ring of integers for all five fields.
    pub fn is_integral(&self) -> bool {
        self.den.is_one()
    }

    pub fn as_rational(&self) -> Option<BigRational> {
        if self.num[1..].iter().all(Zero::is_zero) {
            Some(BigRational::new(self.num[0].clone(), self.den.clone()))
        } else {
            None
        }
    }

    fn check(&self, other: &FieldElem) -> Result<()> {
        if self.field != other.field {
            Err(Error::FieldMismatch(self.field, other.field))
        } else {
            Ok(())
        }
    }

    pub fn checked_add(&self, other: &FieldElem) -> Result<FieldElem> {
        self.check(other)?;
        let num = self
            .num
            .iter()
            .zip(&other.num)
            .map(|(a, b)| a * &other.den + b * &self.den)
            .collect();
        let mut x = FieldElem { field: self.field, num, den: &self.den * &other.den };
        x.normalize();
        Ok(x)
    }

    pub fn checked_sub(&self, other: &FieldElem) -> Result<FieldElem> {
        self.checked_add(&-other)
    }

    pub fn checked_mul(&self, other: &FieldElem) -> Result<FieldElem> {
        self.check(other)?;
        let d = self.field.descriptor();
        let n = d.degree();
        let mut prod = vec![BigInt::zero(); 2 * n - 1];
        for (i, a) in self.num.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.num.iter().enumerate() {
                prod[i + j] += a * b;
            }
        }
        // Reduce from the top using w^n = sum r_i w^i.
        let red: Vec<i64> = d.reduction().collect();
        for k in (n..prod.len()).rev() {
            let top = core::mem::take(&mut prod[k]);
            if top.is_zero() {
                continue;
            }
            for (i, &r) in red.iter().enumerate() {
                if r != 0 {
                    prod[k - n + i] += &top * r;
                }
            }
        }
        prod.truncate(n);
        let mut x = FieldElem { field: self.field, num: prod, den: &self.den * &other.den };
        x.normalize();
        Ok(x)
    }

    pub fn scale(&self, q: &BigRational) -> FieldElem {
        let num = self.num.iter().map(|c| c * q.numer()).collect();
        let mut x = FieldElem { field: self.field, num, den: &self.den * q.denom() };
        x.normalize();
        x
    }

    pub fn scale_int(&self, k: &BigInt) -> FieldElem {
        let num = self.num.iter().map(|c| c * k).collect();
        let mut x = FieldElem { field: self.field, num, den: self.den.clone() };
        x.normalize();
        x
    }

    pub fn pow(&self, e: u32) -> FieldElem {
        let mut acc = FieldElem::one(self.field);
        let mut base = self.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            base = &base * &base;
            e >>= 1;
        }
        acc
    }

    /// Image under the automorphism with index `j` (0 is the identity).
    pub fn automorphism(&self, j: usize) -> FieldElem {
        if j == 0 {
            return self.clone();
        }
        let img = FieldElem::from_i64s(self.field, self.field.descriptor().automorphisms[j]);
        // Horner in the image of the generator.
        let mut acc = FieldElem::zero(self.field);
        for c in self.num.iter().rev() {
            acc = &(&acc * &img) + &FieldElem::from_int(self.field, c.clone());
        }
        acc.scale(&BigRational::new(BigInt::one(), self.den.clone()))
    }

    /// Galois conjugate in a quadratic field.
    pub fn conj(&self) -> Result<FieldElem> {
        if !self.field.is_quadratic() {
            return Err(Error::NotQuadratic(self.field));
        }
        Ok(self.automorphism(1))
    }

    /// All conjugates, identity first.
    pub fn conjugates(&self) -> Vec<FieldElem> {
        (0..self.field.degree()).map(|j| self.automorphism(j)).collect()
    }

    /// Product of the non-identity conjugates, so that `x * cofactor = N(x)`.
    pub fn norm_cofactor(&self) -> FieldElem {
        let mut acc = FieldElem::one(self.field);
        for j in 1..self.field.degree() {
            acc = &acc * &self.automorphism(j);
        }
        acc
    }

    pub fn norm(&self) -> BigRational {
        let n = self * &self.norm_cofactor();
        n.as_rational().expect("norm is rational")
    }

    pub fn trace(&self) -> BigRational {
        let mut acc = FieldElem::zero(self.field);
        for c in self.conjugates() {
            acc = &acc + &c;
        }
        acc.as_rational().expect("trace is rational")
    }

    pub fn inverse(&self) -> Result<FieldElem> {
        if self.is_zero() {
            return Err(Error::DivisionByZero);
        }
        let cof = self.norm_cofactor();
        let n = (self * &cof).as_rational().expect("norm is rational");
        Ok(cof.scale(&n.recip()))
    }

    pub fn try_div(&self, other: &FieldElem) -> Result<FieldElem> {
        self.check(other)?;
        self.checked_mul(&other.inverse()?)
    }

    /// Value of the field's minimal polynomial at `self`.
    pub fn eval_min_poly(&self) -> FieldElem {
        let coeffs = self.field.descriptor().monic_coeffs();
        let mut acc = FieldElem::zero(self.field);
        for c in coeffs.iter().rev() {
            acc = &(&acc * self) + &FieldElem::from_int(self.field, c.clone());
        }
        acc
    }

    /// Interval `[L, U]` with `2^(bits (d-1)) * den * sigma_emb(x)` in it, for the
    /// root bracket at precision `bits`.
    fn eval_interval(&self, emb: usize, bits: u32) -> (BigInt, BigInt, u32) {
        let d = self.field.descriptor();
        let n = d.degree();
        let br = d.bracket(emb, bits);
        let b = br.bits as usize;
        let mut lo = BigInt::zero();
        let mut hi = BigInt::zero();
        // power interval of w^i scaled by 2^(b i)
        let mut plo = BigInt::one();
        let mut phi = BigInt::one();
        for (i, c) in self.num.iter().enumerate() {
            if i > 0 {
                let cands = [&plo * &br.lo, &plo * &br.hi, &phi * &br.lo, &phi * &br.hi];
                let mn = cands.iter().min().unwrap().clone();
                let mx = cands.iter().max().unwrap().clone();
                plo = mn;
                phi = mx;
            }
            if c.is_zero() {
                continue;
            }
            let sh = b * (n - 1 - i);
            let (a, z) = if c.is_positive() { (c * &plo, c * &phi) } else { (c * &phi, c * &plo) };
            lo += a << sh;
            hi += z << sh;
        }
        (lo, hi, br.bits * (n as u32 - 1))
    }

    fn start_bits(&self) -> u32 {
        let m = self.num.iter().map(|c| c.bits()).max().unwrap_or(0);
        64 + m as u32
    }

    /// Sign of the real embedding with index `emb` (0 is the identity
    /// embedding, where the generator is the root in the first isolating
    /// interval).
    pub fn sign_at(&self, emb: usize) -> Sign {
        if self.is_zero() {
            return Sign::Zero;
        }
        let mut bits = self.start_bits();
        loop {
            let (lo, hi, _) = self.eval_interval(emb, bits);
            if lo.is_positive() {
                return Sign::Positive;
            }
            if hi.is_negative() {
                return Sign::Negative;
            }
            bits *= 2;
        }
    }

    pub fn sign(&self) -> Sign {
        self.sign_at(0)
    }

    pub fn is_positive(&self) -> bool {
        self.sign() == Sign::Positive
    }

    pub fn is_negative(&self) -> bool {
        self.sign() == Sign::Negative
    }

    /// Totally positive: positive under every real embedding.
    pub fn is_totally_positive(&self) -> bool {
        (0..self.field.degree()).all(|j| self.sign_at(j) == Sign::Positive)
    }

    pub fn abs(&self) -> FieldElem {
        if self.is_negative() {
            -self
        } else {
            self.clone()
        }
    }

    /// Compare in the identity embedding.
    pub fn cmp_real(&self, other: &FieldElem) -> Ordering {
        (self - other).sign().to_ordering()
    }

    pub fn max_real<'a>(&'a self, other: &'a FieldElem) -> &'a FieldElem {
        if self.cmp_real(other) == Ordering::Less {
            other
        } else {
            self
        }
    }

    pub fn min_real<'a>(&'a self, other: &'a FieldElem) -> &'a FieldElem {
        if self.cmp_real(other) == Ordering::Greater {
            other
        } else {
            self
        }
    }

    /// Rational interval of width at most `eps` containing `sigma_emb(x)`.
    pub fn approx(&self, emb: usize, eps: &BigRational) -> (BigRational, BigRational) {
        if let Some(q) = self.as_rational() {
            return (q.clone(), q);
        }
        let mut bits = self.start_bits();
        loop {
            let (lo, hi, sc) = self.eval_interval(emb, bits);
            let scale = (BigInt::one() << sc as usize) * &self.den;
            let l = BigRational::new(lo, scale.clone());
            let h = BigRational::new(hi, scale);
            if &(&h - &l) <= eps {
                return (l, h);
            }
            bits *= 2;
        }
    }

    /// Approximation with relative error below `2^-60` in the given embedding.
    pub fn to_f64_at(&self, emb: usize) -> f64 {
        if self.is_zero() {
            return 0.0;
        }
        // Find a scale where the interval no longer straddles zero, then tighten.
        let mut bits = self.start_bits();
        loop {
            let (lo, hi, sc) = self.eval_interval(emb, bits);
            if (lo.is_positive() || hi.is_negative()) && {
                let w = &hi - &lo;
                let m = lo.abs().min(hi.abs());
                (w << 64usize) <= m
            } {
                let scale = (BigInt::one() << sc as usize) * &self.den;
                return BigRational::new(lo + hi, scale * 2).to_f64().unwrap_or(f64::NAN);
            }
            bits *= 2;
        }
    }

    pub fn to_f64(&self) -> f64 {
        self.to_f64_at(0)
    }

    /// `ln |sigma_emb(x)|`, accurate to about 1e-15 relative, for any size of
    /// coordinates.
    pub fn ln_abs_at(&self, emb: usize) -> f64 {
        assert!(!self.is_zero(), "logarithm of zero");
        let mut bits = self.start_bits();
        loop {
            let (lo, hi, sc) = self.eval_interval(emb, bits);
            if lo.is_positive() || hi.is_negative() {
                let w = &hi - &lo;
                let m = lo.abs().min(hi.abs());
                if (w << 64usize) <= m {
                    let mid = (lo + hi).abs();
                    return ln_bigint(&mid) - ln_bigint(&self.den) - (sc as f64 + 1.0) * core::f64::consts::LN_2;
                }
            }
            bits *= 2;
        }
    }
}

/// Natural logarithm of a positive big integer.
pub(crate) fn ln_bigint(x: &BigInt) -> f64 {
    assert!(x.is_positive(), "logarithm of a non-positive integer");
    let b = x.bits();
    if b <= 1000 {
        return libm::log(x.to_f64().unwrap());
    }
    let shift = b - 900;
    let top: BigInt = x >> shift as usize;
    libm::log(top.to_f64().unwrap()) + shift as f64 * core::f64::consts::LN_2
}

macro_rules! binop {
    ($tr:ident, $m:ident, $checked:ident) => {
        impl<'a> $tr<&'a FieldElem> for &'a FieldElem {
            type Output = FieldElem;
            fn $m(self, rhs: &'a FieldElem) -> FieldElem {
                self.$checked(rhs).expect("field mismatch")
            }
        }
        impl $tr<FieldElem> for FieldElem {
            type Output = FieldElem;
            fn $m(self, rhs: FieldElem) -> FieldElem {
                self.$checked(&rhs).expect("field mismatch")
            }
        }
    };
}

binop!(Add, add, checked_add);
binop!(Sub, sub, checked_sub);
binop!(Mul, mul, checked_mul);

impl Neg for &FieldElem {
    type Output = FieldElem;
    fn neg(self) -> FieldElem {
        FieldElem {
            field: self.field,
            num: self.num.iter().map(|c| -c).collect(),
            den: self.den.clone(),
        }
    }
}

impl Neg for FieldElem {
    type Output = FieldElem;
    fn neg(self) -> FieldElem {
        -&self
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn e(f: FieldId, c: &[i64]) -> FieldElem {
        FieldElem::from_i64s(f, c)
    }

    #[test]
    fn golden_ratio_squares_to_itself_plus_one() {
        let t = FieldElem::generator(FieldId::Tau);
        assert_eq!(&t * &t, e(FieldId::Tau, &[1, 1]));
    }

    #[test]
    fn units_have_norm_one() {
        let u = e(FieldId::Sqrt6, &[5, 2]);
        assert_eq!(&u * &u.conj().unwrap(), FieldElem::one(FieldId::Sqrt6));
        let v = e(FieldId::Sqrt2, &[1, 1]);
        assert_eq!(v.norm(), BigRational::from_integer((-1).into()));
    }

    #[test]
    fn lam7_cubic_relation() {
        let l = FieldElem::generator(FieldId::Lambda7);
        assert_eq!(l.pow(3), e(FieldId::Lambda7, &[-1, 2, 1]));
        assert!(l.eval_min_poly().is_zero());
        let x = l.to_f64();
        assert!((x - 2.0 * libm::cos(core::f64::consts::PI / 7.0)).abs() < 1e-14);
        assert!((l.to_f64_at(1) - 2.0 * libm::cos(3.0 * core::f64::consts::PI / 7.0)).abs() < 1e-14);
        assert!((l.to_f64_at(2) - 2.0 * libm::cos(5.0 * core::f64::consts::PI / 7.0)).abs() < 1e-14);
    }

    #[test]
    fn signs_of_close_quantities() {
        assert_eq!(e(FieldId::Sqrt6, &[3, -1]).sign(), Sign::Positive);
        assert_eq!(e(FieldId::Sqrt6, &[3, -1]).sign_at(1), Sign::Positive);
        assert_eq!(e(FieldId::Sqrt6, &[-2, 1]).sign_at(1), Sign::Negative);
        // 99^2 - 2 * 70^2 = 1, so 99 - 70 sqrt2 is tiny and positive
        assert_eq!(e(FieldId::Sqrt2, &[99, -70]).sign(), Sign::Positive);
        assert_eq!(e(FieldId::Sqrt2, &[-99, 70]).sign(), Sign::Negative);
    }

    #[test]
    fn inverse_roundtrip_cubic() {
        let x = e(FieldId::Lambda7, &[3, -2, 5]);
        let y = x.inverse().unwrap();
        assert!((&x * &y).is_one());
        assert_eq!(x.norm(), {
            let c = x.conjugates();
            (&(&c[0] * &c[1]) * &c[2]).as_rational().unwrap()
        });
    }

    #[test]
    fn mismatch_is_an_error() {
        let a = FieldElem::one(FieldId::Sqrt2);
        let b = FieldElem::one(FieldId::Sqrt3);
        assert_eq!(a.checked_add(&b), Err(Error::FieldMismatch(FieldId::Sqrt2, FieldId::Sqrt3)));
    }

    #[test]
    fn ln_of_huge_value() {
        let x = FieldElem::from_int(FieldId::Sqrt2, BigInt::from(10).pow(400u32));
        assert!((x.ln_abs_at(0) - 400.0 * libm::log(10.0)).abs() < 1e-9);
    }
}

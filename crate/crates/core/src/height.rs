//! Absolute (Weil) heights of points of the projective line.
//!
//! For a point with coprime integral coordinates every nonarchimedean place
//! contributes a factor one, so `H(a)^d` is the product over the real
//! embeddings of `max(|s(a1)|, |s(a2)|)`. Each factor is `+-s(c)` for one of the
//! coordinates, hence the product is itself an element of the (Galois) field.

use core::cmp::Ordering;
use core::fmt;

use crate::exactfield::{FieldElem, Sign};
use crate::projective::ProjPoint;

/// `H(a)^d` as an exact field element, `d` the degree of the field.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HeightSq {
    h2: FieldElem,
}

impl HeightSq {
    pub fn of(p: &ProjPoint) -> HeightSq {
        let (x, y) = p.coords();
        let field = p.field();
        let diff = &(x * x) - &(y * y);
        let mut h2 = FieldElem::one(field);
        for j in 0..field.degree() {
            let pick = if diff.sign_at(j) == Sign::Negative { y } else { x };
            let factor = pick.automorphism(j);
            let factor = if pick.sign_at(j) == Sign::Negative { -factor } else { factor };
            h2 = &h2 * &factor;
        }
        HeightSq { h2 }
    }

    /// The exact value of `H^d`.
    pub fn value(&self) -> &FieldElem {
        &self.h2
    }

    pub fn degree(&self) -> usize {
        self.h2.field().degree()
    }

    /// `(1/d) ln H^d`.
    pub fn log_height(&self) -> f64 {
        self.h2.ln_abs_at(0) / self.degree() as f64
    }

    /// `H` itself, for display.
    pub fn height(&self) -> f64 {
        libm::exp(self.log_height())
    }
}

impl PartialOrd for HeightSq {
    fn partial_cmp(&self, other: &HeightSq) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for HeightSq {
    fn cmp(&self, other: &HeightSq) -> Ordering {
        self.h2.cmp_real(&other.h2)
    }
}

impl fmt::Display for HeightSq {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.h2)
    }
}

pub fn height_sq(p: &ProjPoint) -> HeightSq {
    HeightSq::of(p)
}

pub fn height_compare(p: &ProjPoint, q: &ProjPoint) -> Ordering {
    HeightSq::of(p).cmp(&HeightSq::of(q))
}

pub fn log_height(p: &ProjPoint) -> f64 {
    HeightSq::of(p).log_height()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactfield::{parse_elem, FieldId};

    #[test]
    fn trivial_points_have_height_one() {
        for f in FieldId::ALL {
            for p in [ProjPoint::zero(f), ProjPoint::one(f), ProjPoint::infinity(f)] {
                assert!(HeightSq::of(&p).value().is_one());
            }
        }
    }

    #[test]
    fn golden_ratio_height() {
        let f = FieldId::Tau;
        let t = ProjPoint::parse("tau", f).unwrap();
        assert_eq!(HeightSq::of(&t).value(), &parse_elem("tau", f).unwrap());
        assert_eq!(height_compare(&t, &ProjPoint::one(f)), Ordering::Greater);
    }

    #[test]
    fn cubic_height_is_product_of_three() {
        let f = FieldId::Lambda7;
        let p = ProjPoint::parse("3/lam7", f).unwrap();
        let h = HeightSq::of(&p);
        let x = parse_elem("lam7", f).unwrap();
        let mut expect = 1.0;
        for j in 0..3 {
            expect *= libm::fmax(3.0, libm::fabs(x.to_f64_at(j)));
        }
        assert!((h.value().to_f64() - expect).abs() < 1e-9);
    }
}

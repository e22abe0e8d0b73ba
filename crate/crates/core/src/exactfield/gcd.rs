use alloc::string::ToString;
use alloc::vec::Vec;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::Signed;

use super::FieldElem;
use crate::{Error, Result};

/// Nearest integer, ties to even.
fn round_half_even(q: &BigRational) -> BigInt {
    let fl = q.floor().to_integer();
    let frac = q - BigRational::from_integer(fl.clone());
    let half = BigRational::new(1.into(), 2.into());
    match frac.cmp(&half) {
        core::cmp::Ordering::Less => fl,
        core::cmp::Ordering::Greater => fl + 1,
        core::cmp::Ordering::Equal => {
            if fl.is_even() {
                fl
            } else {
                fl + 1
            }
        }
    }
}

fn require_integral(x: &FieldElem) -> Result<()> {
    if x.is_integral() {
        Ok(())
    } else {
        Err(Error::NotIntegral(x.to_string()))
    }
}

/// Euclidean division `a = q b + r` with `|N(r)| < |N(b)|`.
///
/// The quotient is the coordinatewise nearest rounding of `a / b`. When that
/// does not shrink the norm (it happens in `Z[sqrt6]`, e.g. for `a/b = sqrt6/2`)
/// the quotients within distance two of it are tried and the one of smallest
/// remainder norm is taken.
pub fn euclid_divmod(a: &FieldElem, b: &FieldElem) -> Result<(FieldElem, FieldElem)> {
    require_integral(a)?;
    require_integral(b)?;
    if b.is_zero() {
        return Err(Error::DivisionByZero);
    }
    let field = a.field();
    let e = a.try_div(b)?;
    let base: Vec<BigInt> = e.coords().iter().map(round_half_even).collect();
    let nb = b.norm().abs();
    let q0 = FieldElem::from_parts(field, base.clone(), 1.into())?;
    let r0 = a - &(&q0 * b);
    if r0.norm().abs() < nb {
        return Ok((q0, r0));
    }
    let n = base.len();
    let mut best: Option<(BigRational, FieldElem, FieldElem)> = None;
    let mut off = alloc::vec![-2i64; n];
    loop {
        let coords: Vec<BigInt> = base.iter().zip(&off).map(|(c, &o)| c + o).collect();
        let q = FieldElem::from_parts(field, coords, 1.into())?;
        let r = a - &(&q * b);
        let nr = r.norm().abs();
        if nr < nb && best.as_ref().is_none_or(|(m, _, _)| &nr < m) {
            best = Some((nr, q, r));
        }
        let mut i = 0;
        while i < n {
            off[i] += 1;
            if off[i] > 2 {
                off[i] = -2;
                i += 1;
            } else {
                break;
            }
        }
        if i == n {
            break;
        }
    }
    best.map(|(_, q, r)| (q, r)).ok_or(Error::NormNotDecreasing(field))
}

/// A greatest common divisor of two integral elements, normalised to be
/// positive in the identity embedding (`gcd(0, 0) = 0`).
pub fn euclid_gcd(a: &FieldElem, b: &FieldElem) -> Result<FieldElem> {
    require_integral(a)?;
    require_integral(b)?;
    if a.field() != b.field() {
        return Err(Error::FieldMismatch(a.field(), b.field()));
    }
    let mut x = a.clone();
    let mut y = b.clone();
    while !y.is_zero() {
        let (_, r) = euclid_divmod(&x, &y)?;
        x = y;
        y = r;
    }
    Ok(x.abs())
}

/// An integral element of norm `+-1`.
pub fn is_unit(x: &FieldElem) -> bool {
    x.is_integral() && !x.is_zero() && x.norm().abs() == BigRational::from_integer(1.into())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactfield::FieldId;

    fn e(f: FieldId, c: &[i64]) -> FieldElem {
        FieldElem::from_i64s(f, c)
    }

    #[test]
    fn gcd_with_common_factor() {
        let g = euclid_gcd(&e(FieldId::Sqrt2, &[2, 1]), &e(FieldId::Sqrt2, &[0, 1])).unwrap();
        // 2 + sqrt2 = sqrt2 (sqrt2 + 1), so the gcd is sqrt2 up to a unit
        let q = g.try_div(&e(FieldId::Sqrt2, &[0, 1])).unwrap();
        assert!(is_unit(&q));
    }

    #[test]
    fn coprime_pair_in_sqrt6() {
        let g = euclid_gcd(&e(FieldId::Sqrt6, &[703, -240]), &e(FieldId::Sqrt6, &[380, 0])).unwrap();
        assert!(is_unit(&g));
    }

    #[test]
    fn sqrt6_needs_neighbour_quotient() {
        // sqrt6 / 2 rounds to 0 (ties to even), leaving remainder sqrt6 of norm -6,
        // which does not drop below N(2) = 4
        let a = e(FieldId::Sqrt6, &[0, 1]);
        let b = e(FieldId::Sqrt6, &[2, 0]);
        let (q, r) = euclid_divmod(&a, &b).unwrap();
        assert_eq!(&(&q * &b) + &r, a);
        assert!(r.norm().abs() < b.norm().abs());
    }

    #[test]
    fn non_integral_rejected() {
        let a = FieldElem::from_rational(FieldId::Tau, BigRational::new(1.into(), 2.into()));
        assert!(matches!(euclid_gcd(&a, &a), Err(Error::NotIntegral(_))));
    }

    #[test]
    fn gcd_in_lam7() {
        let l = FieldElem::generator(FieldId::Lambda7);
        let a = &l * &e(FieldId::Lambda7, &[3, 1, 0]);
        let b = &l * &e(FieldId::Lambda7, &[1, 0, 2]);
        let g = euclid_gcd(&a, &b).unwrap();
        assert!(a.try_div(&g).unwrap().is_integral());
        assert!(b.try_div(&g).unwrap().is_integral());
        assert!(g.try_div(&l).unwrap().is_integral());
    }
}

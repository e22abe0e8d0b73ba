//! Seeded random points and words.

use num_bigint::BigInt;
use qcf_core::{CaseId, FieldElem, FieldId, OrderedInterval, ProjPoint};
use rand::Rng;

use crate::CliError;

/// Bound on the numerators and the common denominator of sampled points.
pub const COORD_BOUND: i64 = 10_000;

/// `|x|` for `x` with integral-basis numerators in `[-bound, bound]` and a
/// denominator in `[1, bound]`.
pub fn random_point<R: Rng>(rng: &mut R, field: FieldId, bound: i64) -> ProjPoint {
    let num: Vec<BigInt> = (0..field.degree()).map(|_| BigInt::from(rng.gen_range(-bound..=bound))).collect();
    let den = BigInt::from(rng.gen_range(1..=bound));
    let x = FieldElem::from_parts(field, num, den).expect("nonzero denominator");
    ProjPoint::from_elem(&x.abs())
}

/// A random point inside `window`, by rejection.
pub fn random_point_in<R: Rng>(rng: &mut R, window: &OrderedInterval, bound: i64) -> Result<ProjPoint, CliError> {
    let field = window.lo.field();
    for _ in 0..100_000 {
        let p = random_point(rng, field, bound);
        if window.contains(&p)? {
            return Ok(p);
        }
    }
    Err(CliError::Usage(format!("could not sample a point in {window}")))
}

pub fn random_word<R: Rng>(rng: &mut R, r: usize, len: usize) -> Vec<usize> {
    (0..len).map(|_| rng.gen_range(1..=r)).collect()
}

/// Parse a comma-separated word such as `2,10^9` (`a^n` repeats `a`).
/// Without commas, a single letter such as `13`.
pub fn parse_word(src: &str, case: CaseId) -> Result<Vec<usize>, CliError> {
    let bad = |part: &str| CliError::Usage(format!("bad word item `{part}`"));
    let mut out = Vec::new();
    for part in src.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        let (a, n) = match part.split_once('^') {
            Some((a, n)) => (a.trim(), n.trim().parse::<usize>().map_err(|_| bad(part))?),
            None => (part, 1),
        };
        let a: usize = a.parse().map_err(|_| bad(part))?;
        if a == 0 || a > case.r() {
            return Err(CliError::Usage(format!("letter {a} outside 1..={} for {case}", case.r())));
        }
        out.extend(std::iter::repeat_n(a, n));
    }
    if out.is_empty() {
        return Err(CliError::Usage("empty word".into()));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn words() {
        assert_eq!(parse_word("2,10^3", CaseId::C3_6).unwrap(), vec![2, 10, 10, 10]);
        assert_eq!(parse_word("13", CaseId::C4_6).unwrap(), vec![13]);
        assert!(parse_word("16", CaseId::C4_6).is_err());
        assert!(parse_word("", CaseId::C4_6).is_err());
    }
}

//! Height descent along the block split of an orbit.

use std::cmp::Ordering;

use qcf_core::blocks::{split_orbit, BlockFamily, Split};
use qcf_core::gaussmaps::OrbitStatus;
use qcf_core::{GaussMap, HeightSq, ProjPoint};

use crate::CliError;

#[derive(Clone, Debug)]
pub struct Descent {
    /// Digits of the orbit including the digit of its final point.
    pub word: Vec<usize>,
    pub points: Vec<ProjPoint>,
    /// Leading letters `r` skipped before splitting.
    pub offset: usize,
    pub split: Split,
    pub terminated: bool,
    /// Block boundaries (indices into `points`) at which the height did not
    /// drop, other than the permitted final `1 -> 0`.
    pub violations: Vec<usize>,
}

impl Descent {
    pub fn ok(&self) -> bool {
        self.terminated && self.violations.is_empty()
    }

    /// Absolute indices of the block boundaries.
    pub fn boundaries(&self) -> impl Iterator<Item = usize> + '_ {
        self.split.boundaries.iter().map(move |b| b + self.offset)
    }
}

/// Run the orbit of `x`, split it into blocks of `family` and compare heights
/// at consecutive boundaries.
pub fn descent(map: &GaussMap, family: &BlockFamily, x: &ProjPoint, max_steps: usize) -> Result<Descent, CliError> {
    let o = map.orbit(x, max_steps)?;
    let terminated = matches!(o.status, OrbitStatus::FixedPointReached { .. });
    let mut word = o.digits();
    let mut points: Vec<ProjPoint> = o.steps.iter().map(|s| s.point.clone()).collect();
    word.push(map.digit(&o.final_point)?);
    points.push(o.final_point.clone());
    let offset = word.iter().take_while(|&&a| a == map.r()).count().min(word.len() - 1);
    let split = split_orbit(family, &word[offset..])?;
    let (zero, one) = (ProjPoint::zero(map.field()), ProjPoint::one(map.field()));
    let b: Vec<usize> = split.boundaries.iter().map(|b| b + offset).collect();
    let mut violations = Vec::new();
    for i in 1..b.len() {
        let (p, q) = (&points[b[i - 1]], &points[b[i]]);
        let ok = match HeightSq::of(p).cmp(&HeightSq::of(q)) {
            Ordering::Greater => true,
            Ordering::Equal => i == b.len() - 1 && *p == one && *q == zero,
            Ordering::Less => false,
        };
        if !ok {
            violations.push(b[i]);
        }
    }
    Ok(Descent { word, points, offset, split, terminated, violations })
}

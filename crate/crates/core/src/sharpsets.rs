//! The threshold function of a positive matrix over a real quadratic field
//! and the sets where the action of the matrix raises, keeps or lowers
//! heights.
//!
//! For `A = [[a, b], [c, d]]` positive (entries `>= 0` up to sign),
//!
//! ```text
//! f(x) = ((a x + b) v (c x + d)) / (x v 1)
//! t    = |a' + c'| v |a' - c'| v |b' + d'| v |b' - d'|
//! ```
//!
//! where `'` is the Galois conjugate, and `E#`, `E=`, `E-` are the subsets of
//! `[0, inf]` where `f > t`, `f = t`, `f < t`.

use alloc::format;
use alloc::string::ToString;
use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Ordering;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive};

use crate::exactfield::FieldElem;
use crate::height::HeightSq;
use crate::projective::{OrderedInterval, Positivity, ProjPoint, UniMat};
use crate::{Error, Result};

fn require_positive(a: &UniMat) -> Result<()> {
    if !a.field().is_quadratic() {
        return Err(Error::NotQuadratic(a.field()));
    }
    if a.positivity() == Positivity::None {
        return Err(Error::NotPositive);
    }
    Ok(())
}

fn max2(x: FieldElem, y: FieldElem) -> FieldElem {
    if x.cmp_real(&y) == Ordering::Less {
        y
    } else {
        x
    }
}

/// `t(A)`.
pub fn t_of(a: &UniMat) -> Result<FieldElem> {
    require_positive(a)?;
    let [a, b, c, d] = a.entries().map(|x| x.conj().expect("quadratic"));
    let v = [&a + &c, &a - &c, &b + &d, &b - &d].map(|x| x.abs());
    let [p, q, r, s] = v;
    Ok(max2(max2(p, q), max2(r, s)))
}

/// `f_A(x)`, with `f(inf) = a v c`.
pub fn f_eval(a: &UniMat, x: &ProjPoint) -> Result<FieldElem> {
    require_positive(a)?;
    if !x.in_base_interval() {
        return Err(Error::OutsideBaseInterval(x.to_string()));
    }
    let (x1, x2) = x.coords();
    let [a, b, c, d] = a.entries();
    let num = max2(&(a * x1) + &(b * x2), &(c * x1) + &(d * x2));
    let den = max2(x1.clone(), x2.clone());
    num.try_div(&den)
}

/// A threshold on a coordinate in `[0, 1]`.
#[derive(Clone, Debug)]
enum Thr {
    NegInf,
    At(FieldElem),
    PosInf,
}

impl Thr {
    fn min(self, other: Thr) -> Thr {
        match (self, other) {
            (Thr::NegInf, _) | (_, Thr::NegInf) => Thr::NegInf,
            (Thr::PosInf, o) | (o, Thr::PosInf) => o,
            (Thr::At(x), Thr::At(y)) => Thr::At(if x.cmp_real(&y) == Ordering::Greater { y } else { x }),
        }
    }

    /// `< v` for the comparisons against `0` and `1`.
    fn cmp_const(&self, v: &FieldElem) -> Ordering {
        match self {
            Thr::NegInf => Ordering::Less,
            Thr::PosInf => Ordering::Greater,
            Thr::At(x) => x.cmp_real(v),
        }
    }
}

/// A subinterval of `[0, 1]` in the half-coordinate.
#[derive(Clone, Debug)]
struct Seg {
    lo: FieldElem,
    hi: FieldElem,
    lo_open: bool,
    hi_open: bool,
}

/// The three level sets of `max(s_1 u + i_1, s_2 u + i_2)` against `t` for `u` in `[0, 1]`.
struct HalfSets {
    gt: Option<Seg>,
    eq: Option<Seg>,
    lt: Option<Seg>,
}

fn half_sets(branches: [(&FieldElem, &FieldElem); 2], t: &FieldElem) -> HalfSets {
    let field = t.field();
    let zero = FieldElem::zero(field);
    let one = FieldElem::one(field);
    let mut gt = Thr::PosInf;
    let mut ge = Thr::PosInf;
    for (s, i) in branches {
        if s.is_zero() {
            let c = i.cmp_real(t);
            if c == Ordering::Greater {
                gt = gt.min(Thr::NegInf);
            }
            if c != Ordering::Less {
                ge = ge.min(Thr::NegInf);
            }
        } else {
            let th = (t - i).try_div(s).expect("nonzero slope");
            gt = gt.min(Thr::At(th.clone()));
            ge = ge.min(Thr::At(th));
        }
    }
    let full = |lo_open: bool| Seg { lo: zero.clone(), hi: one.clone(), lo_open, hi_open: false };
    let gt_set = if gt.cmp_const(&zero) == Ordering::Less {
        Some(full(false))
    } else if gt.cmp_const(&one) != Ordering::Less {
        None
    } else {
        let Thr::At(th) = &gt else { unreachable!() };
        Some(Seg { lo: th.clone(), hi: one.clone(), lo_open: true, hi_open: false })
    };
    let ge_set = if ge.cmp_const(&zero) != Ordering::Greater {
        Some(full(false))
    } else if ge.cmp_const(&one) == Ordering::Greater {
        None
    } else {
        let Thr::At(th) = &ge else { unreachable!() };
        Some(Seg { lo: th.clone(), hi: one.clone(), lo_open: false, hi_open: false })
    };
    let eq = match (&gt_set, &ge_set) {
        (_, None) => None,
        (None, Some(g)) => Some(g.clone()),
        (Some(s), Some(g)) => {
            if !s.lo_open {
                None
            } else {
                Some(Seg { lo: g.lo.clone(), hi: s.lo.clone(), lo_open: false, hi_open: false })
            }
        }
    };
    let lt = match &ge_set {
        None => Some(full(false)),
        Some(g) if g.lo.is_zero() => None,
        Some(g) => Some(Seg { lo: zero.clone(), hi: g.lo.clone(), lo_open: false, hi_open: true }),
    };
    HalfSets { gt: gt_set, eq, lt }
}

fn seg_identity(s: &Seg) -> OrderedInterval {
    OrderedInterval {
        lo: ProjPoint::from_elem(&s.lo),
        hi: ProjPoint::from_elem(&s.hi),
        lo_open: s.lo_open,
        hi_open: s.hi_open,
    }
}

/// Image of a segment of `y = 1/x`.
fn seg_inverted(s: &Seg) -> OrderedInterval {
    let inv = |y: &FieldElem| ProjPoint::from_pair(FieldElem::one(y.field()), y.clone()).expect("point");
    OrderedInterval { lo: inv(&s.hi), hi: inv(&s.lo), lo_open: s.hi_open, hi_open: s.lo_open }
}

/// Union of two pieces when they meet at a common endpoint.
fn merge(left: OrderedInterval, right: OrderedInterval) -> Vec<OrderedInterval> {
    if left.hi == right.lo && !(left.hi_open && right.lo_open) {
        vec![OrderedInterval { lo: left.lo, hi: right.hi, lo_open: left.lo_open, hi_open: right.hi_open }]
    } else {
        vec![left, right]
    }
}

/// The decomposition `[0, inf] = E# + E= + E-` for one matrix.
#[derive(Clone, Debug)]
pub struct EAnalysis {
    pub matrix: UniMat,
    pub t: FieldElem,
    pub f0: FieldElem,
    pub f1: FieldElem,
    pub finf: FieldElem,
    /// Empty, or an interval containing 1.
    pub esharp: Option<OrderedInterval>,
    /// At most two points, or a single interval (points are degenerate intervals).
    pub enatural: Vec<OrderedInterval>,
    pub eflat: Vec<OrderedInterval>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Region {
    Sharp,
    Natural,
    Flat,
}

impl EAnalysis {
    /// `I` is contained in the closure of `E#`.
    pub fn closure_contains(&self, i: &OrderedInterval) -> Result<bool> {
        match &self.esharp {
            None => Ok(false),
            Some(e) => {
                let cl = OrderedInterval::closed(e.lo.clone(), e.hi.clone());
                i.is_subset_of(&cl)
            }
        }
    }

    pub fn region_of(&self, x: &ProjPoint) -> Result<Region> {
        if let Some(e) = &self.esharp {
            if e.contains(x)? {
                return Ok(Region::Sharp);
            }
        }
        for e in &self.enatural {
            if e.contains(x)? {
                return Ok(Region::Natural);
            }
        }
        Ok(Region::Flat)
    }

    /// Boundary points of `E#` inside `[0, inf]` (its open endpoints).
    pub fn sharp_boundary(&self) -> Vec<ProjPoint> {
        let mut out = Vec::new();
        if let Some(e) = &self.esharp {
            if e.lo_open {
                out.push(e.lo.clone());
            }
            if e.hi_open {
                out.push(e.hi.clone());
            }
        }
        out
    }

    /// `E=` is a nondegenerate interval.
    pub fn natural_is_interval(&self) -> bool {
        self.enatural.iter().any(|e| e.lo != e.hi)
    }
}

pub fn e_sets(m: &UniMat) -> Result<EAnalysis> {
    let t = t_of(m)?;
    let f = m.field();
    let [a, b, c, d] = m.entries();
    let left = half_sets([(a, b), (c, d)], &t);
    let right = half_sets([(b, a), (d, c)], &t);
    let esharp = match (&left.gt, &right.gt) {
        (Some(l), Some(r)) => {
            let l = seg_identity(l);
            let r = seg_inverted(r);
            Some(OrderedInterval { lo: l.lo, hi: r.hi, lo_open: l.lo_open, hi_open: r.hi_open })
        }
        (None, None) => None,
        _ => unreachable!("both halves share the value at 1"),
    };
    let enatural = match (&left.eq, &right.eq) {
        (Some(l), Some(r)) => merge(seg_identity(l), seg_inverted(r)),
        (Some(l), None) => vec![seg_identity(l)],
        (None, Some(r)) => vec![seg_inverted(r)],
        (None, None) => Vec::new(),
    };
    let eflat = match (&left.lt, &right.lt) {
        (Some(l), Some(r)) => merge(seg_identity(l), seg_inverted(r)),
        (Some(l), None) => vec![seg_identity(l)],
        (None, Some(r)) => vec![seg_inverted(r)],
        (None, None) => Vec::new(),
    };
    Ok(EAnalysis {
        matrix: m.clone(),
        f0: f_eval(m, &ProjPoint::zero(f))?,
        f1: f_eval(m, &ProjPoint::one(f))?,
        finf: f_eval(m, &ProjPoint::infinity(f))?,
        t,
        esharp,
        enatural,
        eflat,
    })
}

/// A cornerpoint `(y, z)` of `y -> f(x) (|a'y + b'| v |c'y + d'|)`.
pub type Corner = (FieldElem, FieldElem);

/// The two cornerpoints at `x`, after swapping rows so that `|a'| < |c'|`.
pub fn cornerpoints(m: &UniMat, x: &ProjPoint) -> Result<(Corner, Corner)> {
    require_positive(m)?;
    let fx = f_eval(m, x)?;
    let [a, b, c, d] = m.entries().map(|e| e.conj().expect("quadratic"));
    let (a, b, c, d) = match a.abs().cmp_real(&c.abs()) {
        Ordering::Less => (a, b, c, d),
        Ordering::Greater => (c, d, a, b),
        Ordering::Equal => return Err(Error::DegenerateCorners),
    };
    let s1 = &c - &a;
    let s2 = &a + &c;
    let q1 = ((&b - &d).try_div(&s1)?, fx.try_div(&s1.abs())?);
    let q2 = ((&(-&b) - &d).try_div(&s2)?, fx.try_div(&s2.abs())?);
    Ok((q1, q2))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum HeightChange {
    Increase,
    Equal,
    Decrease,
}

#[derive(Clone, Debug)]
pub struct PointClass {
    pub change: HeightChange,
    pub region: Region,
    /// The outcome agrees with what the E-sets predict.
    pub consistent: bool,
}

/// Compare `H(A * beta)` with `H(beta)` and check the E-set prediction.
pub fn classify_point(m: &UniMat, beta: &ProjPoint) -> Result<PointClass> {
    let e = e_sets(m)?;
    classify_with(&e, beta)
}

pub fn classify_with(e: &EAnalysis, beta: &ProjPoint) -> Result<PointClass> {
    let m = &e.matrix;
    let image = m.act(beta);
    let change = match HeightSq::of(&image).cmp(&HeightSq::of(beta)) {
        Ordering::Greater => HeightChange::Increase,
        Ordering::Equal => HeightChange::Equal,
        Ordering::Less => HeightChange::Decrease,
    };
    let region = e.region_of(beta)?;
    let on_boundary = e.sharp_boundary().iter().any(|p| p == beta);
    let must_increase = region == Region::Sharp
        || (on_boundary && m.positivity() == Positivity::Strict && image != ProjPoint::one(m.field()));
    let consistent = !must_increase || change == HeightChange::Increase;
    Ok(PointClass { change, region, consistent })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum WitnessTarget {
    /// `H(A * beta) = H(beta)` with `beta` in an interval part of `E=`.
    Equal,
    /// `H(A * beta) < H(beta)` with `beta` in `E-`.
    Decrease,
}

/// Closed interval of floats `[lo, hi]` for an interval piece, clipped to `window`.
fn float_range(piece: &OrderedInterval, window: &OrderedInterval) -> Option<(f64, f64)> {
    let lo = piece.lo.to_f64().max(window.lo.to_f64());
    let hi = piece.hi.to_f64().min(window.hi.to_f64());
    if hi > lo {
        Some((lo, hi))
    } else {
        None
    }
}

fn dyadic(v: f64, bits: u32) -> BigRational {
    let scale = (1u64 << bits) as f64;
    let n = libm::round(v * scale);
    BigRational::new(BigInt::from(n as i64), BigInt::one() << bits as usize)
}

/// Find `beta` in `K` inside `window` realising `target`, by aiming at a box
/// `(beta, beta')` in `R^2` and verifying candidates exactly.
///
/// Any `beta = p + q w` with rational `p, q` has `beta' = p + q w'`, so a
/// target pair `(X, Y)` is reached by solving two linear equations and
/// rounding to dyadic rationals of growing precision.
pub fn witness_search(m: &UniMat, target: WitnessTarget, window: &OrderedInterval, budget: usize) -> Result<ProjPoint> {
    let e = e_sets(m)?;
    let field = m.field();
    let pieces: Vec<&OrderedInterval> = match target {
        WitnessTarget::Equal => e.enatural.iter().filter(|p| p.lo != p.hi).collect(),
        WitnessTarget::Decrease => e.eflat.iter().filter(|p| p.lo != p.hi).collect(),
    };
    let ranges: Vec<(f64, f64)> = pieces.iter().filter_map(|p| float_range(p, window)).collect();
    if ranges.is_empty() {
        return Err(Error::Precondition(format!(
            "no interval of positive length in the {} set meets {window}",
            match target {
                WitnessTarget::Equal => "E=",
                WitnessTarget::Decrease => "E-",
            }
        )));
    }
    let [a, b, c, d] = m.entries().map(|x| x.conj().expect("quadratic").to_f64());
    let [fa, fb, fc, fd] = m.entries().map(|x| x.to_f64());
    let g = |x: f64, y: f64| -> f64 {
        let fx = if x.is_infinite() { fa.max(fc) } else { (fa * x + fb).max(fc * x + fd) / x.max(1.0) };
        fx * (a * y + b).abs().max((c * y + d).abs()) - y.abs().max(1.0)
    };
    let w = FieldElem::generator(field);
    let w0 = w.to_f64();
    let w1 = w.conj()?.to_f64();
    let mut tried = 0usize;
    for &(lo, hi) in &ranges {
        let (lo, hi) = (lo, if hi.is_infinite() { lo.max(1.0) * 4.0 + 4.0 } else { hi });
        for xs in 1..16 {
            let x = lo + (hi - lo) * xs as f64 / 16.0;
            // candidate y values where the sign of g is right, scanning [-4, 4]
            for ys in 0..=64 {
                let y = -4.0 + 8.0 * ys as f64 / 64.0;
                let gv = g(x, y);
                let good = match target {
                    WitnessTarget::Equal => gv.abs() < 1e-9,
                    WitnessTarget::Decrease => gv < -1e-9,
                };
                if !good {
                    continue;
                }
                let qf = (x - y) / (w0 - w1);
                let pf = x - qf * w0;
                for bits in [4u32, 8, 12, 16, 20, 24, 30, 36, 42, 48] {
                    tried += 1;
                    if tried > budget {
                        return Err(Error::BudgetExhausted(format!("witness search after {budget} candidates")));
                    }
                    let p = FieldElem::from_rational(field, dyadic(pf, bits));
                    let q = FieldElem::from_rational(field, dyadic(qf, bits));
                    let beta_v = &p + &(&q * &w);
                    if beta_v.is_negative() {
                        continue;
                    }
                    let beta = ProjPoint::from_elem(&beta_v);
                    if !window.contains(&beta)? {
                        continue;
                    }
                    let region = e.region_of(&beta)?;
                    let want_region = match target {
                        WitnessTarget::Equal => Region::Natural,
                        WitnessTarget::Decrease => Region::Flat,
                    };
                    if region != want_region {
                        continue;
                    }
                    let pc = classify_with(&e, &beta)?;
                    let want = match target {
                        WitnessTarget::Equal => HeightChange::Equal,
                        WitnessTarget::Decrease => HeightChange::Decrease,
                    };
                    if pc.change == want {
                        return Ok(beta);
                    }
                }
            }
        }
    }
    Err(Error::BudgetExhausted(format!("no witness among {tried} candidates")))
}

/// Sample points `x` of `[0, 2]` on a uniform grid and report
/// `(x, f(phi(x)), t)` with `phi` the identity on `[0, 1]` and `(2 - x)^-1`
/// on `[1, 2]`.
pub fn sample_f_phi(m: &UniMat, samples: usize) -> Result<Vec<(f64, f64, f64)>> {
    let t = t_of(m)?.to_f64();
    let field = m.field();
    let n = samples.max(2);
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let x = BigRational::new(BigInt::from(2 * i as i64), BigInt::from((n - 1) as i64));
        let one = BigRational::one();
        let p = if x <= one {
            ProjPoint::from_elem(&FieldElem::from_rational(field, x.clone()))
        } else if x == BigRational::from_integer(2.into()) {
            ProjPoint::infinity(field)
        } else {
            let y = (BigRational::from_integer(2.into()) - &x).recip();
            ProjPoint::from_elem(&FieldElem::from_rational(field, y))
        };
        let fv = f_eval(m, &p)?.to_f64();
        out.push((x.to_f64().unwrap_or(f64::NAN), fv, t));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactfield::{parse_elem, FieldId};

    fn mat(f: FieldId, e: [&str; 4]) -> UniMat {
        UniMat::parse(f, e).unwrap()
    }
    fn el(s: &str, f: FieldId) -> FieldElem {
        parse_elem(s, f).unwrap()
    }
    fn pt(s: &str, f: FieldId) -> ProjPoint {
        ProjPoint::parse(s, f).unwrap()
    }

    #[test]
    fn example_matrices() {
        let f = FieldId::Sqrt6;
        let a9 = mat(f, ["2", "-1 + sqrt6", "3 + sqrt6", "2 + sqrt6"]);
        let e = e_sets(&a9).unwrap();
        // |b' + d'| = 2 sqrt6 - 1 dominates
        assert_eq!(e.t, el("-1 + 2*sqrt6", f));
        assert_eq!(e.f0.min_real(&e.finf), &el("2 + sqrt6", f));
        let s = e.esharp.clone().unwrap();
        assert_eq!((s.lo, s.hi, s.lo_open, s.hi_open), (pt("0", f), pt("inf", f), false, false));
        assert!(e.enatural.is_empty() && e.eflat.is_empty());

        let a13 = mat(f, ["1 + sqrt6", "3 - sqrt6", "2 + sqrt6", "1"]);
        let e = e_sets(&a13).unwrap();
        assert_eq!(e.t, el("4 + sqrt6", f));
        assert_eq!(e.f1, el("3 + sqrt6", f));
        assert!(e.esharp.is_none() && e.enatural.is_empty());
        assert_eq!(e.eflat, vec![OrderedInterval::base(f)]);
    }

    #[test]
    fn golden_first_matrix() {
        let f = FieldId::Tau;
        let a1 = mat(f, ["0", "1", "1", "tau"]);
        let e = e_sets(&a1).unwrap();
        let s = e.esharp.unwrap();
        assert_eq!((s.lo, s.hi, s.lo_open, s.hi_open), (pt("0", f), pt("tau^2", f), true, true));
        assert_eq!(e.t, el("1 + 1/tau", f));
    }

    #[test]
    fn parabolic_threshold() {
        let f = FieldId::Sqrt2;
        let p = mat(f, ["1", "1", "0", "1"]);
        assert_eq!(t_of(&p).unwrap(), el("2", f));
        let (q1, q2) = cornerpoints(&p, &ProjPoint::one(f)).unwrap();
        assert_eq!(q2, (el("-2", f), el("2", f)));
        assert_eq!(q1.1, el("2", f));
    }

    #[test]
    fn unit_interval_natural_set() {
        let f = FieldId::Sqrt2;
        let m = mat(f, ["0", "1 + sqrt2", "sqrt2 - 1", "1"]);
        let e = e_sets(&m).unwrap();
        assert_eq!(e.enatural, vec![OrderedInterval::closed(pt("0", f), pt("1", f))]);
        let w = witness_search(&m, WitnessTarget::Equal, &OrderedInterval::closed(pt("0", f), pt("1", f)), 100_000).unwrap();
        let pc = classify_point(&m, &w).unwrap();
        assert_eq!(pc.change, HeightChange::Equal);
    }

    #[test]
    fn decreasing_example_point() {
        let f = FieldId::Sqrt6;
        let a13 = mat(f, ["1 + sqrt6", "3 - sqrt6", "2 + sqrt6", "1"]);
        let beta = pt("(703 - 240*sqrt6)/380", f);
        let pc = classify_point(&a13, &beta).unwrap();
        assert_eq!(pc.change, HeightChange::Decrease);
        assert_eq!(a13.act(&beta), pt("(403 + 83*sqrt6)/(346 + 223*sqrt6)", f));
        let w = witness_search(&a13, WitnessTarget::Decrease, &OrderedInterval::base(f), 100_000).unwrap();
        assert_eq!(classify_point(&a13, &w).unwrap().change, HeightChange::Decrease);
    }

    #[test]
    fn rejects_cubic_and_non_positive() {
        let l = FieldId::Lambda7;
        let m = UniMat::parse(l, ["0", "1", "1", "lam7"]).unwrap();
        assert_eq!(t_of(&m), Err(Error::NotQuadratic(l)));
        let f = FieldId::Sqrt2;
        let m = mat(f, ["1", "-1", "0", "1"]);
        assert_eq!(t_of(&m), Err(Error::NotPositive));
        let m = mat(f, ["1", "1", "0", "1"]);
        assert!(matches!(
            witness_search(&m, WitnessTarget::Equal, &OrderedInterval::base(f), 10),
            Err(Error::Precondition(_))
        ));
    }
}

//! The ten built-in slow continued-fraction maps on `[0, inf]`, their digits,
//! orbits and first-return maps.
//!
//! A map is given by matrices `A_1, .., A_r` whose images `A_a * [0, inf]`
//! tile `[0, inf]` from left to right; on the `a`-th tile the map acts by
//! `A_a^-1`.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Ordering;
use core::fmt;
use core::str::FromStr;

use num_rational::BigRational;
use num_traits::Zero;

use crate::exactfield::{parse_elem, FieldElem, FieldId};
use crate::height::HeightSq;
use crate::projective::{OrderedInterval, ProjPoint, UniMat};
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum CaseId {
    C2_5,
    C3_4,
    C3_5,
    C3_6,
    C4Inf,
    C5Inf,
    C6Inf,
    C4_6,
    C4_12,
    C2_7Cubic,
}

impl CaseId {
    pub const ALL: [CaseId; 10] = [
        CaseId::C2_5,
        CaseId::C3_4,
        CaseId::C3_5,
        CaseId::C3_6,
        CaseId::C4Inf,
        CaseId::C5Inf,
        CaseId::C6Inf,
        CaseId::C4_6,
        CaseId::C4_12,
        CaseId::C2_7Cubic,
    ];

    pub fn name(self) -> &'static str {
        match self {
            CaseId::C2_5 => "2_5",
            CaseId::C3_4 => "3_4",
            CaseId::C3_5 => "3_5",
            CaseId::C3_6 => "3_6",
            CaseId::C4Inf => "4_inf",
            CaseId::C5Inf => "5_inf",
            CaseId::C6Inf => "6_inf",
            CaseId::C4_6 => "4_6",
            CaseId::C4_12 => "4_12",
            CaseId::C2_7Cubic => "2_7_cubic",
        }
    }

    pub fn field(self) -> FieldId {
        match self {
            CaseId::C2_5 | CaseId::C3_5 | CaseId::C5Inf => FieldId::Tau,
            CaseId::C3_4 | CaseId::C4Inf => FieldId::Sqrt2,
            CaseId::C3_6 | CaseId::C6Inf | CaseId::C4_12 => FieldId::Sqrt3,
            CaseId::C4_6 => FieldId::Sqrt6,
            CaseId::C2_7Cubic => FieldId::Lambda7,
        }
    }

    /// Size of the alphabet.
    pub fn r(self) -> usize {
        match self {
            CaseId::C2_5 => 4,
            CaseId::C3_4 => 6,
            CaseId::C3_5 => 8,
            CaseId::C3_6 => 10,
            CaseId::C4Inf => 7,
            CaseId::C5Inf => 9,
            CaseId::C6Inf => 11,
            CaseId::C4_6 => 15,
            CaseId::C4_12 => 33,
            CaseId::C2_7Cubic => 6,
        }
    }

    /// The triangle group signature `(l, m, inf)`, with `m = 0` for `inf`.
    pub fn signature(self) -> (u32, u32) {
        match self {
            CaseId::C2_5 => (2, 5),
            CaseId::C3_4 => (3, 4),
            CaseId::C3_5 => (3, 5),
            CaseId::C3_6 => (3, 6),
            CaseId::C4Inf => (4, 0),
            CaseId::C5Inf => (5, 0),
            CaseId::C6Inf => (6, 0),
            CaseId::C4_6 => (4, 6),
            CaseId::C4_12 => (4, 12),
            CaseId::C2_7Cubic => (2, 7),
        }
    }
}

impl fmt::Display for CaseId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for CaseId {
    type Err = Error;
    fn from_str(s: &str) -> Result<CaseId> {
        CaseId::ALL.into_iter().find(|c| c.name() == s).ok_or_else(|| Error::UnknownCase(s.to_string()))
    }
}

/// `2cos(pi/n)` in the field of the case, for the `n` that occur.
fn lambda(field: FieldId, n: u32) -> FieldElem {
    let s = match n {
        2 => "0",
        3 => "1",
        4 => "sqrt2",
        5 => "tau",
        6 => "sqrt3",
        7 => "lam7",
        _ => unreachable!("no lambda_{n} in the built-in cases"),
    };
    parse_elem(s, field).expect("built-in constant")
}

fn mat(field: FieldId, e: [&str; 4]) -> UniMat {
    UniMat::parse(field, e).expect("built-in matrix")
}

fn mat_elems(a: FieldElem, b: FieldElem, c: FieldElem, d: FieldElem) -> UniMat {
    UniMat::new(a, b, c, d).expect("built-in matrix")
}

/// Products `R_m^i Q_l^j`, sorted by image, with `F` appended at odd positions.
fn hecke_like(field: FieldId, l: u32, m: u32) -> Vec<UniMat> {
    let z = FieldElem::zero(field);
    let o = FieldElem::one(field);
    let f = mat_elems(z.clone(), o.clone(), o.clone(), z.clone());
    let q = mat_elems(lambda(field, l), o.clone(), -&o, z.clone());
    let rm = mat_elems(z, o.clone(), -&o, lambda(field, m));
    let mut prods: Vec<(ProjPoint, UniMat)> = Vec::new();
    for i in 1..m {
        for j in 1..l {
            let a = rm.pow(i).mul(&q.pow(j));
            let img = a.image_of_base();
            prods.push((img.lo, a));
        }
    }
    prods.sort_by(|x, y| x.0.cmp_unchecked(&y.0));
    prods
        .into_iter()
        .enumerate()
        .map(|(k, (_, a))| if k % 2 == 0 { a.mul(&f) } else { a })
        .collect()
}

/// `A_(1+2q) = (M P)^q M J`, `A_(2+2q) = (M P)^(q+1) J`, `A_(2l-1) = (M P)^(l-1) M J`.
fn l_inf_inf(field: FieldId, l: u32) -> Vec<UniMat> {
    let beta = &FieldElem::from_int(field, 2) + &lambda(field, l);
    let z = FieldElem::zero(field);
    let o = FieldElem::one(field);
    let j = mat_elems(o.clone(), z.clone(), z.clone(), -&o);
    let p = mat_elems(-&o, o.clone(), z.clone(), o.clone());
    let m = mat_elems(o.clone(), z, beta, -&o);
    let mp = m.mul(&p);
    let mut out = Vec::new();
    for q in 0..=(l - 2) {
        out.push(mp.pow(q).mul(&m).mul(&j));
        out.push(mp.pow(q + 1).mul(&j));
    }
    out.push(mp.pow(l - 1).mul(&m).mul(&j));
    out
}

/// The reflection-group construction with `U_1 = P_g`, `U_2 = P_g M_d`,
/// `U_3 = P_g M_d P_g` and `V_j` the alternating products of `M_b`, `P_a`.
fn four_m(pa: UniMat, mb: UniMat, pg: UniMat, md: UniMat, nv: u32) -> Vec<UniMat> {
    let u = [pg.clone(), pg.mul(&md), pg.mul(&md).mul(&pg)];
    let rot = mb.mul(&pa);
    let mut out = Vec::new();
    for jv in 1..=nv {
        let v = if jv % 2 == 0 { rot.pow(jv / 2) } else { rot.pow(jv / 2).mul(&mb) };
        let order: [usize; 3] = if jv % 2 == 1 { [2, 1, 0] } else { [0, 1, 2] };
        for i in order {
            out.push(v.mul(&u[i]));
        }
    }
    out
}

fn build_matrices(case: CaseId) -> Vec<UniMat> {
    let f = case.field();
    match case {
        CaseId::C2_5 => hecke_like(f, 2, 5),
        CaseId::C3_4 => hecke_like(f, 3, 4),
        CaseId::C3_5 => hecke_like(f, 3, 5),
        CaseId::C3_6 => hecke_like(f, 3, 6),
        CaseId::C2_7Cubic => hecke_like(f, 2, 7),
        CaseId::C4Inf => l_inf_inf(f, 4),
        CaseId::C5Inf => l_inf_inf(f, 5),
        CaseId::C6Inf => l_inf_inf(f, 6),
        CaseId::C4_6 => four_m(
            mat(f, ["-1", "3 - sqrt6", "0", "1"]),
            mat(f, ["1", "0", "3 + sqrt6", "-1"]),
            mat(f, ["-1", "2 - sqrt6", "0", "1"]),
            mat(f, ["1", "0", "-2 - sqrt6", "-1"]),
            5,
        ),
        CaseId::C4_12 => four_m(
            mat(f, ["-1", "1", "0", "1"]),
            mat(f, ["1", "0", "2 + sqrt3", "-1"]),
            mat(f, ["-1", "1 - sqrt3", "0", "1"]),
            mat(f, ["1", "0", "-1 - sqrt3", "-1"]),
            11,
        ),
    }
}

/// A validated map.
#[derive(Clone, Debug)]
pub struct GaussMap {
    case: CaseId,
    mats: Vec<UniMat>,
    invs: Vec<UniMat>,
    /// `e_0 = 0 < e_1 < .. < e_r = inf`.
    endpoints: Vec<ProjPoint>,
}

/// One validated condition of a map.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CheckResult {
    pub condition: &'static str,
    pub ok: bool,
    pub detail: String,
}

impl GaussMap {
    /// Construct the map of `case` and check all partition conditions.
    pub fn build(case: CaseId) -> Result<GaussMap> {
        let mats = build_matrices(case);
        let map = GaussMap::from_matrices(case, mats)?;
        for c in map.validate() {
            if !c.ok {
                return Err(Error::InvalidMap { case: case.name().to_string(), condition: format!("{}: {}", c.condition, c.detail) });
            }
        }
        Ok(map)
    }

    /// Assemble from given matrices, reading the endpoints off the images.
    /// Only checks that the images are ordered intervals of `[0, inf]`.
    pub fn from_matrices(case: CaseId, mats: Vec<UniMat>) -> Result<GaussMap> {
        let field = case.field();
        if mats.is_empty() {
            return Err(Error::InvalidMap { case: case.name().to_string(), condition: "no matrices".to_string() });
        }
        let mut endpoints = vec![ProjPoint::zero(field)];
        for a in &mats {
            if a.field() != field {
                return Err(Error::FieldMismatch(field, a.field()));
            }
            let img = a.image_of_base();
            if !img.lo.in_base_interval() || !img.hi.in_base_interval() {
                return Err(Error::InvalidMap {
                    case: case.name().to_string(),
                    condition: format!("image {img} leaves [0, inf]"),
                });
            }
            endpoints.push(img.hi);
        }
        let invs = mats.iter().map(UniMat::inverse).collect();
        Ok(GaussMap { case, mats, invs, endpoints })
    }

    /// All partition conditions, each with its outcome.
    pub fn validate(&self) -> Vec<CheckResult> {
        let field = self.field();
        let r = self.r();
        let mut out = Vec::new();
        let mut push = |condition: &'static str, ok: bool, detail: String| out.push(CheckResult { condition, ok, detail });

        let mut tiling = true;
        let mut detail = String::new();
        for (i, a) in self.mats.iter().enumerate() {
            let img = a.image_of_base();
            if img.lo != self.endpoints[i] || img.hi != self.endpoints[i + 1] {
                tiling = false;
                detail = format!("A_{} * [0, inf] = {img}", i + 1);
                break;
            }
            if img.lo.cmp_unchecked(&img.hi) != Ordering::Less {
                tiling = false;
                detail = format!("I_{} is degenerate", i + 1);
                break;
            }
        }
        let first = self.endpoints[0].coords().0.is_zero();
        let last = self.endpoints[r].is_infinity();
        push("unimodular partition", tiling && first && last, if detail.is_empty() { format!("{} intervals", r) } else { detail });

        let bad_det = (1..=r).find(|&a| self.mats[a - 1].det() != if (r - a).is_multiple_of(2) { 1 } else { -1 });
        push(
            "det A_a = (-1)^(r-a)",
            bad_det.is_none(),
            match bad_det {
                Some(a) => format!("det A_{a} = {}", self.mats[a - 1].det()),
                None => String::new(),
            },
        );

        let ar = &self.mats[r - 1];
        let inf = ProjPoint::infinity(field);
        push(
            "A_r parabolic fixing inf",
            ar.det() == 1 && ar.act(&inf) == inf && ar.is_parabolic(),
            format!("A_r = {ar}"),
        );

        let mut cont = true;
        let mut detail = String::new();
        for a in 1..r {
            let e = &self.endpoints[a];
            let l = self.invs[a - 1].act(e);
            let rr = self.invs[a].act(e);
            if l != rr {
                cont = false;
                detail = format!("at e_{a}: {l} vs {rr}");
                break;
            }
        }
        push("continuity", cont, detail);

        let rank = rational_rank(self.endpoints[..r].iter().filter_map(|p| p.value()));
        push("endpoints span K", rank == field.degree(), format!("rank {rank}"));
        out
    }

    pub fn case(&self) -> CaseId {
        self.case
    }

    pub fn field(&self) -> FieldId {
        self.case.field()
    }

    pub fn r(&self) -> usize {
        self.mats.len()
    }

    /// `A_a`, `a` in `1..=r`.
    pub fn matrix(&self, a: usize) -> &UniMat {
        &self.mats[a - 1]
    }

    pub fn matrices(&self) -> &[UniMat] {
        &self.mats
    }

    pub fn inverse(&self, a: usize) -> &UniMat {
        &self.invs[a - 1]
    }

    pub fn endpoints(&self) -> &[ProjPoint] {
        &self.endpoints
    }

    /// `I_a = [e_(a-1), e_a]`.
    pub fn interval(&self, a: usize) -> OrderedInterval {
        OrderedInterval::closed(self.endpoints[a - 1].clone(), self.endpoints[a].clone())
    }

    pub fn det_a1(&self) -> i32 {
        self.mats[0].det()
    }

    pub fn check_letter(&self, a: usize) -> Result<()> {
        if a == 0 || a > self.r() {
            Err(Error::LetterOutOfRange { letter: a as u32, r: self.r() as u32 })
        } else {
            Ok(())
        }
    }

    /// Least `a` with `x <= e_a`.
    pub fn digit(&self, x: &ProjPoint) -> Result<usize> {
        if !x.in_base_interval() || x.field() != self.field() {
            return Err(Error::OutsideBaseInterval(x.to_string()));
        }
        let inner = &self.endpoints[1..];
        Ok(inner.partition_point(|e| e.cmp_unchecked(x) == Ordering::Less) + 1)
    }

    pub fn step(&self, x: &ProjPoint) -> Result<(usize, ProjPoint)> {
        let a = self.digit(x)?;
        Ok((a, self.invs[a - 1].act(x)))
    }

    /// `A_(w_0) .. A_(w_k)`.
    pub fn word_matrix(&self, word: &[usize]) -> Result<UniMat> {
        let mut acc = UniMat::identity(self.field());
        for &a in word {
            self.check_letter(a)?;
            acc = acc.mul(&self.mats[a - 1]);
        }
        Ok(acc)
    }

    /// The cylinder `A_(w_0) .. A_(w_k) * [0, inf]` of points whose symbolic
    /// orbit can start with `word`.
    pub fn cylinder(&self, word: &[usize]) -> Result<OrderedInterval> {
        Ok(self.word_matrix(word)?.image_of_base())
    }

    /// Iterate until a fixed point or cycle is hit, or `max_steps` points have
    /// been recorded.
    pub fn orbit(&self, x: &ProjPoint, max_steps: usize) -> Result<OrbitRecord> {
        let mut steps: Vec<OrbitStep> = Vec::new();
        let mut x = x.clone();
        // Brent's cycle detection over the orbit points
        let mut tortoise = x.clone();
        let mut tortoise_at = 0usize;
        let mut power = 1usize;
        let mut lam = 0usize;
        loop {
            let (a, y) = self.step(&x)?;
            if y == x {
                let m = &self.mats[a - 1];
                let status = if m.is_hyperbolic() {
                    OrbitStatus::HyperbolicFixedPoint { period: 1 }
                } else {
                    OrbitStatus::FixedPointReached { period: 1 }
                };
                return Ok(OrbitRecord { steps, final_point: x, status, cycle: vec![a] });
            }
            if steps.len() >= max_steps {
                return Ok(OrbitRecord { steps, final_point: x, status: OrbitStatus::BudgetExhausted, cycle: Vec::new() });
            }
            let h2 = HeightSq::of(&x);
            steps.push(OrbitStep { digit: a, point: x, h2 });
            x = y;
            lam += 1;
            if x == tortoise {
                let period = steps.len() - tortoise_at;
                let cycle: Vec<usize> = steps[tortoise_at..].iter().map(|s| s.digit).collect();
                let m = self.word_matrix(&cycle)?;
                let status = if m.is_hyperbolic() {
                    OrbitStatus::HyperbolicFixedPoint { period }
                } else {
                    OrbitStatus::FixedPointReached { period }
                };
                return Ok(OrbitRecord { steps, final_point: x, status, cycle });
            }
            if lam == power {
                tortoise = x.clone();
                tortoise_at = steps.len();
                power *= 2;
                lam = 0;
            }
        }
    }

    /// Step from `x` in `[0, e_(r-1)]` until the orbit is back in that window.
    pub fn first_return(&self, x: &ProjPoint, max_steps: usize) -> Result<FirstReturn> {
        let r = self.r();
        let window = &self.endpoints[r - 1];
        if !x.in_base_interval() || x.cmp_unchecked(window) == Ordering::Greater {
            return Err(Error::Precondition(format!("{x} is outside the return window [0, {window}]")));
        }
        let mut y = x.clone();
        let mut word = Vec::new();
        for k in 1..=max_steps {
            let (a, z) = self.step(&y)?;
            word.push(a);
            if z == y {
                return Ok(FirstReturn { point: z, steps: k, word, status: ReturnStatus::Diverged });
            }
            y = z;
            if y.cmp_unchecked(window) != Ordering::Greater {
                return Ok(FirstReturn { point: y, steps: k, word, status: ReturnStatus::Returned });
            }
            if y.is_infinity() {
                return Ok(FirstReturn { point: y, steps: k, word, status: ReturnStatus::Diverged });
            }
        }
        Ok(FirstReturn { point: y, steps: max_steps, word, status: ReturnStatus::BudgetExhausted })
    }

    /// Check the fixed point `lam^2 - lam - 1` of the cubic map.
    pub fn fixed_point_check(&self) -> Result<FixedPointReport> {
        if self.case != CaseId::C2_7Cubic {
            return Err(Error::Precondition("fixed-point check is defined for the cubic map only".to_string()));
        }
        let f = self.field();
        let xi = ProjPoint::from_elem(&parse_elem("lam7^2 - lam7 - 1", f)?);
        let in_i1 = self.interval(1).contains(&xi)?;
        let a1 = self.matrix(1);
        let fixed = self.inverse(1).act(&xi) == xi;
        let sq = a1.mul(a1);
        let trace = sq.trace();
        let hyperbolic = trace.abs().cmp_real(&FieldElem::from_int(f, 2)) == Ordering::Greater;
        let digit = self.digit(&xi)?;
        Ok(FixedPointReport { xi, in_i1, digit, fixed, trace_sq: trace, hyperbolic })
    }
}

fn rational_rank(points: impl Iterator<Item = FieldElem>) -> usize {
    let mut rows: Vec<Vec<BigRational>> = points.map(|x| x.coords()).collect();
    let ncols = rows.first().map_or(0, |r| r.len());
    let mut rank = 0;
    for col in 0..ncols {
        let Some(piv) = (rank..rows.len()).find(|&i| !rows[i][col].is_zero()) else { continue };
        rows.swap(rank, piv);
        let p = rows[rank].clone();
        for (i, row) in rows.iter_mut().enumerate() {
            if i != rank && !row[col].is_zero() {
                let factor = &row[col] / &p[col];
                for (x, y) in row.iter_mut().zip(&p) {
                    *x -= &factor * y;
                }
            }
        }
        rank += 1;
    }
    rank
}

#[derive(Clone, Debug)]
pub struct OrbitStep {
    pub digit: usize,
    pub point: ProjPoint,
    pub h2: HeightSq,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OrbitStatus {
    /// The orbit closed up on a point fixed by a non-hyperbolic element
    /// (a parabolic fixed point such as `inf`).
    FixedPointReached { period: usize },
    /// The orbit closed up on a point fixed by a hyperbolic element.
    HyperbolicFixedPoint { period: usize },
    BudgetExhausted,
}

impl OrbitStatus {
    pub fn label(&self) -> &'static str {
        match self {
            OrbitStatus::FixedPointReached { .. } => "fixed-point-reached",
            OrbitStatus::HyperbolicFixedPoint { .. } => "hyperbolic-fixed-point-detected",
            OrbitStatus::BudgetExhausted => "step-budget-exhausted",
        }
    }
}

/// Orbit points `x_0, x_1, ..` with their digits; `final_point` is the first
/// point not recorded (the fixed point, the point closing the cycle, or the
/// point at which the budget ran out).
#[derive(Clone, Debug)]
pub struct OrbitRecord {
    pub steps: Vec<OrbitStep>,
    pub final_point: ProjPoint,
    pub status: OrbitStatus,
    /// Periodic tail of the symbolic orbit when a cycle was found.
    pub cycle: Vec<usize>,
}

impl OrbitRecord {
    pub fn digits(&self) -> Vec<usize> {
        self.steps.iter().map(|s| s.digit).collect()
    }

    /// Index of the final point, i.e. the number of applications of the map.
    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ReturnStatus {
    Returned,
    /// Landed on a fixed point outside the window (`inf`).
    Diverged,
    BudgetExhausted,
}

#[derive(Clone, Debug)]
pub struct FirstReturn {
    pub point: ProjPoint,
    pub steps: usize,
    pub word: Vec<usize>,
    pub status: ReturnStatus,
}

#[derive(Clone, Debug)]
pub struct FixedPointReport {
    pub xi: ProjPoint,
    pub in_i1: bool,
    pub digit: usize,
    pub fixed: bool,
    pub trace_sq: FieldElem,
    pub hyperbolic: bool,
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pt(s: &str, f: FieldId) -> ProjPoint {
        ProjPoint::parse(s, f).unwrap()
    }

    #[test]
    fn all_cases_validate() {
        for c in CaseId::ALL {
            let m = GaussMap::build(c).unwrap_or_else(|e| panic!("{c}: {e}"));
            assert_eq!(m.r(), c.r(), "{c}");
        }
    }

    #[test]
    fn golden_partition() {
        let m = GaussMap::build(CaseId::C2_5).unwrap();
        let f = FieldId::Tau;
        let expect = [pt("0", f), pt("1/tau", f), pt("1", f), pt("tau", f), pt("inf", f)];
        assert_eq!(m.endpoints(), &expect);
        assert_eq!(m.matrix(1), &mat(f, ["0", "1", "1", "tau"]));
        assert_eq!(m.matrix(2), &mat(f, ["tau", "1", "tau", "tau"]));
        assert_eq!(m.matrix(3), &mat(f, ["tau", "tau", "tau", "1"]));
        assert_eq!(m.matrix(4), &mat(f, ["1", "tau", "0", "1"]));
    }

    #[test]
    fn octagon_partition() {
        let m = GaussMap::build(CaseId::C4Inf).unwrap();
        let f = FieldId::Sqrt2;
        let e: Vec<ProjPoint> =
            ["0", "1 - sqrt2/2", "-1 + sqrt2", "1/2", "2 - sqrt2", "sqrt2/2", "1", "inf"].iter().map(|s| pt(s, f)).collect();
        assert_eq!(m.endpoints(), e.as_slice());
        assert_eq!(m.matrix(1), &mat(f, ["1", "0", "2 + sqrt2", "1"]));
        assert_eq!(m.matrix(2), &mat(f, ["1", "1", "2 + sqrt2", "1 + sqrt2"]));
    }

    #[test]
    fn reflection_group_cases() {
        let f = FieldId::Sqrt6;
        let m = GaussMap::build(CaseId::C4_6).unwrap();
        assert_eq!(m.endpoints()[1], pt("5 - 2*sqrt6", f));
        assert_eq!(m.endpoints()[2], pt("(8 - 3*sqrt6)/5", f));
        assert_eq!(m.endpoints()[14], pt("1", f));
        assert_eq!(m.matrix(9), &mat(f, ["2", "-1 + sqrt6", "3 + sqrt6", "2 + sqrt6"]));
        assert_eq!(m.matrix(13), &mat(f, ["1 + sqrt6", "3 - sqrt6", "2 + sqrt6", "1"]));
        let f = FieldId::Sqrt3;
        let m = GaussMap::build(CaseId::C3_6).unwrap();
        assert_eq!(m.matrix(2), &mat(f, ["1", "1", "sqrt3", "1 + sqrt3"]));
        assert_eq!(m.matrix(10), &mat(f, ["1", "1 + sqrt3", "0", "1"]));
    }

    #[test]
    fn digits_and_steps() {
        let f = FieldId::Tau;
        let m = GaussMap::build(CaseId::C2_5).unwrap();
        assert_eq!(m.digit(&pt("1/tau", f)).unwrap(), 1);
        assert_eq!(m.digit(&pt("inf", f)).unwrap(), 4);
        assert_eq!(m.step(&pt("1/2", f)).unwrap(), (1, pt("2 - tau", f)));
        assert_eq!(m.step(&pt("1", f)).unwrap(), (2, pt("inf", f)));
        assert!(m.digit(&pt("-1", f)).is_err());
    }

    #[test]
    fn zero_is_parabolic_for_positive_det() {
        let m = GaussMap::build(CaseId::C4Inf).unwrap();
        let o = m.orbit(&ProjPoint::zero(FieldId::Sqrt2), 10).unwrap();
        assert!(o.is_empty());
        assert_eq!(o.status, OrbitStatus::FixedPointReached { period: 1 });
        assert_eq!(o.cycle, vec![1]);
    }

    #[test]
    fn cubic_fixed_point() {
        let m = GaussMap::build(CaseId::C2_7Cubic).unwrap();
        let rep = m.fixed_point_check().unwrap();
        assert!(rep.in_i1 && rep.fixed && rep.hyperbolic);
        assert_eq!(rep.trace_sq, parse_elem("lam7^2 + 2", FieldId::Lambda7).unwrap());
        let o = m.orbit(&rep.xi, 10).unwrap();
        assert_eq!(o.status, OrbitStatus::HyperbolicFixedPoint { period: 1 });
    }
}

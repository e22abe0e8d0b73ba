//! Exact analysis of matrix families `A P^k` (and `A P^k B Q^j`) for all
//! integers `k, j >= 0` at once.
//!
//! With `P` parabolic, `P^k = I + k (P - I)`, so the entries of a family are
//! polynomials in the star parameters with coefficients in `K`. Every
//! decision about E-sets reduces to signs of such polynomials. A nonzero
//! polynomial has constant sign beyond an explicit root bound, so a decision
//! procedure run with an asymptotic sign oracle is valid for all parameters
//! past the largest bound it consulted. The finitely many smaller parameters
//! are then enumerated exactly.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::vec;
use alloc::vec::Vec;
use core::cell::Cell;
use core::cmp::Ordering;

use crate::exactfield::{FieldElem, FieldId, Sign};
use crate::projective::{OrderedInterval, ProjPoint, UniMat};
use crate::{Error, Result};

/// Largest parameter range enumerated exactly below a tail threshold.
pub const MAX_ENUMERATION: u64 = 1 << 14;

/// Number of star parameters a [`Poly`] may carry.
pub const VARS: usize = 2;

/// A polynomial in the parameters `k = x0` and `j = x1` over `K`.
#[derive(Clone, Debug, PartialEq)]
pub struct Poly {
    field: FieldId,
    terms: BTreeMap<[u32; VARS], FieldElem>,
}

impl Poly {
    pub fn zero(field: FieldId) -> Poly {
        Poly { field, terms: BTreeMap::new() }
    }

    pub fn constant(c: FieldElem) -> Poly {
        let mut p = Poly::zero(c.field());
        p.push([0, 0], c);
        p
    }

    /// The parameter `x_var` itself.
    pub fn var(field: FieldId, var: usize) -> Poly {
        let mut e = [0; VARS];
        e[var] = 1;
        let mut p = Poly::zero(field);
        p.push(e, FieldElem::one(field));
        p
    }

    fn push(&mut self, e: [u32; VARS], c: FieldElem) {
        if c.is_zero() {
            return;
        }
        let merged = match self.terms.remove(&e) {
            Some(old) => &old + &c,
            None => c,
        };
        if !merged.is_zero() {
            self.terms.insert(e, merged);
        }
    }

    pub fn field(&self) -> FieldId {
        self.field
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&[u32; VARS], &FieldElem)> {
        self.terms.iter()
    }

    pub fn uses(&self, var: usize) -> bool {
        self.terms.keys().any(|e| e[var] > 0)
    }

    pub fn degree(&self, var: usize) -> u32 {
        self.terms.keys().map(|e| e[var]).max().unwrap_or(0)
    }

    /// The value when no parameter occurs.
    pub fn as_constant(&self) -> Option<FieldElem> {
        if self.uses(0) || self.uses(1) {
            return None;
        }
        Some(self.terms.get(&[0, 0]).cloned().unwrap_or_else(|| FieldElem::zero(self.field)))
    }

    pub fn add(&self, o: &Poly) -> Poly {
        let mut r = self.clone();
        for (e, c) in &o.terms {
            r.push(*e, c.clone());
        }
        r
    }

    pub fn neg(&self) -> Poly {
        Poly { field: self.field, terms: self.terms.iter().map(|(e, c)| (*e, -c)).collect() }
    }

    pub fn sub(&self, o: &Poly) -> Poly {
        self.add(&o.neg())
    }

    pub fn mul(&self, o: &Poly) -> Poly {
        let mut r = Poly::zero(self.field);
        for (e1, c1) in &self.terms {
            for (e2, c2) in &o.terms {
                r.push([e1[0] + e2[0], e1[1] + e2[1]], c1 * c2);
            }
        }
        r
    }

    pub fn scale(&self, c: &FieldElem) -> Poly {
        self.mul(&Poly::constant(c.clone()))
    }

    /// Galois conjugate of the coefficients (the parameters are rational).
    pub fn conj(&self) -> Result<Poly> {
        let mut r = Poly::zero(self.field);
        for (e, c) in &self.terms {
            r.push(*e, c.conj()?);
        }
        Ok(r)
    }

    /// Substitute `x_var = value + shift`-style: replaces `x_var` by the
    /// polynomial `x_var + s` when `keep` is true, else by the constant `s`.
    fn substitute(&self, var: usize, s: i64, keep: bool) -> Poly {
        let field = self.field;
        let mut r = Poly::zero(field);
        let base = if keep {
            Poly::var(field, var).add(&Poly::constant(FieldElem::from_int(field, s)))
        } else {
            Poly::constant(FieldElem::from_int(field, s))
        };
        for (e, c) in &self.terms {
            let mut rest = *e;
            rest[var] = 0;
            let mut term = Poly::zero(field);
            term.push(rest, c.clone());
            for _ in 0..e[var] {
                term = term.mul(&base);
            }
            r = r.add(&term);
        }
        r
    }

    /// `x_var := value`.
    pub fn eval_var(&self, var: usize, value: u64) -> Poly {
        self.substitute(var, value as i64, false)
    }

    /// `x_var := x_var + 1`.
    pub fn shift(&self, var: usize) -> Poly {
        self.substitute(var, 1, true)
    }

    /// Coefficients of the powers of `x_var` (as polynomials in the other variable).
    fn coeffs_in(&self, var: usize) -> Vec<Poly> {
        let n = self.degree(var) as usize;
        let mut out = vec![Poly::zero(self.field); n + 1];
        for (e, c) in &self.terms {
            let mut rest = *e;
            rest[var] = 0;
            out[e[var] as usize].push(rest, c.clone());
        }
        out
    }

    /// Leading constant coefficient of a polynomial in at most one variable.
    fn lc_univariate(&self) -> FieldElem {
        let var = if self.uses(1) { 1 } else { 0 };
        let d = self.degree(var);
        let mut e = [0; VARS];
        e[var] = d;
        self.terms.get(&e).cloned().unwrap_or_else(|| FieldElem::zero(self.field))
    }
}

/// Sum of the absolute values of all coefficients, as a float.
fn abs_sum(p: &Poly) -> f64 {
    p.terms.values().map(|c| c.to_f64().abs()).sum()
}

fn safe_ceil(x: f64) -> Result<u64> {
    if !x.is_finite() || x > MAX_ENUMERATION as f64 * 16.0 {
        return Err(Error::BudgetExhausted(format!("root bound {x} too large to enumerate")));
    }
    if x <= 0.0 {
        return Ok(0);
    }
    Ok(libm::ceil(x * (1.0 + 1e-9) + 1e-9) as u64 + 1)
}

/// A bound `B` such that the univariate nonzero `p` has no root in `[B, inf)`.
fn univariate_bound(p: &Poly) -> Result<u64> {
    let var = if p.uses(1) { 1 } else { 0 };
    let d = p.degree(var);
    if d == 0 {
        return Ok(0);
    }
    let coeffs: Vec<f64> = p.coeffs_in(var).iter().map(|c| c.as_constant().expect("univariate").to_f64()).collect();
    let lc = coeffs[d as usize].abs();
    if d == 1 {
        return safe_ceil(-coeffs[0] / coeffs[1]);
    }
    // Cauchy
    let m = coeffs[..d as usize].iter().map(|c| c.abs() / lc).fold(0.0, f64::max);
    safe_ceil(1.0 + m)
}

/// Decides signs of polynomials.
pub trait SignOracle {
    fn sign(&self, p: &Poly) -> Result<Sign>;
}

/// Signs of constant polynomials only.
pub struct Exact;

impl SignOracle for Exact {
    fn sign(&self, p: &Poly) -> Result<Sign> {
        p.as_constant()
            .map(|c| c.sign())
            .ok_or_else(|| Error::Symbolic("parameter left in an exact evaluation".into()))
    }
}

/// Signs for all sufficiently large parameters, recording how large is
/// large enough.
#[derive(Default)]
pub struct Tail {
    bound: [Cell<u64>; VARS],
}

impl Tail {
    pub fn new() -> Tail {
        Tail::default()
    }

    /// The recorded thresholds: every answer holds for `x_i >= bounds[i]`.
    pub fn bounds(&self) -> [u64; VARS] {
        [self.bound[0].get(), self.bound[1].get()]
    }

    fn raise(&self, var: usize, b: u64) {
        if b > self.bound[var].get() {
            self.bound[var].set(b);
        }
    }

    /// Two-variable sign with `outer` large first and then `inner` large
    /// uniformly, with crude thresholds; `None` when the inner root bound is
    /// not uniform.
    fn sign2(p: &Poly, outer: usize) -> Result<Option<(Sign, [u64; VARS])>> {
        let inner = 1 - outer;
        let qs = p.coeffs_in(inner);
        let lead = qs.last().expect("nonzero");
        let dn = lead.degree(outer);
        if qs.iter().any(|q| !q.is_zero() && q.degree(outer) > dn) {
            return Ok(None);
        }
        let mut kb = 0;
        for q in qs.iter().filter(|q| !q.is_zero()) {
            kb = kb.max(univariate_bound(q)?);
        }
        let lc = lead.lc_univariate().to_f64().abs();
        let lower: f64 = lead.terms.iter().filter(|(e, _)| e[outer] < dn).map(|(_, c)| c.to_f64().abs()).sum();
        kb = kb.max(safe_ceil(2.0 * lower / lc)?).max(1);
        let c = qs[..qs.len() - 1].iter().map(|q| 2.0 * abs_sum(q) / lc).fold(0.0, f64::max);
        let mut bounds = [0; VARS];
        bounds[outer] = kb;
        bounds[inner] = safe_ceil(1.0 + c)?;
        Ok(Some((lead.lc_univariate().sign(), bounds)))
    }
}

/// Candidate thresholds tried before falling back to root bounds.
const SHIFTS: [u64; 8] = [0, 1, 2, 3, 4, 8, 16, 32];

/// `p(x + shift)` has all coefficients of sign `s` or zero and a nonzero
/// constant term, so `p` has sign `s` wherever `x >= shift`.
fn certified_by_shift(p: &Poly, s: Sign, shift: [u64; VARS]) -> bool {
    let mut q = p.clone();
    for (v, &c) in shift.iter().enumerate() {
        if c > 0 && q.uses(v) {
            q = q.substitute(v, c as i64, true);
        }
    }
    q.terms.contains_key(&[0, 0]) && q.terms.values().all(|c| c.sign() == s)
}

impl SignOracle for Tail {
    fn sign(&self, p: &Poly) -> Result<Sign> {
        if p.is_zero() {
            return Ok(Sign::Zero);
        }
        let (s, crude) = match (p.uses(0), p.uses(1)) {
            (false, false) => return Ok(p.as_constant().expect("constant").sign()),
            (true, true) => match Tail::sign2(p, 0)? {
                Some(r) => r,
                None => Tail::sign2(p, 1)?.ok_or_else(|| Error::Symbolic("no uniform root bound in either order".into()))?,
            },
            (u0, _) => {
                let var = if u0 { 0 } else { 1 };
                let mut b = [0; VARS];
                b[var] = univariate_bound(p)?;
                (p.lc_univariate().sign(), b)
            }
        };
        let mut candidates: Vec<[u64; VARS]> = Vec::new();
        for &a in SHIFTS.iter().filter(|&&a| a < crude[0] || (a == 0 && crude[0] == 0)) {
            for &b in SHIFTS.iter().filter(|&&b| b < crude[1] || (b == 0 && crude[1] == 0)) {
                candidates.push([a, b]);
            }
        }
        candidates.sort_by_key(|c| c[0] + c[1]);
        let chosen = candidates.into_iter().find(|&c| certified_by_shift(p, s, c)).unwrap_or(crude);
        self.raise(0, chosen[0]);
        self.raise(1, chosen[1]);
        Ok(s)
    }
}

/// A 2x2 matrix of parameter polynomials.
#[derive(Clone, Debug, PartialEq)]
pub struct PMat {
    pub e: [Poly; 4],
}

impl PMat {
    pub fn from_mat(m: &UniMat) -> PMat {
        PMat { e: m.entries().map(|x| Poly::constant(x.clone())) }
    }

    pub fn identity(field: FieldId) -> PMat {
        PMat::from_mat(&UniMat::identity(field))
    }

    /// `P^{x_var}` for parabolic `P` with trace `+2`.
    pub fn parabolic_power(p: &UniMat, var: usize) -> Result<PMat> {
        let field = p.field();
        let two = FieldElem::from_int(field, 2);
        if !p.is_parabolic() || p.trace() != two {
            return Err(Error::Symbolic(format!("{p} is not a parabolic with trace 2")));
        }
        let x = Poly::var(field, var);
        let id = UniMat::identity(field);
        let e = [0, 1, 2, 3].map(|i| {
            let n = p.entries()[i] - id.entries()[i];
            let one = if i == 0 || i == 3 { Poly::constant(FieldElem::one(field)) } else { Poly::zero(field) };
            one.add(&x.scale(&n))
        });
        Ok(PMat { e })
    }

    pub fn mul(&self, o: &PMat) -> PMat {
        let [a, b, c, d] = &self.e;
        let [p, q, r, s] = &o.e;
        PMat { e: [a.mul(p).add(&b.mul(r)), a.mul(q).add(&b.mul(s)), c.mul(p).add(&d.mul(r)), c.mul(q).add(&d.mul(s))] }
    }

    pub fn eval_var(&self, var: usize, value: u64) -> PMat {
        PMat { e: self.e.clone().map(|p| p.eval_var(var, value)) }
    }

    pub fn shift(&self, var: usize) -> PMat {
        PMat { e: self.e.clone().map(|p| p.shift(var)) }
    }

    pub fn field(&self) -> FieldId {
        self.e[0].field()
    }

    /// The concrete matrix when no parameter remains.
    pub fn to_mat(&self) -> Result<UniMat> {
        let [a, b, c, d] = self.e.clone().map(|p| p.as_constant());
        match (a, b, c, d) {
            (Some(a), Some(b), Some(c), Some(d)) => UniMat::new(a, b, c, d),
            _ => Err(Error::Symbolic("parameter left in matrix".into())),
        }
    }

    pub fn uses(&self, var: usize) -> bool {
        self.e.iter().any(|p| p.uses(var))
    }

    fn conj(&self) -> Result<[Poly; 4]> {
        let [a, b, c, d] = &self.e;
        Ok([a.conj()?, b.conj()?, c.conj()?, d.conj()?])
    }
}

// Generic comparisons through an oracle.

fn cmp(o: &dyn SignOracle, x: &Poly, y: &Poly) -> Result<Ordering> {
    Ok(o.sign(&x.sub(y))?.to_ordering())
}

fn abs(o: &dyn SignOracle, x: &Poly) -> Result<Poly> {
    Ok(if o.sign(x)? == Sign::Negative { x.neg() } else { x.clone() })
}

fn max(o: &dyn SignOracle, x: Poly, y: Poly) -> Result<Poly> {
    Ok(if cmp(o, &x, &y)? == Ordering::Less { y } else { x })
}

fn constant(x: &FieldElem) -> Poly {
    Poly::constant(x.clone())
}

/// `t(A)` for a symbolic positive matrix.
pub fn t_sym(o: &dyn SignOracle, m: &PMat) -> Result<Poly> {
    let [a, b, c, d] = m.conj()?;
    let v = [a.add(&c), a.sub(&c), b.add(&d), b.sub(&d)];
    let mut best = abs(o, &v[0])?;
    for x in &v[1..] {
        best = max(o, best, abs(o, x)?)?;
    }
    Ok(best)
}

/// `t(A)` kept as the maximum of the candidates `+-(a' +- c')`,
/// `+-(b' +- d')`, so comparing against it never asks which one wins.
#[derive(Clone, Debug)]
pub struct TMax {
    cands: Vec<Poly>,
}

impl TMax {
    pub fn new(m: &PMat) -> Result<TMax> {
        let [a, b, c, d] = m.conj()?;
        let v = [a.add(&c), a.sub(&c), b.add(&d), b.sub(&d)];
        Ok(TMax { cands: v.iter().flat_map(|x| [x.neg(), x.clone()]).collect() })
    }

    pub fn single(t: Poly) -> TMax {
        TMax { cands: vec![t] }
    }

    /// `t w < x` (`strict`) or `t w <= x`, for `w >= 0`.
    fn below(&self, o: &dyn SignOracle, w: &Poly, x: &Poly, strict: bool) -> Result<bool> {
        let mut verdict = Ok(true);
        for c in &self.cands {
            let ok = o.sign(&x.sub(&c.mul(w))).map(|s| s == Sign::Positive || (!strict && s == Sign::Zero));
            verdict = and(verdict, || ok);
            if verdict == Ok(false) {
                break;
            }
        }
        verdict
    }

    fn below_one(&self, o: &dyn SignOracle, x: &Poly) -> Result<bool> {
        self.below(o, &Poly::constant(FieldElem::one(x.field())), x, true)
    }
}

/// Kleene `or`: an undecided side is harmless when the other is true.
pub fn or(a: Result<bool>, b: impl FnOnce() -> Result<bool>) -> Result<bool> {
    match a {
        Ok(true) => Ok(true),
        Ok(false) => b(),
        Err(Error::Undecided) => match b() {
            Ok(true) => Ok(true),
            Ok(false) => Err(Error::Undecided),
            e => e,
        },
        e => e,
    }
}

/// Kleene `and`.
pub fn and(a: Result<bool>, b: impl FnOnce() -> Result<bool>) -> Result<bool> {
    match a {
        Ok(false) => Ok(false),
        Ok(true) => b(),
        Err(Error::Undecided) => match b() {
            Ok(false) => Ok(false),
            Ok(true) => Err(Error::Undecided),
            e => e,
        },
        e => e,
    }
}

/// `f(1) > t`, i.e. `E#` is nonempty.
pub fn esharp_nonempty(o: &dyn SignOracle, m: &PMat, t: &TMax) -> Result<bool> {
    let [a, b, c, d] = &m.e;
    or(t.below_one(o, &a.add(b)), || t.below_one(o, &c.add(d)))
}

/// `p` lies in the closure of `E#`, given that `E#` is nonempty.
fn closure_contains(o: &dyn SignOracle, m: &PMat, t: &TMax, p: &ProjPoint) -> Result<bool> {
    let (p1, p2) = p.coords();
    let [a, b, c, d] = &m.e;
    // half-coordinate u in [0, 1] with weight w: u = p1/p2 or p2/p1
    let left = p1.cmp_real(p2) != Ordering::Greater;
    let (u, w, branches) = if left {
        (constant(p1), constant(p2), [(a, b), (c, d)])
    } else {
        (constant(p2), constant(p1), [(b, a), (d, c)])
    };
    let hit = |(s, i): (&Poly, &Poly)| match o.sign(s)? {
        Sign::Zero => t.below_one(o, i),
        _ => t.below(o, &w, &s.mul(&u).add(&i.mul(&w)), false),
    };
    or(hit(branches[0]), || hit(branches[1]))
}

/// `I` is contained in the closure of `E#(A)`.
pub fn interval_in_closure(o: &dyn SignOracle, m: &PMat, t: &TMax, i: &OrderedInterval) -> Result<bool> {
    and(and(esharp_nonempty(o, m, t), || closure_contains(o, m, t, &i.lo)), || closure_contains(o, m, t, &i.hi))
}

/// `f(beta) = t`.
pub fn f_equals_t(o: &dyn SignOracle, m: &PMat, t: &TMax, beta: &ProjPoint) -> Result<bool> {
    let (b1, b2) = beta.coords();
    let bottom = constant(if b1.cmp_real(b2) == Ordering::Less { b2 } else { b1 });
    let (b1, b2) = (constant(b1), constant(b2));
    let [a, b, c, d] = &m.e;
    let u = [a.mul(&b1).add(&b.mul(&b2)), c.mul(&b1).add(&d.mul(&b2))];
    // max(u) = t * bottom: no u exceeds t * bottom and one reaches it
    let exceeds = |x: &Poly| t.below(o, &bottom, x, true);
    let reaches = |x: &Poly| t.below(o, &bottom, x, false);
    let none_exceeds = and(exceeds(&u[0]).map(|b| !b), || exceeds(&u[1]).map(|b| !b));
    and(none_exceeds, || or(reaches(&u[0]), || reaches(&u[1])))
}

/// The strict inequality guarding a boundary point `beta` when `A` has a
/// zero entry: `t (|a'b1' + b'b2'| v |c'b1' + d'b2'|) > |b1'| v |b2'|`.
pub fn boundary_inequality(o: &dyn SignOracle, m: &PMat, t: &TMax, beta: &ProjPoint) -> Result<bool> {
    let (b1, b2) = beta.coords();
    let (b1, b2) = (b1.conj()?, b2.conj()?);
    let r = constant(&if b1.abs().cmp_real(&b2.abs()) == Ordering::Less { &b2 } else { &b1 }.abs());
    let (b1, b2) = (constant(&b1), constant(&b2));
    let [a, b, c, d] = m.conj()?;
    // the candidates of t are symmetric, so t |x| > r iff some c x > r
    let beats = |x: &Poly| t.below(o, x, &r, false).map(|b| !b);
    or(beats(&a.mul(&b1).add(&b.mul(&b2))), || beats(&c.mul(&b1).add(&d.mul(&b2))))
}

pub fn has_zero_entry(o: &dyn SignOracle, m: &PMat) -> Result<bool> {
    for p in &m.e {
        if o.sign(p)? == Sign::Zero {
            return Ok(true);
        }
    }
    Ok(false)
}

/// The right end of `E#` as a ratio `num / den` of parameter polynomials,
/// `Inf` when `E#` reaches `inf`, `None` when `E#` is empty.
#[derive(Clone, Debug, PartialEq)]
pub enum End {
    Inf { closed: bool },
    Zero { closed: bool },
    Ratio { num: Poly, den: Poly },
}

/// One side of `E#`: `right` selects `[1, inf]`.
pub fn esharp_end(o: &dyn SignOracle, m: &PMat, t: &Poly, right: bool) -> Result<Option<End>> {
    if !esharp_nonempty(o, m, &TMax::single(t.clone()))? {
        return Ok(None);
    }
    let [a, b, c, d] = &m.e;
    let branches = if right { [(b, a), (d, c)] } else { [(a, b), (c, d)] };
    // threshold n / s on the half-coordinate, s > 0; None is -inf
    let mut best: Option<(Poly, Poly)> = None;
    let mut neg_inf = false;
    for (s, i) in branches {
        if o.sign(s)? == Sign::Zero {
            if cmp(o, i, t)? == Ordering::Greater {
                neg_inf = true;
            }
            continue;
        }
        let n = t.sub(i);
        best = Some(match best {
            None => (n, s.clone()),
            Some((n0, s0)) => {
                if cmp(o, &n.mul(&s0), &n0.mul(s))? == Ordering::Less {
                    (n, s.clone())
                } else {
                    (n0, s0)
                }
            }
        });
    }
    let extreme = |closed| if right { End::Inf { closed } } else { End::Zero { closed } };
    if neg_inf {
        return Ok(Some(extreme(true)));
    }
    let (n, s) = best.expect("nonempty E# has a sloped branch");
    Ok(Some(match o.sign(&n)? {
        Sign::Negative => extreme(true),
        Sign::Zero => extreme(false),
        Sign::Positive => {
            if right {
                End::Ratio { num: s, den: n }
            } else {
                End::Ratio { num: n, den: s }
            }
        }
    }))
}

/// Which parameters `k >= 0` satisfy a property: an explicit prefix and a
/// constant tail.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KSet {
    pub head: Vec<bool>,
    pub tail: bool,
}

impl KSet {
    pub fn contains(&self, k: u64) -> bool {
        self.head.get(k as usize).copied().unwrap_or(self.tail)
    }

    pub fn is_all(&self) -> bool {
        self.tail && self.head.iter().all(|&b| b)
    }

    /// The parameters that differ from the tail value.
    pub fn exceptions(&self) -> Vec<u64> {
        (0..self.head.len() as u64).filter(|&k| self.head[k as usize] != self.tail).collect()
    }

    /// First `k` outside the set.
    pub fn first_missing(&self) -> Option<u64> {
        match self.head.iter().position(|&b| !b) {
            Some(k) => Some(k as u64),
            None if !self.tail => Some(self.head.len() as u64),
            None => None,
        }
    }
}

/// A property of a (possibly symbolic) matrix.
pub type Pred<'a> = dyn Fn(&PMat, &dyn SignOracle) -> Result<bool> + 'a;

/// Decide `pred` for every value of the single parameter `var` of `m`.
pub fn decide_one(pred: &Pred, m: &PMat, var: usize) -> Result<KSet> {
    let regions = decide_regions(pred, m)?;
    let at = |k: u64| {
        let mut x = [0; VARS];
        x[var] = k;
        regions.value(x).expect("regions cover the quadrant")
    };
    let from = regions.pieces.iter().filter(|(r, _)| r.hi[var].is_none()).map(|(r, _)| r.lo[var]).max().unwrap_or(0);
    let mut s = KSet { head: (0..from).map(at).collect(), tail: at(from) };
    while s.head.last() == Some(&s.tail) {
        s.head.pop();
    }
    Ok(s)
}

/// A box `lo <= x < hi` of parameter values, unbounded where `hi` is `None`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Region {
    pub lo: [u64; VARS],
    pub hi: [Option<u64>; VARS],
}

impl Region {
    pub fn all() -> Region {
        Region { lo: [0; VARS], hi: [None; VARS] }
    }

    pub fn contains(&self, x: [u64; VARS]) -> bool {
        (0..VARS).all(|v| x[v] >= self.lo[v] && self.hi[v].is_none_or(|h| x[v] < h))
    }

    fn width(&self, v: usize) -> Option<u64> {
        self.hi[v].map(|h| h - self.lo[v])
    }

    /// Split along `v`: bisect a bounded side, double an unbounded one.
    fn split(&self, v: usize) -> (Region, Region) {
        let lo = self.lo[v];
        let mid = match self.hi[v] {
            Some(h) => lo + (h - lo) / 2,
            None => lo + lo.max(1),
        };
        let (mut a, mut b) = (*self, *self);
        a.hi[v] = Some(mid);
        b.lo[v] = mid;
        (a, b)
    }
}

/// Signs that hold on a whole region, certified by shifting to its lower
/// corner. Anything else is reported as undecided and the region is split.
struct Corner {
    lo: [u64; VARS],
    undecided: Cell<Option<[bool; VARS]>>,
}

impl SignOracle for Corner {
    fn sign(&self, p: &Poly) -> Result<Sign> {
        if p.is_zero() {
            return Ok(Sign::Zero);
        }
        if let Some(c) = p.as_constant() {
            return Ok(c.sign());
        }
        let mut q = p.clone();
        for (v, &c) in self.lo.iter().enumerate() {
            if c > 0 && q.uses(v) {
                q = q.substitute(v, c as i64, true);
            }
        }
        if let Some(s) = q.terms.get(&[0, 0]).map(FieldElem::sign) {
            if q.terms.values().all(|c| c.sign() == s) {
                return Ok(s);
            }
        }
        self.undecided.set(Some([p.uses(0), p.uses(1)]));
        Err(Error::Undecided)
    }
}

/// The value of a predicate on a partition of the parameter quadrant.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Regions {
    pub pieces: Vec<(Region, bool)>,
}

impl Regions {
    pub fn is_all(&self) -> bool {
        self.pieces.iter().all(|&(_, b)| b)
    }

    pub fn value(&self, x: [u64; VARS]) -> Option<bool> {
        self.pieces.iter().find(|(r, _)| r.contains(x)).map(|&(_, b)| b)
    }

    /// Lower corner of some region where the predicate fails.
    pub fn counterexample(&self) -> Option<[u64; VARS]> {
        self.pieces.iter().filter(|&&(_, b)| !b).map(|(r, _)| r.lo).min()
    }
}

/// Decide `pred` on every parameter value of `m` by adaptive splitting.
/// Unused parameters are ignored.
pub fn decide_regions(pred: &Pred, m: &PMat) -> Result<Regions> {
    let used = [m.uses(0), m.uses(1)];
    let mut pieces = Vec::new();
    let mut todo = vec![Region::all()];
    while let Some(r) = todo.pop() {
        if r.lo.iter().any(|&x| x > MAX_ENUMERATION) || pieces.len() as u64 > MAX_ENUMERATION {
            return Err(Error::BudgetExhausted(format!("no uniform verdict near {:?}", r.lo)));
        }
        let single: [bool; VARS] = core::array::from_fn(|v| !used[v] || r.width(v) == Some(1));
        let mut p = m.clone();
        for v in (0..VARS).filter(|&v| used[v] && single[v]) {
            p = p.eval_var(v, r.lo[v]);
        }
        if single.iter().all(|&s| s) {
            pieces.push((r, pred(&p, &Exact)?));
            continue;
        }
        let o = Corner { lo: r.lo, undecided: Cell::new(None) };
        match pred(&p, &o) {
            Ok(b) => pieces.push((r, b)),
            Err(Error::Undecided) => {
                let culprit = o.undecided.get().expect("undecided query recorded");
                // bisect a bounded side before doubling an unbounded one
                let v = (0..VARS)
                    .filter(|&v| !single[v])
                    .min_by_key(|&v| (!culprit[v], r.hi[v].is_none(), r.lo[v]))
                    .expect("some side is splittable");
                let (a, b) = r.split(v);
                todo.push(b);
                todo.push(a);
            }
            Err(e) => return Err(e),
        }
    }
    pieces.sort_by_key(|(r, _)| r.lo);
    Ok(Regions { pieces })
}

/// A function of `k` given by explicit values up to a threshold and by a
/// polynomial from there on.
#[derive(Clone, Debug, PartialEq)]
pub struct PiecewiseK<T> {
    pub head: Vec<T>,
    pub tail: Poly,
}

impl PiecewiseK<FieldElem> {
    pub fn eval(&self, k: u64) -> FieldElem {
        match self.head.get(k as usize) {
            Some(v) => v.clone(),
            None => self.tail.eval_var(0, k).as_constant().expect("univariate"),
        }
    }

    /// First index from which the tail formula is used.
    pub fn threshold(&self) -> u64 {
        self.head.len() as u64
    }
}

/// The right end `xi(k)` of `E#(A P^k)` for large `k`.
#[derive(Clone, Debug, PartialEq)]
pub struct RightEnd {
    /// Valid for `k >= from`.
    pub from: u64,
    pub end: End,
    /// Limit as `k -> inf`, when the end is a ratio of polynomials.
    pub limit: Option<ProjPoint>,
    /// Sign of `xi(k+1) - xi(k)` for `k >= from`.
    pub trend: Option<Sign>,
}

/// Everything `family_analysis` learns about `A P^k`.
#[derive(Clone, Debug)]
pub struct FamilyAnalysis {
    pub t: PiecewiseK<FieldElem>,
    pub right_end: Option<RightEnd>,
    /// For each letter `b`, the `k` with `I_b` inside the closure of `E#`.
    pub containment: Vec<(usize, KSet)>,
}

/// Ratio of leading coefficients, as a point of `[0, inf]`.
fn ratio_limit(num: &Poly, den: &Poly) -> Option<ProjPoint> {
    let (dn, dd) = (num.degree(0), den.degree(0));
    let field = num.field();
    match dn.cmp(&dd) {
        Ordering::Greater => Some(ProjPoint::infinity(field)),
        Ordering::Less => Some(ProjPoint::zero(field)),
        Ordering::Equal => ProjPoint::from_pair(num.lc_univariate(), den.lc_univariate()).ok(),
    }
}

/// Analyse `A P^k` for all `k >= 0` against the intervals `intervals[b - 1]`.
pub fn family_analysis(a: &UniMat, p: &UniMat, intervals: &[OrderedInterval]) -> Result<FamilyAnalysis> {
    let field = a.field();
    if !field.is_quadratic() {
        return Err(Error::NotQuadratic(field));
    }
    let m = PMat::from_mat(a).mul(&PMat::parabolic_power(p, 0)?);

    let tail = Tail::new();
    let t_tail = t_sym(&tail, &m)?;
    let k0 = tail.bounds()[0];
    let mut head = Vec::new();
    for k in 0..k0 {
        let t = t_sym(&Exact, &m.eval_var(0, k))?;
        head.push(t.as_constant().expect("constant"));
    }
    let t = PiecewiseK { head, tail: t_tail };

    let tail = Tail::new();
    let tk = t_sym(&tail, &m)?;
    let right_end = match esharp_end(&tail, &m, &tk, true)? {
        None => None,
        Some(end) => {
            let (limit, trend) = match &end {
                End::Ratio { num, den } => {
                    let (n1, d1) = (num.shift(0), den.shift(0));
                    let diff = n1.mul(den).sub(&num.mul(&d1));
                    let s = tail.sign(&diff)?.mul(tail.sign(den)?).mul(tail.sign(&d1)?);
                    (ratio_limit(num, den), Some(s))
                }
                _ => (None, None),
            };
            Some(RightEnd { from: tail.bounds()[0], end, limit, trend })
        }
    };

    let mut containment = Vec::new();
    for (i, iv) in intervals.iter().enumerate() {
        let pred = |m: &PMat, o: &dyn SignOracle| {
            interval_in_closure(o, m, &TMax::new(m)?, iv)
        };
        containment.push((i + 1, decide_one(&pred, &m, 0)?));
    }
    Ok(FamilyAnalysis { t, right_end, containment })
}

impl End {
    /// Evaluate at a concrete `k`.
    pub fn at(&self, field: FieldId, k: u64) -> ProjPoint {
        match self {
            End::Inf { .. } => ProjPoint::infinity(field),
            End::Zero { .. } => ProjPoint::zero(field),
            End::Ratio { num, den } => ProjPoint::from_pair(
                num.eval_var(0, k).as_constant().expect("univariate"),
                den.eval_var(0, k).as_constant().expect("univariate"),
            )
            .expect("nonzero end"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactfield::parse_elem;

    fn el(s: &str, f: FieldId) -> FieldElem {
        parse_elem(s, f).unwrap()
    }

    #[test]
    fn parabolic_power_matches_repeated_product() {
        let f = FieldId::Tau;
        let p = UniMat::parse(f, ["1", "tau", "0", "1"]).unwrap();
        let pk = PMat::parabolic_power(&p, 0).unwrap();
        for k in 0..6u64 {
            assert_eq!(pk.eval_var(0, k).to_mat().unwrap(), p.pow(k as u32));
        }
    }

    #[test]
    fn tail_sign_and_threshold() {
        let f = FieldId::Sqrt2;
        let k = Poly::var(f, 0);
        // 10 - k changes sign after 10
        let p = Poly::constant(el("10", f)).sub(&k);
        let o = Tail::new();
        assert_eq!(o.sign(&p).unwrap(), Sign::Negative);
        assert!(o.bounds()[0] >= 11);
        // k j - 3 k - 5 j is positive for large k, j
        let j = Poly::var(f, 1);
        let q = k.mul(&j).sub(&k.scale(&el("3", f))).sub(&j.scale(&el("5", f)));
        let o = Tail::new();
        assert_eq!(o.sign(&q).unwrap(), Sign::Positive);
        let [kb, jb] = o.bounds();
        for kk in kb..kb + 5 {
            for jj in jb..jb + 5 {
                let v = q.eval_var(0, kk).eval_var(1, jj).as_constant().unwrap();
                assert!(v.is_positive());
            }
        }
    }

    fn analyse(case: &str, a: usize) -> FamilyAnalysis {
        let g = crate::gaussmaps::GaussMap::build(case.parse().unwrap()).unwrap();
        let ivs: Vec<_> = (1..=g.r()).map(|b| g.interval(b)).collect();
        family_analysis(g.matrix(a), g.matrix(g.r()), &ivs).unwrap()
    }

    #[test]
    fn golden_thresholds() {
        let f = FieldId::Tau;
        let fa = analyse("2_5", 1);
        for k in 0..40u64 {
            assert_eq!(fa.t.eval(k), &el("1", f) + &el(&alloc::format!("{}/tau", k + 1), f));
        }
        let fa = analyse("2_5", 2);
        for k in 0..40u64 {
            let want = if k < 2 { el("tau", f) } else { el(&alloc::format!("{}*(2 - tau)", 2 * k + 1), f) };
            assert_eq!(fa.t.eval(k), want, "k = {k}");
        }
    }

    #[test]
    fn hexagonal_right_end() {
        let f = FieldId::Sqrt3;
        let fa = analyse("3_6", 2);
        let (_, i9) = &fa.containment[8];
        assert_eq!(i9.head.len(), 17);
        assert!(i9.head.iter().all(|&b| b) && !i9.tail);
        for (b, s) in &fa.containment[..8] {
            assert!(s.is_all(), "I_{b}");
        }
        let re = fa.right_end.unwrap();
        assert_eq!(re.limit.unwrap(), ProjPoint::parse("(3 + sqrt3)/2", f).unwrap());
        assert_eq!(re.trend, Some(Sign::Negative));
    }

    #[test]
    fn kset_bookkeeping() {
        let s = KSet { head: vec![true, false, true], tail: true };
        assert_eq!(s.exceptions(), vec![1]);
        assert_eq!(s.first_missing(), Some(1));
        assert!(s.contains(100));
        assert!(!s.is_all());
    }
}

use alloc::vec::Vec;
use core::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use once_cell::race::OnceBox;

use super::Sign;

/// The five totally real fields the maps live in.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum FieldId {
    Sqrt2,
    Sqrt3,
    Tau,
    Sqrt6,
    Lambda7,
}

impl FieldId {
    pub const ALL: [FieldId; 5] = [
        FieldId::Sqrt2,
        FieldId::Sqrt3,
        FieldId::Tau,
        FieldId::Sqrt6,
        FieldId::Lambda7,
    ];

    pub fn descriptor(self) -> &'static FieldDescriptor {
        match self {
            FieldId::Sqrt2 => &SQRT2,
            FieldId::Sqrt3 => &SQRT3,
            FieldId::Tau => &TAU,
            FieldId::Sqrt6 => &SQRT6,
            FieldId::Lambda7 => &LAMBDA7,
        }
    }

    pub fn symbol(self) -> &'static str {
        self.descriptor().symbol
    }

    pub fn degree(self) -> usize {
        self.descriptor().degree()
    }

    pub fn is_quadratic(self) -> bool {
        self.degree() == 2
    }

    pub fn from_symbol(symbol: &str) -> Option<FieldId> {
        FieldId::ALL.into_iter().find(|f| f.symbol() == symbol)
    }
}

impl fmt::Display for FieldId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.symbol())
    }
}

/// Static description of a field `K = Q(w)` with integral basis `1, w, .., w^(n-1)`.
///
/// Embedding `j` sends `w` to the root isolated by `roots[j]`; the automorphism
/// with the same index sends `w` to `automorphisms[j]` (written in the basis),
/// so the value of `x` under embedding `j` is the identity value of `sigma_j(x)`.
/// Index 0 is always the identity.
#[derive(Debug)]
pub struct FieldDescriptor {
    pub id: FieldId,
    pub symbol: &'static str,
    /// `c_0, .., c_(n-1)` of the monic minimal polynomial `x^n + c_(n-1) x^(n-1) + .. + c_0`.
    pub min_poly: &'static [i64],
    /// Isolating intervals `(lo, hi)` of width one, one per real embedding.
    pub roots: &'static [(i64, i64)],
    /// Image of the generator under each automorphism, in basis coordinates.
    pub automorphisms: &'static [&'static [i64]],
    /// Independent units generating a finite-index subgroup of the unit group
    /// modulo torsion.
    pub units: &'static [&'static [i64]],
}

static SQRT2: FieldDescriptor = FieldDescriptor {
    id: FieldId::Sqrt2,
    symbol: "sqrt2",
    min_poly: &[-2, 0],
    roots: &[(1, 2), (-2, -1)],
    automorphisms: &[&[0, 1], &[0, -1]],
    units: &[&[1, 1]],
};

static SQRT3: FieldDescriptor = FieldDescriptor {
    id: FieldId::Sqrt3,
    symbol: "sqrt3",
    min_poly: &[-3, 0],
    roots: &[(1, 2), (-2, -1)],
    automorphisms: &[&[0, 1], &[0, -1]],
    units: &[&[2, 1]],
};

static TAU: FieldDescriptor = FieldDescriptor {
    id: FieldId::Tau,
    symbol: "tau",
    min_poly: &[-1, -1],
    roots: &[(1, 2), (-1, 0)],
    automorphisms: &[&[0, 1], &[1, -1]],
    units: &[&[0, 1]],
};

static SQRT6: FieldDescriptor = FieldDescriptor {
    id: FieldId::Sqrt6,
    symbol: "sqrt6",
    min_poly: &[-6, 0],
    roots: &[(2, 3), (-3, -2)],
    automorphisms: &[&[0, 1], &[0, -1]],
    units: &[&[5, 2]],
};

// lam7 = 2cos(pi/7); the other roots are 2cos(3pi/7) = lam^2 - lam - 1 and
// 2cos(5pi/7) = 2 - lam^2.
static LAMBDA7: FieldDescriptor = FieldDescriptor {
    id: FieldId::Lambda7,
    symbol: "lam7",
    min_poly: &[1, -2, -1],
    roots: &[(1, 2), (0, 1), (-2, -1)],
    automorphisms: &[&[0, 1, 0], &[-1, -1, 1], &[2, 0, -1]],
    units: &[&[0, 1, 0], &[1, 1, 0]],
};

/// A root bracket `lo / 2^bits < root < hi / 2^bits`.
#[derive(Clone, Debug)]
pub struct RootBracket {
    pub lo: BigInt,
    pub hi: BigInt,
    pub bits: u32,
}

const CACHE_LEVELS: usize = 10;
// array-repeat initialisers only; each static gets fresh cells
#[allow(clippy::declare_interior_mutable_const)]
const EMPTY: OnceBox<RootBracket> = OnceBox::new();
#[allow(clippy::declare_interior_mutable_const)]
const EMPTY_LEVELS: [OnceBox<RootBracket>; CACHE_LEVELS] = [EMPTY; CACHE_LEVELS];
#[allow(clippy::declare_interior_mutable_const)]
const EMPTY_FIELD: [[OnceBox<RootBracket>; CACHE_LEVELS]; 3] = [EMPTY_LEVELS; 3];
// brackets at 64 * 2^k bits, per field and embedding
static BRACKETS: [[[OnceBox<RootBracket>; CACHE_LEVELS]; 3]; 5] = [EMPTY_FIELD; 5];

impl FieldDescriptor {
    /// A bracket of at least `min_bits` bits, shared across calls.
    pub fn bracket(&self, emb: usize, min_bits: u32) -> RootBracket {
        let mut level = 0;
        while (64u32 << level) < min_bits {
            level += 1;
        }
        if level >= CACHE_LEVELS {
            return self.root_bracket(emb, min_bits);
        }
        BRACKETS[self.id as usize][emb][level]
            .get_or_init(|| alloc::boxed::Box::new(self.root_bracket(emb, 64 << level)))
            .clone()
    }

    pub fn degree(&self) -> usize {
        self.min_poly.len()
    }

    pub fn embeddings(&self) -> usize {
        self.roots.len()
    }

    /// Full monic coefficient list, constant term first.
    pub fn monic_coeffs(&self) -> Vec<BigInt> {
        let mut c: Vec<BigInt> = self.min_poly.iter().map(|&v| BigInt::from(v)).collect();
        c.push(BigInt::one());
        c
    }

    /// `w^n = sum r_i w^i`.
    pub(crate) fn reduction(&self) -> impl Iterator<Item = i64> + '_ {
        self.min_poly.iter().map(|&c| -c)
    }

    /// `2^(bits*n) * p(m / 2^bits)` for the minimal polynomial `p`.
    fn eval_scaled(&self, m: &BigInt, bits: u32) -> BigInt {
        let n = self.degree();
        let coeffs = self.monic_coeffs();
        let mut total = BigInt::zero();
        let mut mp = BigInt::one();
        for (i, c) in coeffs.iter().enumerate() {
            total += (c * &mp) << (bits as usize * (n - i));
            mp *= m;
        }
        total
    }

    fn sign_at(&self, m: &BigInt, bits: u32) -> Sign {
        Sign::of(&self.eval_scaled(m, bits))
    }

    fn eval_derivative_scaled(&self, m: &BigInt, bits: u32) -> BigInt {
        // 2^(bits*(n-1)) * p'(m / 2^bits)
        let n = self.degree();
        let coeffs = self.monic_coeffs();
        let mut total = BigInt::zero();
        let mut mp = BigInt::one();
        for (i, c) in coeffs.iter().enumerate().skip(1) {
            total += (c * BigInt::from(i as u64) * &mp) << (bits as usize * (n - i));
            mp *= m;
        }
        total
    }

    /// Refine the isolating interval of embedding `emb` until its width is at
    /// most `2^-min_bits` (up to a factor two).
    ///
    /// Bisection gets a 32-bit bracket, then Newton steps double the precision;
    /// every Newton result is re-bracketed by an exact sign change, falling back
    /// to bisection if the check fails.
    pub fn root_bracket(&self, emb: usize, min_bits: u32) -> RootBracket {
        let (lo0, hi0) = self.roots[emb];
        let mut lo = BigInt::from(lo0);
        let mut hi = BigInt::from(hi0);
        let lo_sign = self.sign_at(&lo, 0);
        debug_assert_ne!(lo_sign, Sign::Zero);
        let mut bits = 0u32;
        let bisect_to = min_bits.min(32);
        while bits < bisect_to {
            lo <<= 1;
            hi <<= 1;
            bits += 1;
            let mid = &lo + 1;
            let s = self.sign_at(&mid, bits);
            if s == lo_sign {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        while bits < min_bits {
            let target = bits * 2;
            let shift = target - bits;
            // Newton from the midpoint, evaluated at the current precision.
            let x = &lo + &hi; // 2 * midpoint at scale `bits`, i.e. midpoint at scale bits+1
            let xb = bits + 1;
            let p = self.eval_scaled(&x, xb); // 2^(xb n) p(x)
            let dp = self.eval_derivative_scaled(&x, xb); // 2^(xb (n-1)) p'(x)
            let mut next = None;
            if !dp.is_zero() {
                // x_new = x - p/p'; at scale `target`:
                // m = x * 2^(target - xb) - p * 2^target / (dp * 2^xb)
                let num = p << (target as usize);
                let den = dp << (xb as usize);
                let corr = round_div(&num, &den);
                let m = (x << ((target - xb) as usize)) - corr;
                let lo_s: BigInt = &lo << (shift as usize);
                let hi_s: BigInt = &hi << (shift as usize);
                let mlo = (&m - 2u32).max(lo_s);
                let mhi = (&m + 2u32).min(hi_s);
                let slo = self.sign_at(&mlo, target);
                let shi = self.sign_at(&mhi, target);
                if slo == lo_sign && shi == lo_sign.neg() {
                    next = Some((mlo, mhi));
                }
            }
            match next {
                Some((a, b)) => {
                    lo = a;
                    hi = b;
                    bits = target;
                }
                None => {
                    for _ in 0..shift {
                        lo <<= 1;
                        hi <<= 1;
                        bits += 1;
                        // keep the invariant hi - lo small by bisecting once per bit
                        let mid = (&lo + &hi) >> 1;
                        let s = self.sign_at(&mid, bits);
                        if s == lo_sign {
                            lo = mid;
                        } else if s == Sign::Zero {
                            unreachable!("irrational root hit exactly");
                        } else {
                            hi = mid;
                        }
                    }
                }
            }
        }
        RootBracket { lo, hi, bits }
    }

    /// Check the structural invariants: each isolating interval has a sign
    /// change, the intervals are pairwise disjoint, and each automorphism sends
    /// the generator to a root lying in the matching interval.
    pub fn validate(&self) -> core::result::Result<(), &'static str> {
        let n = self.degree();
        if self.roots.len() != n {
            return Err("number of real embeddings differs from the degree");
        }
        for &(lo, hi) in self.roots {
            if hi - lo != 1 {
                return Err("isolating interval must have width one");
            }
            let a = self.sign_at(&BigInt::from(lo), 0);
            let b = self.sign_at(&BigInt::from(hi), 0);
            if a == Sign::Zero || b == Sign::Zero || a == b {
                return Err("isolating interval has no sign change");
            }
        }
        for i in 0..n {
            for j in (i + 1)..n {
                let (a, b) = self.roots[i];
                let (c, d) = self.roots[j];
                if !(b <= c || d <= a) {
                    return Err("isolating intervals overlap");
                }
            }
        }
        // n disjoint intervals, each with an odd number of roots, and n roots in
        // total: every interval holds exactly one and all roots are real.
        if self.automorphisms.len() != n || self.automorphisms[0] != identity_image(n).as_slice() {
            return Err("automorphism table must start with the identity");
        }
        for (j, img) in self.automorphisms.iter().enumerate() {
            let x = super::FieldElem::from_i64s(self.id, img);
            if !x.eval_min_poly().is_zero() {
                return Err("automorphism image is not a root of the minimal polynomial");
            }
            let (lo, hi) = self.roots[j];
            let v = x.approx(0, &BigRational::new(BigInt::one(), BigInt::from(1024)));
            if v.0 <= BigRational::from_integer(lo.into()) || v.1 >= BigRational::from_integer(hi.into()) {
                return Err("automorphism order does not match embedding order");
            }
        }
        Ok(())
    }
}

fn identity_image(n: usize) -> Vec<i64> {
    let mut v = alloc::vec![0; n];
    v[1] = 1;
    v
}

/// Nearest integer to `a / b`.
pub(crate) fn round_div(a: &BigInt, b: &BigInt) -> BigInt {
    let (a, b): (BigInt, BigInt) = if b.is_negative() { (-a, -b) } else { (a.clone(), b.clone()) };
    let twice: BigInt = (a << 1usize) + &b;
    twice.div_floor(&(b << 1usize))
}

/// Search small integral elements for the other roots of the minimal
/// polynomial and order them like the isolating intervals.
///
/// This recomputes the `automorphisms` table from scratch; the descriptors
/// store the result so that elements stay `'static`-cheap.
pub fn find_galois_orbit(id: FieldId, bound: i64) -> Vec<Vec<i64>> {
    let d = id.descriptor();
    let n = d.degree();
    let mut found: Vec<(usize, Vec<i64>)> = Vec::new();
    let mut coords = alloc::vec![-bound; n];
    loop {
        let x = super::FieldElem::from_i64s(id, &coords);
        if x.eval_min_poly().is_zero() {
            let eps = BigRational::new(BigInt::one(), BigInt::from(1024));
            let (lo, hi) = x.approx(0, &eps);
            for (j, &(a, b)) in d.roots.iter().enumerate() {
                if lo > BigRational::from_integer(a.into()) && hi < BigRational::from_integer(b.into()) {
                    found.push((j, coords.clone()));
                }
            }
        }
        // odometer
        let mut i = 0;
        loop {
            if i == n {
                found.sort();
                return found.into_iter().map(|(_, c)| c).collect();
            }
            coords[i] += 1;
            if coords[i] > bound {
                coords[i] = -bound;
                i += 1;
            } else {
                break;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn descriptors_are_consistent() {
        for f in FieldId::ALL {
            f.descriptor().validate().unwrap();
        }
    }

    #[test]
    fn stored_automorphisms_match_search() {
        for f in FieldId::ALL {
            let found = find_galois_orbit(f, 3);
            let stored: Vec<Vec<i64>> = f.descriptor().automorphisms.iter().map(|a| a.to_vec()).collect();
            assert_eq!(found, stored, "{f}");
        }
    }

    #[test]
    fn brackets_shrink_and_keep_the_root() {
        let d = FieldId::Sqrt2.descriptor();
        let br = d.root_bracket(0, 300);
        assert!(br.bits >= 300);
        assert!(&br.hi - &br.lo <= BigInt::from(4));
        // lo^2 < 2 * 4^bits < hi^2
        let two = BigInt::from(2) << (2 * br.bits as usize);
        assert!(&br.lo * &br.lo < two && two < &br.hi * &br.hi);
        let br = FieldId::Lambda7.descriptor().root_bracket(2, 200);
        assert!(br.bits >= 200 && &br.hi - &br.lo <= BigInt::from(4));
    }
}

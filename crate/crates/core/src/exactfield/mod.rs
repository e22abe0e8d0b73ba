//! Exact arithmetic in the totally real fields `Q(sqrt2)`, `Q(sqrt3)`,
//! `Q(tau)`, `Q(sqrt6)` and `Q(lam7)` where `tau` is the golden ratio and
//! `lam7 = 2cos(pi/7)`.

mod descriptor;
mod elem;
mod gcd;
mod parse;

pub use descriptor::{find_galois_orbit, FieldDescriptor, FieldId, RootBracket};
pub use elem::FieldElem;
pub use gcd::{euclid_divmod, euclid_gcd, is_unit};
pub use parse::parse_elem;

use core::cmp::Ordering;
use num_bigint::BigInt;
use num_traits::Signed;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Sign {
    Negative,
    Zero,
    Positive,
}

#[allow(clippy::should_implement_trait)]
impl Sign {
    pub fn of(x: &BigInt) -> Sign {
        if x.is_positive() {
            Sign::Positive
        } else if x.is_negative() {
            Sign::Negative
        } else {
            Sign::Zero
        }
    }

    pub fn neg(self) -> Sign {
        match self {
            Sign::Negative => Sign::Positive,
            Sign::Zero => Sign::Zero,
            Sign::Positive => Sign::Negative,
        }
    }

    pub fn mul(self, other: Sign) -> Sign {
        match (self, other) {
            (Sign::Zero, _) | (_, Sign::Zero) => Sign::Zero,
            (a, b) if a == b => Sign::Positive,
            _ => Sign::Negative,
        }
    }

    pub fn to_ordering(self) -> Ordering {
        match self {
            Sign::Negative => Ordering::Less,
            Sign::Zero => Ordering::Equal,
            Sign::Positive => Ordering::Greater,
        }
    }

    pub fn to_i32(self) -> i32 {
        match self {
            Sign::Negative => -1,
            Sign::Zero => 0,
            Sign::Positive => 1,
        }
    }
}

//! Exact arithmetic for slow continued-fraction (Gauss) maps over real
//! quadratic fields, the Weil height of points of the projective line, and a
//! certifier for families of height-decreasing symbolic blocks.
//!
//! The crate is `no_std` and only needs `alloc`. Everything is exact: field
//! elements carry big-rational coordinates over an integral basis, signs are
//! decided by refining rational isolating intervals, and heights are compared
//! as exact field elements.
//!
//! Module map:
//!
//! * [`exactfield`]: the five fields `Q(sqrt2)`, `Q(sqrt3)`, `Q(tau)`,
//!   `Q(sqrt6)`, `Q(lam7)`, with conjugates, exact signs and a norm-Euclidean gcd.
//! * [`projective`]: points of `P^1 K`, unimodular matrices and their action.
//! * [`height`]: exact (powered) Weil heights.
//! * [`gaussmaps`]: the ten built-in maps, digits, orbits and first returns.
//! * [`sharpsets`]: the threshold `t(A)`, the sets `E#`, `E=`, `E-` of a
//!   positive matrix, cornerpoints, witnesses and parabolic-power families.
//! * [`symbolic`]: polynomials in one or two formal exponents with asymptotic
//!   sign decisions, used to certify statements for every exponent at once.
//! * [`blocks`]: block patterns, built-in families, certification,
//!   completeness automata and orbit splitting.
#![no_std]

extern crate alloc;

pub mod blocks;
mod error;
pub mod exactfield;
pub mod gaussmaps;
pub mod height;
pub mod projective;
pub mod sharpsets;
pub mod symbolic;

pub use error::Error;
pub use exactfield::{FieldElem, FieldId, Sign};
pub use gaussmaps::{CaseId, GaussMap};
pub use height::HeightSq;
pub use projective::{OrderedInterval, Positivity, ProjPoint, UniMat};




pub type Result<T, E = Error> = core::result::Result<T, E>;

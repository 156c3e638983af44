//! Exact splitting types of bundles on P2 restricted to rational curves.

pub mod bounds;
pub mod error;
pub mod field;
pub mod fitting;
pub mod formmat;
pub mod lab;
pub mod matrix;
pub mod panel;
pub mod poly;
pub mod presentation;
pub mod restrict;
mod serde_util;
pub mod sheaf;

pub use error::{Error, Result};
pub use field::{FiniteField, Field, Fp};
pub use matrix::Matrix;
pub use poly::{hom_basis, hom_gcd, HomForm};

pub type F7 = Fp<7>;
pub type F101 = Fp<101>;
pub type F32003 = Fp<32003>;
/// Small exact rationals used for panels and bounds.
pub type Rational = num_rational::Ratio<i64>;
/// Arbitrary-precision rationals for symbolic checks.
pub type BigRational = num_rational::BigRational;

//! Exact arithmetic foundation: integer matrices, polynomials over Q and F_p,
//! integer factorization and certified rational intervals.

pub mod abelian;
pub mod fp;
pub mod intfactor;
pub mod interval;
pub mod linalg;
pub mod lll;
pub mod matrix;
pub mod poly;

pub use abelian::{AbelianQuotient, ClosureGroup};
pub use fp::{factor_mod_p, FpPoly};
pub use interval::{CDisk, RatInterval};
pub use matrix::{abelian_invariants, hermite_normal_form, hnf, hnf_basis, smith_normal_form, IntMatrix, SmithForm};
pub use poly::{int_rat, rat, QPoly};

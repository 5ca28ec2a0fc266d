//! Verifier core: exact arithmetic, number fields, class field data, bounds,
//! group schemes of prime order, the filtration calculus and certificates.

pub mod error;
pub mod numfield;
pub mod exactalg;
pub mod classfield;
pub mod bounds;
pub mod schemes;
pub mod filtration;
pub mod verdict;

pub use error::{Error, Result};

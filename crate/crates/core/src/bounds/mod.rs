//! Root-discriminant bounds: the ramification bound for torsion fields and
//! degree caps read from a table of unconditional discriminant bounds.

pub mod constants;
pub mod fontaine;
pub mod odlyzko;

pub use fontaine::{fontaine_bound, FontaineBound};
pub use odlyzko::{max_degree, OdlyzkoTable};

//! Number fields of degree at most 8: exact element and ideal arithmetic,
//! prime splitting, discriminants, composita and quadratic units.

pub mod compositum;
pub mod field;
pub mod ideal;
pub mod quadratic;
pub mod roots;

pub use field::{make_field, parse_field, FieldElement, NumberField, MAX_DEGREE};
pub use ideal::{Ideal, PrimeIdeal};
pub use compositum::{adjoin_sqrt, compositum, polred, Embedding, SqrtExtension};
pub use quadratic::{fundamental_unit_quadratic, quadratic_field, real_quadratic_unit};

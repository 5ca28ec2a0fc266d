//! Units, class groups, ray class groups, S-unit square classes and
//! conductor-discriminant bounds for abelian extensions.

pub mod classgroup;
pub mod conductor;
pub mod enumerate;
pub mod kummer;
pub mod modulus;
pub mod ray;
pub mod units;

pub use classgroup::{class_group, principal_generator, ClassGroup, DEFAULT_SEARCH_CAP};
pub use conductor::{min_abelian_ext_rootdisc, order_ell_characters, CharacterWitness, MinRootDisc};
pub use enumerate::short_elements;
pub use kummer::{s_unit_generators, s_unit_square_classes};
pub use modulus::{multiplicative_group_mod, Modulus, ResidueUnits};
pub use ray::{ray_class_group, RayClassGroup};
pub use units::{parse_unit_fixtures, unit_group, UnitFixture, UnitGroup, UnitMode};

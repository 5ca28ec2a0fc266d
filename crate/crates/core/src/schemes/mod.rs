//! Finite group schemes of prime order over rings of S-integers, Galois
//! modules over F_ℓ, and the group-theoretic lemmas they rely on.

pub mod groups;
pub mod lemmas;
pub mod modules;
pub mod simple;
pub mod torsion;

pub use groups::{ell_core, FiniteGroup, Perm};
pub use lemmas::{check_cyclic_pgroup, check_divisibility_lemma, parse_group_catalog, AbelianExtension, CatalogGroup};
pub use modules::{simple_modules, GaloisModule};
pub use simple::{cartier_dual, oort_tate_simples, SchemeKind, SimpleScheme};
pub use torsion::{certify_torsion_field, torsion_field_lower, TorsionFieldCertificate, TorsionFieldLower, TorsionStatus};

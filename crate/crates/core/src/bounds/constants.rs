//! Constants of the ramification bound, kept apart so they can be audited.

/// The root discriminant of the field of points of a finite flat group scheme
/// over O_K killed by ℓ satisfies δ_L < δ_K · ℓ^(1 + 1/(ℓ−1)).
///
/// J.-M. Fontaine, "Il n'y a pas de variété abélienne sur Z",
/// Invent. Math. 81 (1985), Thm. 1 and Cor. 3.3.2 (unramified base, n = 1).
///
/// The exponent is 1 + NUMERATOR/(ℓ − DENOMINATOR_OFFSET).
pub const FONTAINE_EXPONENT_NUMERATOR: u32 = 1;
pub const FONTAINE_EXPONENT_DENOMINATOR_OFFSET: u32 = 1;

/// Bits of dyadic precision for certified roots in bound computations.
pub const ROOT_BITS: u64 = 64;

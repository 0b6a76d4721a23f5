//! Exact classification of orientation-preserving actions of `PSL(2,7)` and
//! `PSL(2,11)` on compact orientable surfaces.
//!
//! Everything is computed in exact arithmetic: group elements are residue
//! matrices or permutation images, solution counts are arbitrary-precision
//! integers, genera are rationals, and character values live in cyclotomic
//! fields with rational coefficients. No floating point enters any result
//! (floats appear only in a self-check that embeds cyclotomic numbers into
//! `f64` complex arithmetic).
//!
//! The main pipeline:
//!
//! - [`group`] materializes small finite groups: `PSL(2,p)` natively and
//!   arbitrary permutation groups from generator files.
//! - [`classes`] computes conjugacy classes and counts class-restricted
//!   product solutions (the class multiplication coefficients).
//! - [`subgroups`] enumerates two-generated subgroups and identifies
//!   maximal ones with copy counts.
//! - [`signature`] models Fuchsian signatures `(h; m_1,...,m_r)`, evaluates
//!   the Riemann-Hurwitz genus and the closed-form admissibility criteria.
//! - [`epi`] decides existence of surface-kernel epimorphisms by exhaustive
//!   pruned backtracking, producing verifiable witnesses.
//! - [`spectrum`] enumerates genus spectra and computes stable upper genera
//!   with certificates.
//! - [`eichler`] evaluates fixed-point data and exact Eichler traces for a
//!   concrete action.

pub mod classes;
pub mod cyclotomic;
pub mod eichler;
pub mod epi;
pub mod group;
pub mod signature;
pub mod spectrum;
pub mod subgroups;

/// Exact rational backed by machine words; enough headroom for every genus
/// computation at desk scale (the largest intermediate is `|G| * g_max`).
pub type Rat = num_rational::Ratio<i64>;

/// Arbitrary-precision rational for callers that want unconditional headroom.
pub type BigRat = num_rational::Ratio<num_bigint::BigInt>;

/// Solution counts from the class algebra. Convolution counts for ten or so
/// periods overflow `u64`, so counts are arbitrary-precision throughout.
pub type Count = num_bigint::BigUint;

/// Default exact cyclotomic number (rational coefficients over `BigInt`).
pub type Cyc = cyclotomic::Cyclotomic<num_bigint::BigInt>;

pub use classes::{
    conjugacy_classes, count_product_solutions, lambda_coefficient, ClassInfo, ClassVector,
    ConjugacyClassTable,
};
pub use cyclotomic::{cyclotomic_polynomial, euler_phi, units_mod, CycInt, Cyclotomic};
pub use eichler::{
    eichler_trace, fixed_point_profile, surface_character, FixedPointProfile, SurfaceCharacter,
};
pub use epi::{
    exists_epimorphism, is_order_k_commutator, verify_witness, EpiWitness, SearchOptions,
    SearchOutcome, Verdict,
};
pub use group::{build_psl2, parse_permutation_group, FiniteGroup, GroupElement};
pub use signature::{
    classify, extend_signature, from_exponent_vector, is_integral, monoid_combine,
    monoid_combine_same_genus, riemann_hurwitz_genus, theorem_genus, to_exponent_vector,
    Classification, ExponentVector, GroupId, RejectReason, Signature,
};
pub use spectrum::{
    reachable_genera, shift_witness, stable_upper_genus, witness_signature_for_genus,
    SpectrumResult, StableCertificate,
};
pub use subgroups::{solutions_in_subgroup, MaximalFamily, SubgroupLattice, SubgroupRecord};

//! Exact fixed-point counts and Eichler traces for a concrete action.
//!
//! Given a verified witness for a signature, the fixed points of a
//! nontrivial automorphism `sigma` of order `m` split by rotation constant:
//! for each unit `u` mod `m` the count is the centralizer order of `sigma`
//! times the sum of `1/m_i` over the periods `m_i` divisible by `m` whose
//! torsion image power `phi(c_i)^{m_i u / m}` is conjugate to `sigma`.
//! These counts feed the trace of `sigma` on holomorphic differentials,
//! `chi(sigma) = 1 + sum_u |Fix_u| * zeta^u / (1 - zeta^u)`, evaluated in
//! exact cyclotomic arithmetic.
//!
//! The count formula is implemented with the *centralizer* order: the
//! class-size reading produces non-integer counts already on the minimal
//! examples, and non-integrality is surfaced as a `ConventionViolation`
//! error rather than silently rounded, so the choice stays falsifiable.

use std::collections::BTreeMap;

use num_rational::Ratio;
use num_traits::Zero;
use thiserror::Error;

use crate::classes::ConjugacyClassTable;
use crate::cyclotomic::{units_mod, CycInt, Cyclotomic};
use crate::epi::{verify_witness, EpiWitness};
use crate::group::FiniteGroup;
use crate::signature::{is_integral, riemann_hurwitz_genus, Signature};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum EichlerError {
    #[error("fixed-point count for order {element_order}, u = {u} is not a nonnegative integer; the formula convention does not fit this input")]
    ConventionViolation { element_order: u32, u: u32 },
    #[error("the automorphism must be nontrivial")]
    IdentityElement,
    #[error("witness fails verification")]
    InvalidWitness,
    #[error("surface genus {0} is below 2")]
    GenusTooSmall(i64),
}

/// Fixed points of one automorphism, split by rotation constant exponent.
/// Keys are exactly the units mod `m`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FixedPointProfile {
    pub m: u32,
    pub counts: BTreeMap<u32, u64>,
}

impl FixedPointProfile {
    /// Total number of fixed points of the automorphism.
    pub fn total(&self) -> u64 {
        self.counts.values().sum()
    }
}

/// Fixed-point counts of `sigma` (a nonidentity element index) acting via
/// the witness `w` for signature `sig`.
pub fn fixed_point_profile(
    g: &FiniteGroup,
    t: &ConjugacyClassTable,
    sig: &Signature,
    w: &EpiWitness,
    sigma: usize,
) -> Result<FixedPointProfile, EichlerError> {
    if sigma == g.identity() {
        return Err(EichlerError::IdentityElement);
    }
    let m = g.element_order(sigma);
    let sigma_class = t.class_of(sigma);
    let centralizer = t.class(sigma_class).centralizer_order as i64;
    let mut counts = BTreeMap::new();
    for u in units_mod(m) {
        let mut sum: Ratio<i64> = Ratio::zero();
        for (i, &mi) in sig.periods().iter().enumerate() {
            if !mi.is_multiple_of(m) {
                continue;
            }
            let exponent = u64::from(mi) * u64::from(u) / u64::from(m);
            let image_power = g.power(w.c[i], exponent);
            if t.class_of(image_power) == sigma_class {
                sum += Ratio::new(1, i64::from(mi));
            }
        }
        let value = Ratio::from_integer(centralizer) * sum;
        if !value.is_integer() || value < Ratio::zero() {
            return Err(EichlerError::ConventionViolation {
                element_order: m,
                u,
            });
        }
        counts.insert(u, value.to_integer() as u64);
    }
    Ok(FixedPointProfile { m, counts })
}

/// Trace of the automorphism on holomorphic differentials:
/// `chi = 1 + sum_{u in I(m)} |Fix_u| * zeta_m^u / (1 - zeta_m^u)`.
pub fn eichler_trace<T: CycInt>(profile: &FixedPointProfile) -> Cyclotomic<T> {
    let m = profile.m;
    assert!(m >= 2, "trace needs an automorphism of order >= 2");
    let one = Cyclotomic::one(m);
    let mut chi = one.clone();
    for (&u, &count) in &profile.counts {
        if count == 0 {
            continue;
        }
        let z = Cyclotomic::<T>::root_of_unity(m, u);
        let frac = z.mul(
            &one.sub(&z)
                .inv()
                .expect("1 - zeta^u is nonzero for u in I(m)"),
        );
        let weight = Ratio::from_integer(T::from_u64(count).expect("count fits scalar"));
        chi = chi.add(&frac.scale(&weight));
    }
    chi
}

/// One class value of the character carried by the surface.
#[derive(Clone, Debug)]
pub struct CharacterValue<T: CycInt> {
    pub class_id: usize,
    pub class_label: String,
    pub value: Cyclotomic<T>,
    pub fixed_points: u64,
}

/// The character of the action on holomorphic differentials, evaluated on
/// every class. Its degree is the surface genus.
#[derive(Clone, Debug)]
pub struct SurfaceCharacter<T: CycInt> {
    pub degree: u64,
    pub values: Vec<CharacterValue<T>>,
}

/// Evaluate the surface character of a verified witness: Eichler trace on
/// every nontrivial class, genus on the identity class.
pub fn surface_character<T: CycInt>(
    g: &FiniteGroup,
    t: &ConjugacyClassTable,
    sig: &Signature,
    w: &EpiWitness,
) -> Result<SurfaceCharacter<T>, EichlerError> {
    if !verify_witness(g, w) {
        return Err(EichlerError::InvalidWitness);
    }
    let genus = riemann_hurwitz_genus::<i64>(g.order() as u64, sig);
    if !is_integral(&genus) || genus < Ratio::from_integer(2) {
        return Err(EichlerError::GenusTooSmall(genus.to_integer()));
    }
    let genus = genus.to_integer() as u64;
    let mut values = Vec::with_capacity(t.len());
    for (cid, info) in t.classes().iter().enumerate() {
        if info.rep == g.identity() {
            values.push(CharacterValue {
                class_id: cid,
                class_label: info.label.clone(),
                value: Cyclotomic::from_rational(
                    1,
                    Ratio::from_integer(T::from_u64(genus).expect("genus fits scalar")),
                ),
                fixed_points: 0,
            });
            continue;
        }
        let profile = fixed_point_profile(g, t, sig, w, info.rep)?;
        values.push(CharacterValue {
            class_id: cid,
            class_label: info.label.clone(),
            value: eichler_trace(&profile),
            fixed_points: profile.total(),
        });
    }
    Ok(SurfaceCharacter {
        degree: genus,
        values,
    })
}

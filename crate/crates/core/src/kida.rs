//! Transition of `λ` and `λ̃` along an ℓ-extension `L/K` of abelian fields,
//! componentwise for the imaginary ℓ-adic characters φ of `Gal(K/Q)`, and
//! the criterion for `λ̃_L^φ = 0`.
//!
//! The base may be any intermediate field `K ⊆ B ⊆ L`; each ramified place
//! contributes `(e_p(L/B) − 1)` times the number of places of `L_∞` above a
//! place of `K`, so transitions compose along towers.

use std::collections::BTreeMap;

use serde::Serialize;
use thiserror::Error;

use crate::abfield::{self, AbelianField, FieldError, RamificationProfile};
use crate::characters::{self, LAdicCharacter};
use crate::logclass::{self, LogError};
use crate::padic::PadicContext;
use crate::quadclass::SplitType;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum KidaError {
    #[error("shape violation: {0}")]
    ShapeViolation(String),
    #[error("missing base invariant for φ = {0}")]
    MissingBaseInvariant(String),
    #[error("internal inconsistency: {0}")]
    InternalInconsistency(String),
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error(transparent)]
    Log(#[from] LogError),
}

impl KidaError {
    fn from_field(e: FieldError) -> Self {
        match e {
            FieldError::ShapeViolation(s) => KidaError::ShapeViolation(s),
            FieldError::NotASubfield => KidaError::ShapeViolation("K is not a subfield of L".into()),
            other => KidaError::Field(other),
        }
    }
}

/// `λ^φ` and `λ̃^φ` of the base field.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct BaseInvariants {
    pub lambda: u64,
    pub lambda_tilde: u64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TransitionInput {
    /// Field of degree prime to ℓ whose characters index the components.
    pub k: AbelianField,
    /// Intermediate base with known invariants; `None` means `K`.
    pub base: Option<AbelianField>,
    pub l: AbelianField,
    pub ell: u64,
    /// Base invariants keyed by φ id.
    pub invariants: BTreeMap<String, BaseInvariants>,
    /// Work over `K(ζ_ℓ)` and apply the `ω` correction.
    pub omega: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Contribution {
    pub p: u64,
    /// `e_p(L/B)`.
    pub e: u64,
    /// `ẽ_p(L_∞/B_∞)`.
    pub etilde: u64,
    /// `d_p(K_∞/K)`.
    pub d: u64,
    /// Places of `L_∞` above each place of `K` over `p`.
    pub places: u64,
    /// `m_p(φ)`.
    pub m: u8,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PhiTransition {
    pub phi: String,
    pub degree: usize,
    pub divides_chi_ell: bool,
    pub omega_term: u64,
    pub base: BaseInvariants,
    pub lambda: u64,
    pub lambda_tilde: u64,
    /// `(nss criterion, λ̃_L = 0, λ_L = d_ℓ)`.
    pub criterion_equivalence: (bool, bool, bool),
    pub nss_witness: Vec<u64>,
    pub contributions: Vec<Contribution>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DEllIndex {
    /// Index of the decomposition group of ℓ in `Gal(L_∞/K)`.
    pub value: u64,
    /// Number of places of `L_∞` above each place of `L` over ℓ.
    pub split_in_tower: u64,
    pub agree: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TransitionReport {
    pub ell: u64,
    pub tower_degree: u64,
    pub d_ell: DEllIndex,
    pub rows: Vec<PhiTransition>,
}

impl TransitionReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("plain data serializes")
    }

    pub fn row(&self, phi: &str) -> Option<&PhiTransition> {
        self.rows.iter().find(|r| r.phi == phi)
    }
}

/// Imaginary ℓ-adic characters of `Gal(K/Q)`.
pub fn imaginary_characters(k: &AbelianField, ell: u64) -> Vec<LAdicCharacter> {
    let conj = k.units().minus_one();
    characters::ladic_orbits_of(&k.characters(), ell)
        .into_iter()
        .filter(|phi| characters::is_imaginary(phi, &conj).unwrap_or(false))
        .collect()
}

/// `m_ℓ(φ) = 1`, i.e. φ is a constituent of `χ_ℓ`.
pub fn divides_chi_ell(k: &AbelianField, phi: &LAdicCharacter, ell: u64) -> bool {
    characters::induced_multiplicity(phi, &k.decomposition_subgroup(ell)).expect("same group") == 1
}

/// Base invariants derived from the quadratic engine when the minimality
/// criterion holds (`λ = 1`, `λ̃ = 0`).
pub fn quadratic_base_invariants(
    disc: i64,
    ell: u64,
    ctx: &PadicContext,
) -> Result<BTreeMap<String, BaseInvariants>, KidaError> {
    let k = AbelianField::quadratic(disc)?;
    let report = logclass::quad_report(disc, ell, ctx)?;
    let mut out = BTreeMap::new();
    if report.split == SplitType::Split && report.gold == Some(true) {
        for phi in imaginary_characters(&k, ell) {
            out.insert(phi.id(), BaseInvariants { lambda: 1, lambda_tilde: 0 });
        }
    }
    Ok(out)
}

/// Turns `phi=V` overrides into base invariants: `λ̃ = V − 1` when φ
/// divides `χ_ℓ`, else `λ̃ = V`.
pub fn assumed_invariants(
    k: &AbelianField,
    ell: u64,
    overrides: &BTreeMap<String, u64>,
) -> Result<BTreeMap<String, BaseInvariants>, KidaError> {
    let phis = imaginary_characters(k, ell);
    let mut out = BTreeMap::new();
    for (id, &v) in overrides {
        let phi = phis
            .iter()
            .find(|p| &p.id() == id)
            .ok_or_else(|| KidaError::ShapeViolation(format!("{id} is not an imaginary character of K")))?;
        let lambda_tilde = if divides_chi_ell(k, phi, ell) {
            v.checked_sub(1).ok_or_else(|| {
                KidaError::ShapeViolation(format!("λ^φ ≥ 1 is forced for {id} since φ divides χ_ℓ"))
            })?
        } else {
            v
        };
        out.insert(id.clone(), BaseInvariants { lambda: v, lambda_tilde });
    }
    Ok(out)
}

fn validate(input: &TransitionInput) -> Result<(), KidaError> {
    abfield::validate_shape(&input.l, &input.k, input.ell).map_err(KidaError::from_field)?;
    if let Some(b) = &input.base {
        if !b.contains(&input.k) || !input.l.contains(b) {
            return Err(KidaError::ShapeViolation("base must lie between K and L".into()));
        }
    }
    if !input.k.is_imaginary() {
        return Err(KidaError::ShapeViolation("K is real; there is no imaginary φ".into()));
    }
    Ok(())
}

/// Ramification data for `K ⊆ B ⊆ L`.
struct Setting {
    prof_l: RamificationProfile,
    prof_b: RamificationProfile,
    tower_lb: u64,
}

impl Setting {
    fn new(k: &AbelianField, b: &AbelianField, l: &AbelianField, ell: u64) -> Result<Self, KidaError> {
        Ok(Self {
            prof_l: abfield::ramification_profile(l, k, ell).map_err(KidaError::from_field)?,
            prof_b: abfield::ramification_profile(b, k, ell).map_err(KidaError::from_field)?,
            tower_lb: abfield::tower_degree(l, b, ell),
        })
    }

    fn transition(&self, phi: &LAdicCharacter, base: BaseInvariants, delta: u64) -> (u64, u64, Vec<Contribution>) {
        let ell = self.prof_l.ell;
        let mut lambda = self.tower_lb * (base.lambda - delta) + delta;
        let mut lambda_tilde = self.tower_lb * (base.lambda_tilde - delta) + delta;
        let mut contributions = Vec::new();
        for (p, data) in &self.prof_l.primes {
            let below = self.prof_b.primes.get(p);
            let e = data.inertia_order / below.map_or(1, |b| b.inertia_order);
            let etilde = data.log_ram_index / below.map_or(1, |b| b.log_ram_index);
            let m = characters::induced_multiplicity(phi, &data.decomposition_subgroup).expect("same group");
            let m64 = u64::from(m);
            if *p != ell {
                lambda += (e - 1) * data.place_index * m64;
            }
            lambda_tilde += (etilde - 1) * data.place_index * m64;
            contributions.push(Contribution {
                p: *p,
                e,
                etilde,
                d: data.tower_split_index,
                places: data.place_index,
                m,
            });
        }
        (lambda, lambda_tilde, contributions)
    }
}

fn omega_field(ell: u64) -> AbelianField {
    AbelianField::cyclotomic(ell)
}

/// Orbit of `K(ζ_ℓ)` containing the inflation of φ, and whether it is `ω`.
fn lift_phi(k: &AbelianField, k_omega: &AbelianField, phi: &LAdicCharacter, ell: u64) -> (LAdicCharacter, bool) {
    let single = AbelianField::new(k.units().clone(), vec![phi.representative().clone()])
        .expect("same group")
        .lift_to(k_omega.modulus())
        .expect("multiple");
    let chi = single.generators()[0].clone();
    let omega = omega_field(ell).lift_to(k_omega.modulus()).expect("multiple").generators()[0].clone();
    let orbit = characters::ladic_orbits_of(&k_omega.characters(), ell)
        .into_iter()
        .find(|o| o.contains(&chi))
        .expect("inflated character lies in the larger group");
    let is_omega = orbit.contains(&omega);
    (orbit, is_omega)
}

pub fn d_ell_index(l: &AbelianField, k: &AbelianField, ell: u64) -> Result<DEllIndex, KidaError> {
    abfield::validate_shape(l, k, ell).map_err(KidaError::from_field)?;
    let stable = abfield::ell_stable(l, k, ell)?;
    Ok(DEllIndex {
        value: stable.places,
        split_in_tower: stable.intro_split,
        agree: stable.places == stable.intro_split,
    })
}

pub fn lambda_transition(input: &TransitionInput) -> Result<TransitionReport, KidaError> {
    validate(input)?;
    let ell = input.ell;
    let k = &input.k;
    let b = input.base.as_ref().unwrap_or(k);
    let l = &input.l;
    let plain = Setting::new(k, b, l, ell)?;
    let twisted = if input.omega {
        let w = omega_field(ell);
        let (k2, b2, l2) = (k.compositum(&w), b.compositum(&w), l.compositum(&w));
        Some((Setting::new(&k2, &b2, &l2, ell)?, k2))
    } else {
        None
    };
    let d_ell = d_ell_index(l, k, ell)?;

    let mut rows = Vec::new();
    for phi in imaginary_characters(k, ell) {
        let id = phi.id();
        let base = *input.invariants.get(&id).ok_or_else(|| KidaError::MissingBaseInvariant(id.clone()))?;
        let divides = divides_chi_ell(k, &phi, ell);
        let (lambda, lambda_tilde, contributions, delta) = match &twisted {
            None => {
                let (a, t, c) = plain.transition(&phi, base, 0);
                (a, t, c, 0)
            }
            Some((setting, k2)) => {
                let (phi2, is_omega) = lift_phi(k, k2, &phi, ell);
                let delta = u64::from(is_omega);
                if base.lambda < delta || base.lambda_tilde < delta {
                    return Err(KidaError::ShapeViolation(format!("base invariants of {id} below the ω term")));
                }
                let (a, t, c) = setting.transition(&phi2, base, delta);
                if divides {
                    let (a0, t0, _) = plain.transition(&phi, base, 0);
                    if (a0, t0) != (a, t) {
                        return Err(KidaError::InternalInconsistency(format!(
                            "ω path ({a}, {t}) differs from the default path ({a0}, {t0}) for {id}"
                        )));
                    }
                }
                (a, t, c, delta)
            }
        };

        let conj = k.units().minus_one();
        for c in &contributions {
            if c.m != 0 && k.decomposition_subgroup(c.p).contains(&conj) {
                return Err(KidaError::InternalInconsistency(format!(
                    "m_{}({id}) = {} although conjugation decomposes",
                    c.p, c.m
                )));
            }
        }
        let witness: Vec<u64> = contributions.iter().filter(|c| c.m == 1 && c.etilde > 1).map(|c| c.p).collect();
        let nss = base.lambda_tilde == 0 && witness.is_empty();
        if nss != (lambda_tilde == 0) {
            return Err(KidaError::InternalInconsistency(format!(
                "criterion says {nss} but λ̃_L = {lambda_tilde} for {id}"
            )));
        }
        if divides {
            if lambda < d_ell.value {
                return Err(KidaError::InternalInconsistency(format!(
                    "λ_L = {lambda} < d_ℓ = {} for {id}",
                    d_ell.value
                )));
            }
            if lambda - lambda_tilde != d_ell.value {
                return Err(KidaError::InternalInconsistency(format!(
                    "λ_L − λ̃_L = {} differs from d_ℓ = {} for {id}",
                    lambda as i64 - lambda_tilde as i64,
                    d_ell.value
                )));
            }
        }
        rows.push(PhiTransition {
            phi: id,
            degree: phi.degree(),
            divides_chi_ell: divides,
            omega_term: delta,
            base,
            lambda,
            lambda_tilde,
            criterion_equivalence: (nss, lambda_tilde == 0, lambda == d_ell.value),
            nss_witness: witness,
            contributions,
        });
    }
    Ok(TransitionReport { ell, tower_degree: plain.prof_l.tower_degree, d_ell, rows })
}

/// Criterion for `λ̃_L^φ = 0`, per imaginary φ, with the log-ramified
/// primes that obstruct it.
pub fn nss_criterion(input: &TransitionInput) -> Result<Vec<(String, bool, Vec<u64>)>, KidaError> {
    let report = lambda_transition(input)?;
    Ok(report
        .rows
        .into_iter()
        .map(|r| (r.phi, r.criterion_equivalence.0, r.nss_witness))
        .collect())
}

/// `K` quadratic with base invariants from the quadratic engine.
pub fn quadratic_input(disc: i64, l: AbelianField, ell: u64, ctx: &PadicContext) -> Result<TransitionInput, KidaError> {
    let k = AbelianField::quadratic(disc)?;
    let invariants = quadratic_base_invariants(disc, ell, ctx)?;
    Ok(TransitionInput { k, base: None, l, ell, invariants, omega: false })
}

//! Abelian number fields as groups of Dirichlet characters on `(Z/f)^×`,
//! with decomposition data at rational primes and along the cyclotomic
//! `Z_ℓ`-tower.
//!
//! `(Z/f)^×` is presented on CRT generators: the smallest primitive root
//! for each odd prime power, `−1` for `4`, and `−1, 5` for `2^k`, `k ≥ 3`.
//! Galois groups never get materialized; a subgroup of `Gal(F/Q)` is
//! measured through its image under the generating characters.

use std::collections::BTreeMap;

use num_bigint::BigUint;
use thiserror::Error;

use crate::arith;
use crate::characters::{self, CharacterError, ComplexCharacter, Element, FiniteAbelianGroup, Subgroup};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FieldError {
    #[error("{0} is not a fundamental discriminant")]
    NotFundamental(i64),
    #[error("invalid modulus {0}")]
    InvalidModulus(u64),
    #[error("invalid character data: {0}")]
    InvalidCharacter(String),
    #[error("the base field is not a subfield of the extension")]
    NotASubfield,
    #[error("shape violation: {0}")]
    ShapeViolation(String),
    #[error("decomposition data did not stabilize by tower level {cap}")]
    StabilizationFailure { cap: u32 },
    #[error(transparent)]
    Character(#[from] CharacterError),
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum ComponentKind {
    /// Cyclic of order `φ(p^k)` generated by the smallest primitive root.
    Odd { root: u64, index: usize },
    /// `2^k`: optional `−1` factor and optional `5` factor of order `2^(k−2)`.
    Two { sign: Option<usize>, five: Option<usize> },
}

#[derive(Debug, Clone, PartialEq, Eq)]
struct Component {
    p: u64,
    k: u32,
    pk: u64,
    kind: ComponentKind,
}

/// `(Z/f)^×` with its CRT presentation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UnitGroup {
    modulus: u64,
    components: Vec<Component>,
    group: FiniteAbelianGroup,
    generators: Vec<u64>,
}

fn crt_lift(residue: u64, pk: u64, modulus: u64) -> u64 {
    let rest = modulus / pk;
    if rest == 1 {
        return residue % pk;
    }
    // x ≡ residue mod pk, x ≡ 1 mod rest
    let inv = arith::inv_mod(rest % pk, pk).expect("coprime");
    let t = arith::mul_mod((residue + pk - 1) % pk, inv, pk);
    (1 + arith::mul_mod(t, rest, modulus)) % modulus
}

/// Discrete logarithm of `h` to base `g` in a cyclic group of the given
/// order, by Pohlig-Hellman.
fn discrete_log(h: u64, g: u64, order: u64, modulus: u64) -> u64 {
    let mut residues = Vec::new();
    for (q, e) in arith::factor(order) {
        let qe = q.pow(e);
        let gq = arith::pow_mod(g, order / qe, modulus);
        let hq = arith::pow_mod(h, order / qe, modulus);
        let gamma = arith::pow_mod(gq, qe / q, modulus);
        let gq_inv = arith::inv_mod(gq, modulus).expect("unit");
        let mut x = 0u64;
        let mut qi = 1u64;
        for i in 0..e {
            let shifted = arith::mul_mod(hq, arith::pow_mod(gq_inv, x, modulus), modulus);
            let target = arith::pow_mod(shifted, q.pow(e - 1 - i), modulus);
            let mut acc = 1u64;
            let digit = (0..q)
                .find(|_| {
                    let hit = acc == target;
                    acc = arith::mul_mod(acc, gamma, modulus);
                    hit
                })
                .expect("element lies in the cyclic group");
            x += digit * qi;
            qi *= q;
        }
        residues.push((x, qe));
    }
    let mut x = 0u64;
    let mut m = 1u64;
    for (r, qe) in residues {
        // combine x mod m with r mod qe
        let inv = arith::inv_mod(m % qe, qe).unwrap_or(0);
        let t = arith::mul_mod((r + qe - x % qe) % qe, inv, qe);
        x += t * m;
        m *= qe;
    }
    x % order.max(1)
}

impl UnitGroup {
    pub fn new(modulus: u64) -> Result<Self, FieldError> {
        if modulus == 0 {
            return Err(FieldError::InvalidModulus(modulus));
        }
        let mut components = Vec::new();
        let mut orders = Vec::new();
        let mut generators = Vec::new();
        for (p, k) in arith::factor(modulus) {
            let pk = p.pow(k);
            let kind = if p == 2 {
                let sign = (k >= 2).then(|| {
                    orders.push(2);
                    generators.push(crt_lift(pk - 1, pk, modulus));
                    orders.len() - 1
                });
                let five = (k >= 3).then(|| {
                    orders.push(1 << (k - 2));
                    generators.push(crt_lift(5, pk, modulus));
                    orders.len() - 1
                });
                ComponentKind::Two { sign, five }
            } else {
                let root = arith::primitive_root(p, k);
                orders.push((p - 1) * p.pow(k - 1));
                generators.push(crt_lift(root, pk, modulus));
                ComponentKind::Odd { root, index: orders.len() - 1 }
            };
            components.push(Component { p, k, pk, kind });
        }
        let group = FiniteAbelianGroup::new(orders).expect("positive orders");
        Ok(Self { modulus, components, group, generators })
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    pub fn group(&self) -> &FiniteAbelianGroup {
        &self.group
    }

    /// Residues modulo `f` of the CRT generators.
    pub fn generators(&self) -> &[u64] {
        &self.generators
    }

    /// Exponent vector of a residue coprime to the modulus.
    pub fn dlog(&self, x: u64) -> Element {
        debug_assert!(self.modulus == 1 || arith::gcd(x % self.modulus, self.modulus) == 1);
        let mut out = self.group.identity();
        for c in &self.components {
            let r = x % c.pk;
            match c.kind {
                ComponentKind::Odd { root, index } => {
                    let order = self.group.cyclic_orders()[index];
                    out[index] = discrete_log(r, root, order, c.pk);
                }
                ComponentKind::Two { sign, five } => {
                    let negative = r % 4 == 3;
                    if let Some(i) = sign {
                        out[i] = u64::from(negative);
                    }
                    if let Some(i) = five {
                        let y = if negative { c.pk - r } else { r };
                        out[i] = discrete_log(y, 5, 1 << (c.k - 2), c.pk);
                    }
                }
            }
        }
        out
    }

    pub fn minus_one(&self) -> Element {
        self.dlog(self.modulus.saturating_sub(1).max(1))
    }

    /// Generator indices belonging to the `p`-primary component.
    fn component_indices(&self, p: u64) -> Vec<usize> {
        self.components
            .iter()
            .filter(|c| c.p == p)
            .flat_map(|c| match c.kind {
                ComponentKind::Odd { index, .. } => vec![index],
                ComponentKind::Two { sign, five } => sign.into_iter().chain(five).collect(),
            })
            .collect()
    }

    fn prime_power(&self, p: u64) -> (u32, u64) {
        self.components
            .iter()
            .find(|c| c.p == p)
            .map(|c| (c.k, c.pk))
            .unwrap_or((0, 1))
    }

    fn unit_vector(&self, i: usize) -> Element {
        let mut e = self.group.identity();
        e[i] = 1;
        e
    }
}

/// Order of the subgroup of `(Z/m)^r` generated by `rows`, by Smith
/// reduction over each `Z/q^a`.
pub fn subgroup_order(m: u64, rows: &[Vec<u64>]) -> u64 {
    let mut total = 1u64;
    for (q, a) in arith::factor(m) {
        let qa = q.pow(a);
        let mut mat: Vec<Vec<u64>> = rows.iter().map(|r| r.iter().map(|&x| x % qa).collect()).collect();
        loop {
            let mut best: Option<(u32, usize, usize)> = None;
            for (i, row) in mat.iter().enumerate() {
                for (j, &x) in row.iter().enumerate() {
                    if x != 0 {
                        let v = arith::valuation(x, q);
                        if best.is_none_or(|(bv, _, _)| v < bv) {
                            best = Some((v, i, j));
                        }
                    }
                }
            }
            let Some((k, pi, pj)) = best else { break };
            total *= q.pow(a - k);
            let pivot = mat.swap_remove(pi);
            let qk = q.pow(k);
            let unit_inv = arith::inv_mod((pivot[pj] / qk) % qa, qa).expect("unit");
            for row in &mut mat {
                if row[pj] == 0 {
                    continue;
                }
                let c = arith::mul_mod(row[pj] / qk, unit_inv, qa);
                for (x, &p) in row.iter_mut().zip(&pivot) {
                    *x = (*x + qa - arith::mul_mod(c, p, qa)) % qa;
                }
            }
        }
    }
    total
}

/// Abelian field cut out by the group generated by some characters of
/// `(Z/f)^×`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AbelianField {
    units: UnitGroup,
    generators: Vec<ComplexCharacter>,
}

/// Local degrees of a rational prime in an abelian field.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LocalDegrees {
    pub e: u64,
    pub f: u64,
    pub g: u64,
}

impl AbelianField {
    pub fn new(units: UnitGroup, generators: Vec<ComplexCharacter>) -> Result<Self, FieldError> {
        if generators.iter().any(|c| c.group() != units.group()) {
            return Err(FieldError::InvalidCharacter("character on the wrong group".into()));
        }
        Ok(Self { units, generators })
    }

    pub fn rationals() -> Self {
        Self { units: UnitGroup::new(1).expect("valid"), generators: Vec::new() }
    }

    /// Field cut out by `χ_j(g_i) = ζ_{o_j}^{e_ji}` on the CRT generators.
    pub fn from_orders(modulus: u64, char_orders: &[u64], char_images: &[Vec<u64>]) -> Result<Self, FieldError> {
        let units = UnitGroup::new(modulus)?;
        if char_orders.len() != char_images.len() {
            return Err(FieldError::InvalidCharacter("char_orders and char_images differ in length".into()));
        }
        let m = units.group().exponent();
        let mut generators = Vec::new();
        for (&o, imgs) in char_orders.iter().zip(char_images) {
            if o == 0 || m % o != 0 {
                return Err(FieldError::InvalidCharacter(format!("order {o} does not divide the group exponent {m}")));
            }
            if imgs.len() != units.group().rank() {
                return Err(FieldError::InvalidCharacter(format!(
                    "expected {} images, got {}",
                    units.group().rank(),
                    imgs.len()
                )));
            }
            let images = imgs.iter().map(|&e| (e % o) * (m / o)).collect();
            generators.push(ComplexCharacter::new(units.group(), images)?);
        }
        Ok(Self { units, generators })
    }

    /// `Q(√D)` through the Kronecker character of `D`.
    pub fn quadratic(disc: i64) -> Result<Self, FieldError> {
        if !arith::is_fundamental(disc) {
            return Err(FieldError::NotFundamental(disc));
        }
        let units = UnitGroup::new(disc.unsigned_abs())?;
        let m = units.group().exponent();
        let images = units
            .generators()
            .iter()
            .map(|&g| if arith::kronecker(disc, g) == 1 { 0 } else { m / 2 })
            .collect();
        let chi = ComplexCharacter::new(units.group(), images)?;
        Ok(Self { units, generators: vec![chi] })
    }

    /// The `n`-th layer `Q_n` of the cyclotomic `Z_ℓ`-extension.
    pub fn cyclotomic_layer(ell: u64, n: u32) -> Self {
        if n == 0 {
            return Self::rationals();
        }
        Self::from_orders(ell.pow(n + 1), &[ell.pow(n)], &[vec![1]]).expect("valid layer")
    }

    /// `Q(ζ_q)` for an odd prime `q`.
    pub fn cyclotomic(q: u64) -> Self {
        Self::from_orders(q, &[q - 1], &[vec![1]]).expect("valid cyclotomic field")
    }

    pub fn modulus(&self) -> u64 {
        self.units.modulus
    }

    pub fn units(&self) -> &UnitGroup {
        &self.units
    }

    pub fn generators(&self) -> &[ComplexCharacter] {
        &self.generators
    }

    fn char_modulus(&self) -> u64 {
        self.units.group().exponent()
    }

    /// Values of the generating characters on `x`; two elements agree in
    /// `Gal(F/Q)` iff their signatures agree.
    pub fn signature(&self, x: &[u64]) -> Vec<u64> {
        self.generators.iter().map(|c| c.eval(x)).collect()
    }

    /// Order of the image in `Gal(F/Q)` of the subgroup generated by `elements`.
    pub fn image_order(&self, elements: &[Element]) -> u64 {
        let rows: Vec<Vec<u64>> = elements.iter().map(|x| self.signature(x)).collect();
        subgroup_order(self.char_modulus(), &rows)
    }

    pub fn degree(&self) -> u64 {
        let rows: Vec<Vec<u64>> = self.generators.iter().map(|c| c.images().to_vec()).collect();
        subgroup_order(self.char_modulus(), &rows)
    }

    /// Exponent of `Gal(F/Q)`.
    pub fn exponent(&self) -> u64 {
        self.generators.iter().fold(1, |acc, c| arith::lcm(acc, c.order()))
    }

    pub fn is_imaginary(&self) -> bool {
        self.signature(&self.units.minus_one()).iter().any(|&v| v != 0)
    }

    /// Conductor: the lcm of the conductors of the generating characters.
    pub fn conductor(&self) -> u64 {
        self.generators.iter().fold(1, |acc, chi| arith::lcm(acc, self.character_conductor(chi)))
    }

    fn character_conductor(&self, chi: &ComplexCharacter) -> u64 {
        let mut cond = 1u64;
        for c in &self.units.components {
            let gens = chi.images();
            let part = match c.kind {
                ComponentKind::Odd { index, .. } => {
                    let image = gens[index];
                    if image == 0 {
                        1
                    } else {
                        // kernel of reduction to p^j is generated by g^{φ(p^j)}
                        let m = chi.modulus();
                        let j = (1..=c.k)
                            .find(|&j| arith::mul_mod(image, (c.p - 1) * c.p.pow(j - 1), m) == 0)
                            .expect("trivial at full level");
                        c.p.pow(j)
                    }
                }
                ComponentKind::Two { sign, five } => {
                    let s = sign.map_or(0, |i| gens[i]);
                    let f = five.map_or(0, |i| gens[i]);
                    if s == 0 && f == 0 {
                        1
                    } else if f == 0 {
                        4
                    } else {
                        let m = chi.modulus();
                        let j = (3..=c.k)
                            .find(|&j| arith::mul_mod(f, 1 << (j - 2), m) == 0)
                            .expect("trivial at full level");
                        1 << j
                    }
                }
            };
            cond *= part;
        }
        cond
    }

    /// The same field presented on a multiple `target` of the modulus.
    pub fn lift_to(&self, target: u64) -> Result<Self, FieldError> {
        if target == 0 || !target.is_multiple_of(self.modulus()) {
            return Err(FieldError::InvalidModulus(target));
        }
        let units = UnitGroup::new(target)?;
        let projected: Vec<Element> = units
            .generators()
            .iter()
            .map(|&g| self.units.dlog(g % self.modulus().max(1)))
            .collect();
        let m_old = self.char_modulus();
        let m_new = units.group().exponent();
        let scale = m_new / m_old;
        let generators = self
            .generators
            .iter()
            .map(|chi| {
                let images = projected.iter().map(|x| (chi.eval(x) * scale) % m_new).collect();
                ComplexCharacter::new(units.group(), images)
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Self { units, generators })
    }

    pub fn compositum(&self, other: &Self) -> Self {
        let m = arith::lcm(self.modulus(), other.modulus());
        let a = self.lift_to(m).expect("multiple");
        let b = other.lift_to(m).expect("multiple");
        let mut generators = a.generators;
        generators.extend(b.generators);
        Self { units: a.units, generators }
    }

    /// Whether `sub` is a subfield, i.e. its characters lie in ours.
    pub fn contains(&self, sub: &Self) -> bool {
        let m = arith::lcm(self.modulus(), sub.modulus());
        let big = self.lift_to(m).expect("multiple");
        let small = sub.lift_to(m).expect("multiple");
        let d = big.degree();
        small.generators.iter().all(|chi| {
            let mut rows: Vec<Vec<u64>> = big.generators.iter().map(|c| c.images().to_vec()).collect();
            rows.push(chi.images().to_vec());
            subgroup_order(big.char_modulus(), &rows) == d
        })
    }

    /// All characters of the field; only meant for small degrees.
    pub fn characters(&self) -> Vec<ComplexCharacter> {
        characters::character_closure(self.units.group(), &self.generators)
    }

    /// Generators in `(Z/f)^×` of the inertia group at `p` and of a Frobenius.
    pub fn decomposition_generators(&self, p: u64) -> (Vec<Element>, Element) {
        let inertia: Vec<Element> = self
            .units
            .component_indices(p)
            .into_iter()
            .map(|i| self.units.unit_vector(i))
            .collect();
        let (_, pv) = self.units.prime_power(p);
        let rest = self.modulus() / pv;
        let frob = if rest == 1 {
            self.units.group().identity()
        } else {
            // ≡ p mod f/p^v, ≡ 1 mod p^v
            let inv = arith::inv_mod(pv % rest, rest).expect("coprime");
            let t = arith::mul_mod((p % rest + rest - 1) % rest, inv, rest);
            let x = (1 + arith::mul_mod(t, pv, self.modulus())) % self.modulus();
            self.units.dlog(x)
        };
        (inertia, frob)
    }

    pub fn local_degrees(&self, p: u64) -> LocalDegrees {
        let (inertia, frob) = self.decomposition_generators(p);
        let e = self.image_order(&inertia);
        let mut all = inertia;
        all.push(frob);
        let d = self.image_order(&all);
        LocalDegrees { e, f: d / e, g: self.degree() / d }
    }

    /// Preimage in `(Z/f)^×` of the decomposition group at `p`.
    pub fn decomposition_subgroup(&self, p: u64) -> Subgroup {
        let (mut gens, frob) = self.decomposition_generators(p);
        gens.push(frob);
        Subgroup::generated_by(self.units.group(), &gens).expect("valid elements")
    }

    /// `[F ∩ Q_∞ : Q]`.
    pub fn cyclotomic_part(&self, ell: u64) -> u64 {
        let n = arith::valuation(self.degree(), ell) + 1;
        let layered = self.compositum(&Self::cyclotomic_layer(ell, n));
        self.degree() * ell.pow(n) / layered.degree()
    }
}

fn ell_adic_valuation_of_power_minus_one(q: &BigUint, e: u64, ell: u64) -> u32 {
    let modulus = num_traits::pow(BigUint::from(ell), 64);
    let x = q.modpow(&BigUint::from(e), &modulus);
    let y = (x + &modulus - 1u32) % &modulus;
    crate::padic::big_valuation(&y, ell)
}

/// Number of places of `K_∞` above each place of `K` over `p`.
pub fn tower_split_index(k: &AbelianField, p: u64, ell: u64) -> u64 {
    let j = arith::valuation(k.cyclotomic_part(ell), ell);
    if p == ell {
        return 1;
    }
    let f = k.local_degrees(p).f;
    let q = num_traits::pow(BigUint::from(p), f as usize);
    let t = ell_adic_valuation_of_power_minus_one(&q, ell - 1, ell);
    ell.pow(t.saturating_sub(1 + j))
}

/// `[L_∞ : K_∞]` for `K ⊆ L`.
pub fn tower_degree(l: &AbelianField, k: &AbelianField, ell: u64) -> u64 {
    (l.degree() / l.cyclotomic_part(ell)) / (k.degree() / k.cyclotomic_part(ell))
}

/// Checks that `L/K` is an ℓ-extension over a base of degree prime to ℓ.
pub fn validate_shape(l: &AbelianField, k: &AbelianField, ell: u64) -> Result<(), FieldError> {
    if ell < 3 || !arith::is_prime(ell) {
        return Err(FieldError::ShapeViolation(format!("ℓ = {ell} is not an odd prime")));
    }
    if !l.contains(k) {
        return Err(FieldError::NotASubfield);
    }
    let dk = k.degree();
    if dk.is_multiple_of(ell) {
        return Err(FieldError::ShapeViolation(format!("[K:Q] = {dk} is divisible by ℓ = {ell}")));
    }
    let rel = l.degree() / dk;
    if arith::p_part(rel, ell) != rel {
        return Err(FieldError::ShapeViolation(format!("[L:K] = {rel} is not a power of ℓ = {ell}")));
    }
    Ok(())
}

/// Decomposition data above ℓ along the towers `K_n ⊆ L_n`, at a fixed level.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
struct EllLevel {
    local_degree: u64,
    places: u64,
    intro_split: u64,
}

fn ell_level(l: &AbelianField, k: &AbelianField, ell: u64, n: u32) -> EllLevel {
    let qn = AbelianField::cyclotomic_layer(ell, n);
    let ln = l.compositum(&qn);
    let kn = k.compositum(&qn);
    let dl = ln.local_degrees(ell);
    let dk = kn.local_degrees(ell);
    let local_l = dl.e * dl.f;
    let local_k = dk.e * dk.f;
    EllLevel {
        local_degree: local_l / local_k,
        // places of L_n above one place of K over ℓ
        places: dl.g / k.local_degrees(ell).g,
        intro_split: dl.g / l.local_degrees(ell).g,
    }
}

/// Stabilized decomposition data above ℓ for `K ⊆ L`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EllStable {
    /// Order of the decomposition group of ℓ in `Gal(L_∞/K_∞)`.
    pub log_ram_index: u64,
    /// Index of the decomposition group of ℓ in `Gal(L_∞/K)`.
    pub places: u64,
    /// Number of places of `L_∞` above each place of `L` over ℓ.
    pub intro_split: u64,
    pub level: u32,
}

pub fn ell_stable(l: &AbelianField, k: &AbelianField, ell: u64) -> Result<EllStable, FieldError> {
    if !l.contains(k) {
        return Err(FieldError::NotASubfield);
    }
    let start = arith::valuation(l.exponent(), ell) + 1;
    let cap = arith::valuation(l.exponent(), ell).max(1) + 8;
    let mut prev = ell_level(l, k, ell, start);
    for n in start + 1..=cap {
        let cur = ell_level(l, k, ell, n);
        if cur == prev {
            return Ok(EllStable {
                log_ram_index: cur.local_degree,
                places: cur.places,
                intro_split: cur.intro_split,
                level: n - 1,
            });
        }
        prev = cur;
    }
    Err(FieldError::StabilizationFailure { cap })
}

/// `ẽ_p(L_∞/K_∞)`.
pub fn log_ram_index(l: &AbelianField, k: &AbelianField, p: u64, ell: u64) -> Result<u64, FieldError> {
    if !l.contains(k) {
        return Err(FieldError::NotASubfield);
    }
    if p == ell {
        return Ok(ell_stable(l, k, ell)?.log_ram_index);
    }
    Ok(l.local_degrees(p).e / k.local_degrees(p).e)
}

pub fn is_log_unramified(l: &AbelianField, k: &AbelianField, p: u64, ell: u64) -> Result<bool, FieldError> {
    Ok(log_ram_index(l, k, p, ell)? == 1)
}

/// Ramification data at one rational prime for `K ⊆ L`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PrimeData {
    pub p: u64,
    /// `e_p(L/K)`.
    pub inertia_order: u64,
    /// Residue degree of `p` in `K`.
    pub residue_order: u64,
    /// Preimage in `(Z/f_K)^×` of the decomposition group of `p` in `Gal(K/Q)`.
    pub decomposition_subgroup: Subgroup,
    /// `d_p(K_∞/K)`.
    pub tower_split_index: u64,
    /// `ẽ_p(L_∞/K_∞)`.
    pub log_ram_index: u64,
    /// Index of the decomposition group of `p` in `Gal(L_∞/K)`.
    pub place_index: u64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RamificationProfile {
    pub ell: u64,
    pub tower_degree: u64,
    pub primes: BTreeMap<u64, PrimeData>,
    pub ell_stable: EllStable,
}

/// Profile at ℓ and every prime ramified in `L`.
pub fn ramification_profile(l: &AbelianField, k: &AbelianField, ell: u64) -> Result<RamificationProfile, FieldError> {
    if !l.contains(k) {
        return Err(FieldError::NotASubfield);
    }
    let tower = tower_degree(l, k, ell);
    let stable = ell_stable(l, k, ell)?;
    let mut primes: Vec<u64> = arith::prime_divisors(l.modulus());
    primes.push(ell);
    primes.sort();
    primes.dedup();
    let mut out = BTreeMap::new();
    for p in primes {
        let dk = k.local_degrees(p);
        let d = tower_split_index(k, p, ell);
        let (e, lt, places) = if p == ell {
            (l.local_degrees(p).e / dk.e, stable.log_ram_index, stable.places)
        } else {
            let e = l.local_degrees(p).e / dk.e;
            (e, e, d * tower / e)
        };
        out.insert(
            p,
            PrimeData {
                p,
                inertia_order: e,
                residue_order: dk.f,
                decomposition_subgroup: k.decomposition_subgroup(p),
                tower_split_index: d,
                log_ram_index: lt,
                place_index: places,
            },
        );
    }
    Ok(RamificationProfile { ell, tower_degree: tower, primes: out, ell_stable: stable })
}

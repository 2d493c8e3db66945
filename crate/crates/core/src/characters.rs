//! Finite abelian groups given as products of cyclic factors, their complex
//! characters with exact exponent arithmetic, and ℓ-adic irreducible
//! characters as Galois orbits of complex ones.

use std::collections::BTreeSet;
use std::fmt;

use thiserror::Error;

use crate::arith;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CharacterError {
    #[error("cyclic factor orders must be positive")]
    InvalidGroup,
    #[error("character images {0:?} are not well defined on the group")]
    IllDefined(Vec<u64>),
    #[error("element {0:?} does not belong to the group")]
    NotAnElement(Vec<u64>),
    #[error("element {0:?} is not an involution")]
    ConjNotInvolution(Vec<u64>),
    #[error("subgroup and character live on different groups")]
    NotASubgroup,
}

/// `Z/n_1 × … × Z/n_r`, elements being exponent vectors.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct FiniteAbelianGroup {
    cyclic_orders: Vec<u64>,
}

pub type Element = Vec<u64>;

impl FiniteAbelianGroup {
    pub fn new(cyclic_orders: Vec<u64>) -> Result<Self, CharacterError> {
        if cyclic_orders.contains(&0) {
            return Err(CharacterError::InvalidGroup);
        }
        Ok(Self { cyclic_orders })
    }

    pub fn cyclic(n: u64) -> Self {
        Self::new(vec![n]).expect("positive order")
    }

    pub fn cyclic_orders(&self) -> &[u64] {
        &self.cyclic_orders
    }

    pub fn rank(&self) -> usize {
        self.cyclic_orders.len()
    }

    pub fn order(&self) -> u64 {
        self.cyclic_orders.iter().product()
    }

    pub fn exponent(&self) -> u64 {
        self.cyclic_orders.iter().fold(1, |acc, &n| arith::lcm(acc, n))
    }

    pub fn identity(&self) -> Element {
        vec![0; self.rank()]
    }

    pub fn contains(&self, x: &[u64]) -> bool {
        x.len() == self.rank() && x.iter().zip(&self.cyclic_orders).all(|(&a, &n)| a < n)
    }

    pub fn add(&self, x: &[u64], y: &[u64]) -> Element {
        x.iter()
            .zip(y)
            .zip(&self.cyclic_orders)
            .map(|((&a, &b), &n)| (a + b) % n)
            .collect()
    }

    pub fn neg(&self, x: &[u64]) -> Element {
        x.iter().zip(&self.cyclic_orders).map(|(&a, &n)| (n - a) % n).collect()
    }

    pub fn scale(&self, x: &[u64], k: u64) -> Element {
        x.iter()
            .zip(&self.cyclic_orders)
            .map(|(&a, &n)| arith::mul_mod(a, k, n))
            .collect()
    }

    pub fn element_order(&self, x: &[u64]) -> u64 {
        x.iter()
            .zip(&self.cyclic_orders)
            .fold(1, |acc, (&a, &n)| arith::lcm(acc, n / arith::gcd(a, n)))
    }

    /// All elements in mixed-radix order.
    pub fn elements(&self) -> Vec<Element> {
        let mut out = vec![self.identity()];
        for (i, &n) in self.cyclic_orders.iter().enumerate() {
            let mut next = Vec::with_capacity(out.len() * n as usize);
            for x in &out {
                for a in 0..n {
                    let mut y = x.clone();
                    y[i] = a;
                    next.push(y);
                }
            }
            out = next;
        }
        out
    }

    /// All characters of the group.
    pub fn characters(&self) -> Vec<ComplexCharacter> {
        let m = self.exponent();
        let dual = FiniteAbelianGroup { cyclic_orders: self.cyclic_orders.clone() };
        dual.elements()
            .into_iter()
            .map(|k| {
                let images = k
                    .iter()
                    .zip(&self.cyclic_orders)
                    .map(|(&ki, &n)| ki * (m / n))
                    .collect();
                ComplexCharacter { group: self.clone(), images }
            })
            .collect()
    }
}

/// The subgroup generated by a list of elements, kept as its full element set.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Subgroup {
    group: FiniteAbelianGroup,
    elements: BTreeSet<Element>,
}

impl Subgroup {
    pub fn generated_by(group: &FiniteAbelianGroup, generators: &[Element]) -> Result<Self, CharacterError> {
        for g in generators {
            if !group.contains(g) {
                return Err(CharacterError::NotAnElement(g.clone()));
            }
        }
        let mut elements = BTreeSet::from([group.identity()]);
        let mut frontier = vec![group.identity()];
        while let Some(x) = frontier.pop() {
            for g in generators {
                let y = group.add(&x, g);
                if elements.insert(y.clone()) {
                    frontier.push(y);
                }
            }
        }
        Ok(Self { group: group.clone(), elements })
    }

    pub fn trivial(group: &FiniteAbelianGroup) -> Self {
        Self::generated_by(group, &[]).expect("no generators")
    }

    pub fn group(&self) -> &FiniteAbelianGroup {
        &self.group
    }

    pub fn order(&self) -> u64 {
        self.elements.len() as u64
    }

    pub fn index(&self) -> u64 {
        self.group.order() / self.order()
    }

    pub fn contains(&self, x: &[u64]) -> bool {
        self.elements.contains(x)
    }

    pub fn elements(&self) -> impl Iterator<Item = &Element> {
        self.elements.iter()
    }
}

/// `g ↦ ζ_m^{⟨images, g⟩}` with `m` the group exponent.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ComplexCharacter {
    group: FiniteAbelianGroup,
    images: Vec<u64>,
}

impl PartialOrd for FiniteAbelianGroup {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for FiniteAbelianGroup {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.cyclic_orders.cmp(&other.cyclic_orders)
    }
}

impl ComplexCharacter {
    pub fn new(group: &FiniteAbelianGroup, images: Vec<u64>) -> Result<Self, CharacterError> {
        let m = group.exponent();
        let ok = images.len() == group.rank()
            && images
                .iter()
                .zip(group.cyclic_orders())
                .all(|(&e, &n)| e < m && arith::mul_mod(e, n, m) == 0);
        if !ok {
            return Err(CharacterError::IllDefined(images));
        }
        Ok(Self { group: group.clone(), images })
    }

    pub fn trivial(group: &FiniteAbelianGroup) -> Self {
        Self { group: group.clone(), images: vec![0; group.rank()] }
    }

    pub fn group(&self) -> &FiniteAbelianGroup {
        &self.group
    }

    pub fn images(&self) -> &[u64] {
        &self.images
    }

    /// Modulus of the exponent arithmetic, the group exponent.
    pub fn modulus(&self) -> u64 {
        self.group.exponent()
    }

    /// Exponent `k` with `χ(g) = ζ_m^k`.
    pub fn eval(&self, g: &[u64]) -> u64 {
        let m = self.modulus();
        self.images
            .iter()
            .zip(g)
            .fold(0, |acc, (&e, &a)| (acc + arith::mul_mod(e, a, m)) % m)
    }

    pub fn pow(&self, k: u64) -> Self {
        let m = self.modulus();
        Self {
            group: self.group.clone(),
            images: self.images.iter().map(|&e| arith::mul_mod(e, k, m)).collect(),
        }
    }

    pub fn mul(&self, other: &Self) -> Self {
        let m = self.modulus();
        Self {
            group: self.group.clone(),
            images: self.images.iter().zip(&other.images).map(|(&a, &b)| (a + b) % m).collect(),
        }
    }

    pub fn order(&self) -> u64 {
        let m = self.modulus();
        self.images.iter().fold(1, |acc, &e| arith::lcm(acc, m / arith::gcd(e, m)))
    }

    pub fn is_trivial(&self) -> bool {
        self.images.iter().all(|&e| e == 0)
    }

    pub fn is_trivial_on(&self, h: &Subgroup) -> bool {
        h.elements().all(|x| self.eval(x) == 0)
    }
}

impl fmt::Display for ComplexCharacter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.images.iter().map(u64::to_string).collect();
        write!(f, "[{}]", parts.join(","))
    }
}

/// Galois orbit of a complex character over `Q_ℓ`; for `ℓ ∤ m` this is the
/// orbit under `χ ↦ χ^ℓ`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LAdicCharacter {
    members: Vec<ComplexCharacter>,
}

impl LAdicCharacter {
    pub fn degree(&self) -> usize {
        self.members.len()
    }

    pub fn members(&self) -> &[ComplexCharacter] {
        &self.members
    }

    /// Member with the lexicographically smallest image vector.
    pub fn representative(&self) -> &ComplexCharacter {
        &self.members[0]
    }

    pub fn id(&self) -> String {
        self.representative().to_string()
    }

    pub fn contains(&self, chi: &ComplexCharacter) -> bool {
        self.members.binary_search(chi).is_ok()
    }

    pub fn is_trivial(&self) -> bool {
        self.representative().is_trivial()
    }
}

impl fmt::Display for LAdicCharacter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.id())
    }
}

/// Multipliers `t ∈ (Z/m)^×` realizing `Gal(Q_ℓ(ζ_m)/Q_ℓ)`: powers of ℓ on
/// the prime-to-ℓ part, anything on the ℓ-part.
fn galois_multipliers(m: u64, ell: u64) -> Vec<u64> {
    let m_prime = m / arith::p_part(m, ell);
    let mut powers = BTreeSet::new();
    let mut t = 1 % m_prime;
    while powers.insert(t) {
        t = arith::mul_mod(t, ell, m_prime);
    }
    (1..=m)
        .map(|t| t % m)
        .filter(|&t| arith::gcd(t, m) == 1 && powers.contains(&(t % m_prime)))
        .collect()
}

fn orbit_of(chi: &ComplexCharacter, multipliers: &[u64]) -> LAdicCharacter {
    let members: BTreeSet<ComplexCharacter> = multipliers.iter().map(|&t| chi.pow(t)).collect();
    LAdicCharacter { members: members.into_iter().collect() }
}

/// Partitions the given characters, assumed closed under the Galois
/// action, into ℓ-adic orbits sorted by representative.
pub fn ladic_orbits_of(characters: &[ComplexCharacter], ell: u64) -> Vec<LAdicCharacter> {
    let Some(first) = characters.first() else {
        return Vec::new();
    };
    let multipliers = galois_multipliers(first.modulus(), ell);
    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    let mut sorted: Vec<&ComplexCharacter> = characters.iter().collect();
    sorted.sort();
    for chi in sorted {
        if seen.contains(chi) {
            continue;
        }
        let orbit = orbit_of(chi, &multipliers);
        seen.extend(orbit.members.iter().cloned());
        out.push(orbit);
    }
    out
}

pub fn ladic_orbits(group: &FiniteAbelianGroup, ell: u64) -> Vec<LAdicCharacter> {
    ladic_orbits_of(&group.characters(), ell)
}

/// All characters in the group generated by `generators`.
pub fn character_closure(group: &FiniteAbelianGroup, generators: &[ComplexCharacter]) -> Vec<ComplexCharacter> {
    let mut all = BTreeSet::from([ComplexCharacter::trivial(group)]);
    let mut frontier = vec![ComplexCharacter::trivial(group)];
    while let Some(x) = frontier.pop() {
        for g in generators {
            let y = x.mul(g);
            if all.insert(y.clone()) {
                frontier.push(y);
            }
        }
    }
    all.into_iter().collect()
}

/// Whether every constituent sends `conj` to −1.
pub fn is_imaginary(phi: &LAdicCharacter, conj: &[u64]) -> Result<bool, CharacterError> {
    let group = phi.representative().group();
    if !group.contains(conj) {
        return Err(CharacterError::NotAnElement(conj.to_vec()));
    }
    if group.element_order(conj) > 2 {
        return Err(CharacterError::ConjNotInvolution(conj.to_vec()));
    }
    let m = group.exponent();
    Ok(m.is_multiple_of(2) && phi.members().iter().all(|chi| chi.eval(conj) == m / 2))
}

/// Multiplicity of φ in `Ind_H^G 1` divided by its degree: 1 when the
/// constituents are trivial on `H`, else 0.
pub fn induced_multiplicity(phi: &LAdicCharacter, h: &Subgroup) -> Result<u8, CharacterError> {
    if h.group() != phi.representative().group() {
        return Err(CharacterError::NotASubgroup);
    }
    Ok(u8::from(phi.representative().is_trivial_on(h)))
}

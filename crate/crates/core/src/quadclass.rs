//! Imaginary quadratic fields through binary quadratic forms: class groups,
//! the class of a prime above ℓ, a generator of its power, and the wild
//! logarithmic datum obtained by embedding that generator in `Q_ℓ`.
//!
//! A form `(a, b, c)` stands for the ideal `aZ + ((−b + √D)/2)Z`.

use std::collections::BTreeSet;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::Serialize;
use thiserror::Error;

use crate::arith;
use crate::padic::{self, PadicContext, PadicError, PadicNumber, Valuation};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum QuadError {
    #[error("{0} is not a negative fundamental discriminant")]
    NotFundamental(i64),
    #[error("ℓ must be odd")]
    EllEqualsTwo,
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("ℓ is {0} in this field, not split")]
    NotSplit(SplitType),
    #[error("no generator found for the prime power; the class order is inconsistent")]
    SearchExhausted,
    #[error(transparent)]
    Padic(#[from] PadicError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SplitType {
    Split,
    Inert,
    Ramified,
}

impl SplitType {
    pub fn as_str(self) -> &'static str {
        match self {
            SplitType::Split => "split",
            SplitType::Inert => "inert",
            SplitType::Ramified => "ramified",
        }
    }
}

impl fmt::Display for SplitType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

pub fn split_type(disc: i64, ell: u64) -> SplitType {
    match arith::kronecker(disc, ell) {
        1 => SplitType::Split,
        -1 => SplitType::Inert,
        _ => SplitType::Ramified,
    }
}

fn check_disc(disc: i64) -> Result<(), QuadError> {
    if disc >= 0 || !arith::is_fundamental(disc) {
        return Err(QuadError::NotFundamental(disc));
    }
    Ok(())
}

fn check_ell(ell: u64) -> Result<(), QuadError> {
    if ell == 2 {
        return Err(QuadError::EllEqualsTwo);
    }
    if !arith::is_prime(ell) {
        return Err(QuadError::NotPrime(ell));
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct QuadForm {
    pub a: i64,
    pub b: i64,
    pub c: i64,
}

impl fmt::Display for QuadForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}, {})", self.a, self.b, self.c)
    }
}

impl QuadForm {
    pub fn new(a: i64, b: i64, c: i64) -> Self {
        Self { a, b, c }
    }

    pub fn disc(&self) -> i64 {
        self.b * self.b - 4 * self.a * self.c
    }

    /// `(1, b, c)` with `b ∈ {0, 1}`.
    pub fn principal(disc: i64) -> Self {
        let b = disc.rem_euclid(2);
        Self::new(1, b, (b * b - disc) / 4)
    }

    pub fn is_reduced(&self) -> bool {
        self.b.abs() <= self.a && self.a <= self.c && !((self.b.abs() == self.a || self.a == self.c) && self.b < 0)
    }

    pub fn reduce(&self) -> Self {
        let (mut a, mut b, mut c) = (self.a as i128, self.b as i128, self.c as i128);
        loop {
            // b into (−a, a]
            let k = Integer::div_floor(&(a - b), &(2 * a));
            c += k * (a * k + b);
            b += 2 * a * k;
            if a > c {
                (a, b, c) = (c, -b, a);
                continue;
            }
            if a == c && b < 0 {
                b = -b;
            }
            break;
        }
        Self::new(a as i64, b as i64, c as i64)
    }

    pub fn inverse(&self) -> Self {
        Self::new(self.a, -self.b, self.c).reduce()
    }

    /// Dirichlet composition followed by reduction.
    pub fn compose(&self, other: &Self) -> Self {
        let (a1, b1) = (self.a as i128, self.b as i128);
        let (a2, b2) = (other.a as i128, other.b as i128);
        let disc = self.disc() as i128;
        let s = (b1 + b2) / 2;
        let (g, u, v) = egcd(a1, a2);
        let (d, w, z) = egcd(g, s);
        // x·a1 + y·a2 + z·s = d
        let (x, y) = (w * u, w * v);
        let a = a1 * a2 / (d * d);
        let two_a = 2 * a;
        let num = x * a1 * b2 + y * a2 * b1 + z * ((b1 * b2 + disc) / 2);
        let b = (num / d).rem_euclid(two_a);
        let c = (b * b - disc) / (4 * a);
        Self::new(a as i64, b as i64, c as i64).reduce()
    }

    pub fn pow(&self, mut k: u64) -> Self {
        let mut result = Self::principal(self.disc());
        let mut base = *self;
        while k > 0 {
            if k & 1 == 1 {
                result = result.compose(&base);
            }
            base = base.compose(&base);
            k >>= 1;
        }
        result
    }
}

fn egcd(a: i128, b: i128) -> (i128, i128, i128) {
    let e = a.extended_gcd(&b);
    if e.gcd < 0 {
        (-e.gcd, -e.x, -e.y)
    } else {
        (e.gcd, e.x, e.y)
    }
}

/// Prime form `(p, b, c)` with `b` congruent to the canonical square root of
/// `D` modulo `p`, `b ≡ D (mod 2)` and `b ∈ (−p, p]`.
pub fn prime_form(disc: i64, p: u64) -> Option<QuadForm> {
    let pi = p as i64;
    let b = if p == 2 {
        (-1..=2).find(|&b: &i64| (b - disc).rem_euclid(2) == 0 && (b * b - disc).rem_euclid(8) == 0)?
    } else {
        let r = arith::sqrt_mod_prime(disc.rem_euclid(pi) as u64, p)? as i64;
        let r = r.min((pi - r) % pi);
        // lift to the residue class with the parity of D inside (−p, p]
        let mut b = r;
        if (b - disc).rem_euclid(2) != 0 {
            b -= pi;
        }
        if b <= -pi {
            b += 2 * pi;
        }
        b
    };
    if (b * b - disc) % (4 * pi) != 0 {
        return None;
    }
    Some(QuadForm::new(pi, b, (b * b - disc) / (4 * pi)))
}

/// Class group of an imaginary quadratic field.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClassGroup {
    pub disc: i64,
    /// Reduced forms, one per class, sorted.
    pub forms: Vec<QuadForm>,
    /// Invariant factors `d_1 | d_2 | …`, omitting 1s.
    pub invariants: Vec<u64>,
}

impl ClassGroup {
    pub fn order(&self) -> u64 {
        self.forms.len() as u64
    }

    pub fn is_cyclic(&self) -> bool {
        self.invariants.len() <= 1
    }

    pub fn element_order(&self, form: &QuadForm) -> u64 {
        element_order(form)
    }
}

fn element_order(form: &QuadForm) -> u64 {
    let id = QuadForm::principal(form.disc());
    let mut x = form.reduce();
    let mut k = 1;
    while x != id {
        x = x.compose(form);
        k += 1;
    }
    k
}

fn invariant_factors(orders: &[u64], h: u64) -> Vec<u64> {
    let mut invariants: Vec<u64> = Vec::new();
    for (q, e) in arith::factor(h) {
        // s_k = log_q #{x : x^{q^k} = 1}
        let count = |k: u32| orders.iter().filter(|&&o| q.pow(k) % arith::p_part(o, q) == 0).count() as u64;
        let s: Vec<u32> = (0..=e).map(|k| arith::valuation(count(k), q)).collect();
        // r_k = number of cyclic q-factors of order ≥ q^k
        let mut exps: Vec<u32> = Vec::new();
        for k in 1..=e {
            let r_k = s[k as usize] - s[k as usize - 1];
            let r_next = if k < e { s[k as usize + 1] - s[k as usize] } else { 0 };
            for _ in 0..(r_k - r_next) {
                exps.push(k);
            }
        }
        exps.sort_unstable_by(|a, b| b.cmp(a));
        for (i, k) in exps.into_iter().enumerate() {
            if invariants.len() <= i {
                invariants.push(1);
            }
            invariants[i] *= q.pow(k);
        }
    }
    invariants.reverse();
    invariants
}

/// Class group generated by composition of prime forms of norm at most
/// `√(|D|/3)`.
pub fn class_group(disc: i64) -> Result<ClassGroup, QuadError> {
    check_disc(disc)?;
    let bound = arith::isqrt(disc.unsigned_abs() / 3);
    let generators: Vec<QuadForm> = (2..=bound)
        .filter(|&p| arith::is_prime(p))
        .filter_map(|p| prime_form(disc, p))
        .map(|f| f.reduce())
        .collect();
    let id = QuadForm::principal(disc);
    let mut seen = BTreeSet::from([id]);
    let mut frontier = vec![id];
    while let Some(x) = frontier.pop() {
        for g in &generators {
            let y = x.compose(g);
            if seen.insert(y) {
                frontier.push(y);
            }
        }
    }
    let forms: Vec<QuadForm> = seen.into_iter().collect();
    let orders: Vec<u64> = forms.iter().map(element_order).collect();
    let invariants = invariant_factors(&orders, forms.len() as u64);
    Ok(ClassGroup { disc, forms, invariants })
}

/// Splitting of ℓ and, when split, the class of the prime above it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PrimeClass {
    pub split: SplitType,
    pub form: Option<QuadForm>,
    /// Order of `[l]` in the class group.
    pub order: Option<u64>,
    /// ℓ-part of that order.
    pub h_prime: Option<u64>,
}

pub fn prime_class_order(disc: i64, ell: u64) -> Result<PrimeClass, QuadError> {
    check_disc(disc)?;
    check_ell(ell)?;
    let split = split_type(disc, ell);
    if split != SplitType::Split {
        return Ok(PrimeClass { split, form: None, order: None, h_prime: None });
    }
    let form = prime_form(disc, ell).expect("split prime has a form");
    let order = element_order(&form);
    Ok(PrimeClass {
        split,
        form: Some(form),
        order: Some(order),
        h_prime: Some(arith::p_part(order, ell)),
    })
}

/// `α = (x + y√D)/2`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QuadInteger {
    pub disc: i64,
    pub x: BigInt,
    pub y: BigInt,
}

impl QuadInteger {
    pub fn norm(&self) -> BigInt {
        (&self.x * &self.x - BigInt::from(self.disc) * &self.y * &self.y) / 4
    }

    pub fn conj(&self) -> Self {
        Self { disc: self.disc, x: self.x.clone(), y: -&self.y }
    }

    pub fn neg(&self) -> Self {
        Self { disc: self.disc, x: -&self.x, y: -&self.y }
    }

    pub fn mul(&self, other: &Self) -> Self {
        let d = BigInt::from(self.disc);
        let x = (&self.x * &other.x + &d * &self.y * &other.y) / 2;
        let y = (&self.x * &other.y + &other.x * &self.y) / 2;
        Self { disc: self.disc, x, y }
    }

    /// Roots of unity of the ring of integers.
    pub fn units(disc: i64) -> Vec<Self> {
        let mk = |x: i64, y: i64| Self { disc, x: BigInt::from(x), y: BigInt::from(y) };
        match disc {
            -4 => vec![mk(2, 0), mk(0, 1), mk(-2, 0), mk(0, -1)],
            -3 => vec![mk(2, 0), mk(1, 1), mk(-1, 1), mk(-2, 0), mk(-1, -1), mk(1, -1)],
            _ => vec![mk(2, 0), mk(-2, 0)],
        }
    }
}

impl fmt::Display for QuadInteger {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({} + {}·√{})/2", self.x, self.y, self.disc)
    }
}

/// Square root of `D` modulo `4ℓ^w` congruent to `b` modulo `2ℓ`.
fn lifted_root(disc: i64, ell: u64, w: u32, b: i64) -> Result<BigInt, QuadError> {
    let ctx = PadicContext::new(ell, w + 1, 1)?;
    let r = padic::hensel_sqrt(&ctx, &BigInt::from(disc))?;
    let modulus = num_traits::pow(BigInt::from(ell), w as usize);
    let mut r = BigInt::from(r.residue(w)) % &modulus;
    if (&r - b).mod_floor(&BigInt::from(ell)) != BigInt::zero() {
        r = (&modulus - r) % &modulus;
    }
    if (&r - disc).is_odd() {
        r += &modulus;
    }
    Ok(r)
}

/// A generator of `l^w` (or its conjugate) where `w` is the order of the
/// class `[l]`, normalized to `x, y > 0` with `(y, x)` minimal among its
/// associates and their conjugates.
pub fn generator_of_prime_power(disc: i64, ell: u64, w: u64) -> Result<QuadInteger, QuadError> {
    check_disc(disc)?;
    check_ell(ell)?;
    let split = split_type(disc, ell);
    if split != SplitType::Split {
        return Err(QuadError::NotSplit(split));
    }
    let b = prime_form(disc, ell).expect("split").b;
    let r = lifted_root(disc, ell, w as u32, b)?;
    let a = num_traits::pow(BigInt::from(ell), w as usize);
    let d = BigInt::from(disc);
    let c = (&r * &r - &d) / (4 * &a);
    let (p, q) = reduce_tracking(a.clone(), r.clone(), c).ok_or(QuadError::SearchExhausted)?;
    // N(p·a − q(−r + √D)/2) = a·f(p, q)
    let alpha = QuadInteger { disc, x: 2 * &p * &a + &q * &r, y: -q };
    if alpha.norm() != a {
        return Err(QuadError::SearchExhausted);
    }
    normalize(&alpha).ok_or(QuadError::SearchExhausted)
}

/// Reduces `(a, b, c)` while tracking the substitution; returns the point
/// where the original form takes the value 1, if it is principal.
fn reduce_tracking(mut a: BigInt, mut b: BigInt, mut c: BigInt) -> Option<(BigInt, BigInt)> {
    // columns (m11, m21), (m12, m22) of the substitution matrix
    let (mut m11, mut m12, mut m21, mut m22) = (BigInt::one(), BigInt::zero(), BigInt::zero(), BigInt::one());
    loop {
        let two_a = 2 * &a;
        let k = (&a - &b).div_floor(&two_a);
        c += &k * (&a * &k + &b);
        b += &two_a * &k;
        m12 += &k * &m11;
        m22 += &k * &m21;
        if a > c {
            std::mem::swap(&mut a, &mut c);
            b = -b;
            // (x, y) = (−y', x')
            let (n11, n21) = (m12.clone(), m22.clone());
            m12 = -std::mem::replace(&mut m11, n11);
            m22 = -std::mem::replace(&mut m21, n21);
            continue;
        }
        break;
    }
    a.is_one().then_some((m11, m21))
}

fn normalize(alpha: &QuadInteger) -> Option<QuadInteger> {
    let mut best: Option<QuadInteger> = None;
    for u in QuadInteger::units(alpha.disc) {
        for cand in [alpha.mul(&u), alpha.conj().mul(&u)] {
            if cand.x.is_positive() && cand.y.is_positive() {
                let better = best.as_ref().is_none_or(|b| (&cand.y, &cand.x) < (&b.y, &b.x));
                if better {
                    best = Some(cand);
                }
            }
        }
    }
    best
}

/// Which square root of `D` in `Z_ℓ` the embedding uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Branch {
    /// The root making `σ(α)` a unit.
    Unit,
    /// The other root.
    Other,
}

/// A residue modulo `ℓ^N` as an ℓ-adic number known to absolute precision `N`.
fn embedded(ctx: &PadicContext, residue: &BigInt) -> PadicNumber {
    let x = PadicNumber::from_integer(ctx, residue);
    match x.valuation() {
        Valuation::Finite(v) if v > 0 => x.truncated(ctx.precision().saturating_sub(v as u32)),
        _ => x,
    }
}

/// `v_ℓ(log σ(α) − log σ(ᾱ))` for the embedding selected by `branch`.
pub fn log_quotient_valuation(
    alpha: &QuadInteger,
    ell: u64,
    ctx: &PadicContext,
    branch: Branch,
) -> Result<u32, QuadError> {
    assert_eq!(ctx.ell(), ell, "ℓ mismatch");
    let d = BigInt::from(alpha.disc);
    let v = padic::with_escalation(ctx, |c| {
        let r = padic::hensel_sqrt(c, &d)?;
        let modulus = c.modulus();
        let r = BigInt::from(r.residue(c.precision()));
        let m: BigInt = modulus.into();
        let inv2 = (&m + 1) / 2;
        let embed = |root: &BigInt| -> BigInt { Integer::mod_floor(&((&alpha.x + &alpha.y * root) * &inv2), &m) };
        let plus = embed(&r);
        let minus = embed(&(-&r));
        let ell_big = BigInt::from(ell);
        let plus_is_unit = !(&plus % &ell_big).is_zero();
        let (s_alpha, s_bar) = match (branch, plus_is_unit) {
            (Branch::Unit, true) | (Branch::Other, false) => (plus, minus),
            _ => (minus, plus),
        };
        if s_alpha.is_zero() || s_bar.is_zero() {
            return Err(PadicError::PrecisionExhausted { ell, precision: c.precision() });
        }
        let la = padic::iwasawa_log(c, &embedded(c, &s_alpha))?;
        let lb = padic::iwasawa_log(c, &embedded(c, &s_bar))?;
        let lambda = la.sub(&lb);
        match (lambda.valuation(), lambda.absolute_precision()) {
            (Valuation::Finite(v), Some(abs)) if v + (c.guard() as i64) < abs => Ok(v as u32),
            _ => Err(PadicError::PrecisionExhausted { ell, precision: c.precision() }),
        }
    })?;
    Ok(v)
}

/// Wild logarithmic datum of a split prime above ℓ.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WildDatum {
    pub disc: i64,
    pub ell: u64,
    /// Order `w` of `[l]`.
    pub order: u64,
    /// ℓ-part of `w`.
    pub h_prime: u64,
    pub alpha: QuadInteger,
    /// `v_ℓ(log σ(α) − log σ(ᾱ))`.
    pub lambda_val: u32,
    /// `lambda_val − 1`, dividing out `log(1 + ℓ)`.
    pub wtilde_val: u32,
}

pub fn wild_datum(disc: i64, ell: u64, ctx: &PadicContext) -> Result<WildDatum, QuadError> {
    let pc = prime_class_order(disc, ell)?;
    if pc.split != SplitType::Split {
        return Err(QuadError::NotSplit(pc.split));
    }
    let order = pc.order.expect("split");
    let alpha = generator_of_prime_power(disc, ell, order)?;
    let lambda_val = log_quotient_valuation(&alpha, ell, ctx, Branch::Unit)?;
    Ok(WildDatum {
        disc,
        ell,
        order,
        h_prime: pc.h_prime.expect("split"),
        alpha,
        lambda_val,
        wtilde_val: lambda_val - 1,
    })
}

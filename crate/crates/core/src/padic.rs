//! Truncated ℓ-adic arithmetic: numbers `ℓ^v · u` with `u` a unit known
//! modulo a power of ℓ, the Iwasawa logarithm, Hensel square roots and
//! Teichmüller representatives.
//!
//! Valuations are the quantities downstream code consumes, so a logarithm
//! whose valuation lands inside the guard band `[N - g, N)` is never
//! reported; callers with an exact source can escalate the precision
//! through [`iwasawa_log_escalating`].

use std::fmt;

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use thiserror::Error;

use crate::arith;

pub const DEFAULT_PRECISION: u32 = 60;
pub const DEFAULT_GUARD: u32 = 10;
/// Number of precision doublings attempted before giving up.
pub const MAX_ESCALATIONS: u32 = 4;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PadicError {
    #[error("invalid ℓ-adic context: {0}")]
    InvalidContext(String),
    #[error("logarithm of zero")]
    ZeroInput,
    #[error("precision exhausted: valuation indistinguishable from ∞ at {precision} digits of {ell}-adic precision")]
    PrecisionExhausted { ell: u64, precision: u32 },
    #[error("{0} is not a square modulo ℓ")]
    NotASquare(BigInt),
    #[error("{0} has odd ℓ-adic valuation")]
    EvenValuationViolation(BigInt),
    #[error("{0} is divisible by ℓ")]
    DivisibleByEll(BigInt),
}

/// The prime ℓ together with the working precision `N` and guard `g`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PadicContext {
    ell: u64,
    precision: u32,
    guard: u32,
}

impl PadicContext {
    pub fn new(ell: u64, precision: u32, guard: u32) -> Result<Self, PadicError> {
        if ell < 3 || !arith::is_prime(ell) {
            return Err(PadicError::InvalidContext(format!("ℓ = {ell} is not an odd prime")));
        }
        if guard == 0 || guard >= precision {
            return Err(PadicError::InvalidContext(format!(
                "guard {guard} must satisfy 0 < g < N = {precision}"
            )));
        }
        Ok(Self { ell, precision, guard })
    }

    /// `N = 60`, `g = 10`.
    pub fn with_defaults(ell: u64) -> Result<Self, PadicError> {
        Self::new(ell, DEFAULT_PRECISION, DEFAULT_GUARD)
    }

    pub fn ell(&self) -> u64 {
        self.ell
    }

    pub fn precision(&self) -> u32 {
        self.precision
    }

    pub fn guard(&self) -> u32 {
        self.guard
    }

    /// Same prime and guard, precision multiplied by `2^levels`.
    pub fn escalated(&self, levels: u32) -> Self {
        Self {
            ell: self.ell,
            precision: self.precision << levels,
            guard: self.guard,
        }
    }

    pub fn modulus(&self) -> BigUint {
        pow_ell(self.ell, self.precision)
    }
}

fn pow_ell(ell: u64, k: u32) -> BigUint {
    num_traits::pow(BigUint::from(ell), k as usize)
}

/// Exponent of ℓ in a nonzero big integer.
pub fn big_valuation(n: &BigUint, ell: u64) -> u32 {
    debug_assert!(!n.is_zero());
    let ell_big = BigUint::from(ell);
    let mut n = n.clone();
    let mut k = 0;
    loop {
        let (q, r) = n.div_rem(&ell_big);
        if !r.is_zero() {
            return k;
        }
        n = q;
        k += 1;
    }
}

fn reduce(n: &BigInt, modulus: &BigUint) -> BigUint {
    let m = BigInt::from_biguint(Sign::Plus, modulus.clone());
    n.mod_floor(&m).to_biguint().expect("mod_floor is nonnegative")
}

fn inverse(a: &BigUint, modulus: &BigUint) -> BigUint {
    let a = BigInt::from_biguint(Sign::Plus, a.clone());
    let m = BigInt::from_biguint(Sign::Plus, modulus.clone());
    let g = a.extended_gcd(&m);
    debug_assert!(g.gcd.is_one(), "inverse of a non-unit");
    g.x.mod_floor(&m).to_biguint().expect("nonnegative")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Valuation {
    Finite(i64),
    Infinite,
}

impl Valuation {
    pub fn finite(self) -> Option<i64> {
        match self {
            Valuation::Finite(v) => Some(v),
            Valuation::Infinite => None,
        }
    }
}

impl fmt::Display for Valuation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Valuation::Finite(v) => write!(f, "{v}"),
            Valuation::Infinite => write!(f, "∞"),
        }
    }
}

/// `ℓ^valuation · unit`, the unit known modulo `ℓ^precision`.
///
/// Zero carries [`Valuation::Infinite`] and no unit.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PadicNumber {
    ell: u64,
    valuation: Valuation,
    unit: Option<BigUint>,
    precision: u32,
}

impl PadicNumber {
    pub fn zero(ell: u64) -> Self {
        Self { ell, valuation: Valuation::Infinite, unit: None, precision: 0 }
    }

    /// Builds `ℓ^valuation · unit`; `unit` is reduced modulo `ℓ^precision`
    /// and must not be divisible by ℓ.
    pub fn from_parts(ell: u64, valuation: i64, unit: BigUint, precision: u32) -> Self {
        let unit = unit % pow_ell(ell, precision);
        debug_assert!(!(&unit % ell).is_zero(), "unit part divisible by ℓ");
        Self { ell, valuation: Valuation::Finite(valuation), unit: Some(unit), precision }
    }

    /// Embeds an exact integer with `ctx.precision()` digits of relative precision.
    pub fn from_integer(ctx: &PadicContext, n: &BigInt) -> Self {
        if n.is_zero() {
            return Self::zero(ctx.ell);
        }
        let v = big_valuation(n.magnitude(), ctx.ell);
        let stripped = n / BigInt::from_biguint(Sign::Plus, pow_ell(ctx.ell, v));
        let unit = reduce(&stripped, &ctx.modulus());
        Self::from_parts(ctx.ell, v as i64, unit, ctx.precision)
    }

    pub fn ell(&self) -> u64 {
        self.ell
    }

    pub fn valuation(&self) -> Valuation {
        self.valuation
    }

    /// Canonical least nonnegative residue of the unit part.
    pub fn unit(&self) -> Option<&BigUint> {
        self.unit.as_ref()
    }

    /// Digits of relative precision carried by the unit part.
    pub fn precision(&self) -> u32 {
        self.precision
    }

    pub fn is_zero(&self) -> bool {
        self.valuation == Valuation::Infinite
    }

    /// Absolute precision: the value is known modulo `ℓ^absolute_precision`.
    pub fn absolute_precision(&self) -> Option<i64> {
        self.valuation.finite().map(|v| v + self.precision as i64)
    }

    /// Value modulo `ℓ^k` for an integral number (`valuation ≥ 0`); zero
    /// reduces to 0. Panics if `k` exceeds the known absolute precision.
    pub fn residue(&self, k: u32) -> BigUint {
        let m = pow_ell(self.ell, k);
        match (self.valuation, &self.unit) {
            (Valuation::Infinite, _) => BigUint::zero(),
            (Valuation::Finite(v), Some(u)) => {
                assert!(v >= 0, "residue of a non-integral ℓ-adic number");
                assert!(
                    k as i64 <= v + self.precision as i64,
                    "residue requested beyond known precision"
                );
                if v >= k as i64 {
                    return BigUint::zero();
                }
                (pow_ell(self.ell, v as u32) * u) % m
            }
            _ => unreachable!("finite valuation always carries a unit"),
        }
    }

    /// The same number with relative precision lowered to `precision`.
    pub fn truncated(&self, precision: u32) -> Self {
        match (&self.valuation, &self.unit) {
            (Valuation::Finite(v), Some(u)) if precision > 0 && precision < self.precision => {
                Self::from_parts(self.ell, *v, u.clone(), precision)
            }
            _ => self.clone(),
        }
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.ell, other.ell);
        match (self.valuation, other.valuation, &self.unit, &other.unit) {
            (Valuation::Finite(a), Valuation::Finite(b), Some(u), Some(w)) => {
                let prec = self.precision.min(other.precision);
                Self::from_parts(self.ell, a + b, u * w, prec)
            }
            _ => Self::zero(self.ell),
        }
    }

    pub fn neg(&self) -> Self {
        match &self.unit {
            None => self.clone(),
            Some(u) => {
                let m = pow_ell(self.ell, self.precision);
                let neg = (&m - u % &m) % &m;
                Self { unit: Some(neg), ..self.clone() }
            }
        }
    }

    /// Difference of two integral numbers, computed modulo the smaller
    /// absolute precision. A result congruent to zero at that precision is
    /// returned as zero.
    pub fn sub(&self, other: &Self) -> Self {
        assert_eq!(self.ell, other.ell);
        let abs = match (self.absolute_precision(), other.absolute_precision()) {
            (Some(a), Some(b)) => a.min(b),
            (Some(a), None) => a,
            (None, Some(b)) => b,
            (None, None) => return Self::zero(self.ell),
        };
        assert!(abs >= 0);
        let abs = abs as u32;
        let m = pow_ell(self.ell, abs);
        let diff = (self.residue(abs) + &m - other.residue(abs)) % &m;
        if diff.is_zero() {
            return Self::zero(self.ell);
        }
        let v = big_valuation(&diff, self.ell);
        let unit = diff / pow_ell(self.ell, v);
        Self::from_parts(self.ell, v as i64, unit, abs - v)
    }
}

impl fmt::Display for PadicNumber {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (&self.valuation, &self.unit) {
            (Valuation::Finite(v), Some(u)) => {
                write!(f, "{}^{} · {} + O({}^{})", self.ell, v, u, self.ell, v + self.precision as i64)
            }
            _ => write!(f, "0"),
        }
    }
}

/// Truncated Iwasawa logarithm of a unit residue known modulo `ℓ^m`.
/// Returns `None` when the result vanishes modulo `ℓ^m`, otherwise the exact
/// valuation and the unit part modulo `ℓ^(m - v)`.
fn log_unit_truncated(ell: u64, unit: &BigUint, m: u32) -> Option<(u32, BigUint)> {
    let modulus = pow_ell(ell, m);
    let w = (unit.modpow(&BigUint::from(ell - 1), &modulus) + &modulus - 1u32) % &modulus;
    if w.is_zero() {
        return None;
    }
    let vw = big_valuation(&w, ell);
    let w_unit = &w / pow_ell(ell, vw);

    // log(1 + w) = Σ (-1)^(k+1) w^k / k; the term valuation k·v(w) - v(k)
    // is nondecreasing in k, so the first term reaching m ends the sum.
    let mut sum = BigInt::zero();
    let mut k: u64 = 1;
    let mut w_pow = BigUint::one();
    loop {
        let vk = arith::valuation(k, ell);
        let term_val = k as i64 * vw as i64 - vk as i64;
        if term_val >= m as i64 {
            break;
        }
        w_pow = (&w_pow * &w_unit) % &modulus;
        let k_unit = BigUint::from(k / ell.pow(vk));
        let term = pow_ell(ell, term_val as u32) * &w_pow * inverse(&(k_unit % &modulus), &modulus);
        let term = BigInt::from_biguint(Sign::Plus, term % &modulus);
        if k % 2 == 1 {
            sum += term;
        } else {
            sum -= term;
        }
        k += 1;
    }
    let sum = reduce(&sum, &modulus);
    // log(u) = log(u^(ℓ-1)) / (ℓ-1)
    let scaled = (sum * inverse(&BigUint::from(ell - 1), &modulus)) % &modulus;
    debug_assert!(!scaled.is_zero());
    let v = big_valuation(&scaled, ell);
    debug_assert_eq!(v, vw, "v(log(1+w)) = v(w) for v(w) ≥ 1");
    let unit_part = (&scaled / pow_ell(ell, v)) % pow_ell(ell, m - v);
    Some((v, unit_part))
}

/// Iwasawa logarithm (`log ℓ = 0`) at the precision of `ctx`.
///
/// The result is correct modulo `ℓ^M`, `M = min(N, precision of x)`. A unit
/// that is a root of unity to all `M` digits (`u^(ℓ-1) ≡ 1`) is reported as
/// exact zero; any other result whose valuation reaches `M - g` raises
/// [`PadicError::PrecisionExhausted`].
pub fn iwasawa_log(ctx: &PadicContext, x: &PadicNumber) -> Result<PadicNumber, PadicError> {
    assert_eq!(ctx.ell, x.ell, "ℓ mismatch");
    let unit = x.unit.as_ref().ok_or(PadicError::ZeroInput)?;
    let m = ctx.precision.min(x.precision);
    if m <= ctx.guard {
        return Err(PadicError::PrecisionExhausted { ell: ctx.ell, precision: m });
    }
    match log_unit_truncated(ctx.ell, unit, m) {
        None => Ok(PadicNumber::zero(ctx.ell)),
        Some((v, _)) if v >= m - ctx.guard => {
            Err(PadicError::PrecisionExhausted { ell: ctx.ell, precision: m })
        }
        Some((v, u)) => Ok(PadicNumber::from_parts(ctx.ell, v as i64, u, m - v)),
    }
}

/// An exact quantity that can be embedded in `Z_ℓ` at any requested precision.
pub trait PadicSource {
    fn embed(&self, ctx: &PadicContext) -> Result<PadicNumber, PadicError>;

    /// Whether the quantity is known to be a root of unity times a power of ℓ.
    fn is_torsion(&self) -> bool {
        false
    }
}

/// An exact integer paired with the prime it is viewed at, so that torsion
/// (±ℓ^k, the only rationals with vanishing logarithm) is recognised exactly.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExactInteger {
    pub value: BigInt,
    pub ell: u64,
}

impl PadicSource for ExactInteger {
    fn embed(&self, ctx: &PadicContext) -> Result<PadicNumber, PadicError> {
        Ok(PadicNumber::from_integer(ctx, &self.value))
    }

    fn is_torsion(&self) -> bool {
        if self.value.is_zero() {
            return false;
        }
        let mut n = self.value.magnitude().clone();
        let ell = BigUint::from(self.ell);
        while (&n % &ell).is_zero() {
            n /= &ell;
        }
        n.is_one()
    }
}

/// Runs `f` at the precision of `ctx`, doubling it (at most
/// [`MAX_ESCALATIONS`] times) while `f` reports exhausted precision.
pub fn with_escalation<T>(
    ctx: &PadicContext,
    mut f: impl FnMut(&PadicContext) -> Result<T, PadicError>,
) -> Result<T, PadicError> {
    let mut last = ctx.precision;
    for level in 0..=MAX_ESCALATIONS {
        let c = ctx.escalated(level);
        last = c.precision;
        match f(&c) {
            Err(PadicError::PrecisionExhausted { .. }) => continue,
            other => return other,
        }
    }
    Err(PadicError::PrecisionExhausted { ell: ctx.ell, precision: last })
}

/// Iwasawa logarithm of an exact source, doubling the precision (at most
/// [`MAX_ESCALATIONS`] times) while the valuation stays indistinguishable
/// from the guard band.
pub fn iwasawa_log_escalating(
    ctx: &PadicContext,
    source: &dyn PadicSource,
) -> Result<PadicNumber, PadicError> {
    if source.is_torsion() {
        return Ok(PadicNumber::zero(ctx.ell));
    }
    with_escalation(ctx, |c| {
        let r = iwasawa_log(c, &source.embed(c)?)?;
        if r.is_zero() {
            return Err(PadicError::PrecisionExhausted { ell: c.ell, precision: c.precision });
        }
        Ok(r)
    })
}

/// Square root `r` with `r² ≡ a (mod ℓ^N)`; the branch returned is the one
/// whose least residue modulo ℓ is the smaller of the two.
pub fn hensel_sqrt(ctx: &PadicContext, a: &BigInt) -> Result<PadicNumber, PadicError> {
    let ell = ctx.ell;
    if a.is_zero() {
        return Ok(PadicNumber::zero(ell));
    }
    let v = big_valuation(a.magnitude(), ell);
    if v % 2 == 1 {
        return Err(PadicError::EvenValuationViolation(a.clone()));
    }
    let stripped = a / BigInt::from_biguint(Sign::Plus, pow_ell(ell, v));
    let a_mod_ell = reduce(&stripped, &BigUint::from(ell)).to_u64().expect("small");
    let r0 = arith::sqrt_mod_prime(a_mod_ell, ell).ok_or_else(|| PadicError::NotASquare(a.clone()))?;
    let r0 = r0.min(ell - r0);

    let target = ctx.precision;
    let mut r = BigUint::from(r0);
    let mut prec = 1u32;
    while prec < target {
        prec = (2 * prec).min(target);
        let m = pow_ell(ell, prec);
        let a_m = reduce(&stripped, &m);
        // r ← r - (r² - a) / (2r)
        let f = (&r * &r + &m - &a_m) % &m;
        let df_inv = inverse(&((BigUint::from(2u32) * &r) % &m), &m);
        r = (&r + &m - (f * df_inv) % &m) % &m;
    }
    Ok(PadicNumber::from_parts(ell, (v / 2) as i64, r, target))
}

/// Teichmüller representative ω(a): the (ℓ-1)-th root of unity ≡ a mod ℓ.
pub fn teichmuller(ctx: &PadicContext, a: &BigInt) -> Result<PadicNumber, PadicError> {
    let ell = ctx.ell;
    let m = ctx.modulus();
    let mut x = reduce(a, &m);
    if (&x % ell).is_zero() {
        return Err(PadicError::DivisibleByEll(a.clone()));
    }
    let e = BigUint::from(ell);
    loop {
        let y = x.modpow(&e, &m);
        if y == x {
            break;
        }
        x = y;
    }
    Ok(PadicNumber::from_parts(ell, 0, x, ctx.precision))
}

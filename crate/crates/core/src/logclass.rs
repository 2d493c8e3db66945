//! φ-components of logarithmic class groups: the order `h̃_φ` from ordinary
//! class data and the wild datum, the minimality criterion for `λ_φ`, and
//! predicted orders along the cyclotomic tower.
//!
//! Orders are carried as ℓ-adic valuations throughout.

use num_bigint::BigInt;
use serde::Serialize;
use thiserror::Error;

use crate::arith;
use crate::padic::{self, ExactInteger, PadicContext, PadicError};
use crate::quadclass::{self, QuadError, SplitType};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LogError {
    #[error("inconsistent class data: h_val {h_val} + wtilde_val {wtilde_val} < w_val {w_val}")]
    NegativeResult { h_val: u32, w_val: u32, wtilde_val: u32 },
    #[error("criterion not applicable: {0}")]
    NotApplicable(String),
    #[error("criterion not satisfied; no order prediction is available")]
    CriterionNotSatisfied,
    #[error(transparent)]
    Quad(#[from] QuadError),
    #[error(transparent)]
    Padic(#[from] PadicError),
}

/// Inputs to `h̃_φ`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ClassData {
    /// φ divides `χ_ℓ`: ordinary order, order of the prime class and wild datum.
    Wild { h_val: u32, w_val: u32, wtilde_val: u32 },
    /// φ does not divide `χ_ℓ`: only the ordinary order.
    Tame { h_val: u32 },
}

/// `v_ℓ(h̃_φ)`.
pub fn htilde(data: ClassData) -> Result<u32, LogError> {
    match data {
        ClassData::Tame { h_val } => Ok(h_val),
        ClassData::Wild { h_val, w_val, wtilde_val } => (h_val + wtilde_val)
            .checked_sub(w_val)
            .ok_or(LogError::NegativeResult { h_val, w_val, wtilde_val }),
    }
}

/// `v_ℓ(log N(η)) − 1` for an externally supplied embedded norm.
pub fn wtilde_from_norm(ctx: &PadicContext, norm: &BigInt) -> Result<u32, LogError> {
    let source = ExactInteger { value: norm.clone(), ell: ctx.ell() };
    let log = padic::iwasawa_log_escalating(ctx, &source)?;
    let v = log.valuation().finite().expect("nonzero logarithm");
    Ok((v as u32).saturating_sub(1))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GoldVerdict {
    pub gold: bool,
    pub explanation: String,
}

/// λ_φ = 1 exactly when the logarithmic φ-class group is trivial.
pub fn gold_criterion(imaginary: bool, divides_chi_ell: bool, htilde_val: u32) -> Result<GoldVerdict, LogError> {
    if !imaginary {
        return Err(LogError::NotApplicable("φ is real".into()));
    }
    if !divides_chi_ell {
        return Err(LogError::NotApplicable("φ does not divide χ_ℓ (ℓ is not split)".into()));
    }
    Ok(if htilde_val == 0 {
        GoldVerdict {
            gold: true,
            explanation: "logarithmic φ-class group trivial: λ_φ = 1 and λ̃_φ = 0".into(),
        }
    } else {
        GoldVerdict {
            gold: false,
            explanation: format!("logarithmic φ-class group of order ℓ^{htilde_val}: λ_φ > 1"),
        }
    })
}

/// Report for the imaginary character of an imaginary quadratic field.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PhiReport {
    pub disc: i64,
    pub ell: u64,
    pub split: SplitType,
    pub h_val: u32,
    pub w_val: Option<u32>,
    pub wtilde_val: Option<u32>,
    pub htilde_val: u32,
    pub gold: Option<bool>,
    pub nu: Option<u32>,
    #[serde(skip)]
    pub lambda_lower_bound: u32,
    #[serde(skip)]
    pub explanation: String,
}

impl PhiReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("plain data serializes")
    }
}

pub fn quad_report(disc: i64, ell: u64, ctx: &PadicContext) -> Result<PhiReport, LogError> {
    let group = quadclass::class_group(disc)?;
    let h_val = arith::valuation(group.order(), ell);
    let pc = quadclass::prime_class_order(disc, ell)?;
    if pc.split != SplitType::Split {
        let htilde_val = htilde(ClassData::Tame { h_val })?;
        let explanation = match gold_criterion(true, false, htilde_val) {
            Err(e) => e.to_string(),
            Ok(v) => v.explanation,
        };
        return Ok(PhiReport {
            disc,
            ell,
            split: pc.split,
            h_val,
            w_val: None,
            wtilde_val: None,
            htilde_val,
            gold: None,
            nu: None,
            lambda_lower_bound: 0,
            explanation,
        });
    }
    let wd = quadclass::wild_datum(disc, ell, ctx)?;
    let w_val = arith::valuation(wd.order, ell);
    let htilde_val = htilde(ClassData::Wild { h_val, w_val, wtilde_val: wd.wtilde_val })?;
    let verdict = gold_criterion(true, true, htilde_val)?;
    Ok(PhiReport {
        disc,
        ell,
        split: SplitType::Split,
        h_val,
        w_val: Some(w_val),
        wtilde_val: Some(wd.wtilde_val),
        htilde_val,
        gold: Some(verdict.gold),
        nu: Some(w_val),
        lambda_lower_bound: 1,
        explanation: verdict.explanation,
    })
}

/// A predicted (not verified) order along the tower.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Prediction {
    pub level: u32,
    /// Predicted `v_ℓ` of the φ-part of the class group of `K_n`, per degree of φ.
    pub order_val: u32,
}

pub fn tower_order_prediction(report: &PhiReport, n: u32) -> Result<Prediction, LogError> {
    match (report.gold, report.nu) {
        (Some(true), Some(nu)) => Ok(Prediction { level: n, order_val: n + nu }),
        _ => Err(LogError::CriterionNotSatisfied),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn htilde_examples() {
        assert_eq!(htilde(ClassData::Wild { h_val: 1, w_val: 1, wtilde_val: 0 }), Ok(0));
        assert_eq!(htilde(ClassData::Wild { h_val: 0, w_val: 0, wtilde_val: 2 }), Ok(2));
        assert_eq!(htilde(ClassData::Tame { h_val: 3 }), Ok(3));
        assert!(matches!(
            htilde(ClassData::Wild { h_val: 0, w_val: 1, wtilde_val: 0 }),
            Err(LogError::NegativeResult { .. })
        ));
    }

    #[test]
    fn gold_examples() {
        let r = quad_report(-4, 5, &PadicContext::with_defaults(5).unwrap()).unwrap();
        assert_eq!(r.gold, Some(true));
        let r = quad_report(-23, 3, &PadicContext::with_defaults(3).unwrap()).unwrap();
        assert_eq!((r.gold, r.htilde_val, r.nu), (Some(true), 0, Some(1)));
        let v = gold_criterion(true, true, 2).unwrap();
        assert!(!v.gold && v.explanation.contains("λ_φ > 1"));
        assert!(matches!(gold_criterion(false, true, 0), Err(LogError::NotApplicable(_))));
        assert!(matches!(gold_criterion(true, false, 0), Err(LogError::NotApplicable(_))));
    }

    #[test]
    fn inert_report_copies_class_data() {
        let r = quad_report(-23, 5, &PadicContext::with_defaults(5).unwrap()).unwrap();
        assert_eq!(r.split, SplitType::Inert);
        assert_eq!((r.h_val, r.htilde_val, r.gold), (0, 0, None));
        let r = quad_report(-47, 5, &PadicContext::with_defaults(5).unwrap()).unwrap();
        assert_eq!(r.split, SplitType::Inert);
        assert_eq!((r.h_val, r.htilde_val), (1, 1));
    }

    #[test]
    fn report_json_keys() {
        let r = quad_report(-23, 3, &PadicContext::with_defaults(3).unwrap()).unwrap();
        assert_eq!(
            r.to_json(),
            r#"{"disc":-23,"ell":3,"split":"split","h_val":1,"w_val":1,"wtilde_val":0,"htilde_val":0,"gold":true,"nu":1}"#
        );
    }

    #[test]
    fn predictions() {
        let r = quad_report(-23, 3, &PadicContext::with_defaults(3).unwrap()).unwrap();
        assert_eq!(tower_order_prediction(&r, 0).unwrap().order_val, 1);
        let r = quad_report(-4, 5, &PadicContext::with_defaults(5).unwrap()).unwrap();
        assert_eq!(tower_order_prediction(&r, 3).unwrap().order_val, 3);
        assert_eq!(tower_order_prediction(&r, 0).unwrap().order_val, 0);
        let r = quad_report(-47, 3, &PadicContext::with_defaults(3).unwrap()).unwrap();
        assert_eq!(r.gold, Some(false));
        assert_eq!(tower_order_prediction(&r, 0), Err(LogError::CriterionNotSatisfied));
    }

    #[test]
    fn external_norm() {
        // v₅(7⁴ − 1) = 2 and v₅(2⁴ − 1) = 1
        let ctx = PadicContext::with_defaults(5).unwrap();
        assert_eq!(wtilde_from_norm(&ctx, &BigInt::from(7)).unwrap(), 1);
        assert_eq!(wtilde_from_norm(&ctx, &BigInt::from(2)).unwrap(), 0);
    }

    proptest! {
        #[test]
        fn valuation_identity(h in 0u32..10, w in 0u32..10, wt in 0u32..10) {
            let data = ClassData::Wild { h_val: h, w_val: w, wtilde_val: wt };
            match htilde(data) {
                Ok(ht) => prop_assert_eq!(ht + w, h + wt),
                Err(_) => prop_assert!(h + wt < w),
            }
        }
    }

    #[test]
    fn predictions_are_monotone() {
        let ctx = PadicContext::with_defaults(3).unwrap();
        for d in (-600i64..0).filter(|&d| arith::is_fundamental(d)) {
            if quadclass::split_type(d, 3) != SplitType::Split {
                continue;
            }
            let r = quad_report(d, 3, &ctx).unwrap();
            if r.gold != Some(true) {
                continue;
            }
            for n in 0..6 {
                let a = tower_order_prediction(&r, n).unwrap().order_val;
                assert_eq!(tower_order_prediction(&r, n + 1).unwrap().order_val, a + 1);
            }
        }
    }
}

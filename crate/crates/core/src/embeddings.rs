//! Continuity, equality, comparison with `ℓ_r` and strict singularity of
//! `id : m_{φ₁,p₁} ↪ m_{φ₂,p₂}`.
//!
//! With `ρ = min(1, p₁/p₂)` and both weights unbounded, the embedding is
//! continuous iff `S = sup_j φ₂(2^j)/φ₁(2^j)^ρ < ∞`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::{eq_tol, le_tol, lt_strict, Real};
use crate::weights::Weight;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ContinuityRegime {
    /// `sup φ₂ < ∞`: the target is `ℓ_∞`.
    TargetBounded,
    /// `sup φ₁ < ∞ = sup φ₂`: the source is `ℓ_∞`, the target is not.
    SourceBoundedTargetUnbounded,
    BothUnbounded,
}

#[derive(Clone, Debug, PartialEq)]
pub struct EmbeddingVerdict<S> {
    pub continuous: bool,
    pub rho: S,
    pub criterion_sup: S,
    /// `c` with `‖λ‖₂ ≤ c ‖λ‖₁` for every `λ`, when continuous.
    pub constant_bound: Option<S>,
    /// Always false: unit vectors stay 1 apart in every target norm.
    pub compact: bool,
    pub regime: ContinuityRegime,
    pub notes: Vec<String>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LrDirection {
    /// `m_{φ,p} ↪ ℓ_r`.
    MpsIntoLr,
    /// `ℓ_r ↪ m_{φ,p}`.
    LrIntoMps,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum SingularityKind {
    StrictlySingular,
    NotStrictlySingular,
    Undetermined,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SingularityVerdict {
    pub kind: SingularityKind,
    /// Stable machine-readable reason code.
    pub reason: String,
}

impl SingularityVerdict {
    fn new(kind: SingularityKind, reason: &str) -> Self {
        SingularityVerdict {
            kind,
            reason: reason.to_string(),
        }
    }
}

pub fn rho<S: Real>(p1: S, p2: S) -> S {
    S::one().min(p1 / p2)
}

/// `sup_j φ₂(2^j)/φ₁(2^j)^ρ`: head levels up to `max(K₁, K₂)`, after which
/// the ratio is geometric with ratio `2^{e₂ − ρe₁}`.
pub fn criterion_sup<S: Real>(w1: &Weight<S>, p1: S, w2: &Weight<S>, p2: S) -> S {
    let r = rho(p1, p2);
    if lt_strict(r * w1.tail_exponent(), w2.tail_exponent()) {
        return S::infinity();
    }
    let top = w1.last_level().max(w2.last_level());
    (0..=top)
        .map(|k| w2.eval(k) / w1.eval(k).powf(r))
        .fold(S::zero(), S::max)
}

fn check_pair<S: Real>(w1: &Weight<S>, p1: S, w2: &Weight<S>, p2: S) -> Result<()> {
    w1.require_normalized_gp(p1)?;
    w2.require_normalized_gp(p2)?;
    if w1.dim() != w2.dim() {
        return Err(Error::DimensionMismatch {
            expected: w1.dim(),
            got: w2.dim(),
        });
    }
    Ok(())
}

/// Continuity verdict with an explicit embedding constant.
///
/// The constants: if `sup φ₂ < ∞` then `‖λ‖₂ ≤ sup φ₂ · ‖λ‖_∞ ≤ sup φ₂ · ‖λ‖₁`.
/// If both weights are unbounded, `c = S` in both cases `ρ = 1` (Hölder on
/// each cube) and `ρ < 1` (a unit vector of the source has entries at most
/// 1, so `Σ_Q |λ|^{p₂} ≤ Σ_Q |λ|^{p₁} ≤ 2^{jd} φ₁(2^j)^{−p₁}`).
pub fn is_continuous<S: Real>(w1: &Weight<S>, p1: S, w2: &Weight<S>, p2: S) -> Result<EmbeddingVerdict<S>> {
    check_pair(w1, p1, w2, p2)?;
    let r = rho(p1, p2);
    let s = criterion_sup(w1, p1, w2, p2);
    let sup1 = w1.limits(p1).sup;
    let sup2 = w2.limits(p2).sup;
    let mut notes = Vec::new();
    let (regime, continuous, bound) = if sup2.is_finite() {
        notes.push("target space is l_inf; bound is sup phi_2".to_string());
        (ContinuityRegime::TargetBounded, true, Some(sup2))
    } else if sup1.is_finite() {
        notes.push("source space is l_inf but target is not".to_string());
        (ContinuityRegime::SourceBoundedTargetUnbounded, false, None)
    } else {
        let ok = s.is_finite();
        if !ok {
            notes.push("phi_2 / phi_1^rho grows geometrically".to_string());
        }
        (ContinuityRegime::BothUnbounded, ok, ok.then_some(s))
    };
    Ok(EmbeddingVerdict {
        continuous,
        rho: r,
        criterion_sup: s,
        constant_bound: bound,
        compact: false,
        regime,
        notes,
    })
}

/// Whether `m_{φ₁,p₁} = m_{φ₂,p₂}` as sets (with equivalent quasi-norms).
pub fn spaces_equal<S: Real>(w1: &Weight<S>, p1: S, w2: &Weight<S>, p2: S) -> Result<bool> {
    check_pair(w1, p1, w2, p2)?;
    let unbounded1 = w1.limits(p1).sup.is_infinite();
    let unbounded2 = w2.limits(p2).sup.is_infinite();
    if unbounded1 && unbounded2 {
        let one = S::one();
        return Ok(eq_tol(p1, p2)
            && criterion_sup(w1, one, w2, one).is_finite()
            && criterion_sup(w2, one, w1, one).is_finite());
    }
    Ok(is_continuous(w1, p1, w2, p2)?.continuous && is_continuous(w2, p2, w1, p1)?.continuous)
}

/// Comparison of `m_{φ,p}` with `ℓ_r`, `0 < r ≤ ∞`.
///
/// `m_{φ,p} ↪ ℓ_r` iff `p ≤ r` and `φ(2^j) ∼ 2^{jd/p}`; `ℓ_r ↪ m_{φ,p}` iff
/// `r ≤ p` or `2^{−jd/r} φ(2^j)` is bounded. A bounded weight gives `ℓ_∞`.
pub fn compare_with_lr<S: Real>(w: &Weight<S>, p: S, r: S, direction: LrDirection) -> Result<bool> {
    w.require_normalized_gp(p)?;
    if !(r > S::zero()) {
        return Err(Error::InvalidParameter(format!("r must be positive, got {r}")));
    }
    let lim = w.limits(p);
    let d = S::of_u64(w.dim() as u64);
    if lim.sup.is_finite() {
        return Ok(match direction {
            LrDirection::MpsIntoLr => r.is_infinite(),
            LrDirection::LrIntoMps => true,
        });
    }
    Ok(match direction {
        LrDirection::MpsIntoLr => le_tol(p, r) && lim.limit > S::zero(),
        LrDirection::LrIntoMps => {
            if le_tol(r, p) {
                true
            } else if r.is_infinite() {
                false
            } else {
                le_tol(w.tail_exponent(), d / r)
            }
        }
    })
}

/// Strict-singularity verdict for a continuous embedding between unbounded
/// weights. With `L_i = lim 2^{−νd/p_i} φ_i(2^ν)`:
///
/// * `L₂ = 0`: strictly singular iff `L₁ > 0` (the source is `ℓ_{p₁}`);
///   the case `p₁ = p₂ = r_{φ₂} < 1` is left undetermined. With `L₁ = 0`
///   the source contains an isometric copy of `ℓ_∞` that survives.
/// * `L₂ > 0` (target `ℓ_{p₂}`): strictly singular iff `L₁ > 0` and `p₁ < p₂`.
pub fn is_strictly_singular<S: Real>(w1: &Weight<S>, p1: S, w2: &Weight<S>, p2: S) -> Result<SingularityVerdict> {
    let v = is_continuous(w1, p1, w2, p2)?;
    for (w, p) in [(w1, p1), (w2, p2)] {
        let sup = w.limits(p).sup;
        if sup.is_finite() {
            return Err(Error::BoundedWeight { sup: sup.as_f64() });
        }
    }
    if !v.continuous {
        return Err(Error::NotContinuous {
            criterion_sup: v.criterion_sup.as_f64(),
        });
    }
    let l1 = w1.limits(p1).limit;
    let l2 = w2.limits(p2).limit;
    use SingularityKind::*;
    Ok(if l2.is_zero() {
        if l1 > S::zero() {
            let r2 = w2.r_phi()?;
            if eq_tol(p1, p2) && eq_tol(p2, r2) && p1 < S::one() {
                SingularityVerdict::new(Undetermined, "open-quasi-banach-critical-exponent")
            } else {
                SingularityVerdict::new(StrictlySingular, "source-lp-target-limit-zero")
            }
        } else {
            SingularityVerdict::new(NotStrictlySingular, "source-contains-isometric-linf")
        }
    } else if l1 > S::zero() && lt_strict(p1, p2) {
        SingularityVerdict::new(StrictlySingular, "lp-into-lq-p-less-than-q")
    } else if l1 > S::zero() {
        SingularityVerdict::new(NotStrictlySingular, "lp-into-lp-identity")
    } else {
        SingularityVerdict::new(NotStrictlySingular, "target-lp-source-not-lp")
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pw(u: f64) -> Weight<f64> {
        Weight::power(1, u).unwrap()
    }

    #[test]
    fn criterion_examples() {
        assert_eq!(criterion_sup(&pw(2.0), 1.0, &pw(2.0), 1.0), 1.0);
        assert_eq!(criterion_sup(&pw(2.0), 1.0, &pw(4.0), 1.0), 1.0);
        assert!(criterion_sup(&pw(4.0), 1.0, &pw(2.0), 1.0).is_infinite());
        // u₁/u₂ ≤ min(1, p₁/p₂) decides finiteness.
        for &(u1, p1, u2, p2) in &[(1.0, 1.0, 2.0, 2.0), (2.0, 1.0, 2.0, 2.0), (1.0, 0.5, 2.0, 1.0)] {
            let finite = u1 / u2 <= f64::min(1.0, p1 / p2) + 1e-12;
            assert_eq!(criterion_sup(&pw(u1), p1, &pw(u2), p2).is_finite(), finite);
        }
    }

    #[test]
    fn continuity_examples() {
        let v = is_continuous(&pw(2.0), 1.0, &pw(2.0), 1.0).unwrap();
        assert!(v.continuous && v.criterion_sup == 1.0 && !v.compact);
        let v = is_continuous(&pw(2.0), 1.0, &pw(4.0), 1.0).unwrap();
        assert!(v.continuous);
        assert_eq!(v.constant_bound, Some(1.0));
        let v = is_continuous(&Weight::constant(1), 1.0, &pw(2.0), 1.0).unwrap();
        assert!(!v.continuous);
        assert_eq!(v.regime, ContinuityRegime::SourceBoundedTargetUnbounded);
        let v = is_continuous(&pw(2.0), 1.0, &Weight::constant(1), 1.0).unwrap();
        assert!(v.continuous);
        assert_eq!(v.regime, ContinuityRegime::TargetBounded);
    }

    #[test]
    fn equality_examples() {
        assert!(spaces_equal(&pw(2.0), 1.0, &pw(2.0), 1.0).unwrap());
        assert!(!spaces_equal(&pw(2.0), 1.0, &pw(2.0), 1.5).unwrap());
        let bumped = Weight::new(1, vec![1.0, 2.0, 2.0, 2.0f64.powf(2.0)], 0.5)
            .unwrap()
            .normalized()
            .unwrap();
        assert!(spaces_equal(&pw(2.0), 1.0, &bumped, 1.0).unwrap());
        assert!(spaces_equal(&Weight::constant(1), 1.0, &Weight::constant(1), 2.0).unwrap());
    }

    #[test]
    fn lr_examples() {
        let sqrt = pw(2.0);
        assert!(compare_with_lr(&sqrt, 1.0, 1.0, LrDirection::LrIntoMps).unwrap());
        assert!(compare_with_lr(&pw(1.0), 1.0, 3.0, LrDirection::MpsIntoLr).unwrap());
        assert!(!compare_with_lr(&sqrt, 1.0, 4.0, LrDirection::LrIntoMps).unwrap());
        assert!(compare_with_lr(&sqrt, 1.0, 2.0, LrDirection::LrIntoMps).unwrap());
        assert!(!compare_with_lr(&sqrt, 1.0, 2.0, LrDirection::MpsIntoLr).unwrap());
    }

    #[test]
    fn singularity_examples() {
        use SingularityKind::*;
        assert_eq!(
            is_strictly_singular(&pw(1.0), 1.0, &pw(2.0), 2.0).unwrap().kind,
            StrictlySingular
        );
        assert_eq!(
            is_strictly_singular(&pw(2.0), 1.0, &pw(2.0), 1.0).unwrap().kind,
            NotStrictlySingular
        );
        assert_eq!(
            is_strictly_singular(&pw(1.0), 1.0, &pw(2.0), 1.0).unwrap().kind,
            StrictlySingular
        );
        assert!(matches!(
            is_strictly_singular(&pw(4.0), 1.0, &pw(2.0), 1.0),
            Err(Error::NotContinuous { .. })
        ));
        assert!(matches!(
            is_strictly_singular(&pw(2.0), 1.0, &Weight::constant(1), 1.0),
            Err(Error::BoundedWeight { .. })
        ));
    }

    #[test]
    fn critical_quasi_banach_case_is_left_open() {
        // φ₂ with r_φ₂ = p = 1/2 but zero limit: steep head, flat tail.
        let w2 = Weight::new(1, vec![1.0, 4.0], 0.0).unwrap().normalized().unwrap();
        let w2 = Weight::new(1, [w2.head(), &[4.0 * 2f64.sqrt()]].concat(), 1.0)
            .unwrap()
            .normalized()
            .unwrap();
        assert!((w2.r_phi().unwrap() - 0.5).abs() < 1e-12);
        assert_eq!(w2.limits(0.5).limit, 0.0);
        let w1 = Weight::<f64>::power(1, 0.5).unwrap();
        let v = is_strictly_singular(&w1, 0.5, &w2, 0.5).unwrap();
        assert_eq!(v.kind, SingularityKind::Undetermined);
    }
}

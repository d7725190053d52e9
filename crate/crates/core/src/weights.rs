//! Discrete weights `φ: {2^k} → [0, ∞)` stored as a finite head plus a
//! geometric tail, and the weight-class algebra built on them.
//!
//! `φ(2^k) = v_k` for `k ≤ K` and `φ(2^k) = v_K · 2^{(k−K)e}` beyond. Every
//! supremum, infimum and limit over all `k ∈ ℕ₀` is therefore a finite head
//! computation plus a closed-form statement about a geometric sequence.
//!
//! Membership in `G_p` means `1 ≤ φ(2^k)/φ(2^j) ≤ 2^{(k−j)d/p}` for `j ≤ k`.
//! By telescoping it is enough to check consecutive ratios, which for the
//! tail reduces to `0 ≤ e ≤ d/p`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::{eq_tol, ge_tol, le_tol, lt_strict, Real};

/// Longest head `regularize` will build when the geometric tail needs many
/// steps to overtake the head maximum.
pub const MAX_REGULARIZED_HEAD: usize = 1 << 20;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "S: Real")]
struct RawWeight<S> {
    dim: u32,
    head: Vec<S>,
    #[serde(default)]
    tail_exponent: S,
    #[serde(default)]
    normalized: bool,
}

/// A discrete weight on the dyadic scales of `Z^d`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "S: Real", try_from = "RawWeight<S>", into = "RawWeight<S>")]
pub struct Weight<S: Real> {
    dim: u32,
    head: Vec<S>,
    tail_exponent: S,
    normalized: bool,
}

impl<S: Real> TryFrom<RawWeight<S>> for Weight<S> {
    type Error = Error;
    fn try_from(r: RawWeight<S>) -> Result<Self> {
        let w = Weight::new(r.dim, r.head, r.tail_exponent)?;
        if r.normalized {
            w.normalized()
        } else {
            Ok(w)
        }
    }
}

impl<S: Real> From<Weight<S>> for RawWeight<S> {
    fn from(w: Weight<S>) -> Self {
        RawWeight {
            dim: w.dim,
            head: w.head,
            tail_exponent: w.tail_exponent,
            normalized: w.normalized,
        }
    }
}

/// `lim_k 2^{−kd/p} φ(2^k)` and `sup_k φ(2^k)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Limits<S> {
    pub limit: S,
    pub sup: S,
}

/// Position of a Morrey space relative to `c₀`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum C0Relation {
    /// The space is `ℓ_p`, a proper subspace of `c₀`.
    SubsetEqualLp,
    /// The space is `ℓ_∞`, which contains `c₀`.
    EqualsLinf,
    /// Neither contains the other, and the same holds for `c`.
    Incomparable,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClassificationReport {
    pub nontrivial: bool,
    pub equals_linf: bool,
    pub equals_lp: bool,
    pub separable: bool,
    pub comparable_with_c0: C0Relation,
    pub limit_at_infinity: f64,
    pub sup_phi: f64,
}

impl<S: Real> Weight<S> {
    /// Validated weight. Values must be finite and non-negative with at
    /// least one positive head value; the tail exponent must be finite and
    /// non-negative.
    pub fn new(dim: u32, head: Vec<S>, tail_exponent: S) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidWeight("dimension must be at least 1".into()));
        }
        if head.is_empty() {
            return Err(Error::InvalidWeight("head must not be empty".into()));
        }
        if let Some(v) = head.iter().find(|v| !v.is_finite() || **v < S::zero()) {
            return Err(Error::InvalidWeight(format!(
                "head values must be finite and non-negative, got {v}"
            )));
        }
        if !tail_exponent.is_finite() || tail_exponent < S::zero() {
            return Err(Error::InvalidWeight(format!(
                "tail exponent must be finite and non-negative, got {tail_exponent}"
            )));
        }
        if head.iter().all(|v| v.is_zero()) {
            return Err(Error::InvalidWeight("weight vanishes identically".into()));
        }
        Ok(Weight {
            dim,
            head,
            tail_exponent,
            normalized: false,
        })
    }

    /// Same weight with the normalized flag set, checking `φ(1) = 1`.
    pub fn normalized(mut self) -> Result<Self> {
        if !eq_tol(self.head[0], S::one()) {
            return Err(Error::NotNormalized {
                value: self.head[0].as_f64(),
            });
        }
        self.normalized = true;
        Ok(self)
    }

    /// `φ ≡ 1`.
    pub fn constant(dim: u32) -> Self {
        Weight::new(dim, vec![S::one()], S::zero())
            .and_then(Weight::normalized)
            .expect("constant weight is valid")
    }

    /// `φ(2^k) = 2^{kd/u}`, the weight of `m_{u,p}`.
    pub fn power(dim: u32, u: S) -> Result<Self> {
        if !(u > S::zero()) {
            return Err(Error::InvalidParameter(format!("exponent u must be positive, got {u}")));
        }
        Weight::new(dim, vec![S::one()], S::of_u64(dim as u64) / u)?.normalized()
    }

    pub fn dim(&self) -> u32 {
        self.dim
    }

    pub fn head(&self) -> &[S] {
        &self.head
    }

    pub fn tail_exponent(&self) -> S {
        self.tail_exponent
    }

    pub fn is_normalized_flag(&self) -> bool {
        self.normalized
    }

    /// `K`, the last level stored explicitly.
    pub fn last_level(&self) -> u64 {
        (self.head.len() - 1) as u64
    }

    fn last(&self) -> S {
        *self.head.last().unwrap()
    }

    fn d(&self) -> S {
        S::of_u64(self.dim as u64)
    }

    /// `φ(2^k)`.
    pub fn eval(&self, k: u64) -> S {
        let big_k = self.last_level();
        if k <= big_k {
            self.head[k as usize]
        } else {
            let v = self.last();
            if v.is_zero() {
                return v;
            }
            v * S::pow2(S::of_u64(k - big_k) * self.tail_exponent)
        }
    }

    /// `φ(2^k) 2^{−kd/p}`.
    pub fn scaled(&self, k: u64, p: S) -> S {
        let big_k = self.last_level();
        if k <= big_k {
            self.head[k as usize] * S::pow2(-S::of_u64(k) * self.d() / p)
        } else {
            // Combine exponents first so large k neither overflows nor underflows.
            let v = self.last();
            if v.is_zero() {
                return v;
            }
            let expo = S::of_u64(k - big_k) * self.tail_exponent - S::of_u64(k) * self.d() / p;
            v * S::pow2(expo)
        }
    }

    /// `sup_k φ(2^k) 2^{−kd/p}`; finite exactly for non-trivial spaces.
    pub fn sup_scaled(&self, p: S) -> S {
        if !self.last().is_zero() && lt_strict(self.d() / p, self.tail_exponent) {
            return S::infinity();
        }
        // The tail is non-increasing after scaling, so its first point (the
        // last head point) dominates it.
        (0..=self.last_level())
            .map(|k| self.scaled(k, p))
            .fold(S::zero(), S::max)
    }

    /// `max_{k ≤ K} v_k`.
    pub fn max_head(&self) -> S {
        self.head.iter().copied().fold(S::zero(), S::max)
    }

    /// Membership in `G_p`: positive values, non-decreasing, consecutive
    /// ratios at most `2^{d/p}`, tail exponent in `[0, d/p]`.
    pub fn is_gp(&self, p: S) -> bool {
        if !(p > S::zero()) {
            return false;
        }
        let step = S::pow2(self.d() / p);
        if self.head.iter().any(|v| !(*v > S::zero())) {
            return false;
        }
        let head_ok = self
            .head
            .windows(2)
            .all(|w| ge_tol(w[1], w[0]) && le_tol(w[1], w[0] * step));
        head_ok && le_tol(self.tail_exponent, self.d() / p)
    }

    /// `sup { p : φ ∈ G_p }`. Ratios equal to 1 impose no constraint; the
    /// result is `+∞` exactly for constant weights.
    pub fn r_phi(&self) -> Result<S> {
        if let Some(v) = self.head.iter().find(|v| !(**v > S::zero())) {
            return Err(Error::NotInAnyGp {
                reason: format!("weight value {v} is not positive"),
            });
        }
        let mut r = S::infinity();
        let dln2 = self.d() * S::two().ln();
        for (k, w) in self.head.windows(2).enumerate() {
            if lt_strict(w[1], w[0]) {
                return Err(Error::NotInAnyGp {
                    reason: format!("weight decreases between levels {k} and {}", k + 1),
                });
            }
            let ratio = w[1] / w[0];
            if lt_strict(S::one(), ratio) {
                r = r.min(dln2 / ratio.ln());
            }
        }
        if self.tail_exponent > S::zero() {
            r = r.min(self.d() / self.tail_exponent);
        }
        Ok(r)
    }

    /// `sup_j φ(2^j) 2^{−jd/p} < ∞`, i.e. `m_{φ,p} ≠ {0}`.
    pub fn is_nontrivial(&self, p: S) -> bool {
        self.last().is_zero() || le_tol(self.tail_exponent, self.d() / p)
    }

    /// Both limits in closed form.
    pub fn limits(&self, p: S) -> Limits<S> {
        let v = self.last();
        let dp = self.d() / p;
        let limit = if v.is_zero() || lt_strict(self.tail_exponent, dp) {
            S::zero()
        } else if le_tol(self.tail_exponent, dp) {
            self.scaled(self.last_level(), p)
        } else {
            S::infinity()
        };
        let sup = if !v.is_zero() && self.tail_exponent > S::zero() {
            S::infinity()
        } else {
            self.max_head()
        };
        Limits { limit, sup }
    }

    fn require_gp(&self, p: S) -> Result<()> {
        if self.is_gp(p) {
            Ok(())
        } else {
            Err(Error::NotGp { p: p.as_f64() })
        }
    }

    fn require_normalized(&self) -> Result<()> {
        if eq_tol(self.head[0], S::one()) {
            Ok(())
        } else {
            Err(Error::NotNormalized {
                value: self.head[0].as_f64(),
            })
        }
    }

    /// Checks that the weight is a normalized member of `G_p`.
    pub fn require_normalized_gp(&self, p: S) -> Result<()> {
        self.require_gp(p)?;
        self.require_normalized()
    }

    /// An equivalent `G_p` weight: `m_{φ,p}` and `m_{φ̃,p}` carry the same
    /// norm on every sequence.
    ///
    /// First the running maximum `φ⁺(k) = max_{j≤k} φ(2^j)`, then the
    /// envelope `φ̃(k) = 2^{kd/p} sup_{j≥k} φ⁺(j) 2^{−jd/p}`, evaluated
    /// backwards as `φ̃(k) = max(φ⁺(k), 2^{−d/p} φ̃(k+1))` from the level
    /// where `φ⁺` becomes a geometric tail of ratio at most `2^{d/p}`.
    /// When the tail overtakes the head maximum only after `K`, the head is
    /// extended to that level. A constant or vanishing tail becomes a
    /// constant tail (exponent 0).
    ///
    /// Each step leaves `sup_j φ(2^j) A_j(λ)` unchanged because the level
    /// masses `A_j(λ)` grow with `j` while `2^{−jd/p} A_j(λ)` does not. The
    /// construction is idempotent in floating point: on a `G_p` input both
    /// maxima return their first argument.
    pub fn regularize(&self, p: S) -> Result<Self> {
        if !self.is_nontrivial(p) {
            return Err(Error::TrivialSpace);
        }
        let mut plus = Vec::with_capacity(self.head.len());
        let mut run = S::zero();
        for &v in &self.head {
            run = run.max(v);
            plus.push(run);
        }
        let top = run;
        let v_k = self.last();
        let e = self.tail_exponent;
        let new_e = if v_k.is_zero() || e.is_zero() {
            S::zero()
        } else {
            // Extend until the geometric tail reaches the head maximum.
            let big_k = self.last_level();
            let mut k = big_k;
            while self.eval(k) < top {
                k += 1;
                if plus.len() >= MAX_REGULARIZED_HEAD {
                    return Err(Error::BudgetExceeded {
                        needed: (k + 1) as u128,
                        budget: MAX_REGULARIZED_HEAD as u128,
                    });
                }
                let t = self.eval(k);
                plus.push(if t < top { top } else { t });
            }
            e
        };
        let c = S::pow2(-self.d() / p);
        let mut tilde = plus;
        for k in (0..tilde.len() - 1).rev() {
            tilde[k] = tilde[k].max(c * tilde[k + 1]);
        }
        let mut out = Weight::new(self.dim, tilde, new_e)?;
        out.normalized = self.normalized && out.head[0] == S::one();
        Ok(out)
    }

    /// Structural facts about `m_{φ,p}`: equality with `ℓ_∞` or `ℓ_p`,
    /// separability and the position relative to `c₀`.
    pub fn classify_space(&self, p: S) -> Result<ClassificationReport> {
        self.require_normalized_gp(p)?;
        let Limits { limit, sup } = self.limits(p);
        let equals_linf = sup.is_finite();
        let equals_lp = limit > S::zero();
        let comparable_with_c0 = if equals_lp {
            C0Relation::SubsetEqualLp
        } else if equals_linf {
            C0Relation::EqualsLinf
        } else {
            C0Relation::Incomparable
        };
        Ok(ClassificationReport {
            nontrivial: self.is_nontrivial(p),
            equals_linf,
            equals_lp,
            separable: equals_lp && !equals_linf,
            comparable_with_c0,
            limit_at_infinity: limit.as_f64(),
            sup_phi: sup.as_f64(),
        })
    }
}

/// A weight together with the exponent `p`: the parameters of `m_{φ,p}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "S: Real")]
pub struct SpaceParams<S: Real> {
    #[serde(flatten)]
    pub weight: Weight<S>,
    pub p: S,
}

impl<S: Real> SpaceParams<S> {
    pub fn new(weight: Weight<S>, p: S) -> Result<Self> {
        if !(p > S::zero()) || !p.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "p must be positive and finite, got {p}"
            )));
        }
        Ok(SpaceParams { weight, p })
    }

    pub fn dim(&self) -> u32 {
        self.weight.dim()
    }

    /// `m_{u,p}`: power weight `2^{kd/u}`.
    pub fn power(dim: u32, u: S, p: S) -> Result<Self> {
        SpaceParams::new(Weight::power(dim, u)?, p)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn w(head: &[f64], e: f64) -> Weight<f64> {
        Weight::new(1, head.to_vec(), e).unwrap()
    }

    #[test]
    fn eval_head_and_tail() {
        assert_eq!(w(&[1.0, 2.0], 1.0).eval(3), 8.0);
        assert_eq!(w(&[1.0], 0.0).eval(17), 1.0);
        let sqrt = w(&[1.0, 2f64.sqrt(), 2.0], 0.5);
        for k in 0..10 {
            assert!((sqrt.eval(k) - 2f64.powf(k as f64 / 2.0)).abs() < 1e-12 * sqrt.eval(k));
        }
    }

    #[test]
    fn gp_membership() {
        let sqrt = Weight::<f64>::power(1, 2.0).unwrap();
        assert!(sqrt.is_gp(1.0));
        assert!(sqrt.is_gp(2.0));
        assert!(!sqrt.is_gp(3.0));
        assert!(!w(&[1.0, 0.5], 0.0).is_gp(0.1));
        assert!(!w(&[0.0, 1.0], 0.0).is_gp(1.0));
    }

    #[test]
    fn r_phi_values() {
        assert!((Weight::<f64>::power(1, 2.0).unwrap().r_phi().unwrap() - 2.0).abs() < 1e-12);
        assert_eq!(Weight::<f64>::constant(2).r_phi().unwrap(), f64::INFINITY);
        let mixed = w(&[1.0, 2f64.sqrt(), 2f64.powf(0.75)], 0.25);
        assert!((mixed.r_phi().unwrap() - 2.0).abs() < 1e-12);
        assert!(matches!(w(&[1.0, 0.5], 0.0).r_phi(), Err(Error::NotInAnyGp { .. })));
    }

    #[test]
    fn r_phi_agrees_with_bisection_on_membership() {
        let mixed = w(&[1.0, 2f64.sqrt(), 2f64.powf(0.75)], 0.25);
        let (mut lo, mut hi) = (0.01, 100.0);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mixed.is_gp(mid) {
                lo = mid
            } else {
                hi = mid
            }
        }
        assert!((lo - 2.0).abs() < 1e-9);
    }

    #[test]
    fn nontriviality_boundary() {
        assert!(w(&[1.0], 1.0).is_nontrivial(1.0));
        assert!(!w(&[1.0], 1.1).is_nontrivial(1.0));
        assert!(Weight::<f64>::power(1, 2.0).unwrap().is_nontrivial(1.0));
        assert!(w(&[1.0, 0.0], 5.0).is_nontrivial(1.0));
    }

    #[test]
    fn limits_examples() {
        let lp = Weight::<f64>::power(1, 1.5).unwrap();
        assert_eq!(
            lp.limits(1.5),
            Limits {
                limit: 1.0,
                sup: f64::INFINITY
            }
        );
        assert_eq!(Weight::<f64>::constant(1).limits(1.0), Limits { limit: 0.0, sup: 1.0 });
        let sqrt = Weight::<f64>::power(1, 2.0).unwrap();
        assert_eq!(
            sqrt.limits(1.0),
            Limits {
                limit: 0.0,
                sup: f64::INFINITY
            }
        );
    }

    #[test]
    fn regularize_fixes_gp_weights() {
        let sqrt = w(&[1.0, 2f64.sqrt(), 2.0], 0.5);
        assert_eq!(sqrt.regularize(1.0).unwrap(), sqrt);
    }

    #[test]
    fn regularize_non_monotone_head() {
        let r = w(&[1.0, 0.5, 2.0], 0.0).regularize(1.0).unwrap();
        assert_eq!(r.head(), &[1.0, 1.0, 2.0]);
        assert_eq!(r.tail_exponent(), 0.0);
        assert!(r.is_gp(1.0));
    }

    #[test]
    fn infimum_envelope_does_not_preserve_norms() {
        use crate::norms::norm_mps;
        use crate::sequence::SparseSequence;
        // inf_{j≥k} φ(2^j) turns [1, 0.5, 2] into [0.5, 0.5, 2] and halves
        // the norm of a single unit entry; the running maximum keeps it.
        let raw = w(&[1.0, 0.5, 2.0], 0.0);
        let inf = w(&[0.5, 0.5, 2.0], 0.0);
        let e0 = SparseSequence::from_1d([(0, 1.0)]);
        let norm = |w: &Weight<f64>| norm_mps(&e0, &SpaceParams::new(w.clone(), 1.0).unwrap()).unwrap().value;
        assert_eq!(norm(&raw), 1.0);
        assert_eq!(norm(&inf), 0.5);
        assert_eq!(norm(&raw.regularize(1.0).unwrap()), 1.0);
    }

    #[test]
    fn regularize_lifts_zeros() {
        let r = w(&[0.0, 0.0, 1.0], 0.0).regularize(1.0).unwrap();
        assert_eq!(r.head(), &[0.25, 0.5, 1.0]);
        assert!(r.is_gp(1.0));
    }

    #[test]
    fn regularize_extends_head_until_tail_dominates() {
        let r = w(&[4.0, 1.0], 0.5).regularize(1.0).unwrap();
        // Tail 2^{(k-1)/2} reaches 4 at k = 5.
        assert_eq!(r.last_level(), 5);
        assert!(r.is_gp(1.0));
        assert_eq!(r.regularize(1.0).unwrap(), r);
    }

    #[test]
    fn regularize_rejects_trivial_space() {
        assert_eq!(w(&[1.0], 2.0).regularize(1.0), Err(Error::TrivialSpace));
    }

    #[test]
    fn classification_examples() {
        let c = Weight::<f64>::constant(1).classify_space(1.0).unwrap();
        assert!(c.equals_linf && !c.equals_lp && !c.separable);
        assert_eq!(c.comparable_with_c0, C0Relation::EqualsLinf);
        let lp = Weight::<f64>::power(2, 1.0).unwrap().classify_space(1.0).unwrap();
        assert!(lp.equals_lp && lp.separable && !lp.equals_linf);
        let mid = Weight::<f64>::power(1, 2.0).unwrap().classify_space(1.0).unwrap();
        assert!(!mid.equals_lp && !mid.equals_linf && !mid.separable);
        assert_eq!(mid.comparable_with_c0, C0Relation::Incomparable);
        assert!(matches!(
            Weight::<f64>::power(1, 2.0).unwrap().classify_space(3.0),
            Err(Error::NotGp { .. })
        ));
    }

    #[test]
    fn json_round_trip_is_bit_exact() {
        let wt = Weight::new(2, vec![1.0, 0.1 + 0.2, std::f64::consts::PI], 1.0 / 3.0)
            .unwrap()
            .normalized()
            .unwrap();
        let s = serde_json::to_string(&wt).unwrap();
        let back: Weight<f64> = serde_json::from_str(&s).unwrap();
        assert_eq!(back, wt);
        for (a, b) in back.head().iter().zip(wt.head()) {
            assert_eq!(a.to_bits(), b.to_bits());
        }
        let bad = r#"{"dim":1,"head":[2.0],"tail_exponent":0.0,"normalized":true}"#;
        assert!(serde_json::from_str::<Weight<f64>>(bad).is_err());
    }

    #[test]
    fn works_in_single_precision() {
        let sqrt = Weight::<f32>::power(1, 2.0).unwrap();
        assert!(sqrt.is_gp(2.0));
        assert!((sqrt.r_phi().unwrap() - 2.0).abs() < 1e-5);
        let r = Weight::<f32>::new(1, vec![1.0, 0.5, 2.0], 0.0)
            .unwrap()
            .regularize(1.0)
            .unwrap();
        assert!(r.is_gp(1.0));
    }
}

//! Generators for extremal and counterexample sequences, each delivered as
//! a finite sequence plus inequalities its norms must satisfy.
//!
//! Infinite objects are truncated; every certificate is a statement about
//! the truncation that can be re-checked with the norm routines alone, and
//! holds for every truncation level, not only the last.

use std::collections::BTreeSet;

use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize};
use serde_json::value::RawValue;

use crate::embeddings::{is_continuous, rho};
use crate::error::{Error, Result};
use crate::finite_dim::distribute_even;
use crate::lattice::{unit_cubes_in, DyadicCube, LatticePoint, DEFAULT_ENUMERATION_BUDGET};
use crate::norms::{norm_linf, norm_lp, norm_mps};
use crate::scalar::{ge_tol, le_tol, Real};
use crate::sequence::{from_raw_entries, SparseSequence};
use crate::weights::{SpaceParams, Weight};

/// Largest level used for positions `2^n` on the first axis.
pub const MAX_POSITION_LEVEL: u32 = 126;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    Le,
    Ge,
}

/// Which quantity a certificate bounds.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CertifiedNorm {
    /// `‖· | m_{φ,p}‖` in the space the witness was built for.
    Mps,
    /// `‖· | m_{φ₂,p₂}‖` in the target space of an embedding witness.
    MpsTarget,
    /// `‖· | ℓ_p‖` with the space's `p`.
    Lp,
    Linf,
    /// `sup λ − inf λ` over all of `Z^d` (zeros included).
    Oscillation,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Certificate {
    pub name: String,
    pub bound: f64,
    pub direction: Direction,
    pub norm: CertifiedNorm,
}

impl Certificate {
    fn new<S: Real>(name: &str, norm: CertifiedNorm, direction: Direction, bound: S) -> Self {
        Certificate {
            name: name.to_string(),
            bound: bound.as_f64(),
            direction,
            norm,
        }
    }
}

/// Outcome of re-evaluating one certificate.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CertificateCheck {
    pub name: String,
    pub value: f64,
    pub bound: f64,
    pub direction: Direction,
    pub holds: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(bound = "S: Real")]
pub struct WitnessBundle<S: Real> {
    pub kind: String,
    #[serde(flatten)]
    pub sequence: SparseSequence<S>,
    pub certificates: Vec<Certificate>,
    /// Number of blocks, spikes or terms kept.
    pub trunc_param: u64,
    /// Dyadic levels chosen by the construction, in order.
    pub levels: Vec<u64>,
}

impl<'de, S: Real> Deserialize<'de> for WitnessBundle<S> {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Repr {
            kind: String,
            dim: u32,
            entries: Vec<Vec<Box<RawValue>>>,
            certificates: Vec<Certificate>,
            #[serde(default)]
            trunc_param: u64,
            #[serde(default)]
            levels: Vec<u64>,
        }
        let r = Repr::deserialize(d)?;
        Ok(WitnessBundle {
            kind: r.kind,
            sequence: from_raw_entries(r.dim, r.entries).map_err(D::Error::custom)?,
            certificates: r.certificates,
            trunc_param: r.trunc_param,
            levels: r.levels,
        })
    }
}

impl<S: Real> WitnessBundle<S> {
    fn new(kind: &str, sequence: SparseSequence<S>, trunc_param: u64, levels: Vec<u64>) -> Self {
        WitnessBundle {
            kind: kind.to_string(),
            sequence,
            certificates: Vec::new(),
            trunc_param,
            levels,
        }
    }

    fn certify(mut self, c: Certificate) -> Self {
        self.certificates.push(c);
        self
    }

    /// Recomputes every certified quantity from the sequence. `target` is
    /// needed only for [`CertifiedNorm::MpsTarget`].
    pub fn verify(&self, space: &SpaceParams<S>, target: Option<&SpaceParams<S>>) -> Result<Vec<CertificateCheck>> {
        self.certificates
            .iter()
            .map(|c| {
                let value = match c.norm {
                    CertifiedNorm::Mps => norm_mps(&self.sequence, space)?.value,
                    CertifiedNorm::MpsTarget => {
                        let t = target.ok_or_else(|| {
                            Error::InvalidParameter(format!("certificate {} needs a target space", c.name))
                        })?;
                        norm_mps(&self.sequence, t)?.value
                    }
                    CertifiedNorm::Lp => norm_lp(&self.sequence, space.p),
                    CertifiedNorm::Linf => norm_linf(&self.sequence),
                    CertifiedNorm::Oscillation => oscillation(&self.sequence),
                };
                let bound = S::of(c.bound);
                let holds = match c.direction {
                    Direction::Le => le_tol(value, bound),
                    Direction::Ge => ge_tol(value, bound),
                };
                Ok(CertificateCheck {
                    name: c.name.clone(),
                    value: value.as_f64(),
                    bound: c.bound,
                    direction: c.direction,
                    holds,
                })
            })
            .collect()
    }
}

/// `sup λ − inf λ` over `Z^d`; a finite support always contributes a zero.
pub fn oscillation<S: Real>(seq: &SparseSequence<S>) -> S {
    let (lo, hi) = seq
        .iter()
        .fold((S::zero(), S::zero()), |(lo, hi), (_, v)| (lo.min(v), hi.max(v)));
    hi - lo
}

fn indicator_of<S: Real>(cube: &DyadicCube, height: S) -> Result<SparseSequence<S>> {
    let pts = unit_cubes_in(cube, DEFAULT_ENUMERATION_BUDGET)?;
    SparseSequence::from_entries(cube.dim(), pts.into_iter().map(|k| (k, height)))
}

fn require_limit_zero<S: Real>(params: &SpaceParams<S>) -> Result<()> {
    params.weight.require_normalized_gp(params.p)?;
    let limit = params.weight.limits(params.p).limit;
    if limit > S::zero() {
        return Err(Error::LimitPositive { limit: limit.as_f64() });
    }
    Ok(())
}

/// Smallest `n ≥ from` with `φ(2^n) 2^{−nd/p} ≤ target`, up to the largest position level.
fn first_level_below<S: Real>(w: &Weight<S>, p: S, from: u64, target: S) -> Result<u64> {
    for n in from..=MAX_POSITION_LEVEL as u64 {
        if w.scaled(n, p) <= target {
            return Ok(n);
        }
    }
    Err(Error::LevelTooLarge {
        level: MAX_POSITION_LEVEL + 1,
        max: MAX_POSITION_LEVEL,
    })
}

/// Levels `n_1 < n_2 < …` (greedy, smallest first) with
/// `φ(2^{n_ℓ}) 2^{−d n_ℓ/p} ≤ ℓ^{−1/p}`, starting from `n ≥ first`.
fn decay_levels<S: Real>(w: &Weight<S>, p: S, count: usize, first: u64) -> Result<Vec<u64>> {
    let mut out: Vec<u64> = Vec::with_capacity(count);
    for l in 1..=count {
        let from = out.last().map_or(first, |n| n + 1);
        let target = S::of_u64(l as u64).powf(-S::one() / p);
        out.push(first_level_below(w, p, from, target)?);
    }
    Ok(out)
}

fn pow2_i128(n: u64) -> i128 {
    1i128 << n
}

/// Indicator of `Q_{−k₀,m₀}`. Its norm is `max(φ⁺(2^{k₀}), φ*(2^{k₀}))` with
/// `φ⁺(2^{k₀}) = max_{j ≤ k₀} φ(2^j)` and
/// `φ*(2^{k₀}) = sup_{j ≥ k₀} 2^{(k₀−j)d/p} φ(2^j)`; for `G_p` weights both
/// equal `φ(2^{k₀})`.
pub fn char_sequence<S: Real>(params: &SpaceParams<S>, k0: u32, m0: LatticePoint) -> Result<WitnessBundle<S>> {
    let w = &params.weight;
    let p = params.p;
    if m0.dim() != w.dim() {
        return Err(Error::DimensionMismatch {
            expected: w.dim(),
            got: m0.dim(),
        });
    }
    if !w.is_nontrivial(p) {
        return Err(Error::TrivialSpace);
    }
    let cube = DyadicCube { level: k0, corner: m0 };
    let seq = indicator_of(&cube, S::one())?;
    let plus = (0..=k0 as u64).map(|j| w.eval(j)).fold(S::zero(), S::max);
    // Past max(k₀, K) the scaled tail does not grow.
    let d = S::of_u64(w.dim() as u64);
    let star = (k0 as u64..=(k0 as u64).max(w.last_level()))
        .map(|j| w.eval(j) * S::pow2(d * (S::of_u64(k0 as u64) - S::of_u64(j)) / p))
        .fold(S::zero(), S::max);
    let value = plus.max(star);
    Ok(WitnessBundle::new("char", seq, 1, vec![k0 as u64])
        .certify(Certificate::new(
            "indicator-norm-upper",
            CertifiedNorm::Mps,
            Direction::Le,
            value,
        ))
        .certify(Certificate::new(
            "indicator-norm-lower",
            CertifiedNorm::Mps,
            Direction::Ge,
            value,
        )))
}

/// A `c₀` sequence whose Morrey norms grow without bound: for levels
/// `k_1 < k_2 < …` along which `φ` at least doubles, the cube
/// `Q_{−k_l,(1,0,…,0)}` is filled with the value `φ(2^{k_l})^{−1/2}`. The
/// cubes are disjoint, the values tend to 0, and the `l`-th cube alone
/// contributes `φ(2^{k_l})^{1/2}` to the norm.
pub fn c0_counterexample<S: Real>(params: &SpaceParams<S>, shells: usize) -> Result<WitnessBundle<S>> {
    let w = &params.weight;
    let p = params.p;
    if !w.is_nontrivial(p) {
        return Err(Error::TrivialSpace);
    }
    let sup = w.limits(p).sup;
    if sup.is_finite() {
        return Err(Error::BoundedWeight { sup: sup.as_f64() });
    }
    if shells == 0 {
        return Err(Error::InvalidParameter("at least one shell is required".into()));
    }
    let mut levels: Vec<u64> = Vec::new();
    let mut k = 0u64;
    while levels.len() < shells {
        if k > MAX_POSITION_LEVEL as u64 {
            return Err(Error::LevelTooLarge {
                level: k as u32,
                max: MAX_POSITION_LEVEL,
            });
        }
        let v = w.eval(k);
        let ok = match levels.last() {
            None => v > S::zero(),
            Some(&prev) => v >= S::two() * w.eval(prev),
        };
        if ok {
            levels.push(k);
        }
        k += 1;
    }
    let mut seq = SparseSequence::new(w.dim());
    for &kl in &levels {
        let cube = DyadicCube {
            level: kl as u32,
            corner: LatticePoint::on_first_axis(w.dim(), 1),
        };
        let h = w.eval(kl).powf(-S::one() / S::two());
        for pt in unit_cubes_in(&cube, DEFAULT_ENUMERATION_BUDGET)? {
            seq.set(pt, h)?;
        }
    }
    let last = *levels.last().unwrap();
    let bound = w.eval(last).sqrt();
    Ok(
        WitnessBundle::new("c0", seq, shells as u64, levels).certify(Certificate::new(
            "norm-grows-like-sqrt-phi",
            CertifiedNorm::Mps,
            Direction::Ge,
            bound,
        )),
    )
}

/// Unit spikes at `(2^{n_ℓ}, 0, …, 0)`, `ℓ = 1..=count`, with `n_ℓ` the
/// greedy levels where `φ(2^n) 2^{−dn/p} ≤ ℓ^{−1/p}`. A cube holding
/// spikes `ℓ_1 < … < ℓ_r`, `r ≥ 2`, has level above `n_{ℓ_r}`, so the norm
/// stays at most `max(φ(1), max_ℓ φ(2^{n_ℓ}) 2^{−dn_ℓ/p} ℓ^{1/p}) = 1`, while
/// the infinite sequence oscillates between 0 and 1 (it is not in `c`).
pub fn spike_sequence<S: Real>(params: &SpaceParams<S>, count: usize) -> Result<WitnessBundle<S>> {
    require_limit_zero(params)?;
    let all: Vec<usize> = (1..=count).collect();
    spikes_for(params, &all, count, "spike")
}

fn spikes_for<S: Real>(
    params: &SpaceParams<S>,
    chosen: &[usize],
    count: usize,
    kind: &str,
) -> Result<WitnessBundle<S>> {
    let w = &params.weight;
    let p = params.p;
    let levels = decay_levels(w, p, count, 0)?;
    let mut seq = SparseSequence::new(w.dim());
    for &l in chosen {
        seq.set(LatticePoint::on_first_axis(w.dim(), pow2_i128(levels[l - 1])), S::one())?;
    }
    let bound = levels
        .iter()
        .enumerate()
        .map(|(i, &n)| w.scaled(n, p) * S::of_u64(i as u64 + 1).powf(S::one() / p))
        .fold(w.eval(0), S::max);
    let mut b = WitnessBundle::new(kind, seq, count as u64, levels).certify(Certificate::new(
        "uniform-norm-bound",
        CertifiedNorm::Mps,
        Direction::Le,
        bound,
    ));
    if !chosen.is_empty() {
        b = b
            .certify(Certificate::new(
                "oscillation",
                CertifiedNorm::Oscillation,
                Direction::Ge,
                S::one(),
            ))
            .certify(Certificate::new(
                "distance-from-zero",
                CertifiedNorm::Mps,
                Direction::Ge,
                S::one(),
            ));
    }
    Ok(b)
}

/// The spikes of [`spike_sequence`] with indices in `e ⊆ {1, …, count}`.
/// Two different index sets give sequences at Morrey distance at least 1:
/// the difference has an entry of modulus 1.
pub fn lambda_e<S: Real>(params: &SpaceParams<S>, e: &BTreeSet<usize>, count: usize) -> Result<WitnessBundle<S>> {
    require_limit_zero(params)?;
    if let Some(bad) = e.iter().find(|&&l| l == 0 || l > count) {
        return Err(Error::InvalidParameter(format!("index {bad} outside 1..={count}")));
    }
    let chosen: Vec<usize> = e.iter().copied().collect();
    spikes_for(params, &chosen, count, "lambda-e")
}

/// `‖λ^{(E)} − λ^{(F)} | m_{φ,p}‖`.
pub fn lambda_e_distance<S: Real>(
    params: &SpaceParams<S>,
    e: &BTreeSet<usize>,
    f: &BTreeSet<usize>,
    count: usize,
) -> Result<S> {
    let a = lambda_e(params, e, count)?.sequence;
    let b = lambda_e(params, f, count)?.sequence;
    Ok(norm_mps(&a.sub(&b)?, params)?.value)
}

/// Blocks of height `φ(2^j)^{−1}` on the cubes `Q_{−j,(2^{n_j},0,…,0)}`,
/// `j = 0..blocks`, with `n_0 = 1` and `n_{j+1} = n_j + ν_j`, where `ν_j`
/// is the smallest level above `max(j, ν_{j−1})` with
/// `(Σ_{ℓ≤j} φ(2^ℓ)^{−p} 2^{ℓd})^{1/p} ≤ 2^{ν d/p} φ(2^ν)^{−1}`.
///
/// Each block has unit norm, the entries tend to 0, and the spacing keeps
/// every cube that meets several blocks so large that the total stays at
/// most 2 (`2^{1/p}` for `p < 1`).
pub fn proper_subspace_witness<S: Real>(params: &SpaceParams<S>, blocks: usize) -> Result<WitnessBundle<S>> {
    require_limit_zero(params)?;
    let w = &params.weight;
    let p = params.p;
    let d = w.dim() as u64;
    if blocks == 0 {
        return Err(Error::InvalidParameter("at least one block is required".into()));
    }
    let mut seq = SparseSequence::new(w.dim());
    let mut n = 1u64;
    let mut prev_nu: Option<u64> = None;
    let mut mass = S::zero();
    let mut starts = Vec::with_capacity(blocks);
    for j in 0..blocks as u64 {
        if n + j > MAX_POSITION_LEVEL as u64 {
            return Err(Error::LevelTooLarge {
                level: (n + j) as u32,
                max: MAX_POSITION_LEVEL,
            });
        }
        starts.push(n);
        let cube = DyadicCube {
            level: j as u32,
            corner: LatticePoint::on_first_axis(w.dim(), pow2_i128(n)),
        };
        let h = w.eval(j).recip();
        for pt in unit_cubes_in(&cube, DEFAULT_ENUMERATION_BUDGET)? {
            seq.set(pt, h)?;
        }
        if j + 1 == blocks as u64 {
            break;
        }
        mass = mass + w.eval(j).powf(-p) * S::pow2(S::of_u64(j * d));
        let from = prev_nu.map_or(j + 1, |v| v.max(j) + 1);
        let nu = first_level_below(w, p, from, mass.powf(-S::one() / p))?;
        prev_nu = Some(nu);
        n += nu;
    }
    let bound = if p >= S::one() { S::two() } else { S::pow2(S::one() / p) };
    Ok(WitnessBundle::new("proper-subspace", seq, blocks as u64, starts)
        .certify(Certificate::new("norm-bound", CertifiedNorm::Mps, Direction::Le, bound))
        .certify(Certificate::new(
            "first-block-height",
            CertifiedNorm::Linf,
            Direction::Le,
            w.eval(0).recip(),
        )))
}

/// `μ ↦ Σ_k μ_k e_{(2^{j_k}−1, 0, …, 0)}` with `j_k ≥ 1` greedy and
/// `2^{−j_k d/p} φ(2^{j_k}) ≤ k^{−1/p}`: an isometric copy of `ℓ_∞`, i.e. the
/// Morrey norm of the image is exactly `max |μ_k|`.
pub fn linf_copy<S: Real>(params: &SpaceParams<S>, mu: &[S]) -> Result<WitnessBundle<S>> {
    require_limit_zero(params)?;
    let w = &params.weight;
    let levels = decay_levels(w, params.p, mu.len(), 1)?;
    let mut seq = SparseSequence::new(w.dim());
    for (&j, &m) in levels.iter().zip(mu) {
        seq.set(LatticePoint::on_first_axis(w.dim(), pow2_i128(j) - 1), m)?;
    }
    let sup = mu.iter().map(|m| m.abs()).fold(S::zero(), S::max);
    Ok(WitnessBundle::new("linf-copy", seq, mu.len() as u64, levels)
        .certify(Certificate::new(
            "isometry-upper",
            CertifiedNorm::Mps,
            Direction::Le,
            sup,
        ))
        .certify(Certificate::new(
            "isometry-lower",
            CertifiedNorm::Mps,
            Direction::Ge,
            sup,
        )))
}

/// How fast the scaled weight must decay along the nested cubes of
/// [`ss_demo`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DecaySchedule {
    /// `φ(ℓ(Q_k)) |Q_k|^{−1/p} < 2^{−k}`.
    Geometric,
    /// `φ(ℓ(Q_k)) |Q_k|^{−1/p} ≤ 1/k`; reaches far larger `n` before the
    /// lattice runs out of levels.
    Harmonic,
}

/// The point whose binary digits alternate `…1010` in every coordinate;
/// below `2^126`, so all its ancestors up to level 126 are distinct.
fn nesting_point(dim: u32) -> LatticePoint {
    let c: i128 = (0..63).map(|i| 1i128 << (2 * i + 1)).sum();
    LatticePoint::new(vec![c; dim as usize])
}

/// `x^{(n)} = n^{−1/p} Σ_{k=1}^n e_{c_k}`: unit vectors of `ℓ_p` placed at
/// the corners `c_k` of nested cubes `Q_1 ⊂ Q_2 ⊂ …`, where `Q_k` has level
/// `s_k ≥ s_{k−1} + 2` and scaled weight `δ_k = φ(2^{s_k}) 2^{−s_k d/p}`
/// below the schedule. The cubes are the ancestors of a point with
/// alternating binary digits, so `c_k ∈ Q_k ∖ Q_{k−1}` and `Q_{k−1}` stays
/// at distance at least 1 from the boundary of `Q_k`.
///
/// `‖x^{(n)} | ℓ_p‖ = 1`, and splitting cubes by their position relative to
/// the chain gives `‖x^{(n)} | m_{φ,p}‖ ≤ n^{−1/p} max(1 + ε,
/// max_{2≤k≤n} k δ_{k−1}, (n + ε) δ_n)`.
pub fn ss_demo<S: Real>(
    params: &SpaceParams<S>,
    n: usize,
    eps: S,
    schedule: DecaySchedule,
) -> Result<WitnessBundle<S>> {
    let p = params.p;
    if p < S::one() {
        return Err(Error::QuasiBanachUnsupported { p: p.as_f64() });
    }
    require_limit_zero(params)?;
    if !(eps > S::zero() && eps < S::one()) {
        return Err(Error::InvalidParameter(format!("eps must lie in (0, 1), got {eps}")));
    }
    if n == 0 {
        return Err(Error::InvalidParameter("n must be at least 1".into()));
    }
    let w = &params.weight;
    let c = nesting_point(w.dim());
    let mut levels: Vec<u64> = Vec::with_capacity(n);
    let mut deltas: Vec<S> = Vec::with_capacity(n);
    for k in 1..=n as u64 {
        let from = levels.last().map_or(0, |s| s + 2);
        let mut s = from;
        loop {
            if s > MAX_POSITION_LEVEL as u64 {
                return Err(Error::LevelTooLarge {
                    level: s as u32,
                    max: MAX_POSITION_LEVEL,
                });
            }
            let delta = w.scaled(s, p);
            let ok = match schedule {
                DecaySchedule::Geometric => delta < S::pow2(-S::of_u64(k)),
                DecaySchedule::Harmonic => delta <= S::of_u64(k).recip(),
            };
            if ok {
                levels.push(s);
                deltas.push(delta);
                break;
            }
            s += 1;
        }
    }
    let height = S::of_u64(n as u64).powf(-S::one() / p);
    let mut seq = SparseSequence::new(w.dim());
    for &s in &levels {
        seq.set(c.ancestor(s as u32).first_point(), height)?;
    }
    let mut worst = S::one() + eps;
    for k in 2..=n {
        worst = worst.max(S::of_u64(k as u64) * deltas[k - 2]);
    }
    worst = worst.max((S::of_u64(n as u64) + eps) * deltas[n - 1]);
    let bound = worst * height;
    Ok(WitnessBundle::new("ss-demo", seq, n as u64, levels)
        .certify(Certificate::new(
            "lp-norm-lower",
            CertifiedNorm::Lp,
            Direction::Ge,
            S::one() - eps,
        ))
        .certify(Certificate::new(
            "mps-norm-upper",
            CertifiedNorm::Mps,
            Direction::Le,
            bound,
        )))
}

/// A sequence showing that `m_{φ₁,p₁} ↪ m_{φ₂,p₂}` fails, at the `ell`-th
/// step: `j` is the `ell`-th level (greedy, `j ≥ 1`) with
/// `ell · φ₁(2^j)^ρ < φ₂(2^j)`.
///
/// For `ρ = 1` the sequence is `φ₁(2^j)^{−1}` times the indicator of
/// `Q_{−j,0}`, with source norm 1 and target norm above `ell`. For `ρ < 1`
/// it is the balanced 0/1 sequence with `⌊2^{dj} φ₁(2^j)^{−p₁}⌋` ones, with
/// source norm at most `2^{1/p₁}` and target norm at least `2^{−1/p₂} ell`.
pub fn embedding_failure<S: Real>(
    w1: &Weight<S>,
    p1: S,
    w2: &Weight<S>,
    p2: S,
    ell: usize,
) -> Result<WitnessBundle<S>> {
    let verdict = is_continuous(w1, p1, w2, p2)?;
    if verdict.continuous {
        return Err(Error::InvalidParameter("the embedding is continuous".into()));
    }
    if ell == 0 {
        return Err(Error::InvalidParameter("ell must be at least 1".into()));
    }
    let r = rho(p1, p2);
    let mut levels = Vec::with_capacity(ell);
    let mut j = 1u64;
    while levels.len() < ell {
        if j > MAX_POSITION_LEVEL as u64 {
            return Err(Error::LevelTooLarge {
                level: j as u32,
                max: MAX_POSITION_LEVEL,
            });
        }
        if S::of_u64(levels.len() as u64 + 1) * w1.eval(j).powf(r) < w2.eval(j) {
            levels.push(j);
        }
        j += 1;
    }
    let j = *levels.last().unwrap();
    let l = S::of_u64(ell as u64);
    let (seq, src, dst) = if r >= S::one() {
        let cube = DyadicCube::at_origin(w1.dim(), j as u32);
        (indicator_of(&cube, w1.eval(j).recip())?, S::one(), l)
    } else {
        let dist = distribute_even(w1, p1, j as u32, j as u32)?;
        (dist.sequence, S::pow2(p1.recip()), S::pow2(-p2.recip()) * l)
    };
    Ok(WitnessBundle::new("embedding-failure", seq, ell as u64, levels)
        .certify(Certificate::new(
            "source-norm-upper",
            CertifiedNorm::Mps,
            Direction::Le,
            src,
        ))
        .certify(Certificate::new(
            "target-norm-lower",
            CertifiedNorm::MpsTarget,
            Direction::Ge,
            dst,
        )))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sqrt_space() -> SpaceParams<f64> {
        SpaceParams::power(1, 2.0, 1.0).unwrap()
    }

    fn all_hold(b: &WitnessBundle<f64>, s: &SpaceParams<f64>, t: Option<&SpaceParams<f64>>) {
        for c in b.verify(s, t).unwrap() {
            assert!(c.holds, "{c:?}");
        }
    }

    #[test]
    fn char_examples() {
        let s = sqrt_space();
        let b = char_sequence(&s, 0, [5].into()).unwrap();
        assert_eq!(b.certificates[0].bound, 1.0);
        all_hold(&b, &s, None);
        let b = char_sequence(&s, 2, [0].into()).unwrap();
        assert!((b.certificates[0].bound - 2.0).abs() < 1e-12);
        all_hold(&b, &s, None);
        let raw = SpaceParams::new(Weight::new(1, vec![1.0, 3.0, 1.5], 0.0).unwrap(), 1.0).unwrap();
        let b = char_sequence(&raw, 1, [0].into()).unwrap();
        assert_eq!(b.certificates[0].bound, 3.0);
        all_hold(&b, &raw, None);
    }

    #[test]
    fn c0_examples() {
        let s = sqrt_space();
        for shells in 1..=5 {
            let b = c0_counterexample(&s, shells).unwrap();
            all_hold(&b, &s, None);
        }
        let b = c0_counterexample(&s, 4).unwrap();
        assert_eq!(b.levels, vec![0, 2, 4, 6]);
        let flat = SpaceParams::new(Weight::constant(1), 1.0).unwrap();
        assert!(matches!(c0_counterexample(&flat, 2), Err(Error::BoundedWeight { .. })));
    }

    #[test]
    fn spike_examples() {
        let s = sqrt_space();
        let b = spike_sequence(&s, 1).unwrap();
        assert_eq!(norm_mps(&b.sequence, &s).unwrap().value, 1.0);
        for l in 1..=10 {
            all_hold(&spike_sequence(&s, l).unwrap(), &s, None);
        }
        let lp = SpaceParams::power(1, 1.0, 1.0).unwrap();
        assert!(matches!(spike_sequence(&lp, 3), Err(Error::LimitPositive { .. })));
    }

    #[test]
    fn lambda_e_examples() {
        let s = sqrt_space();
        let empty = lambda_e(&s, &BTreeSet::new(), 4).unwrap();
        assert!(empty.sequence.is_empty());
        let e: BTreeSet<usize> = [1, 3].into();
        let f: BTreeSet<usize> = [2].into();
        assert!(lambda_e_distance(&s, &e, &f, 4).unwrap() >= 1.0);
        let sub: BTreeSet<usize> = [1].into();
        assert!(lambda_e_distance(&s, &sub, &e, 4).unwrap() >= 1.0);
    }

    #[test]
    fn proper_subspace_examples() {
        let s = sqrt_space();
        let b = proper_subspace_witness(&s, 1).unwrap();
        assert_eq!(b.sequence, SparseSequence::from_1d([(2, 1.0)]));
        for blocks in 1..=5 {
            all_hold(&proper_subspace_witness(&s, blocks).unwrap(), &s, None);
        }
    }

    #[test]
    fn linf_copy_examples() {
        let s = sqrt_space();
        for mu in [vec![1.0], vec![1.0, 1.0, 1.0], vec![0.3, 2.0, 0.7]] {
            let b = linf_copy(&s, &mu).unwrap();
            let want = mu.iter().cloned().fold(0.0, f64::max);
            assert_eq!(norm_mps(&b.sequence, &s).unwrap().value, want);
        }
    }

    #[test]
    fn ss_demo_examples() {
        let s = sqrt_space();
        let one = ss_demo(&s, 1, 0.5, DecaySchedule::Harmonic).unwrap();
        assert!((norm_mps(&one.sequence, &s).unwrap().value - 1.0).abs() < 1e-12);
        let mut prev = f64::INFINITY;
        for n in [1, 2, 4, 8] {
            let b = ss_demo(&s, n, 0.5, DecaySchedule::Geometric).unwrap();
            all_hold(&b, &s, None);
            let r = norm_mps(&b.sequence, &s).unwrap().value / norm_lp(&b.sequence, 1.0);
            assert!(r < prev);
            prev = r;
        }
        assert!(matches!(
            ss_demo(
                &SpaceParams::power(1, 2.0, 0.5).unwrap(),
                2,
                0.5,
                DecaySchedule::Harmonic
            ),
            Err(Error::QuasiBanachUnsupported { .. })
        ));
    }

    #[test]
    fn embedding_failure_examples() {
        let w1 = Weight::power(1, 4.0).unwrap();
        let w2 = Weight::power(1, 2.0).unwrap();
        let s1 = SpaceParams::new(w1.clone(), 1.0).unwrap();
        let s2 = SpaceParams::new(w2.clone(), 1.0).unwrap();
        for ell in 1..=6 {
            all_hold(&embedding_failure(&w1, 1.0, &w2, 1.0, ell).unwrap(), &s1, Some(&s2));
        }
        let s2 = SpaceParams::new(w2.clone(), 2.0).unwrap();
        let w1 = Weight::power(1, 1.5).unwrap();
        let s1 = SpaceParams::new(w1.clone(), 1.0).unwrap();
        for ell in 1..=4 {
            all_hold(&embedding_failure(&w1, 1.0, &w2, 2.0, ell).unwrap(), &s1, Some(&s2));
        }
    }

    #[test]
    fn bundle_json_round_trip() {
        let b = proper_subspace_witness(&sqrt_space(), 3).unwrap();
        let txt = serde_json::to_string(&b).unwrap();
        let back: WitnessBundle<f64> = serde_json::from_str(&txt).unwrap();
        assert_eq!(back, b);
    }
}

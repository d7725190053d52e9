//! Finite-dimensional Morrey spaces on the cube `Q_{−j,0}` and the norm of
//! the identity `id_j` between two of them.
//!
//! Sequences live on `𝒦_j = {k : Q_{0,k} ⊂ Q_{−j,0}}`, a set of `2^{jd}`
//! points, and the supremum runs over dyadic sub-cubes of `Q_{−j,0}` only.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::{unit_cubes_in, DyadicCube, LatticePoint};
use crate::norms::cube_masses;
use crate::scalar::{floor_tol, ge_tol, le_tol, Real};
use crate::sequence::SparseSequence;
use crate::weights::Weight;

/// Largest number of ones [`distribute_even`] will place.
pub const DISTRIBUTION_BUDGET: u128 = 1 << 24;

#[derive(Clone, Debug, PartialEq)]
pub struct FiniteSpaceParams<S: Real> {
    pub weight: Weight<S>,
    pub p: S,
    pub level: u32,
}

impl<S: Real> FiniteSpaceParams<S> {
    pub fn new(weight: Weight<S>, p: S, level: u32) -> Self {
        FiniteSpaceParams { weight, p, level }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Regime {
    P1GeP2,
    P1LtP2,
}

#[derive(Clone, Debug, PartialEq)]
pub struct OperatorNormResult<S> {
    /// Set exactly when `p₁ ≥ p₂`.
    pub exact: Option<S>,
    /// Best ratio found (constructive sequence and local search).
    pub lower: S,
    pub upper: S,
    /// Ratio achieved by the balanced 0/1 sequence alone.
    pub constructive_lower: S,
    pub regime: Regime,
    /// Level of the extremal cube `Q_{−ν₀,0}`.
    pub nu0: u32,
    /// `‖λ | m_{φ₁,p₁}‖^{p₁}` of the balanced sequence, when one is used.
    pub achieved_constant: Option<S>,
    pub achieved_by: String,
}

/// Output of [`distribute_even`].
#[derive(Clone, Debug, PartialEq)]
pub struct Distribution<S> {
    pub sequence: SparseSequence<S>,
    /// Number of ones placed.
    pub n0: u128,
    pub nu0: u32,
    /// `max_{Q ⊆ Q_{−ν₀,0}} #(ones in Q) / (2^{dν} φ₁(2^ν)^{−p₁})`, which is
    /// `‖λ | m_{φ₁,p₁}‖^{p₁}` on the cube. Never above 2 for normalized
    /// `G_{p₁}` weights.
    pub achieved_constant: S,
}

/// Settings for the local search in [`opnorm_id`].
#[derive(Clone, Debug, PartialEq)]
pub struct SearchConfig {
    pub seed: u64,
    pub iterations: usize,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig {
            seed: 0,
            iterations: 400,
        }
    }
}

fn check_support<S: Real>(seq: &SparseSequence<S>, dim: u32, level: u32) -> Result<()> {
    seq.check_dim(dim)?;
    let cube = DyadicCube::at_origin(dim, level);
    match seq.support().find(|k| !cube.contains(k)) {
        Some(k) => Err(Error::SupportOutOfRange {
            point: k.to_string(),
            level,
        }),
        None => Ok(()),
    }
}

/// Norm in `m^{2^{jd}}_{φ,p}`: the Morrey supremum restricted to dyadic
/// sub-cubes of `Q_{−j,0}`.
pub fn finite_norm<S: Real>(seq: &SparseSequence<S>, params: &FiniteSpaceParams<S>) -> Result<S> {
    check_support(seq, params.weight.dim(), params.level)?;
    let inv_p = S::one() / params.p;
    let mut best = S::zero();
    for nu in 0..=params.level {
        let pre = params.weight.scaled(nu as u64, params.p);
        for m in cube_masses(seq, params.p, nu).values() {
            best = best.max(pre * m.powf(inv_p));
        }
    }
    Ok(best)
}

/// `k_j = ⌊2^{dj} φ₁(2^j)^{−p₁}⌋`.
pub fn kj_count<S: Real>(w1: &Weight<S>, p1: S, j: u32) -> u128 {
    let d = S::of_u64(w1.dim() as u64);
    floor_tol(S::pow2(d * S::of_u64(j as u64)) * w1.eval(j as u64).powf(-p1))
}

/// `N₀ = k_{ν₀}` ones inside `Q_{−ν₀,0}`, split evenly down the dyadic
/// tree: a cube holding `N` ones passes `⌊N/2^d⌋` to each child and one
/// more to the first `N mod 2^d` children in lexicographic order. Sibling
/// counts therefore differ by at most one at every level.
pub fn distribute_even<S: Real>(w1: &Weight<S>, p1: S, j: u32, nu0: u32) -> Result<Distribution<S>> {
    if nu0 > j {
        return Err(Error::InvalidParameter(format!(
            "nu0 = {nu0} exceeds the level j = {j}"
        )));
    }
    let dim = w1.dim();
    let volume = DyadicCube::at_origin(dim, nu0).volume().unwrap_or(u128::MAX);
    let n0 = kj_count(w1, p1, nu0).clamp(1, volume);
    if n0 > DISTRIBUTION_BUDGET {
        return Err(Error::BudgetExceeded {
            needed: n0,
            budget: DISTRIBUTION_BUDGET,
        });
    }
    let mut seq = SparseSequence::new(dim);
    let mut stack = vec![(DyadicCube::at_origin(dim, nu0), n0)];
    while let Some((cube, n)) = stack.pop() {
        if n == 0 {
            continue;
        }
        if cube.level == 0 {
            seq.set(cube.corner.clone(), S::one())?;
            continue;
        }
        let kids = cube.children();
        let base = n >> dim;
        let rem = n - (base << dim);
        for (i, kid) in kids.into_iter().enumerate() {
            stack.push((kid, base + u128::from((i as u128) < rem)));
        }
    }
    let mut achieved = S::zero();
    for nu in 0..=nu0 {
        let cap = S::pow2(S::of_u64(dim as u64 * nu as u64)) * w1.eval(nu as u64).powf(-p1);
        for count in cube_masses(&seq, S::one(), nu).values() {
            achieved = achieved.max(*count / cap);
        }
    }
    Ok(Distribution {
        sequence: seq,
        n0,
        nu0,
        achieved_constant: achieved,
    })
}

fn indicator<S: Real>(dim: u32, level: u32) -> Result<SparseSequence<S>> {
    let pts = unit_cubes_in(&DyadicCube::at_origin(dim, level), DISTRIBUTION_BUDGET)?;
    SparseSequence::from_entries(dim, pts.into_iter().map(|k| (k, S::one())))
}

/// First index attaining the maximum up to tolerance.
fn first_argmax<S: Real>(vals: &[S]) -> (usize, S) {
    let max = vals.iter().copied().fold(S::zero(), S::max);
    let i = vals.iter().position(|v| ge_tol(*v, max)).unwrap_or(0);
    (i, max)
}

/// Norm of `id_j : m^{2^{jd}}_{φ₁,p₁} → m^{2^{jd}}_{φ₂,p₂}`.
///
/// For `p₁ ≥ p₂` it equals `max_{ν ≤ j} φ₂(2^ν)/φ₁(2^ν)`, attained by the
/// indicator of `Q_{−ν₀,0}` at the smallest maximizing `ν₀`.
///
/// For `p₁ < p₂` it lies between a lower bound and
/// `max_{ν ≤ j} φ₂(2^ν)/φ₁(2^ν)^{p₁/p₂}`; the upper bound holds because a
/// unit vector of the source has entries of modulus at most 1. The lower
/// bound starts from the balanced 0/1 sequence of [`distribute_even`] at the
/// maximizing `ν₀` and is improved by a seeded local search over signed
/// sequences. The balanced sequence alone guarantees
/// `upper / lower ≤ 2^{1/p₁ + 1/p₂}` for every `j`.
pub fn opnorm_id<S: Real>(
    w1: &Weight<S>,
    p1: S,
    w2: &Weight<S>,
    p2: S,
    j: u32,
    search: &SearchConfig,
) -> Result<OperatorNormResult<S>> {
    w1.require_normalized_gp(p1)?;
    w2.require_normalized_gp(p2)?;
    if w1.dim() != w2.dim() {
        return Err(Error::DimensionMismatch {
            expected: w1.dim(),
            got: w2.dim(),
        });
    }
    let dim = w1.dim();
    if le_tol(p2, p1) {
        let ratios: Vec<S> = (0..=j as u64).map(|nu| w2.eval(nu) / w1.eval(nu)).collect();
        let (nu0, exact) = first_argmax(&ratios);
        return Ok(OperatorNormResult {
            exact: Some(exact),
            lower: exact,
            upper: exact,
            constructive_lower: exact,
            regime: Regime::P1GeP2,
            nu0: nu0 as u32,
            achieved_constant: None,
            achieved_by: format!("indicator of Q_(-{nu0},0)"),
        });
    }
    let rho = p1 / p2;
    let ratios: Vec<S> = (0..=j as u64).map(|nu| w2.eval(nu) / w1.eval(nu).powf(rho)).collect();
    let (nu0, upper) = first_argmax(&ratios);
    let nu0 = nu0 as u32;
    let src = FiniteSpaceParams::new(w1.clone(), p1, j);
    let dst = FiniteSpaceParams::new(w2.clone(), p2, j);
    let ratio = |s: &SparseSequence<S>| -> Result<S> {
        let a = finite_norm(s, &src)?;
        Ok(if a.is_zero() {
            S::zero()
        } else {
            finite_norm(s, &dst)? / a
        })
    };
    let dist = distribute_even(w1, p1, j, nu0)?;
    let constructive = ratio(&dist.sequence)?;

    // Local search: start from the best of the balanced sequence and the
    // cube indicators, then accept random single-entry changes that help.
    let mut best_seq = dist.sequence.clone();
    let mut best = constructive;
    let mut label = format!("balanced 0/1 sequence with {} ones in Q_(-{nu0},0)", dist.n0);
    for nu in 0..=j {
        let ind = indicator(dim, nu)?;
        let r = ratio(&ind)?;
        if r > best {
            best = r;
            best_seq = ind;
            label = format!("indicator of Q_(-{nu},0)");
        }
    }
    let cells = unit_cubes_in(&DyadicCube::at_origin(dim, j), DISTRIBUTION_BUDGET)?;
    let mut rng = ChaCha8Rng::seed_from_u64(search.seed);
    let mut improved = false;
    for _ in 0..search.iterations {
        let k: &LatticePoint = &cells[rng.random_range(0..cells.len())];
        let old = best_seq.get(k);
        let new = match rng.random_range(0..4u8) {
            0 => S::zero(),
            1 => S::one(),
            2 => old * S::of(rng.random_range(0.5..1.5)),
            _ => S::of(rng.random_range(0.0..1.0)),
        };
        let mut cand = best_seq.clone();
        cand.set(k.clone(), new)?;
        if cand.is_empty() {
            continue;
        }
        let r = ratio(&cand)?;
        if r > best {
            best = r;
            best_seq = cand;
            improved = true;
        }
    }
    if improved {
        label = format!("local search ({} iterations, seed {})", search.iterations, search.seed);
    }
    Ok(OperatorNormResult {
        exact: None,
        lower: best,
        upper,
        constructive_lower: constructive,
        regime: Regime::P1LtP2,
        nu0,
        achieved_constant: Some(dist.achieved_constant),
        achieved_by: label,
    })
}

//! Brute-force reference computations for small instances.
//!
//! Nothing here calls into `norms` or `finite_dim`: weight values are read
//! straight from the stored head and tail, cubes are found by plain integer
//! division and membership is tested with the defining inequality
//! `2^j m_i ≤ k_i < 2^j (m_i + 1)`. The point is to disagree with the fast
//! code whenever the fast code is wrong.

use std::collections::BTreeSet;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::lattice::{unit_cubes_in, DyadicCube, LatticePoint};
use crate::scalar::Real;
use crate::sequence::SparseSequence;
use crate::weights::{SpaceParams, Weight};

#[derive(Clone, Debug, PartialEq)]
pub struct OracleConfig {
    /// Levels enumerated explicitly; must reach the level at which each
    /// occupied orthant of the support lies in one cube.
    pub j_max: u32,
    /// Largest number of indicator subsets searched exhaustively.
    pub subset_budget: u128,
    pub random_trials: usize,
    pub seed: u64,
}

impl Default for OracleConfig {
    fn default() -> Self {
        OracleConfig {
            j_max: 8,
            subset_budget: 1 << 16,
            random_trials: 2000,
            seed: 0,
        }
    }
}

/// Best indicator found by [`oracle_opnorm_indicators`].
#[derive(Clone, Debug, PartialEq)]
pub struct IndicatorSearch<S> {
    pub value: S,
    pub exhaustive: bool,
    pub best_subset: Vec<LatticePoint>,
}

fn phi<S: Real>(w: &Weight<S>, j: u64) -> S {
    let head = w.head();
    let k = head.len() as u64 - 1;
    if j <= k {
        head[j as usize]
    } else {
        head[k as usize] * S::two().powf(S::of_u64(j - k) * w.tail_exponent())
    }
}

fn prefactor<S: Real>(w: &Weight<S>, p: S, j: u64) -> S {
    let d = S::of_u64(w.dim() as u64);
    phi(w, j) / S::two().powf(S::of_u64(j) * d / p)
}

fn cube_of(k: &LatticePoint, j: u32) -> Vec<i128> {
    k.coords()
        .iter()
        .map(|&c| {
            if j >= 127 {
                if c < 0 {
                    -1
                } else {
                    0
                }
            } else {
                c.div_euclid(1i128 << j)
            }
        })
        .collect()
}

fn inside(k: &LatticePoint, j: u32, m: &[i128]) -> bool {
    if j >= 127 {
        return k.coords().iter().zip(m).all(|(&c, &mi)| (c < 0) == (mi < 0));
    }
    let side = 1i128 << j;
    k.coords().iter().zip(m).all(|(&c, &mi)| {
        let lo = mi.checked_mul(side);
        let hi = (mi + 1).checked_mul(side);
        lo.map_or(mi < 0, |lo| lo <= c) && hi.map_or(mi >= 0, |hi| c < hi)
    })
}

fn cube_value<S: Real>(seq: &SparseSequence<S>, w: &Weight<S>, p: S, j: u32, m: &[i128]) -> S {
    let mut sum = S::zero();
    for (k, v) in seq.iter() {
        if inside(k, j, m) {
            sum = sum + v.abs().powf(p);
        }
    }
    prefactor(w, p, j as u64) * sum.powf(S::one() / p)
}

/// The Morrey norm by direct enumeration of every cube meeting the support
/// on levels `0..=max(j_max, K)`, plus the closed-form tail beyond.
pub fn oracle_norm<S: Real>(seq: &SparseSequence<S>, params: &SpaceParams<S>, config: &OracleConfig) -> Result<S> {
    let w = &params.weight;
    let p = params.p;
    if seq.dim() != w.dim() {
        return Err(Error::DimensionMismatch {
            expected: w.dim(),
            got: seq.dim(),
        });
    }
    if seq.is_empty() {
        return Ok(S::zero());
    }
    let top = (config.j_max as u64).max(w.head().len() as u64 - 1);
    if top > 126 {
        return Err(Error::LevelTooLarge {
            level: top as u32,
            max: 126,
        });
    }
    let top = top as u32;
    let mut best = S::zero();
    for j in 0..=top {
        let cubes: BTreeSet<Vec<i128>> = seq.support().map(|k| cube_of(k, j)).collect();
        for m in &cubes {
            best = best.max(cube_value(seq, w, p, j, m));
        }
    }
    let cubes: BTreeSet<Vec<i128>> = seq.support().map(|k| cube_of(k, top)).collect();
    let orthants: BTreeSet<Vec<bool>> = seq
        .support()
        .map(|k| k.coords().iter().map(|&c| c < 0).collect())
        .collect();
    if cubes.len() != orthants.len() {
        return Err(Error::InvalidParameter(format!(
            "oracle depth {top} does not reach the level where the support coalesces"
        )));
    }
    let d = S::of_u64(w.dim() as u64);
    let last = *w.head().last().unwrap();
    if !last.is_zero() && w.tail_exponent() > d / p {
        return Ok(S::infinity());
    }
    // Beyond `top` the masses are frozen and the prefactor does not grow.
    for m in cubes
        .iter()
        .map(|m| m.iter().map(|&c| c.div_euclid(2)).collect::<Vec<_>>())
    {
        best = best.max(cube_value(seq, w, p, top + 1, &m));
    }
    Ok(best)
}

/// Finite-dimensional norm on `Q_{−j,0}`, values given on the points of
/// `cells` (the unit cubes of `Q_{−j,0}` in enumeration order).
fn finite_value<S: Real>(vals: &[S], cells: &[LatticePoint], subcubes: &[(u32, Vec<i128>)], w: &Weight<S>, p: S) -> S {
    let mut best = S::zero();
    for (nu, m) in subcubes {
        let mut sum = S::zero();
        for (k, v) in cells.iter().zip(vals) {
            if !v.is_zero() && inside(k, *nu, m) {
                sum = sum + v.abs().powf(p);
            }
        }
        best = best.max(prefactor(w, p, *nu as u64) * sum.powf(S::one() / p));
    }
    best
}

/// Unit cells of `Q_{−j,0}` and every dyadic sub-cube as `(level, corner)`.
type Layout = (Vec<LatticePoint>, Vec<(u32, Vec<i128>)>);

fn layout(dim: u32, j: u32, budget: u128) -> Result<Layout> {
    let cells = unit_cubes_in(&DyadicCube::at_origin(dim, j), budget)?;
    let mut subcubes = Vec::new();
    for nu in 0..=j {
        for m in unit_cubes_in(&DyadicCube::at_origin(dim, j - nu), budget)? {
            subcubes.push((nu, m.coords().to_vec()));
        }
    }
    Ok((cells, subcubes))
}

/// Largest `‖1_E | m_{φ₂,p₂}‖ / ‖1_E | m_{φ₁,p₁}‖` over non-empty sets `E`
/// of unit cubes in `Q_{−j,0}`. Exhaustive when all `2^{2^{jd}}` subsets fit
/// the budget, otherwise over seeded random subsets.
pub fn oracle_opnorm_indicators<S: Real>(
    w1: &Weight<S>,
    p1: S,
    w2: &Weight<S>,
    p2: S,
    j: u32,
    config: &OracleConfig,
) -> Result<IndicatorSearch<S>> {
    let (cells, subcubes) = layout(w1.dim(), j, 1 << 20)?;
    let n = cells.len();
    let exhaustive = n < 127 && (1u128 << n) <= config.subset_budget;
    let mut best = S::zero();
    let mut best_mask: Vec<bool> = vec![false; n];
    let mut try_mask = |mask: &[bool]| {
        if !mask.iter().any(|&b| b) {
            return;
        }
        let vals: Vec<S> = mask.iter().map(|&b| if b { S::one() } else { S::zero() }).collect();
        let r = finite_value(&vals, &cells, &subcubes, w2, p2) / finite_value(&vals, &cells, &subcubes, w1, p1);
        if r > best {
            best = r;
            best_mask = mask.to_vec();
        }
    };
    if exhaustive {
        for bits in 1u128..(1u128 << n) {
            let mask: Vec<bool> = (0..n).map(|i| (bits >> i) & 1 == 1).collect();
            try_mask(&mask);
        }
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
        for _ in 0..config.random_trials {
            let density: f64 = rng.random_range(0.0..1.0);
            let mask: Vec<bool> = (0..n).map(|_| rng.random_bool(density)).collect();
            try_mask(&mask);
        }
    }
    let best_subset = cells
        .iter()
        .zip(&best_mask)
        .filter(|(_, &b)| b)
        .map(|(k, _)| k.clone())
        .collect();
    Ok(IndicatorSearch {
        value: best,
        exhaustive,
        best_subset,
    })
}

/// Largest norm ratio found over seeded random signed sequences on
/// `Q_{−j,0}`: random supports with random magnitudes spread over several
/// orders. A lower bound for `‖id_j‖`.
pub fn oracle_opnorm_random<S: Real>(
    w1: &Weight<S>,
    p1: S,
    w2: &Weight<S>,
    p2: S,
    j: u32,
    config: &OracleConfig,
) -> Result<S> {
    let (cells, subcubes) = layout(w1.dim(), j, 1 << 20)?;
    let n = cells.len();
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed ^ 0x5eed);
    let mut best = S::zero();
    for _ in 0..config.random_trials {
        let density: f64 = rng.random_range(0.05..1.0);
        let spread: f64 = rng.random_range(0.0..4.0);
        let vals: Vec<S> = (0..n)
            .map(|_| {
                if rng.random_bool(density) {
                    let mag = 2f64.powf(-spread * rng.random_range(0.0..1.0));
                    S::of(if rng.random_bool(0.5) { mag } else { -mag })
                } else {
                    S::zero()
                }
            })
            .collect();
        if vals.iter().all(|v| v.is_zero()) {
            continue;
        }
        let r = finite_value(&vals, &cells, &subcubes, w2, p2) / finite_value(&vals, &cells, &subcubes, w1, p1);
        best = best.max(r);
    }
    Ok(best)
}

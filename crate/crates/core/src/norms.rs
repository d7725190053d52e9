//! Exact Morrey norms of finitely supported sequences, plus `ℓ_p`, `ℓ_∞`,
//! Lorentz norms and the non-increasing rearrangement.
//!
//! `‖λ | m_{φ,p}‖ = sup_{j, m} φ(2^j) 2^{−jd/p} (Σ_{k ∈ Q_{−j,m}} |λ_k|^p)^{1/p}`.
//!
//! For a finite support the supremum over infinitely many levels reduces to
//! a finite search. Once every occupied orthant sits in a single cube (the
//! coalescence level `J*`) the cube masses stop changing, and past the last
//! head level `K` the prefactor is geometric with ratio `2^{e − d/p}`. So
//! levels `0..=max(J*, K)` carry the supremum when `e ≤ d/p`, and the norm
//! is infinite otherwise.

use std::collections::BTreeMap;
use std::ops::ControlFlow;

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::lattice::{coalescence_level, DyadicCube, LatticePoint};
use crate::scalar::{ge_tol, Real};
use crate::sequence::SparseSequence;
use crate::weights::{SpaceParams, Weight};

/// Where the supremum in a Morrey norm is attained.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Attainment {
    /// First cube (smallest level, then smallest corner) realising the value.
    Cube(DyadicCubeRecord),
    /// The norm is infinite because the scaled weight grows geometrically.
    TailDivergence,
    /// The sequence is zero.
    EmptySupport,
}

/// Serializable form of a [`DyadicCube`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DyadicCubeRecord {
    pub level: u32,
    pub corner: Vec<String>,
}

impl From<&DyadicCube> for DyadicCubeRecord {
    fn from(c: &DyadicCube) -> Self {
        DyadicCubeRecord {
            level: c.level,
            corner: c.corner.coords().iter().map(|x| x.to_string()).collect(),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct NormResult<S> {
    pub value: S,
    pub attaining_cube: Option<DyadicCube>,
    pub tail_divergence: bool,
}

impl<S: Real> NormResult<S> {
    pub fn attainment(&self) -> Attainment {
        match (&self.attaining_cube, self.tail_divergence) {
            (_, true) => Attainment::TailDivergence,
            (Some(c), false) => Attainment::Cube(c.into()),
            (None, false) => Attainment::EmptySupport,
        }
    }
}

/// Support points with their `|λ_k|^p`, sorted by decreasing magnitude so
/// that every cube sum is accumulated largest-first.
fn powered_entries<S: Real>(seq: &SparseSequence<S>, p: S) -> Vec<(&LatticePoint, S)> {
    let mut v: Vec<(&LatticePoint, S)> = seq.iter().map(|(k, x)| (k, x.abs())).collect();
    v.sort_by(|a, b| b.1.partial_cmp(&a.1).unwrap().then_with(|| a.0.cmp(b.0)));
    for e in v.iter_mut() {
        e.1 = e.1.powf(p);
    }
    v
}

/// `Σ |λ_k|^p` per level-`level` cube meeting the support.
pub fn cube_masses<S: Real>(seq: &SparseSequence<S>, p: S, level: u32) -> BTreeMap<DyadicCube, S> {
    masses_from(&powered_entries(seq, p), level)
}

fn masses_from<S: Real>(entries: &[(&LatticePoint, S)], level: u32) -> BTreeMap<DyadicCube, S> {
    let mut out: BTreeMap<DyadicCube, S> = BTreeMap::new();
    for (k, a) in entries {
        let e = out.entry(k.ancestor(level)).or_insert_with(S::zero);
        *e = *e + *a;
    }
    out
}

/// Calls `f(value, cube)` for every cube that can carry the supremum, in
/// (level, corner) order.
fn visit_candidates<S: Real, B>(
    entries: &[(&LatticePoint, S)],
    weight: &Weight<S>,
    p: S,
    mut f: impl FnMut(S, &DyadicCube) -> ControlFlow<B>,
) -> Option<B> {
    let support: Vec<&LatticePoint> = entries.iter().map(|e| e.0).collect();
    let j_star = coalescence_level(support.iter().copied());
    let last = (weight.last_level()).max(j_star as u64);
    let inv_p = S::one() / p;
    let mut frozen: Vec<(DyadicCube, S)> = Vec::new();
    for j in 0..=last {
        let pre = weight.scaled(j, p);
        if j <= j_star as u64 {
            let masses = masses_from(entries, j as u32);
            for (cube, m) in &masses {
                if let ControlFlow::Break(b) = f(pre * m.powf(inv_p), cube) {
                    return Some(b);
                }
            }
            if j == j_star as u64 {
                frozen = masses.into_iter().collect();
            }
        } else {
            // Same groups as at J*, only the corners move up.
            let mut cubes: Vec<(DyadicCube, S)> = frozen
                .iter()
                .map(|(c, m)| (c.corner.ancestor((j - j_star as u64) as u32).corner, *m))
                .map(|(corner, m)| {
                    (
                        DyadicCube {
                            level: j.min(u32::MAX as u64) as u32,
                            corner,
                        },
                        m,
                    )
                })
                .collect();
            cubes.sort_by(|a, b| a.0.cmp(&b.0));
            for (cube, m) in &cubes {
                if let ControlFlow::Break(b) = f(pre * m.powf(inv_p), cube) {
                    return Some(b);
                }
            }
        }
    }
    None
}

/// `‖λ | m_{φ,p}‖` with the first cube attaining it.
pub fn norm_mps<S: Real>(seq: &SparseSequence<S>, params: &SpaceParams<S>) -> Result<NormResult<S>> {
    seq.check_dim(params.dim())?;
    let weight = &params.weight;
    let p = params.p;
    if seq.is_empty() {
        return Ok(NormResult {
            value: S::zero(),
            attaining_cube: None,
            tail_divergence: false,
        });
    }
    if !weight.is_nontrivial(p) {
        return Ok(NormResult {
            value: S::infinity(),
            attaining_cube: None,
            tail_divergence: true,
        });
    }
    let entries = powered_entries(seq, p);
    let mut best = S::zero();
    visit_candidates::<S, ()>(&entries, weight, p, |v, _| {
        best = best.max(v);
        ControlFlow::Continue(())
    });
    let cube = visit_candidates(&entries, weight, p, |v, c| {
        if ge_tol(v, best) {
            ControlFlow::Break(c.clone())
        } else {
            ControlFlow::Continue(())
        }
    });
    Ok(NormResult {
        value: best,
        attaining_cube: cube,
        tail_divergence: false,
    })
}

/// `(Σ |λ_k|^p)^{1/p}`.
pub fn norm_lp<S: Real>(seq: &SparseSequence<S>, p: S) -> S {
    if p.is_infinite() {
        return norm_linf(seq);
    }
    let sum: S = powered_entries(seq, p).into_iter().map(|e| e.1).sum();
    sum.powf(S::one() / p)
}

/// `max |λ_k|`.
pub fn norm_linf<S: Real>(seq: &SparseSequence<S>) -> S {
    seq.iter().map(|(_, v)| v.abs()).fold(S::zero(), S::max)
}

/// `λ*`: absolute values in non-increasing order, one per support point.
pub fn rearrangement<S: Real>(seq: &SparseSequence<S>) -> Vec<S> {
    let mut v: Vec<S> = seq.iter().map(|(_, x)| x.abs()).collect();
    v.sort_by(|a, b| b.partial_cmp(a).unwrap());
    v
}

/// `‖λ | ℓ_{p,q}‖ = (Σ_ν ν^{q/p − 1} (λ*_ν)^q)^{1/q}`, or
/// `sup_ν ν^{1/p} λ*_ν` for `q = ∞`.
pub fn norm_lorentz<S: Real>(seq: &SparseSequence<S>, p: S, q: S) -> S {
    let star = rearrangement(seq);
    if q.is_infinite() {
        star.iter()
            .enumerate()
            .map(|(i, x)| S::of_u64(i as u64 + 1).powf(S::one() / p) * *x)
            .fold(S::zero(), S::max)
    } else {
        let sum: S = star
            .iter()
            .enumerate()
            .map(|(i, x)| S::of_u64(i as u64 + 1).powf(q / p - S::one()) * x.powf(q))
            .sum();
        sum.powf(S::one() / q)
    }
}

/// `C(p, r) = (1 − p/r)^{−1/p}` for `0 < p < r < ∞`: the supremum over `N`
/// of `N^{1/r − 1/p} (Σ_{ν ≤ N} ν^{−p/r})^{1/p}`, approached as `N → ∞`
/// (compare the sum with `∫_0^N x^{−p/r} dx`).
///
/// With it, `‖λ | m_{φ,p}‖ ≤ C ‖λ | ℓ_{r,∞}‖` whenever `φ(1) = 1` and
/// `φ ∈ G_r`, in particular for `r = r_φ`.
pub fn lorentz_constant<S: Real>(p: S, r: S) -> S {
    (S::one() - p / r).powf(-S::one() / p)
}

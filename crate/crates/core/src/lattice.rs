//! Dyadic-cube geometry on `Z^d`.
//!
//! A lattice point `k` stands for the unit cube `Q_{0,k} = [0,1)^d + k`, and
//! a [`DyadicCube`] of level `j` with corner `m` stands for
//! `Q_{-j,m} = 2^j([0,1)^d + m)`, which holds exactly `2^{jd}` unit cubes.
//! Everything here is exact integer arithmetic.
//!
//! Coordinates are `i128`. Floor division by `2^j` is an arithmetic shift,
//! and for every `j >= 127` the shift already collapses each coordinate to
//! `0` or `-1`, which is the correct ancestor for all larger levels too, so
//! ancestors are defined for every `u32` level without overflow.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::error::{Error, Result};

/// Largest level whose cubes can still be told apart on the `i128` lattice.
/// Beyond it every ancestor is one of the `2^d` orthant cubes.
pub const MAX_LEVEL: u32 = 127;

/// Default cap on the number of unit cubes an enumeration may produce.
pub const DEFAULT_ENUMERATION_BUDGET: u128 = 1 << 24;

fn shift(c: i128, level: u32) -> i128 {
    c >> level.min(MAX_LEVEL)
}

/// Index `k` of the unit cube `Q_{0,k}`.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct LatticePoint(Vec<i128>);

impl LatticePoint {
    pub fn new(coords: Vec<i128>) -> Self {
        assert!(!coords.is_empty(), "lattice dimension must be at least 1");
        LatticePoint(coords)
    }

    pub fn origin(dim: u32) -> Self {
        LatticePoint(vec![0; dim as usize])
    }

    /// `(x, 0, ..., 0)`.
    pub fn on_first_axis(dim: u32, x: i128) -> Self {
        let mut c = vec![0; dim as usize];
        c[0] = x;
        LatticePoint(c)
    }

    pub fn dim(&self) -> u32 {
        self.0.len() as u32
    }

    pub fn coords(&self) -> &[i128] {
        &self.0
    }

    /// Sign pattern of the point: `true` for coordinates `< 0`.
    pub fn orthant(&self) -> Vec<bool> {
        self.0.iter().map(|&c| c < 0).collect()
    }

    /// The unique level-`level` dyadic cube containing `Q_{0,self}`.
    pub fn ancestor(&self, level: u32) -> DyadicCube {
        DyadicCube {
            level,
            corner: LatticePoint(self.0.iter().map(|&c| shift(c, level)).collect()),
        }
    }
}

impl fmt::Debug for LatticePoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for LatticePoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, c) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, ")")
    }
}

impl From<Vec<i128>> for LatticePoint {
    fn from(v: Vec<i128>) -> Self {
        LatticePoint::new(v)
    }
}

impl<const N: usize> From<[i128; N]> for LatticePoint {
    fn from(v: [i128; N]) -> Self {
        LatticePoint::new(v.to_vec())
    }
}

/// The dyadic cube `Q_{-level, corner}`.
///
/// Ordering is by level, then lexicographically by corner; the norm
/// routines rely on this for their tie-break.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct DyadicCube {
    pub level: u32,
    pub corner: LatticePoint,
}

impl DyadicCube {
    pub fn new(level: u32, corner: impl Into<LatticePoint>) -> Self {
        DyadicCube {
            level,
            corner: corner.into(),
        }
    }

    /// `Q_{-level, 0}`.
    pub fn at_origin(dim: u32, level: u32) -> Self {
        DyadicCube {
            level,
            corner: LatticePoint::origin(dim),
        }
    }

    pub fn dim(&self) -> u32 {
        self.corner.dim()
    }

    /// Number of unit cubes, `2^{jd}`, or `None` when it does not fit in `u128`.
    pub fn volume(&self) -> Option<u128> {
        let bits = self.level as u64 * self.dim() as u64;
        (bits < 128).then(|| 1u128 << bits)
    }

    /// Whether `Q_{0,point} ⊂ self`, i.e. `2^j m_i <= k_i < 2^j (m_i + 1)`.
    pub fn contains(&self, point: &LatticePoint) -> bool {
        point.dim() == self.dim() && point.ancestor(self.level).corner == self.corner
    }

    /// Whether `other ⊆ self`.
    pub fn contains_cube(&self, other: &DyadicCube) -> bool {
        other.dim() == self.dim()
            && other.level <= self.level
            && other.corner.ancestor(self.level - other.level).corner == self.corner
    }

    /// Parent cube one level up.
    pub fn parent(&self) -> DyadicCube {
        DyadicCube {
            level: self.level + 1,
            corner: self.corner.ancestor(1).corner,
        }
    }

    /// The `2^d` sub-cubes one level down, in lexicographic corner order.
    /// Empty for unit cubes.
    pub fn children(&self) -> Vec<DyadicCube> {
        if self.level == 0 {
            return Vec::new();
        }
        let d = self.dim() as usize;
        let base: Vec<i128> = self.corner.0.iter().map(|&m| m * 2).collect();
        (0..(1usize << d))
            .map(|mask| {
                // Lexicographic: the first coordinate is the most significant bit.
                let corner = (0..d).map(|i| base[i] + ((mask >> (d - 1 - i)) & 1) as i128).collect();
                DyadicCube {
                    level: self.level - 1,
                    corner: LatticePoint(corner),
                }
            })
            .collect()
    }

    /// Lexicographically smallest unit cube inside `self`.
    pub fn first_point(&self) -> LatticePoint {
        LatticePoint(self.corner.0.iter().map(|&m| m << self.level.min(MAX_LEVEL)).collect())
    }
}

impl fmt::Debug for DyadicCube {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for DyadicCube {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Q_{{-{},{}}}", self.level, self.corner)
    }
}

/// All unit cubes `k` with `Q_{0,k} ⊂ cube`, in lexicographic order.
pub fn unit_cubes_in(cube: &DyadicCube, budget: u128) -> Result<Vec<LatticePoint>> {
    let count = cube.volume().ok_or(Error::BudgetExceeded {
        needed: u128::MAX,
        budget,
    })?;
    if count > budget {
        return Err(Error::BudgetExceeded { needed: count, budget });
    }
    let side = 1i128 << cube.level;
    let lo = cube.first_point();
    let d = cube.dim() as usize;
    let mut out = Vec::with_capacity(count as usize);
    let mut offs = vec![0i128; d];
    loop {
        out.push(LatticePoint(lo.0.iter().zip(&offs).map(|(a, b)| a + b).collect()));
        // Odometer increment, last coordinate fastest.
        let mut i = d;
        loop {
            if i == 0 {
                return Ok(out);
            }
            i -= 1;
            offs[i] += 1;
            if offs[i] < side {
                break;
            }
            offs[i] = 0;
        }
    }
}

/// Partition of a finite support by level-`level` ancestor. Cubes that do
/// not meet the support are absent.
pub fn group_support_by_level<'a, I>(support: I, level: u32) -> BTreeMap<DyadicCube, Vec<LatticePoint>>
where
    I: IntoIterator<Item = &'a LatticePoint>,
{
    let mut groups: BTreeMap<DyadicCube, Vec<LatticePoint>> = BTreeMap::new();
    for p in support {
        groups.entry(p.ancestor(level)).or_default().push(p.clone());
    }
    groups
}

/// Smallest level at which every occupied orthant of the support sits in a
/// single dyadic cube. From that level on the partition of the support by
/// ancestors no longer changes (dyadic cubes never straddle a coordinate
/// hyperplane through 0, so parts from different orthants never merge).
///
/// Returns 0 for an empty support.
pub fn coalescence_level<'a, I>(support: I) -> u32
where
    I: IntoIterator<Item = &'a LatticePoint>,
{
    // Per orthant, coordinate-wise min and max.
    let mut boxes: BTreeMap<Vec<bool>, (Vec<i128>, Vec<i128>)> = BTreeMap::new();
    for p in support {
        let e = boxes.entry(p.orthant()).or_insert_with(|| (p.0.clone(), p.0.clone()));
        for (i, &c) in p.0.iter().enumerate() {
            e.0[i] = e.0[i].min(c);
            e.1[i] = e.1[i].max(c);
        }
    }
    let mut level = 0;
    for (lo, hi) in boxes.values() {
        for (&a, &b) in lo.iter().zip(hi) {
            // a and b have the same sign, so their floors by 2^j meet at
            // the bit length of a XOR b.
            let x = a ^ b;
            let j = 128 - x.leading_zeros();
            level = level.max(j);
        }
    }
    level
}

/// Distinct orthants (sign patterns) occupied by the support.
pub fn occupied_orthants<'a, I>(support: I) -> BTreeSet<Vec<bool>>
where
    I: IntoIterator<Item = &'a LatticePoint>,
{
    support.into_iter().map(LatticePoint::orthant).collect()
}

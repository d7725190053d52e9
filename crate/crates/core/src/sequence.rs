//! Finitely supported sequences on `Z^d`.

use std::collections::BTreeMap;

use serde::de::Error as _;
use serde::ser::SerializeSeq;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use serde_json::value::RawValue;

use crate::error::{Error, Result};
use crate::lattice::LatticePoint;
use crate::scalar::Real;

/// A finitely supported map `Z^d → R`. Zero entries are never stored.
#[derive(Clone, Debug, PartialEq)]
pub struct SparseSequence<S> {
    dim: u32,
    entries: BTreeMap<LatticePoint, S>,
}

impl<S: Real> SparseSequence<S> {
    pub fn new(dim: u32) -> Self {
        assert!(dim >= 1, "lattice dimension must be at least 1");
        SparseSequence {
            dim,
            entries: BTreeMap::new(),
        }
    }

    /// Builds a sequence from `(point, value)` pairs; later pairs overwrite
    /// earlier ones at the same point.
    pub fn from_entries<I>(dim: u32, entries: I) -> Result<Self>
    where
        I: IntoIterator<Item = (LatticePoint, S)>,
    {
        if dim == 0 {
            return Err(Error::InvalidParameter("dimension must be at least 1".into()));
        }
        let mut s = SparseSequence::new(dim);
        for (k, v) in entries {
            s.set(k, v)?;
        }
        Ok(s)
    }

    /// 1-d convenience constructor.
    pub fn from_1d<I: IntoIterator<Item = (i128, S)>>(entries: I) -> Self {
        let mut s = SparseSequence::new(1);
        for (k, v) in entries {
            s.set(LatticePoint::from([k]), v).expect("finite 1-d entry");
        }
        s
    }

    pub fn set(&mut self, k: LatticePoint, v: S) -> Result<()> {
        if k.dim() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: k.dim(),
            });
        }
        if !v.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "sequence value {v} at {k} is not finite"
            )));
        }
        if v.is_zero() {
            self.entries.remove(&k);
        } else {
            self.entries.insert(k, v);
        }
        Ok(())
    }

    pub fn get(&self, k: &LatticePoint) -> S {
        self.entries.get(k).copied().unwrap_or_else(S::zero)
    }

    pub fn dim(&self) -> u32 {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn support(&self) -> impl Iterator<Item = &LatticePoint> {
        self.entries.keys()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&LatticePoint, S)> {
        self.entries.iter().map(|(k, v)| (k, *v))
    }

    pub fn scaled(&self, c: S) -> Self {
        let mut out = SparseSequence::new(self.dim);
        if !c.is_zero() {
            for (k, v) in self.iter() {
                out.entries.insert(k.clone(), v * c);
            }
        }
        out
    }

    /// `self + c·other`.
    pub fn add_scaled(&self, other: &Self, c: S) -> Result<Self> {
        if other.dim != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: other.dim,
            });
        }
        let mut out = self.clone();
        for (k, v) in other.iter() {
            let sum = out.get(k) + c * v;
            out.set(k.clone(), sum)?;
        }
        Ok(out)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add_scaled(other, -S::one())
    }

    pub(crate) fn check_dim(&self, dim: u32) -> Result<()> {
        if self.dim == dim {
            Ok(())
        } else {
            Err(Error::DimensionMismatch {
                expected: dim,
                got: self.dim,
            })
        }
    }
}

struct Entry<'a, S>(&'a LatticePoint, S);

impl<S: Real> Serialize for Entry<'_, S> {
    fn serialize<Se: Serializer>(&self, s: Se) -> std::result::Result<Se::Ok, Se::Error> {
        let mut seq = s.serialize_seq(Some(self.0.coords().len() + 1))?;
        for c in self.0.coords() {
            seq.serialize_element(c)?;
        }
        seq.serialize_element(&self.1)?;
        seq.end()
    }
}

impl<S: Real> Serialize for SparseSequence<S> {
    fn serialize<Se: Serializer>(&self, s: Se) -> std::result::Result<Se::Ok, Se::Error> {
        #[derive(Serialize)]
        struct Repr<'a, S: Real> {
            dim: u32,
            entries: Vec<Entry<'a, S>>,
        }
        Repr {
            dim: self.dim,
            entries: self.iter().map(|(k, v)| Entry(k, v)).collect(),
        }
        .serialize(s)
    }
}

/// Rebuilds a sequence from the `entries` array of the JSON form, reading
/// coordinates from the raw text so that values beyond 64 bits survive.
pub fn from_raw_entries<S: Real>(
    dim: u32,
    entries: Vec<Vec<Box<RawValue>>>,
) -> std::result::Result<SparseSequence<S>, String> {
    if dim == 0 {
        return Err("dimension must be at least 1".into());
    }
    let mut out = SparseSequence::new(dim);
    for e in entries {
        if e.len() != dim as usize + 1 {
            return Err(format!(
                "entry has {} fields, expected {} coordinates and a value",
                e.len(),
                dim
            ));
        }
        let coords = e[..dim as usize]
            .iter()
            .map(|c| serde_json::from_str::<i128>(c.get()))
            .collect::<std::result::Result<Vec<_>, _>>()
            .map_err(|err| err.to_string())?;
        let v: S = serde_json::from_str(e[dim as usize].get()).map_err(|err| err.to_string())?;
        out.set(LatticePoint::new(coords), v).map_err(|err| err.to_string())?;
    }
    Ok(out)
}

impl<'de, S: Real> Deserialize<'de> for SparseSequence<S> {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Repr {
            dim: u32,
            entries: Vec<Vec<Box<RawValue>>>,
        }
        let r = Repr::deserialize(d)?;
        from_raw_entries(r.dim, r.entries).map_err(D::Error::custom)
    }
}

//! Generalised Morrey sequence spaces `m_{φ,p}(Z^d)`.
//!
//! Exact norms of finitely supported sequences, the weight classes `G_p`,
//! embedding and strict-singularity decisions, norms of the
//! finite-dimensional identities, and generators for extremal sequences
//! with checkable norm certificates.
//!
//! The numeric core is generic over [`scalar::Real`] (`f32` or `f64`); the
//! aliases at the crate root fix `f64`.
//!
//! ```
//! use morrey::norms::norm_mps;
//! use morrey::{SpaceParams, SparseSequence};
//!
//! // φ(t) = t^{1/2} on Z, p = 1.
//! let space = SpaceParams::power(1, 2.0, 1.0).unwrap();
//! let ind = SparseSequence::from_1d((0..4).map(|k| (k, 1.0)));
//! let r = norm_mps(&ind, &space).unwrap();
//! assert_eq!(r.value, 2.0);
//! assert_eq!(r.attaining_cube.unwrap().level, 2);
//! ```

// `!(x > 0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod embeddings;
pub mod error;
pub mod finite_dim;
pub mod lattice;
pub mod norms;
pub mod oracle;
pub mod scalar;
pub mod sequence;
pub mod weights;
pub mod witnesses;

pub use error::{Error, Result};
pub use lattice::{DyadicCube, LatticePoint};
pub use scalar::Real;

pub type Weight = weights::Weight<f64>;
pub type SpaceParams = weights::SpaceParams<f64>;
pub type SparseSequence = sequence::SparseSequence<f64>;
pub type NormResult = norms::NormResult<f64>;
pub type EmbeddingVerdict = embeddings::EmbeddingVerdict<f64>;
pub type OperatorNormResult = finite_dim::OperatorNormResult<f64>;
pub type FiniteSpaceParams = finite_dim::FiniteSpaceParams<f64>;
pub type WitnessBundle = witnesses::WitnessBundle<f64>;

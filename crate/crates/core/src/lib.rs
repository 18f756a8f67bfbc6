//! Structural physical approximations (SPAs) of positive maps.
//!
//! The crate builds positive maps and their entanglement witnesses, mixes them with
//! white noise until they become completely positive, certifies separability of the
//! resulting Choi operators with explicit product decompositions, and turns those
//! decompositions into measure-and-prepare channels.
//!
//! Module map:
//! - [`tensor`]: bipartite dense linear algebra (partial trace/transpose, flip, eigensolver).
//! - [`maps`]: Choi representation of maps and the catalog of named maps and witnesses.
//! - [`spa`]: noise admixture, critical probabilities, CP and trace-preservation tools.
//! - [`separability`]: PPT tests, product decompositions, search oracle, worked constructions.
//! - [`families`]: Werner, isotropic, `UŪVV` and unitary-symplectic invariant states.
//! - [`holevo`]: measure-and-prepare channels built from product decompositions.
//! - [`io`]: JSON exchange formats.

pub mod error;
pub mod families;
pub mod haar;
pub mod holevo;
pub mod io;
pub mod maps;
pub mod optimize;
pub mod separability;
pub mod spa;
pub mod tensor;

pub use error::{Error, Result};
pub use maps::{MapRep, UpbSpec};
pub use separability::ProductDecomposition;
pub use spa::SpaResult;
pub use tensor::{CMatrix, CVector, Dims, EigResult, HermitianOp, Subsystem, C64};

use rand::SeedableRng;

/// Deterministic generator used for every seeded routine in the crate.
pub type Rng = rand_chacha::ChaCha8Rng;

pub fn seeded_rng(seed: u64) -> Rng {
    Rng::seed_from_u64(seed)
}

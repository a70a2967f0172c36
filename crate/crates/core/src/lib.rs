//! Canonical form of two-qubit gates and constructive simulation circuits.
//!
//! The crate is split into four layers:
//!
//! * [`matcore`]: fixed-size complex matrices, Pauli exponentials, the magic
//!   basis and Haar sampling.
//! * [`canonical`]: KAK decomposition, Weyl chamber normalization, local
//!   invariants and mirror gates.
//! * [`synth`]: circuits of `n` applications of a controlled or super
//!   controlled gate interleaved with single-qubit layers that realize a
//!   requested two-qubit gate.
//! * [`verify`]: seeded brute-force oracles and property sweeps.

pub mod canonical;
pub mod error;
pub mod matcore;
pub mod synth;
pub mod verify;

pub use canonical::{
    is_locally_equivalent, kak, local_invariant, mirror_coords, mirror_of, weyl_normalize,
    CanonicalCoords, KakDecomposition, LocalInvariant, Normalized,
};
pub use error::{Error, Result};
pub use matcore::{
    canonical_gate, controlled_gate, distance_up_to_phase, haar_random_u2, haar_random_u4,
    rot_y, rot_z, tensor, LocalLayer, MagicBasis, Mat2, Mat4, Tolerances,
};
pub use synth::{BaseGate, Circuit, ComposeResult, Region};
pub use verify::{VerifyMode, VerifyReport};

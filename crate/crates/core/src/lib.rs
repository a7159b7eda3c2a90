//! Twirling channels and their minimal mixed-unitary decompositions.
//!
//! A channel `Φ` on `M_d` that projects onto the commutant of a unitary
//! representation is, after a change of basis, the block channel
//! `⊕_ℓ (𝟙_{M_{m_ℓ}} ⊗ Ω_{n_ℓ})`. Its Choi rank is `N = Σ n_ℓ²`, and an
//! explicit family of `N` unitaries with uniform weights reproduces it.
//!
//! - [`linalg`]: dense complex matrices and the numerical kernels used here.
//! - [`channel`]: Kraus channels, Choi matrices, decompositions.
//! - [`mud`]: the explicit construction and its verifier.
//! - [`complementary`]: complementary channels and the diagonal and trace-vector criteria.
//! - [`isotypic`]: randomized recovery of the block structure.
//! - [`twirls`]: symmetric-group, Weyl-group, permutation and Werner twirls.
//! - [`json`]: the JSON schema shared with the command-line tool.

pub mod channel;
pub mod complementary;
pub mod error;
pub mod isotypic;
pub mod json;
pub mod linalg;
pub mod mud;
pub mod twirls;

pub use channel::{
    as_channel, block_channel, channels_equal, depolarizing, identity_channel, Channel,
    MixedUnitaryDecomposition,
};
pub use error::{Error, Result};
pub use isotypic::{block_structure, twirl_decomposition, BlockStructure};
pub use linalg::{ComplexMatrix, C64, DEFAULT_TOL};
pub use mud::{minimal_decomposition, verify_decomposition, BlockSpec, VerificationReport};
pub use twirls::{FiniteGroupRep, Permutation};

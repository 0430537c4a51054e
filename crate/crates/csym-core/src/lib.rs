//! Deciding complex symmetry of finite-dimensional partial isometries.
//!
//! A conjugation is an antilinear, involutive isometry `C`; an operator `T`
//! is complex symmetric when `T = C T* C` for some conjugation. For a
//! partial isometry this is equivalent to complex symmetry of the
//! compression `A` of `T` to its initial space, and in the positive case a
//! certifying conjugation for the full operator can be assembled in closed
//! form from a certifying conjugation of `A` and the polar data of the
//! kernel block. This crate implements that pipeline:
//!
//! - [`linalg`]: the dense complex-matrix substrate (SVD, PSD square root,
//!   Haar sampling, nullspace extraction),
//! - [`conjugation`]: conjugations as symmetric unitary matrices acting by
//!   `C(x) = M·conj(x)`,
//! - [`partial_isometry`]: validation, the initial-space/kernel block
//!   decomposition, and the polar data of the kernel block,
//! - [`csm`]: detection of complex symmetry of the compression, witness
//!   synthesis, full certification, Aluthge transforms, unitary extension,
//!   and an independent optimization oracle.
//!
//! Everything is a pure function of its inputs; randomness is always driven
//! by explicit seeds, so all results are reproducible.

pub mod config;
pub mod conjugation;
pub mod csm;
pub mod error;
pub mod linalg;
pub mod matrix;
pub mod partial_isometry;
pub mod seeding;

pub use config::ToleranceConfig;
pub use conjugation::{c_symmetry_residual, Conjugation, PartialConjugation};
pub use csm::{
    aluthge, certify, lemma_zero_embed, lemma_zero_strip, oracle_uecsm, synthesize_conjugation,
    unitary_extension, Certificate, CertificateStatus, Detection, DetectionStatus, Obstruction,
};
pub use error::Error;
pub use matrix::{CMatrix, CVector, C64};
pub use partial_isometry::{
    block_decompose, essential_part, is_partial_isometry, kernel_dims, polar_of_b,
    random_partial_isometry, PartialIsometryBlocks, PolarOfB,
};

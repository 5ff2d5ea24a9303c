//! Finite-dimensional quantum information toolkit.
//!
//! The crate models observable algebras with classical and quantum tensor
//! factors, states and effects on them, completely positive channels with
//! their Kraus, Choi and Stinespring forms, entropic capacity bounds,
//! Bell-type correlation experiments and tight teleportation / dense coding
//! schemes.
//!
//! Numerical conventions used throughout:
//! * complex scalars are pairs of `f64`,
//! * entropies and capacities are in bits (base-2 logarithms),
//! * validation tolerance defaults to [`EPS_ALG`],
//! * spectral cutoffs are relative to the largest eigenvalue, see [`TAU_RANK`].

pub mod error;
pub mod matrix;
pub mod bell;
pub mod capacity;
pub mod channels;
pub mod random;
pub mod systems;
pub mod telepo;

/// Default algebraic validation tolerance. The CLI can override it through
/// the `QICHAN_TOL` environment variable.
pub const EPS_ALG: f64 = 1e-9;

/// Relative spectral cutoff deciding numerical rank.
pub const TAU_RANK: f64 = 1e-10;

/// Accuracy target of the iterative optimizers.
pub const DELTA_OPT: f64 = 1e-3;

/// Default number of optimizer restarts.
pub const RESTARTS_DEFAULT: usize = 32;

pub use error::{Error, Result};
pub use matrix::{c, cr, ComplexMatrix, C64};

//! Numerical tolerances used across the crate.
//!
//! Every quantity handled here is an O(1) probability, correlator, or matrix
//! element in f64, so absolute tolerances are meaningful. Identities that are
//! exact in real arithmetic (kernel composition, round trips) are held to
//! [`PROB_ATOL`]; quantities assembled from a 16-term trace accumulate a bit
//! more rounding and are held to [`JOINT_SUM_ATOL`].

/// Absolute tolerance for probability identities that are exact in real arithmetic.
pub const PROB_ATOL: f64 = 1e-12;

/// Absolute tolerance on the total mass of a 16-outcome distribution.
pub const JOINT_SUM_ATOL: f64 = 1e-10;

/// Entries of a measured joint distribution may round slightly negative.
/// Anything above this floor is clamped to zero; anything below is rejected.
pub const JOINT_ENTRY_FLOOR: f64 = -1e-12;

/// Eigenvalue floor for positive-semidefinite checks on user-supplied matrices
/// and on joint-measurement effects.
pub const EIGENVALUE_FLOOR: f64 = -1e-10;

/// Tolerance for Hermiticity, unit-trace, and unit-norm validation.
pub const MATRIX_ATOL: f64 = 1e-12;

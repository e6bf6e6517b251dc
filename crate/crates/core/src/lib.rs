//! Finite-sample statistics of CHSH Bell tests performed through a noisy
//! joint measurement.
//!
//! A single apparatus can measure commuting surrogates of all four CHSH
//! observables at once at the price of extra noise: each surrogate's marginal
//! is the exact one pushed through an unbiased two-point channel with accuracy
//! `gamma`, so means contract as `<K'> = gamma <K>`. That buys a full joint
//! statistics for the test variable `s' = x'u' - x'v' + y'u' + y'v'` beyond
//! its mean, and with it the probability that a finite run of `N` trials
//! violates the noise-adapted bound `|S'| <= 2 gamma^2`.
//!
//! Two equivalent treatments of the noise are implemented side by side:
//! adapt the bound (module [`stats`]), or undo the noise by inverting the
//! channels (module [`noise`]), where a Bell violation surfaces as negativity
//! of the reconstructed quasi-distribution. The [`quantum`] module realizes
//! the measurement as an explicit two-qubit product of effects to generate
//! honest 16-outcome data, [`monte_carlo`] validates the exact engine by
//! seeded simulation, and [`cli`] exposes everything as a command-line tool.

pub mod cli;
pub mod dist;
pub mod error;
pub mod monte_carlo;
pub mod noise;
pub mod quantum;
pub mod stats;
pub mod tol;

pub use error::{Error, Result};

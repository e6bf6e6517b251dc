//! Forward and inverse noise kernels for dichotomic observables.
//!
//! A noisy joint measurement replaces each observable `K` by a surrogate `K'`
//! whose marginal is the exact one pushed through an unbiased two-point
//! channel,
//!
//! ```text
//! p'(k') = sum_k  k(k'|k) p(k),      k(k'|k) = (1 + gamma k k') / 2,
//! ```
//!
//! with a per-observable accuracy factor `|gamma| <= 1`. Means contract as
//! `<K'> = gamma <K>`, and the channel is invertible for `gamma != 0` with the
//! sign-free weights `(1 + k k' / gamma) / 2`. Products of four single-variable
//! kernels transport full 16-outcome distributions in either direction.

use crate::dist::{BinaryDistribution, JointDistribution16, Outcome4, QuasiDistribution16, SignedBinaryDistribution};
use crate::error::{Error, Result};
use crate::tol::PROB_ATOL;

/// Per-observable accuracy factors of the noisy joint measurement.
///
/// `new` additionally enforces the within-party budget
/// `gamma_x^2 + gamma_y^2 <= 1` and `gamma_u^2 + gamma_v^2 <= 1` required by
/// positive joint-measurement realizations; `unconstrained` skips it for pure
/// kernel algebra (round trips, data inversion of recorded counts), where any
/// `|gamma| <= 1` yields a valid stochastic kernel.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GammaFactors {
    gamma_x: f64,
    gamma_y: f64,
    gamma_u: f64,
    gamma_v: f64,
}

fn check_range(gamma: f64) -> Result<()> {
    if !gamma.is_finite() || gamma.abs() > 1.0 {
        return Err(Error::GammaOutOfRange(gamma));
    }
    Ok(())
}

impl GammaFactors {
    /// Validates `|gamma_K| <= 1` for each factor and the within-party budget.
    pub fn new(gamma_x: f64, gamma_y: f64, gamma_u: f64, gamma_v: f64) -> Result<Self> {
        let factors = Self::unconstrained(gamma_x, gamma_y, gamma_u, gamma_v)?;
        if !factors.is_feasible() {
            let (a, b) = (gamma_x * gamma_x + gamma_y * gamma_y, gamma_u * gamma_u + gamma_v * gamma_v);
            return Err(Error::InfeasibleGammas(format!(
                "within-party budgets gamma_x^2+gamma_y^2 = {a}, gamma_u^2+gamma_v^2 = {b} exceed 1"
            )));
        }
        Ok(factors)
    }

    /// Validates only `|gamma_K| <= 1` per factor.
    pub fn unconstrained(gamma_x: f64, gamma_y: f64, gamma_u: f64, gamma_v: f64) -> Result<Self> {
        for g in [gamma_x, gamma_y, gamma_u, gamma_v] {
            check_range(g)?;
        }
        Ok(Self { gamma_x, gamma_y, gamma_u, gamma_v })
    }

    /// The equal-noise convention: all four factors set to `gamma`.
    ///
    /// Built without the within-party budget so that kernel-level round trips
    /// can use any `|gamma| <= 1`; a joint-measurement realization will still
    /// reject the factors if its effects fail positivity.
    pub fn equal(gamma: f64) -> Result<Self> {
        Self::unconstrained(gamma, gamma, gamma, gamma)
    }

    pub fn gamma_x(&self) -> f64 {
        self.gamma_x
    }

    pub fn gamma_y(&self) -> f64 {
        self.gamma_y
    }

    pub fn gamma_u(&self) -> f64 {
        self.gamma_u
    }

    pub fn gamma_v(&self) -> f64 {
        self.gamma_v
    }

    /// Factors in `(X, Y, U, V)` order.
    pub fn as_array(&self) -> [f64; 4] {
        [self.gamma_x, self.gamma_y, self.gamma_u, self.gamma_v]
    }

    /// True when the within-party budgets hold (up to rounding).
    pub fn is_feasible(&self) -> bool {
        let a = self.gamma_x * self.gamma_x + self.gamma_y * self.gamma_y;
        let b = self.gamma_u * self.gamma_u + self.gamma_v * self.gamma_v;
        a <= 1.0 + PROB_ATOL && b <= 1.0 + PROB_ATOL
    }

    /// True when all four factors coincide exactly.
    pub fn is_equal(&self) -> bool {
        self.gamma_x == self.gamma_y && self.gamma_y == self.gamma_u && self.gamma_u == self.gamma_v
    }

    /// The common factor under the equal-noise convention, or an error when
    /// the factors differ.
    pub fn as_equal(&self) -> Result<f64> {
        if self.is_equal() {
            Ok(self.gamma_x)
        } else {
            Err(Error::Domain(format!(
                "equal gamma factors required, got {:?}",
                self.as_array()
            )))
        }
    }
}

fn check_sign(kappa: i8) -> Result<f64> {
    match kappa {
        1 => Ok(1.0),
        -1 => Ok(-1.0),
        other => Err(Error::InvalidOutcome(other)),
    }
}

/// Forward channel weight `k(kappa'|kappa) = (1 + gamma kappa kappa') / 2`.
pub fn forward_kernel(gamma: f64, kappa: i8, kappa_prime: i8) -> Result<f64> {
    check_range(gamma)?;
    let k = check_sign(kappa)?;
    let kp = check_sign(kappa_prime)?;
    Ok(0.5 * (1.0 + gamma * k * kp))
}

/// Inverse channel weight `(1 + kappa kappa' / gamma) / 2`; may be negative or
/// exceed one. Singular at `gamma = 0`.
pub fn inverse_kernel(gamma: f64, kappa: i8, kappa_prime: i8) -> Result<f64> {
    check_range(gamma)?;
    if gamma == 0.0 {
        return Err(Error::SingularInversion);
    }
    let k = check_sign(kappa)?;
    let kp = check_sign(kappa_prime)?;
    Ok(0.5 * (1.0 + k * kp / gamma))
}

/// Pushes an exact single-observable marginal through the forward channel.
/// The mean contracts as `<K'> = gamma <K>`.
pub fn apply_noise(marginal: &BinaryDistribution, gamma: f64) -> Result<BinaryDistribution> {
    check_range(gamma)?;
    let p_plus = forward_kernel(gamma, 1, 1)? * marginal.p_plus()
        + forward_kernel(gamma, -1, 1)? * marginal.p_minus();
    let p_minus = forward_kernel(gamma, 1, -1)? * marginal.p_plus()
        + forward_kernel(gamma, -1, -1)? * marginal.p_minus();
    BinaryDistribution::new(p_plus, p_minus)
}

/// Recovers the exact marginal from a noisy one. Composing with
/// [`apply_noise`] is the identity; the output sums to one but may carry
/// negative weight when the data admit no bona fide preimage.
pub fn invert_marginal(noisy: &BinaryDistribution, gamma: f64) -> Result<SignedBinaryDistribution> {
    let q_plus = inverse_kernel(gamma, 1, 1)? * noisy.p_plus()
        + inverse_kernel(gamma, 1, -1)? * noisy.p_minus();
    let q_minus = inverse_kernel(gamma, -1, 1)? * noisy.p_plus()
        + inverse_kernel(gamma, -1, -1)? * noisy.p_minus();
    SignedBinaryDistribution::new(q_plus, q_minus)
}

/// Variance of a dichotomic variable with the given mean: `1 - <K'>^2`.
pub fn noisy_variance(mean_noisy: f64) -> Result<f64> {
    if !mean_noisy.is_finite() || mean_noisy.abs() > 1.0 {
        return Err(Error::Domain(format!(
            "dichotomic mean {mean_noisy} outside [-1, 1]"
        )));
    }
    Ok(1.0 - mean_noisy * mean_noisy)
}

/// A two-point kernel in matrix form; rows are indexed by the output sign,
/// columns by the input sign, `+1` first.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelMatrix2 {
    entries: [[f64; 2]; 2],
}

impl KernelMatrix2 {
    pub fn forward(gamma: f64) -> Result<Self> {
        Self::build(|k, kp| forward_kernel(gamma, k, kp))
    }

    pub fn inverse(gamma: f64) -> Result<Self> {
        Self::build(|k, kp| inverse_kernel(gamma, kp, k))
    }

    fn build(weight: impl Fn(i8, i8) -> Result<f64>) -> Result<Self> {
        let signs = [1i8, -1i8];
        let mut entries = [[0.0; 2]; 2];
        for (row, &out_sign) in signs.iter().enumerate() {
            for (col, &in_sign) in signs.iter().enumerate() {
                entries[row][col] = weight(in_sign, out_sign)?;
            }
        }
        Ok(Self { entries })
    }

    /// Entry `k(output|input)` with signs `+1`/`-1`.
    pub fn entry(&self, output: i8, input: i8) -> f64 {
        let row = if output > 0 { 0 } else { 1 };
        let col = if input > 0 { 0 } else { 1 };
        self.entries[row][col]
    }

    pub fn as_array(&self) -> &[[f64; 2]; 2] {
        &self.entries
    }

    pub fn column_sum(&self, input: i8) -> f64 {
        let col = if input > 0 { 0 } else { 1 };
        self.entries[0][col] + self.entries[1][col]
    }

    /// Matrix product `self * other`, applying `other` first.
    pub fn compose(&self, other: &KernelMatrix2) -> [[f64; 2]; 2] {
        let mut out = [[0.0; 2]; 2];
        for r in 0..2 {
            for c in 0..2 {
                out[r][c] = (0..2).map(|m| self.entries[r][m] * other.entries[m][c]).sum();
            }
        }
        out
    }
}

/// Product of the four single-variable forward weights, i.e. the probability
/// of recording `xi_prime` when the exact tuple is `xi`.
pub fn forward_joint_kernel(gammas: &GammaFactors, xi: Outcome4, xi_prime: Outcome4) -> f64 {
    let g = gammas.as_array();
    let a = xi;
    let b = xi_prime;
    let pair = |gamma: f64, s: i8, sp: i8| 0.5 * (1.0 + gamma * f64::from(s) * f64::from(sp));
    pair(g[0], a.x(), b.x()) * pair(g[1], a.y(), b.y()) * pair(g[2], a.u(), b.u()) * pair(g[3], a.v(), b.v())
}

/// Product of the four single-variable inverse weights. Singular when any
/// factor vanishes.
pub fn inverse_joint_kernel(gammas: &GammaFactors, xi: Outcome4, xi_prime: Outcome4) -> Result<f64> {
    let g = gammas.as_array();
    if g.iter().any(|&gamma| gamma == 0.0) {
        return Err(Error::SingularInversion);
    }
    let a = xi;
    let b = xi_prime;
    let pair = |gamma: f64, s: i8, sp: i8| 0.5 * (1.0 + f64::from(s) * f64::from(sp) / gamma);
    Ok(pair(g[0], a.x(), b.x())
        * pair(g[1], a.y(), b.y())
        * pair(g[2], a.u(), b.u())
        * pair(g[3], a.v(), b.v()))
}

/// Full 16x16 forward kernel; `matrix[xi_prime.index()][xi.index()]`.
/// Columns are nonnegative and sum to one.
pub fn forward_joint_matrix(gammas: &GammaFactors) -> [[f64; 16]; 16] {
    let mut m = [[0.0; 16]; 16];
    for xi in Outcome4::all() {
        for xi_prime in Outcome4::all() {
            m[xi_prime.index()][xi.index()] = forward_joint_kernel(gammas, xi, xi_prime);
        }
    }
    m
}

/// Full 16x16 inverse kernel; `matrix[xi.index()][xi_prime.index()]`.
/// Columns sum to one but are sign-free.
pub fn inverse_joint_matrix(gammas: &GammaFactors) -> Result<[[f64; 16]; 16]> {
    let mut m = [[0.0; 16]; 16];
    for xi_prime in Outcome4::all() {
        for xi in Outcome4::all() {
            m[xi.index()][xi_prime.index()] = inverse_joint_kernel(gammas, xi, xi_prime)?;
        }
    }
    Ok(m)
}

/// Applies a 16x16 kernel matrix to a weight vector.
pub fn apply_joint_matrix(matrix: &[[f64; 16]; 16], weights: &[f64; 16]) -> [f64; 16] {
    let mut out = [0.0; 16];
    for (row, out_w) in matrix.iter().zip(out.iter_mut()) {
        *out_w = row.iter().zip(weights.iter()).map(|(m, w)| m * w).sum();
    }
    out
}

/// Recovers the exact joint quasi-distribution from a recorded noisy one by
/// inverting all four channels. The result sums to one and may carry negative
/// entries; their presence is the data-level witness of a Bell violation.
pub fn invert_joint(noisy: &JointDistribution16, gammas: &GammaFactors) -> Result<QuasiDistribution16> {
    let matrix = inverse_joint_matrix(gammas)?;
    QuasiDistribution16::new(apply_joint_matrix(&matrix, noisy.as_array()))
}

//! Finite-sample statistics of the CHSH combination under a noisy joint
//! measurement.
//!
//! Each run of the joint measurement yields a four-tuple of signs and hence a
//! single sample of `s' = x'u' - x'v' + y'u' + y'v'`, which only takes the
//! values +-2. With equal accuracy factors the sample law is
//! `p(s' = +-2) = 1/2 +- gamma^2 S / 4`, the mean is `S' = gamma^2 S`, and the
//! classical bound adapts to `|S'| <= 2 gamma^2`. After `N` runs the count `n`
//! of `+2` outcomes is binomial, so the probability that the sample mean
//! violates the adapted bound is an explicit binomial tail sum; a Gaussian
//! approximation of the count distribution gives a closed form in terms of the
//! error function.
//!
//! Removing the noise instead of adapting the bound rescales the statistic to
//! `s'/gamma^2` and restores the original bound of 2. Both routes declare
//! exactly the same counts `n` violating, and therefore the same probability;
//! [`route_equivalence_check`] verifies this per triple `(N, S, gamma)`.

use serde::Serialize;
use statrs::function::erf::erfc;
use statrs::function::gamma::ln_gamma;

use crate::dist::Outcome4;
use crate::error::{Error, Result};
use crate::tol::PROB_ATOL;

/// The CHSH random variable `s = xu - xv + yu + yv` of an outcome tuple.
/// Always +-2.
pub fn s_of_outcome(outcome: Outcome4) -> i32 {
    let (x, y, u, v) = (
        i32::from(outcome.x()),
        i32::from(outcome.y()),
        i32::from(outcome.u()),
        i32::from(outcome.v()),
    );
    x * u - x * v + y * u + y * v
}

/// Mean of `s` under a 16-outcome distribution.
pub fn mean_s(joint: &crate::dist::JointDistribution16) -> f64 {
    joint.iter().map(|(o, p)| f64::from(s_of_outcome(o)) * p).sum()
}

fn check_gamma(gamma: f64) -> Result<()> {
    if !gamma.is_finite() || gamma.abs() > 1.0 {
        return Err(Error::GammaOutOfRange(gamma));
    }
    Ok(())
}

/// The two-point law of `s'` under the noisy joint measurement.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SPrimeDistribution {
    p_plus2: f64,
    p_minus2: f64,
}

impl SPrimeDistribution {
    /// Validates a two-point law directly.
    pub fn new(p_plus2: f64, p_minus2: f64) -> Result<Self> {
        for p in [p_plus2, p_minus2] {
            if !p.is_finite() || !(-PROB_ATOL..=1.0 + PROB_ATOL).contains(&p) {
                return Err(Error::InvalidDistribution(format!(
                    "probability {p} outside [0, 1]"
                )));
            }
        }
        if (p_plus2 + p_minus2 - 1.0).abs() > PROB_ATOL {
            return Err(Error::InvalidDistribution(format!(
                "probabilities sum to {}, expected 1",
                p_plus2 + p_minus2
            )));
        }
        Ok(Self {
            p_plus2: p_plus2.clamp(0.0, 1.0),
            p_minus2: p_minus2.clamp(0.0, 1.0),
        })
    }

    /// The law `p(s' = +-2) = 1/2 +- gamma^2 S / 4` for a given CHSH value and
    /// equal accuracy factor. Requires `|gamma^2 S| <= 2`; anything larger
    /// would break positivity.
    pub fn from_chsh(s: f64, gamma: f64) -> Result<Self> {
        check_gamma(gamma)?;
        if !s.is_finite() {
            return Err(Error::Domain("CHSH value must be finite".into()));
        }
        let mean = gamma * gamma * s;
        if mean.abs() > 2.0 + PROB_ATOL {
            return Err(Error::Domain(format!(
                "gamma^2 * S = {mean} exceeds 2 in modulus; no bona fide two-point law exists"
            )));
        }
        Self::new(0.5 + mean / 4.0, 0.5 - mean / 4.0)
    }

    pub fn p_plus2(&self) -> f64 {
        self.p_plus2
    }

    pub fn p_minus2(&self) -> f64 {
        self.p_minus2
    }

    /// Mean of `s'`: `2 (p_+ - p_-)`.
    pub fn mean(&self) -> f64 {
        2.0 * (self.p_plus2 - self.p_minus2)
    }
}

/// The noise-adapted bound on `|S'|`: `2 gamma^2`.
pub fn noisy_bound(gamma: f64) -> f64 {
    2.0 * gamma * gamma
}

/// The signed two-point law of `s` reconstructed by data inversion:
/// `q(+-2) = 1/2 +- S/4`. Negative weight appears exactly when `|S| > 2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SQuasiDistribution {
    q_plus2: f64,
    q_minus2: f64,
}

impl SQuasiDistribution {
    /// Requires `|S| <= 4` so that the weights stay in `[-1/2, 3/2]`.
    pub fn from_chsh(s: f64) -> Result<Self> {
        if !s.is_finite() || s.abs() > 4.0 {
            return Err(Error::Domain(format!("CHSH value {s} outside [-4, 4]")));
        }
        Ok(Self { q_plus2: 0.5 + s / 4.0, q_minus2: 0.5 - s / 4.0 })
    }

    pub fn q_plus2(&self) -> f64 {
        self.q_plus2
    }

    pub fn q_minus2(&self) -> f64 {
        self.q_minus2
    }

    pub fn mean(&self) -> f64 {
        2.0 * (self.q_plus2 - self.q_minus2)
    }

    /// True when a weight is negative beyond rounding noise, i.e. `|S| > 2`.
    pub fn has_negative(&self) -> bool {
        self.q_plus2 < -PROB_ATOL || self.q_minus2 < -PROB_ATOL
    }
}

/// A count of `+2` outcomes in an `N`-trial experiment.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct TrialCounts {
    n: u64,
    total: u64,
}

impl TrialCounts {
    pub fn new(n: u64, total: u64) -> Result<Self> {
        if total == 0 {
            return Err(Error::Domain("trial count N must be at least 1".into()));
        }
        if n > total {
            return Err(Error::Domain(format!("count {n} exceeds trials {total}")));
        }
        Ok(Self { n, total })
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn total(&self) -> u64 {
        self.total
    }
}

/// Binomial probability of seeing `n` outcomes `s' = +2` in `N` trials,
/// computed through log-gamma so it stays finite for large `N`.
pub fn binomial_pmf(counts: &TrialCounts, dist: &SPrimeDistribution) -> f64 {
    binomial_pmf_raw(counts.n, counts.total, dist.p_plus2)
}

fn binomial_pmf_raw(n: u64, total: u64, p: f64) -> f64 {
    if p == 0.0 {
        return if n == 0 { 1.0 } else { 0.0 };
    }
    if p == 1.0 {
        return if n == total { 1.0 } else { 0.0 };
    }
    let (nf, tf) = (n as f64, total as f64);
    let log_choose = ln_gamma(tf + 1.0) - ln_gamma(nf + 1.0) - ln_gamma(tf - nf + 1.0);
    (log_choose + nf * p.ln() + (tf - nf) * (1.0 - p).ln()).exp()
}

/// Sample mean of `s'` after `N` trials with `n` outcomes `+2`:
/// `S'_N = 2 (2n/N - 1)`.
pub fn finite_mean_noisy(counts: &TrialCounts) -> f64 {
    2.0 * (2.0 * counts.n as f64 / counts.total as f64 - 1.0)
}

/// Sample mean of the rescaled statistic `s'/gamma^2`:
/// `S_N = (2/gamma^2)(2n/N - 1)`. Singular at `gamma = 0`.
pub fn finite_mean_inverted(counts: &TrialCounts, gamma: f64) -> Result<f64> {
    check_gamma(gamma)?;
    if gamma == 0.0 {
        return Err(Error::SingularInversion);
    }
    Ok(2.0 / (gamma * gamma) * (2.0 * counts.n as f64 / counts.total as f64 - 1.0))
}

/// The window of counts that do NOT violate the adapted bound:
/// `n_c = ceil[(N/2)(1 - gamma^2)]` through `n_f = floor[(N/2)(1 + gamma^2)]`.
/// Violation is strict, so counts landing exactly on the bound fall inside the
/// window. The window may be empty (`n_c > n_f`), e.g. for `N = 1`, where every
/// outcome violates. `gamma = 0` is degenerate but not an error: only
/// `n = N/2` (when it exists) avoids violating the zero bound.
pub fn violation_thresholds(n_trials: u64, gamma: f64) -> Result<(i64, i64)> {
    if n_trials == 0 {
        return Err(Error::Domain("trial count N must be at least 1".into()));
    }
    check_gamma(gamma)?;
    let half_n = n_trials as f64 / 2.0;
    let g2 = gamma * gamma;
    let n_f = (half_n * (1.0 + g2)).floor() as i64;
    let n_c = (half_n * (1.0 - g2)).ceil() as i64;
    Ok((n_c, n_f))
}

/// Exact probability that the `N`-trial sample mean violates the adapted
/// bound: `1 - sum_{n = n_c}^{n_f} p(n|N)`.
///
/// The window sum is accumulated outward from the binomial mode so terms are
/// added in descending magnitude.
pub fn exact_violation_probability(n_trials: u64, s: f64, gamma: f64) -> Result<f64> {
    let dist = SPrimeDistribution::from_chsh(s, gamma)?;
    let (n_c, n_f) = violation_thresholds(n_trials, gamma)?;
    Ok(1.0 - window_mass(n_trials, &dist, n_c, n_f))
}

/// Total binomial mass on the window `[n_c, n_f]` (clipped to `[0, N]`),
/// summed outward from the mode.
fn window_mass(n_trials: u64, dist: &SPrimeDistribution, n_c: i64, n_f: i64) -> f64 {
    let lo = n_c.max(0);
    let hi = n_f.min(n_trials as i64);
    if lo > hi {
        return 0.0;
    }
    let p = dist.p_plus2();
    let mode = (((n_trials + 1) as f64) * p).floor() as i64;
    let start = mode.clamp(lo, hi);

    let pmf = |n: i64| binomial_pmf_raw(n as u64, n_trials, p);
    let mut sum = 0.0;
    let mut left = start;
    let mut right = start + 1;
    let mut left_val = pmf(left);
    let mut right_val = if right <= hi { pmf(right) } else { 0.0 };
    while left >= lo || right <= hi {
        let take_left = left >= lo && (right > hi || left_val >= right_val);
        if take_left {
            sum += left_val;
            left -= 1;
            left_val = if left >= lo { pmf(left) } else { 0.0 };
        } else {
            sum += right_val;
            right += 1;
            right_val = if right <= hi { pmf(right) } else { 0.0 };
        }
    }
    sum.min(1.0)
}

fn normal_cdf(z: f64) -> f64 {
    0.5 * erfc(-z / std::f64::consts::SQRT_2)
}

/// Gaussian approximation of [`exact_violation_probability`]: the count
/// distribution is approximated by a normal law with the binomial mean
/// `(N/4)(2 + gamma^2 S)` and variance `(N/16)(4 - gamma^4 S^2)`, and the
/// window sum by the integral over `[n_c - 1/2, n_f + 1/2]` (the half-unit
/// widening matches a discrete sum by an integral; without it the
/// approximation is off by O(1/sigma) at small `N`).
pub fn gaussian_violation_probability(n_trials: u64, s: f64, gamma: f64) -> Result<f64> {
    let _ = SPrimeDistribution::from_chsh(s, gamma)?;
    let (n_c, n_f) = violation_thresholds(n_trials, gamma)?;
    let g2 = gamma * gamma;
    let variance = n_trials as f64 / 16.0 * (4.0 - g2 * g2 * s * s);
    if variance <= 0.0 {
        return Err(Error::DegenerateDistribution(format!(
            "zero-width count distribution at gamma^2 * S = {}",
            g2 * s
        )));
    }
    if n_c > n_f {
        return Ok(1.0);
    }
    let mean = n_trials as f64 / 4.0 * (2.0 + g2 * s);
    let sd = variance.sqrt();
    let lo = (n_c as f64 - 0.5 - mean) / sd;
    let hi = (n_f as f64 + 0.5 - mean) / sd;
    let inside = normal_cdf(hi) - normal_cdf(lo);
    Ok((1.0 - inside).clamp(0.0, 1.0))
}

/// Everything the sweep front end reports for one `(N, S, gamma)` triple.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FiniteNReport {
    pub n_trials: u64,
    pub s_param: f64,
    pub gamma: f64,
    pub n_c: i64,
    pub n_f: i64,
    pub p_violation_exact: f64,
    pub p_violation_gauss: f64,
}

/// Computes exact and Gaussian violation probabilities plus the thresholds.
pub fn finite_n_report(n_trials: u64, s: f64, gamma: f64) -> Result<FiniteNReport> {
    let (n_c, n_f) = violation_thresholds(n_trials, gamma)?;
    Ok(FiniteNReport {
        n_trials,
        s_param: s,
        gamma,
        n_c,
        n_f,
        p_violation_exact: exact_violation_probability(n_trials, s, gamma)?,
        p_violation_gauss: gaussian_violation_probability(n_trials, s, gamma)?,
    })
}

/// Checks that the noisy route (statistic `S'_N`, bound `2 gamma^2`) and the
/// inverted route (statistic `S_N = S'_N / gamma^2`, bound 2) declare exactly
/// the same counts violating and assign them bit-identical total probability.
pub fn route_equivalence_check(n_trials: u64, s: f64, gamma: f64) -> Result<bool> {
    check_gamma(gamma)?;
    if gamma == 0.0 {
        return Err(Error::SingularInversion);
    }
    let dist = SPrimeDistribution::from_chsh(s, gamma)?;
    let bound_noisy = noisy_bound(gamma);

    let mut p_noisy = 0.0;
    let mut p_inverted = 0.0;
    for n in 0..=n_trials {
        let counts = TrialCounts::new(n, n_trials)?;
        let violates_noisy = finite_mean_noisy(&counts).abs() > bound_noisy;
        let violates_inverted = finite_mean_inverted(&counts, gamma)?.abs() > 2.0;
        if violates_noisy != violates_inverted {
            return Ok(false);
        }
        if violates_noisy {
            let mass = binomial_pmf(&counts, &dist);
            p_noisy += mass;
            p_inverted += mass;
        }
    }
    Ok(p_noisy.to_bits() == p_inverted.to_bits())
}

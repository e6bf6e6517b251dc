//! Seeded stochastic simulation of N-trial experiments.
//!
//! Repetitions draw from disjoint ChaCha streams keyed by `(seed, rep index)`,
//! so results are reproducible and independent of how work is chunked across
//! threads. Aggregation keeps integer counts only, which makes the reduction
//! order-independent as well.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::dist::JointDistribution16;
use crate::error::{Error, Result};
use crate::stats::{s_of_outcome, violation_thresholds, SPrimeDistribution, TrialCounts};
use crate::dist::Outcome4;

/// Above this trial count, experiments draw the binomial count by inverse
/// transform on the precomputed pmf instead of N Bernoulli draws.
const BERNOULLI_CUTOFF: u64 = 1000;

/// What the per-trial sampler draws from: the two-point law of `s'` directly,
/// or a full 16-outcome joint reduced through `s(xi')`.
#[derive(Debug, Clone)]
pub enum SampleSource {
    SPrime(SPrimeDistribution),
    Joint(JointDistribution16),
}

/// A reproducible simulation request.
#[derive(Debug, Clone)]
pub struct SimulationSpec {
    n_trials: u64,
    reps: u64,
    seed: u64,
    source: SampleSource,
}

impl SimulationSpec {
    pub fn new(n_trials: u64, reps: u64, seed: u64, source: SampleSource) -> Result<Self> {
        if n_trials == 0 {
            return Err(Error::Domain("trial count N must be at least 1".into()));
        }
        if reps == 0 {
            return Err(Error::Domain("repetition count must be at least 1".into()));
        }
        Ok(Self { n_trials, reps, seed, source })
    }

    pub fn n_trials(&self) -> u64 {
        self.n_trials
    }

    pub fn reps(&self) -> u64 {
        self.reps
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn source(&self) -> &SampleSource {
        &self.source
    }
}

/// Aggregate of a batch of simulated experiments.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct SimulationResult {
    pub violation_count: u64,
    pub reps: u64,
    pub empirical_violation_rate: f64,
    pub s_prime_mean: f64,
    pub s_prime_min: f64,
    pub s_prime_max: f64,
}

fn rep_rng(seed: u64, rep: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(rep);
    rng
}

/// How one experiment's `+2` count is drawn from the two-point law.
enum CountSampler {
    Bernoulli { p: f64, n_trials: u64 },
    InverseCdf { cdf: Vec<f64> },
}

impl CountSampler {
    fn new(dist: &SPrimeDistribution, n_trials: u64) -> Self {
        let p = dist.p_plus2();
        if n_trials < BERNOULLI_CUTOFF {
            return Self::Bernoulli { p, n_trials };
        }
        // CDF of the binomial counts, built by the stable forward recurrence
        // from the mode outwards would be overkill here: direct log-domain
        // evaluation per count is cheap and done once per spec.
        let dist_counts: Vec<f64> = (0..=n_trials)
            .map(|n| crate::stats::binomial_pmf(&TrialCounts::new(n, n_trials).expect("n <= N"), dist))
            .collect();
        let mut cdf = Vec::with_capacity(dist_counts.len());
        let mut acc = 0.0;
        for p in dist_counts {
            acc += p;
            cdf.push(acc);
        }
        if let Some(last) = cdf.last_mut() {
            *last = 1.0;
        }
        Self::InverseCdf { cdf }
    }

    fn sample(&self, rng: &mut ChaCha8Rng) -> u64 {
        match self {
            Self::Bernoulli { p, n_trials } => {
                let mut n = 0u64;
                for _ in 0..*n_trials {
                    if rng.random::<f64>() < *p {
                        n += 1;
                    }
                }
                n
            }
            Self::InverseCdf { cdf } => {
                let u = rng.random::<f64>();
                cdf.partition_point(|&c| c < u) as u64
            }
        }
    }
}

/// Draws one `N`-trial experiment from the two-point law of `s'`, returning
/// the count of `+2` outcomes. Reproducible for a given generator state.
pub fn sample_experiment(
    dist: &SPrimeDistribution,
    n_trials: u64,
    rng: &mut ChaCha8Rng,
) -> Result<TrialCounts> {
    if n_trials == 0 {
        return Err(Error::Domain("trial count N must be at least 1".into()));
    }
    let sampler = CountSampler::new(dist, n_trials);
    TrialCounts::new(sampler.sample(rng), n_trials)
}

/// Draws one experiment from a 16-outcome joint, reducing each trial through
/// `s(xi')` to a `+2` count.
fn sample_joint_experiment(cdf16: &[f64; 16], n_trials: u64, rng: &mut ChaCha8Rng) -> u64 {
    let mut n = 0u64;
    for _ in 0..n_trials {
        let u = rng.random::<f64>();
        let idx = cdf16.partition_point(|&c| c < u).min(15);
        let outcome = Outcome4::from_index(idx).expect("index < 16");
        if s_of_outcome(outcome) == 2 {
            n += 1;
        }
    }
    n
}

/// Runs `reps` independent experiments and counts how many violate the
/// adapted bound `2 gamma^2`. Violation is judged by the same integer
/// thresholds the exact engine uses, so the empirical rate estimates exactly
/// the probability that [`crate::stats::exact_violation_probability`] computes.
pub fn estimate_violation_rate(spec: &SimulationSpec, gamma: f64) -> Result<SimulationResult> {
    let (n_c, n_f) = violation_thresholds(spec.n_trials, gamma)?;

    enum Prepared {
        Counts(CountSampler),
        Joint([f64; 16]),
    }
    let prepared = match &spec.source {
        SampleSource::SPrime(dist) => Prepared::Counts(CountSampler::new(dist, spec.n_trials)),
        SampleSource::Joint(joint) => {
            let mut cdf = [0.0f64; 16];
            let mut acc = 0.0;
            for (slot, p) in cdf.iter_mut().zip(joint.as_array()) {
                acc += p;
                *slot = acc;
            }
            cdf[15] = 1.0;
            Prepared::Joint(cdf)
        }
    };

    // Per-rep tallies are integers, so the parallel reduction is exact and
    // independent of the worker count.
    let identity = || (0u64, 0u128, u64::MAX, 0u64);
    let (violations, sum_n, min_n, max_n) = (0..spec.reps)
        .into_par_iter()
        .map(|rep| {
            let mut rng = rep_rng(spec.seed, rep);
            let n = match &prepared {
                Prepared::Counts(sampler) => sampler.sample(&mut rng),
                Prepared::Joint(cdf) => sample_joint_experiment(cdf, spec.n_trials, &mut rng),
            };
            let violated = (n as i64) < n_c || (n as i64) > n_f;
            (u64::from(violated), n as u128, n, n)
        })
        .reduce(identity, |a, b| {
            (a.0 + b.0, a.1 + b.1, a.2.min(b.2), a.3.max(b.3))
        });

    let mean_fraction = sum_n as f64 / (spec.reps as u128 * spec.n_trials as u128) as f64;
    let s_mean = 2.0 * (2.0 * mean_fraction - 1.0);
    let s_of = |n: u64| 2.0 * (2.0 * n as f64 / spec.n_trials as f64 - 1.0);
    Ok(SimulationResult {
        violation_count: violations,
        reps: spec.reps,
        empirical_violation_rate: violations as f64 / spec.reps as f64,
        s_prime_mean: s_mean,
        s_prime_min: s_of(min_n),
        s_prime_max: s_of(max_n),
    })
}

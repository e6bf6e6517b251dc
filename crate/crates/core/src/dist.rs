//! Outcome tuples and the probability / quasi-probability containers shared by
//! the kernel, quantum, and statistics layers.
//!
//! A joint measurement of the four dichotomic observables produces a four-tuple
//! of signs `(x, y, u, v)`. Throughout the crate these tuples are indexed by
//! mapping `+1 -> 0` and `-1 -> 1` per component and packing the bits as
//! `index = x<<3 | y<<2 | u<<1 | v`, so index 0 is `(+,+,+,+)` and index 15 is
//! `(-,-,-,-)`. The same convention applies to distribution files read by the
//! CLI.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::tol::{JOINT_ENTRY_FLOOR, JOINT_SUM_ATOL, PROB_ATOL};

/// One of the four dichotomic observables: `X`, `Y` on party A, `U`, `V` on party B.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Observable {
    X,
    Y,
    U,
    V,
}

impl Observable {
    pub const ALL: [Observable; 4] = [Observable::X, Observable::Y, Observable::U, Observable::V];

    /// Bit position of this observable in an [`Outcome4`] index.
    fn shift(self) -> usize {
        match self {
            Observable::X => 3,
            Observable::Y => 2,
            Observable::U => 1,
            Observable::V => 0,
        }
    }
}

fn bit_of(sign: i8) -> usize {
    if sign > 0 {
        0
    } else {
        1
    }
}

fn sign_of_bit(bit: usize) -> i8 {
    if bit == 0 {
        1
    } else {
        -1
    }
}

/// A four-tuple of dichotomic outcomes, one per observable.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Outcome4 {
    x: i8,
    y: i8,
    u: i8,
    v: i8,
}

impl Outcome4 {
    /// Builds an outcome tuple, rejecting any component that is not `+1` or `-1`.
    pub fn new(x: i8, y: i8, u: i8, v: i8) -> Result<Self> {
        for c in [x, y, u, v] {
            if c != 1 && c != -1 {
                return Err(Error::InvalidOutcome(c));
            }
        }
        Ok(Self { x, y, u, v })
    }

    /// Decodes an index in `0..16` using the packed-bit convention.
    pub fn from_index(index: usize) -> Result<Self> {
        if index >= 16 {
            return Err(Error::Domain(format!("outcome index {index} out of range 0..16")));
        }
        Ok(Self {
            x: sign_of_bit((index >> 3) & 1),
            y: sign_of_bit((index >> 2) & 1),
            u: sign_of_bit((index >> 1) & 1),
            v: sign_of_bit(index & 1),
        })
    }

    /// Packed index of this tuple in `0..16`.
    pub fn index(self) -> usize {
        bit_of(self.x) << 3 | bit_of(self.y) << 2 | bit_of(self.u) << 1 | bit_of(self.v)
    }

    /// All 16 outcome tuples in index order.
    pub fn all() -> impl Iterator<Item = Outcome4> {
        (0..16).map(|i| Outcome4::from_index(i).expect("index < 16"))
    }

    pub fn x(self) -> i8 {
        self.x
    }

    pub fn y(self) -> i8 {
        self.y
    }

    pub fn u(self) -> i8 {
        self.u
    }

    pub fn v(self) -> i8 {
        self.v
    }

    /// Component belonging to the given observable.
    pub fn component(self, which: Observable) -> i8 {
        match which {
            Observable::X => self.x,
            Observable::Y => self.y,
            Observable::U => self.u,
            Observable::V => self.v,
        }
    }
}

impl std::fmt::Display for Outcome4 {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let sgn = |s: i8| if s > 0 { '+' } else { '-' };
        write!(f, "({}{}{}{})", sgn(self.x), sgn(self.y), sgn(self.u), sgn(self.v))
    }
}

/// A bona fide distribution over a single dichotomic outcome.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BinaryDistribution {
    p_plus: f64,
    p_minus: f64,
}

impl BinaryDistribution {
    /// Validates `p_plus, p_minus in [0, 1]` and `p_plus + p_minus = 1`.
    pub fn new(p_plus: f64, p_minus: f64) -> Result<Self> {
        for p in [p_plus, p_minus] {
            if !p.is_finite() || !(-PROB_ATOL..=1.0 + PROB_ATOL).contains(&p) {
                return Err(Error::InvalidDistribution(format!(
                    "probability {p} outside [0, 1]"
                )));
            }
        }
        if (p_plus + p_minus - 1.0).abs() > PROB_ATOL {
            return Err(Error::InvalidDistribution(format!(
                "probabilities sum to {}, expected 1",
                p_plus + p_minus
            )));
        }
        Ok(Self {
            p_plus: p_plus.clamp(0.0, 1.0),
            p_minus: p_minus.clamp(0.0, 1.0),
        })
    }

    pub fn uniform() -> Self {
        Self { p_plus: 0.5, p_minus: 0.5 }
    }

    /// Point mass on the outcome `sign`.
    pub fn delta(sign: i8) -> Result<Self> {
        match sign {
            1 => Ok(Self { p_plus: 1.0, p_minus: 0.0 }),
            -1 => Ok(Self { p_plus: 0.0, p_minus: 1.0 }),
            other => Err(Error::InvalidOutcome(other)),
        }
    }

    pub fn p_plus(&self) -> f64 {
        self.p_plus
    }

    pub fn p_minus(&self) -> f64 {
        self.p_minus
    }

    pub fn prob(&self, sign: i8) -> f64 {
        if sign > 0 {
            self.p_plus
        } else {
            self.p_minus
        }
    }

    /// Mean of the dichotomic variable: `p_plus - p_minus`.
    pub fn mean(&self) -> f64 {
        self.p_plus - self.p_minus
    }
}

/// A signed, unit-sum weight pair produced by inverting a noise kernel.
/// Entries may be negative or exceed one.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SignedBinaryDistribution {
    q_plus: f64,
    q_minus: f64,
}

impl SignedBinaryDistribution {
    /// Validates only the unit-sum constraint; entries are sign-free.
    pub fn new(q_plus: f64, q_minus: f64) -> Result<Self> {
        if !q_plus.is_finite() || !q_minus.is_finite() {
            return Err(Error::InvalidDistribution("non-finite weight".into()));
        }
        if (q_plus + q_minus - 1.0).abs() > PROB_ATOL {
            return Err(Error::InvalidDistribution(format!(
                "weights sum to {}, expected 1",
                q_plus + q_minus
            )));
        }
        Ok(Self { q_plus, q_minus })
    }

    pub fn q_plus(&self) -> f64 {
        self.q_plus
    }

    pub fn q_minus(&self) -> f64 {
        self.q_minus
    }

    pub fn weight(&self, sign: i8) -> f64 {
        if sign > 0 {
            self.q_plus
        } else {
            self.q_minus
        }
    }

    pub fn mean(&self) -> f64 {
        self.q_plus - self.q_minus
    }

    /// True when some weight is negative beyond rounding noise.
    pub fn has_negative(&self) -> bool {
        self.q_plus < -PROB_ATOL || self.q_minus < -PROB_ATOL
    }
}

/// A bona fide probability distribution over the 16 four-tuples of outcomes.
#[derive(Debug, Clone, PartialEq)]
pub struct JointDistribution16 {
    probs: [f64; 16],
}

impl JointDistribution16 {
    /// Validates entries (clamping rounding-level negatives to zero) and the
    /// unit total.
    pub fn new(mut probs: [f64; 16]) -> Result<Self> {
        for p in &mut probs {
            if !p.is_finite() || *p < JOINT_ENTRY_FLOOR {
                return Err(Error::InvalidDistribution(format!(
                    "joint entry {p} is negative beyond tolerance"
                )));
            }
            if *p < 0.0 {
                *p = 0.0;
            }
        }
        let sum: f64 = probs.iter().sum();
        if (sum - 1.0).abs() > JOINT_SUM_ATOL {
            return Err(Error::InvalidDistribution(format!(
                "joint entries sum to {sum}, expected 1"
            )));
        }
        Ok(Self { probs })
    }

    pub fn uniform() -> Self {
        Self { probs: [1.0 / 16.0; 16] }
    }

    pub fn prob(&self, outcome: Outcome4) -> f64 {
        self.probs[outcome.index()]
    }

    pub fn as_array(&self) -> &[f64; 16] {
        &self.probs
    }

    pub fn iter(&self) -> impl Iterator<Item = (Outcome4, f64)> + '_ {
        Outcome4::all().map(move |o| (o, self.probs[o.index()]))
    }

    /// Sums out the other three observables.
    pub fn marginal(&self, which: Observable) -> BinaryDistribution {
        let shift = which.shift();
        let mut acc = [0.0f64; 2];
        for (i, p) in self.probs.iter().enumerate() {
            acc[(i >> shift) & 1] += p;
        }
        BinaryDistribution {
            p_plus: acc[0].clamp(0.0, 1.0),
            p_minus: acc[1].clamp(0.0, 1.0),
        }
    }

    /// Mean of a product of two observables' outcomes under this distribution.
    pub fn pair_correlator(&self, a: Observable, b: Observable) -> f64 {
        self.iter()
            .map(|(o, p)| f64::from(o.component(a) * o.component(b)) * p)
            .sum()
    }
}

/// A signed, unit-sum measure over the 16 four-tuples. Negative entries signal
/// that no bona fide joint distribution reproduces the recorded data.
#[derive(Debug, Clone, PartialEq)]
pub struct QuasiDistribution16 {
    weights: [f64; 16],
}

impl QuasiDistribution16 {
    /// Validates finiteness and the unit total; entries are sign-free.
    pub fn new(weights: [f64; 16]) -> Result<Self> {
        if weights.iter().any(|w| !w.is_finite()) {
            return Err(Error::InvalidDistribution("non-finite quasi weight".into()));
        }
        let sum: f64 = weights.iter().sum();
        if (sum - 1.0).abs() > JOINT_SUM_ATOL {
            return Err(Error::InvalidDistribution(format!(
                "quasi weights sum to {sum}, expected 1"
            )));
        }
        Ok(Self { weights })
    }

    pub fn weight(&self, outcome: Outcome4) -> f64 {
        self.weights[outcome.index()]
    }

    pub fn as_array(&self) -> &[f64; 16] {
        &self.weights
    }

    pub fn iter(&self) -> impl Iterator<Item = (Outcome4, f64)> + '_ {
        Outcome4::all().map(move |o| (o, self.weights[o.index()]))
    }

    pub fn min_entry(&self) -> f64 {
        self.weights.iter().copied().fold(f64::INFINITY, f64::min)
    }

    /// True when some entry is negative beyond rounding noise.
    pub fn has_negative(&self) -> bool {
        self.min_entry() < -PROB_ATOL
    }

    /// Reinterprets the weights as a bona fide distribution, if they are one.
    pub fn to_joint(&self) -> Result<JointDistribution16> {
        JointDistribution16::new(self.weights)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn outcome_index_round_trip() {
        for (i, o) in Outcome4::all().enumerate() {
            assert_eq!(o.index(), i);
            assert_eq!(Outcome4::from_index(i).unwrap(), o);
        }
    }

    #[test]
    fn outcome_rejects_bad_components() {
        assert_eq!(Outcome4::new(1, 1, 0, 1), Err(Error::InvalidOutcome(0)));
        assert_eq!(Outcome4::new(2, 1, 1, 1), Err(Error::InvalidOutcome(2)));
        assert!(Outcome4::from_index(16).is_err());
    }

    #[test]
    fn outcome_zero_is_all_plus() {
        let o = Outcome4::from_index(0).unwrap();
        assert_eq!((o.x(), o.y(), o.u(), o.v()), (1, 1, 1, 1));
        let o = Outcome4::from_index(15).unwrap();
        assert_eq!((o.x(), o.y(), o.u(), o.v()), (-1, -1, -1, -1));
    }

    #[test]
    fn binary_distribution_validation() {
        assert!(BinaryDistribution::new(0.7, 0.3).is_ok());
        assert!(BinaryDistribution::new(0.7, 0.4).is_err());
        assert!(BinaryDistribution::new(1.2, -0.2).is_err());
        assert!(BinaryDistribution::new(f64::NAN, 1.0).is_err());
    }

    #[test]
    fn binary_distribution_mean() {
        let d = BinaryDistribution::new(0.7, 0.3).unwrap();
        assert!((d.mean() - 0.4).abs() < 1e-15);
        assert_eq!(BinaryDistribution::delta(1).unwrap().mean(), 1.0);
    }

    #[test]
    fn joint_marginal_sums_out_three_variables() {
        // Point mass on (+,-,+,-): marginals are deltas on the components.
        let mut probs = [0.0; 16];
        let o = Outcome4::new(1, -1, 1, -1).unwrap();
        probs[o.index()] = 1.0;
        let joint = JointDistribution16::new(probs).unwrap();
        assert_eq!(joint.marginal(Observable::X).mean(), 1.0);
        assert_eq!(joint.marginal(Observable::Y).mean(), -1.0);
        assert_eq!(joint.marginal(Observable::U).mean(), 1.0);
        assert_eq!(joint.marginal(Observable::V).mean(), -1.0);
        assert_eq!(joint.pair_correlator(Observable::X, Observable::Y), -1.0);
    }

    #[test]
    fn joint_rejects_bad_mass() {
        let mut probs = [1.0 / 16.0; 16];
        probs[3] = -1e-6;
        probs[4] = 1.0 / 16.0 + 1e-6;
        assert!(JointDistribution16::new(probs).is_err());

        let short = [1.0 / 17.0; 16];
        assert!(JointDistribution16::new(short).is_err());
    }

    #[test]
    fn joint_clamps_rounding_negatives() {
        let mut probs = [1.0 / 16.0; 16];
        probs[2] = -1e-13;
        probs[3] = 2.0 / 16.0 - 1e-13;
        let joint = JointDistribution16::new(probs);
        assert!(joint.is_ok());
        assert_eq!(joint.unwrap().prob(Outcome4::from_index(2).unwrap()), 0.0);
    }

    #[test]
    fn quasi_negativity_detection() {
        let mut w = [1.0 / 16.0; 16];
        w[0] -= 0.1;
        w[1] += 0.1;
        let q = QuasiDistribution16::new(w).unwrap();
        assert!(q.has_negative());
        assert!((q.min_entry() - (1.0 / 16.0 - 0.1)).abs() < 1e-15);
        assert!(q.to_joint().is_err());

        let u = QuasiDistribution16::new([1.0 / 16.0; 16]).unwrap();
        assert!(!u.has_negative());
        assert!(u.to_joint().is_ok());
    }
}

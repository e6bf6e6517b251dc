//! Two-qubit states, measurement settings, exact correlators, and the product
//! realization of the noisy joint measurement.
//!
//! The joint measurement of all four observables at once is realized per party
//! by the four effects
//!
//! ```text
//! E(x', y') = (1 + gamma_x x' A_x + gamma_y y' A_y) / 4,
//! ```
//!
//! with `A_k = a_k . sigma`. The effects sum to the identity by construction;
//! positivity is checked numerically at build time (for orthogonal within-party
//! Bloch directions it reduces to `gamma_x^2 + gamma_y^2 <= 1`). Traces against
//! the state give the full 16-outcome distribution, whose single-observable
//! marginals reproduce the forward noise channels exactly.

pub mod matrix;

use num_complex::Complex64;

use crate::dist::{JointDistribution16, Observable, Outcome4};
use crate::error::{Error, Result};
use crate::noise::GammaFactors;
use crate::tol::{EIGENVALUE_FLOOR, MATRIX_ATOL};

use matrix::{kron, outer_product, pauli_vector, Mat2, Mat4, C64};

/// A validated two-qubit density matrix: Hermitian, unit trace, positive
/// semidefinite up to a small eigenvalue floor.
#[derive(Debug, Clone, PartialEq)]
pub struct TwoQubitState {
    rho: Mat4,
}

impl TwoQubitState {
    /// Validates and wraps a raw 4x4 complex matrix.
    pub fn new(elements: [[Complex64; 4]; 4]) -> Result<Self> {
        let rho = Mat4(elements);
        let defect = rho.hermiticity_defect();
        if defect > MATRIX_ATOL {
            return Err(Error::InvalidState(format!(
                "matrix is not Hermitian (defect {defect:.3e})"
            )));
        }
        let trace = rho.trace();
        if (trace.re - 1.0).abs() > MATRIX_ATOL || trace.im.abs() > MATRIX_ATOL {
            return Err(Error::InvalidState(format!("trace is {trace}, expected 1")));
        }
        let min_eig = rho.hermitian_eigenvalues()[0];
        if min_eig < EIGENVALUE_FLOOR {
            return Err(Error::InvalidState(format!(
                "smallest eigenvalue {min_eig:.3e} is negative beyond tolerance"
            )));
        }
        Ok(Self { rho })
    }

    /// Builds a state from separate real and imaginary parts, row-major.
    pub fn from_parts(re: [[f64; 4]; 4], im: [[f64; 4]; 4]) -> Result<Self> {
        let mut elements = [[C64::new(0.0, 0.0); 4]; 4];
        for r in 0..4 {
            for c in 0..4 {
                elements[r][c] = C64::new(re[r][c], im[r][c]);
            }
        }
        Self::new(elements)
    }

    /// Projector onto a pure state given by four amplitudes in the
    /// computational basis `|00>, |01>, |10>, |11>`. The amplitudes are
    /// normalized; a near-zero vector is rejected.
    pub fn from_pure(amplitudes: [Complex64; 4]) -> Result<Self> {
        let norm_sqr: f64 = amplitudes.iter().map(|a| a.norm_sqr()).sum();
        if norm_sqr < 1e-12 {
            return Err(Error::InvalidState("zero state vector".into()));
        }
        let scale = norm_sqr.sqrt();
        let psi = amplitudes.map(|a| a / scale);
        Ok(Self { rho: outer_product(&psi) })
    }

    /// Convex mixture of validated states. Weights must be nonnegative and
    /// sum to one.
    pub fn mix(components: &[(f64, TwoQubitState)]) -> Result<Self> {
        let total: f64 = components.iter().map(|(w, _)| w).sum();
        if (total - 1.0).abs() > MATRIX_ATOL || components.iter().any(|(w, _)| *w < 0.0) {
            return Err(Error::InvalidState(format!(
                "mixture weights must be nonnegative and sum to 1, got total {total}"
            )));
        }
        let mut rho = Mat4::zero();
        for (w, state) in components {
            rho = rho.add(&state.rho.scale(*w));
        }
        Ok(Self { rho })
    }

    /// The singlet: `(|01> - |10>) / sqrt(2)`.
    pub fn singlet() -> Self {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let psi = [
            C64::new(0.0, 0.0),
            C64::new(s, 0.0),
            C64::new(-s, 0.0),
            C64::new(0.0, 0.0),
        ];
        Self { rho: outer_product(&psi) }
    }

    /// The product state `|00><00|`.
    pub fn product_zero_zero() -> Self {
        let mut rho = Mat4::zero();
        rho.0[0][0] = C64::new(1.0, 0.0);
        Self { rho }
    }

    /// The maximally mixed state `I / 4`.
    pub fn maximally_mixed() -> Self {
        Self { rho: Mat4::identity().scale(0.25) }
    }

    /// Werner state: `p` parts singlet plus `1 - p` parts maximally mixed.
    pub fn werner(p: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::InvalidState(format!(
                "Werner parameter {p} outside [0, 1]"
            )));
        }
        let singlet = Self::singlet();
        let rho = singlet.rho.scale(p).add(&Mat4::identity().scale(0.25 * (1.0 - p)));
        Ok(Self { rho })
    }

    pub fn element(&self, row: usize, col: usize) -> Complex64 {
        self.rho.0[row][col]
    }

    /// Real and imaginary parts, row-major, for serialization.
    pub fn parts(&self) -> ([[f64; 4]; 4], [[f64; 4]; 4]) {
        let mut re = [[0.0; 4]; 4];
        let mut im = [[0.0; 4]; 4];
        for r in 0..4 {
            for c in 0..4 {
                re[r][c] = self.rho.0[r][c].re;
                im[r][c] = self.rho.0[r][c].im;
            }
        }
        (re, im)
    }

    /// `Tr[rho^2]`, one for pure states.
    pub fn purity(&self) -> f64 {
        self.rho.trace_product(&self.rho).re
    }

    fn expectation(&self, operator: &Mat4) -> f64 {
        self.rho.trace_product(operator).re
    }
}

fn validate_unit(dir: [f64; 3], label: &str) -> Result<()> {
    if dir.iter().any(|c| !c.is_finite()) {
        return Err(Error::InvalidSettings(format!("{label}: non-finite component")));
    }
    let norm = dir.iter().map(|c| c * c).sum::<f64>().sqrt();
    if (norm - 1.0).abs() > MATRIX_ATOL {
        return Err(Error::InvalidSettings(format!(
            "{label}: norm is {norm}, expected 1"
        )));
    }
    Ok(())
}

/// Bloch directions of the four dichotomic observables: `X`, `Y` on party A,
/// `U`, `V` on party B.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeasurementSettings {
    a_x: [f64; 3],
    a_y: [f64; 3],
    b_u: [f64; 3],
    b_v: [f64; 3],
}

impl MeasurementSettings {
    pub fn new(a_x: [f64; 3], a_y: [f64; 3], b_u: [f64; 3], b_v: [f64; 3]) -> Result<Self> {
        validate_unit(a_x, "a_x")?;
        validate_unit(a_y, "a_y")?;
        validate_unit(b_u, "b_u")?;
        validate_unit(b_v, "b_v")?;
        Ok(Self { a_x, a_y, b_u, b_v })
    }

    /// Settings that maximize the CHSH combination for the singlet:
    /// `a_x = z`, `a_y = x`, `b_u = -(z + x)/sqrt(2)`, `b_v = (z - x)/sqrt(2)`,
    /// giving `S = 2 sqrt(2)`.
    pub fn chsh_optimal() -> Self {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        Self {
            a_x: [0.0, 0.0, 1.0],
            a_y: [1.0, 0.0, 0.0],
            b_u: [-s, 0.0, -s],
            b_v: [-s, 0.0, s],
        }
    }

    /// All four observables along `z`; degenerate but useful for product states.
    pub fn all_z() -> Self {
        let z = [0.0, 0.0, 1.0];
        Self { a_x: z, a_y: z, b_u: z, b_v: z }
    }

    pub fn a_x(&self) -> [f64; 3] {
        self.a_x
    }

    pub fn a_y(&self) -> [f64; 3] {
        self.a_y
    }

    pub fn b_u(&self) -> [f64; 3] {
        self.b_u
    }

    pub fn b_v(&self) -> [f64; 3] {
        self.b_v
    }

    /// Direction for one observable.
    pub fn direction(&self, which: Observable) -> [f64; 3] {
        match which {
            Observable::X => self.a_x,
            Observable::Y => self.a_y,
            Observable::U => self.b_u,
            Observable::V => self.b_v,
        }
    }
}

/// The four pairwise cross-party correlators entering the CHSH combination.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Correlators {
    pub xu: f64,
    pub xv: f64,
    pub yu: f64,
    pub yv: f64,
}

/// `Tr[rho (a . sigma) (x) (b . sigma)]` for unit Bloch directions.
pub fn correlator(state: &TwoQubitState, dir_a: [f64; 3], dir_b: [f64; 3]) -> Result<f64> {
    validate_unit(dir_a, "dir_a")?;
    validate_unit(dir_b, "dir_b")?;
    let op = kron(&pauli_vector(dir_a), &pauli_vector(dir_b));
    Ok(state.expectation(&op))
}

/// All four CHSH correlators for the given settings.
pub fn correlators(state: &TwoQubitState, settings: &MeasurementSettings) -> Correlators {
    let pair = |a: [f64; 3], b: [f64; 3]| {
        let op = kron(&pauli_vector(a), &pauli_vector(b));
        state.expectation(&op)
    };
    Correlators {
        xu: pair(settings.a_x, settings.b_u),
        xv: pair(settings.a_x, settings.b_v),
        yu: pair(settings.a_y, settings.b_u),
        yv: pair(settings.a_y, settings.b_v),
    }
}

/// The CHSH combination `S = <XU> - <XV> + <YU> + <YV>`.
pub fn chsh_value(state: &TwoQubitState, settings: &MeasurementSettings) -> f64 {
    let c = correlators(state, settings);
    c.xu - c.xv + c.yu + c.yv
}

/// One party's four joint-measurement effects, indexed by the two outcome signs.
fn party_effects(
    gamma_1: f64,
    gamma_2: f64,
    dir_1: [f64; 3],
    dir_2: [f64; 3],
) -> Result<[[Mat2; 2]; 2]> {
    let op_1 = pauli_vector(dir_1);
    let op_2 = pauli_vector(dir_2);
    let signs = [1.0f64, -1.0f64];
    let mut effects = [[Mat2::zero(); 2]; 2];
    for (i, &s1) in signs.iter().enumerate() {
        for (j, &s2) in signs.iter().enumerate() {
            let effect = Mat2::identity()
                .add(&op_1.scale(gamma_1 * s1))
                .add(&op_2.scale(gamma_2 * s2))
                .scale(0.25);
            let min_eig = effect.hermitian_eigenvalues()[0];
            if min_eig < EIGENVALUE_FLOOR {
                return Err(Error::InfeasibleGammas(format!(
                    "joint-measurement effect has negative eigenvalue {min_eig:.3e} \
                     (gammas {gamma_1}, {gamma_2})"
                )));
            }
            effects[i][j] = effect;
        }
    }
    Ok(effects)
}

/// The full 16-outcome distribution of the noisy joint measurement,
/// `p(xi') = Tr[rho E_A(x', y') (x) E_B(u', v')]`.
///
/// Fails when the requested gamma factors do not admit positive effects for
/// these settings.
pub fn noisy_joint_distribution(
    state: &TwoQubitState,
    settings: &MeasurementSettings,
    gammas: &GammaFactors,
) -> Result<JointDistribution16> {
    let effects_a = party_effects(gammas.gamma_x(), gammas.gamma_y(), settings.a_x, settings.a_y)?;
    let effects_b = party_effects(gammas.gamma_u(), gammas.gamma_v(), settings.b_u, settings.b_v)?;

    let idx = |sign: i8| usize::from(sign < 0);
    let mut probs = [0.0f64; 16];
    for outcome in Outcome4::all() {
        let ea = &effects_a[idx(outcome.x())][idx(outcome.y())];
        let eb = &effects_b[idx(outcome.u())][idx(outcome.v())];
        probs[outcome.index()] = state.expectation(&kron(ea, eb));
    }
    JointDistribution16::new(probs)
}

/// Fixed entries of the named state catalog (Werner states take a parameter
/// and are addressed as `werner:P`).
pub fn named_states() -> Vec<(&'static str, TwoQubitState)> {
    vec![
        ("singlet", TwoQubitState::singlet()),
        ("product00", TwoQubitState::product_zero_zero()),
        ("maximally-mixed", TwoQubitState::maximally_mixed()),
    ]
}

/// Resolves a state catalog name: `singlet`, `product00`, `maximally-mixed`,
/// or `werner:P` with `P` in `[0, 1]`.
pub fn state_by_name(name: &str) -> Result<TwoQubitState> {
    if let Some(param) = name.strip_prefix("werner:") {
        let p: f64 = param
            .parse()
            .map_err(|_| Error::InvalidState(format!("bad Werner parameter {param:?}")))?;
        return TwoQubitState::werner(p);
    }
    named_states()
        .into_iter()
        .find(|(n, _)| *n == name)
        .map(|(_, s)| s)
        .ok_or_else(|| Error::InvalidState(format!("unknown state name {name:?}")))
}

/// Resolves a settings catalog name: `chsh-optimal` or `all-z`.
pub fn settings_by_name(name: &str) -> Result<MeasurementSettings> {
    match name {
        "chsh-optimal" => Ok(MeasurementSettings::chsh_optimal()),
        "all-z" => Ok(MeasurementSettings::all_z()),
        other => Err(Error::InvalidSettings(format!(
            "unknown settings name {other:?}"
        ))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::noise::apply_noise;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::{FRAC_1_SQRT_2, SQRT_2};

    #[test]
    fn singlet_correlator_is_minus_dot_product() {
        let singlet = TwoQubitState::singlet();
        let z = [0.0, 0.0, 1.0];
        let x = [1.0, 0.0, 0.0];
        assert_abs_diff_eq!(correlator(&singlet, z, z).unwrap(), -1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(correlator(&singlet, z, x).unwrap(), 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(correlator(&singlet, x, x).unwrap(), -1.0, epsilon = 1e-12);
        // A tilted pair: cos(theta) between the directions.
        let tilted = [FRAC_1_SQRT_2, 0.0, FRAC_1_SQRT_2];
        assert_abs_diff_eq!(
            correlator(&singlet, z, tilted).unwrap(),
            -FRAC_1_SQRT_2,
            epsilon = 1e-12
        );
    }

    #[test]
    fn product_state_correlator() {
        let zz = TwoQubitState::product_zero_zero();
        let z = [0.0, 0.0, 1.0];
        assert_abs_diff_eq!(correlator(&zz, z, z).unwrap(), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn correlator_rejects_non_unit_directions() {
        let s = TwoQubitState::singlet();
        assert!(correlator(&s, [0.0, 0.0, 2.0], [0.0, 0.0, 1.0]).is_err());
    }

    #[test]
    fn chsh_value_examples() {
        let singlet = TwoQubitState::singlet();
        let optimal = MeasurementSettings::chsh_optimal();
        assert_abs_diff_eq!(chsh_value(&singlet, &optimal), 2.0 * SQRT_2, epsilon = 1e-12);

        let mixed = TwoQubitState::maximally_mixed();
        assert_abs_diff_eq!(chsh_value(&mixed, &optimal), 0.0, epsilon = 1e-12);

        let zz = TwoQubitState::product_zero_zero();
        assert_abs_diff_eq!(chsh_value(&zz, &MeasurementSettings::all_z()), 2.0, epsilon = 1e-12);
    }

    #[test]
    fn state_validation_rejects_bad_matrices() {
        // Non-unit trace.
        let mut re = [[0.0; 4]; 4];
        re[0][0] = 0.5;
        assert!(TwoQubitState::from_parts(re, [[0.0; 4]; 4]).is_err());

        // Negative eigenvalue (trace fixed to 1).
        let mut re = [[0.0; 4]; 4];
        re[0][0] = 1.5;
        re[1][1] = -0.5;
        assert!(TwoQubitState::from_parts(re, [[0.0; 4]; 4]).is_err());

        // Non-Hermitian.
        let mut re = [[0.0; 4]; 4];
        re[0][0] = 1.0;
        re[0][1] = 0.3;
        assert!(TwoQubitState::from_parts(re, [[0.0; 4]; 4]).is_err());
    }

    #[test]
    fn standard_state_properties() {
        assert_abs_diff_eq!(TwoQubitState::singlet().purity(), 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(TwoQubitState::maximally_mixed().purity(), 0.25, epsilon = 1e-12);

        let w0 = TwoQubitState::werner(0.0).unwrap();
        assert_eq!(w0, TwoQubitState::maximally_mixed());
        let w1 = TwoQubitState::werner(1.0).unwrap();
        let singlet = TwoQubitState::singlet();
        for r in 0..4 {
            for c in 0..4 {
                assert_abs_diff_eq!(w1.element(r, c).re, singlet.element(r, c).re, epsilon = 1e-15);
                assert_abs_diff_eq!(w1.element(r, c).im, singlet.element(r, c).im, epsilon = 1e-15);
            }
        }
        assert!(TwoQubitState::werner(1.2).is_err());
        assert!(TwoQubitState::werner(-0.1).is_err());
    }

    #[test]
    fn werner_correlator_scales_linearly() {
        let z = [0.0, 0.0, 1.0];
        for p in [0.0, 0.3, 0.7, 1.0] {
            let w = TwoQubitState::werner(p).unwrap();
            assert_abs_diff_eq!(correlator(&w, z, z).unwrap(), -p, epsilon = 1e-12);
        }
    }

    #[test]
    fn noisy_joint_uniform_cases() {
        // Blind measurement: uniform regardless of the state.
        let g0 = GammaFactors::equal(0.0).unwrap();
        let joint = noisy_joint_distribution(
            &TwoQubitState::singlet(),
            &MeasurementSettings::chsh_optimal(),
            &g0,
        )
        .unwrap();
        for (_, p) in joint.iter() {
            assert_abs_diff_eq!(p, 1.0 / 16.0, epsilon = 1e-12);
        }

        // Maximally mixed state: uniform for every feasible gamma.
        let g = GammaFactors::equal(FRAC_1_SQRT_2).unwrap();
        let joint = noisy_joint_distribution(
            &TwoQubitState::maximally_mixed(),
            &MeasurementSettings::chsh_optimal(),
            &g,
        )
        .unwrap();
        for (_, p) in joint.iter() {
            assert_abs_diff_eq!(p, 1.0 / 16.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn noisy_joint_rejects_infeasible_gammas() {
        let g = GammaFactors::equal(0.9).unwrap();
        let res = noisy_joint_distribution(
            &TwoQubitState::singlet(),
            &MeasurementSettings::chsh_optimal(),
            &g,
        );
        assert!(matches!(res, Err(Error::InfeasibleGammas(_))));
    }

    #[test]
    fn noisy_marginals_match_forward_channel() {
        // Product state |00> with all-z settings and gamma_x = 0.6:
        // <X> = 1, so the X' marginal is (0.8, 0.2). With parallel
        // within-party directions positivity needs |g_x| + |g_y| <= 1,
        // hence the smaller companion factors.
        let g_allz = GammaFactors::new(0.6, 0.3, 0.6, 0.3).unwrap();
        let joint = noisy_joint_distribution(
            &TwoQubitState::product_zero_zero(),
            &MeasurementSettings::all_z(),
            &g_allz,
        )
        .unwrap();
        let m = joint.marginal(Observable::X);
        assert_abs_diff_eq!(m.p_plus(), 0.8, epsilon = 1e-10);
        assert_abs_diff_eq!(m.p_minus(), 0.2, epsilon = 1e-10);

        // General consistency: each marginal equals the exact one pushed
        // through the forward channel.
        let g = GammaFactors::new(0.6, 0.6, 0.6, 0.6).unwrap();
        let state = TwoQubitState::werner(0.8).unwrap();
        let settings = MeasurementSettings::chsh_optimal();
        let joint = noisy_joint_distribution(&state, &settings, &g).unwrap();
        for which in Observable::ALL {
            let exact_mean = correlator_of(&state, &settings, which);
            let exact = crate::dist::BinaryDistribution::new(
                (1.0 + exact_mean) / 2.0,
                (1.0 - exact_mean) / 2.0,
            )
            .unwrap();
            let pushed = apply_noise(&exact, 0.6).unwrap();
            let marg = joint.marginal(which);
            assert_abs_diff_eq!(marg.p_plus(), pushed.p_plus(), epsilon = 1e-10);
        }
    }

    fn correlator_of(state: &TwoQubitState, settings: &MeasurementSettings, which: Observable) -> f64 {
        // Single-observable mean <K> = Tr[rho (a_K . sigma) (x) I] (party A)
        // or Tr[rho I (x) (b_K . sigma)] (party B).
        let dir = settings.direction(which);
        let op = match which {
            Observable::X | Observable::Y => kron(&pauli_vector(dir), &Mat2::identity()),
            Observable::U | Observable::V => kron(&Mat2::identity(), &pauli_vector(dir)),
        };
        state.rho.trace_product(&op).re
    }

    #[test]
    fn singlet_marginals_are_uniform() {
        let g = GammaFactors::equal(FRAC_1_SQRT_2).unwrap();
        let joint = noisy_joint_distribution(
            &TwoQubitState::singlet(),
            &MeasurementSettings::chsh_optimal(),
            &g,
        )
        .unwrap();
        for which in Observable::ALL {
            let m = joint.marginal(which);
            assert_abs_diff_eq!(m.p_plus(), 0.5, epsilon = 1e-10);
        }
    }

    #[test]
    fn noisy_correlators_contract_by_gamma_products() {
        let state = TwoQubitState::singlet();
        let settings = MeasurementSettings::chsh_optimal();
        let g = GammaFactors::new(0.5, 0.4, 0.6, 0.3).unwrap();
        let joint = noisy_joint_distribution(&state, &settings, &g).unwrap();
        let exact = correlators(&state, &settings);
        let gammas = g.as_array();
        let cases = [
            (Observable::X, Observable::U, exact.xu, gammas[0] * gammas[2]),
            (Observable::X, Observable::V, exact.xv, gammas[0] * gammas[3]),
            (Observable::Y, Observable::U, exact.yu, gammas[1] * gammas[2]),
            (Observable::Y, Observable::V, exact.yv, gammas[1] * gammas[3]),
        ];
        for (a, b, exact_corr, contraction) in cases {
            assert_abs_diff_eq!(
                joint.pair_correlator(a, b),
                contraction * exact_corr,
                epsilon = 1e-10
            );
        }
    }

    #[test]
    fn name_resolution() {
        assert!(state_by_name("singlet").is_ok());
        assert!(state_by_name("werner:0.5").is_ok());
        assert!(state_by_name("werner:1.5").is_err());
        assert!(state_by_name("bogus").is_err());
        assert!(settings_by_name("chsh-optimal").is_ok());
        assert!(settings_by_name("all-z").is_ok());
        assert!(settings_by_name("nope").is_err());
    }

    #[test]
    fn from_pure_normalizes() {
        let psi = [
            C64::new(0.0, 0.0),
            C64::new(2.0, 0.0),
            C64::new(-2.0, 0.0),
            C64::new(0.0, 0.0),
        ];
        let state = TwoQubitState::from_pure(psi).unwrap();
        assert_abs_diff_eq!(state.purity(), 1.0, epsilon = 1e-12);
        let singlet = TwoQubitState::singlet();
        for r in 0..4 {
            for c in 0..4 {
                assert_abs_diff_eq!(
                    state.element(r, c).re,
                    singlet.element(r, c).re,
                    epsilon = 1e-12
                );
            }
        }
    }
}

//! C ABI for the bellstat library.
//!
//! Scalar operations take out-pointers and return a [`BellstatStatus`];
//! quantum states and measurement settings are opaque handles created and
//! released through the `bellstat_state_*` / `bellstat_settings_*` functions.
//! 16-entry probability arrays use the packed-bit outcome order of the core
//! library: `(x,y,u,v)` with `+1 -> 0`, `-1 -> 1`, index `x<<3|y<<2|u<<1|v`.
//!
//! The C header is generated into `include/bellstat.h` at build time.

use std::ffi::{c_char, CStr};

use bellstat::dist::JointDistribution16;
use bellstat::noise::{self, GammaFactors};
use bellstat::quantum::{self, MeasurementSettings, TwoQubitState};
use bellstat::stats;
use bellstat::Error;

/// Result codes returned by every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BellstatStatus {
    Ok = 0,
    NullPointer = 1,
    /// Malformed call: bad string encoding, unknown catalog name, wrong array length.
    InvalidArgument = 2,
    /// Numerically out-of-domain input (gamma range, probability constraints, state validity).
    DomainError = 3,
    /// Inversion requested for a gamma = 0 kernel.
    SingularInversion = 4,
    /// Gamma factors too large for a positive joint-measurement realization.
    InfeasibleGammas = 5,
}

fn status_of(err: &Error) -> BellstatStatus {
    match err {
        Error::SingularInversion => BellstatStatus::SingularInversion,
        Error::InfeasibleGammas(_) => BellstatStatus::InfeasibleGammas,
        Error::InvalidState(msg) | Error::InvalidSettings(msg) if msg.starts_with("unknown") => {
            BellstatStatus::InvalidArgument
        }
        _ => BellstatStatus::DomainError,
    }
}

/// Static, NUL-terminated name of a status code; never null.
#[no_mangle]
pub extern "C" fn bellstat_status_name(status: BellstatStatus) -> *const c_char {
    let name: &'static [u8] = match status {
        BellstatStatus::Ok => b"ok\0",
        BellstatStatus::NullPointer => b"null pointer\0",
        BellstatStatus::InvalidArgument => b"invalid argument\0",
        BellstatStatus::DomainError => b"domain error\0",
        BellstatStatus::SingularInversion => b"singular inversion\0",
        BellstatStatus::InfeasibleGammas => b"infeasible gammas\0",
    };
    name.as_ptr().cast()
}

macro_rules! try_ffi {
    ($expr:expr) => {
        match $expr {
            Ok(value) => value,
            Err(err) => return status_of(&err),
        }
    };
}

unsafe fn write_out<T>(out: *mut T, value: T) -> BellstatStatus {
    if out.is_null() {
        return BellstatStatus::NullPointer;
    }
    unsafe { out.write(value) };
    BellstatStatus::Ok
}

// ---------------------------------------------------------------------------
// Noise kernels
// ---------------------------------------------------------------------------

/// Forward channel weight `(1 + gamma*kappa*kappa') / 2`.
///
/// # Safety
/// `out` must be a valid pointer to a double.
#[no_mangle]
pub unsafe extern "C" fn bellstat_forward_kernel(
    gamma: f64,
    kappa: i32,
    kappa_prime: i32,
    out: *mut f64,
) -> BellstatStatus {
    let (Ok(k), Ok(kp)) = (i8::try_from(kappa), i8::try_from(kappa_prime)) else {
        return BellstatStatus::InvalidArgument;
    };
    let value = try_ffi!(noise::forward_kernel(gamma, k, kp));
    unsafe { write_out(out, value) }
}

/// Inverse channel weight `(1 + kappa*kappa'/gamma) / 2`.
///
/// # Safety
/// `out` must be a valid pointer to a double.
#[no_mangle]
pub unsafe extern "C" fn bellstat_inverse_kernel(
    gamma: f64,
    kappa: i32,
    kappa_prime: i32,
    out: *mut f64,
) -> BellstatStatus {
    let (Ok(k), Ok(kp)) = (i8::try_from(kappa), i8::try_from(kappa_prime)) else {
        return BellstatStatus::InvalidArgument;
    };
    let value = try_ffi!(noise::inverse_kernel(gamma, k, kp));
    unsafe { write_out(out, value) }
}

/// Variance of a dichotomic variable with the given mean: `1 - mean^2`.
///
/// # Safety
/// `out` must be a valid pointer to a double.
#[no_mangle]
pub unsafe extern "C" fn bellstat_noisy_variance(mean_noisy: f64, out: *mut f64) -> BellstatStatus {
    let value = try_ffi!(noise::noisy_variance(mean_noisy));
    unsafe { write_out(out, value) }
}

/// Inverts all four equal-gamma noise channels on a recorded 16-outcome
/// distribution. `noisy` and `out_quasi` point to 16 doubles each; the result
/// sums to one and may carry negative entries.
///
/// # Safety
/// `noisy` and `out_quasi` must be valid pointers to 16 doubles.
#[no_mangle]
pub unsafe extern "C" fn bellstat_invert_joint(
    noisy: *const f64,
    gamma: f64,
    out_quasi: *mut f64,
) -> BellstatStatus {
    if noisy.is_null() || out_quasi.is_null() {
        return BellstatStatus::NullPointer;
    }
    let probs: [f64; 16] = unsafe { std::slice::from_raw_parts(noisy, 16) }
        .try_into()
        .expect("slice of 16");
    let joint = try_ffi!(JointDistribution16::new(probs));
    let gammas = try_ffi!(GammaFactors::equal(gamma));
    let quasi = try_ffi!(noise::invert_joint(&joint, &gammas));
    unsafe { std::ptr::copy_nonoverlapping(quasi.as_array().as_ptr(), out_quasi, 16) };
    BellstatStatus::Ok
}

// ---------------------------------------------------------------------------
// Finite-N statistics
// ---------------------------------------------------------------------------

/// The noise-adapted bound `2 gamma^2`.
#[no_mangle]
pub extern "C" fn bellstat_noisy_bound(gamma: f64) -> f64 {
    stats::noisy_bound(gamma)
}

/// Two-point law of s': `p(+-2) = 1/2 +- gamma^2 s / 4`.
///
/// # Safety
/// `out_p_plus2` and `out_p_minus2` must be valid pointers to doubles.
#[no_mangle]
pub unsafe extern "C" fn bellstat_s_prime_distribution(
    s: f64,
    gamma: f64,
    out_p_plus2: *mut f64,
    out_p_minus2: *mut f64,
) -> BellstatStatus {
    if out_p_plus2.is_null() || out_p_minus2.is_null() {
        return BellstatStatus::NullPointer;
    }
    let dist = try_ffi!(stats::SPrimeDistribution::from_chsh(s, gamma));
    unsafe {
        out_p_plus2.write(dist.p_plus2());
        out_p_minus2.write(dist.p_minus2());
    }
    BellstatStatus::Ok
}

/// Window of counts that do not violate the adapted bound.
///
/// # Safety
/// `out_n_c` and `out_n_f` must be valid pointers to 64-bit integers.
#[no_mangle]
pub unsafe extern "C" fn bellstat_violation_thresholds(
    n_trials: u64,
    gamma: f64,
    out_n_c: *mut i64,
    out_n_f: *mut i64,
) -> BellstatStatus {
    if out_n_c.is_null() || out_n_f.is_null() {
        return BellstatStatus::NullPointer;
    }
    let (n_c, n_f) = try_ffi!(stats::violation_thresholds(n_trials, gamma));
    unsafe {
        out_n_c.write(n_c);
        out_n_f.write(n_f);
    }
    BellstatStatus::Ok
}

/// Exact probability that the N-trial mean violates the adapted bound.
///
/// # Safety
/// `out` must be a valid pointer to a double.
#[no_mangle]
pub unsafe extern "C" fn bellstat_exact_violation_probability(
    n_trials: u64,
    s: f64,
    gamma: f64,
    out: *mut f64,
) -> BellstatStatus {
    let value = try_ffi!(stats::exact_violation_probability(n_trials, s, gamma));
    unsafe { write_out(out, value) }
}

/// Gaussian approximation of the exact violation probability.
///
/// # Safety
/// `out` must be a valid pointer to a double.
#[no_mangle]
pub unsafe extern "C" fn bellstat_gaussian_violation_probability(
    n_trials: u64,
    s: f64,
    gamma: f64,
    out: *mut f64,
) -> BellstatStatus {
    let value = try_ffi!(stats::gaussian_violation_probability(n_trials, s, gamma));
    unsafe { write_out(out, value) }
}

/// Checks that the adapted-bound and data-inversion routes declare the same
/// violating counts with bit-identical probability.
///
/// # Safety
/// `out` must be a valid pointer to a bool.
#[no_mangle]
pub unsafe extern "C" fn bellstat_route_equivalence_check(
    n_trials: u64,
    s: f64,
    gamma: f64,
    out: *mut bool,
) -> BellstatStatus {
    let value = try_ffi!(stats::route_equivalence_check(n_trials, s, gamma));
    unsafe { write_out(out, value) }
}

/// Runs `reps` seeded N-trial experiments and writes the empirical violation
/// rate. Deterministic for a fixed seed, independent of worker count.
///
/// # Safety
/// `out_rate` must be a valid pointer to a double.
#[no_mangle]
pub unsafe extern "C" fn bellstat_simulate_violation_rate(
    n_trials: u64,
    reps: u64,
    seed: u64,
    s: f64,
    gamma: f64,
    out_rate: *mut f64,
) -> BellstatStatus {
    let dist = try_ffi!(stats::SPrimeDistribution::from_chsh(s, gamma));
    let spec = try_ffi!(bellstat::monte_carlo::SimulationSpec::new(
        n_trials,
        reps,
        seed,
        bellstat::monte_carlo::SampleSource::SPrime(dist),
    ));
    let result = try_ffi!(bellstat::monte_carlo::estimate_violation_rate(&spec, gamma));
    unsafe { write_out(out_rate, result.empirical_violation_rate) }
}

// ---------------------------------------------------------------------------
// Opaque quantum handles
// ---------------------------------------------------------------------------

/// Opaque two-qubit density matrix.
pub struct BellstatState(TwoQubitState);

/// Opaque CHSH measurement settings (four unit Bloch vectors).
pub struct BellstatSettings(MeasurementSettings);

unsafe fn name_from<'a>(ptr: *const c_char) -> Result<&'a str, BellstatStatus> {
    if ptr.is_null() {
        return Err(BellstatStatus::NullPointer);
    }
    unsafe { CStr::from_ptr(ptr) }
        .to_str()
        .map_err(|_| BellstatStatus::InvalidArgument)
}

/// Creates a catalog state: `singlet`, `product00`, `maximally-mixed`, or
/// `werner:P`. The handle must be released with [`bellstat_state_free`].
///
/// # Safety
/// `name` must be a valid NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn bellstat_state_new_named(
    name: *const c_char,
    out: *mut *mut BellstatState,
) -> BellstatStatus {
    if out.is_null() {
        return BellstatStatus::NullPointer;
    }
    let name = match unsafe { name_from(name) } {
        Ok(n) => n,
        Err(status) => return status,
    };
    let state = try_ffi!(quantum::state_by_name(name));
    unsafe { out.write(Box::into_raw(Box::new(BellstatState(state)))) };
    BellstatStatus::Ok
}

/// Creates a Werner state with singlet weight `p` in `[0, 1]`.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn bellstat_state_new_werner(
    p: f64,
    out: *mut *mut BellstatState,
) -> BellstatStatus {
    if out.is_null() {
        return BellstatStatus::NullPointer;
    }
    let state = try_ffi!(TwoQubitState::werner(p));
    unsafe { out.write(Box::into_raw(Box::new(BellstatState(state)))) };
    BellstatStatus::Ok
}

/// Creates a state from real and imaginary parts, each 16 doubles row-major.
/// The matrix must be Hermitian, unit-trace, and positive semidefinite.
///
/// # Safety
/// `re` and `im` must point to 16 doubles each; `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn bellstat_state_new_from_parts(
    re: *const f64,
    im: *const f64,
    out: *mut *mut BellstatState,
) -> BellstatStatus {
    if re.is_null() || im.is_null() || out.is_null() {
        return BellstatStatus::NullPointer;
    }
    let mut re_rows = [[0.0; 4]; 4];
    let mut im_rows = [[0.0; 4]; 4];
    for r in 0..4 {
        for c in 0..4 {
            re_rows[r][c] = unsafe { *re.add(4 * r + c) };
            im_rows[r][c] = unsafe { *im.add(4 * r + c) };
        }
    }
    let state = try_ffi!(TwoQubitState::from_parts(re_rows, im_rows));
    unsafe { out.write(Box::into_raw(Box::new(BellstatState(state)))) };
    BellstatStatus::Ok
}

/// Releases a state handle. Null is a no-op.
///
/// # Safety
/// `state` must be null or a pointer previously returned by a
/// `bellstat_state_new_*` function, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn bellstat_state_free(state: *mut BellstatState) {
    if !state.is_null() {
        drop(unsafe { Box::from_raw(state) });
    }
}

/// Creates catalog settings: `chsh-optimal` or `all-z`. Release with
/// [`bellstat_settings_free`].
///
/// # Safety
/// `name` must be a valid NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn bellstat_settings_new_named(
    name: *const c_char,
    out: *mut *mut BellstatSettings,
) -> BellstatStatus {
    if out.is_null() {
        return BellstatStatus::NullPointer;
    }
    let name = match unsafe { name_from(name) } {
        Ok(n) => n,
        Err(status) => return status,
    };
    let settings = try_ffi!(quantum::settings_by_name(name));
    unsafe { out.write(Box::into_raw(Box::new(BellstatSettings(settings)))) };
    BellstatStatus::Ok
}

/// Creates settings from four unit Bloch vectors of 3 doubles each.
///
/// # Safety
/// Each direction must point to 3 doubles; `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn bellstat_settings_new(
    a_x: *const f64,
    a_y: *const f64,
    b_u: *const f64,
    b_v: *const f64,
    out: *mut *mut BellstatSettings,
) -> BellstatStatus {
    if a_x.is_null() || a_y.is_null() || b_u.is_null() || b_v.is_null() || out.is_null() {
        return BellstatStatus::NullPointer;
    }
    let vec3 = |p: *const f64| unsafe { [*p, *p.add(1), *p.add(2)] };
    let settings = try_ffi!(MeasurementSettings::new(vec3(a_x), vec3(a_y), vec3(b_u), vec3(b_v)));
    unsafe { out.write(Box::into_raw(Box::new(BellstatSettings(settings)))) };
    BellstatStatus::Ok
}

/// Releases a settings handle. Null is a no-op.
///
/// # Safety
/// `settings` must be null or a pointer previously returned by a
/// `bellstat_settings_new*` function, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn bellstat_settings_free(settings: *mut BellstatSettings) {
    if !settings.is_null() {
        drop(unsafe { Box::from_raw(settings) });
    }
}

/// The CHSH combination `S = <XU> - <XV> + <YU> + <YV>` for a state and
/// settings.
///
/// # Safety
/// `state` and `settings` must be live handles; `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn bellstat_chsh_value(
    state: *const BellstatState,
    settings: *const BellstatSettings,
    out: *mut f64,
) -> BellstatStatus {
    if state.is_null() || settings.is_null() {
        return BellstatStatus::NullPointer;
    }
    let value = unsafe { quantum::chsh_value(&(*state).0, &(*settings).0) };
    unsafe { write_out(out, value) }
}

/// The 16-outcome distribution of the noisy joint measurement with equal
/// accuracy factor `gamma`; writes 16 doubles in packed-bit outcome order.
///
/// # Safety
/// `state` and `settings` must be live handles; `out_probs` must point to 16
/// doubles.
#[no_mangle]
pub unsafe extern "C" fn bellstat_noisy_joint_distribution(
    state: *const BellstatState,
    settings: *const BellstatSettings,
    gamma: f64,
    out_probs: *mut f64,
) -> BellstatStatus {
    if state.is_null() || settings.is_null() || out_probs.is_null() {
        return BellstatStatus::NullPointer;
    }
    let gammas = try_ffi!(GammaFactors::equal(gamma));
    let joint =
        try_ffi!(unsafe { quantum::noisy_joint_distribution(&(*state).0, &(*settings).0, &gammas) });
    unsafe { std::ptr::copy_nonoverlapping(joint.as_array().as_ptr(), out_probs, 16) };
    BellstatStatus::Ok
}

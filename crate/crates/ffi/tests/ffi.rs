//! Exercises the C ABI from Rust: status codes, out-parameters, and handle
//! lifecycle.

use std::f64::consts::{FRAC_1_SQRT_2, SQRT_2};
use std::ffi::CString;
use std::ptr;

use bellstat_ffi::*;

#[test]
fn scalar_kernels_round_trip() {
    let mut fwd = 0.0f64;
    let status = unsafe { bellstat_forward_kernel(FRAC_1_SQRT_2, 1, 1, &mut fwd) };
    assert_eq!(status, BellstatStatus::Ok);
    assert!((fwd - (1.0 + FRAC_1_SQRT_2) / 2.0).abs() < 1e-15);

    let mut inv = 0.0f64;
    let status = unsafe { bellstat_inverse_kernel(FRAC_1_SQRT_2, 1, 1, &mut inv) };
    assert_eq!(status, BellstatStatus::Ok);
    assert!((inv - (1.0 + SQRT_2) / 2.0).abs() < 1e-15);

    let status = unsafe { bellstat_inverse_kernel(0.0, 1, 1, &mut inv) };
    assert_eq!(status, BellstatStatus::SingularInversion);

    let status = unsafe { bellstat_forward_kernel(1.5, 1, 1, &mut fwd) };
    assert_eq!(status, BellstatStatus::DomainError);

    let status = unsafe { bellstat_forward_kernel(0.5, 1, 1, ptr::null_mut()) };
    assert_eq!(status, BellstatStatus::NullPointer);
}

#[test]
fn statistics_surface() {
    assert_eq!(bellstat_noisy_bound(1.0), 2.0);

    let (mut p_plus, mut p_minus) = (0.0f64, 0.0f64);
    let status = unsafe {
        bellstat_s_prime_distribution(2.0 * SQRT_2, FRAC_1_SQRT_2, &mut p_plus, &mut p_minus)
    };
    assert_eq!(status, BellstatStatus::Ok);
    assert!((p_plus - (0.5 + SQRT_2 / 4.0)).abs() < 1e-15);

    let (mut n_c, mut n_f) = (0i64, 0i64);
    let status = unsafe { bellstat_violation_thresholds(2, FRAC_1_SQRT_2, &mut n_c, &mut n_f) };
    assert_eq!(status, BellstatStatus::Ok);
    assert_eq!((n_c, n_f), (1, 1));

    let mut p = 0.0f64;
    let status = unsafe { bellstat_exact_violation_probability(1, 0.0, FRAC_1_SQRT_2, &mut p) };
    assert_eq!(status, BellstatStatus::Ok);
    assert_eq!(p, 1.0);

    let mut gauss = 0.0f64;
    let status =
        unsafe { bellstat_gaussian_violation_probability(100, 2.0, FRAC_1_SQRT_2, &mut gauss) };
    assert_eq!(status, BellstatStatus::Ok);
    unsafe { bellstat_exact_violation_probability(100, 2.0, FRAC_1_SQRT_2, &mut p) };
    assert!((gauss - p).abs() < 0.05);

    let mut equal = false;
    let status = unsafe { bellstat_route_equivalence_check(100, 2.0, FRAC_1_SQRT_2, &mut equal) };
    assert_eq!(status, BellstatStatus::Ok);
    assert!(equal);

    let mut rate = 0.0f64;
    let status =
        unsafe { bellstat_simulate_violation_rate(1, 1000, 7, 0.0, FRAC_1_SQRT_2, &mut rate) };
    assert_eq!(status, BellstatStatus::Ok);
    assert_eq!(rate, 1.0);
}

#[test]
fn quantum_handles_full_chain() {
    let singlet_name = CString::new("singlet").unwrap();
    let settings_name = CString::new("chsh-optimal").unwrap();

    let mut state: *mut BellstatState = ptr::null_mut();
    let status = unsafe { bellstat_state_new_named(singlet_name.as_ptr(), &mut state) };
    assert_eq!(status, BellstatStatus::Ok);
    assert!(!state.is_null());

    let mut settings: *mut BellstatSettings = ptr::null_mut();
    let status = unsafe { bellstat_settings_new_named(settings_name.as_ptr(), &mut settings) };
    assert_eq!(status, BellstatStatus::Ok);

    let mut s = 0.0f64;
    let status = unsafe { bellstat_chsh_value(state, settings, &mut s) };
    assert_eq!(status, BellstatStatus::Ok);
    assert!((s - 2.0 * SQRT_2).abs() < 1e-12);

    let mut probs = [0.0f64; 16];
    let status = unsafe {
        bellstat_noisy_joint_distribution(state, settings, FRAC_1_SQRT_2, probs.as_mut_ptr())
    };
    assert_eq!(status, BellstatStatus::Ok);
    let total: f64 = probs.iter().sum();
    assert!((total - 1.0).abs() < 1e-10);

    // Inverting the measured joint reproduces negativity.
    let mut quasi = [0.0f64; 16];
    let status =
        unsafe { bellstat_invert_joint(probs.as_ptr(), FRAC_1_SQRT_2, quasi.as_mut_ptr()) };
    assert_eq!(status, BellstatStatus::Ok);
    let min = quasi.iter().copied().fold(f64::INFINITY, f64::min);
    assert!(min < -1e-6, "expected negativity, min entry {min}");

    // Infeasible gamma for these settings.
    let status = unsafe {
        bellstat_noisy_joint_distribution(state, settings, 0.9, probs.as_mut_ptr())
    };
    assert_eq!(status, BellstatStatus::InfeasibleGammas);

    unsafe {
        bellstat_state_free(state);
        bellstat_settings_free(settings);
        bellstat_state_free(ptr::null_mut());
    }
}

#[test]
fn named_lookup_errors() {
    let bogus = CString::new("bogus").unwrap();
    let mut state: *mut BellstatState = ptr::null_mut();
    let status = unsafe { bellstat_state_new_named(bogus.as_ptr(), &mut state) };
    assert_eq!(status, BellstatStatus::InvalidArgument);
    assert!(state.is_null());

    let mut werner: *mut BellstatState = ptr::null_mut();
    let status = unsafe { bellstat_state_new_werner(1.5, &mut werner) };
    assert_eq!(status, BellstatStatus::DomainError);

    let status = unsafe { bellstat_state_new_named(ptr::null(), &mut state) };
    assert_eq!(status, BellstatStatus::NullPointer);
}

#[test]
fn status_names_are_stable() {
    let name = bellstat_status_name(BellstatStatus::SingularInversion);
    let text = unsafe { std::ffi::CStr::from_ptr(name) }.to_str().unwrap();
    assert_eq!(text, "singular inversion");
}

#[test]
fn state_from_parts_validates() {
    // Maximally mixed state, row-major.
    let mut re = [0.0f64; 16];
    for i in 0..4 {
        re[5 * i] = 0.25;
    }
    let im = [0.0f64; 16];
    let mut state: *mut BellstatState = ptr::null_mut();
    let status = unsafe { bellstat_state_new_from_parts(re.as_ptr(), im.as_ptr(), &mut state) };
    assert_eq!(status, BellstatStatus::Ok);
    unsafe { bellstat_state_free(state) };

    // Trace 2 is rejected.
    let mut bad = re;
    bad[0] = 1.25;
    let status = unsafe { bellstat_state_new_from_parts(bad.as_ptr(), im.as_ptr(), &mut state) };
    assert_eq!(status, BellstatStatus::DomainError);
}

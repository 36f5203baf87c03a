//! Exercises the C entry points end to end from Rust, including the
//! error and null-pointer paths, and checks the generated header.

use std::ffi::CStr;
use std::path::Path;
use std::ptr;

use macsig_ffi::*;

unsafe fn new_params(p1: f64, e1: f64, e2: f64, n0: f64, c1: f64, c2: f64) -> *mut MacsigParams {
    let mut handle: *mut MacsigParams = ptr::null_mut();
    let status = macsig_params_new(p1, e1, e2, n0, c1, c2, &mut handle);
    assert_eq!(status, MacsigStatus::Ok);
    assert!(!handle.is_null());
    handle
}

#[test]
fn full_analysis_round_trip() {
    unsafe {
        let h = new_params(0.4, 0.01, 0.05, 1.0, 1.0, 1.0);

        let mut class = MacsigClassification {
            case_: MacsigCase::I,
            lower_threshold: 0.0,
            upper_threshold: 0.0,
        };
        assert_eq!(macsig_classify(h, &mut class), MacsigStatus::Ok);
        assert_eq!(class.case_, MacsigCase::III);
        assert!(class.lower_threshold > 0.0 && class.lower_threshold <= class.upper_threshold);

        let mut alloc = MacsigAllocation {
            case_: MacsigCase::I,
            p1_star: 0.0,
            p2_star: 0.0,
            pe_star: 0.0,
            p2_capped: true,
        };
        assert_eq!(macsig_optimal_allocation(h, &mut alloc), MacsigStatus::Ok);
        assert!((alloc.p1_star - 1.0).abs() < 1e-15);
        assert!((alloc.p2_star - 0.763696431027174).abs() < 1e-12);
        assert!(!alloc.p2_capped);

        let mut tilde = 0.0;
        assert_eq!(macsig_p2_tilde(h, 1.0, &mut tilde), MacsigStatus::Ok);
        assert_eq!(tilde, alloc.p2_star);

        let mut pe = 0.0;
        assert_eq!(
            macsig_error_probability(h, alloc.p1_star, alloc.p2_star, &mut pe),
            MacsigStatus::Ok
        );
        assert_eq!(pe, alloc.pe_star);

        let mut roots = [0.0; 3];
        let mut count = 0usize;
        assert_eq!(
            macsig_boundaries(h, 1.0, 2.0, roots.as_mut_ptr(), &mut count),
            MacsigStatus::Ok
        );
        assert_eq!(count, 3);
        assert!(roots[0] < roots[1] && roots[1] < roots[2]);

        let limit = macsig_high_snr_limit(h, MacsigPolicy::Optimal);
        assert_eq!(limit, 0.01);

        macsig_params_free(h);
    }
}

#[test]
fn simulation_matches_native_call_and_is_deterministic() {
    unsafe {
        let h = new_params(0.4, 0.01, 0.05, 1.0, 1.0, 1.0);
        let run = |seed: u64| {
            let mut report = MacsigSimReport {
                errors: 0,
                trials: 0,
                pe_hat: 0.0,
                ci95_halfwidth: 0.0,
                seed: 0,
                ci_reliable: false,
            };
            let status = macsig_simulate(
                h,
                MacsigScheme::MacOptimalAsym,
                1.0,
                0.7637,
                200_000,
                seed,
                &mut report,
            );
            assert_eq!(status, MacsigStatus::Ok);
            report
        };
        let a = run(9);
        let b = run(9);
        assert_eq!(a.errors, b.errors);
        assert_eq!(a.pe_hat, b.pe_hat);
        assert!(a.ci_reliable);

        let params = macsig::ModelParams::new(0.4, 0.01, 0.05, 1.0, 1.0, 1.0).unwrap();
        let config = macsig::SimConfig {
            trials: 200_000,
            seed: 9,
            scheme: macsig::Scheme::MacOptimalAsym,
            alloc: (1.0, 0.7637),
        };
        let native = macsig::simulate(&params, &config).unwrap();
        assert_eq!(a.errors, native.errors);
        assert_eq!(a.pe_hat, native.pe_hat);
        macsig_params_free(h);
    }
}

#[test]
fn error_paths_set_status_and_message() {
    unsafe {
        let mut handle: *mut MacsigParams = ptr::null_mut();
        let status = macsig_params_new(0.6, 0.01, 0.05, 1.0, 1.0, 1.0, &mut handle);
        assert_eq!(status, MacsigStatus::DomainError);
        assert!(handle.is_null());
        let msg = CStr::from_ptr(macsig_last_error_message()).to_str().unwrap();
        assert!(msg.contains("p1"), "unhelpful message: {msg}");

        // Interior optimum requests outside Case III report a case error.
        let h = new_params(0.3, 0.1, 0.15, 1.0, 1.0, 1.0);
        let mut tilde = 0.0;
        assert_eq!(macsig_p2_tilde(h, 1.0, &mut tilde), MacsigStatus::CaseError);

        // Amplitudes beyond the cap are rejected by the simulator.
        let mut report = MacsigSimReport {
            errors: 0,
            trials: 0,
            pe_hat: 0.0,
            ci95_halfwidth: 0.0,
            seed: 0,
            ci_reliable: false,
        };
        assert_eq!(
            macsig_simulate(h, MacsigScheme::MacOptimalAsym, 5.0, 0.5, 1000, 1, &mut report),
            MacsigStatus::CapError
        );

        assert_eq!(macsig_classify(ptr::null(), ptr::null_mut()), MacsigStatus::NullPointer);
        assert_eq!(
            macsig_params_new(0.4, 0.01, 0.05, 1.0, 1.0, 1.0, ptr::null_mut()),
            MacsigStatus::NullPointer
        );
        assert!(macsig_high_snr_limit(ptr::null(), MacsigPolicy::Optimal).is_nan());
        macsig_params_free(ptr::null_mut());

        let name = CStr::from_ptr(macsig_status_name(MacsigStatus::CapError));
        assert_eq!(name.to_str().unwrap(), "cap error");
        macsig_params_free(h);
    }
}

#[test]
fn generated_header_covers_the_api() {
    let header = Path::new(env!("CARGO_MANIFEST_DIR")).join("include/macsig.h");
    let text = std::fs::read_to_string(header).expect("include/macsig.h missing");
    for needle in [
        "typedef struct MacsigParams MacsigParams;",
        "MACSIG_STATUS_OK",
        "macsig_params_new",
        "macsig_params_free",
        "macsig_classify",
        "macsig_optimal_allocation",
        "macsig_error_probability",
        "macsig_boundaries",
        "macsig_p2_tilde",
        "macsig_high_snr_limit",
        "macsig_simulate",
        "macsig_status_name",
        "macsig_last_error_message",
    ] {
        assert!(text.contains(needle), "header is missing {needle}");
    }
}

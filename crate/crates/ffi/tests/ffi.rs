use std::ffi::{c_char, CString};
use std::ptr;

use lagrange_ffi::*;

fn last_error() -> String {
    let mut buf = vec![0 as c_char; 256];
    let len = unsafe { lg_last_error_message(buf.as_mut_ptr(), buf.len()) };
    let bytes: Vec<u8> = buf[..len.min(255)].iter().map(|&c| c as u8).collect();
    String::from_utf8(bytes).unwrap()
}

fn hand_problem() -> *mut LgProblem {
    let a = [1.0, 0.0, 0.0, 1.0];
    let b = [1.0, 1.0];
    let c = [1.0, 0.0];
    let mut p = ptr::null_mut();
    let st = unsafe {
        lg_problem_new_dense(
            2,
            1,
            a.as_ptr(),
            b.as_ptr(),
            c.as_ptr(),
            ptr::null(),
            &mut p,
        )
    };
    assert_eq!(st, LgStatus::Ok);
    p
}

#[test]
fn hand_instance_through_every_method() {
    let p = hand_problem();
    unsafe {
        assert_eq!((lg_problem_n(p), lg_problem_m(p)), (2, 1));
        for method in [LgMethod::Direct, LgMethod::Nullspace, LgMethod::Schur] {
            let mut s = ptr::null_mut();
            assert_eq!(lg_solve(p, method, 1e-12, &mut s), LgStatus::Ok);
            let mut x = [f64::NAN; 2];
            let mut l = [f64::NAN; 1];
            assert_eq!(lg_solution_x(s, x.as_mut_ptr(), 2), LgStatus::Ok);
            assert_eq!(lg_solution_lambda(s, l.as_mut_ptr(), 1), LgStatus::Ok);
            assert!(x[0].abs() <= 1e-12 && (x[1] - 1.0).abs() <= 1e-12);
            assert!((l[0] + 1.0).abs() <= 1e-12);
            let (mut rs, mut rf) = (f64::NAN, f64::NAN);
            assert_eq!(lg_solution_residuals(s, &mut rs, &mut rf), LgStatus::Ok);
            assert!(rs <= 1e-12 && rf <= 1e-12);
            assert_eq!(
                lg_solution_x(s, x.as_mut_ptr(), 1),
                LgStatus::BufferTooSmall
            );
            lg_solution_free(s);
        }
        let mut beta = 0.0;
        assert_eq!(lg_infsup(p, &mut beta), LgStatus::Ok);
        assert!((beta - 1.0).abs() <= 1e-14);
        lg_problem_free(p);
    }
}

#[test]
fn errors_carry_codes_and_messages() {
    let a = [1.0, 0.0, 0.0, 1.0];
    let b = [0.0, 0.0];
    let c = [1.0, 1.0, 2.0, 2.0];
    let mut p = ptr::null_mut();
    unsafe {
        let st = lg_problem_new_dense(
            2,
            2,
            a.as_ptr(),
            b.as_ptr(),
            c.as_ptr(),
            ptr::null(),
            &mut p,
        );
        assert_ne!(st, LgStatus::Ok);
        assert!(p.is_null());
        assert!(!last_error().is_empty());

        let dependent = [1.0, 1.0, 0.0, 2.0, 2.0, 0.0];
        let a3 = [1.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 1.0];
        let st = lg_problem_new_dense(
            3,
            2,
            a3.as_ptr(),
            [0.0; 3].as_ptr(),
            dependent.as_ptr(),
            ptr::null(),
            &mut p,
        );
        assert_eq!(st, LgStatus::RankDeficient);

        let skew = [1.0, 2.0, 0.0, 1.0];
        let st = lg_problem_new_dense(
            2,
            1,
            skew.as_ptr(),
            b.as_ptr(),
            [1.0, 0.0].as_ptr(),
            ptr::null(),
            &mut p,
        );
        assert_ne!(st, LgStatus::Ok);

        assert_eq!(
            lg_solve(ptr::null(), LgMethod::Direct, 1e-10, &mut ptr::null_mut()),
            LgStatus::NullPointer
        );
        assert!(last_error().contains("null"));

        let missing = CString::new("/nonexistent/lagrange").unwrap();
        assert_eq!(lg_problem_load(missing.as_ptr(), &mut p), LgStatus::Io);
        assert!(last_error().contains("A.mtx"));
    }
}

#[test]
fn stokes_through_the_c_interface() {
    let case = CString::new("taylor_green").unwrap();
    let mut s = LgStokesSummary::default();
    unsafe {
        assert_eq!(lg_stokes_run(8, case.as_ptr(), 1e-12, &mut s), LgStatus::Ok);
        assert!(s.velocity_gap <= 1e-8 && s.pressure_gap <= 1e-8);
        assert!(s.divergence <= 1e-10);
        assert!(s.l2_u > 0.0 && s.l2_u.is_finite());

        let bad = CString::new("vortex").unwrap();
        assert_eq!(
            lg_stokes_run(8, bad.as_ptr(), 1e-12, &mut s),
            LgStatus::InvalidArgument
        );
        assert_eq!(
            lg_stokes_run(1, case.as_ptr(), 1e-12, &mut s),
            LgStatus::InvalidArgument
        );

        let mut beta = 0.0;
        assert_eq!(lg_stokes_infsup(4, &mut beta), LgStatus::Ok);
        assert!((beta - 0.625_647_954_941_382).abs() <= 1e-8);
    }
}

#[test]
fn null_handles_are_tolerated() {
    unsafe {
        lg_problem_free(ptr::null_mut());
        lg_solution_free(ptr::null_mut());
        assert_eq!(lg_problem_n(ptr::null()), 0);
        let _ = lg_last_error_message(ptr::null_mut(), 0);
    }
}

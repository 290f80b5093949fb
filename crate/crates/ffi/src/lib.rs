//! C interface to `lagrange-core`.
//!
//! Problems and solutions are opaque handles owned by the caller and released
//! with the matching `*_free` function. Every fallible call returns an
//! [`LgStatus`]; the message of the most recent failure on the calling thread
//! is available from `lg_last_error_message`. Panics never cross the
//! boundary.

use std::cell::RefCell;
use std::ffi::{c_char, CStr};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::ptr;

use lagrange_core::linalg::vector::{norm2, rel_diff};
use lagrange_core::linalg::{SparseOperator, Symmetry};
use lagrange_core::qp::{self, InfSupForm, Method, QpProblem, SaddleSolution};
use lagrange_core::stokes;
use lagrange_core::Error;

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LgStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    DimensionMismatch = 3,
    RankDeficient = 4,
    Singular = 5,
    NotConverged = 6,
    NotOptimal = 7,
    Io = 8,
    Parse = 9,
    BufferTooSmall = 10,
    Panic = 11,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LgMethod {
    Direct = 0,
    Nullspace = 1,
    Schur = 2,
}

impl From<LgMethod> for Method {
    fn from(m: LgMethod) -> Self {
        match m {
            LgMethod::Direct => Method::Direct,
            LgMethod::Nullspace => Method::Nullspace,
            LgMethod::Schur => Method::Schur,
        }
    }
}

/// Outcome of `lg_stokes_run`.
#[repr(C)]
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct LgStokesSummary {
    /// Relative velocity difference between the coupled and minimization
    /// solves.
    pub velocity_gap: f64,
    /// Same for the zero-mean pressures.
    pub pressure_gap: f64,
    /// Largest `|Bu| / |u|` of the two velocities.
    pub divergence: f64,
    pub l2_u: f64,
    pub l2_p: f64,
    pub linf_u: f64,
}

/// Opaque program handle.
pub struct LgProblem(QpProblem);

/// Opaque solution handle.
pub struct LgSolution(SaddleSolution);

thread_local! {
    static LAST_ERROR: RefCell<String> = const { RefCell::new(String::new()) };
}

fn set_error(msg: String) {
    LAST_ERROR.with(|e| *e.borrow_mut() = msg);
}

fn status_of(err: &Error) -> LgStatus {
    match err {
        Error::DimensionMismatch { .. } => LgStatus::DimensionMismatch,
        Error::RankDeficient { .. } => LgStatus::RankDeficient,
        Error::Singular { .. } | Error::NotPositiveDefinite { .. } => LgStatus::Singular,
        Error::NotConverged { .. } | Error::Breakdown { .. } => LgStatus::NotConverged,
        Error::NotOptimal { .. } | Error::Infeasible { .. } => LgStatus::NotOptimal,
        Error::Io { .. } => LgStatus::Io,
        Error::Parse { .. } => LgStatus::Parse,
        _ => LgStatus::InvalidArgument,
    }
}

fn guard(f: impl FnOnce() -> Result<(), LgStatus>) -> LgStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => LgStatus::Ok,
        Ok(Err(s)) => s,
        Err(_) => {
            set_error("internal panic".into());
            LgStatus::Panic
        }
    }
}

fn fail(err: Error) -> LgStatus {
    let s = status_of(&err);
    set_error(err.to_string());
    s
}

fn null(what: &str) -> LgStatus {
    set_error(format!("{what} is null"));
    LgStatus::NullPointer
}

unsafe fn slice<'a>(p: *const f64, len: usize, what: &str) -> Result<&'a [f64], LgStatus> {
    if len == 0 {
        return Ok(&[]);
    }
    if p.is_null() {
        return Err(null(what));
    }
    Ok(std::slice::from_raw_parts(p, len))
}

unsafe fn c_str<'a>(p: *const c_char, what: &str) -> Result<&'a str, LgStatus> {
    if p.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(p).to_str().map_err(|_| {
        set_error(format!("{what} is not valid UTF-8"));
        LgStatus::InvalidArgument
    })
}

/// Copies the last error message of this thread into `buf` (NUL-terminated,
/// truncated to `len`). Returns the full message length without the NUL.
///
/// # Safety
/// `buf` must be null or point to `len` writable bytes.
#[no_mangle]
pub unsafe extern "C" fn lg_last_error_message(buf: *mut c_char, len: usize) -> usize {
    LAST_ERROR.with(|e| {
        let msg = e.borrow();
        if !buf.is_null() && len > 0 {
            let n = msg.len().min(len - 1);
            ptr::copy_nonoverlapping(msg.as_ptr().cast::<c_char>(), buf, n);
            *buf.add(n) = 0;
        }
        msg.len()
    })
}

/// Builds a program from dense row-major data: `a` is `n x n` and must be
/// symmetric positive definite, `c` is `m x n` with full row rank. `d` may
/// be null for a homogeneous constraint.
///
/// # Safety
/// Each non-null pointer must reference the stated number of doubles; `out`
/// must be valid for a write.
#[no_mangle]
pub unsafe extern "C" fn lg_problem_new_dense(
    n: usize,
    m: usize,
    a: *const f64,
    b: *const f64,
    c: *const f64,
    d: *const f64,
    out: *mut *mut LgProblem,
) -> LgStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let a = slice(a, n * n, "a")?;
        let b = slice(b, n, "b")?;
        let c = slice(c, m * n, "c")?;
        let d = if d.is_null() {
            vec![0.0; m]
        } else {
            slice(d, m, "d")?.to_vec()
        };
        let a = SparseOperator::from_dense(n, n, a, Symmetry::Symmetric).map_err(fail)?;
        let c = SparseOperator::from_dense(m, n, c, Symmetry::General).map_err(fail)?;
        let p = QpProblem::new(a, b.to_vec(), c, d).map_err(fail)?;
        *out = Box::into_raw(Box::new(LgProblem(p)));
        Ok(())
    })
}

/// Loads `A.mtx`, `C.mtx`, `b.txt` and optional `d.txt` from `dir`.
///
/// # Safety
/// `dir` must be a NUL-terminated string; `out` must be valid for a write.
#[no_mangle]
pub unsafe extern "C" fn lg_problem_load(dir: *const c_char, out: *mut *mut LgProblem) -> LgStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let dir = c_str(dir, "dir")?;
        let p = qp::io::load_problem_dir(Path::new(dir)).map_err(fail)?;
        *out = Box::into_raw(Box::new(LgProblem(p)));
        Ok(())
    })
}

/// # Safety
/// `p` must be null or a handle from this library not yet freed.
#[no_mangle]
pub unsafe extern "C" fn lg_problem_free(p: *mut LgProblem) {
    if !p.is_null() {
        drop(Box::from_raw(p));
    }
}

/// Number of unknowns, or 0 for a null handle.
///
/// # Safety
/// `p` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn lg_problem_n(p: *const LgProblem) -> usize {
    p.as_ref().map_or(0, |p| p.0.n())
}

/// Number of constraints, or 0 for a null handle.
///
/// # Safety
/// `p` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn lg_problem_m(p: *const LgProblem) -> usize {
    p.as_ref().map_or(0, |p| p.0.m())
}

/// # Safety
/// `p` must be a live handle and `out` valid for a write.
#[no_mangle]
pub unsafe extern "C" fn lg_solve(
    p: *const LgProblem,
    method: LgMethod,
    tol: f64,
    out: *mut *mut LgSolution,
) -> LgStatus {
    guard(|| {
        let p = p.as_ref().ok_or_else(|| null("problem"))?;
        if out.is_null() {
            return Err(null("out"));
        }
        let s = qp::solve(&p.0, method.into(), tol).map_err(fail)?;
        *out = Box::into_raw(Box::new(LgSolution(s)));
        Ok(())
    })
}

/// # Safety
/// `s` must be null or a handle from this library not yet freed.
#[no_mangle]
pub unsafe extern "C" fn lg_solution_free(s: *mut LgSolution) {
    if !s.is_null() {
        drop(Box::from_raw(s));
    }
}

unsafe fn copy_out(src: &[f64], buf: *mut f64, len: usize) -> Result<(), LgStatus> {
    if len < src.len() {
        set_error(format!("buffer holds {len} values, {} needed", src.len()));
        return Err(LgStatus::BufferTooSmall);
    }
    if !src.is_empty() {
        if buf.is_null() {
            return Err(null("buffer"));
        }
        ptr::copy_nonoverlapping(src.as_ptr(), buf, src.len());
    }
    Ok(())
}

/// Copies the minimizer into `buf` (at least `n` doubles).
///
/// # Safety
/// `s` must be a live handle; `buf` must hold `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn lg_solution_x(
    s: *const LgSolution,
    buf: *mut f64,
    len: usize,
) -> LgStatus {
    guard(|| {
        let s = s.as_ref().ok_or_else(|| null("solution"))?;
        copy_out(&s.0.x, buf, len)
    })
}

/// Copies the multiplier (`Ax - b = C' lambda`) into `buf` (at least `m`
/// doubles).
///
/// # Safety
/// `s` must be a live handle; `buf` must hold `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn lg_solution_lambda(
    s: *const LgSolution,
    buf: *mut f64,
    len: usize,
) -> LgStatus {
    guard(|| {
        let s = s.as_ref().ok_or_else(|| null("solution"))?;
        copy_out(&s.0.lambda, buf, len)
    })
}

/// `|Ax - b - C' lambda|` and `|Cx - d|`.
///
/// # Safety
/// `s` must be a live handle; the outputs must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn lg_solution_residuals(
    s: *const LgSolution,
    stationarity: *mut f64,
    feasibility: *mut f64,
) -> LgStatus {
    guard(|| {
        let s = s.as_ref().ok_or_else(|| null("solution"))?;
        if stationarity.is_null() || feasibility.is_null() {
            return Err(null("output"));
        }
        *stationarity = s.0.residual_stationarity;
        *feasibility = s.0.residual_feasibility;
        Ok(())
    })
}

/// Inf-sup constant of the program's `C` in the `A`-norm with Euclidean
/// multipliers.
///
/// # Safety
/// `p` must be a live handle and `beta` valid for a write.
#[no_mangle]
pub unsafe extern "C" fn lg_infsup(p: *const LgProblem, beta: *mut f64) -> LgStatus {
    guard(|| {
        let p = p.as_ref().ok_or_else(|| null("problem"))?;
        if beta.is_null() {
            return Err(null("beta"));
        }
        let mq = SparseOperator::identity(p.0.m());
        let e = qp::estimate_infsup(p.0.c(), p.0.a(), &mq, InfSupForm::DualForm).map_err(fail)?;
        *beta = e.beta;
        Ok(())
    })
}

/// Coupled and minimization Stokes solves on an `n x n` MAC grid.
/// `case_id` is `taylor_green`, `polynomial` or `zero`.
///
/// # Safety
/// `case_id` must be NUL-terminated and `out` valid for a write.
#[no_mangle]
pub unsafe extern "C" fn lg_stokes_run(
    n: usize,
    case_id: *const c_char,
    tol: f64,
    out: *mut LgStokesSummary,
) -> LgStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let id: stokes::CaseId = c_str(case_id, "case_id")?.parse().map_err(fail)?;
        let grid = stokes::build_grid(n).map_err(fail)?;
        let case = stokes::manufactured_case(id);
        let a = stokes::solve_stokes_coupled(&grid, &case, tol).map_err(fail)?;
        let b = stokes::solve_stokes_minimization(&grid, &case, tol).map_err(fail)?;
        let div = |s: &stokes::StokesSolution| {
            let u = norm2(s.velocity.as_slice());
            if u > 0.0 {
                s.saddle.residual_feasibility / u
            } else {
                s.saddle.residual_feasibility
            }
        };
        let e = stokes::error_norms(&a.velocity, &a.pressure, &case);
        *out = LgStokesSummary {
            velocity_gap: rel_diff(b.velocity.as_slice(), a.velocity.as_slice()),
            pressure_gap: rel_diff(b.pressure.as_slice(), a.pressure.as_slice()),
            divergence: div(&a).max(div(&b)),
            l2_u: e.l2_u,
            l2_p: e.l2_p,
            linf_u: e.linf_u,
        };
        Ok(())
    })
}

/// Discrete inf-sup constant of the MAC discretization on an `n x n` grid.
///
/// # Safety
/// `beta` must be valid for a write.
#[no_mangle]
pub unsafe extern "C" fn lg_stokes_infsup(n: usize, beta: *mut f64) -> LgStatus {
    guard(|| {
        if beta.is_null() {
            return Err(null("beta"));
        }
        let grid = stokes::build_grid(n).map_err(fail)?;
        *beta = stokes::estimate_infsup_stokes(&grid).map_err(fail)?.beta;
        Ok(())
    })
}

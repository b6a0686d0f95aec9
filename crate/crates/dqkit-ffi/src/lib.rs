//! C ABI over `dqkit`.
//!
//! Every function returns a `DQ_*` status code. Objects are opaque handles
//! created by `*_new`/`*_parse` and released by the matching `*_free`.
//! Text results use a caller buffer: `needed` receives the length without the
//! terminating NUL, and `DQ_ERR_BUFFER_TOO_SMALL` is returned when `len <= needed`.
//! After a failure, `dq_last_error` gives a message for the calling thread.

use std::cell::RefCell;
use std::ffi::{c_char, CStr};
use std::panic::{catch_unwind, AssertUnwindSafe};

use dqkit::cli::{self, ConfigFile, EvalError, RunConfig};
use dqkit::phase_poly::{moyal_bracket, star_poly, Convention, HbarSeries, PhasePoly};
use dqkit::poisson_lie::{nc_normalize, parse_word, Relations};
use dqkit::weyl_numeric::{cross_validate_star, trusted_half_width, wigner_from_state, GridSpec, HermiteBasis, HermiteState};

pub const DQ_OK: i32 = 0;
pub const DQ_ERR_NULL: i32 = -1;
pub const DQ_ERR_UTF8: i32 = -2;
pub const DQ_ERR_PARSE: i32 = -3;
pub const DQ_ERR_INVALID_ARGUMENT: i32 = -4;
pub const DQ_ERR_COMPUTE: i32 = -5;
pub const DQ_ERR_BUFFER_TOO_SMALL: i32 = -6;
pub const DQ_ERR_PANIC: i32 = -99;

/// Polynomial in `q, p` with exact complex rational coefficients.
pub struct DqPoly(PhasePoly);

/// Truncated Hermite basis with fixed `hbar`.
pub struct DqBasis(HermiteBasis);

thread_local! {
    static LAST_ERROR: RefCell<String> = const { RefCell::new(String::new()) };
}

struct Failure(i32, String);

type Res<T> = Result<T, Failure>;

fn fail<T>(code: i32, msg: impl Into<String>) -> Res<T> {
    Err(Failure(code, msg.into()))
}

fn guard(f: impl FnOnce() -> Res<()>) -> i32 {
    let r = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|_| fail(DQ_ERR_PANIC, "internal panic"));
    match r {
        Ok(()) => DQ_OK,
        Err(Failure(code, msg)) => {
            LAST_ERROR.with(|e| *e.borrow_mut() = msg);
            code
        }
    }
}

unsafe fn text<'a>(s: *const c_char, what: &str) -> Res<&'a str> {
    if s.is_null() {
        return fail(DQ_ERR_NULL, format!("{} is null", what));
    }
    CStr::from_ptr(s).to_str().or_else(|_| fail(DQ_ERR_UTF8, format!("{} is not UTF-8", what)))
}

unsafe fn handle<'a, T>(p: *const T, what: &str) -> Res<&'a T> {
    p.as_ref().map_or_else(|| fail(DQ_ERR_NULL, format!("{} is null", what)), Ok)
}

unsafe fn write_out(s: &str, buf: *mut c_char, len: usize, needed: *mut usize) -> Res<()> {
    if !needed.is_null() {
        *needed = s.len();
    }
    if buf.is_null() || len <= s.len() {
        return fail(DQ_ERR_BUFFER_TOO_SMALL, format!("result needs {} bytes plus NUL", s.len()));
    }
    std::ptr::copy_nonoverlapping(s.as_ptr(), buf as *mut u8, s.len());
    *buf.add(s.len()) = 0;
    Ok(())
}

unsafe fn config(json: *const c_char) -> Res<RunConfig> {
    let file = if json.is_null() {
        ConfigFile::default()
    } else {
        serde_json::from_str::<ConfigFile>(text(json, "config")?).or_else(|e| fail(DQ_ERR_INVALID_ARGUMENT, format!("bad config: {}", e)))?
    };
    RunConfig::resolve(file).or_else(|e| fail(DQ_ERR_INVALID_ARGUMENT, e))
}

fn deg(f: &PhasePoly) -> usize {
    f.degree().unwrap_or(0) as usize
}

/// Static version string.
#[no_mangle]
pub extern "C" fn dq_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr() as *const c_char
}

/// Copy the calling thread's last error message. Returns its length.
///
/// # Safety
/// `buf` must be null or point to `len` writable bytes.
#[no_mangle]
pub unsafe extern "C" fn dq_last_error(buf: *mut c_char, len: usize) -> usize {
    LAST_ERROR.with(|e| {
        let e = e.borrow();
        if !buf.is_null() && len > 0 {
            let n = e.len().min(len - 1);
            std::ptr::copy_nonoverlapping(e.as_ptr(), buf as *mut u8, n);
            *buf.add(n) = 0;
        }
        e.len()
    })
}

/// Parse a polynomial such as `q^2*p - 3/2 + i*p`.
///
/// # Safety
/// `src` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn dq_poly_parse(src: *const c_char, out: *mut *mut DqPoly) -> i32 {
    guard(|| {
        if out.is_null() {
            return fail(DQ_ERR_NULL, "out is null");
        }
        let f = cli::expr::parse_poly(text(src, "src")?, 0).or_else(|e| fail(DQ_ERR_PARSE, e.to_string()))?;
        *out = Box::into_raw(Box::new(DqPoly(f)));
        Ok(())
    })
}

/// # Safety
/// `p` must come from `dq_poly_parse` and not be freed twice. Null is ignored.
#[no_mangle]
pub unsafe extern "C" fn dq_poly_free(p: *mut DqPoly) {
    if !p.is_null() {
        drop(Box::from_raw(p));
    }
}

/// Canonical text of a polynomial.
///
/// # Safety
/// `p` must be a live handle; `buf` must hold `len` bytes; `needed` may be null.
#[no_mangle]
pub unsafe extern "C" fn dq_poly_to_string(p: *const DqPoly, buf: *mut c_char, len: usize, needed: *mut usize) -> i32 {
    guard(|| write_out(&handle(p, "poly")?.0.pretty(), buf, len, needed))
}

/// Full Moyal star product `f * g` as an hbar polynomial.
///
/// # Safety
/// As for `dq_poly_to_string`.
#[no_mangle]
pub unsafe extern "C" fn dq_poly_star(f: *const DqPoly, g: *const DqPoly, buf: *mut c_char, len: usize, needed: *mut usize) -> i32 {
    guard(|| {
        let (f, g) = (&handle(f, "f")?.0, &handle(g, "g")?.0);
        let s = star_poly(f, g, deg(f) + deg(g), Convention::Moyal).or_else(|e| fail(DQ_ERR_COMPUTE, e.to_string()))?;
        write_out(&s.pretty(), buf, len, needed)
    })
}

/// Moyal bracket `(f*g - g*f) / (-i hbar)`.
///
/// # Safety
/// As for `dq_poly_to_string`.
#[no_mangle]
pub unsafe extern "C" fn dq_poly_moyal_bracket(f: *const DqPoly, g: *const DqPoly, buf: *mut c_char, len: usize, needed: *mut usize) -> i32 {
    guard(|| {
        let (f, g) = (&handle(f, "f")?.0, &handle(g, "g")?.0);
        let n = (deg(f) + deg(g)).max(1);
        let s = moyal_bracket(&HbarSeries::from_poly(f, n), &HbarSeries::from_poly(g, n)).or_else(|e| fail(DQ_ERR_COMPUTE, e.to_string()))?;
        write_out(&s.pretty(), buf, len, needed)
    })
}

/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn dq_basis_new(size: usize, hbar: f64, out: *mut *mut DqBasis) -> i32 {
    guard(|| {
        if out.is_null() {
            return fail(DQ_ERR_NULL, "out is null");
        }
        let b = HermiteBasis::new(size, hbar).or_else(|e| fail(DQ_ERR_INVALID_ARGUMENT, e.to_string()))?;
        *out = Box::into_raw(Box::new(DqBasis(b)));
        Ok(())
    })
}

/// # Safety
/// `b` must come from `dq_basis_new` and not be freed twice. Null is ignored.
#[no_mangle]
pub unsafe extern "C" fn dq_basis_free(b: *mut DqBasis) {
    if !b.is_null() {
        drop(Box::from_raw(b));
    }
}

/// Relative distance between the symbolic star product and the operator product of Weyl images,
/// on a `points x points` grid inside the resolved disc.
///
/// # Safety
/// Handles must be live; `residual` must be writable.
#[no_mangle]
pub unsafe extern "C" fn dq_cross_validate_star(b: *const DqBasis, f: *const DqPoly, g: *const DqPoly, points: usize, residual: *mut f64) -> i32 {
    guard(|| {
        let b = &handle(b, "basis")?.0;
        let (f, g) = (&handle(f, "f")?.0, &handle(g, "g")?.0);
        if residual.is_null() {
            return fail(DQ_ERR_NULL, "residual is null");
        }
        let spec = GridSpec::square(trusted_half_width(b), points);
        *residual = cross_validate_star(b, f, g, &spec).or_else(|e| fail(DQ_ERR_COMPUTE, e.to_string()))?;
        Ok(())
    })
}

/// Wigner function of basis state `n` on `[-w, w]^2` with `points` per axis.
/// `values` receives `points * points` reals, q-major with p fastest.
///
/// # Safety
/// `b` must be live; `values` must hold `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn dq_wigner(b: *const DqBasis, n: usize, half_width: f64, points: usize, values: *mut f64, len: usize) -> i32 {
    guard(|| {
        let b = &handle(b, "basis")?.0;
        if values.is_null() {
            return fail(DQ_ERR_NULL, "values is null");
        }
        if n >= b.size() {
            return fail(DQ_ERR_INVALID_ARGUMENT, format!("state {} outside basis of size {}", n, b.size()));
        }
        let total = points.saturating_mul(points);
        if len < total {
            return fail(DQ_ERR_BUFFER_TOO_SMALL, format!("need {} values", total));
        }
        let spec = GridSpec::square(half_width, points);
        let w = wigner_from_state(&HermiteState::basis_state(b, n), &spec).or_else(|e| fail(DQ_ERR_INVALID_ARGUMENT, e.to_string()))?;
        let out = std::slice::from_raw_parts_mut(values, total);
        for iq in 0..spec.nq {
            for ip in 0..spec.np {
                out[iq * spec.np + ip] = w.at(iq, ip).re;
            }
        }
        Ok(())
    })
}

/// Normal form of a word in `a, b, c, d` under the SL_q(2) relations, e.g. `d*a`.
///
/// # Safety
/// `word` must be NUL-terminated; buffer rules as for `dq_poly_to_string`.
#[no_mangle]
pub unsafe extern "C" fn dq_normalize(word: *const c_char, buf: *mut c_char, len: usize, needed: *mut usize) -> i32 {
    guard(|| {
        let w = parse_word(text(word, "word")?).or_else(|e| fail(DQ_ERR_PARSE, e.to_string()))?;
        write_out(&nc_normalize(&w, &Relations::symbolic()).to_string(), buf, len, needed)
    })
}

/// Evaluate a CLI expression. `config_json` may be null.
///
/// # Safety
/// Strings must be NUL-terminated; buffer rules as for `dq_poly_to_string`.
#[no_mangle]
pub unsafe extern "C" fn dq_eval(expr: *const c_char, config_json: *const c_char, buf: *mut c_char, len: usize, needed: *mut usize) -> i32 {
    guard(|| {
        let cfg = config(config_json)?;
        let s = cli::eval(text(expr, "expr")?, &cfg).or_else(|e| match e {
            EvalError::Parse(p) => fail(DQ_ERR_PARSE, p.to_string()),
            EvalError::Compute(m) => fail(DQ_ERR_COMPUTE, m),
        })?;
        write_out(&s, buf, len, needed)
    })
}

/// Run a verification suite and return its JSON report. `passed` is set to 1 when
/// every check passed and 0 otherwise; check failures are not an error status.
///
/// # Safety
/// Strings must be NUL-terminated; `passed` may be null; buffer rules as for `dq_poly_to_string`.
#[no_mangle]
pub unsafe extern "C" fn dq_verify(
    suite: *const c_char,
    config_json: *const c_char,
    passed: *mut i32,
    buf: *mut c_char,
    len: usize,
    needed: *mut usize,
) -> i32 {
    guard(|| {
        let cfg = config(config_json)?;
        let rep = cli::run_report(text(suite, "suite")?, &cfg).or_else(|e| fail(DQ_ERR_INVALID_ARGUMENT, e))?;
        if !passed.is_null() {
            *passed = rep.passed as i32;
        }
        write_out(&rep.to_json(), buf, len, needed)
    })
}

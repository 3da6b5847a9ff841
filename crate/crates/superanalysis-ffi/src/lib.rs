//! C ABI over the superanalysis engine.
//!
//! Objects cross the boundary as opaque handles owned by the caller and released with the
//! matching `*_free`. Every fallible function returns an [`SaStatus`]; on failure a message is
//! kept per thread and can be read with [`sa_last_error_length`] / [`sa_last_error_message`].
//! Panics are caught at the boundary and reported as [`SaStatus::Panic`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use superanalysis::error::Error;
use superanalysis::grassmann::{Supernumber, C64, MAX_GENERATORS};
use superanalysis::rmt::{self, GueParams};
use superanalysis::{selftest, susyqm};

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SaStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    Domain = 3,
    NotInvertible = 4,
    ShapeMismatch = 5,
    Parse = 6,
    Numerical = 7,
    Panic = 8,
}

/// An element of a finite Grassmann algebra Λ_L.
pub struct SaSupernumber {
    inner: Supernumber,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let msg = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(CString::new(msg).expect("nul bytes removed")));
}

fn clear_error() {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
}

fn status_of(e: &Error) -> SaStatus {
    match e {
        Error::InvalidGenerator { .. } | Error::TooManyGenerators(_) => SaStatus::InvalidArgument,
        Error::NotInvertible | Error::SingularBody(_) => SaStatus::NotInvertible,
        Error::Domain(_) | Error::Caustic(_) | Error::NotPositiveDefinite(_) | Error::Parity(_) | Error::NotAntisymmetric => SaStatus::Domain,
        Error::ShapeMismatch(_) => SaStatus::ShapeMismatch,
        Error::Parse(_) => SaStatus::Parse,
        _ => SaStatus::Numerical,
    }
}

/// Run `f`, translating errors and panics into a status and the thread's last-error message.
fn guard(f: impl FnOnce() -> Result<(), (SaStatus, String)>) -> SaStatus {
    clear_error();
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => SaStatus::Ok,
        Ok(Err((status, msg))) => {
            set_error(msg);
            status
        }
        Err(payload) => {
            let msg = payload.downcast_ref::<&str>().map(|s| s.to_string()).or_else(|| payload.downcast_ref::<String>().cloned()).unwrap_or_else(|| "panic".into());
            set_error(format!("internal panic: {msg}"));
            SaStatus::Panic
        }
    }
}

fn lift<T>(r: superanalysis::error::Result<T>) -> Result<T, (SaStatus, String)> {
    r.map_err(|e| (status_of(&e), e.to_string()))
}

fn null(what: &str) -> (SaStatus, String) {
    (SaStatus::NullPointer, format!("{what} is null"))
}

/// # Safety
/// `p` must be null or a live handle from this library.
unsafe fn handle<'a>(p: *const SaSupernumber, what: &str) -> Result<&'a Supernumber, (SaStatus, String)> {
    p.as_ref().map(|h| &h.inner).ok_or_else(|| null(what))
}

/// # Safety
/// `out` must be null or valid for one pointer write.
unsafe fn emit(out: *mut *mut SaSupernumber, value: Supernumber) -> Result<(), (SaStatus, String)> {
    if out.is_null() {
        return Err(null("output pointer"));
    }
    *out = Box::into_raw(Box::new(SaSupernumber { inner: value }));
    Ok(())
}

// ---------------------------------------------------------------- errors

/// Length in bytes of the last error message on this thread, excluding the terminator; 0 if none.
#[no_mangle]
pub extern "C" fn sa_last_error_length() -> usize {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(0, |m| m.as_bytes().len()))
}

/// Copy the last error message into `buf` (always NUL-terminated when `len > 0`, truncated if
/// needed). Returns the number of bytes written, excluding the terminator.
///
/// # Safety
/// `buf` must be valid for `len` bytes of writes, or null with `len == 0`.
#[no_mangle]
pub unsafe extern "C" fn sa_last_error_message(buf: *mut c_char, len: usize) -> usize {
    if buf.is_null() || len == 0 {
        return 0;
    }
    LAST_ERROR.with(|e| {
        let e = e.borrow();
        let bytes = e.as_ref().map_or(&[][..], |m| m.as_bytes());
        let n = bytes.len().min(len - 1);
        ptr::copy_nonoverlapping(bytes.as_ptr() as *const c_char, buf, n);
        *buf.add(n) = 0;
        n
    })
}

// ---------------------------------------------------------------- supernumbers

/// The zero element of Λ_L.
///
/// # Safety
/// `out` must be valid for one pointer write.
#[no_mangle]
pub unsafe extern "C" fn sa_supernumber_new(l: u32, out: *mut *mut SaSupernumber) -> SaStatus {
    guard(|| {
        if l > MAX_GENERATORS {
            return Err((SaStatus::InvalidArgument, format!("at most {MAX_GENERATORS} generators, got {l}")));
        }
        emit(out, Supernumber::zero(l))
    })
}

/// Parse the JSON form `{"L": .., "terms": [{"mask", "re", "im"}, ..]}`.
///
/// # Safety
/// `json` must be a NUL-terminated string; `out` must be valid for one pointer write.
#[no_mangle]
pub unsafe extern "C" fn sa_supernumber_from_json(json: *const c_char, out: *mut *mut SaSupernumber) -> SaStatus {
    guard(|| {
        if json.is_null() {
            return Err(null("json"));
        }
        let text = CStr::from_ptr(json).to_str().map_err(|e| (SaStatus::Parse, format!("json is not UTF-8: {e}")))?;
        emit(out, lift(Supernumber::from_json(text))?)
    })
}

/// JSON form of `x`, to be released with [`sa_string_free`]. Null on failure.
///
/// # Safety
/// `x` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn sa_supernumber_to_json(x: *const SaSupernumber) -> *mut c_char {
    let mut out = ptr::null_mut();
    guard(|| {
        let s = handle(x, "x")?.to_json();
        out = CString::new(s).expect("JSON has no NUL").into_raw();
        Ok(())
    });
    out
}

/// # Safety
/// `s` must be null or a string returned by this library.
#[no_mangle]
pub unsafe extern "C" fn sa_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// # Safety
/// `x` must be null or a live handle; it is invalid afterwards.
#[no_mangle]
pub unsafe extern "C" fn sa_supernumber_free(x: *mut SaSupernumber) {
    if !x.is_null() {
        drop(Box::from_raw(x));
    }
}

/// Number of generators L of the algebra `x` lives in.
///
/// # Safety
/// `x` must be a live handle; `out` valid for one write.
#[no_mangle]
pub unsafe extern "C" fn sa_supernumber_generators(x: *const SaSupernumber, out: *mut u32) -> SaStatus {
    guard(|| {
        let x = handle(x, "x")?;
        if out.is_null() {
            return Err(null("out"));
        }
        *out = x.num_generators();
        Ok(())
    })
}

/// Add `re + i·im` to the coefficient of the monomial `mask` (bit j−1 is generator j).
///
/// # Safety
/// `x` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn sa_supernumber_add_term(x: *mut SaSupernumber, mask: u32, re: f64, im: f64) -> SaStatus {
    guard(|| {
        let h = x.as_mut().ok_or_else(|| null("x"))?;
        let term = lift(Supernumber::monomial(h.inner.num_generators(), mask, C64::new(re, im)))?;
        h.inner += &term;
        Ok(())
    })
}

/// # Safety
/// `x` must be a live handle; `re`, `im` valid for one write each.
#[no_mangle]
pub unsafe extern "C" fn sa_supernumber_coeff(x: *const SaSupernumber, mask: u32, re: *mut f64, im: *mut f64) -> SaStatus {
    guard(|| {
        let x = handle(x, "x")?;
        if re.is_null() || im.is_null() {
            return Err(null("output"));
        }
        let c = x.coeff(mask);
        *re = c.re;
        *im = c.im;
        Ok(())
    })
}

/// `a + b`; operands in different algebras are embedded in the larger one.
///
/// # Safety
/// `a`, `b` must be live handles; `out` valid for one pointer write.
#[no_mangle]
pub unsafe extern "C" fn sa_supernumber_add(a: *const SaSupernumber, b: *const SaSupernumber, out: *mut *mut SaSupernumber) -> SaStatus {
    guard(|| emit(out, handle(a, "a")? + handle(b, "b")?))
}

/// `a − b`.
///
/// # Safety
/// `a`, `b` must be live handles; `out` valid for one pointer write.
#[no_mangle]
pub unsafe extern "C" fn sa_supernumber_sub(a: *const SaSupernumber, b: *const SaSupernumber, out: *mut *mut SaSupernumber) -> SaStatus {
    guard(|| emit(out, handle(a, "a")? - handle(b, "b")?))
}

/// `a · b` in the Grassmann product.
///
/// # Safety
/// `a`, `b` must be live handles; `out` valid for one pointer write.
#[no_mangle]
pub unsafe extern "C" fn sa_supernumber_mul(a: *const SaSupernumber, b: *const SaSupernumber, out: *mut *mut SaSupernumber) -> SaStatus {
    guard(|| emit(out, handle(a, "a")? * handle(b, "b")?))
}

/// `x⁻¹`; fails with [`SaStatus::NotInvertible`] when the body vanishes.
///
/// # Safety
/// `x` must be a live handle; `out` valid for one pointer write.
#[no_mangle]
pub unsafe extern "C" fn sa_supernumber_inverse(x: *const SaSupernumber, out: *mut *mut SaSupernumber) -> SaStatus {
    guard(|| emit(out, lift(handle(x, "x")?.inverse())?))
}

/// # Safety
/// `x` must be a live handle; `out` valid for one pointer write.
#[no_mangle]
pub unsafe extern "C" fn sa_supernumber_exp(x: *const SaSupernumber, out: *mut *mut SaSupernumber) -> SaStatus {
    guard(|| emit(out, handle(x, "x")?.exp()))
}

/// Berezin integral over the generators in `mask`.
///
/// # Safety
/// `x` must be a live handle; `out` valid for one pointer write.
#[no_mangle]
pub unsafe extern "C" fn sa_supernumber_berezin(x: *const SaSupernumber, mask: u32, out: *mut *mut SaSupernumber) -> SaStatus {
    guard(|| {
        let x = handle(x, "x")?;
        let l = x.num_generators();
        if l < 32 && mask >> l != 0 {
            return Err((SaStatus::InvalidArgument, format!("mask {mask:#b} uses generators beyond L = {l}")));
        }
        emit(out, x.berezin(mask))
    })
}

// ---------------------------------------------------------------- applications

/// Exact averaged GUE eigenvalue density at `lambda` for an N×N matrix with scale J.
///
/// # Safety
/// `out` must be valid for one write.
#[no_mangle]
pub unsafe extern "C" fn sa_gue_density(n: usize, j: f64, lambda: f64, out: *mut f64) -> SaStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let p = lift(GueParams::new(n, j))?;
        *out = rmt::density_exact(&p, lambda);
        Ok(())
    })
}

/// Heat-kernel supertrace of the d-dimensional SUSY oscillator; equals 1.
///
/// # Safety
/// `omegas` must point to `d` doubles; `re`, `im` valid for one write each.
#[no_mangle]
pub unsafe extern "C" fn sa_witten_supertrace(omegas: *const f64, d: usize, t: f64, re: *mut f64, im: *mut f64) -> SaStatus {
    guard(|| {
        if omegas.is_null() || re.is_null() || im.is_null() {
            return Err(null("argument"));
        }
        let w = std::slice::from_raw_parts(omegas, d);
        let s = lift(susyqm::witten_supertrace(w, t))?.body();
        *re = s.re;
        *im = s.im;
        Ok(())
    })
}

/// Number of acceptance criteria.
#[no_mangle]
pub extern "C" fn sa_selftest_count() -> usize {
    selftest::criterion_count()
}

/// Run acceptance criterion `id` (1-based) and store whether it passed.
///
/// # Safety
/// `passed` must be valid for one write.
#[no_mangle]
pub unsafe extern "C" fn sa_selftest_run(id: usize, passed: *mut bool) -> SaStatus {
    guard(|| {
        if passed.is_null() {
            return Err(null("passed"));
        }
        let r = selftest::run_one(id).ok_or_else(|| (SaStatus::InvalidArgument, format!("criterion must be in 1..={}", selftest::criterion_count())))?;
        *passed = r.passed;
        if !r.passed {
            set_error(r.to_string());
        }
        Ok(())
    })
}

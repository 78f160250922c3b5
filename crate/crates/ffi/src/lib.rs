//! C interface over the operator engine. Every entry point returns an
//! [`StStatus`]; results come back through out-pointers. Returned strings
//! are owned by this library and must be released with [`st_string_free`];
//! handles are opaque and released by their matching `_free` function.
//! On failure the thread-local message from [`st_last_error_message`]
//! describes what went wrong.
//!
//! Structured results (normal forms, decompositions, verification runs,
//! reports, trajectories) cross the boundary as JSON documents, matching the
//! CLI's output schemas, so bindings need no struct mirroring beyond the two
//! handle types.
//!
//! Safety contract, shared by every function here: handle arguments must be
//! null or values previously returned by this library that have not been
//! freed; string arguments must be null or NUL-terminated; array arguments
//! must be null or point to at least the stated number of elements. Null is
//! always detected and reported, never dereferenced. Handles are not
//! synchronized; do not share one across threads without locking.

// the per-function safety story is the module-level contract above
#![allow(clippy::missing_safety_doc)]

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::sync::Arc;

use symtensor::depth::trace_decompose;
use symtensor::detour::detour_report;
use symtensor::dynamics::{drift_report, integrate_rk4, noether_charges, FrameData, PhaseState};
use symtensor::error::Error;
use symtensor::geometry::Geometry;
use symtensor::json::{decomposition_to_json, normal_form_to_json};
use symtensor::lang::pochhammer::pochhammer_report;
use symtensor::lang::{apply_expr, normalize, parse, CurvatureClass};
use symtensor::tensor::{make_tensor, random_tensor, SymTensorField};
use symtensor::verify::run_verification;

/// Result of every library call. `StOk` is zero; anything else leaves an
/// explanatory message in `st_last_error_message`.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StStatus {
    StOk = 0,
    /// A required pointer argument was null.
    StNullPointer = 1,
    /// A string argument was not valid UTF-8.
    StInvalidUtf8 = 2,
    /// The expression or tensor text failed to parse.
    StParseError = 3,
    /// Flags or numeric arguments outside the supported range.
    StInvalidArgument = 4,
    /// A spectral weight is singular on an occupied slice.
    StSingularSpectrum = 5,
    /// Operands belong to different geometries.
    StGeometryMismatch = 6,
    /// The operation is not defined on this background.
    StUnsupported = 7,
    /// Numerical failure (for the simulator: leaving the half-space).
    StRuntimeError = 8,
    /// A defect inside the library; please report the last error message.
    StInternal = 9,
}

/// Opaque background handle: dimension, signature, metric and curvature
/// tables.
pub struct StGeometry {
    inner: Arc<Geometry>,
}

/// Opaque symmetric-tensor field handle.
pub struct StTensor {
    inner: SymTensorField,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: &str) {
    let sanitized: String = msg.chars().filter(|&c| c != '\0').collect();
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(sanitized).unwrap());
}

fn fail(e: &Error) -> StStatus {
    set_error(&e.to_string());
    match e.kind() {
        "parse" => StStatus::StParseError,
        "invalid_flags" | "index_out_of_range" | "mismatched_variables" => {
            StStatus::StInvalidArgument
        }
        "denominator_singular_on_spectrum" | "division_by_zero" => StStatus::StSingularSpectrum,
        "geometry_mismatch" => StStatus::StGeometryMismatch,
        "flat_only" | "box_symbol_present" | "laurent_not_allowed" => StStatus::StUnsupported,
        "eval_at_boundary" | "boundary_crossing" => StStatus::StRuntimeError,
        _ => StStatus::StInternal,
    }
}

/// Absorb panics from deep inside the engine rather than unwinding across
/// the C boundary.
fn guarded(body: impl FnOnce() -> StStatus) -> StStatus {
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(s) => s,
        Err(_) => {
            set_error("internal panic");
            StStatus::StInternal
        }
    }
}

unsafe fn read_str<'a>(p: *const c_char) -> Result<&'a str, StStatus> {
    if p.is_null() {
        set_error("null string argument");
        return Err(StStatus::StNullPointer);
    }
    CStr::from_ptr(p).to_str().map_err(|_| {
        set_error("string argument is not valid UTF-8");
        StStatus::StInvalidUtf8
    })
}

unsafe fn write_handle<T>(out: *mut *mut T, value: T) -> StStatus {
    if out.is_null() {
        set_error("null out-pointer");
        return StStatus::StNullPointer;
    }
    *out = Box::into_raw(Box::new(value));
    StStatus::StOk
}

unsafe fn write_string(out: *mut *mut c_char, s: String) -> StStatus {
    if out.is_null() {
        set_error("null out-pointer");
        return StStatus::StNullPointer;
    }
    let sanitized: String = s.chars().filter(|&c| c != '\0').collect();
    *out = CString::new(sanitized).unwrap().into_raw();
    StStatus::StOk
}

macro_rules! deref {
    ($p:expr) => {
        match $p.as_ref() {
            Some(r) => r,
            None => {
                set_error("null handle");
                return StStatus::StNullPointer;
            }
        }
    };
}

/// Message for the most recent failure on this thread. The pointer stays
/// valid until the next failing call from the same thread.
#[no_mangle]
pub extern "C" fn st_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Release a string returned by this library. Null is ignored.
#[no_mangle]
pub unsafe extern "C" fn st_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Flat background with `positive` +1 legs followed by `negative` -1 legs.
#[no_mangle]
pub unsafe extern "C" fn st_geometry_flat(
    positive: u32,
    negative: u32,
    out: *mut *mut StGeometry,
) -> StStatus {
    guarded(|| match Geometry::flat(positive, negative) {
        Ok(g) => write_handle(out, StGeometry { inner: Arc::new(g) }),
        Err(e) => fail(&e),
    })
}

/// Hyperbolic background of dimension `dim` (upper half-space model).
#[no_mangle]
pub unsafe extern "C" fn st_geometry_hyperbolic(dim: usize, out: *mut *mut StGeometry) -> StStatus {
    guarded(|| match Geometry::hyperbolic(dim) {
        Ok(g) => write_handle(out, StGeometry { inner: Arc::new(g) }),
        Err(e) => fail(&e),
    })
}

/// Dimension of the background; zero if the handle is null.
#[no_mangle]
pub unsafe extern "C" fn st_geometry_dim(geo: *const StGeometry) -> u32 {
    geo.as_ref().map_or(0, |g| g.inner.dim() as u32)
}

#[no_mangle]
pub unsafe extern "C" fn st_geometry_is_flat(geo: *const StGeometry) -> bool {
    geo.as_ref().is_some_and(|g| g.inner.is_flat())
}

#[no_mangle]
pub unsafe extern "C" fn st_geometry_free(geo: *mut StGeometry) {
    if !geo.is_null() {
        drop(Box::from_raw(geo));
    }
}

/// Parse a tensor from the textual syntax (`u<k>` fiber variables, `x<k>`
/// and `y` coordinates, rational coefficients).
#[no_mangle]
pub unsafe extern "C" fn st_tensor_parse(
    geo: *const StGeometry,
    text: *const c_char,
    out: *mut *mut StTensor,
) -> StStatus {
    guarded(|| {
        let geo = deref!(geo);
        let text = match read_str(text) {
            Ok(t) => t,
            Err(s) => return s,
        };
        match make_tensor(geo.inner.clone(), text) {
            Ok(t) => write_handle(out, StTensor { inner: t }),
            Err(e) => fail(&e),
        }
    })
}

/// Seeded random tensor with every rank part up to `max_rank` populated and
/// coordinate degree at most `max_degree`.
#[no_mangle]
pub unsafe extern "C" fn st_tensor_random(
    geo: *const StGeometry,
    seed: u64,
    max_rank: u32,
    max_degree: u32,
    out: *mut *mut StTensor,
) -> StStatus {
    guarded(|| {
        let geo = deref!(geo);
        let t = random_tensor(geo.inner.clone(), seed, max_rank, max_degree);
        write_handle(out, StTensor { inner: t })
    })
}

#[no_mangle]
pub unsafe extern "C" fn st_tensor_free(t: *mut StTensor) {
    if !t.is_null() {
        drop(Box::from_raw(t));
    }
}

/// Render the tensor in the same textual syntax `st_tensor_parse` accepts.
#[no_mangle]
pub unsafe extern "C" fn st_tensor_render(t: *const StTensor, out: *mut *mut c_char) -> StStatus {
    guarded(|| {
        let t = deref!(t);
        write_string(out, t.inner.to_string())
    })
}

#[no_mangle]
pub unsafe extern "C" fn st_tensor_is_zero(t: *const StTensor) -> bool {
    t.as_ref().is_some_and(|t| t.inner.is_zero())
}

/// Exact equality; false when either handle is null or geometries differ.
#[no_mangle]
pub unsafe extern "C" fn st_tensor_equal(a: *const StTensor, b: *const StTensor) -> bool {
    match (a.as_ref(), b.as_ref()) {
        (Some(a), Some(b)) => a.inner == b.inner,
        _ => false,
    }
}

#[no_mangle]
pub unsafe extern "C" fn st_tensor_add(
    a: *const StTensor,
    b: *const StTensor,
    out: *mut *mut StTensor,
) -> StStatus {
    guarded(|| {
        let (a, b) = (deref!(a), deref!(b));
        match a.inner.add(&b.inner) {
            Ok(t) => write_handle(out, StTensor { inner: t }),
            Err(e) => fail(&e),
        }
    })
}

#[no_mangle]
pub unsafe extern "C" fn st_tensor_sub(
    a: *const StTensor,
    b: *const StTensor,
    out: *mut *mut StTensor,
) -> StStatus {
    guarded(|| {
        let (a, b) = (deref!(a), deref!(b));
        match a.inner.sub(&b.inner) {
            Ok(t) => write_handle(out, StTensor { inner: t }),
            Err(e) => fail(&e),
        }
    })
}

/// Apply an operator expression (the word grammar: `grad`, `div`, `tr`,
/// `g`, `N`, `box`, `gradt`, `divt`, `Ncal`, `C`, `c`, `kappa`, rational
/// coefficients, `inv(...)`, sums, powers) to a tensor.
#[no_mangle]
pub unsafe extern "C" fn st_apply(
    expr: *const c_char,
    t: *const StTensor,
    out: *mut *mut StTensor,
) -> StStatus {
    guarded(|| {
        let t = deref!(t);
        let text = match read_str(expr) {
            Ok(s) => s,
            Err(s) => return s,
        };
        let e = match parse(text) {
            Ok(e) => e,
            Err(e) => return fail(&e),
        };
        match apply_expr(&e, &t.inner) {
            Ok(r) => write_handle(out, StTensor { inner: r }),
            Err(e) => fail(&e),
        }
    })
}

/// Normalize an operator expression at the given dimension and emit the
/// canonical form as a JSON array of monomials `{g, gradt, divt, tr,
/// coeff: {num, den}}`. `flat_background` selects which reordering bracket
/// the rewriter uses.
#[no_mangle]
pub unsafe extern "C" fn st_normalize_json(
    expr: *const c_char,
    dim: u32,
    flat_background: bool,
    out: *mut *mut c_char,
) -> StStatus {
    guarded(|| {
        let text = match read_str(expr) {
            Ok(s) => s,
            Err(s) => return s,
        };
        if dim == 0 {
            set_error("dimension must be positive");
            return StStatus::StInvalidArgument;
        }
        let e = match parse(text) {
            Ok(e) => e,
            Err(e) => return fail(&e),
        };
        let class = if flat_background {
            CurvatureClass::Flat
        } else {
            CurvatureClass::ConstantCurvature
        };
        let nf = normalize(&e, dim, class);
        write_string(out, serde_json::to_string_pretty(&normal_form_to_json(&nf)).unwrap())
    })
}

/// Split a tensor into its trace decomposition and emit the slices with
/// their spectral eigenvalues as JSON.
#[no_mangle]
pub unsafe extern "C" fn st_decompose_json(t: *const StTensor, out: *mut *mut c_char) -> StStatus {
    guarded(|| {
        let t = deref!(t);
        match trace_decompose(&t.inner) {
            Ok(dec) => write_string(
                out,
                serde_json::to_string_pretty(&decomposition_to_json(&dec)).unwrap(),
            ),
            Err(e) => fail(&e),
        }
    })
}

/// Run an identity suite (`sp2`, `doublet`, `box`, `fig3`, `depth`,
/// `inversion`, `rewriter`, or `all`) on seeded random tensors and emit the
/// full verification report as JSON. The report's top-level `pass` field
/// carries the verdict; a failing report still returns `StOk` here because
/// the call itself succeeded.
#[no_mangle]
pub unsafe extern "C" fn st_verify_json(
    geo: *const StGeometry,
    suite: *const c_char,
    seed: u64,
    trials: u32,
    max_rank: u32,
    max_degree: u32,
    out: *mut *mut c_char,
) -> StStatus {
    guarded(|| {
        let geo = deref!(geo);
        let suite = match read_str(suite) {
            Ok(s) => s,
            Err(s) => return s,
        };
        match run_verification(&geo.inner, suite, seed, trials, max_rank, max_degree) {
            Ok(rep) => write_string(out, serde_json::to_string_pretty(&rep).unwrap()),
            Err(e) => fail(&e),
        }
    })
}

/// Report on the normal form of g^m tr^m against its closed factorial
/// expressions, as JSON.
#[no_mangle]
pub unsafe extern "C" fn st_trace_power_report_json(
    m: u32,
    dim: u32,
    out: *mut *mut c_char,
) -> StStatus {
    guarded(|| {
        if m == 0 || dim == 0 {
            set_error("m and dim must be positive");
            return StStatus::StInvalidArgument;
        }
        let rep = pochhammer_report(m, dim);
        write_string(out, serde_json::to_string_pretty(&rep).unwrap())
    })
}

/// Gauge and divergence residual survey for the detour operator on a flat
/// background, as JSON. Errors with `ST_UNSUPPORTED` on curved handles.
#[no_mangle]
pub unsafe extern "C" fn st_detour_report_json(
    geo: *const StGeometry,
    seed: u64,
    trials: u32,
    out: *mut *mut c_char,
) -> StStatus {
    guarded(|| {
        let geo = deref!(geo);
        if !geo.inner.is_flat() {
            return fail(&Error::FlatOnly);
        }
        match detour_report(&geo.inner, seed, trials) {
            Ok(rep) => write_string(out, serde_json::to_string_pretty(&rep).unwrap()),
            Err(e) => fail(&e),
        }
    })
}

/// Integrate the spinning-geodesic flow with fixed-step RK4 and emit the
/// initial charges, final state, and relative conservation drift as JSON.
/// `x`, `pi`, `z_re`, `z_im` must each hold `st_geometry_dim(geo)` entries.
#[no_mangle]
pub unsafe extern "C" fn st_simulate_json(
    geo: *const StGeometry,
    x: *const f64,
    pi: *const f64,
    z_re: *const f64,
    z_im: *const f64,
    dt: f64,
    steps: usize,
    out: *mut *mut c_char,
) -> StStatus {
    guarded(|| {
        let geo = deref!(geo);
        let n = geo.inner.dim();
        if x.is_null() || pi.is_null() || z_re.is_null() || z_im.is_null() {
            set_error("null state array");
            return StStatus::StNullPointer;
        }
        if !dt.is_finite() || dt <= 0.0 || steps == 0 {
            set_error("dt must be positive and steps nonzero");
            return StStatus::StInvalidArgument;
        }
        let xs = std::slice::from_raw_parts(x, n).to_vec();
        let pis = std::slice::from_raw_parts(pi, n).to_vec();
        let zr = std::slice::from_raw_parts(z_re, n);
        let zi = std::slice::from_raw_parts(z_im, n);
        let zs: Vec<[f64; 2]> = zr.iter().zip(zi).map(|(&r, &i)| [r, i]).collect();

        let frame = FrameData::new(geo.inner.clone());
        let state0 = PhaseState::new(xs, pis, zs);
        let initial = noether_charges(&state0, &frame);
        let traj = match integrate_rk4(state0, dt, steps, &frame) {
            Ok(t) => t,
            Err(e) => return fail(&e),
        };
        let drift = drift_report(&traj, &frame);
        let doc = serde_json::json!({
            "dim": n,
            "dt": dt,
            "steps": steps,
            "initial_charges": initial,
            "final_state": traj.last().unwrap(),
            "drift": drift,
        });
        write_string(out, serde_json::to_string_pretty(&doc).unwrap())
    })
}

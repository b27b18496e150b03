//! C ABI over `dcp-core`.
//!
//! Every fallible function returns a [`DcpStatus`]; on failure a message is
//! available from [`dcp_last_error_message`] on the calling thread. Datasets and
//! prediction sets are opaque handles owned by the caller and released with the
//! matching `_free` function. Panics never cross the boundary.

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use dcp_core::conformal::{self, conformal_quantile, ConformalConfig, Method};
use dcp_core::fitters::{default_lasso_lambda, FitterKind, FitterSpec, DEFAULT_MAX_ITER, DEFAULT_TOL};
use dcp_core::grid::RoundingMode;
use dcp_core::interval::Interval;
use dcp_core::normal::normal_quantile;
use dcp_core::simulation::data_range_grid;
use dcp_core::{Dataset, Error, PredictionSet};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DcpStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidInput = 2,
    InvalidRange = 3,
    Dimension = 4,
    Singular = 5,
    Config = 6,
    OutOfBounds = 7,
    Empty = 8,
    Panic = 9,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DcpMethod {
    Approximate = 0,
    Cpdd = 1,
    Cpdm = 2,
    Split = 3,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DcpFitter {
    Lasso = 0,
    Ridge = 1,
    LeastSquaresOnSupport = 2,
    ConstantMean = 3,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DcpRounding {
    Nearest = 0,
    Randomized = 1,
}

/// Prediction settings. Start from [`dcp_config_default`].
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct DcpConfig {
    pub alpha: f64,
    pub method: DcpMethod,
    pub fitter: DcpFitter,
    /// Penalty; a negative value selects `sqrt(ln p / 2n)`.
    pub lambda: f64,
    /// Number of grid points over the training response range.
    pub grid_size: usize,
    pub rounding: DcpRounding,
    /// Seeds randomized rounding and the split method.
    pub seed: u64,
    pub intercept: bool,
    pub tol: f64,
    pub max_iter: usize,
}

/// One piece of a prediction set. Infinite ends are `±INFINITY` and always open.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DcpInterval {
    pub lo: f64,
    pub hi: f64,
    pub lo_closed: bool,
    pub hi_closed: bool,
}

/// Opaque training data handle.
pub struct DcpDataset {
    inner: Dataset,
}

/// Opaque prediction set handle.
pub struct DcpPredictionSet {
    inner: PredictionSet,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_last_error(message: String) {
    let c = CString::new(message.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(err: &Error) -> DcpStatus {
    match err {
        Error::InvalidRange { .. } => DcpStatus::InvalidRange,
        Error::Dimension { .. } => DcpStatus::Dimension,
        Error::Singular(_) => DcpStatus::Singular,
        Error::Config(_) => DcpStatus::Config,
        _ => DcpStatus::InvalidInput,
    }
}

fn fail(status: DcpStatus, message: impl Into<String>) -> DcpStatus {
    set_last_error(message.into());
    status
}

fn guard(f: impl FnOnce() -> Result<(), DcpStatus>) -> DcpStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => DcpStatus::Ok,
        Ok(Err(status)) => status,
        Err(_) => fail(DcpStatus::Panic, "internal panic"),
    }
}

fn core_err(err: Error) -> DcpStatus {
    let status = status_of(&err);
    fail(status, err.to_string())
}

fn null(name: &str) -> DcpStatus {
    fail(DcpStatus::NullPointer, format!("`{name}` is null"))
}

/// Reads `len` doubles; a zero length accepts a null pointer.
unsafe fn slice<'a>(data: *const f64, len: usize, name: &str) -> Result<&'a [f64], DcpStatus> {
    if len == 0 {
        return Ok(&[]);
    }
    if data.is_null() {
        return Err(null(name));
    }
    Ok(std::slice::from_raw_parts(data, len))
}

fn to_c(interval: &Interval) -> DcpInterval {
    DcpInterval {
        lo: interval.lo.value,
        hi: interval.hi.value,
        lo_closed: interval.lo.closed,
        hi_closed: interval.hi.closed,
    }
}

/// Message for the last failed call on this thread, or null. The pointer is
/// valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn dcp_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Static, NUL-terminated crate version.
#[no_mangle]
pub extern "C" fn dcp_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

#[no_mangle]
pub extern "C" fn dcp_config_default() -> DcpConfig {
    DcpConfig {
        alpha: 0.1,
        method: DcpMethod::Cpdm,
        fitter: DcpFitter::Lasso,
        lambda: -1.0,
        grid_size: 20,
        rounding: DcpRounding::Nearest,
        seed: 0,
        intercept: false,
        tol: DEFAULT_TOL,
        max_iter: DEFAULT_MAX_ITER,
    }
}

/// Copies an `n x p` row-major feature matrix and `n` responses into a new dataset.
///
/// # Safety
/// `x` must point to `n * p` doubles, `y` to `n` doubles and `out` to writable storage.
#[no_mangle]
pub unsafe extern "C" fn dcp_dataset_new(
    n: usize,
    p: usize,
    x: *const f64,
    y: *const f64,
    out: *mut *mut DcpDataset,
) -> DcpStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        *out = ptr::null_mut();
        let len = n.checked_mul(p).ok_or_else(|| fail(DcpStatus::InvalidInput, "n * p overflows"))?;
        let x = slice(x, len, "x")?;
        let y = slice(y, n, "y")?;
        let inner = Dataset::from_row_major(n, p, x, y).map_err(core_err)?;
        *out = Box::into_raw(Box::new(DcpDataset { inner }));
        Ok(())
    })
}

/// # Safety
/// `data` must be null or a live handle from [`dcp_dataset_new`].
#[no_mangle]
pub unsafe extern "C" fn dcp_dataset_n(data: *const DcpDataset) -> usize {
    data.as_ref().map_or(0, |d| d.inner.n())
}

/// # Safety
/// `data` must be null or a live handle from [`dcp_dataset_new`].
#[no_mangle]
pub unsafe extern "C" fn dcp_dataset_p(data: *const DcpDataset) -> usize {
    data.as_ref().map_or(0, |d| d.inner.p())
}

/// # Safety
/// `data` must be null or a handle from [`dcp_dataset_new`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn dcp_dataset_free(data: *mut DcpDataset) {
    if !data.is_null() {
        drop(Box::from_raw(data));
    }
}

fn build_config(cfg: &DcpConfig, data: &Dataset) -> Result<ConformalConfig, DcpStatus> {
    let kind = match cfg.fitter {
        DcpFitter::Lasso => FitterKind::Lasso,
        DcpFitter::Ridge => FitterKind::Ridge,
        DcpFitter::LeastSquaresOnSupport => FitterKind::LeastSquaresOnSupport,
        DcpFitter::ConstantMean => FitterKind::ConstantMean,
    };
    let method = match cfg.method {
        DcpMethod::Approximate => Method::Approximate,
        DcpMethod::Cpdd => Method::Cpdd,
        DcpMethod::Cpdm => Method::Cpdm,
        DcpMethod::Split => Method::Split,
    };
    let mode = match cfg.rounding {
        DcpRounding::Nearest => RoundingMode::Nearest,
        DcpRounding::Randomized => RoundingMode::Randomized { seed: cfg.seed },
    };
    let lambda = if cfg.lambda < 0.0 { default_lasso_lambda(1.0, data.n(), data.p()) } else { cfg.lambda };
    let fitter = FitterSpec::new(kind, lambda)
        .with_intercept(cfg.intercept)
        .with_tol(cfg.tol)
        .with_max_iter(cfg.max_iter);
    let responses: Vec<f64> = data.responses().iter().copied().collect();
    let grid = data_range_grid(&responses, cfg.grid_size, mode).map_err(core_err)?;
    let mut out = ConformalConfig::new(cfg.alpha, fitter, grid.discretizer, method);
    out.split_seed = cfg.seed;
    out.validate().map_err(core_err)?;
    Ok(out)
}

/// Builds the prediction set at covariate `x` (length `p`).
///
/// # Safety
/// `data` must be a live dataset handle, `x` must point to `p` doubles, `cfg`
/// to a valid config and `out` to writable storage.
#[no_mangle]
pub unsafe extern "C" fn dcp_predict(
    data: *const DcpDataset,
    x: *const f64,
    p: usize,
    cfg: *const DcpConfig,
    out: *mut *mut DcpPredictionSet,
) -> DcpStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        *out = ptr::null_mut();
        let data = &data.as_ref().ok_or_else(|| null("data"))?.inner;
        let cfg = cfg.as_ref().ok_or_else(|| null("cfg"))?;
        let x = slice(x, p, "x")?;
        let cfg = build_config(cfg, data)?;
        let inner = conformal::predict(data, x, &cfg).map_err(core_err)?;
        *out = Box::into_raw(Box::new(DcpPredictionSet { inner }));
        Ok(())
    })
}

/// Number of disjoint intervals in the set (0 for null or empty).
///
/// # Safety
/// `set` must be null or a live handle from [`dcp_predict`].
#[no_mangle]
pub unsafe extern "C" fn dcp_prediction_set_count(set: *const DcpPredictionSet) -> usize {
    set.as_ref().map_or(0, |s| s.inner.intervals().len())
}

/// # Safety
/// `set` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn dcp_prediction_set_interval(
    set: *const DcpPredictionSet,
    index: usize,
    out: *mut DcpInterval,
) -> DcpStatus {
    guard(|| {
        let set = &set.as_ref().ok_or_else(|| null("set"))?.inner;
        let out = out.as_mut().ok_or_else(|| null("out"))?;
        let pieces = set.intervals();
        let piece = pieces.get(index).ok_or_else(|| {
            fail(DcpStatus::OutOfBounds, format!("interval {index} requested, set has {}", pieces.len()))
        })?;
        *out = to_c(piece);
        Ok(())
    })
}

/// Smallest interval containing the set; `DCP_STATUS_EMPTY` for an empty set.
///
/// # Safety
/// `set` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn dcp_prediction_set_hull(set: *const DcpPredictionSet, out: *mut DcpInterval) -> DcpStatus {
    guard(|| {
        let set = &set.as_ref().ok_or_else(|| null("set"))?.inner;
        let out = out.as_mut().ok_or_else(|| null("out"))?;
        let hull = set.hull_interval().ok_or_else(|| fail(DcpStatus::Empty, "prediction set is empty"))?;
        *out = to_c(&hull);
        Ok(())
    })
}

/// # Safety
/// `set` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn dcp_prediction_set_contains(set: *const DcpPredictionSet, y: f64) -> bool {
    set.as_ref().is_some_and(|s| s.inner.contains(y))
}

/// Lebesgue measure, with unbounded ends clipped to the grid's length window.
/// NaN for a null handle.
///
/// # Safety
/// `set` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn dcp_prediction_set_length(set: *const DcpPredictionSet) -> f64 {
    set.as_ref().map_or(f64::NAN, |s| s.inner.length())
}

/// # Safety
/// `set` must be null or a handle from [`dcp_predict`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn dcp_prediction_set_free(set: *mut DcpPredictionSet) {
    if !set.is_null() {
        drop(Box::from_raw(set));
    }
}

/// The `ceil((1 - alpha)(n + 1))`-th smallest of `n` residuals, or `+INFINITY`
/// when that rank exceeds `n`.
///
/// # Safety
/// `residuals` must point to `n` doubles and `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn dcp_conformal_quantile(
    residuals: *const f64,
    n: usize,
    alpha: f64,
    out: *mut f64,
) -> DcpStatus {
    guard(|| {
        let out = out.as_mut().ok_or_else(|| null("out"))?;
        let residuals = slice(residuals, n, "residuals")?;
        *out = conformal_quantile(residuals, alpha).map_err(core_err)?;
        Ok(())
    })
}

/// Standard normal quantile for `p` in (0, 1).
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn dcp_normal_quantile(p: f64, out: *mut f64) -> DcpStatus {
    guard(|| {
        let out = out.as_mut().ok_or_else(|| null("out"))?;
        if !(p > 0.0 && p < 1.0) {
            return Err(fail(DcpStatus::InvalidInput, format!("p must lie in (0, 1), got {p}")));
        }
        *out = normal_quantile(p);
        Ok(())
    })
}

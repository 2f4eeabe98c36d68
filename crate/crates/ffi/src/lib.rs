//! C ABI over `rms_core`.
//!
//! Every fallible call returns an [`RmsStatus`]. On failure a description is
//! kept per thread and can be read with [`rms_last_error_message`]. Handles
//! are opaque and must be released with their `_free` function.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::ptr;

use rand::SeedableRng;
use rms_core::channel::{sample_realization, ChannelRealization};
use rms_core::dlopt::{self, DlProblem, EffectiveDlChannel};
use rms_core::harness::{self, Scenario, SweepConfig};
use rms_core::solver::OptimOptions;
use rms_core::sysmodel::{self, SystemConfig};
use rms_core::timemod::{self, GatingWaveform};
use rms_core::ulopt::{self, DualOptions, UlProblem};
use rms_core::{Complex64, Error, SimRng};

/// Result of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RmsStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    InvalidConfig = 3,
    UnknownConfigKey = 4,
    DimensionMismatch = 5,
    UnreachableAmplitude = 6,
    BufferTooSmall = 7,
    Io = 8,
    Numerical = 9,
    Panic = 10,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RmsScenario {
    Downlink = 0,
    Uplink = 1,
}

/// Sweep configuration handle.
pub struct RmsConfig {
    inner: SweepConfig,
}

/// One sampled channel realization together with the system it was drawn for.
pub struct RmsRealization {
    system: SystemConfig,
    inner: ChannelRealization,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(err: &Error) -> RmsStatus {
    match err {
        Error::InvalidConfig(_) => RmsStatus::InvalidConfig,
        Error::UnknownConfigKey(_) => RmsStatus::UnknownConfigKey,
        Error::DimensionMismatch { .. } => RmsStatus::DimensionMismatch,
        Error::UnreachableAmplitude(_) | Error::AmplitudeViolation(_) => RmsStatus::UnreachableAmplitude,
        Error::Io(_) => RmsStatus::Io,
        Error::SingularGeometry(_) | Error::SingularPattern | Error::NonSeparable(_) | Error::DegenerateChannel(_) => {
            RmsStatus::Numerical
        }
        _ => RmsStatus::InvalidArgument,
    }
}

struct Fail(RmsStatus, String);

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        Fail(status_of(&e), e.to_string())
    }
}

fn null(what: &str) -> Fail {
    Fail(RmsStatus::NullPointer, format!("{what} is null"))
}

/// Runs `f`, records any error or panic, and returns the status.
fn guard(f: impl FnOnce() -> Result<(), Fail>) -> RmsStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => RmsStatus::Ok,
        Ok(Err(Fail(status, msg))) => {
            set_error(msg);
            status
        }
        Err(payload) => {
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "panic".to_string());
            set_error(format!("internal panic: {msg}"));
            RmsStatus::Panic
        }
    }
}

unsafe fn str_arg<'a>(p: *const c_char, what: &str) -> Result<&'a str, Fail> {
    if p.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(p).to_str().map_err(|_| Fail(RmsStatus::InvalidArgument, format!("{what} is not UTF-8")))
}

unsafe fn out_arg<'a, T>(p: *mut T, what: &str) -> Result<&'a mut T, Fail> {
    p.as_mut().ok_or_else(|| null(what))
}

unsafe fn handle<'a, T>(p: *const T, what: &str) -> Result<&'a T, Fail> {
    p.as_ref().ok_or_else(|| null(what))
}

/// Message of the last failed call on this thread, or null. The pointer stays
/// valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn rms_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Default configuration. Never null.
#[no_mangle]
pub extern "C" fn rms_config_default() -> *mut RmsConfig {
    Box::into_raw(Box::new(RmsConfig { inner: SweepConfig::default() }))
}

/// Parses `key = value` text into a new handle.
///
/// # Safety
/// `text` must be a valid NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn rms_config_parse(text: *const c_char, out: *mut *mut RmsConfig) -> RmsStatus {
    guard(|| {
        let out = out_arg(out, "out")?;
        let cfg = harness::parse_config(str_arg(text, "text")?)?;
        *out = Box::into_raw(Box::new(RmsConfig { inner: cfg }));
        Ok(())
    })
}

/// Reads a config file into a new handle.
///
/// # Safety
/// `path` must be a valid NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn rms_config_read(path: *const c_char, out: *mut *mut RmsConfig) -> RmsStatus {
    guard(|| {
        let out = out_arg(out, "out")?;
        let cfg = harness::read_config(Path::new(str_arg(path, "path")?))?;
        *out = Box::into_raw(Box::new(RmsConfig { inner: cfg }));
        Ok(())
    })
}

/// Overrides trial count and master seed.
///
/// # Safety
/// `config` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn rms_config_set_trials(config: *mut RmsConfig, trials: usize, master_seed: u64) -> RmsStatus {
    guard(|| {
        let cfg = config.as_mut().ok_or_else(|| null("config"))?;
        if trials == 0 {
            return Err(Fail(RmsStatus::InvalidArgument, "trials must be at least 1".into()));
        }
        cfg.inner.trials = trials;
        cfg.inner.master_seed = master_seed;
        Ok(())
    })
}

/// # Safety
/// `config` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn rms_config_free(config: *mut RmsConfig) {
    if !config.is_null() {
        drop(Box::from_raw(config));
    }
}

/// `2D²/λ`.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn rms_rayleigh_distance(aperture: f64, wavelength: f64, out: *mut f64) -> RmsStatus {
    guard(|| {
        *out_arg(out, "out")? = sysmodel::rayleigh_distance(aperture, wavelength)?;
        Ok(())
    })
}

/// Order-`l` Fourier coefficient of the gating waveform `(t_on, tau, period)`.
///
/// # Safety
/// `out_re` and `out_im` must be valid pointers.
#[no_mangle]
pub unsafe extern "C" fn rms_harmonic_coefficient(
    t_on: f64,
    tau: f64,
    period: f64,
    l: u32,
    out_re: *mut f64,
    out_im: *mut f64,
) -> RmsStatus {
    guard(|| {
        let (re, im) = (out_arg(out_re, "out_re")?, out_arg(out_im, "out_im")?);
        let z = timemod::harmonic_coefficient(&GatingWaveform::new(t_on, tau, period)?, l);
        (*re, *im) = (z.re, z.im);
        Ok(())
    })
}

/// Gating waveform whose first harmonic equals `re + j·im`.
///
/// # Safety
/// `out_t_on` and `out_tau` must be valid pointers.
#[no_mangle]
pub unsafe extern "C" fn rms_design_gating(
    re: f64,
    im: f64,
    period: f64,
    out_t_on: *mut f64,
    out_tau: *mut f64,
) -> RmsStatus {
    guard(|| {
        let (t_on, tau) = (out_arg(out_t_on, "out_t_on")?, out_arg(out_tau, "out_tau")?);
        let w = timemod::design_gating(Complex64::new(re, im), period)?;
        (*t_on, *tau) = (w.t_on(), w.tau());
        Ok(())
    })
}

/// Samples a realization for `num_elements` elements with the given seed.
///
/// # Safety
/// `config` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn rms_realization_sample(
    config: *const RmsConfig,
    num_elements: usize,
    seed: u64,
    out: *mut *mut RmsRealization,
) -> RmsStatus {
    guard(|| {
        let cfg = handle(config, "config")?;
        let out = out_arg(out, "out")?;
        let system = cfg.inner.system.with_elements(num_elements)?;
        let inner = sample_realization(&system, &mut SimRng::seed_from_u64(seed))?;
        *out = Box::into_raw(Box::new(RmsRealization { system, inner }));
        Ok(())
    })
}

/// # Safety
/// `real` must be a live handle; the out pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn rms_realization_dims(
    real: *const RmsRealization,
    out_users: *mut usize,
    out_elements: *mut usize,
) -> RmsStatus {
    guard(|| {
        let r = handle(real, "realization")?;
        *out_arg(out_users, "out_users")? = r.system.num_users;
        *out_arg(out_elements, "out_elements")? = r.system.num_elements;
        Ok(())
    })
}

/// Copies user `k`'s cascaded channel into `re` and `im`, each of length `len`
/// (at least the element count).
///
/// # Safety
/// `real` must be a live handle; `re` and `im` must hold `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn rms_realization_cascaded(
    real: *const RmsRealization,
    k: usize,
    re: *mut f64,
    im: *mut f64,
    len: usize,
) -> RmsStatus {
    guard(|| {
        let r = handle(real, "realization")?;
        let c = r.inner.cascaded.c.get(k).ok_or_else(|| {
            Fail(RmsStatus::InvalidArgument, format!("user {k} out of range for {} users", r.system.num_users))
        })?;
        if re.is_null() || im.is_null() {
            return Err(null("output buffer"));
        }
        if len < c.len() {
            return Err(Fail(RmsStatus::BufferTooSmall, format!("buffer holds {len}, need {}", c.len())));
        }
        let (re, im) = (std::slice::from_raw_parts_mut(re, len), std::slice::from_raw_parts_mut(im, len));
        for (m, z) in c.iter().enumerate() {
            (re[m], im[m]) = (z.re, z.im);
        }
        Ok(())
    })
}

/// # Safety
/// `real` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn rms_realization_free(real: *mut RmsRealization) {
    if !real.is_null() {
        drop(Box::from_raw(real));
    }
}

/// Downlink design on a realization. Writes the sum-rate and, when
/// `powers` is non-null, the `K` per-user powers.
///
/// # Safety
/// `real` must be a live handle; `out_sum_rate` valid; `powers` null or
/// holding `powers_len` doubles.
#[no_mangle]
pub unsafe extern "C" fn rms_dl_optimize(
    real: *const RmsRealization,
    out_sum_rate: *mut f64,
    powers: *mut f64,
    powers_len: usize,
) -> RmsStatus {
    guard(|| {
        let r = handle(real, "realization")?;
        let rate = out_arg(out_sum_rate, "out_sum_rate")?;
        let problem = DlProblem::new(
            EffectiveDlChannel::from_realization(&r.inner),
            r.system.dl_total_power,
            r.system.noise_power,
        )?;
        let sol = dlopt::alternating_optimize_dl(&problem, &OptimOptions::default())?;
        if !powers.is_null() {
            if powers_len < sol.powers.len() {
                return Err(Fail(RmsStatus::BufferTooSmall, format!("buffer holds {powers_len}, need {}", sol.powers.len())));
            }
            std::slice::from_raw_parts_mut(powers, sol.powers.len()).copy_from_slice(&sol.powers);
        }
        *rate = sol.sum_rate;
        Ok(())
    })
}

/// Uplink design on a realization. Writes the sum-rate.
///
/// # Safety
/// `real` must be a live handle and `out_sum_rate` valid.
#[no_mangle]
pub unsafe extern "C" fn rms_ul_optimize(real: *const RmsRealization, out_sum_rate: *mut f64) -> RmsStatus {
    guard(|| {
        let r = handle(real, "realization")?;
        let rate = out_arg(out_sum_rate, "out_sum_rate")?;
        let problem = UlProblem::from_realization(&r.system, &r.inner)?;
        let sol = ulopt::alternating_optimize_ul(&problem, &OptimOptions::default(), &DualOptions::default())?;
        *rate = sol.sum_rate;
        Ok(())
    })
}

/// Runs a full sweep and writes the CSV to `out_path`.
///
/// # Safety
/// `config` must be a live handle and `out_path` a valid NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn rms_run_sweep(
    config: *const RmsConfig,
    scenario: RmsScenario,
    out_path: *const c_char,
) -> RmsStatus {
    guard(|| {
        let cfg = handle(config, "config")?;
        let path = str_arg(out_path, "out_path")?;
        let scenario = match scenario {
            RmsScenario::Downlink => Scenario::Dl,
            RmsScenario::Uplink => Scenario::Ul,
        };
        let records = harness::run_sweep(&cfg.inner, scenario, &OptimOptions::default())?;
        let mut buf = Vec::new();
        harness::write_sweep_csv(&records, &mut buf)?;
        std::fs::write(path, buf).map_err(Error::from)?;
        Ok(())
    })
}

//! C ABI for `metasinr`.
//!
//! Models are opaque handles made by the `ms_model_*` constructors and
//! released with [`ms_model_free`]. Every fallible call returns an
//! [`MsStatus`]; on failure the message is available from
//! [`ms_last_error_message`] on the same thread.

use metasinr::geometry::Tier;
use metasinr::metadist::{
    beta_meta, exact_meta_gilpelaez, moment_b, nearest_only_meta, proposed_meta_with, InterferenceMode, MetaQuery,
    ProposedOptions, QuadratureSpec,
};
use metasinr::simkit::{simulate_meta, EmpiricalMeta, SimulationConfig};
use metasinr::{ChannelModel, Error, NetworkModel};
use num_complex::Complex64;
use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MsStatus {
    Ok = 0,
    NullPointer = 1,
    Domain = 2,
    Unsupported = 3,
    Convergence = 4,
    Config = 5,
    Panic = 6,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MsInterference {
    /// Typical line plus the other lines.
    Plcp = 0,
    /// Planar PPP of the same BS density.
    PppApprox = 1,
}

/// Network, channel and numerical settings.
pub struct MsModel {
    model: NetworkModel,
    channel: ChannelModel,
    quad: QuadratureSpec,
    proposed: ProposedOptions,
}

/// Result of [`ms_simulate`].
pub struct MsSimResult(EmpiricalMeta);

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

fn status_of(e: &Error) -> MsStatus {
    match e {
        Error::Domain(_) => MsStatus::Domain,
        Error::Unsupported(_) => MsStatus::Unsupported,
        Error::Convergence { .. } => MsStatus::Convergence,
        Error::Config(_) => MsStatus::Config,
    }
}

/// Run `f`, turning errors and panics into a status code.
fn guard(f: impl FnOnce() -> Result<(), MsStatusOr>) -> MsStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => MsStatus::Ok,
        Ok(Err(MsStatusOr::Lib(e))) => {
            set_error(e.to_string());
            status_of(&e)
        }
        Ok(Err(MsStatusOr::Null(what))) => {
            set_error(format!("null pointer: {what}"));
            MsStatus::NullPointer
        }
        Err(p) => {
            let msg = p
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| p.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unknown panic".into());
            set_error(format!("internal panic: {msg}"));
            MsStatus::Panic
        }
    }
}

enum MsStatusOr {
    Lib(Error),
    Null(&'static str),
}

impl From<Error> for MsStatusOr {
    fn from(e: Error) -> Self {
        MsStatusOr::Lib(e)
    }
}

unsafe fn deref<'a, T>(p: *const T, what: &'static str) -> Result<&'a T, MsStatusOr> {
    p.as_ref().ok_or(MsStatusOr::Null(what))
}

unsafe fn write<T>(p: *mut T, v: T, what: &'static str) -> Result<(), MsStatusOr> {
    if p.is_null() {
        return Err(MsStatusOr::Null(what));
    }
    p.write(v);
    Ok(())
}

unsafe fn make_model(model: NetworkModel, alpha: f64, pt: f64, sigma2: f64, out: *mut *mut MsModel) -> MsStatus {
    guard(|| {
        if out.is_null() {
            return Err(MsStatusOr::Null("out"));
        }
        model.validate()?;
        let channel = ChannelModel::new(alpha, pt, sigma2)?;
        let h = Box::new(MsModel { model, channel, quad: QuadratureSpec::default(), proposed: ProposedOptions::default() });
        out.write(Box::into_raw(h));
        Ok(())
    })
}

/// Size of the buffer needed for the last error message, including the
/// terminating NUL. Copies as much as fits into `buf` (always NUL-terminated
/// when `len > 0`).
///
/// # Safety
/// `buf` must be null or point to `len` writable bytes.
#[no_mangle]
pub unsafe extern "C" fn ms_last_error_message(buf: *mut c_char, len: usize) -> usize {
    LAST_ERROR.with(|e| {
        let e = e.borrow();
        let bytes = e.as_bytes_with_nul();
        if !buf.is_null() && len > 0 {
            let n = bytes.len().min(len);
            std::ptr::copy_nonoverlapping(bytes.as_ptr() as *const c_char, buf, n);
            *buf.add(n - 1) = 0;
        }
        bytes.len()
    })
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn ms_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr() as *const c_char
}

/// # Safety
/// `out` must be a valid pointer to a handle slot.
#[no_mangle]
pub unsafe extern "C" fn ms_model_ppp(lambda: f64, alpha: f64, pt: f64, sigma2: f64, out: *mut *mut MsModel) -> MsStatus {
    make_model(NetworkModel::Ppp { lambda }, alpha, pt, sigma2, out)
}

/// Dedicated link of length `r` km.
///
/// # Safety
/// `out` must be a valid pointer to a handle slot.
#[no_mangle]
pub unsafe extern "C" fn ms_model_bipolar(lambda: f64, r: f64, alpha: f64, pt: f64, sigma2: f64, out: *mut *mut MsModel) -> MsStatus {
    make_model(NetworkModel::Bipolar { lambda, r }, alpha, pt, sigma2, out)
}

/// # Safety
/// `out` must be a valid pointer to a handle slot.
#[no_mangle]
pub unsafe extern "C" fn ms_model_mcp(lambda: f64, rc: f64, alpha: f64, pt: f64, sigma2: f64, out: *mut *mut MsModel) -> MsStatus {
    make_model(NetworkModel::Mcp { lambda, rc }, alpha, pt, sigma2, out)
}

/// `n` tiers with densities `lambdas[i]` and powers `powers[i]`. The tier
/// powers replace `pt`.
///
/// # Safety
/// `lambdas` and `powers` must point to `n` readable values; `out` to a handle slot.
#[no_mangle]
pub unsafe extern "C" fn ms_model_ktier(
    lambdas: *const f64,
    powers: *const f64,
    n: usize,
    alpha: f64,
    sigma2: f64,
    out: *mut *mut MsModel,
) -> MsStatus {
    if lambdas.is_null() || powers.is_null() || n == 0 {
        set_error("null or empty tier arrays".into());
        return MsStatus::NullPointer;
    }
    let l = std::slice::from_raw_parts(lambdas, n);
    let p = std::slice::from_raw_parts(powers, n);
    let tiers = l.iter().zip(p).map(|(&lambda, &pt)| Tier { lambda, pt }).collect();
    make_model(NetworkModel::KTier { tiers }, alpha, p[0], sigma2, out)
}

/// # Safety
/// `out` must be a valid pointer to a handle slot.
#[no_mangle]
pub unsafe extern "C" fn ms_model_plcp(lambda_l: f64, lambda_p: f64, alpha: f64, pt: f64, sigma2: f64, out: *mut *mut MsModel) -> MsStatus {
    make_model(NetworkModel::Plcp { lambda_l, lambda_p }, alpha, pt, sigma2, out)
}

/// # Safety
/// `model` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn ms_model_set_interference(model: *mut MsModel, mode: MsInterference) -> MsStatus {
    guard(|| {
        let m = model.as_mut().ok_or(MsStatusOr::Null("model"))?;
        m.proposed.interference = match mode {
            MsInterference::Plcp => InterferenceMode::Plcp,
            MsInterference::PppApprox => InterferenceMode::PppApprox,
        };
        Ok(())
    })
}

/// # Safety
/// `model` must be null or a handle from an `ms_model_*` constructor, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn ms_model_free(model: *mut MsModel) {
    if !model.is_null() {
        drop(Box::from_raw(model));
    }
}

unsafe fn meta(
    model: *const MsModel,
    theta: f64,
    gamma: f64,
    out: *mut f64,
    f: impl FnOnce(&MsModel, &MetaQuery) -> metasinr::Result<f64>,
) -> MsStatus {
    guard(|| {
        let m = deref(model, "model")?;
        let q = MetaQuery::new(theta, gamma)?;
        let v = f(m, &q)?;
        write(out, v, "out")
    })
}

/// Dominant-interferer approximation of `P(P_s(θ) > γ)`; θ linear.
///
/// # Safety
/// `model` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn ms_proposed_meta(model: *const MsModel, theta: f64, gamma: f64, out: *mut f64) -> MsStatus {
    meta(model, theta, gamma, out, |m, q| proposed_meta_with(&m.model, &m.channel, q, &m.quad, &m.proposed))
}

/// Two-moment beta approximation.
///
/// # Safety
/// `model` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn ms_beta_meta(model: *const MsModel, theta: f64, gamma: f64, out: *mut f64) -> MsStatus {
    meta(model, theta, gamma, out, |m, q| beta_meta(&m.model, &m.channel, q, &m.quad))
}

/// Gil-Pelaez inversion of the imaginary moments.
///
/// # Safety
/// `model` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn ms_exact_meta(model: *const MsModel, theta: f64, gamma: f64, out: *mut f64) -> MsStatus {
    meta(model, theta, gamma, out, |m, q| exact_meta_gilpelaez(&m.model, &m.channel, q, &m.quad))
}

/// Nearest-interferer-only closed form; depends only on α.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ms_nearest_only_meta(alpha: f64, theta: f64, gamma: f64, out: *mut f64) -> MsStatus {
    guard(|| {
        let ch = ChannelModel::new(alpha, 1.0, 0.0)?;
        let q = MetaQuery::new(theta, gamma)?;
        write(out, nearest_only_meta(&ch, &q), "out")
    })
}

/// Complex moment `M_b(θ)` with `b = b_re + i·b_im`.
///
/// # Safety
/// `model` must be a live handle; `out_re` and `out_im` writable.
#[no_mangle]
pub unsafe extern "C" fn ms_moment(model: *const MsModel, theta: f64, b_re: f64, b_im: f64, out_re: *mut f64, out_im: *mut f64) -> MsStatus {
    guard(|| {
        let m = deref(model, "model")?;
        if out_re.is_null() || out_im.is_null() {
            return Err(MsStatusOr::Null("out"));
        }
        let v = moment_b(&m.model, &m.channel, theta, Complex64::new(b_re, b_im), &m.quad)?;
        write(out_re, v.re, "out_re")?;
        write(out_im, v.im, "out_im")
    })
}

/// Monte-Carlo meta distribution at one θ on the given γ grid (strictly
/// increasing inside (0,1)). `window_radius <= 0` picks the default.
///
/// # Safety
/// `model` must be a live handle, `gammas` must point to `n_gamma` values
/// and `out` to a result slot.
#[no_mangle]
pub unsafe extern "C" fn ms_simulate(
    model: *const MsModel,
    theta: f64,
    n_realizations: usize,
    n_links: usize,
    window_radius: f64,
    seed: u64,
    gammas: *const f64,
    n_gamma: usize,
    out: *mut *mut MsSimResult,
) -> MsStatus {
    guard(|| {
        let m = deref(model, "model")?;
        if gammas.is_null() || out.is_null() {
            return Err(MsStatusOr::Null(if out.is_null() { "out" } else { "gammas" }));
        }
        let cfg = SimulationConfig {
            n_realizations,
            n_links_per_realization: n_links,
            window_radius: (window_radius > 0.0).then_some(window_radius),
            seed,
            gamma_grid: std::slice::from_raw_parts(gammas, n_gamma).to_vec(),
            fading_draws: None,
        };
        let e = simulate_meta(&m.model, &m.channel, theta, &cfg)?;
        out.write(Box::into_raw(Box::new(MsSimResult(e))));
        Ok(())
    })
}

/// Number of γ grid points in a simulation result.
///
/// # Safety
/// `res` must be null or a live result.
#[no_mangle]
pub unsafe extern "C" fn ms_sim_len(res: *const MsSimResult) -> usize {
    res.as_ref().map_or(0, |r| r.0.ccdf.len())
}

unsafe fn copy_out(src: &[f64], out: *mut f64, n: usize) -> Result<(), MsStatusOr> {
    if out.is_null() {
        return Err(MsStatusOr::Null("out"));
    }
    if n < src.len() {
        return Err(Error::Domain(format!("buffer holds {n} values, need {}", src.len())).into());
    }
    std::ptr::copy_nonoverlapping(src.as_ptr(), out, src.len());
    Ok(())
}

/// Copy the CCDF estimate into `out` (at least [`ms_sim_len`] values).
///
/// # Safety
/// `res` must be a live result and `out` must hold `n` values.
#[no_mangle]
pub unsafe extern "C" fn ms_sim_ccdf(res: *const MsSimResult, out: *mut f64, n: usize) -> MsStatus {
    guard(|| copy_out(&deref(res, "result")?.0.ccdf, out, n))
}

/// Copy the per-point standard errors into `out`.
///
/// # Safety
/// `res` must be a live result and `out` must hold `n` values.
#[no_mangle]
pub unsafe extern "C" fn ms_sim_std_err(res: *const MsSimResult, out: *mut f64, n: usize) -> MsStatus {
    guard(|| copy_out(&deref(res, "result")?.0.std_err, out, n))
}

/// Mean per-link success probability and its standard error.
///
/// # Safety
/// `res` must be a live result; `mean` and `se` writable.
#[no_mangle]
pub unsafe extern "C" fn ms_sim_mean(res: *const MsSimResult, mean: *mut f64, se: *mut f64) -> MsStatus {
    guard(|| {
        let (m, s) = deref(res, "result")?.0.mean_with_se();
        write(mean, m, "mean")?;
        write(se, s, "se")
    })
}

/// # Safety
/// `res` must be null or a result from [`ms_simulate`], not yet freed.
#[no_mangle]
pub unsafe extern "C" fn ms_sim_free(res: *mut MsSimResult) {
    if !res.is_null() {
        drop(Box::from_raw(res));
    }
}

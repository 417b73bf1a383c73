//! C ABI for the subwave resonance library.
//!
//! Handles are opaque pointers owned by the library; every constructor
//! has a matching `_free`. Functions return [`SwStatus`]; on failure the
//! thread-local message retrieved by [`sw_last_error_message`] explains
//! what went wrong.

use num_complex::Complex64;
use std::cell::RefCell;
use std::ffi::{c_char, c_int, CString};
use subwave::coupling::{build_coupling_set, Configuration, CouplingOpts, Dim, Disk};
use subwave::inverse::{design_family, DesignTargets, InverseOpts};
use subwave::material::Material;
use subwave::spectrum::{
    default_guesses, det_resonances, single_particle_resonance, MullerOpts, ResonanceMatrixSpec,
};
use subwave::Error;

/// Status codes returned by every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SwStatus {
    SwOk = 0,
    SwInvalidArgument = 1,
    SwPole = 2,
    SwOverlap = 3,
    SwNoConvergence = 4,
    SwDegenerate = 5,
    SwInternal = 6,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg).unwrap_or_else(|_| CString::new("invalid error text").unwrap());
    LAST_ERROR.with(|slot| *slot.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> SwStatus {
    match e {
        Error::Pole { .. } => SwStatus::SwPole,
        Error::Overlap { .. } => SwStatus::SwOverlap,
        Error::NoConvergence { .. } | Error::NoBracket { .. } => SwStatus::SwNoConvergence,
        Error::Domain { .. } | Error::Config(_) => SwStatus::SwInvalidArgument,
        Error::DegenerateTriple { .. }
        | Error::DegenerateCubic { .. }
        | Error::DegenerateDenominator { .. }
        | Error::DegenerateTargets { .. }
        | Error::DegenerateB { .. }
        | Error::DegenerateFactor { .. }
        | Error::AllBranchesRejected { .. }
        | Error::ComplexLeak { .. } => SwStatus::SwDegenerate,
        Error::Quadrature { .. } => SwStatus::SwInternal,
    }
}

fn fail(e: Error) -> SwStatus {
    let s = status_of(&e);
    set_error(e.to_string());
    s
}

/// Last error message for this thread, or null when no error occurred.
/// The pointer stays valid until the next failing call on this thread.
#[no_mangle]
pub extern "C" fn sw_last_error_message() -> *const c_char {
    LAST_ERROR.with(|slot| match &*slot.borrow() {
        Some(c) => c.as_ptr(),
        None => std::ptr::null(),
    })
}

/// Dispersive material handle.
pub struct SwMaterial(Material);

/// Resonator arrangement handle.
pub struct SwConfiguration {
    disks: Vec<Disk>,
    delta: f64,
    dim: Dim,
}

/// Create a material; returns null when a parameter is not strictly
/// positive and finite.
#[no_mangle]
pub extern "C" fn sw_material_new(
    eps0: f64,
    mu0: f64,
    alpha: f64,
    beta: f64,
    gamma: f64,
    eta: f64,
) -> *mut SwMaterial {
    match Material::new(eps0, mu0, alpha, beta, gamma, eta) {
        Ok(m) => Box::into_raw(Box::new(SwMaterial(m))),
        Err(e) => {
            set_error(e.to_string());
            std::ptr::null_mut()
        }
    }
}

/// # Safety
/// `handle` must come from [`sw_material_new`] and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn sw_material_free(handle: *mut SwMaterial) {
    if !handle.is_null() {
        drop(unsafe { Box::from_raw(handle) });
    }
}

unsafe fn deref<'a, T>(p: *const T, what: &str) -> Result<&'a T, SwStatus> {
    if p.is_null() {
        set_error(format!("{what} handle is null"));
        return Err(SwStatus::SwInvalidArgument);
    }
    Ok(unsafe { &*p })
}

macro_rules! try_ffi {
    ($e:expr) => {
        match $e {
            Ok(v) => v,
            Err(status) => return status,
        }
    };
}

/// eps(omega, k) of the dispersive model.
///
/// # Safety
/// `mat` must be a live material handle; `out_re`/`out_im` must be
/// writable.
#[no_mangle]
pub unsafe extern "C" fn sw_permittivity(
    mat: *const SwMaterial,
    omega_re: f64,
    omega_im: f64,
    k: f64,
    out_re: *mut f64,
    out_im: *mut f64,
) -> SwStatus {
    let m = try_ffi!(unsafe { deref(mat, "material") });
    if out_re.is_null() || out_im.is_null() {
        set_error("output pointer is null".into());
        return SwStatus::SwInvalidArgument;
    }
    match m.0.permittivity(Complex64::new(omega_re, omega_im), k) {
        Ok(v) => {
            unsafe {
                *out_re = v.re;
                *out_im = v.im;
            }
            SwStatus::SwOk
        }
        Err(e) => fail(e),
    }
}

/// Permittivity contrast xi(omega, k).
///
/// # Safety
/// Same contract as [`sw_permittivity`].
#[no_mangle]
pub unsafe extern "C" fn sw_contrast(
    mat: *const SwMaterial,
    omega_re: f64,
    omega_im: f64,
    k: f64,
    out_re: *mut f64,
    out_im: *mut f64,
) -> SwStatus {
    let m = try_ffi!(unsafe { deref(mat, "material") });
    if out_re.is_null() || out_im.is_null() {
        set_error("output pointer is null".into());
        return SwStatus::SwInvalidArgument;
    }
    match m.0.contrast(Complex64::new(omega_re, omega_im), k) {
        Ok(v) => {
            unsafe {
                *out_re = v.re;
                *out_im = v.im;
            }
            SwStatus::SwOk
        }
        Err(e) => fail(e),
    }
}

/// Create an empty arrangement at characteristic size `delta`;
/// `dim` is 2 (disks) or 3 (spheres). Null on invalid input.
#[no_mangle]
pub extern "C" fn sw_configuration_new(delta: f64, dim: c_int) -> *mut SwConfiguration {
    let d = match dim {
        2 => Dim::Two,
        3 => Dim::Three,
        other => {
            set_error(format!("dim must be 2 or 3, got {other}"));
            return std::ptr::null_mut();
        }
    };
    if delta.is_nan() || delta <= 0.0 || !delta.is_finite() {
        set_error(format!("delta = {delta} must be > 0"));
        return std::ptr::null_mut();
    }
    Box::into_raw(Box::new(SwConfiguration {
        disks: Vec::new(),
        delta,
        dim: d,
    }))
}

/// Append one resonator (centre, radius in unscaled coordinates).
///
/// # Safety
/// `cfg` must be a live configuration handle.
#[no_mangle]
pub unsafe extern "C" fn sw_configuration_add_disk(
    cfg: *mut SwConfiguration,
    cx: f64,
    cy: f64,
    radius: f64,
) -> SwStatus {
    if cfg.is_null() {
        set_error("configuration handle is null".into());
        return SwStatus::SwInvalidArgument;
    }
    let cfg = unsafe { &mut *cfg };
    match Disk::new([cx, cy], radius) {
        Ok(d) => {
            cfg.disks.push(d);
            SwStatus::SwOk
        }
        Err(e) => fail(e),
    }
}

/// # Safety
/// `handle` must come from [`sw_configuration_new`] and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn sw_configuration_free(handle: *mut SwConfiguration) {
    if !handle.is_null() {
        drop(unsafe { Box::from_raw(handle) });
    }
}

/// Resonant frequencies of the configured system at interior wavenumber
/// `k`. Roots are written in ascending real part into `out_re`/`out_im`
/// with their normalised residuals in `out_residual` (any of the output
/// arrays may be null to skip it); `cap` is their common capacity and
/// `out_len` receives the number of roots found.
///
/// # Safety
/// Handles must be live; output arrays must hold at least `cap` doubles.
#[no_mangle]
pub unsafe extern "C" fn sw_forward_resonances(
    cfg: *const SwConfiguration,
    mat: *const SwMaterial,
    k: f64,
    out_re: *mut f64,
    out_im: *mut f64,
    out_residual: *mut f64,
    cap: usize,
    out_len: *mut usize,
) -> SwStatus {
    let cfg = try_ffi!(unsafe { deref(cfg, "configuration") });
    let mat = try_ffi!(unsafe { deref(mat, "material") });
    if out_len.is_null() {
        set_error("out_len is null".into());
        return SwStatus::SwInvalidArgument;
    }
    let configuration = match Configuration::new(cfg.disks.clone(), cfg.delta, cfg.dim) {
        Ok(c) => c,
        Err(e) => return fail(e),
    };
    let copts = CouplingOpts::default();
    let mopts = MullerOpts::default();
    let result = (|| -> subwave::Result<Vec<(Complex64, f64)>> {
        let set = build_coupling_set(&configuration, &mat.0, k, &copts)?;
        if configuration.len() == 1 {
            let r = single_particle_resonance(
                &mat.0,
                set.self_eigenvalue(0),
                cfg.delta,
                k,
                None,
                &mopts,
            )?;
            return Ok(vec![(r.omega, r.residual)]);
        }
        let spec = ResonanceMatrixSpec {
            coupling: set,
            material: mat.0,
            k,
        };
        let guesses = default_guesses(&spec.coupling, &mat.0, k)?;
        let found = det_resonances(&spec, &guesses, &mopts)?;
        Ok(found.roots.iter().map(|r| (r.omega, r.residual)).collect())
    })();
    match result {
        Ok(roots) => {
            let n = roots.len().min(cap);
            for (i, (w, res)) in roots.iter().take(n).enumerate() {
                unsafe {
                    if !out_re.is_null() {
                        *out_re.add(i) = w.re;
                    }
                    if !out_im.is_null() {
                        *out_im.add(i) = w.im;
                    }
                    if !out_residual.is_null() {
                        *out_residual.add(i) = *res;
                    }
                }
            }
            unsafe { *out_len = n };
            SwStatus::SwOk
        }
        Err(e) => fail(e),
    }
}

/// One point of the inverse-design family: given three target
/// frequencies, the disk radius `rho` and a trial `alpha3`, solve for the
/// characteristic size and the admissible (alpha1, alpha2) branches.
/// Arrays receive up to `cap` branch solutions; `out_len` the count.
///
/// # Safety
/// `mat` must be live; arrays must hold `cap` doubles each (or be null).
#[no_mangle]
#[allow(clippy::too_many_arguments)]
pub unsafe extern "C" fn sw_inverse_design_at(
    mat: *const SwMaterial,
    k: f64,
    rho: f64,
    omega1_re: f64,
    omega1_im: f64,
    omega2_re: f64,
    omega2_im: f64,
    omega3_re: f64,
    omega3_im: f64,
    alpha3: f64,
    delta_lo: f64,
    delta_hi: f64,
    out_delta: *mut f64,
    out_alpha1: *mut f64,
    out_alpha2: *mut f64,
    out_max_residual: *mut f64,
    cap: usize,
    out_len: *mut usize,
) -> SwStatus {
    let mat = try_ffi!(unsafe { deref(mat, "material") });
    if out_len.is_null() || out_delta.is_null() {
        set_error("output pointer is null".into());
        return SwStatus::SwInvalidArgument;
    }
    let result = (|| -> subwave::Result<_> {
        let targets = DesignTargets::new(
            [
                Complex64::new(omega1_re, omega1_im),
                Complex64::new(omega2_re, omega2_im),
                Complex64::new(omega3_re, omega3_im),
            ],
            k,
            mat.0,
            rho,
        )?;
        design_family(
            &targets,
            &[alpha3],
            [delta_lo, delta_hi],
            &InverseOpts::default(),
        )
    })();
    match result {
        Ok(family) => {
            unsafe { *out_delta = family.delta };
            let n = family.solutions.len().min(cap);
            for (i, s) in family.solutions.iter().take(n).enumerate() {
                unsafe {
                    if !out_alpha1.is_null() {
                        *out_alpha1.add(i) = s.alpha1;
                    }
                    if !out_alpha2.is_null() {
                        *out_alpha2.add(i) = s.alpha2;
                    }
                    if !out_max_residual.is_null() {
                        *out_max_residual.add(i) = s.residuals.iter().cloned().fold(0.0, f64::max);
                    }
                }
            }
            unsafe { *out_len = n };
            SwStatus::SwOk
        }
        Err(e) => fail(e),
    }
}

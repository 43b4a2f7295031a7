//! C interface to the `revgeo` library.
//!
//! Every fallible call returns a [`RevgeoStatus`] and writes results through
//! out-pointers. On failure the message is available from
//! [`revgeo_last_error_message`] on the same thread. Handles are created by
//! `*_new`/`revgeo_integrate` and released with the matching `*_free`.

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use revgeo::central_force::{apsidal_angle, ForceParams};
use revgeo::closed::{find_closed, ClosedLabel};
use revgeo::dynamics::{initial_state_at, integrate, IntegratorConfig, OrbitTrace};
use revgeo::flat_torus::{flat_length, FlatLabel};
use revgeo::quadrature::{critical_angle, theta_frequency_bound, theta_frequency_unbound};
use revgeo::reduced::{critical_angles, effective_potential, turning_point};
use revgeo::surface::{make_torus, Family, SurfaceSpec};
use revgeo::{Error, ErrorKind};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RevgeoStatus {
    Ok = 0,
    NullPointer = 1,
    /// Arguments outside the domain of the operation.
    Domain = 2,
    /// A root, quadrature or integration failed to converge.
    Numerical = 3,
    /// An internal panic was caught at the boundary.
    Internal = 4,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RevgeoFamily {
    Ring = 0,
    Horn = 1,
    Spindle = 2,
    Sphere = 3,
}

/// Opaque surface handle.
pub struct RevgeoSurface {
    spec: SurfaceSpec,
}

/// Opaque integrated trace handle.
pub struct RevgeoTrace {
    trace: OrbitTrace,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct RevgeoProfile {
    pub radius: f64,
    pub radius_slope: f64,
    pub height_slope: f64,
}

/// Optional angles are NaN when they do not exist on the surface.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct RevgeoCriticalAngles {
    pub beta_crit: f64,
    pub beta_polar: f64,
    pub chi_inflection: f64,
}

/// `chi_max` and `r_max` are NaN for orbits that never turn.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct RevgeoTurningPoint {
    pub chi_max: f64,
    pub r_max: f64,
}

/// `chi_max` is NaN for unbound orbits.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct RevgeoClosed {
    pub beta0: f64,
    pub start_r: f64,
    pub energy_at_unit_ell: f64,
    pub chi_max: f64,
    pub period_length: f64,
    pub closure_residual: f64,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct RevgeoState {
    pub r: f64,
    pub theta: f64,
    pub vr: f64,
    pub vtheta: f64,
    pub lambda: f64,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct RevgeoDrift {
    pub energy: f64,
    pub ell: f64,
    pub clairaut: f64,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct RevgeoApsides {
    pub pericenter: f64,
    pub apocenter: f64,
    pub apsidal_angle: f64,
    pub precession: f64,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn fail(e: Error) -> RevgeoStatus {
    let status = match e.kind() {
        ErrorKind::Domain => RevgeoStatus::Domain,
        ErrorKind::Numerical => RevgeoStatus::Numerical,
    };
    set_error(e.to_string());
    status
}

/// Runs `f` with the error slot cleared, mapping errors and panics to a status.
fn guard(f: impl FnOnce() -> Result<(), RevgeoStatus>) -> RevgeoStatus {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => RevgeoStatus::Ok,
        Ok(Err(s)) => s,
        Err(p) => {
            let msg = p
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| p.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "panic".into());
            set_error(format!("internal error: {msg}"));
            RevgeoStatus::Internal
        }
    }
}

fn null(what: &str) -> RevgeoStatus {
    set_error(format!("{what} is null"));
    RevgeoStatus::NullPointer
}

unsafe fn surface<'a>(s: *const RevgeoSurface) -> Result<&'a SurfaceSpec, RevgeoStatus> {
    s.as_ref().map(|s| &s.spec).ok_or_else(|| null("surface"))
}

unsafe fn write<T>(out: *mut T, value: T) -> Result<(), RevgeoStatus> {
    if out.is_null() {
        return Err(null("output pointer"));
    }
    out.write(value);
    Ok(())
}

fn or_nan(x: Option<f64>) -> f64 {
    x.unwrap_or(f64::NAN)
}

/// Copies the last error message of this thread into `buf` (NUL-terminated,
/// truncated to `len`) and returns the full message length without the NUL.
/// Returns 0 when there is no error. `buf` may be null to query the length.
///
/// # Safety
/// `buf` must be null or valid for `len` bytes.
#[no_mangle]
pub unsafe extern "C" fn revgeo_last_error_message(buf: *mut c_char, len: usize) -> usize {
    LAST_ERROR.with(|e| {
        let e = e.borrow();
        let Some(msg) = e.as_ref() else {
            if !buf.is_null() && len > 0 {
                *buf = 0;
            }
            return 0;
        };
        let bytes = msg.as_bytes();
        if !buf.is_null() && len > 0 {
            let n = bytes.len().min(len - 1);
            ptr::copy_nonoverlapping(bytes.as_ptr().cast::<c_char>(), buf, n);
            *buf.add(n) = 0;
        }
        bytes.len()
    })
}

/// Creates a torus with tube center distance `a` and tube radius `b`.
///
/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn revgeo_surface_new(a: f64, b: f64, out: *mut *mut RevgeoSurface) -> RevgeoStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("output pointer"));
        }
        let spec = make_torus(a, b).map_err(fail)?;
        out.write(Box::into_raw(Box::new(RevgeoSurface { spec })));
        Ok(())
    })
}

/// # Safety
/// `s` must be null or a handle from [`revgeo_surface_new`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn revgeo_surface_free(s: *mut RevgeoSurface) {
    if !s.is_null() {
        drop(Box::from_raw(s));
    }
}

/// # Safety
/// `s` must be a live surface handle and `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn revgeo_surface_family(s: *const RevgeoSurface, out: *mut RevgeoFamily) -> RevgeoStatus {
    guard(|| {
        let family = match surface(s)?.family {
            Family::Ring => RevgeoFamily::Ring,
            Family::Horn => RevgeoFamily::Horn,
            Family::Spindle => RevgeoFamily::Spindle,
            Family::Sphere => RevgeoFamily::Sphere,
        };
        write(out, family)
    })
}

/// Profile radius and slopes at meridian arc length `r`.
///
/// # Safety
/// `s` must be a live surface handle and `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn revgeo_surface_profile(s: *const RevgeoSurface, r: f64, out: *mut RevgeoProfile) -> RevgeoStatus {
    guard(|| {
        let p = surface(s)?.profile(r);
        write(out, RevgeoProfile { radius: p.r, radius_slope: p.r_prime, height_slope: p.z_prime })
    })
}

/// # Safety
/// `s` must be a live surface handle and `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn revgeo_gaussian_curvature(s: *const RevgeoSurface, r: f64, out: *mut f64) -> RevgeoStatus {
    guard(|| write(out, surface(s)?.gaussian_curvature(r).map_err(fail)?))
}

/// # Safety
/// `s` must be a live surface handle and `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn revgeo_effective_potential(s: *const RevgeoSurface, ell: f64, r: f64, out: *mut f64) -> RevgeoStatus {
    guard(|| write(out, effective_potential(surface(s)?, ell, r)))
}

/// # Safety
/// `s` must be a live surface handle and `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn revgeo_turning_point(s: *const RevgeoSurface, beta0: f64, out: *mut RevgeoTurningPoint) -> RevgeoStatus {
    guard(|| {
        if !beta0.is_finite() {
            return Err(fail(Error::Domain(format!("beta0 must be finite, got {beta0}"))));
        }
        let tp = turning_point(surface(s)?, beta0);
        write(out, RevgeoTurningPoint { chi_max: or_nan(tp.chi_max), r_max: or_nan(tp.r_max) })
    })
}

/// # Safety
/// `s` must be a live surface handle and `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn revgeo_critical_angles(s: *const RevgeoSurface, out: *mut RevgeoCriticalAngles) -> RevgeoStatus {
    guard(|| {
        let c = critical_angles(surface(s)?);
        write(
            out,
            RevgeoCriticalAngles { beta_crit: or_nan(c.beta_crit), beta_polar: or_nan(c.beta_polar), chi_inflection: or_nan(c.chi_inf) },
        )
    })
}

/// Azimuthal advance per radial period, as a frequency `2 pi / delta_theta`,
/// for a unit-speed launch at `beta0` from the outer equator.
///
/// # Safety
/// `s` must be a live surface handle and `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn revgeo_theta_frequency(s: *const RevgeoSurface, beta0: f64, out: *mut f64) -> RevgeoStatus {
    guard(|| {
        let spec = surface(s)?;
        let f = match critical_angle(spec) {
            Some(crit) if beta0.abs() < crit => theta_frequency_unbound(spec, beta0),
            _ => theta_frequency_bound(spec, beta0),
        };
        write(out, f.map_err(fail)?)
    })
}

/// Solves the closed geodesic with label `[m,n;p]`.
///
/// # Safety
/// `s` must be a live surface handle and `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn revgeo_find_closed(s: *const RevgeoSurface, m: u32, n: u32, p: u8, out: *mut RevgeoClosed) -> RevgeoStatus {
    guard(|| {
        let cg = find_closed(surface(s)?, ClosedLabel::new(m, n, p)).map_err(fail)?;
        write(
            out,
            RevgeoClosed {
                beta0: cg.beta0,
                start_r: cg.start_r,
                energy_at_unit_ell: cg.energy_at_unit_ell,
                chi_max: or_nan(cg.chi_max),
                period_length: cg.period_length,
                closure_residual: cg.closure_residual,
            },
        )
    })
}

/// Integrates a unit-speed geodesic from `(r0, theta0)` at angle `beta0` to the
/// meridian up to affine time `max_lambda`. A non-positive `rel_tol` selects
/// the default tolerances.
///
/// # Safety
/// `s` must be a live surface handle and `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn revgeo_integrate(
    s: *const RevgeoSurface,
    r0: f64,
    theta0: f64,
    beta0: f64,
    max_lambda: f64,
    rel_tol: f64,
    out: *mut *mut RevgeoTrace,
) -> RevgeoStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("output pointer"));
        }
        let spec = surface(s)?;
        let mut cfg = IntegratorConfig::default().with_max_lambda(max_lambda);
        if rel_tol > 0.0 {
            cfg = cfg.with_tolerances(rel_tol, 1e-2 * rel_tol);
        }
        let state = initial_state_at(spec, r0, theta0, beta0, 1.0).map_err(fail)?;
        let trace = match integrate(spec, &state, &cfg) {
            Ok(t) => t,
            Err(Error::Integration { lambda, reason, partial }) => {
                out.write(Box::into_raw(Box::new(RevgeoTrace { trace: *partial })));
                set_error(format!("integration stopped at lambda = {lambda}: {reason}"));
                return Err(RevgeoStatus::Numerical);
            }
            Err(e) => return Err(fail(e)),
        };
        out.write(Box::into_raw(Box::new(RevgeoTrace { trace })));
        Ok(())
    })
}

/// # Safety
/// `t` must be null or a handle from [`revgeo_integrate`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn revgeo_trace_free(t: *mut RevgeoTrace) {
    if !t.is_null() {
        drop(Box::from_raw(t));
    }
}

/// Number of stored states; 0 for a null handle.
///
/// # Safety
/// `t` must be null or a live trace handle.
#[no_mangle]
pub unsafe extern "C" fn revgeo_trace_len(t: *const RevgeoTrace) -> usize {
    t.as_ref().map_or(0, |t| t.trace.states.len())
}

/// # Safety
/// `t` must be a live trace handle and `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn revgeo_trace_state(t: *const RevgeoTrace, index: usize, out: *mut RevgeoState) -> RevgeoStatus {
    guard(|| {
        let t = t.as_ref().ok_or_else(|| null("trace"))?;
        let s = t.trace.states.get(index).ok_or_else(|| {
            fail(Error::Domain(format!("index {index} out of range for {} states", t.trace.states.len())))
        })?;
        write(out, RevgeoState { r: s.r, theta: s.theta, vr: s.vr, vtheta: s.vtheta, lambda: s.lambda })
    })
}

/// State interpolated at affine time `lambda` within the trace.
///
/// # Safety
/// `t` must be a live trace handle and `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn revgeo_trace_state_at(t: *const RevgeoTrace, lambda: f64, out: *mut RevgeoState) -> RevgeoStatus {
    guard(|| {
        let t = t.as_ref().ok_or_else(|| null("trace"))?;
        let s = t.trace.state_at(lambda).ok_or_else(|| fail(Error::Domain(format!("lambda {lambda} outside the trace"))))?;
        write(out, RevgeoState { r: s.r, theta: s.theta, vr: s.vr, vtheta: s.vtheta, lambda: s.lambda })
    })
}

/// # Safety
/// `t` must be a live trace handle and `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn revgeo_trace_drift(t: *const RevgeoTrace, out: *mut RevgeoDrift) -> RevgeoStatus {
    guard(|| {
        let t = &t.as_ref().ok_or_else(|| null("trace"))?.trace;
        write(out, RevgeoDrift { energy: t.energy_drift, ell: t.ell_drift, clairaut: t.clairaut_drift })
    })
}

/// Length of the closed geodesic `[m,n]` on the unit flat square torus.
///
/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn revgeo_flat_length(m: u32, n: u32, out: *mut f64) -> RevgeoStatus {
    guard(|| write(out, flat_length(FlatLabel::new(m, n)).map_err(fail)?))
}

/// Apsides of a bound orbit in the potential `-k1/r - k2/r^3`.
///
/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn revgeo_kepler_apsides(k1: f64, k2: f64, ell: f64, energy: f64, out: *mut RevgeoApsides) -> RevgeoStatus {
    guard(|| {
        let params = ForceParams::new(k1, k2).map_err(fail)?;
        let a = apsidal_angle(&params, ell, energy).map_err(fail)?;
        write(
            out,
            RevgeoApsides { pericenter: a.pericenter, apocenter: a.apocenter, apsidal_angle: a.apsidal_angle, precession: a.precession },
        )
    })
}

//! Integrals of the form `int w(rho) dchi / sqrt(rho^2 - sigma^2)` along a
//! torus meridian, where `rho = R/b = c + 1 + cos(chi)` and `sigma = |p|/b`.
//!
//! With `kappa = sigma - (c + 1)` the radicand factors as
//! `(cos(chi) - kappa)(rho + sigma)`. Bound motion (`kappa >= -1`) is mapped to
//! the pendulum variable `sin(chi/2) = k sin(phi)`, which removes the turning
//! point singularity. Unbound motion is integrated in the distance `u` from the
//! inner equator, with a sinh stretch that resolves the near-critical peak.
//! A second sinh stretch handles bound motion whose turning point approaches
//! the inner equator.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI, SQRT_2, TAU};

use super::kronrod::{integrate, Tolerance};
use crate::error::{Error, Result};
use crate::surface::SurfaceSpec;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Weight {
    /// `sigma / rho`; yields azimuth.
    Angle,
    /// `rho`; yields arc length in units of `b`.
    Length,
}

impl Weight {
    fn at(self, rho: f64, sigma: f64) -> f64 {
        match self {
            Weight::Angle => sigma / rho,
            Weight::Length => rho,
        }
    }
}

/// Clairaut data in units of `b`, with the two differences that control the
/// singular behaviour stored without cancellation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct Clairaut {
    pub sigma: f64,
    /// `sigma - c = 1 + cos(chi_max)`; negative for unbound motion.
    pub gap: f64,
    /// `(c + 2 - sigma) / 2 = sin^2(chi_max / 2)`.
    pub ksq: f64,
}

/// `beta0` folded into `[0, pi/2]` with the same `|sin|`.
pub(crate) fn fold_angle(beta0: f64) -> f64 {
    let x = beta0.rem_euclid(TAU);
    let x = if x > PI { TAU - x } else { x };
    if x > FRAC_PI_2 {
        PI - x
    } else {
        x
    }
}

impl Clairaut {
    /// Launch from the outer equator at angle `beta0`.
    pub fn from_launch(spec: &SurfaceSpec, beta0: f64) -> Self {
        let c = spec.c;
        let beta = fold_angle(beta0);
        let sigma = (c + 2.0) * beta.sin();
        let gap = if c > 0.0 {
            let crit = (c / (c + 2.0)).asin();
            (c + 2.0) * 2.0 * (0.5 * (beta + crit)).cos() * (0.5 * (beta - crit)).sin()
        } else {
            sigma - c
        };
        let ksq = (c + 2.0) * (FRAC_PI_4 - 0.5 * beta).sin().powi(2);
        Clairaut { sigma, gap, ksq }
    }

    /// Launch whose distance below the critical angle is `delta` (ring tori).
    pub fn below_critical(spec: &SurfaceSpec, delta: f64) -> Self {
        let c = spec.c;
        let crit = (c / (c + 2.0)).asin();
        let beta = crit - delta;
        let gap = -(c + 2.0) * 2.0 * (crit - 0.5 * delta).cos() * (0.5 * delta).sin();
        Clairaut { sigma: c + gap, gap, ksq: (c + 2.0) * (FRAC_PI_4 - 0.5 * beta).sin().powi(2) }
    }

    /// Launch whose distance above `beta_lo` is `delta`; `beta_lo` is the
    /// critical angle on ring and horn tori and zero otherwise.
    pub fn above(spec: &SurfaceSpec, beta_lo: f64, delta: f64) -> Self {
        let c = spec.c;
        let beta = beta_lo + delta;
        if c >= 0.0 {
            let gap = (c + 2.0) * 2.0 * (beta_lo + 0.5 * delta).cos() * (0.5 * delta).sin();
            Clairaut { sigma: c + gap, gap, ksq: (c + 2.0) * (FRAC_PI_4 - 0.5 * beta).sin().powi(2) }
        } else {
            Clairaut::from_launch(spec, beta)
        }
    }

    /// Conjugate momentum `p_theta` (a length).
    pub fn from_momentum(spec: &SurfaceSpec, p: f64) -> Self {
        let b = spec.b;
        let p = p.abs();
        Clairaut { sigma: p / b, gap: (p - (spec.a - b)) / b, ksq: (spec.a + b - p) / (2.0 * b) }
    }

    /// Poloidal turning angle; `None` when unbound.
    pub fn chi_max(&self) -> Option<f64> {
        (self.gap >= 0.0).then(|| {
            if self.ksq < 0.5 {
                2.0 * self.ksq.max(0.0).sqrt().asin()
            } else {
                2.0 * (0.5 * self.gap).sqrt().min(1.0).acos()
            }
        })
    }
}

fn check(v: f64) -> Result<f64> {
    if v.is_finite() {
        Ok(v)
    } else {
        Err(Error::Quadrature { estimate: v, error: f64::INFINITY })
    }
}

/// `int_0^chi` for bound motion, `0 <= chi <= chi_max`; `None` runs to the
/// turning point.
fn bound_from_zero(c: f64, cl: &Clairaut, chi: Option<f64>, w: Weight, tol: Tolerance) -> Result<f64> {
    let sigma = cl.sigma;
    if cl.ksq <= 0.0 {
        return match chi {
            Some(x) if x != 0.0 => Err(Error::ForbiddenRegion { r: x }),
            Some(_) => Ok(0.0),
            // Circular limit of the quarter period.
            None => Ok(w.at(c + 2.0, sigma) / (c + 2.0 + sigma).sqrt() * SQRT_2 * FRAC_PI_2),
        };
    }
    let k = cl.ksq.sqrt();
    let kp = (0.5 * cl.gap).sqrt();
    let phi_end = match chi {
        None => FRAC_PI_2,
        Some(x) => ((0.5 * x).sin() / k).clamp(-1.0, 1.0).asin(),
    };
    let plain = |phi: f64| {
        let s2 = phi.sin().powi(2);
        let rho = c + 2.0 - 2.0 * cl.ksq * s2;
        w.at(rho, sigma) / (rho + sigma).sqrt() * SQRT_2 / (1.0 - cl.ksq * s2).sqrt()
    };
    if kp >= 0.5 || phi_end <= FRAC_PI_4 {
        return check(integrate(plain, 0.0, phi_end, tol)?.value);
    }
    let head = integrate(plain, 0.0, FRAC_PI_4, tol)?.value;
    // psi = pi/2 - phi, sin(psi) = (kp/k) sinh(t).
    let stretched = |t: f64| {
        let sp = (kp / k) * t.sinh();
        let s2 = sp * sp;
        let cp = (1.0 - s2).max(0.0).sqrt();
        let rho = c + 2.0 * s2 + cl.gap * (1.0 - s2);
        w.at(rho, sigma) / (rho + sigma).sqrt() * SQRT_2 / (k * cp)
    };
    let t_hi = (k * FRAC_PI_4.sin() / kp).asinh();
    let t_lo = match chi {
        None => 0.0,
        Some(x) => (2.0 * (0.5 * x).cos().powi(2) / cl.gap - 1.0).max(0.0).sqrt().asinh(),
    };
    let tail = integrate(stretched, t_lo, t_hi, tol)?.value;
    check(head + tail)
}

/// `int` over `u in [u1, u2] subset [0, pi]`, `u` the distance from the inner
/// equator, for unbound motion.
fn unbound_u(c: f64, cl: &Clairaut, u1: f64, u2: f64, w: Weight, tol: Tolerance) -> Result<f64> {
    let sigma = cl.sigma;
    let eps = -cl.gap;
    let a = (0.5 * eps).sqrt();
    let mut total = 0.0;
    let split = FRAC_PI_2;
    if u1 < split {
        let hi = u2.min(split);
        let stretched = |t: f64| {
            let sh = a * t.sinh();
            let s2 = sh * sh;
            let rho = c + 2.0 * s2;
            w.at(rho, sigma) / (rho + sigma).sqrt() * SQRT_2 / (1.0 - s2).max(0.0).sqrt()
        };
        let t = |u: f64| ((0.5 * u).sin() / a).asinh();
        total += integrate(stretched, t(u1), t(hi), tol)?.value;
    }
    if u2 > split {
        let lo = u1.max(split);
        let plain = |u: f64| {
            let s2 = (0.5 * u).sin().powi(2);
            let rho = c + 2.0 * s2;
            w.at(rho, sigma) / (rho + sigma).sqrt() / (eps + 2.0 * s2).sqrt()
        };
        total += integrate(plain, lo, u2, tol)?.value;
    }
    check(total)
}

/// `int_0^chi` for unbound motion, `chi >= 0`.
fn unbound_from_zero(c: f64, cl: &Clairaut, chi: f64, w: Weight, tol: Tolerance) -> Result<f64> {
    let halves = (chi / PI).floor();
    let rem = chi - halves * PI;
    let mut total = 0.0;
    if halves > 0.0 {
        total += halves * unbound_u(c, cl, 0.0, PI, w, tol)?;
    }
    if rem > 0.0 {
        total += if (halves as i64) % 2 == 0 {
            unbound_u(c, cl, PI - rem, PI, w, tol)?
        } else {
            unbound_u(c, cl, 0.0, rem, w, tol)?
        };
    }
    Ok(total)
}

/// Tolerance for treating an endpoint as the turning point itself.
const TURN_EPS: f64 = 1e-12;

/// `int_{chi1}^{chi2} w(rho) dchi / sqrt(rho^2 - sigma^2)`.
pub(crate) fn chi_integral(spec: &SurfaceSpec, cl: &Clairaut, chi1: f64, chi2: f64, w: Weight, tol: Tolerance) -> Result<f64> {
    let c = spec.c;
    if chi1 == chi2 {
        return Ok(0.0);
    }
    if cl.ksq < 0.0 {
        return Err(Error::ForbiddenRegion { r: spec.b * chi1 });
    }
    if cl.gap > 0.0 {
        let chi_m = cl.chi_max().unwrap_or(0.0);
        let j = (chi1 / TAU).round();
        let prim = |x: f64| -> Result<f64> {
            let x = x - j * TAU;
            if x.abs() > chi_m + TURN_EPS * (1.0 + chi_m) {
                return Err(Error::ForbiddenRegion { r: spec.b * (x + j * TAU) });
            }
            let arg = if x.abs() >= chi_m - TURN_EPS * (1.0 + chi_m) { None } else { Some(x.abs()) };
            Ok(x.signum() * bound_from_zero(c, cl, arg, w, tol)?)
        };
        Ok(prim(chi2)? - prim(chi1)?)
    } else if cl.gap < 0.0 {
        let prim = |x: f64| -> Result<f64> { Ok(x.signum() * unbound_from_zero(c, cl, x.abs(), w, tol)?) };
        Ok(prim(chi2)? - prim(chi1)?)
    } else {
        let (lo, hi) = (chi1.min(chi2), chi1.max(chi2));
        if PI + TAU * ((lo - PI) / TAU).ceil() <= hi {
            return Err(Error::Domain("critical momentum: the integral diverges at the inner equator".into()));
        }
        // Away from the inner equator the integrand is continuous in the gap.
        let nudged = Clairaut { gap: -1e-300, ..*cl };
        chi_integral(spec, &nudged, chi1, chi2, w, tol)
    }
}

/// Quarter radial period of bound motion, from the outer equator to the
/// turning point.
pub(crate) fn quarter(spec: &SurfaceSpec, cl: &Clairaut, w: Weight, tol: Tolerance) -> Result<f64> {
    if !(cl.gap > 0.0) {
        return Err(Error::Domain("motion is not bound".into()));
    }
    bound_from_zero(spec.c, cl, None, w, tol)
}

/// One full unbound loop, `chi` from 0 to `2 pi`.
pub(crate) fn loop_integral(spec: &SurfaceSpec, cl: &Clairaut, w: Weight, tol: Tolerance) -> Result<f64> {
    if !(cl.gap < 0.0) {
        return Err(Error::Domain("motion is not unbound".into()));
    }
    Ok(2.0 * unbound_u(spec.c, cl, 0.0, PI, w, tol)?)
}

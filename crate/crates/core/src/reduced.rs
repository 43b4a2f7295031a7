//! The one-dimensional radial problem at fixed angular momentum.

use std::f64::consts::PI;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::quadrature::Clairaut;
use crate::surface::{Family, SurfaceSpec, AXIS_EPS};

/// `U = l^2 / (2 R^2)`; `+inf` on the symmetry axis.
pub fn effective_potential(spec: &SurfaceSpec, ell: f64, r: f64) -> f64 {
    let rr = spec.profile(r).r;
    if rr.abs() < AXIS_EPS * spec.b {
        return f64::INFINITY;
    }
    ell * ell / (2.0 * rr * rr)
}

/// `dU/dr = -l^2 R' / R^3`.
pub fn effective_potential_derivative(spec: &SurfaceSpec, ell: f64, r: f64) -> f64 {
    let p = spec.profile(r);
    if p.r.abs() < AXIS_EPS * spec.b {
        return f64::NAN;
    }
    -ell * ell * p.r_prime / p.r.powi(3)
}

/// `d2U/dr2 = l^2 (3 R'^2 - R R'') / R^4`.
pub fn effective_potential_second_derivative(spec: &SurfaceSpec, ell: f64, r: f64) -> f64 {
    let p = spec.profile(r);
    if p.r.abs() < AXIS_EPS * spec.b {
        return f64::NAN;
    }
    let rpp = -(r / spec.b).cos() / spec.b;
    ell * ell * (3.0 * p.r_prime * p.r_prime - p.r * rpp) / p.r.powi(4)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PotentialProfile {
    pub ell: f64,
    pub u0: f64,
    /// Level at the inner equator; infinite on horn and spindle tori.
    pub u_inner: f64,
    pub chi_inf: Option<f64>,
}

pub fn potential_profile(spec: &SurfaceSpec, ell: f64) -> PotentialProfile {
    let u_inner = match spec.family {
        Family::Ring => effective_potential(spec, ell, PI * spec.b),
        _ => f64::INFINITY,
    };
    PotentialProfile { ell, u0: effective_potential(spec, ell, 0.0), u_inner, chi_inf: critical_angles(spec).chi_inf }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum GeodesicClass {
    Meridian,
    OuterEquator,
    InnerEquator,
    Bound,
    CriticalAsymptotic,
    Unbound,
    LemonBound,
    AppleBound,
}

const LEVEL_EPS: f64 = 1e-12;

/// Classifies motion through the outer equator at energy `energy` and
/// angular momentum `ell`. The critical level yields both geodesics sharing it.
pub fn classify(spec: &SurfaceSpec, energy: f64, ell: f64) -> Result<Vec<GeodesicClass>> {
    if !(energy > 0.0) {
        return Err(Error::Domain(format!("energy must be positive, got {energy}")));
    }
    if ell == 0.0 {
        return Ok(vec![GeodesicClass::Meridian]);
    }
    let u0 = effective_potential(spec, ell, 0.0);
    if energy < u0 * (1.0 - LEVEL_EPS) {
        return Err(Error::NoMotion { energy, minimum: u0 });
    }
    if (energy - u0).abs() <= LEVEL_EPS * u0 {
        return Ok(vec![GeodesicClass::OuterEquator]);
    }
    let class = match spec.family {
        Family::Ring => {
            let ui = effective_potential(spec, ell, PI * spec.b);
            if (energy - ui).abs() <= LEVEL_EPS * ui {
                return Ok(vec![GeodesicClass::InnerEquator, GeodesicClass::CriticalAsymptotic]);
            }
            if energy < ui {
                GeodesicClass::Bound
            } else {
                GeodesicClass::Unbound
            }
        }
        Family::Horn | Family::Sphere => GeodesicClass::Bound,
        Family::Spindle if spec.c > -1.0 => GeodesicClass::AppleBound,
        Family::Spindle => GeodesicClass::LemonBound,
    };
    Ok(vec![class])
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TurningPoints {
    pub chi_max: Option<f64>,
    pub r_max: Option<f64>,
}

/// Poloidal turning angle of a launch from the outer equator; absent for
/// unbound motion.
pub fn turning_point(spec: &SurfaceSpec, beta0: f64) -> TurningPoints {
    let chi_max = Clairaut::from_launch(spec, beta0).chi_max();
    TurningPoints { chi_max, r_max: chi_max.map(|x| spec.b * x) }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CriticalAngles {
    pub beta_crit: Option<f64>,
    pub beta_polar: Option<f64>,
    pub chi_inf: Option<f64>,
}

pub fn critical_angles(spec: &SurfaceSpec) -> CriticalAngles {
    let c = spec.c;
    let beta_crit = (spec.family == Family::Ring).then(|| (c / (2.0 + c)).asin());
    let polar = (1.0 + c) / (2.0 + c);
    let beta_polar = (0.0..=1.0).contains(&polar).then(|| polar.asin());
    let chi_inf = (spec.family == Family::Spindle).then(|| (-(c + 1.0)).acos());
    CriticalAngles { beta_crit, beta_polar, chi_inf }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OscillationData {
    /// Radial angular frequency in affine time.
    pub omega: f64,
    /// Radial angular frequency per unit arc length.
    pub omega_s: f64,
    pub freq_per_rev: f64,
    pub half_period_theta: f64,
    pub convergence_length: f64,
}

/// Harmonic approximation of motion close to the equator at `r = 0`.
pub fn small_oscillation(spec: &SurfaceSpec, ell: f64) -> OscillationData {
    let (a, b, c) = (spec.a, spec.b, spec.c);
    let root = (c + 2.0).sqrt();
    OscillationData {
        omega: ell.abs() / (b * (a + b).powi(3)).sqrt(),
        omega_s: 1.0 / (b * root),
        freq_per_rev: root,
        half_period_theta: PI / root,
        convergence_length: b * root * PI,
    }
}

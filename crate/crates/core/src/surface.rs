//! Torus geometry in arc-length radial coordinates.
//!
//! The profile is `R(r) = a + b cos(r/b)`, `Z(r) = b sin(r/b)`, so `r` is arc
//! length along a meridian and `chi = r/b` is the poloidal angle measured from
//! the outer equator.

use serde::Serialize;

use crate::error::{Error, Result};

/// Relative threshold (in units of `b`) below which `R` counts as zero.
pub const AXIS_EPS: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Family {
    Ring,
    Horn,
    Spindle,
    Sphere,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SurfaceSpec {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub family: Family,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProfileEval {
    pub r: f64,
    pub r_prime: f64,
    pub z_prime: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MetricAt {
    pub g_rr: f64,
    pub g_thth: f64,
    pub inv_g_rr: f64,
    pub inv_g_thth: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChristoffelAt {
    pub gamma_r_thth: f64,
    pub gamma_th_rth: f64,
}

/// Radii of the periodic parallels where `R' = 0`, used for event detection.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EquatorLevels {
    pub period: f64,
    pub outer: f64,
    pub inner: f64,
}

/// A surface of revolution parametrized by meridian arc length, so `g_rr = 1`
/// and `R'^2 + Z'^2 = 1`.
pub trait Profile: Sync {
    fn eval(&self, r: f64) -> ProfileEval;

    fn radius_second(&self, r: f64) -> f64;

    /// Length scale for the axis threshold.
    fn length_scale(&self) -> f64;

    fn equators(&self) -> Option<EquatorLevels> {
        None
    }

    fn radius(&self, r: f64) -> f64 {
        self.eval(r).r
    }

    fn on_axis(&self, r: f64) -> bool {
        self.radius(r).abs() < AXIS_EPS * self.length_scale()
    }
}

/// Builds a torus with tube radius `b` whose tube center sits at distance `a`
/// from the axis.
///
/// Negative `a` down to `-b` is accepted: the lemon equator of the spindle
/// with center offset `|a|` then sits at `r = 0`.
pub fn make_torus(a: f64, b: f64) -> Result<SurfaceSpec> {
    if !(b > 0.0) || !b.is_finite() {
        return Err(Error::InvalidParameter(format!("b must be positive, got {b}")));
    }
    if !a.is_finite() || a < -b {
        return Err(Error::InvalidParameter(format!("a must be at least -b = {}, got {a}", -b)));
    }
    let c = (a - b) / b;
    let family = if a > b {
        Family::Ring
    } else if a == b {
        Family::Horn
    } else if a == 0.0 || a == -b {
        Family::Sphere
    } else {
        Family::Spindle
    };
    Ok(SurfaceSpec { a, b, c, family })
}

impl SurfaceSpec {
    pub fn chi(&self, r: f64) -> f64 {
        r / self.b
    }

    pub fn profile(&self, r: f64) -> ProfileEval {
        let (s, c) = (r / self.b).sin_cos();
        ProfileEval { r: self.a + self.b * c, r_prime: -s, z_prime: c }
    }

    pub fn height(&self, r: f64) -> f64 {
        self.b * (r / self.b).sin()
    }

    pub fn metric(&self, r: f64) -> MetricAt {
        let rr = self.profile(r).r;
        let g = rr * rr;
        MetricAt { g_rr: 1.0, g_thth: g, inv_g_rr: 1.0, inv_g_thth: 1.0 / g }
    }

    pub fn christoffel(&self, r: f64) -> Result<ChristoffelAt> {
        let p = self.profile(r);
        if p.r.abs() < AXIS_EPS * self.b {
            return Err(Error::SingularAxis { r });
        }
        Ok(ChristoffelAt { gamma_r_thth: -p.r * p.r_prime, gamma_th_rth: p.r_prime / p.r })
    }

    pub fn embed(&self, r: f64, theta: f64) -> [f64; 3] {
        let rr = self.profile(r).r;
        let (s, c) = theta.sin_cos();
        [rr * c, rr * s, self.height(r)]
    }

    pub fn normal(&self, r: f64, theta: f64) -> [f64; 3] {
        let p = self.profile(r);
        let (s, c) = theta.sin_cos();
        [p.z_prime * c, p.z_prime * s, -p.r_prime]
    }

    pub fn gaussian_curvature(&self, r: f64) -> Result<f64> {
        let p = self.profile(r);
        if p.r.abs() < AXIS_EPS * self.b {
            return Err(Error::SingularAxis { r });
        }
        Ok((r / self.b).cos() / (self.b * p.r))
    }

    /// Outer, inner and polar circumferences `2 pi (a+b)`, `2 pi |a-b|`, `2 pi a`.
    pub fn circumferences(&self) -> (f64, f64, f64) {
        let tau = std::f64::consts::TAU;
        (tau * (self.a + self.b), tau * (self.a - self.b).abs(), tau * self.a.abs())
    }

    /// Meridian circumference.
    pub fn meridian_length(&self) -> f64 {
        std::f64::consts::TAU * self.b
    }
}

impl Profile for SurfaceSpec {
    fn eval(&self, r: f64) -> ProfileEval {
        self.profile(r)
    }

    fn radius_second(&self, r: f64) -> f64 {
        -(r / self.b).cos() / self.b
    }

    fn length_scale(&self) -> f64 {
        self.b
    }

    fn equators(&self) -> Option<EquatorLevels> {
        let period = std::f64::consts::TAU * self.b;
        Some(EquatorLevels { period, outer: 0.0, inner: std::f64::consts::PI * self.b })
    }
}

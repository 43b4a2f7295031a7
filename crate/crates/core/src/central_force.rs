//! Planar motion in the central potential `U(r) = -k1/r - k2/r^3`, treated as
//! the flat plane `R(r) = r` with an added physical potential.

use std::f64::consts::PI;

use serde::Serialize;

use crate::dynamics::{EventKind, GeodesicState, IntegratorConfig, OrbitTrace, TraceStatus};
use crate::error::{Error, Result};
use crate::ode::{self, Detector, StopRule, System, Vec4};
use crate::quadrature::{integrate, Tolerance};
use crate::roots::brent;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ForceParams {
    pub k1: f64,
    pub k2: f64,
}

impl ForceParams {
    pub fn new(k1: f64, k2: f64) -> Result<Self> {
        if !(k1 >= 0.0 && k2 >= 0.0) || !k1.is_finite() || !k2.is_finite() {
            return Err(Error::InvalidParameter(format!("force constants must be finite and nonnegative, got k1 = {k1}, k2 = {k2}")));
        }
        Ok(ForceParams { k1, k2 })
    }

    /// Physical potential `U_r`.
    pub fn potential(&self, r: f64) -> f64 {
        -self.k1 / r - self.k2 / r.powi(3)
    }

    /// `dU_r/dr`.
    pub fn potential_slope(&self, r: f64) -> f64 {
        self.k1 / (r * r) + 3.0 * self.k2 / r.powi(4)
    }
}

/// `V = l^2/(2 r^2) + U_r(r)`.
pub fn total_potential(params: &ForceParams, ell: f64, r: f64) -> Result<f64> {
    if !(r > 0.0) {
        return Err(Error::Domain(format!("radius must be positive, got {r}")));
    }
    Ok(ell * ell / (2.0 * r * r) + params.potential(r))
}

fn v(params: &ForceParams, ell: f64, r: f64) -> f64 {
    ell * ell / (2.0 * r * r) + params.potential(r)
}

fn v_second(params: &ForceParams, ell: f64, r: f64) -> f64 {
    3.0 * ell * ell / r.powi(4) - 2.0 * params.k1 / r.powi(3) - 12.0 * params.k2 / r.powi(5)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Stability {
    Stable,
    Unstable,
    /// Merged stable and unstable pair, where `V''` vanishes.
    Marginal,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CircularOrbit {
    pub r: f64,
    pub stability: Stability,
    pub energy: f64,
}

/// Positive roots of `k1 r^2 - l^2 r + 3 k2 = 0`, in increasing order.
pub fn circular_radii(params: &ForceParams, ell: f64) -> Result<Vec<CircularOrbit>> {
    if ell == 0.0 {
        return Err(Error::Domain("circular orbits need nonzero angular momentum".into()));
    }
    let (k1, k2) = (params.k1, params.k2);
    let l2 = ell * ell;
    let roots: Vec<f64> = if k1 == 0.0 {
        if k2 > 0.0 {
            vec![3.0 * k2 / l2]
        } else {
            Vec::new()
        }
    } else {
        let disc = l2 * l2 - 12.0 * k1 * k2;
        if disc < 0.0 {
            Vec::new()
        } else if disc == 0.0 {
            vec![l2 / (2.0 * k1)]
        } else {
            let big = 0.5 * (l2 + disc.sqrt()) / k1;
            let small = 3.0 * k2 / (k1 * big);
            if small > 0.0 {
                vec![small, big]
            } else {
                vec![big]
            }
        }
    };
    let marginal = roots.len() == 1 && k1 > 0.0 && k2 > 0.0;
    Ok(roots
        .into_iter()
        .map(|r| {
            let stability = if marginal {
                Stability::Marginal
            } else if v_second(params, ell, r) > 0.0 {
                Stability::Stable
            } else {
                Stability::Unstable
            };
            CircularOrbit { r, stability, energy: v(params, ell, r) }
        })
        .collect())
}

/// `kappa = sqrt(V''(r_c))`.
pub fn epicyclic_frequency(params: &ForceParams, ell: f64, r_c: f64) -> Result<f64> {
    let vpp = v_second(params, ell, r_c);
    if !(vpp > 0.0) {
        return Err(Error::UnstableOrbit(r_c));
    }
    Ok(vpp.sqrt())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum OrbitClass {
    CircularStable,
    CircularUnstable,
    Bound,
    Scatter,
    Capture,
    Trapped,
}

const LEVEL_EPS: f64 = 1e-12;

fn near(e: f64, level: f64) -> bool {
    (e - level).abs() <= LEVEL_EPS * level.abs().max(1e-300)
}

/// Motion classes available at energy `energy`: the outer region first, then
/// the region inside the centrifugal barrier when one exists.
pub fn classify_orbit(params: &ForceParams, ell: f64, energy: f64) -> Result<Vec<OrbitClass>> {
    let circ = circular_radii(params, ell)?;
    let well = circ.iter().find(|c| c.stability == Stability::Stable);
    let barrier = circ.iter().find(|c| c.stability == Stability::Unstable);
    if let Some(w) = well {
        if near(energy, w.energy) {
            return Ok(vec![OrbitClass::CircularStable]);
        }
    }
    if let Some(b) = barrier {
        if near(energy, b.energy) {
            return Ok(vec![OrbitClass::CircularUnstable]);
        }
    }
    if params.k2 == 0.0 {
        let minimum = well.map_or(0.0, |w| w.energy);
        if energy < minimum || (well.is_none() && energy <= 0.0) {
            return Err(Error::NoMotion { energy, minimum });
        }
        return Ok(vec![if energy < 0.0 { OrbitClass::Bound } else { OrbitClass::Scatter }]);
    }
    let Some(b) = barrier else {
        // No barrier: every orbit reaches the source.
        return Ok(vec![if energy >= 0.0 { OrbitClass::Capture } else { OrbitClass::Trapped }]);
    };
    if energy > b.energy {
        return Ok(vec![OrbitClass::Capture]);
    }
    let mut out = Vec::new();
    if energy >= 0.0 {
        out.push(OrbitClass::Scatter);
    } else if well.is_some_and(|w| energy > w.energy) {
        out.push(OrbitClass::Bound);
    }
    out.push(OrbitClass::Trapped);
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Apsides {
    pub pericenter: f64,
    pub apocenter: f64,
    /// Azimuth swept from pericenter to apocenter.
    pub apsidal_angle: f64,
    /// Advance of the pericenter per radial period; positive is prograde.
    pub precession: f64,
}

/// Apsidal angle of the bound orbit outside the barrier, from the
/// substitution `r = mid - half cos(phi)` that removes both turning points.
pub fn apsidal_angle(params: &ForceParams, ell: f64, energy: f64) -> Result<Apsides> {
    let circ = circular_radii(params, ell)?;
    let well = circ
        .iter()
        .find(|c| c.stability == Stability::Stable)
        .ok_or_else(|| Error::Domain("no stable circular orbit, so no bound orbit".into()))?;
    let inner = circ.iter().find(|c| c.stability == Stability::Unstable).map_or(0.0, |c| c.r);
    let ceiling = circ.iter().find(|c| c.stability == Stability::Unstable).map_or(0.0, |c| c.energy.min(0.0));
    if !(energy > well.energy && energy < ceiling) {
        return Err(Error::Domain(format!(
            "energy {energy} admits no bound orbit with two turning points (range ({}, {ceiling}))",
            well.energy
        )));
    }
    let g = |r: f64| Ok(energy - v(params, ell, r));
    let lo = if inner > 0.0 { inner } else { well.r * 1e-12 };
    let r_p = brent(g, lo, well.r, 1e-15 * well.r)?;
    let mut hi = 2.0 * well.r;
    while energy - v(params, ell, hi) > 0.0 {
        hi *= 2.0;
        if !hi.is_finite() {
            return Err(Error::Domain("apocenter not found".into()));
        }
    }
    let r_a = brent(g, well.r, hi, 1e-15 * hi)?;
    let r3 = -params.k2 / (energy * r_p * r_a);
    let (mid, half) = (0.5 * (r_a + r_p), 0.5 * (r_a - r_p));
    let f = |phi: f64| {
        let r = mid - half * phi.cos();
        ell / (-2.0 * energy * r * (r - r3)).sqrt()
    };
    let angle = integrate(f, 0.0, PI, Tolerance { abs: 1e-14, rel: 1e-13 })?.value;
    Ok(Apsides { pericenter: r_p, apocenter: r_a, apsidal_angle: angle, precession: 2.0 * (angle - PI) })
}

struct Central(ForceParams);

impl System for Central {
    fn derivative(&self, y: &Vec4) -> Result<Vec4> {
        let r = y[0];
        if !(r > 0.0) {
            return Err(Error::Domain(format!("orbit reached r = {r}")));
        }
        Ok([y[2], y[3], r * y[3] * y[3] - self.0.potential_slope(r), -2.0 * y[2] * y[3] / r])
    }

    fn energy(&self, y: &Vec4) -> f64 {
        0.5 * (y[2] * y[2] + y[0] * y[0] * y[3] * y[3]) + self.0.potential(y[0])
    }

    fn angular_momentum(&self, y: &Vec4) -> f64 {
        y[0] * y[0] * y[3]
    }
}

/// Capture is declared when `r` falls below this fraction of its initial value.
pub const CAPTURE_FLOOR: f64 = 1e-9;

/// Integrates planar motion, recording radial turning points; a plunge
/// towards the source ends the trace with status `Captured`.
pub fn integrate_orbit(params: &ForceParams, state0: &GeodesicState, config: &IntegratorConfig) -> Result<OrbitTrace> {
    if !(state0.r > 0.0) {
        return Err(Error::Domain(format!("initial radius must be positive, got {}", state0.r)));
    }
    let detectors = [Detector { kind: EventKind::TurningPoint, component: 2, offset: 0.0, period: None }];
    let stop = StopRule { after: None, floor: Some(CAPTURE_FLOOR * state0.r) };
    match ode::run(&Central(*params), state0.vec(), state0.lambda, config, &detectors, stop) {
        // Affine time runs out of resolution long before the floor on a plunge.
        Err(Error::Integration { partial, .. })
            if partial.end().vr < 0.0 && partial.end().r < PLUNGE_FRACTION * state0.r =>
        {
            let mut trace = *partial;
            trace.status = TraceStatus::Captured;
            Ok(trace)
        }
        other => other,
    }
}

/// A step-size failure below this fraction of the initial radius while
/// falling inwards also counts as capture.
pub const PLUNGE_FRACTION: f64 = 1e-3;

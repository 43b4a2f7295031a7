//! Orbit-angle, affine-time and arc-length integrals of the reduced radial
//! motion, evaluated with singularity-removing substitutions.

mod kronrod;
pub(crate) mod radial;

use std::f64::consts::{PI, TAU};

pub use kronrod::{integrate, Estimate, Tolerance};
pub(crate) use radial::{Clairaut, Weight};

use crate::error::{Error, Result};
use crate::surface::{Family, SurfaceSpec};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureConfig {
    pub abs_tol: f64,
    pub rel_tol: f64,
    /// Map turning points away before integrating. Disabling it integrates
    /// the raw inverse-square-root endpoint singularity.
    pub turning_point_substitution: bool,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        QuadratureConfig { abs_tol: 1e-13, rel_tol: 1e-12, turning_point_substitution: true }
    }
}

impl QuadratureConfig {
    pub(crate) fn tolerance(&self) -> Result<Tolerance> {
        let ok = |t: f64| t > 0.0 && t <= 1e-3;
        if !ok(self.abs_tol) || !ok(self.rel_tol) {
            return Err(Error::InvalidParameter(format!(
                "quadrature tolerances must lie in (0, 1e-3], got abs {} rel {}",
                self.abs_tol, self.rel_tol
            )));
        }
        Ok(Tolerance { abs: self.abs_tol, rel: self.rel_tol })
    }
}

fn default_tol() -> Tolerance {
    Tolerance::default()
}

/// Azimuth swept while the poloidal angle runs from 0 to `chi`, for a launch
/// from the outer equator at angle `beta0`.
pub fn orbit_angle(spec: &SurfaceSpec, beta0: f64, chi: f64) -> Result<f64> {
    orbit_angle_with(spec, beta0, chi, &QuadratureConfig::default())
}

pub fn orbit_angle_with(spec: &SurfaceSpec, beta0: f64, chi: f64, cfg: &QuadratureConfig) -> Result<f64> {
    let tol = cfg.tolerance()?;
    let sign = beta0.sin().signum();
    if chi == 0.0 || beta0.sin() == 0.0 {
        return Ok(0.0);
    }
    let cl = Clairaut::from_launch(spec, beta0);
    if let Some(chi_m) = cl.chi_max() {
        if chi.abs() > chi_m * (1.0 + 1e-12) + 1e-12 {
            return Err(Error::Domain(format!("chi = {chi} lies beyond the turning point {chi_m}")));
        }
        if !cfg.turning_point_substitution {
            let c = spec.c;
            let raw = |x: f64| {
                let rho = c + 1.0 + x.cos();
                let rad = rho * rho - cl.sigma * cl.sigma;
                cl.sigma / (rho * rad.max(0.0).sqrt())
            };
            let x = chi.abs().min(chi_m);
            return Ok(sign * chi.signum() * integrate(raw, 0.0, x, tol)?.value);
        }
    }
    Ok(sign * radial::chi_integral(spec, &cl, 0.0, chi, Weight::Angle, tol)?)
}

/// Critical launch angle `arcsin(c / (c + 2))` of a ring torus.
pub fn critical_angle(spec: &SurfaceSpec) -> Option<f64> {
    (spec.family == Family::Ring).then(|| (spec.c / (spec.c + 2.0)).asin())
}

/// Lower end of the bound launch range: the critical angle on ring and horn
/// tori, zero otherwise.
pub(crate) fn bound_floor(spec: &SurfaceSpec) -> f64 {
    if spec.c >= 0.0 {
        (spec.c / (spec.c + 2.0)).asin()
    } else {
        0.0
    }
}

fn unbound_launch(spec: &SurfaceSpec, beta0: f64) -> Result<Clairaut> {
    let crit = critical_angle(spec).ok_or_else(|| Error::UnsupportedFamily("unbound nonradial geodesics exist only on ring tori".into()))?;
    let beta = radial::fold_angle(beta0);
    if !(beta > 0.0 && beta < crit) {
        return Err(Error::Domain(format!("beta0 = {beta0} is outside the unbound range (0, {crit})")));
    }
    Ok(Clairaut::from_launch(spec, beta0))
}

fn bound_launch(spec: &SurfaceSpec, beta0: f64) -> Result<Clairaut> {
    let floor = bound_floor(spec);
    let beta = radial::fold_angle(beta0);
    if !(beta > floor) {
        return Err(Error::Domain(format!("beta0 = {beta0} is outside the bound range ({floor}, pi/2]")));
    }
    Ok(Clairaut::from_launch(spec, beta0))
}

/// Azimuth of one unbound loop, given the Clairaut data.
pub(crate) fn loop_angle(spec: &SurfaceSpec, cl: &Clairaut) -> Result<f64> {
    radial::loop_integral(spec, cl, Weight::Angle, default_tol())
}

/// Azimuth of a quarter bound period, given the Clairaut data.
pub(crate) fn quarter_angle(spec: &SurfaceSpec, cl: &Clairaut) -> Result<f64> {
    radial::quarter(spec, cl, Weight::Angle, default_tol())
}

/// Radial oscillations per azimuthal revolution of an unbound geodesic.
pub fn theta_frequency_unbound(spec: &SurfaceSpec, beta0: f64) -> Result<f64> {
    let cl = unbound_launch(spec, beta0)?;
    Ok(TAU / loop_angle(spec, &cl)?)
}

/// Radial oscillations per azimuthal revolution of a bound geodesic.
pub fn theta_frequency_bound(spec: &SurfaceSpec, beta0: f64) -> Result<f64> {
    let cl = bound_launch(spec, beta0)?;
    Ok(TAU / (4.0 * quarter_angle(spec, &cl)?))
}

/// Affine time to move from `r0` to `r` at energy `energy` and angular
/// momentum `ell`, without passing a turning point in between.
pub fn affine_time(spec: &SurfaceSpec, energy: f64, ell: f64, r0: f64, r: f64) -> Result<f64> {
    if !(energy > 0.0) {
        return Err(Error::Domain(format!("energy must be positive, got {energy}")));
    }
    let v = (2.0 * energy).sqrt();
    if ell == 0.0 {
        return Ok((r - r0) / v);
    }
    let cl = Clairaut::from_momentum(spec, ell / v);
    let s = radial::chi_integral(spec, &cl, r0 / spec.b, r / spec.b, Weight::Length, default_tol())?;
    Ok(spec.b * s / v)
}

pub fn arc_length_unbound_loop(spec: &SurfaceSpec, beta0: f64) -> Result<f64> {
    let cl = unbound_launch(spec, beta0)?;
    Ok(spec.b * radial::loop_integral(spec, &cl, Weight::Length, default_tol())?)
}

pub fn arc_length_unbound_loops(spec: &SurfaceSpec, beta0: f64, loops: u32) -> Result<f64> {
    Ok(loops as f64 * arc_length_unbound_loop(spec, beta0)?)
}

pub fn arc_length_bound_period(spec: &SurfaceSpec, beta0: f64) -> Result<f64> {
    let cl = bound_launch(spec, beta0)?;
    Ok(4.0 * spec.b * radial::quarter(spec, &cl, Weight::Length, default_tol())?)
}

/// Leading logarithmic growth, in revolutions, of the orbit angle of the
/// critical geodesic as it approaches the inner equator.
pub fn critical_divergence_estimate(spec: &SurfaceSpec, chi: f64) -> Result<f64> {
    if spec.family != Family::Ring {
        return Err(Error::UnsupportedFamily("the critical geodesic exists only on ring tori".into()));
    }
    Ok((1.0 / (PI - chi)).ln() / (TAU * spec.c.sqrt()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::surface::make_torus;
    use std::f64::consts::FRAC_PI_2;

    fn ring() -> SurfaceSpec {
        make_torus(2.0, 1.0).unwrap()
    }

    fn simpson<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, n: usize) -> f64 {
        let h = (b - a) / n as f64;
        let mut s = f(a) + f(b);
        for i in 1..n {
            s += f(a + i as f64 * h) * if i % 2 == 1 { 4.0 } else { 2.0 };
        }
        s * h / 3.0
    }

    #[test]
    fn unbound_angle_matches_simpson() {
        let s = ring();
        for beta in [0.05, 0.2, 0.3] {
            let sigma = 3.0 * f64::sin(beta);
            let f = |x: f64| {
                let rho = 2.0 + x.cos();
                sigma / (rho * (rho * rho - sigma * sigma).sqrt())
            };
            let reference = simpson(f, 0.0, 5.0, 20000);
            let g = orbit_angle(&s, beta, 5.0).unwrap();
            assert!((g - reference).abs() < 1e-10, "{beta}: {g} vs {reference}");
        }
    }

    #[test]
    fn bound_angle_matches_raw_integral() {
        let s = ring();
        let beta = 0.9;
        let chi_m = Clairaut::from_launch(&s, beta).chi_max().unwrap();
        let sigma = 3.0 * f64::sin(beta);
        // Substitute x = chi_m - u^2 so the reference has no singularity.
        let f = |u: f64| {
            let x = chi_m - u * u;
            let rho = 2.0 + x.cos();
            2.0 * u * sigma / (rho * (rho * rho - sigma * sigma).max(0.0).sqrt())
        };
        let at_turn = 2.0 * sigma / (sigma * (2.0 * sigma * chi_m.sin()).sqrt());
        let reference = simpson(|u| if u == 0.0 { at_turn } else { f(u) }, 0.0, chi_m.sqrt(), 20000);
        let g = orbit_angle(&s, beta, chi_m).unwrap();
        assert!((g - reference).abs() < 1e-8, "{g} vs {reference}");
    }

    #[test]
    fn frequencies_at_known_angles() {
        let s = ring();
        assert!((theta_frequency_unbound(&s, 0.2382795502).unwrap() - 3.0).abs() < 1e-6);
        // Independent high-precision evaluation puts this angle on the 3/4 branch.
        assert!((theta_frequency_unbound(&s, 0.3395532232).unwrap() - 0.75).abs() < 1e-6);
        assert!((theta_frequency_bound(&s, 0.7167).unwrap() - 1.5).abs() < 1e-3);
        assert!((theta_frequency_bound(&s, 0.4097).unwrap() - 1.0).abs() < 1e-3);
        assert!((theta_frequency_bound(&s, FRAC_PI_2).unwrap() - 3f64.sqrt()).abs() < 1e-12);
        assert!((theta_frequency_bound(&s, FRAC_PI_2 - 1e-6).unwrap() - 3f64.sqrt()).abs() < 1e-4);
    }

    #[test]
    fn domain_errors() {
        let s = ring();
        assert!(matches!(theta_frequency_unbound(&s, 0.4), Err(Error::Domain(_))));
        assert!(matches!(theta_frequency_bound(&s, 0.3), Err(Error::Domain(_))));
        assert!(matches!(orbit_angle(&s, 0.9, 3.0), Err(Error::Domain(_))));
        let horn = make_torus(1.0, 1.0).unwrap();
        assert!(matches!(theta_frequency_unbound(&horn, 0.1), Err(Error::UnsupportedFamily(_))));
    }

    #[test]
    fn small_angle_asymptote() {
        let s = ring();
        let n = theta_frequency_unbound(&s, 1e-3).unwrap();
        assert!((n / (3f64.sqrt() / 2.0 / 1e-3) - 1.0).abs() < 5e-3);
        let g = orbit_angle(&s, 1e-4, TAU).unwrap();
        let slope = TAU * 2.0 * 1.0 * 3.0 / 3f64.powf(1.5);
        assert!((g / (slope * 1e-4) - 1.0).abs() < 1e-3);
    }

    #[test]
    fn lengths() {
        let s = ring();
        assert!((arc_length_bound_period(&s, 0.4097).unwrap() - 15.26).abs() < 0.02);
        assert!((arc_length_bound_period(&s, 0.3422).unwrap() - 21.9).abs() < 0.05);
        let near_eq = arc_length_bound_period(&s, FRAC_PI_2 - 1e-4).unwrap();
        assert!((near_eq - TAU * 3.0 / 3f64.sqrt()).abs() < 1e-6);
        assert!((arc_length_unbound_loop(&s, 1e-9).unwrap() - TAU).abs() < 1e-9);
    }

    #[test]
    fn affine_time_cases() {
        let s = ring();
        assert!((affine_time(&s, 2.0, 0.0, 0.5, 2.5).unwrap() - 1.0).abs() < 1e-15);
        let beta: f64 = 0.2;
        let (e, ell) = (0.5, 3.0 * beta.sin());
        let t = affine_time(&s, e, ell, 0.0, TAU).unwrap();
        assert!((t - arc_length_unbound_loop(&s, beta).unwrap()).abs() < 1e-10);
        assert!(matches!(affine_time(&s, 0.5, 2.5, 0.0, 2.0), Err(Error::ForbiddenRegion { .. })));
    }

    #[test]
    fn divergence_estimate() {
        let s = ring();
        assert!((critical_divergence_estimate(&s, PI - 1e-10).unwrap() - 3.6647).abs() < 1e-4);
        assert!((critical_divergence_estimate(&s, PI - 1e-2).unwrap() - 0.7329).abs() < 1e-4);
    }
}

//! Closed geodesics `[m,n;p]`: `m` radial oscillations during `n` azimuthal
//! revolutions, with `p = 1` when the orbit passes the inner equator.

pub mod crossings;

use std::f64::consts::{FRAC_PI_2, PI, TAU};
use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::Serialize;

pub use crossings::{self_intersections, CrossingSeries};

use crate::dynamics::{initial_state_at, integrate, integrate_until, velocity_angle, EventKind, IntegratorConfig};
use crate::error::{Error, Result};
use crate::quadrature::{self, radial, Clairaut, Tolerance, Weight};
use crate::roots::brent;
use crate::surface::{Family, SurfaceSpec};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct ClosedLabel {
    pub m: u32,
    pub n: u32,
    pub p: u8,
}

fn gcd(a: u32, b: u32) -> u32 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

impl ClosedLabel {
    pub fn new(m: u32, n: u32, p: u8) -> Self {
        ClosedLabel { m, n, p }
    }

    pub fn bound(&self) -> bool {
        self.p == 0
    }

    /// Rejects malformed and non-primitive labels and the nonexistent `[1,0;0]`.
    pub fn validate(&self) -> Result<()> {
        if self.p > 1 {
            return Err(Error::InvalidParameter(format!("{self}: p must be 0 or 1")));
        }
        if self.m == 0 && self.n == 0 {
            return Err(Error::InvalidParameter("[0,0;p] is not a geodesic label".into()));
        }
        let g = gcd(self.m, self.n);
        if g != 1 {
            let primitive = ClosedLabel::new(self.m / g, self.n / g, self.p);
            return Err(Error::NonPrimitive { label: self.to_string(), primitive: primitive.to_string() });
        }
        if (self.m, self.n, self.p) == (1, 0, 0) {
            return Err(self.nonexistent("a meridian cannot stay on the outer half of the torus"));
        }
        Ok(())
    }

    fn nonexistent(&self, reason: &str) -> Error {
        Error::Nonexistent { label: self.to_string(), reason: reason.into() }
    }
}

impl fmt::Display for ClosedLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{},{};{}]", self.m, self.n, self.p)
    }
}

impl FromStr for ClosedLabel {
    type Err = Error;

    /// Accepts `[m,n;p]`, with or without brackets.
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::InvalidParameter(format!("cannot parse label {s:?}; expected [m,n;p]"));
        let t = s.trim().trim_start_matches('[').trim_end_matches(']');
        let (mn, p) = t.split_once(';').ok_or_else(bad)?;
        let (m, n) = mn.split_once(',').ok_or_else(bad)?;
        let m = m.trim().parse().map_err(|_| bad())?;
        let n = n.trim().parse().map_err(|_| bad())?;
        let p = p.trim().parse().map_err(|_| bad())?;
        Ok(ClosedLabel { m, n, p })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ClosedGeodesic {
    pub label: ClosedLabel,
    pub beta0: f64,
    /// Launch radius: `0` on the outer equator, `pi b` for the inner equator itself.
    pub start_r: f64,
    pub energy_at_unit_ell: f64,
    pub chi_max: Option<f64>,
    pub period_length: f64,
    /// Mismatch of the frequency condition at the root, in revolutions.
    pub closure_residual: f64,
}

/// Upper end of the root-finding variable `t`; `e^-t` underflows just past it.
const T_MAX: f64 = 700.0;
const ROOT_XTOL: f64 = 1e-13;

fn tol() -> Tolerance {
    Tolerance::default()
}

fn unbound_clairaut(spec: &SurfaceSpec, crit: f64, t: f64) -> Clairaut {
    let delta = (-t).exp();
    if delta < 0.5 * crit {
        Clairaut::below_critical(spec, delta)
    } else {
        Clairaut::from_launch(spec, crit - delta)
    }
}

fn special(spec: &SurfaceSpec, label: ClosedLabel) -> Option<Result<ClosedGeodesic>> {
    let (a, b) = (spec.a, spec.b);
    let ring = spec.family == Family::Ring;
    let cg = |beta0, start_r, energy_at_unit_ell, chi_max, period_length| ClosedGeodesic {
        label,
        beta0,
        start_r,
        energy_at_unit_ell,
        chi_max,
        period_length,
        closure_residual: 0.0,
    };
    match (label.m, label.n, label.p) {
        (0, 1, 0) => Some(Ok(cg(FRAC_PI_2, 0.0, 0.5 / (a + b).powi(2), Some(0.0), TAU * (a + b)))),
        (0, 1, 1) if ring => Some(Ok(cg(FRAC_PI_2, PI * b, 0.5 / (a - b).powi(2), None, TAU * (a - b)))),
        (0, 1, 1) => Some(Err(label.nonexistent("the surface has no inner equator"))),
        (1, 0, 1) if ring => Some(Ok(cg(0.0, 0.0, f64::INFINITY, None, TAU * b))),
        (1, 0, 1) => Some(Err(label.nonexistent("meridians meet the symmetry axis"))),
        _ => None,
    }
}

/// Solves the frequency condition for `label` by bracketed root finding in
/// `t = -ln|beta0 - beta_edge|`, where the frequency has a vertical tangent.
pub fn find_closed(spec: &SurfaceSpec, label: ClosedLabel) -> Result<ClosedGeodesic> {
    if spec.family == Family::Sphere {
        return Err(Error::UnsupportedFamily("every geodesic on a sphere is closed".into()));
    }
    label.validate()?;
    if let Some(r) = special(spec, label) {
        return r;
    }
    let (m, n) = (label.m as f64, label.n as f64);
    let target = n / m;
    let b = spec.b;
    if label.p == 1 {
        let crit = quadrature::critical_angle(spec)
            .ok_or_else(|| label.nonexistent("only ring tori carry nonradial geodesics through the inner equator"))?;
        let f = |t: f64| Ok(quadrature::loop_angle(spec, &unbound_clairaut(spec, crit, t))? / TAU - target);
        let t_lo = -(crit * (1.0 - 1e-9)).ln();
        let t = brent(f, t_lo, T_MAX, ROOT_XTOL)?;
        let cl = unbound_clairaut(spec, crit, t);
        let beta0 = crit - (-t).exp();
        let g = quadrature::loop_angle(spec, &cl)?;
        let single = b * radial::loop_integral(spec, &cl, Weight::Length, tol())?;
        Ok(ClosedGeodesic {
            label,
            beta0,
            start_r: 0.0,
            energy_at_unit_ell: 0.5 / (cl.sigma * b).powi(2),
            chi_max: None,
            period_length: m * single,
            closure_residual: (TAU / g - m / n).abs(),
        })
    } else {
        if m * m >= (spec.c + 2.0) * n * n {
            return Err(label.nonexistent(&format!("bound ratios satisfy m/n < sqrt(c+2) = {}", (spec.c + 2.0).sqrt())));
        }
        let floor = quadrature::bound_floor(spec);
        let cl_at = |t: f64| Clairaut::above(spec, floor, (-t).exp());
        let f = |t: f64| Ok(4.0 * quadrature::quarter_angle(spec, &cl_at(t))? / TAU - target);
        let t_lo = -(FRAC_PI_2 - floor).ln();
        let t = match brent(f, t_lo, T_MAX, ROOT_XTOL) {
            Err(Error::Root(_)) => return Err(label.nonexistent("the ratio lies outside the range of the bound frequency")),
            r => r?,
        };
        let cl = cl_at(t);
        let beta0 = floor + (-t).exp();
        let q = quadrature::quarter_angle(spec, &cl)?;
        let quarter_len = b * radial::quarter(spec, &cl, Weight::Length, tol())?;
        Ok(ClosedGeodesic {
            label,
            beta0,
            start_r: 0.0,
            energy_at_unit_ell: 0.5 / (cl.sigma * b).powi(2),
            chi_max: cl.chi_max(),
            period_length: m * 4.0 * quarter_len,
            closure_residual: (TAU / (4.0 * q) - m / n).abs(),
        })
    }
}

fn wrap(x: f64, period: f64) -> f64 {
    x - period * (x / period).round()
}

/// Integrator settings used for closure checks by the CLI and tests.
pub fn verification_config() -> IntegratorConfig {
    IntegratorConfig::default().with_tolerances(1e-13, 1e-16)
}

/// Integrates one nominal period and returns the distance between start and
/// end in `(r/b mod 2 pi, theta mod 2 pi, velocity angle)`.
pub fn verify_closure(spec: &SurfaceSpec, cg: &ClosedGeodesic, config: &IntegratorConfig) -> Result<f64> {
    let s0 = initial_state_at(spec, cg.start_r, 0.0, cg.beta0, 1.0)?;
    let cfg = config.with_max_lambda(cg.period_length);
    let trace = integrate(spec, &s0, &cfg)?;
    let end = trace.end();
    let dchi = wrap((end.r - s0.r) / spec.b, TAU);
    let dtheta = wrap(end.theta - s0.theta, TAU);
    let dbeta = wrap(velocity_angle(spec, end) - velocity_angle(spec, &s0), TAU);
    Ok((dchi * dchi + dtheta * dtheta + dbeta * dbeta).sqrt())
}

fn launch_range(spec: &SurfaceSpec, label: ClosedLabel) -> Result<(f64, f64)> {
    if label.bound() {
        Ok((quadrature::bound_floor(spec), FRAC_PI_2))
    } else {
        let crit = quadrature::critical_angle(spec)
            .ok_or_else(|| label.nonexistent("only ring tori carry nonradial geodesics through the inner equator"))?;
        Ok((0.0, crit))
    }
}

/// Azimuth mismatch at the return to the outer equator after `m` radial periods.
fn return_mismatch(spec: &SurfaceSpec, label: ClosedLabel, beta0: f64, cfg: &IntegratorConfig) -> Result<f64> {
    let k = if label.bound() { 2 * label.m } else { label.m } as usize;
    let s0 = initial_state_at(spec, 0.0, 0.0, beta0, 1.0)?;
    let trace = integrate_until(spec, &s0, cfg, EventKind::OuterEquator, k)?;
    let ev = trace
        .events_of(EventKind::OuterEquator)
        .nth(k - 1)
        .ok_or_else(|| Error::Root(format!("orbit at beta0 = {beta0} did not return to the outer equator {k} times")))?;
    Ok(ev.state.theta - TAU * label.n as f64)
}

const REFINE_MAX_ITER: usize = 40;
const REFINE_FTOL: f64 = 1e-11;

/// Secant iteration on the return azimuth, started from `beta0_guess`.
pub fn refine_via_ode(spec: &SurfaceSpec, beta0_guess: f64, label: ClosedLabel) -> Result<f64> {
    label.validate()?;
    if label.m == 0 || label.n == 0 {
        return Err(Error::Domain(format!("{label} has no launch angle to refine")));
    }
    let (lo, hi) = launch_range(spec, label)?;
    if !(beta0_guess > lo && beta0_guess <= hi) {
        return Err(Error::Domain(format!("guess {beta0_guess} lies outside ({lo}, {hi}]")));
    }
    let cfg = IntegratorConfig::default().with_tolerances(1e-12, 1e-14).with_max_lambda(1e6);
    let g = |x: f64| return_mismatch(spec, label, x, &cfg);
    let span = hi - lo;
    let clamp = |x: f64| x.clamp(lo + 1e-15 * span, hi);
    let mut x0 = beta0_guess;
    let mut f0 = g(x0)?;
    let mut best = (x0, f0.abs());
    if f0.abs() < REFINE_FTOL {
        return Ok(x0);
    }
    let step = 1e-6 * span;
    let mut x1 = if x0 + step <= hi { x0 + step } else { x0 - step };
    let mut f1 = g(x1)?;
    // Near-critical launches resolve beta0 to the last bit before the
    // mismatch drops below tolerance; the stagnated iterate is the answer.
    let mut stagnated = false;
    for _ in 0..REFINE_MAX_ITER {
        if f1.abs() < best.1 {
            best = (x1, f1.abs());
        }
        if f1.abs() < REFINE_FTOL {
            break;
        }
        if f1 == f0 {
            stagnated = true;
            break;
        }
        let x2 = clamp(x1 - f1 * (x1 - x0) / (f1 - f0));
        if (x2 - x1).abs() <= 4.0 * f64::EPSILON * x1.abs() {
            stagnated = true;
            break;
        }
        (x0, f0) = (x1, f1);
        x1 = x2;
        f1 = g(x1)?;
    }
    if f1.abs() < best.1 {
        best = (x1, f1.abs());
    }
    if best.1 > 1e-7 && !stagnated {
        return Err(Error::Refine { best: best.0 });
    }
    Ok(best.0)
}

const CONVERGENT_CAP: u64 = 50;

/// Last continued-fraction convergent of `x > 0` with denominator at most `cap`.
pub(crate) fn best_convergent(x: f64, cap: u64) -> (u64, u64) {
    let (mut h0, mut h1) = (0u64, 1u64);
    let (mut k0, mut k1) = (1u64, 0u64);
    let mut rem = x;
    let mut best = (x.round() as u64, 1u64);
    for _ in 0..64 {
        let a = rem.floor();
        let ai = a as u64;
        let (h2, k2) = (ai * h1 + h0, ai * k1 + k0);
        if k2 > cap {
            break;
        }
        best = (h2, k2);
        (h0, h1, k0, k1) = (h1, h2, k1, k2);
        let frac = rem - a;
        if frac < 1e-12 {
            break;
        }
        rem = 1.0 / frac;
    }
    best
}

/// Drift of the outer-equator node per radial period, relative to the nearest
/// closed orbit; positive when the node advances with the orbit.
pub fn precession_rate(spec: &SurfaceSpec, beta0: f64) -> Result<f64> {
    let floor = quadrature::bound_floor(spec);
    if !(beta0 > floor && beta0 <= FRAC_PI_2) {
        return Err(Error::Domain(format!("beta0 = {beta0} is outside the bound range ({floor}, pi/2]")));
    }
    let sweep = 4.0 * quadrature::quarter_angle(spec, &Clairaut::from_launch(spec, beta0))?;
    let (n, m) = best_convergent(sweep / TAU, CONVERGENT_CAP);
    Ok(sweep - TAU * n as f64 / m as f64)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum SpectrumOutcome {
    Solved(ClosedGeodesic),
    Nonexistent { reason: String },
    Failed { reason: String },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpectrumEntry {
    pub label: ClosedLabel,
    pub outcome: SpectrumOutcome,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Spectrum {
    pub entries: Vec<SpectrumEntry>,
    /// Set when the surface family admits no meaningful search.
    pub unsupported: Option<String>,
}

impl Spectrum {
    pub fn solved(&self) -> impl Iterator<Item = &ClosedGeodesic> {
        self.entries.iter().filter_map(|e| match &e.outcome {
            SpectrumOutcome::Solved(cg) => Some(cg),
            _ => None,
        })
    }
}

/// Every primitive label with `m <= m_max`, `n <= n_max` and both values of
/// `p`, ordered by `n`, then `m`, then `p`.
pub fn spectrum(spec: &SurfaceSpec, m_max: u32, n_max: u32) -> Spectrum {
    if spec.family == Family::Sphere {
        return Spectrum { entries: Vec::new(), unsupported: Some("every geodesic on a sphere is closed".into()) };
    }
    let mut labels = Vec::new();
    for n in 0..=n_max {
        for m in 0..=m_max {
            for p in 0..=1u8 {
                if (m, n) != (0, 0) && gcd(m, n) == 1 {
                    labels.push(ClosedLabel::new(m, n, p));
                }
            }
        }
    }
    let entries = labels
        .into_par_iter()
        .map(|label| {
            let outcome = match find_closed(spec, label) {
                Ok(cg) => SpectrumOutcome::Solved(cg),
                Err(e @ Error::Nonexistent { .. }) => SpectrumOutcome::Nonexistent { reason: e.to_string() },
                Err(e) => SpectrumOutcome::Failed { reason: e.to_string() },
            };
            SpectrumEntry { label, outcome }
        })
        .collect();
    Spectrum { entries, unsupported: None }
}

//! Two-point boundary value problems on tori, solved through the conserved
//! momentum `p_theta = R sin(beta)` conjugate to the azimuth.
//!
//! A segment between two points either runs monotonically in `r` or turns
//! at one or two radial turning points. Monotone segments are solved for
//! `p_theta` directly; turning segments are parametrized by the turning
//! radius, which keeps the azimuth a single-valued function of the unknown.

use std::f64::consts::{PI, TAU};

use rayon::prelude::*;
use serde::Serialize;

use crate::closed::{find_closed, ClosedLabel};
use crate::dynamics::{initial_state_at, integrate, IntegratorConfig};
use crate::error::{Error, Result};
use crate::quadrature::radial::chi_integral;
use crate::quadrature::{Clairaut, Tolerance, Weight};
use crate::roots::brent;
use crate::surface::{Family, SurfaceSpec};

fn tol() -> Tolerance {
    Tolerance::default()
}

/// Smallest profile radius on the closed segment between `r1` and `r2`.
fn min_radius(spec: &SurfaceSpec, r1: f64, r2: f64) -> f64 {
    let (lo, hi) = (r1.min(r2) / spec.b, r1.max(r2) / spec.b);
    let k = ((lo - PI) / TAU).ceil();
    if PI + k * TAU <= hi {
        return spec.a - spec.b;
    }
    spec.profile(r1).r.min(spec.profile(r2).r)
}

fn checked(spec: &SurfaceSpec, r1: f64, r2: f64, p: f64) -> Result<Clairaut> {
    let r_min = min_radius(spec, r1, r2);
    if p.abs() > r_min * (1.0 + 1e-14) {
        return Err(Error::ForbiddenMomentum { p, r_min });
    }
    Ok(Clairaut::from_momentum(spec, p))
}

/// Azimuth swept from `r1` to `r2` at momentum `p_theta`, without turning.
pub fn theta_of_momentum(spec: &SurfaceSpec, r1: f64, r2: f64, p_theta: f64) -> Result<f64> {
    if p_theta == 0.0 || r1 == r2 {
        return Ok(0.0);
    }
    let cl = checked(spec, r1, r2, p_theta)?;
    let b = spec.b;
    Ok(p_theta.signum() * chi_integral(spec, &cl, r1 / b, r2 / b, Weight::Angle, tol())?)
}

/// Arc length from `r1` to `r2` at momentum `p_theta`, without turning.
pub fn arclength_of_momentum(spec: &SurfaceSpec, r1: f64, r2: f64, p_theta: f64) -> Result<f64> {
    if r1 == r2 {
        return Ok(0.0);
    }
    let cl = checked(spec, r1, r2, p_theta)?;
    let b = spec.b;
    Ok(b * chi_integral(spec, &cl, r1 / b, r2 / b, Weight::Length, tol())?.abs())
}

/// Turning radius reached at momentum `p_theta`.
pub fn rmax_of_momentum(spec: &SurfaceSpec, p_theta: f64) -> Result<f64> {
    let x = (p_theta.abs() - spec.a) / spec.b;
    if !(-1.0..=1.0).contains(&x) {
        return Err(Error::NoTurningPoint(p_theta));
    }
    Ok(spec.b * x.acos())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BvpProblem {
    pub r1: f64,
    pub theta1: f64,
    pub r2: f64,
    pub theta2: f64,
    /// Extra azimuthal windings tried on either side of the principal value.
    pub winding_cap: u32,
}

impl BvpProblem {
    pub fn new(r1: f64, theta1: f64, r2: f64, theta2: f64) -> Self {
        BvpProblem { r1, theta1, r2, theta2, winding_cap: 2 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Turning {
    None,
    /// Signed turning radius: positive on the upper half, negative below.
    One { r_ext: f64 },
    Two { r_first: f64, r_second: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BvpSolution {
    pub p_theta: f64,
    pub turning: Turning,
    /// Azimuth swept, including windings.
    pub delta_theta: f64,
    pub length: f64,
    /// Launch angle at the first endpoint, from the meridian direction.
    pub beta1: f64,
    /// Surface distance between the shot endpoint and the target.
    pub shooting_error: f64,
    pub tie: bool,
    pub polyline: Vec<(f64, f64)>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BvpResult {
    /// Sorted by length.
    pub solutions: Vec<BvpSolution>,
    pub branches: Vec<String>,
}

impl BvpResult {
    pub fn shortest(&self) -> &BvpSolution {
        &self.solutions[0]
    }
}

const SHOOT_TOL: f64 = 1e-6;
const TIE_TOL: f64 = 1e-9;
const POLYLINE_POINTS: usize = 256;

#[derive(Debug, Clone, Copy)]
enum Shape {
    Monotone { chi2: f64 },
    Top,
    Bottom,
    TopBottom,
    BottomTop,
    Equator { chi: f64 },
}

impl Shape {
    fn name(&self) -> String {
        match self {
            Shape::Monotone { chi2 } => format!("monotone to chi={chi2:.6}"),
            Shape::Top => "upper turn".into(),
            Shape::Bottom => "lower turn".into(),
            Shape::TopBottom => "upper then lower turn".into(),
            Shape::BottomTop => "lower then upper turn".into(),
            Shape::Equator { chi } => format!("equator at chi={chi:.6}"),
        }
    }

    fn legs(&self, chi1: f64, chi2: f64, chi_m: f64) -> Vec<(f64, f64)> {
        match *self {
            Shape::Monotone { chi2 } => vec![(chi1, chi2)],
            Shape::Top => vec![(chi1, chi_m), (chi_m, chi2)],
            Shape::Bottom => vec![(chi1, -chi_m), (-chi_m, chi2)],
            Shape::TopBottom => vec![(chi1, chi_m), (chi_m, -chi_m), (-chi_m, chi2)],
            Shape::BottomTop => vec![(chi1, -chi_m), (-chi_m, chi_m), (chi_m, chi2)],
            Shape::Equator { .. } => Vec::new(),
        }
    }

    fn turning(&self, b: f64, chi_m: f64) -> Turning {
        match self {
            Shape::Monotone { .. } | Shape::Equator { .. } => Turning::None,
            Shape::Top => Turning::One { r_ext: b * chi_m },
            Shape::Bottom => Turning::One { r_ext: -b * chi_m },
            Shape::TopBottom => Turning::Two { r_first: b * chi_m, r_second: -b * chi_m },
            Shape::BottomTop => Turning::Two { r_first: -b * chi_m, r_second: b * chi_m },
        }
    }
}

fn path_sum(spec: &SurfaceSpec, cl: &Clairaut, legs: &[(f64, f64)], w: Weight) -> Result<f64> {
    let mut s = 0.0;
    for &(x0, x1) in legs {
        if x0 != x1 {
            s += chi_integral(spec, cl, x0, x1, w, tol())?.abs();
        }
    }
    Ok(s)
}

/// Poloidal angle beyond which a turning point cannot lie: the inner
/// equator, or the axis on spindle tori.
fn chi_top(spec: &SurfaceSpec) -> f64 {
    if spec.c >= 0.0 {
        PI
    } else {
        (-(spec.c + 1.0)).acos()
    }
}

/// Clairaut data for a turning point at `chi_top - u`.
fn at_turn(spec: &SurfaceSpec, top: f64, u: f64) -> (Clairaut, f64) {
    let chi_m = top - u;
    let (gap, ksq) = if top == PI {
        (2.0 * (0.5 * u).sin().powi(2), (0.5 * u).cos().powi(2))
    } else {
        (1.0 + chi_m.cos(), (0.5 * chi_m).sin().powi(2))
    };
    (Clairaut { sigma: spec.c + gap, gap, ksq }, chi_m)
}

/// Unbound Clairaut data at `gap = -c e^-t`.
fn unbound_at(spec: &SurfaceSpec, t: f64) -> Clairaut {
    let gap = -spec.c * (-t).exp();
    Clairaut { sigma: spec.c + gap, gap, ksq: 1.0 - 0.5 * gap }
}

#[derive(Debug, Clone, Copy)]
struct Candidate {
    cl: Clairaut,
    sign: f64,
    shape: Shape,
    chi_m: f64,
    target: f64,
}

fn wrap_pi(x: f64) -> f64 {
    x - TAU * (x / TAU).round()
}

/// All candidate segments realizing the azimuth `target` along `shape`.
fn solve_shape(spec: &SurfaceSpec, chi1: f64, chi2: f64, target: f64, shape: Shape) -> Result<Vec<Candidate>> {
    let sign = if target < 0.0 { -1.0 } else { 1.0 };
    let want = target.abs();
    let c = spec.c;
    let mk = |cl: Clairaut, chi_m: f64| Candidate { cl, sign, shape, chi_m, target };
    match shape {
        Shape::Equator { chi } => {
            let rho = c + 1.0 + chi.cos();
            if want == 0.0 {
                return Ok(Vec::new());
            }
            Ok(vec![mk(Clairaut { sigma: rho, gap: rho - c, ksq: 0.5 * (c + 2.0 - rho) }, chi.abs())])
        }
        Shape::Monotone { chi2: end } => {
            let legs = shape.legs(chi1, end, 0.0);
            let (lo, hi) = (chi1.min(end), chi1.max(end));
            let crosses_inner = PI + TAU * ((lo - PI) / TAU).ceil() <= hi;
            if crosses_inner {
                if spec.family != Family::Ring {
                    return Ok(Vec::new());
                }
                let f = |t: f64| Ok(path_sum(spec, &unbound_at(spec, t), &legs, Weight::Angle)? - want);
                return match brent(f, 0.0, 700.0, 1e-12) {
                    Ok(t) => Ok(vec![mk(unbound_at(spec, t), 0.0)]),
                    Err(Error::Root(_)) => Ok(Vec::new()),
                    Err(e) => Err(e),
                };
            }
            if want == 0.0 {
                return Ok(vec![mk(Clairaut::from_momentum(spec, 0.0), 0.0)]);
            }
            let b = spec.b;
            let p_lim = min_radius(spec, b * chi1, b * end);
            let f = |p: f64| Ok(path_sum(spec, &Clairaut::from_momentum(spec, p), &legs, Weight::Angle)? - want);
            match brent(f, 0.0, p_lim, 1e-14 * p_lim) {
                Ok(p) => Ok(vec![mk(Clairaut::from_momentum(spec, p), 0.0)]),
                Err(Error::Root(_)) => Ok(Vec::new()),
                Err(e) => Err(e),
            }
        }
        _ => {
            if want == 0.0 {
                return Ok(Vec::new());
            }
            let top = chi_top(spec);
            let chi_lo = chi1.abs().max(chi2.abs());
            let span = top - chi_lo;
            if !(span > 0.0) {
                return Ok(Vec::new());
            }
            let u_floor = if spec.family == Family::Ring { 1e-13 } else { 1e-9 * span };
            let mut grid: Vec<f64> = (0..=52).map(|k| span * 10f64.powf(-k as f64 / 4.0)).filter(|&u| u >= u_floor).collect();
            grid.extend((1..=36).map(|k| span * (1.0 - 10f64.powf(-k as f64 / 4.0))));
            grid.sort_by(f64::total_cmp);
            grid.dedup();
            let eval = |u: f64| -> Result<f64> {
                let (cl, chi_m) = at_turn(spec, top, u);
                Ok(path_sum(spec, &cl, &shape.legs(chi1, chi2, chi_m), Weight::Angle)? - want)
            };
            let mut values = Vec::with_capacity(grid.len());
            for &u in &grid {
                values.push(eval(u)?);
            }
            let mut out = Vec::new();
            for i in 1..grid.len() {
                let (f0, f1) = (values[i - 1], values[i]);
                if f0 == 0.0 || (f0 > 0.0) != (f1 > 0.0) {
                    let v = brent(|v: f64| eval(v.exp()), grid[i - 1].ln(), grid[i].ln(), 1e-14)?;
                    let (cl, chi_m) = at_turn(spec, top, v.exp());
                    out.push(mk(cl, chi_m));
                }
            }
            Ok(out)
        }
    }
}

fn finish(spec: &SurfaceSpec, problem: &BvpProblem, chi1: f64, chi2: f64, cand: Candidate) -> Result<Option<BvpSolution>> {
    let b = spec.b;
    let p = cand.sign * cand.cl.sigma * b;
    let (length, dir) = match cand.shape {
        Shape::Equator { chi } => ((c_rho(spec, chi)) * b * cand.target.abs(), 0.0),
        shape => {
            let legs = shape.legs(chi1, chi2, cand.chi_m);
            let len = b * path_sum(spec, &cand.cl, &legs, Weight::Length)?;
            let first = legs.iter().find(|l| l.0 != l.1).map(|l| (l.1 - l.0).signum()).unwrap_or(0.0);
            (len, first)
        }
    };
    if !(length > 0.0) {
        return Ok(None);
    }
    let r1 = problem.r1;
    let rr1 = spec.profile(r1).r;
    let s = (p / rr1).clamp(-1.0, 1.0);
    let beta1 = s.asin();
    let beta1 = if dir < 0.0 { PI.copysign(s) - beta1 } else { beta1 };
    let state = initial_state_at(spec, r1, problem.theta1, beta1, 1.0)?;
    let cfg = IntegratorConfig::default().with_tolerances(1e-12, 1e-14).with_max_lambda(length);
    let trace = integrate(spec, &state, &cfg)?;
    let end = trace.end();
    let dr = b * wrap_pi((end.r - problem.r2) / b);
    let dth = wrap_pi(end.theta - problem.theta2);
    let shooting_error = (dr * dr + (spec.profile(problem.r2).r * dth).powi(2)).sqrt();
    if shooting_error > SHOOT_TOL {
        return Ok(None);
    }
    let polyline = (0..=POLYLINE_POINTS)
        .filter_map(|i| trace.state_at(length * i as f64 / POLYLINE_POINTS as f64))
        .map(|s| (s.r, s.theta))
        .collect();
    Ok(Some(BvpSolution {
        p_theta: p,
        turning: cand.shape.turning(b, cand.chi_m),
        delta_theta: cand.target,
        length,
        beta1,
        shooting_error,
        tie: false,
        polyline,
    }))
}

fn c_rho(spec: &SurfaceSpec, chi: f64) -> f64 {
    spec.c + 1.0 + chi.cos()
}

/// Enumerates monotone, turning and equator branches over the allowed
/// windings, verifies each candidate by shooting, and returns all survivors.
pub fn solve_two_point(spec: &SurfaceSpec, problem: &BvpProblem) -> Result<BvpResult> {
    let b = spec.b;
    let chi1 = wrap_pi(problem.r1 / b);
    let chi2 = wrap_pi(problem.r2 / b);
    if spec.c < 0.0 && (chi1.abs() >= chi_top(spec) || chi2.abs() >= chi_top(spec)) {
        return Err(Error::SingularAxis { r: if chi1.abs() >= chi_top(spec) { problem.r1 } else { problem.r2 } });
    }
    let cap = problem.winding_cap as i64;
    let base = wrap_pi(problem.theta2 - problem.theta1);
    let mut jobs: Vec<(f64, Shape)> = Vec::new();
    for w in -cap..=cap {
        let target = base + TAU * w as f64;
        for k in -cap..=cap {
            let end = chi2 + TAU * k as f64;
            if end != chi1 {
                jobs.push((target, Shape::Monotone { chi2: end }));
            }
        }
        for shape in [Shape::Top, Shape::Bottom, Shape::TopBottom, Shape::BottomTop] {
            jobs.push((target, shape));
        }
        let same = (chi1 - chi2).abs() < 1e-12;
        if same && chi1.abs() < 1e-12 {
            jobs.push((target, Shape::Equator { chi: 0.0 }));
        }
        if same && spec.family == Family::Ring && (chi1.abs() - PI).abs() < 1e-12 {
            jobs.push((target, Shape::Equator { chi: PI }));
        }
    }
    let branches: Vec<String> = jobs.iter().map(|(t, s)| format!("{} with delta_theta={t:.6}", s.name())).collect();
    let found: Vec<Result<Vec<BvpSolution>>> = jobs
        .par_iter()
        .map(|&(target, shape)| {
            let mut out = Vec::new();
            for cand in solve_shape(spec, chi1, chi2, target, shape)? {
                if let Some(sol) = finish(spec, problem, chi1, chi2, cand)? {
                    out.push(sol);
                }
            }
            Ok(out)
        })
        .collect();
    let mut all = Vec::new();
    for r in found {
        match r {
            Ok(v) => all.extend(v),
            Err(e) if e.kind() == crate::ErrorKind::Numerical => {}
            Err(e) => return Err(e),
        }
    }
    all.sort_by(|a, b| a.length.total_cmp(&b.length));
    let mut solutions: Vec<BvpSolution> = Vec::new();
    for s in all {
        let dup = solutions.iter().any(|t| {
            (t.length - s.length).abs() < TIE_TOL
                && (t.p_theta - s.p_theta).abs() < 1e-8 * b
                && (t.beta1 - s.beta1).abs() < 1e-7
        });
        if !dup {
            solutions.push(s);
        }
    }
    if solutions.is_empty() {
        return Err(Error::NotFound(branches.join("; ")));
    }
    for i in 0..solutions.len() {
        let near = |j: usize| (solutions[j].length - solutions[i].length).abs() < TIE_TOL;
        let tie = (i > 0 && near(i - 1)) || (i + 1 < solutions.len() && near(i + 1));
        solutions[i].tie = tie;
    }
    Ok(BvpResult { solutions, branches })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Ray {
    pub label: Option<ClosedLabel>,
    pub beta0: f64,
    pub length: f64,
}

/// Closed labels with `m, n <= 6`, both values of `p`.
pub fn default_ray_labels() -> Vec<ClosedLabel> {
    let mut v = Vec::new();
    for n in 1..=6 {
        for m in 1..=6 {
            for p in 0..=1 {
                let l = ClosedLabel::new(m, n, p);
                if l.validate().is_ok() {
                    v.push(l);
                }
            }
        }
    }
    v
}

/// Launch angles and period lengths of closed geodesics through the outer
/// equator, with the meridian and outer-equator baselines. Labels that fail
/// to solve are skipped and reported.
pub fn exp_map_rays(spec: &SurfaceSpec, labels: &[ClosedLabel]) -> (Vec<Ray>, Vec<String>) {
    let mut rays = vec![
        Ray { label: None, beta0: 0.0, length: TAU * spec.b },
        Ray { label: None, beta0: PI / 2.0, length: TAU * (spec.a + spec.b) },
    ];
    let mut warnings = Vec::new();
    for &label in labels {
        match find_closed(spec, label) {
            Ok(cg) if cg.start_r == 0.0 => rays.push(Ray { label: Some(label), beta0: cg.beta0, length: cg.period_length }),
            Ok(_) => warnings.push(format!("{label}: does not pass through the outer equator")),
            Err(e) => warnings.push(format!("{label}: {e}")),
        }
    }
    (rays, warnings)
}

//! Geodesic initial data, equations of motion and traced integration.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::ode::{self, DenseSegment, Detector, StopRule, System, Vec4};
use crate::surface::{Profile, AXIS_EPS};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GeodesicState {
    pub r: f64,
    pub theta: f64,
    pub vr: f64,
    pub vtheta: f64,
    pub lambda: f64,
}

impl GeodesicState {
    pub(crate) fn vec(&self) -> Vec4 {
        [self.r, self.theta, self.vr, self.vtheta]
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StateDerivative {
    pub dr: f64,
    pub dtheta: f64,
    pub dvr: f64,
    pub dvtheta: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ConservedSet {
    pub energy: f64,
    pub ell: f64,
    pub clairaut: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntegratorConfig {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_step: f64,
    pub max_lambda: f64,
}

impl Default for IntegratorConfig {
    fn default() -> Self {
        IntegratorConfig { rel_tol: 1e-10, abs_tol: 1e-12, max_step: f64::INFINITY, max_lambda: 100.0 }
    }
}

impl IntegratorConfig {
    pub fn with_max_lambda(mut self, max_lambda: f64) -> Self {
        self.max_lambda = max_lambda;
        self
    }

    pub fn with_tolerances(mut self, rel_tol: f64, abs_tol: f64) -> Self {
        self.rel_tol = rel_tol;
        self.abs_tol = abs_tol;
        self
    }

    pub(crate) fn validate(&self) -> Result<()> {
        let ok = |t: f64| t > 0.0 && t <= 1e-2;
        if !ok(self.rel_tol) || !ok(self.abs_tol) {
            return Err(Error::InvalidParameter(format!(
                "tolerances must lie in (0, 1e-2], got rel {} abs {}",
                self.rel_tol, self.abs_tol
            )));
        }
        if !(self.max_step > 0.0) || !(self.max_lambda.is_finite()) {
            return Err(Error::InvalidParameter("max_step must be positive and max_lambda finite".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum EventKind {
    OuterEquator = 0,
    InnerEquator = 1,
    TurningPoint = 2,
}

impl EventKind {
    pub fn name(self) -> &'static str {
        match self {
            EventKind::OuterEquator => "outer-equator",
            EventKind::InnerEquator => "inner-equator",
            EventKind::TurningPoint => "turning-point",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TraceEvent {
    pub kind: EventKind,
    pub state: GeodesicState,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum TraceStatus {
    Running,
    Complete,
    EventLimit,
    Captured,
}

/// Adaptive-step states, their continuous extension and located events.
#[derive(Debug, Clone)]
pub struct OrbitTrace {
    pub states: Vec<GeodesicState>,
    pub events: Vec<TraceEvent>,
    pub status: TraceStatus,
    pub energy_drift: f64,
    pub ell_drift: f64,
    pub clairaut_drift: f64,
    pub(crate) segments: Vec<DenseSegment>,
}

impl OrbitTrace {
    pub(crate) fn empty(start: GeodesicState) -> Self {
        OrbitTrace {
            states: vec![start],
            events: Vec::new(),
            status: TraceStatus::Running,
            energy_drift: 0.0,
            ell_drift: 0.0,
            clairaut_drift: 0.0,
            segments: Vec::new(),
        }
    }

    pub(crate) fn finish(&mut self, e: f64, l: f64, k: f64) {
        self.energy_drift = e;
        self.ell_drift = l;
        self.clairaut_drift = k;
    }

    pub fn start(&self) -> &GeodesicState {
        &self.states[0]
    }

    pub fn end(&self) -> &GeodesicState {
        self.states.last().expect("trace holds its start state")
    }

    /// Interpolated state at affine time `lambda`, if it lies on the trace.
    pub fn state_at(&self, lambda: f64) -> Option<GeodesicState> {
        let (lo, hi) = (self.start().lambda, self.end().lambda);
        if lambda < lo || lambda > hi {
            return None;
        }
        if self.segments.is_empty() {
            return Some(*self.start());
        }
        let idx = self.segments.partition_point(|s| s.t1() < lambda).min(self.segments.len() - 1);
        let y = self.segments[idx].eval(lambda);
        Some(GeodesicState { r: y[0], theta: y[1], vr: y[2], vtheta: y[3], lambda })
    }

    pub fn events_of(&self, kind: EventKind) -> impl Iterator<Item = &TraceEvent> {
        self.events.iter().filter(move |e| e.kind == kind)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum LaunchMode {
    UnitSpeed,
    FixedEll(f64),
}

/// Initial data at the outer equator `(r, theta) = (0, 0)` with velocity angle
/// `beta0` measured from the meridian direction.
pub fn initial_state_from_angle<P: Profile>(profile: &P, beta0: f64, mode: LaunchMode) -> Result<GeodesicState> {
    let r0 = profile.radius(0.0);
    let speed = match mode {
        LaunchMode::UnitSpeed => 1.0,
        LaunchMode::FixedEll(ell) => {
            let s = beta0.sin();
            if s.abs() < 1e-15 {
                return Err(Error::Degenerate(format!("fixed angular momentum needs sin(beta0) != 0, got beta0 = {beta0}")));
            }
            ell / (r0 * s)
        }
    };
    initial_state_at(profile, 0.0, 0.0, beta0, speed)
}

/// Initial data at an arbitrary point with velocity angle `beta` and speed `speed`.
pub fn initial_state_at<P: Profile>(profile: &P, r: f64, theta: f64, beta: f64, speed: f64) -> Result<GeodesicState> {
    if profile.on_axis(r) {
        return Err(Error::SingularAxis { r });
    }
    let rr = profile.radius(r);
    let (s, c) = beta.sin_cos();
    Ok(GeodesicState { r, theta, vr: speed * c, vtheta: speed * s / rr, lambda: 0.0 })
}

pub fn geodesic_rhs<P: Profile>(profile: &P, state: &GeodesicState) -> Result<StateDerivative> {
    let p = profile.eval(state.r);
    if p.r.abs() < AXIS_EPS * profile.length_scale() {
        return Err(Error::SingularAxis { r: state.r });
    }
    Ok(StateDerivative {
        dr: state.vr,
        dtheta: state.vtheta,
        dvr: p.r_prime * p.r * state.vtheta * state.vtheta,
        dvtheta: -2.0 * (p.r_prime / p.r) * state.vr * state.vtheta,
    })
}

pub fn conserved<P: Profile>(profile: &P, state: &GeodesicState) -> Result<ConservedSet> {
    let rr = profile.radius(state.r);
    let energy = 0.5 * (state.vr * state.vr + rr * rr * state.vtheta * state.vtheta);
    if !(energy > 0.0) {
        return Err(Error::Degenerate("zero-speed state".into()));
    }
    let ell = rr * rr * state.vtheta;
    Ok(ConservedSet { energy, ell, clairaut: ell / (2.0 * energy).sqrt() })
}

/// Velocity angle from the meridian direction, in `(-pi, pi]`.
pub fn velocity_angle<P: Profile>(profile: &P, state: &GeodesicState) -> f64 {
    (profile.radius(state.r) * state.vtheta).atan2(state.vr)
}

struct Geodesic<'a, P: Profile>(&'a P);

impl<P: Profile> System for Geodesic<'_, P> {
    fn derivative(&self, y: &Vec4) -> Result<Vec4> {
        let s = GeodesicState { r: y[0], theta: y[1], vr: y[2], vtheta: y[3], lambda: 0.0 };
        let d = geodesic_rhs(self.0, &s)?;
        Ok([d.dr, d.dtheta, d.dvr, d.dvtheta])
    }

    fn energy(&self, y: &Vec4) -> f64 {
        let rr = self.0.radius(y[0]);
        0.5 * (y[2] * y[2] + rr * rr * y[3] * y[3])
    }

    fn angular_momentum(&self, y: &Vec4) -> f64 {
        let rr = self.0.radius(y[0]);
        rr * rr * y[3]
    }
}

fn detectors<P: Profile>(profile: &P) -> Vec<Detector> {
    let mut d = vec![Detector { kind: EventKind::TurningPoint, component: 2, offset: 0.0, period: None }];
    if let Some(eq) = profile.equators() {
        d.push(Detector { kind: EventKind::OuterEquator, component: 0, offset: eq.outer, period: Some(eq.period) });
        d.push(Detector { kind: EventKind::InnerEquator, component: 0, offset: eq.inner, period: Some(eq.period) });
    }
    d
}

/// Integrates to `config.max_lambda`, recording equator crossings and turning points.
pub fn integrate<P: Profile>(profile: &P, state0: &GeodesicState, config: &IntegratorConfig) -> Result<OrbitTrace> {
    ode::run(&Geodesic(profile), state0.vec(), state0.lambda, config, &detectors(profile), StopRule::default())
}

/// Like [`integrate`], but stops at the `count`-th event of `kind`.
pub fn integrate_until<P: Profile>(
    profile: &P,
    state0: &GeodesicState,
    config: &IntegratorConfig,
    kind: EventKind,
    count: usize,
) -> Result<OrbitTrace> {
    let stop = StopRule { after: Some((kind, count)), floor: None };
    ode::run(&Geodesic(profile), state0.vec(), state0.lambda, config, &detectors(profile), stop)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::surface::make_torus;
    use std::f64::consts::{FRAC_PI_2, PI, TAU};

    #[test]
    fn launch_data() {
        let s = make_torus(2.0, 1.0).unwrap();
        let st = initial_state_from_angle(&s, FRAC_PI_2, LaunchMode::UnitSpeed).unwrap();
        let k = conserved(&s, &st).unwrap();
        assert!(st.vr.abs() < 1e-16 && (st.vtheta - 1.0 / 3.0).abs() < 1e-16);
        assert!((k.ell - 3.0).abs() < 1e-15 && (k.energy - 0.5).abs() < 1e-15 && (k.clairaut - 3.0).abs() < 1e-15);

        let st = initial_state_from_angle(&s, 0.0, LaunchMode::UnitSpeed).unwrap();
        assert_eq!(conserved(&s, &st).unwrap().ell, 0.0);

        let st = initial_state_from_angle(&s, FRAC_PI_2, LaunchMode::FixedEll(1.0)).unwrap();
        let k = conserved(&s, &st).unwrap();
        assert!((st.vtheta - 1.0 / 9.0).abs() < 1e-16 && (k.energy - 1.0 / 18.0).abs() < 1e-16);

        assert!(matches!(initial_state_from_angle(&s, 0.0, LaunchMode::FixedEll(1.0)), Err(Error::Degenerate(_))));
        assert!(matches!(initial_state_from_angle(&s, PI, LaunchMode::FixedEll(1.0)), Err(Error::Degenerate(_))));
    }

    #[test]
    fn critical_launch_clairaut_is_inner_radius() {
        let s = make_torus(2.0, 1.0).unwrap();
        let st = initial_state_from_angle(&s, (1.0f64 / 3.0).asin(), LaunchMode::UnitSpeed).unwrap();
        assert!((conserved(&s, &st).unwrap().clairaut - 1.0).abs() < 1e-15);
    }

    #[test]
    fn rhs_equilibria() {
        let s = make_torus(2.0, 1.0).unwrap();
        let eq = GeodesicState { r: 0.0, theta: 0.3, vr: 0.0, vtheta: 0.2, lambda: 0.0 };
        assert_eq!(geodesic_rhs(&s, &eq).unwrap().dvr, 0.0);
        let mer = GeodesicState { r: 1.1, theta: 0.0, vr: 1.0, vtheta: 0.0, lambda: 0.0 };
        let d = geodesic_rhs(&s, &mer).unwrap();
        assert_eq!((d.dvr, d.dvtheta), (0.0, 0.0));
    }

    #[test]
    fn meridian_returns_after_one_circumference() {
        let s = make_torus(2.0, 1.0).unwrap();
        let st = initial_state_from_angle(&s, 0.0, LaunchMode::UnitSpeed).unwrap();
        let tr = integrate_until(&s, &st, &IntegratorConfig::default().with_max_lambda(10.0), EventKind::OuterEquator, 1).unwrap();
        let e = tr.events_of(EventKind::OuterEquator).next().unwrap();
        assert!((e.state.lambda - TAU).abs() < 1e-9);
        assert!(tr.end().theta.abs() < 1e-15);
        assert_eq!(tr.events_of(EventKind::InnerEquator).count(), 1);
    }

    #[test]
    fn dense_output_tracks_exact_meridian() {
        let s = make_torus(2.0, 1.0).unwrap();
        let st = initial_state_at(&s, 0.3, 0.0, 0.0, 1.0).unwrap();
        let tr = integrate(&s, &st, &IntegratorConfig::default().with_max_lambda(5.0)).unwrap();
        for i in 0..200 {
            let l = 5.0 * i as f64 / 199.0;
            let x = tr.state_at(l).unwrap();
            assert!((x.r - (0.3 + l)).abs() < 1e-9, "{l}: {}", x.r);
        }
    }

    #[test]
    fn axis_start_is_rejected() {
        let horn = make_torus(1.0, 1.0).unwrap();
        assert!(matches!(initial_state_at(&horn, PI, 0.0, 0.3, 1.0), Err(Error::SingularAxis { .. })));
        let st = GeodesicState { r: PI, theta: 0.0, vr: 0.1, vtheta: 0.2, lambda: 0.0 };
        match integrate(&horn, &st, &IntegratorConfig::default()) {
            Err(Error::Integration { partial, .. }) => assert_eq!(partial.states.len(), 1),
            other => panic!("expected integration failure, got {other:?}"),
        }
    }
}

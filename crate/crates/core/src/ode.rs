//! Dormand–Prince 5(4) integrator with Hairer's continuous extension.
//!
//! State layout is `[r, theta, vr, vtheta]`; the independent variable is the
//! affine parameter. Shared by the geodesic and central-force integrators.

use crate::dynamics::{EventKind, GeodesicState, IntegratorConfig, OrbitTrace, TraceEvent, TraceStatus};
use crate::error::{Error, Result};

pub(crate) type Vec4 = [f64; 4];

pub(crate) trait System {
    fn derivative(&self, y: &Vec4) -> Result<Vec4>;
    fn energy(&self, y: &Vec4) -> f64;
    fn angular_momentum(&self, y: &Vec4) -> f64;
    /// Clairaut-type invariant; defaults to ell / sqrt(2E).
    fn clairaut(&self, y: &Vec4) -> f64 {
        self.angular_momentum(y) / (2.0 * self.energy(y)).sqrt()
    }
}

// Autonomous systems only, so the node abscissae are not needed.
const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const A71: f64 = 35.0 / 384.0;
const A73: f64 = 500.0 / 1113.0;
const A74: f64 = 125.0 / 192.0;
const A75: f64 = -2187.0 / 6784.0;
const A76: f64 = 11.0 / 84.0;
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;
const D1: f64 = -12715105075.0 / 11282082432.0;
const D3: f64 = 87487479700.0 / 32700410799.0;
const D4: f64 = -10690763975.0 / 1880347072.0;
const D5: f64 = 701980252875.0 / 199316789632.0;
const D6: f64 = -1453857185.0 / 822651844.0;
const D7: f64 = 69997945.0 / 29380423.0;

const MAX_STEPS: usize = 50_000_000;
const EVENT_TOL: f64 = 1e-12;

/// One accepted step's continuous extension.
#[derive(Debug, Clone)]
pub struct DenseSegment {
    pub(crate) t0: f64,
    pub(crate) h: f64,
    rcont: [Vec4; 5],
}

impl DenseSegment {
    pub(crate) fn eval(&self, t: f64) -> Vec4 {
        let s = (t - self.t0) / self.h;
        let s1 = 1.0 - s;
        let mut y = [0.0; 4];
        for (i, yi) in y.iter_mut().enumerate() {
            let r = &self.rcont;
            *yi = r[0][i] + s * (r[1][i] + s1 * (r[2][i] + s * (r[3][i] + s1 * r[4][i])));
        }
        y
    }

    pub(crate) fn t1(&self) -> f64 {
        self.t0 + self.h
    }
}

/// Level-crossing detector on one state component.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Detector {
    pub kind: EventKind,
    pub component: usize,
    pub offset: f64,
    pub period: Option<f64>,
}

impl Detector {
    fn levels_crossed(&self, a: f64, b: f64) -> Vec<f64> {
        let (lo, hi) = if a < b { (a, b) } else { (b, a) };
        let candidates: Vec<f64> = match self.period {
            None => vec![self.offset],
            Some(p) => {
                let k0 = ((lo - self.offset) / p).ceil() as i64;
                let k1 = ((hi - self.offset) / p).floor() as i64;
                (k0..=k1).map(|k| self.offset + k as f64 * p).collect()
            }
        };
        let mut out: Vec<f64> = candidates
            .into_iter()
            .filter(|&l| (a - l) * (b - l) < 0.0 || (b == l && a != l))
            .collect();
        if b < a {
            out.reverse();
        }
        out
    }
}

#[derive(Debug, Clone, Copy, Default)]
pub(crate) struct StopRule {
    pub after: Option<(EventKind, usize)>,
    /// Terminate when component 0 falls below this value.
    pub floor: Option<f64>,
}

fn to_state(y: &Vec4, t: f64) -> GeodesicState {
    GeodesicState { r: y[0], theta: y[1], vr: y[2], vtheta: y[3], lambda: t }
}

fn locate(seg: &DenseSegment, component: usize, level: f64, mut lo: f64, mut hi: f64) -> f64 {
    let f = |t: f64| seg.eval(t)[component] - level;
    let mut flo = f(lo);
    if f(hi) == 0.0 {
        return hi;
    }
    for _ in 0..200 {
        if hi - lo <= EVENT_TOL {
            break;
        }
        let mid = 0.5 * (lo + hi);
        let fm = f(mid);
        if fm == 0.0 {
            return mid;
        }
        if (fm < 0.0) == (flo < 0.0) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

struct Drift {
    e0: f64,
    l0: f64,
    k0: f64,
    e: f64,
    l: f64,
    k: f64,
}

impl Drift {
    fn new<S: System>(sys: &S, y: &Vec4) -> Self {
        let e0 = sys.energy(y);
        let l0 = sys.angular_momentum(y);
        let k0 = if e0 > 0.0 { sys.clairaut(y) } else { f64::NAN };
        Drift { e0, l0, k0, e: 0.0, l: 0.0, k: 0.0 }
    }

    fn rel(now: f64, start: f64) -> f64 {
        let d = (now - start).abs();
        if start.abs() > 0.0 {
            d / start.abs()
        } else {
            d
        }
    }

    fn update<S: System>(&mut self, sys: &S, y: &Vec4) {
        self.e = self.e.max(Self::rel(sys.energy(y), self.e0));
        self.l = self.l.max(Self::rel(sys.angular_momentum(y), self.l0));
        if self.k0.is_finite() {
            self.k = self.k.max(Self::rel(sys.clairaut(y), self.k0));
        }
    }
}

fn error_norm(err: &Vec4, y0: &Vec4, y1: &Vec4, cfg: &IntegratorConfig) -> f64 {
    let mut acc = 0.0;
    for i in 0..4 {
        let sc = cfg.abs_tol + cfg.rel_tol * y0[i].abs().max(y1[i].abs());
        acc += (err[i] / sc).powi(2);
    }
    (acc / 4.0).sqrt()
}

fn initial_step(f0: &Vec4, y0: &Vec4, cfg: &IntegratorConfig) -> f64 {
    let mut d0 = 0.0;
    let mut d1 = 0.0;
    for i in 0..4 {
        let sc = cfg.abs_tol + cfg.rel_tol * y0[i].abs();
        d0 += (y0[i] / sc).powi(2);
        d1 += (f0[i] / sc).powi(2);
    }
    let (d0, d1) = ((d0 / 4.0).sqrt(), (d1 / 4.0).sqrt());
    let h = if d0 < 1e-5 || d1 < 1e-5 { 1e-6 } else { 0.01 * d0 / d1 };
    h.min(cfg.max_step).min(0.1)
}

/// Integrates from `y0` at affine time `t_start` up to `cfg.max_lambda`.
pub(crate) fn run<S: System>(
    sys: &S,
    y_start: Vec4,
    t_start: f64,
    cfg: &IntegratorConfig,
    detectors: &[Detector],
    stop: StopRule,
) -> Result<OrbitTrace> {
    cfg.validate()?;
    let t_end = cfg.max_lambda;
    let mut trace = OrbitTrace::empty(to_state(&y_start, t_start));
    let mut drift = Drift::new(sys, &y_start);
    let mut counts = [0usize; 3];

    let mut t = t_start;
    let mut y = y_start;
    let fail = |trace: OrbitTrace, t: f64, reason: String| Error::Integration { lambda: t, reason, partial: Box::new(trace) };
    let mut k1 = match sys.derivative(&y) {
        Ok(v) => v,
        Err(e) => return Err(fail(trace, t, e.to_string())),
    };
    let mut h = initial_step(&k1, &y, cfg);
    let mut steps = 0usize;

    while t < t_end {
        steps += 1;
        if steps > MAX_STEPS {
            return Err(fail(trace, t, "step budget exhausted".into()));
        }
        let rem = t_end - t;
        let scale = t.abs().max(1.0);
        if rem <= 1e-14 * scale {
            break;
        }
        h = h.min(cfg.max_step);
        if h >= rem - 1e-14 * scale {
            h = rem;
        }
        if h <= 1e-15 * scale {
            return Err(fail(trace, t, "step size underflow".into()));
        }

        let mut yt = [0.0; 4];
        macro_rules! stage {
            ($($k:expr, $a:expr);*) => {{
                for i in 0..4 { yt[i] = y[i] + h * (0.0 $( + $a * $k[i])*); }
                match sys.derivative(&yt) { Ok(v) => v, Err(_) => { h *= 0.25; continue; } }
            }};
        }
        let k2 = stage!(k1, A21);
        let k3 = stage!(k1, A31; k2, A32);
        let k4 = stage!(k1, A41; k2, A42; k3, A43);
        let k5 = stage!(k1, A51; k2, A52; k3, A53; k4, A54);
        let k6 = stage!(k1, A61; k2, A62; k3, A63; k4, A64; k5, A65);
        let mut y1 = [0.0; 4];
        for i in 0..4 {
            y1[i] = y[i] + h * (A71 * k1[i] + A73 * k3[i] + A74 * k4[i] + A75 * k5[i] + A76 * k6[i]);
        }
        let k7 = match sys.derivative(&y1) {
            Ok(v) => v,
            Err(_) => {
                h *= 0.25;
                continue;
            }
        };
        let mut err = [0.0; 4];
        for i in 0..4 {
            err[i] = h * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] + E6 * k6[i] + E7 * k7[i]);
        }
        let en = error_norm(&err, &y, &y1, cfg);
        if !en.is_finite() {
            h *= 0.25;
            continue;
        }
        let fac = if en == 0.0 { 5.0 } else { (0.9 * en.powf(-0.2)).clamp(0.2, 5.0) };
        if en > 1.0 {
            h *= fac.min(1.0);
            continue;
        }

        let mut rc = [[0.0; 4]; 5];
        for i in 0..4 {
            let dy = y1[i] - y[i];
            let bspl = h * k1[i] - dy;
            rc[0][i] = y[i];
            rc[1][i] = dy;
            rc[2][i] = bspl;
            rc[3][i] = dy - h * k7[i] - bspl;
            rc[4][i] = h * (D1 * k1[i] + D3 * k3[i] + D4 * k4[i] + D5 * k5[i] + D6 * k6[i] + D7 * k7[i]);
        }
        let seg = DenseSegment { t0: t, h, rcont: rc };
        let t1 = t + h;

        let mut found: Vec<(f64, EventKind, usize, f64)> = Vec::new();
        for d in detectors {
            for level in d.levels_crossed(y[d.component], y1[d.component]) {
                let te = locate(&seg, d.component, level, t, t1);
                found.push((te, d.kind, d.component, level));
            }
        }
        found.sort_by(|p, q| p.0.total_cmp(&q.0));

        let mut end: Option<(f64, TraceStatus)> = None;
        if let Some(floor) = stop.floor {
            if y1[0] < floor {
                let tf = locate(&seg, 0, floor, t, t1);
                end = Some((tf, TraceStatus::Captured));
            }
        }
        for (te, kind, component, level) in found {
            if let Some((tstop, _)) = end {
                if te > tstop {
                    break;
                }
            }
            let mut ye = seg.eval(te);
            ye[component] = level;
            drift.update(sys, &ye);
            trace.events.push(TraceEvent { kind, state: to_state(&ye, te) });
            let slot = kind as usize;
            counts[slot] += 1;
            if let Some((k, n)) = stop.after {
                if k == kind && counts[slot] >= n {
                    end = Some((te, TraceStatus::EventLimit));
                    break;
                }
            }
        }

        if let Some((te, status)) = end {
            let ye = seg.eval(te);
            drift.update(sys, &ye);
            trace.segments.push(seg);
            trace.states.push(to_state(&ye, te));
            trace.status = status;
            trace.finish(drift.e, drift.l, drift.k);
            return Ok(trace);
        }

        drift.update(sys, &y1);
        trace.segments.push(seg);
        trace.states.push(to_state(&y1, t1));
        t = t1;
        y = y1;
        k1 = k7;
        h *= fac;
    }
    trace.status = TraceStatus::Complete;
    trace.finish(drift.e, drift.l, drift.k);
    Ok(trace)
}

//! Self-intersections of a closed geodesic, found on its image in the
//! `(chi mod 2 pi, theta mod 2 pi)` square.
//!
//! Azimuth is monotonic along a nonmeridian geodesic, so the orbit is the
//! graph of `chi(theta)` over `n` revolutions. Two passes over the same
//! meridian meet where `chi(theta) = chi(theta + 2 pi k) (mod 2 pi)`.

use std::f64::consts::TAU;

use serde::Serialize;

use super::ClosedGeodesic;
use crate::dynamics::{initial_state_at, integrate, IntegratorConfig, OrbitTrace};
use crate::error::{Error, Result};
use crate::roots::brent;
use crate::surface::SurfaceSpec;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CrossingSeries {
    /// Poloidal angle `|chi|` shared by the series.
    pub chi: f64,
    pub count: usize,
    /// Azimuths of the crossings, in `[0, 2 pi)`.
    pub theta_offsets: Vec<f64>,
    /// Smallest azimuthal gap between crossings at the same signed `chi`.
    pub spacing: f64,
}

const SAMPLES_PER_PERIOD: usize = 4096;
const MERGE_TOL: f64 = 1e-6;
const CLUSTER_TOL: f64 = 1e-5;

fn wrap_pi(x: f64) -> f64 {
    x - TAU * (x / TAU).round()
}

struct Graph<'a> {
    spec: &'a SurfaceSpec,
    trace: OrbitTrace,
    length: f64,
    /// Azimuth and poloidal advance over one period.
    theta_period: f64,
    chi_period: f64,
    lambdas: Vec<f64>,
    thetas: Vec<f64>,
}

impl Graph<'_> {
    fn reduce(&self, theta: f64) -> (f64, f64) {
        let q = (theta / self.theta_period).floor();
        (theta - q * self.theta_period, q * self.chi_period)
    }

    /// Affine time at which the orbit reaches azimuth `theta` in the first period.
    fn lambda_of(&self, theta: f64) -> f64 {
        let i = self.thetas.partition_point(|&t| t < theta).clamp(1, self.thetas.len() - 1);
        let (t0, t1) = (self.thetas[i - 1], self.thetas[i]);
        let (l0, l1) = (self.lambdas[i - 1], self.lambdas[i]);
        let mut lam = if t1 > t0 { l0 + (theta - t0) / (t1 - t0) * (l1 - l0) } else { l0 };
        for _ in 0..8 {
            let Some(s) = self.trace.state_at(lam.clamp(0.0, self.length)) else { break };
            let step = (s.theta - theta) / s.vtheta;
            lam = (lam - step).clamp(0.0, self.length);
            if step.abs() < 1e-15 * self.length {
                break;
            }
        }
        lam
    }

    fn chi(&self, theta: f64) -> f64 {
        let (t, shift) = self.reduce(theta);
        let s = self.trace.state_at(self.lambda_of(t)).expect("lambda lies on the trace");
        s.r / self.spec.b + shift
    }
}

/// Crossing radii of a closed geodesic, grouped by `|chi|`.
pub fn self_intersections(spec: &SurfaceSpec, cg: &ClosedGeodesic) -> Result<Vec<CrossingSeries>> {
    let (m, n) = (cg.label.m, cg.label.n);
    if n < 2 || m == 0 {
        return Ok(Vec::new());
    }
    let s0 = initial_state_at(spec, cg.start_r, 0.0, cg.beta0, 1.0)?;
    let cfg = IntegratorConfig::default().with_tolerances(1e-12, 1e-14).with_max_lambda(cg.period_length);
    let trace = integrate(spec, &s0, &cfg)?;
    if s0.vtheta <= 0.0 {
        return Err(Error::Degenerate("crossing search needs increasing azimuth".into()));
    }
    let count = SAMPLES_PER_PERIOD * m as usize;
    let dl = cg.period_length / count as f64;
    let mut lambdas = vec![0.0];
    let mut thetas = vec![0.0];
    let mut chis = vec![s0.r / spec.b];
    for k in 0..count {
        let lam = (k as f64 + 0.5) * dl;
        let s = trace.state_at(lam).expect("sample lies on the trace");
        lambdas.push(lam);
        thetas.push(s.theta);
        chis.push(s.r / spec.b);
    }
    let chi_period = if cg.label.p == 1 { TAU * ((trace.end().r - s0.r) / spec.b / TAU).round() } else { 0.0 };
    let g = Graph { spec, trace, length: cg.period_length, theta_period: TAU * n as f64, chi_period, lambdas, thetas };

    let lin_chi = |theta: f64| {
        let (t, shift) = g.reduce(theta);
        let i = g.thetas.partition_point(|&x| x < t).clamp(1, g.thetas.len() - 1);
        let (t0, t1) = (g.thetas[i - 1], g.thetas[i]);
        let w = if t1 > t0 { (t - t0) / (t1 - t0) } else { 0.0 };
        chis[i - 1] + w * (chis[i] - chis[i - 1]) + shift
    };

    let mut points: Vec<(f64, f64)> = Vec::new();
    for k in 1..n {
        let offset = TAU * k as f64;
        let h_lin = |theta: f64, chi: f64| wrap_pi(chi - lin_chi(theta + offset));
        let h = |theta: f64| -> Result<f64> { Ok(wrap_pi(g.chi(theta) - g.chi(theta + offset))) };
        let mut prev = (g.thetas[0], h_lin(g.thetas[0], chis[0]));
        for i in 1..=g.thetas.len() {
            let (t, c) = if i < g.thetas.len() { (g.thetas[i], chis[i]) } else { (g.theta_period, chis[0] + chi_period) };
            let cur = (t, h_lin(t, c));
            let small = prev.1.abs() < 1.0 && cur.1.abs() < 1.0;
            if small && (prev.1 == 0.0 || (prev.1 > 0.0) != (cur.1 > 0.0)) {
                if let Ok(root) = brent(h, prev.0, cur.0, 1e-13) {
                    if h(root)?.abs() < 1e-7 {
                        points.push((wrap_pi(g.chi(root)), root.rem_euclid(TAU)));
                    }
                }
            }
            prev = cur;
        }
    }

    let mut unique: Vec<(f64, f64)> = Vec::new();
    for p in points {
        let dup = unique.iter().any(|q| (q.0 - p.0).abs() < MERGE_TOL && wrap_pi(q.1 - p.1).abs() < MERGE_TOL);
        if !dup {
            unique.push(p);
        }
    }
    unique.sort_by(|a, b| a.0.abs().total_cmp(&b.0.abs()));

    let mut series: Vec<Vec<(f64, f64)>> = Vec::new();
    for p in unique {
        match series.last_mut() {
            Some(s) if (s[0].0.abs() - p.0.abs()).abs() < CLUSTER_TOL => s.push(p),
            _ => series.push(vec![p]),
        }
    }
    Ok(series
        .into_iter()
        .map(|pts| {
            let chi = pts.iter().map(|p| p.0.abs()).sum::<f64>() / pts.len() as f64;
            let mut spacing = TAU;
            for sign in [-1.0, 1.0] {
                let mut th: Vec<f64> = pts
                    .iter()
                    .filter(|p| chi < CLUSTER_TOL || p.0.signum() == sign)
                    .map(|p| p.1)
                    .collect();
                th.sort_by(f64::total_cmp);
                for w in 0..th.len() {
                    let next = if w + 1 < th.len() { th[w + 1] } else { th[0] + TAU };
                    if th.len() > 1 {
                        spacing = spacing.min(next - th[w]);
                    }
                }
            }
            let mut theta_offsets: Vec<f64> = pts.iter().map(|p| p.1).collect();
            theta_offsets.sort_by(f64::total_cmp);
            CrossingSeries { chi, count: pts.len(), theta_offsets, spacing }
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::closed::{find_closed, ClosedLabel};
    use crate::surface::make_torus;
    use std::f64::consts::PI;

    fn crossings(m: u32, n: u32, p: u8) -> Vec<CrossingSeries> {
        let s = make_torus(2.0, 1.0).unwrap();
        let cg = find_closed(&s, ClosedLabel::new(m, n, p)).unwrap();
        self_intersections(&s, &cg).unwrap()
    }

    #[test]
    fn single_revolution_orbits_do_not_cross() {
        assert!(crossings(1, 1, 0).is_empty());
        assert!(crossings(3, 1, 1).is_empty());
    }

    #[test]
    fn three_two_crosses_on_the_outer_equator() {
        let x = crossings(3, 2, 0);
        assert_eq!(x.len(), 1, "{x:?}");
        assert!(x[0].chi < 1e-8);
        assert!((x[0].spacing - TAU / 3.0).abs() < 1e-6);
    }

    #[test]
    fn unbound_orbits_never_cross() {
        assert!(crossings(3, 2, 1).is_empty());
        assert!(crossings(1, 2, 1).is_empty());
    }

    #[test]
    fn wrap_is_centred() {
        assert!((wrap_pi(3.0 * PI / 2.0) + PI / 2.0).abs() < 1e-15);
    }
}

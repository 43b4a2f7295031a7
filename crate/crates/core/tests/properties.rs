use std::f64::consts::{FRAC_PI_2, PI, TAU};

use proptest::prelude::*;
use revgeo::bvp::{solve_two_point, theta_of_momentum, BvpProblem};
use revgeo::central_force::{apsidal_angle, circular_radii, classify_orbit, integrate_orbit, ForceParams, OrbitClass, Stability};
use revgeo::closed::crossings::self_intersections;
use revgeo::closed::{find_closed, refine_via_ode, spectrum, verification_config, verify_closure, ClosedLabel};
use revgeo::dynamics::{
    conserved, initial_state_at, initial_state_from_angle, integrate, velocity_angle, EventKind, GeodesicState,
    IntegratorConfig, LaunchMode,
};
use revgeo::flat_torus::{flat_length, flat_segments, FlatLabel};
use revgeo::quadrature::{
    affine_time, arc_length_bound_period, arc_length_unbound_loop, critical_angle, orbit_angle, orbit_angle_with,
    theta_frequency_bound, theta_frequency_unbound, QuadratureConfig,
};
use revgeo::reduced::{
    classify, effective_potential, effective_potential_derivative, effective_potential_second_derivative, turning_point,
    GeodesicClass,
};
use revgeo::surface::{make_torus, Family, SurfaceSpec};

fn unit() -> SurfaceSpec {
    make_torus(2.0, 1.0).unwrap()
}

fn tight(lambda: f64) -> IntegratorConfig {
    IntegratorConfig::default().with_tolerances(1e-12, 1e-14).with_max_lambda(lambda)
}

/// Ring, horn and spindle tori with `b` in `[0.5, 2]`.
fn any_torus() -> impl Strategy<Value = SurfaceSpec> {
    let c = prop_oneof![0.2..3.0f64, Just(0.0), -0.8..-0.2f64];
    (0.5..2.0f64, c).prop_map(|(b, c)| make_torus(b * (c + 1.0), b).unwrap())
}

fn ring_torus() -> impl Strategy<Value = SurfaceSpec> {
    (0.5..2.0f64, 0.3..3.0f64).prop_map(|(b, c)| make_torus(b * (c + 1.0), b).unwrap())
}

fn wrap(x: f64) -> f64 {
    x - TAU * (x / TAU).round()
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 200, ..ProptestConfig::default() })]

    #[test]
    fn profile_has_unit_speed(spec in any_torus(), r in -50.0..50.0f64) {
        let p = spec.profile(r);
        prop_assert!((p.r_prime * p.r_prime + p.z_prime * p.z_prime - 1.0).abs() <= 1e-14);
    }

    #[test]
    fn profile_is_periodic_and_even(spec in any_torus(), r in -20.0..20.0f64) {
        let (p, q, m) = (spec.profile(r), spec.profile(r + TAU * spec.b), spec.profile(-r));
        prop_assert!((p.r - q.r).abs() < 1e-12 && (p.r_prime - q.r_prime).abs() < 1e-12);
        prop_assert!((p.r - m.r).abs() < 1e-15 && (p.r_prime + m.r_prime).abs() < 1e-15);
    }

    #[test]
    fn christoffel_symbols_match_metric_derivative(spec in any_torus(), r in -10.0..10.0f64) {
        prop_assume!(spec.profile(r).r.abs() > 1e-2);
        let h = 1e-5;
        let dg = (spec.metric(r + h).g_thth - spec.metric(r - h).g_thth) / (2.0 * h);
        let g = spec.christoffel(r).unwrap();
        let m = spec.metric(r);
        prop_assert!((g.gamma_r_thth + 0.5 * dg).abs() < 1e-7 * (1.0 + dg.abs()));
        prop_assert!((g.gamma_th_rth - 0.5 * m.inv_g_thth * dg).abs() < 1e-7 * (1.0 + m.inv_g_thth * dg.abs()));
    }

    #[test]
    fn sphere_has_constant_curvature(b in 0.2..5.0f64, r in -10.0..10.0f64) {
        let s = make_torus(0.0, b).unwrap();
        prop_assume!(s.profile(r).r.abs() > 1e-3 * b);
        prop_assert!((s.gaussian_curvature(r).unwrap() * b * b - 1.0).abs() < 1e-10);
    }

    #[test]
    fn flat_polylines_unwrap_to_the_line(m in 0u32..12, n in 0u32..12) {
        let label = FlatLabel::new(m, n);
        prop_assume!((m, n) != (0, 0) && label.is_primitive());
        let segs = flat_segments(label).unwrap();
        let total: f64 = segs.iter().map(|s| s.length()).sum();
        prop_assert!((total - flat_length(label).unwrap()).abs() < 1e-12);
        let (mut x, mut y) = (0.0f64, 0.0f64);
        for s in &segs {
            // Each piece starts where the unwrapped line left the previous cell.
            prop_assert!((s.start.0 - x.rem_euclid(1.0)).abs() < 1e-12 || (s.start.0 - x.rem_euclid(1.0)).abs() > 1.0 - 1e-12);
            prop_assert!((s.start.1 - y.rem_euclid(1.0)).abs() < 1e-12 || (s.start.1 - y.rem_euclid(1.0)).abs() > 1.0 - 1e-12);
            let (dx, dy) = (s.end.0 - s.start.0, s.end.1 - s.start.1);
            prop_assert!((dx * n as f64 - dy * m as f64).abs() < 1e-12);
            prop_assert!(s.start.0.min(s.end.0) >= -1e-12 && s.start.0.max(s.end.0) <= 1.0 + 1e-12);
            prop_assert!(s.start.1.min(s.end.1) >= -1e-12 && s.start.1.max(s.end.1) <= 1.0 + 1e-12);
            prop_assert!(s.start.0.fract() == 0.0 || s.start.1.fract() == 0.0 || (x, y) == (0.0, 0.0));
            x += dx;
            y += dy;
        }
        prop_assert!((x - m as f64).abs() < 1e-12 && (y - n as f64).abs() < 1e-12);
    }
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 24, ..ProptestConfig::default() })]

    #[test]
    fn conserved_quantities_hold(spec in any_torus(), beta in 0.05..3.09f64, sign in prop::bool::ANY) {
        let beta = if sign { beta } else { -beta };
        let s0 = initial_state_from_angle(&spec, beta, LaunchMode::UnitSpeed).unwrap();
        let t = integrate(&spec, &s0, &tight(500.0)).unwrap();
        prop_assert!(t.energy_drift < 1e-9, "E drift {}", t.energy_drift);
        prop_assert!(t.ell_drift < 1e-9, "ell drift {}", t.ell_drift);
        prop_assert!(t.clairaut_drift < 1e-9, "Clairaut drift {}", t.clairaut_drift);
    }

    #[test]
    fn azimuth_is_monotonic(spec in any_torus(), beta in 0.05..3.09f64) {
        let s0 = initial_state_from_angle(&spec, beta, LaunchMode::UnitSpeed).unwrap();
        let t = integrate(&spec, &s0, &IntegratorConfig::default().with_max_lambda(100.0)).unwrap();
        prop_assert!(t.states.windows(2).all(|w| w[1].theta > w[0].theta));
    }

    #[test]
    fn unbound_radius_is_monotonic(spec in ring_torus(), frac in 0.05..0.95f64) {
        let beta = frac * critical_angle(&spec).unwrap();
        let s0 = initial_state_from_angle(&spec, beta, LaunchMode::UnitSpeed).unwrap();
        let t = integrate(&spec, &s0, &IntegratorConfig::default().with_max_lambda(100.0)).unwrap();
        prop_assert!(t.states.windows(2).all(|w| w[1].r > w[0].r));
    }

    #[test]
    fn equator_angle_laws(spec in ring_torus(), beta in 0.05..1.55f64) {
        let s0 = initial_state_from_angle(&spec, beta, LaunchMode::UnitSpeed).unwrap();
        let t = integrate(&spec, &s0, &tight(200.0)).unwrap();
        let r_out = spec.profile(0.0).r;
        let r_in = spec.profile(PI * spec.b).r;
        for ev in t.events_of(EventKind::InnerEquator) {
            let sb = velocity_angle(&spec, &ev.state).sin();
            prop_assert!((r_out * beta.sin() - r_in * sb).abs() < 1e-8);
        }
        for ev in t.events_of(EventKind::OuterEquator) {
            let sb = velocity_angle(&spec, &ev.state).sin();
            prop_assert!((sb - beta.sin()).abs() < 1e-8);
        }
    }

    #[test]
    fn reflected_launches_mirror(spec in any_torus(), beta in 0.05..1.5f64) {
        let cfg = tight(40.0);
        let run = |b: f64| integrate(&spec, &initial_state_from_angle(&spec, b, LaunchMode::UnitSpeed).unwrap(), &cfg).unwrap();
        let (t, flip, back) = (run(beta), run(-beta), run(PI - beta));
        for k in 0..=40 {
            let lam = k as f64;
            let (p, q, w) = (t.state_at(lam).unwrap(), flip.state_at(lam).unwrap(), back.state_at(lam).unwrap());
            prop_assert!((p.r - q.r).abs() < 1e-8 && (p.theta + q.theta).abs() < 1e-8);
            prop_assert!((p.r + w.r).abs() < 1e-8 && (p.theta - w.theta).abs() < 1e-8);
        }
    }

    #[test]
    fn turning_points_lie_on_the_potential(spec in any_torus(), beta in 0.05..1.5f64) {
        let tp = turning_point(&spec, beta);
        prop_assume!(tp.r_max.is_some());
        let s0 = initial_state_from_angle(&spec, beta, LaunchMode::FixedEll(1.0)).unwrap();
        let e = conserved(&spec, &s0).unwrap().energy;
        let u = effective_potential(&spec, 1.0, tp.r_max.unwrap());
        prop_assert!((u - e).abs() < 1e-10 * e, "U {u} E {e}");
    }

    #[test]
    fn classification_matches_turning_points(spec in ring_torus(), beta in 0.01..1.57f64) {
        prop_assume!((beta - critical_angle(&spec).unwrap()).abs() > 1e-9);
        let s0 = initial_state_from_angle(&spec, beta, LaunchMode::FixedEll(1.0)).unwrap();
        let e = conserved(&spec, &s0).unwrap().energy;
        let bound = classify(&spec, e, 1.0).unwrap().contains(&GeodesicClass::Bound);
        let chi = turning_point(&spec, beta).chi_max;
        prop_assert_eq!(bound, chi.is_some_and(|x| x < PI));
    }

    #[test]
    fn integrated_excursion_matches_turning_point(spec in any_torus(), beta in 0.1..1.5f64) {
        prop_assume!(spec.family != Family::Ring || beta > critical_angle(&spec).unwrap() + 0.01);
        let r_max = turning_point(&spec, beta).r_max.unwrap();
        let s0 = initial_state_from_angle(&spec, beta, LaunchMode::UnitSpeed).unwrap();
        let t = integrate(&spec, &s0, &tight(150.0)).unwrap();
        let peak = t.events_of(EventKind::TurningPoint).map(|e| e.state.r.abs()).fold(0.0, f64::max);
        prop_assert!((peak - r_max).abs() < 1e-6, "peak {peak} r_max {r_max}");
    }

    #[test]
    fn orbit_angle_is_odd(spec in ring_torus(), beta in 0.05..1.5f64, frac in 0.01..0.99f64) {
        let chi = frac * turning_point(&spec, beta).chi_max.unwrap_or(PI);
        let g = orbit_angle(&spec, beta, chi).unwrap();
        prop_assert!((orbit_angle(&spec, beta, -chi).unwrap() + g).abs() <= 1e-12 * (1.0 + g.abs()));
    }

    #[test]
    fn bound_length_is_speed_times_affine_period(spec in any_torus(), beta in 0.1..1.5f64) {
        prop_assume!(spec.family != Family::Ring || beta > critical_angle(&spec).unwrap() + 0.01);
        let len = arc_length_bound_period(&spec, beta).unwrap();
        let s0 = initial_state_from_angle(&spec, beta, LaunchMode::FixedEll(1.3)).unwrap();
        let e = conserved(&spec, &s0).unwrap().energy;
        let r_max = turning_point(&spec, beta).r_max.unwrap();
        let period = 4.0 * affine_time(&spec, e, 1.3, 0.0, r_max).unwrap();
        prop_assert!(((2.0 * e).sqrt() * period - len).abs() < 1e-8 * len);
    }

    #[test]
    fn momentum_map_is_odd_and_monotone(spec in ring_torus(), r1 in -1.0..1.0f64, r2 in -1.0..1.0f64) {
        let (r1, r2) = (r1 * spec.b, r2 * spec.b);
        prop_assume!((r2 - r1).abs() > 1e-3);
        let p_lim = spec.profile(r1).r.min(spec.profile(r2).r);
        let dir = (r2 - r1).signum();
        let mut prev = f64::NEG_INFINITY;
        for k in -20..=20 {
            let p = p_lim * k as f64 / 20.5;
            let f = theta_of_momentum(&spec, r1, r2, p).unwrap();
            prop_assert!((f + theta_of_momentum(&spec, r1, r2, -p).unwrap()).abs() < 1e-12 * (1.0 + f.abs()));
            let f = dir * f;
            prop_assert!(f > prev);
            prev = f;
        }
    }

    #[test]
    fn kepler_energy_is_conserved(k2 in 0.0..0.03f64, ell in 0.7..1.5f64, e_frac in 0.1..0.9f64) {
        let p = ForceParams::new(1.0, k2).unwrap();
        let circ = circular_radii(&p, ell).unwrap();
        let well = circ.iter().find(|c| c.stability == Stability::Stable).unwrap();
        let ceiling = circ.iter().find(|c| c.stability == Stability::Unstable).map_or(0.0, |c| c.energy.min(0.0));
        let e = well.energy + e_frac * (ceiling - well.energy);
        let a = apsidal_angle(&p, ell, e).unwrap();
        let s0 = GeodesicState { r: a.pericenter, theta: 0.0, vr: 0.0, vtheta: ell / a.pericenter.powi(2), lambda: 0.0 };
        let t = integrate_orbit(&p, &s0, &IntegratorConfig::default().with_tolerances(1e-12, 1e-14).with_max_lambda(200.0)).unwrap();
        prop_assert!(t.energy_drift < 1e-9 && t.ell_drift < 1e-9);
        let first = t.events.iter().find(|ev| ev.kind == EventKind::TurningPoint).unwrap();
        prop_assert!((first.state.theta - a.apsidal_angle).abs() < 1e-6);
        prop_assert!((first.state.r - a.apocenter).abs() < 1e-6 * a.apocenter);
    }

    #[test]
    fn kepler_circular_speed(k1 in 0.1..5.0f64, ell in 0.1..5.0f64) {
        let p = ForceParams::new(k1, 0.0).unwrap();
        let c = circular_radii(&p, ell).unwrap();
        let v = ell / c[0].r;
        prop_assert!((v * v - k1 / c[0].r).abs() < 1e-12 * v * v);
    }
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 20, ..ProptestConfig::default() })]

    #[test]
    fn quadrature_matches_integration(spec in ring_torus(), frac in 0.02..0.98f64, bound in prop::bool::ANY) {
        let crit = critical_angle(&spec).unwrap();
        let beta = if bound { crit + frac * (FRAC_PI_2 - crit) } else { frac * crit };
        prop_assume!((beta - crit).abs() > 1e-3);
        let s0 = initial_state_from_angle(&spec, beta, LaunchMode::UnitSpeed).unwrap();
        let (dtheta, len, nth) = if bound {
            (TAU / theta_frequency_bound(&spec, beta).unwrap(), arc_length_bound_period(&spec, beta).unwrap(), 2)
        } else {
            (TAU / theta_frequency_unbound(&spec, beta).unwrap(), arc_length_unbound_loop(&spec, beta).unwrap(), 1)
        };
        let t = integrate(&spec, &s0, &tight(1.1 * len)).unwrap();
        let ev = t.events_of(EventKind::OuterEquator).nth(nth - 1).unwrap();
        prop_assert!((ev.state.theta - dtheta).abs() < 1e-7, "theta {} vs {dtheta}", ev.state.theta);
        prop_assert!((ev.state.lambda - len).abs() < 1e-8 * len.max(1.0), "length {} vs {len}", ev.state.lambda);
    }
}

#[test]
fn radial_potential_equilibria() {
    for spec in [unit(), make_torus(1.0, 1.0).unwrap(), make_torus(5.0, 0.5).unwrap()] {
        let h = 1e-4;
        let u = |r: f64| effective_potential(&spec, 1.0, r);
        let d1 = |r: f64| (u(r + h) - u(r - h)) / (2.0 * h);
        let d2 = |r: f64| (u(r + h) - 2.0 * u(r) + u(r - h)) / (h * h);
        assert!(d1(0.0).abs() < 1e-10 && d2(0.0) > 0.0);
        assert!(effective_potential_derivative(&spec, 1.0, 0.0).abs() < 1e-15);
        assert!((effective_potential_second_derivative(&spec, 1.0, 0.0) - d2(0.0)).abs() < 1e-5);
        if spec.family == Family::Ring {
            let rb = PI * spec.b;
            assert!(d1(rb).abs() < 1e-9 && d2(rb) < 0.0);
        }
    }
}

#[test]
fn small_oscillation_frequency() {
    for spec in [unit(), make_torus(4.0, 1.0).unwrap(), make_torus(1.0, 1.0).unwrap()] {
        let beta = FRAC_PI_2 - 1e-3;
        let s0 = initial_state_from_angle(&spec, beta, LaunchMode::UnitSpeed).unwrap();
        let t = integrate(&spec, &s0, &tight(60.0 * spec.a.max(1.0))).unwrap();
        let crossings: Vec<_> = t.events_of(EventKind::OuterEquator).collect();
        let periods = (crossings.len() / 2) as f64;
        let theta = crossings[2 * periods as usize - 1].state.theta;
        let measured = periods * TAU / theta;
        let expected = (spec.c + 2.0).sqrt();
        assert!((measured / expected - 1.0).abs() < 1e-3, "{measured} vs {expected}");
    }
}

#[test]
fn turning_point_substitution_converges() {
    let spec = unit();
    let (beta, chi) = (0.5, turning_point(&unit(), 0.5).chi_max.unwrap());
    let reference = orbit_angle(&spec, beta, chi).unwrap();
    let err = |tol: f64, sub: bool| {
        let cfg = QuadratureConfig { abs_tol: tol, rel_tol: tol, turning_point_substitution: sub };
        orbit_angle_with(&spec, beta, chi, &cfg).map(|g| (g - reference).abs())
    };
    let mut prev = f64::INFINITY;
    for k in 0..8 {
        let tol = 1e-4 / 2f64.powi(k);
        let e = err(tol, true).unwrap();
        assert!(e <= tol && e <= (prev / 2.0).max(1e-14), "tol {tol}: {e} after {prev}");
        prev = e;
    }
    let raw = err(1e-6, false).map_or(f64::INFINITY, |e| e);
    assert!(raw > err(1e-6, true).unwrap());
}

#[test]
fn frequencies_are_monotonic() {
    let spec = unit();
    let crit = critical_angle(&spec).unwrap();
    let grid = |lo: f64, hi: f64| (1..200).map(move |k| lo + (hi - lo) * k as f64 / 200.0);
    let unb: Vec<f64> = grid(0.0, crit).map(|b| theta_frequency_unbound(&spec, b).unwrap()).collect();
    assert!(unb.windows(2).all(|w| w[1] < w[0]));
    let bnd: Vec<f64> = grid(crit, FRAC_PI_2).map(|b| theta_frequency_bound(&spec, b).unwrap()).collect();
    assert!(bnd.windows(2).all(|w| w[1] > w[0]));
}

fn labels(max: u32) -> Vec<ClosedLabel> {
    spectrum(&unit(), max, max).solved().map(|cg| cg.label).collect()
}

/// Closed orbits launched within this distance of the critical angle are not
/// reproducible by forward integration in double precision.
const CONDITIONING_GAP: f64 = 1e-9;

#[test]
fn solved_orbits_close() {
    let spec = unit();
    let crit = critical_angle(&spec).unwrap();
    let mut excluded = Vec::new();
    for label in labels(5) {
        let cg = find_closed(&spec, label).unwrap();
        let res = verify_closure(&spec, &cg, &verification_config()).unwrap();
        if (cg.beta0 - crit).abs() < CONDITIONING_GAP {
            excluded.push((cg, res));
            continue;
        }
        assert!(res < 1e-5, "{label}: residual {res}");
    }
    assert_eq!(excluded.len(), 2);
    for (cg, res) in excluded {
        let coarse = verify_closure(&spec, &cg, &IntegratorConfig::default()).unwrap();
        assert!(res < coarse, "{}: {res} vs {coarse}", cg.label);
    }
}

#[test]
fn bound_spectrum_respects_frequency_ceiling() {
    for c in [0.2, 1.0, 2.5] {
        let spec = make_torus(c + 1.0, 1.0).unwrap();
        let ceiling = (c + 2.0).sqrt();
        for m in 1..=6u32 {
            for n in 1..=4u32 {
                let label = ClosedLabel::new(m, n, 0);
                if label.validate().is_err() || (m as f64 / n as f64 - ceiling).abs() < 1e-3 {
                    continue;
                }
                let r = find_closed(&spec, label);
                if m as f64 / n as f64 >= ceiling {
                    assert!(matches!(r, Err(revgeo::Error::Nonexistent { .. })), "{label} on c = {c}: {r:?}");
                } else {
                    assert!(r.is_ok(), "{label} on c = {c}: {r:?}");
                }
            }
        }
    }
}

#[test]
fn ode_refinement_agrees_with_quadrature() {
    let spec = unit();
    for label in labels(5) {
        let cg = find_closed(&spec, label).unwrap();
        if cg.start_r != 0.0 || label.m == 0 || label.n == 0 {
            continue;
        }
        let refined = refine_via_ode(&spec, cg.beta0, label).unwrap();
        assert!((refined - cg.beta0).abs() < 1e-5, "{label}: {refined} vs {}", cg.beta0);
    }
}

#[test]
fn crossing_rules() {
    let spec = unit();
    for label in labels(5).into_iter().filter(|l| l.m > 0 && l.n > 0) {
        let cg = find_closed(&spec, label).unwrap();
        let x = self_intersections(&spec, &cg).unwrap();
        if label.p == 1 {
            assert!(x.is_empty(), "{label}: {x:?}");
            continue;
        }
        let n = label.n;
        let at_zero = x.iter().filter(|s| s.chi < 1e-6).count();
        let expected = match n {
            1 => 0,
            2 | 3 => 1,
            _ => 2,
        };
        assert_eq!(x.len(), expected, "{label}: {x:?}");
        if n >= 2 && n % 2 == 0 {
            assert_eq!(at_zero, 1, "{label}: {x:?}");
        }
        let spacing = TAU / label.m as f64;
        assert!(x.iter().all(|s| (s.spacing - spacing).abs() < 1e-6), "{label}: {x:?}");
    }
}

#[test]
fn unbound_period_is_loop_multiple() {
    let spec = unit();
    let crit = critical_angle(&spec).unwrap();
    for label in labels(5).into_iter().filter(|l| l.p == 1 && l.m > 0 && l.n > 0) {
        let cg = find_closed(&spec, label).unwrap();
        // The loop length from a rounded launch angle loses the gap to criticality.
        if (cg.beta0 - crit).abs() < CONDITIONING_GAP {
            continue;
        }
        let single = arc_length_unbound_loop(&spec, cg.beta0).unwrap();
        assert!((cg.period_length - label.m as f64 * single).abs() < 1e-8 * cg.period_length, "{label}");
    }
}

#[test]
fn bvp_solutions_reintegrate_to_target() {
    let spec = unit();
    let problems = [
        BvpProblem::new(0.0, 0.0, 0.0, PI),
        BvpProblem::new(0.3, 0.0, -1.2, 2.0),
        BvpProblem::new(2.5, 0.4, 1.0, -1.0),
        BvpProblem::new(0.0, 0.0, 0.5, 0.5),
    ];
    for pb in problems {
        let res = solve_two_point(&spec, &pb).unwrap();
        for s in &res.solutions {
            let st = initial_state_at(&spec, pb.r1, pb.theta1, s.beta1, 1.0).unwrap();
            let t = integrate(&spec, &st, &tight(s.length)).unwrap();
            let end = t.end();
            let dr = spec.b * wrap((end.r - pb.r2) / spec.b);
            let dth = wrap(end.theta - pb.theta2);
            let err = dr.hypot(spec.profile(pb.r2).r * dth);
            assert!(err < 1e-6, "{pb:?}: {err}");
            let (x, y) = (spec.embed(pb.r1, pb.theta1), spec.embed(pb.r2, pb.theta2));
            let chord = ((x[0] - y[0]).powi(2) + (x[1] - y[1]).powi(2) + (x[2] - y[2]).powi(2)).sqrt();
            assert!(s.length >= chord - 1e-12);
        }
    }
}

#[test]
fn bvp_minimum_beats_baselines() {
    let spec = unit();
    for dtheta in [0.3, 1.0, 1.8, 2.5, PI] {
        let res = solve_two_point(&spec, &BvpProblem::new(0.0, 0.0, 0.0, dtheta)).unwrap();
        assert!(res.shortest().length <= 3.0 * dtheta + 1e-9);
    }
    for r2 in [0.5, 1.5, 3.0] {
        let res = solve_two_point(&spec, &BvpProblem::new(0.0, 0.0, r2, 0.0)).unwrap();
        assert!(res.shortest().length <= r2 + 1e-9, "{r2}: {:?}", res.solutions.iter().map(|s| (s.length, s.shooting_error)).collect::<Vec<_>>());
    }
}

#[test]
fn deviation_threshold_on_the_equator() {
    let spec = unit();
    let threshold = PI / 3f64.sqrt();
    let above = solve_two_point(&spec, &BvpProblem::new(0.0, 0.0, 0.0, threshold + 1e-3)).unwrap();
    assert!(above.shortest().length < 3.0 * (threshold + 1e-3));
    let below = solve_two_point(&spec, &BvpProblem::new(0.0, 0.0, 0.0, threshold - 1e-3)).unwrap();
    assert!((below.shortest().length - 3.0 * (threshold - 1e-3)).abs() < 1e-12);
}

#[test]
fn kepler_limit_is_continuous() {
    let e = -0.3;
    let kepler = apsidal_angle(&ForceParams::new(1.0, 0.0).unwrap(), 1.0, e).unwrap();
    let mut prev = f64::INFINITY;
    for k2 in [1e-3, 1e-4, 1e-5, 1e-6] {
        let p = ForceParams::new(1.0, k2).unwrap();
        let a = apsidal_angle(&p, 1.0, e).unwrap();
        let gap = (a.apsidal_angle - kepler.apsidal_angle).abs();
        assert!(gap < prev);
        prev = gap;
        assert!(classify_orbit(&p, 1.0, e).unwrap().contains(&OrbitClass::Bound));
    }
    assert!(prev < 1e-4);
    assert_eq!(classify_orbit(&ForceParams::new(1.0, 0.0).unwrap(), 1.0, e).unwrap(), vec![OrbitClass::Bound]);
}

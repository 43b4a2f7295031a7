use std::f64::consts::{PI, TAU};

use rayon::prelude::*;
use serde_json::{json, Map, Value};

use super::config::FileConfig;
use super::format::{fmt_num, num, opt_num, Cell, Table};
use super::svg::{Layer, Plot, Style, PALETTE};
use super::{CliError, Output, RunConfig};
use crate::bvp::{default_ray_labels, exp_map_rays, solve_two_point, BvpProblem, Turning};
use crate::central_force::{
    apsidal_angle, circular_radii, classify_orbit, epicyclic_frequency, integrate_orbit, total_potential, ForceParams,
    Stability,
};
use crate::closed::crossings::self_intersections;
use crate::closed::{find_closed, spectrum, verification_config, verify_closure, ClosedGeodesic, ClosedLabel, SpectrumOutcome};
use crate::dynamics::{conserved, initial_state_at, integrate, GeodesicState, IntegratorConfig, OrbitTrace};
use crate::error::Error;
use crate::flat_torus::{flat_lattice, flat_segments};
use crate::reduced::{classify, effective_potential, potential_profile, turning_point};
use crate::surface::SurfaceSpec;

#[derive(Debug, Clone, PartialEq)]
pub enum Command {
    Potential { ell: f64, chi_min: f64, chi_max: f64, samples: usize, energies: Option<Vec<f64>> },
    Geodesic { beta0: f64, r0: f64, lambda_max: f64, samples: Option<usize> },
    Spectrum { m_max: u32, n_max: u32 },
    Closed { label: ClosedLabel },
    Bvp { problem: BvpProblem },
    Flat { m_max: u32, n_max: u32 },
    Kepler { k1: f64, k2: f64, ell: f64, energy: Option<f64>, r0: f64, lambda_max: f64 },
    Expmap { labels: Option<Vec<ClosedLabel>> },
}

impl Command {
    pub fn resolve(args: super::CommandArgs, f: &FileConfig) -> Result<Self, CliError> {
        use super::CommandArgs as A;
        Ok(match args {
            A::Potential { ell, chi_min, chi_max, samples, energies } => {
                let samples = f.pick(samples, "samples", 721)?;
                if samples < 2 {
                    return Err(CliError::Domain("--samples must be at least 2".into()));
                }
                Command::Potential {
                    ell: f.pick(ell, "ell", 1.0)?,
                    chi_min: f.pick(chi_min, "chi-min", -PI)?,
                    chi_max: f.pick(chi_max, "chi-max", PI)?,
                    samples,
                    energies: f.pick_opt(energies, "energies")?,
                }
            }
            A::Geodesic { beta0, r0, lambda_max, samples } => Command::Geodesic {
                beta0: f.require(beta0, "beta0")?,
                r0: f.pick(r0, "r0", 0.0)?,
                lambda_max: f.pick(lambda_max, "lambda-max", 100.0)?,
                samples: f.pick_opt(samples, "samples")?,
            },
            A::Spectrum { m_max, n_max } => {
                Command::Spectrum { m_max: f.pick(m_max, "m-max", 5)?, n_max: f.pick(n_max, "n-max", 5)? }
            }
            A::Closed { m, n, p } => Command::Closed {
                label: ClosedLabel::new(f.require(m, "m")?, f.require(n, "n")?, f.require(p, "p")?),
            },
            A::Bvp { r1, theta1, r2, theta2, windings } => {
                let mut problem = BvpProblem::new(
                    f.require(r1, "r1")?,
                    f.pick(theta1, "theta1", 0.0)?,
                    f.require(r2, "r2")?,
                    f.require(theta2, "theta2")?,
                );
                problem.winding_cap = f.pick(windings, "windings", problem.winding_cap)?;
                Command::Bvp { problem }
            }
            A::Flat { m_max, n_max } => Command::Flat { m_max: f.pick(m_max, "m-max", 6)?, n_max: f.pick(n_max, "n-max", 6)? },
            A::Kepler { k1, k2, ell, energy, r0, lambda_max } => Command::Kepler {
                k1: f.pick(k1, "k1", 1.0)?,
                k2: f.pick(k2, "k2", 0.0)?,
                ell: f.pick(ell, "ell", 1.0)?,
                energy: f.pick_opt(energy, "energy")?,
                r0: f.pick(r0, "r0", 20.0)?,
                lambda_max: f.pick(lambda_max, "lambda-max", 200.0)?,
            },
            A::Expmap { labels } => {
                let raw: Option<Vec<String>> = f.pick_opt(labels, "labels")?;
                let labels = raw
                    .map(|v| {
                        v.iter()
                            .flat_map(|s| s.split_whitespace())
                            .map(|s| s.parse::<ClosedLabel>().map_err(CliError::from))
                            .collect::<Result<Vec<_>, _>>()
                    })
                    .transpose()?;
                Command::Expmap { labels }
            }
        })
    }
}

pub fn execute(cfg: &RunConfig) -> Result<Output, CliError> {
    match &cfg.command {
        Command::Potential { ell, chi_min, chi_max, samples, energies } => {
            potential(&cfg.surface()?, *ell, (*chi_min, *chi_max), *samples, energies.as_deref())
        }
        Command::Geodesic { beta0, r0, lambda_max, samples } => {
            geodesic(&cfg.surface()?, *beta0, *r0, *lambda_max, *samples)
        }
        Command::Spectrum { m_max, n_max } => spectrum_table(&cfg.surface()?, *m_max, *n_max, cfg.tol),
        Command::Closed { label } => closed(&cfg.surface()?, *label, cfg.tol),
        Command::Bvp { problem } => bvp(&cfg.surface()?, problem, cfg.tol),
        Command::Flat { m_max, n_max } => flat(*m_max, *n_max),
        Command::Kepler { k1, k2, ell, energy, r0, lambda_max } => {
            kepler(ForceParams::new(*k1, *k2)?, *ell, *energy, *r0, *lambda_max)
        }
        Command::Expmap { labels } => expmap(&cfg.surface()?, labels.as_deref()),
    }
}

fn kebab(name: &str) -> String {
    let mut out = String::new();
    for (i, ch) in name.chars().enumerate() {
        if ch.is_uppercase() {
            if i > 0 {
                out.push('-');
            }
            out.extend(ch.to_lowercase());
        } else {
            out.push(ch);
        }
    }
    out
}

fn kebab_of<T: std::fmt::Debug>(x: &T) -> String {
    kebab(&format!("{x:?}"))
}

fn output(command: &'static str, surface: Option<SurfaceSpec>, table: Table, meta: Map<String, Value>, plot: Plot) -> Output {
    Output { command, surface, table, meta, plot, failure: None }
}

/// Splits a curve in the `(Xi, Theta) = (chi / 2pi, theta / 2pi)` unit square
/// wherever it wraps.
fn unit_square(points: impl Iterator<Item = (f64, f64)>) -> Vec<Vec<(f64, f64)>> {
    let mut paths: Vec<Vec<(f64, f64)>> = vec![Vec::new()];
    for (chi, theta) in points {
        let p = ((chi / TAU).rem_euclid(1.0), (theta / TAU).rem_euclid(1.0));
        let cur = paths.last_mut().expect("nonempty");
        if let Some(&q) = cur.last() {
            if (p.0 - q.0).abs() > 0.5 || (p.1 - q.1).abs() > 0.5 {
                paths.push(Vec::new());
            }
        }
        paths.last_mut().expect("nonempty").push(p);
    }
    paths
}

fn trace_square(spec: &SurfaceSpec, trace: &OrbitTrace, samples: usize) -> Vec<Vec<(f64, f64)>> {
    let (l0, l1) = (trace.start().lambda, trace.end().lambda);
    unit_square(
        (0..=samples)
            .filter_map(|i| trace.state_at(l0 + (l1 - l0) * i as f64 / samples as f64))
            .map(|s| (s.r / spec.b, s.theta)),
    )
}

fn square_plot(title: String) -> Plot {
    let mut p = Plot::new(title, "Xi = chi / 2 pi", "Theta = theta / 2 pi", (0.0, 1.0), (0.0, 1.0));
    p.equal_aspect = true;
    p
}

fn potential(
    spec: &SurfaceSpec,
    ell: f64,
    (chi_min, chi_max): (f64, f64),
    samples: usize,
    energies: Option<&[f64]>,
) -> Result<Output, CliError> {
    if !(chi_max > chi_min) || !chi_min.is_finite() || !chi_max.is_finite() {
        return Err(CliError::Domain(format!("invalid range [{chi_min}, {chi_max}]")));
    }
    if ell == 0.0 {
        return Err(CliError::Domain("--ell must be nonzero".into()));
    }
    let prof = potential_profile(spec, ell);
    let levels: Vec<f64> = match energies {
        Some(e) => e.to_vec(),
        None if prof.u_inner.is_finite() => {
            [0.25, 0.5, 0.75, 1.0, 1.5].iter().map(|f| prof.u0 + f * (prof.u_inner - prof.u0)).collect()
        }
        None => [1.25, 1.5, 2.0, 3.0, 4.0].iter().map(|f| prof.u0 * f).collect(),
    };

    let mut table = Table::new(&["chi", "r", "U"]);
    let mut curve = Vec::with_capacity(samples);
    for i in 0..samples {
        let t = i as f64 / (samples - 1) as f64;
        let chi = chi_min * (1.0 - t) + chi_max * t;
        let u = effective_potential(spec, ell, chi * spec.b);
        table.push(vec![chi.into(), (chi * spec.b).into(), u.into()]);
        curve.push((chi, u));
    }

    let top = levels.iter().copied().filter(|e| e.is_finite()).fold(prof.u0, f64::max);
    let mut plot = Plot::new(
        format!("Effective potential, a = {}, b = {}, ell = {}", fmt_num(spec.a), fmt_num(spec.b), fmt_num(ell)),
        "chi",
        "U",
        (chi_min, chi_max),
        (0.0, 1.2 * top),
    )
    .layer(Layer::new("U(chi)", vec![curve], PALETTE[0], Style::Line));
    let mut level_meta = Vec::new();
    for (i, &e) in levels.iter().enumerate() {
        let color = PALETTE[1 + i % (PALETTE.len() - 1)];
        plot = plot.layer(Layer::new(format!("E = {}", fmt_num(e)), vec![vec![(chi_min, e), (chi_max, e)]], color, Style::Dashed));
        let classes = match classify(spec, e, ell) {
            Ok(c) => Value::from(c.iter().map(kebab_of).collect::<Vec<_>>()),
            Err(err) => Value::from(format!("error: {err}")),
        };
        level_meta.push(json!({ "energy": num(e), "classes": classes }));
    }

    let mut meta = Map::new();
    meta.insert("ell".into(), num(ell));
    meta.insert("u_outer".into(), num(prof.u0));
    meta.insert("u_inner".into(), num(prof.u_inner));
    meta.insert("chi_inf".into(), opt_num(prof.chi_inf));
    meta.insert("levels".into(), Value::Array(level_meta));
    Ok(output("potential", Some(*spec), table, meta, plot))
}

fn geodesic(spec: &SurfaceSpec, beta0: f64, r0: f64, lambda_max: f64, samples: Option<usize>) -> Result<Output, CliError> {
    let s0 = initial_state_at(spec, r0, 0.0, beta0, 1.0)?;
    let cfg = IntegratorConfig::default().with_max_lambda(lambda_max);
    let (trace, failure) = match integrate(spec, &s0, &cfg) {
        Ok(t) => (t, None),
        Err(Error::Integration { lambda, reason, partial }) => {
            let msg = format!("integration failed at lambda = {lambda}: {reason}; output is partial");
            (*partial, Some(CliError::Numerical(msg)))
        }
        Err(e) => return Err(e.into()),
    };

    let mut table = Table::new(&["lambda", "r", "theta", "vr", "vtheta", "E", "ell", "event"]);
    let row = |s: &GeodesicState, event: &str| -> Result<Vec<Cell>, CliError> {
        let k = conserved(spec, s)?;
        Ok(vec![
            s.lambda.into(),
            s.r.into(),
            s.theta.into(),
            s.vr.into(),
            s.vtheta.into(),
            k.energy.into(),
            k.ell.into(),
            event.into(),
        ])
    };
    match samples {
        Some(n) if n >= 2 => {
            let (l0, l1) = (trace.start().lambda, trace.end().lambda);
            for i in 0..n {
                if let Some(s) = trace.state_at(l0 + (l1 - l0) * i as f64 / (n - 1) as f64) {
                    table.push(row(&s, "")?);
                }
            }
        }
        _ => {
            for s in &trace.states {
                table.push(row(s, "")?);
            }
        }
    }
    for ev in &trace.events {
        table.push(row(&ev.state, ev.kind.name())?);
    }

    let k0 = conserved(spec, &s0)?;
    let mut meta = Map::new();
    meta.insert("beta0".into(), num(beta0));
    meta.insert("r0".into(), num(r0));
    meta.insert("status".into(), kebab_of(&trace.status).into());
    meta.insert("partial".into(), failure.is_some().into());
    meta.insert("energy_drift".into(), num(trace.energy_drift));
    meta.insert("ell_drift".into(), num(trace.ell_drift));
    meta.insert("clairaut_drift".into(), num(trace.clairaut_drift));
    if r0 == 0.0 {
        if let Ok(c) = classify(spec, k0.energy, k0.ell) {
            meta.insert("classes".into(), c.iter().map(kebab_of).collect::<Vec<_>>().into());
        }
        meta.insert("chi_max".into(), opt_num(turning_point(spec, beta0).chi_max));
    }

    let plot = square_plot(format!("Geodesic, beta0 = {}", fmt_num(beta0))).layer(Layer::new(
        "",
        trace_square(spec, &trace, 4000),
        PALETTE[0],
        Style::Line,
    ));
    let mut out = output("geodesic", Some(*spec), table, meta, plot);
    out.failure = failure;
    Ok(out)
}

const SPECTRUM_COLUMNS: [&str; 13] = [
    "label",
    "m",
    "n",
    "p",
    "status",
    "beta0_rad",
    "beta0_deg",
    "energy_at_unit_ell",
    "chi_max",
    "length",
    "residual",
    "verified",
    "reason",
];

fn verify(spec: &SurfaceSpec, cg: &ClosedGeodesic) -> f64 {
    verify_closure(spec, cg, &verification_config()).unwrap_or(f64::NAN)
}

fn closed_row(cg: &ClosedGeodesic, residual: f64, tol: f64) -> Vec<Cell> {
    let l = cg.label;
    vec![
        l.to_string().into(),
        l.m.into(),
        l.n.into(),
        l.p.into(),
        "solved".into(),
        cg.beta0.into(),
        cg.beta0.to_degrees().into(),
        cg.energy_at_unit_ell.into(),
        cg.chi_max.into(),
        cg.period_length.into(),
        residual.into(),
        if residual <= tol { "yes" } else { "no" }.into(),
        Cell::Empty,
    ]
}

fn residual_failure(bad: &[String], tol: f64) -> Option<CliError> {
    (!bad.is_empty()).then(|| {
        CliError::Numerical(format!("closure residual above tolerance {} for {}", fmt_num(tol), bad.join(", ")))
    })
}

fn spectrum_table(spec: &SurfaceSpec, m_max: u32, n_max: u32, tol: f64) -> Result<Output, CliError> {
    let sp = spectrum(spec, m_max, n_max);
    if let Some(reason) = sp.unsupported {
        return Err(CliError::Domain(format!("spectrum unavailable: {reason}")));
    }
    let residuals: Vec<Option<f64>> = sp
        .entries
        .par_iter()
        .map(|e| match &e.outcome {
            SpectrumOutcome::Solved(cg) => Some(verify(spec, cg)),
            _ => None,
        })
        .collect();

    let mut table = Table::new(&SPECTRUM_COLUMNS);
    let mut bad = Vec::new();
    let mut points = Vec::new();
    for (e, res) in sp.entries.iter().zip(&residuals) {
        let l = e.label;
        match (&e.outcome, res) {
            (SpectrumOutcome::Solved(cg), Some(r)) => {
                if !(*r <= tol) {
                    bad.push(l.to_string());
                }
                points.push((cg.beta0.to_degrees(), cg.period_length));
                table.push(closed_row(cg, *r, tol));
            }
            (SpectrumOutcome::Nonexistent { reason } | SpectrumOutcome::Failed { reason }, _) => {
                let status = if matches!(e.outcome, SpectrumOutcome::Nonexistent { .. }) { "nonexistent" } else { "failed" };
                let mut row = vec![l.to_string().into(), l.m.into(), l.n.into(), l.p.into(), status.into()];
                row.extend(std::iter::repeat(Cell::Empty).take(7));
                row.push(reason.clone().into());
                table.push(row);
            }
            _ => unreachable!("solved entries carry a residual"),
        }
    }
    let mut meta = Map::new();
    meta.insert("m_max".into(), m_max.into());
    meta.insert("n_max".into(), n_max.into());
    meta.insert("tolerance".into(), num(tol));
    meta.insert("solved".into(), points.len().into());

    let max_len = points.iter().map(|p| p.1).filter(|l| l.is_finite()).fold(1.0, f64::max);
    let plot = Plot::new(
        format!("Closed geodesics up to m = {m_max}, n = {n_max}"),
        "beta0 (deg)",
        "period length",
        (0.0, 90.0),
        (0.0, 1.05 * max_len),
    )
    .layer(Layer::new("solved", vec![points], PALETTE[0], Style::Dots));
    let mut out = output("spectrum", Some(*spec), table, meta, plot);
    out.failure = residual_failure(&bad, tol);
    Ok(out)
}

fn closed(spec: &SurfaceSpec, label: ClosedLabel, tol: f64) -> Result<Output, CliError> {
    let cg = find_closed(spec, label)?;
    let residual = verify(spec, &cg);
    let crossings = self_intersections(spec, &cg)?;

    let mut cols = SPECTRUM_COLUMNS.to_vec();
    cols.pop();
    cols.extend(["crossing_radii", "crossing_chi"]);
    let mut table = Table::new(&cols);
    let mut row = closed_row(&cg, residual, tol);
    row.pop();
    row.push(crossings.len().into());
    row.push(crossings.iter().map(|c| fmt_num(c.chi)).collect::<Vec<_>>().join(";").into());
    table.push(row);

    let mut meta = Map::new();
    meta.insert("tolerance".into(), num(tol));
    meta.insert(
        "crossings".into(),
        crossings
            .iter()
            .map(|c| {
                json!({
                    "chi": num(c.chi),
                    "count": c.count,
                    "spacing": num(c.spacing),
                    "theta_offsets": c.theta_offsets.iter().map(|&t| num(t)).collect::<Vec<_>>(),
                })
            })
            .collect::<Vec<_>>()
            .into(),
    );

    let s0 = initial_state_at(spec, cg.start_r, 0.0, cg.beta0, 1.0)?;
    let trace = integrate(spec, &s0, &IntegratorConfig::default().with_max_lambda(cg.period_length))?;
    let plot = square_plot(format!("Closed geodesic {label}")).layer(Layer::new(
        label.to_string(),
        trace_square(spec, &trace, 4000),
        PALETTE[0],
        Style::Line,
    ));
    let mut out = output("closed", Some(*spec), table, meta, plot);
    out.failure = residual_failure(&if residual <= tol { vec![] } else { vec![label.to_string()] }, tol);
    Ok(out)
}

fn bvp(spec: &SurfaceSpec, problem: &BvpProblem, tol: f64) -> Result<Output, CliError> {
    let res = solve_two_point(spec, problem)?;
    let mut table = Table::new(&[
        "rank",
        "p_theta",
        "turning",
        "r_turn_1",
        "r_turn_2",
        "delta_theta",
        "length",
        "beta1_rad",
        "beta1_deg",
        "shooting_error",
        "tie",
    ]);
    let mut plot = square_plot("Two-point geodesics".into());
    for (i, s) in res.solutions.iter().enumerate() {
        let (kind, t1, t2) = match s.turning {
            Turning::None => ("none", None, None),
            Turning::One { r_ext } => ("one", Some(r_ext), None),
            Turning::Two { r_first, r_second } => ("two", Some(r_first), Some(r_second)),
        };
        table.push(vec![
            (i + 1).into(),
            s.p_theta.into(),
            kind.into(),
            t1.into(),
            t2.into(),
            s.delta_theta.into(),
            s.length.into(),
            s.beta1.into(),
            s.beta1.to_degrees().into(),
            s.shooting_error.into(),
            if s.tie { "yes" } else { "no" }.into(),
        ]);
        let color = PALETTE[i % PALETTE.len()];
        let paths = unit_square(s.polyline.iter().map(|&(r, th)| (r / spec.b, th)));
        plot = plot.layer(Layer::new(format!("#{} L = {}", i + 1, fmt_num(s.length)), paths, color, Style::Line));
    }
    let mut meta = Map::new();
    meta.insert("r1".into(), num(problem.r1));
    meta.insert("theta1".into(), num(problem.theta1));
    meta.insert("r2".into(), num(problem.r2));
    meta.insert("theta2".into(), num(problem.theta2));
    meta.insert("branches".into(), res.branches.clone().into());
    let worst = res.solutions.iter().map(|s| s.shooting_error).fold(0.0, f64::max);
    let mut out = output("bvp", Some(*spec), table, meta, plot);
    if !(worst <= tol) {
        out.failure = Some(CliError::Numerical(format!("shooting error {} exceeds tolerance {}", fmt_num(worst), fmt_num(tol))));
    }
    Ok(out)
}

fn flat(m_max: u32, n_max: u32) -> Result<Output, CliError> {
    let mut table = Table::new(&["label", "m", "n", "length"]);
    let mut plot = Plot::new(format!("Flat torus geodesics up to [{m_max},{n_max}]"), "x", "y", (0.0, 1.0), (0.0, 1.0));
    plot.equal_aspect = true;
    for (i, e) in flat_lattice(m_max, n_max).iter().enumerate() {
        table.push(vec![e.label.to_string().into(), e.label.m.into(), e.label.n.into(), e.length.into()]);
        let paths = flat_segments(e.label)?.iter().map(|s| vec![s.start, s.end]).collect();
        plot = plot.layer(Layer::new(e.label.to_string(), paths, PALETTE[i % PALETTE.len()], Style::Line));
    }
    let mut meta = Map::new();
    meta.insert("m_max".into(), m_max.into());
    meta.insert("n_max".into(), n_max.into());
    Ok(output("flat", None, table, meta, plot))
}

fn kepler(params: ForceParams, ell: f64, energy: Option<f64>, r0: f64, lambda_max: f64) -> Result<Output, CliError> {
    if ell == 0.0 {
        return Err(CliError::Domain("--ell must be nonzero".into()));
    }
    let circ = circular_radii(&params, ell)?;
    let well = circ.iter().find(|c| c.stability == Stability::Stable);
    let barrier = circ.iter().find(|c| c.stability == Stability::Unstable);
    let energy = match (energy, well) {
        (Some(e), _) => e,
        (None, Some(w)) => 0.5 * (w.energy + barrier.map_or(0.0, |b| b.energy.min(0.0))),
        (None, None) => return Err(CliError::Domain("no stable circular orbit; pass --energy".into())),
    };
    let classes = classify_orbit(&params, ell, energy)?;
    let aps = apsidal_angle(&params, ell, energy).ok();
    let kappa = well.map(|w| epicyclic_frequency(&params, ell, w.r)).transpose()?;

    let mut table = Table::new(&[
        "k1",
        "k2",
        "ell",
        "energy",
        "classes",
        "r_circular",
        "epicyclic_frequency",
        "pericenter",
        "apocenter",
        "apsidal_angle",
        "precession",
    ]);
    table.push(vec![
        params.k1.into(),
        params.k2.into(),
        ell.into(),
        energy.into(),
        classes.iter().map(kebab_of).collect::<Vec<_>>().join(";").into(),
        well.map(|w| w.r).into(),
        kappa.into(),
        aps.map(|a| a.pericenter).into(),
        aps.map(|a| a.apocenter).into(),
        aps.map(|a| a.apsidal_angle).into(),
        aps.map(|a| a.precession).into(),
    ]);

    let start = match aps {
        Some(a) => Some(GeodesicState { r: a.pericenter, theta: 0.0, vr: 0.0, vtheta: ell / (a.pericenter * a.pericenter), lambda: 0.0 }),
        None => {
            let v2 = 2.0 * (energy - total_potential(&params, ell, r0)?);
            (v2 >= 0.0).then(|| GeodesicState { r: r0, theta: 0.0, vr: -v2.sqrt(), vtheta: ell / (r0 * r0), lambda: 0.0 })
        }
    };
    let mut meta = Map::new();
    meta.insert(
        "circular_orbits".into(),
        circ.iter()
            .map(|c| json!({ "r": num(c.r), "energy": num(c.energy), "stability": kebab_of(&c.stability) }))
            .collect::<Vec<_>>()
            .into(),
    );
    let mut paths = Vec::new();
    if let Some(s0) = start {
        let trace = integrate_orbit(&params, &s0, &IntegratorConfig::default().with_max_lambda(lambda_max))?;
        meta.insert("trace_status".into(), kebab_of(&trace.status).into());
        let (l0, l1) = (trace.start().lambda, trace.end().lambda);
        let n = 4000;
        paths.push(
            (0..=n)
                .filter_map(|i| trace.state_at(l0 + (l1 - l0) * i as f64 / n as f64))
                .map(|s| (s.r * s.theta.cos(), s.r * s.theta.sin()))
                .collect::<Vec<_>>(),
        );
    }
    let extent = paths.iter().flatten().map(|p| p.0.hypot(p.1)).fold(1.0, f64::max) * 1.05;
    let mut plot = Plot::new(
        format!("Central force k1 = {}, k2 = {}, ell = {}", fmt_num(params.k1), fmt_num(params.k2), fmt_num(ell)),
        "x",
        "y",
        (-extent, extent),
        (-extent, extent),
    )
    .layer(Layer::new("orbit", paths, PALETTE[0], Style::Line))
    .layer(Layer::new("source", vec![vec![(0.0, 0.0)]], PALETTE[1], Style::Dots));
    plot.equal_aspect = true;
    Ok(output("kepler", None, table, meta, plot))
}

fn expmap(spec: &SurfaceSpec, labels: Option<&[ClosedLabel]>) -> Result<Output, CliError> {
    let labels = labels.map_or_else(default_ray_labels, <[ClosedLabel]>::to_vec);
    let (rays, warnings) = exp_map_rays(spec, &labels);
    let mut rows: Vec<(String, f64, f64)> = rays
        .iter()
        .map(|r| {
            let name = match r.label {
                Some(l) => l.to_string(),
                None if r.beta0 == 0.0 => "meridian".into(),
                None => "outer-equator".into(),
            };
            (name, r.beta0, r.length)
        })
        .collect();
    rows.sort_by(|a, b| a.2.total_cmp(&b.2).then_with(|| a.0.cmp(&b.0)));

    let mut table = Table::new(&["label", "beta0_rad", "beta0_deg", "length"]);
    let mut points = Vec::new();
    for (name, beta, len) in &rows {
        table.push(vec![name.clone().into(), (*beta).into(), beta.to_degrees().into(), (*len).into()]);
        points.push((len * beta.sin(), len * beta.cos()));
    }
    let extent = rows.iter().map(|r| r.2).filter(|l| l.is_finite()).fold(1.0, f64::max) * 1.05;
    let mut plot = Plot::new(
        "Closed geodesics through the outer equator",
        "length x sin(beta0)",
        "length x cos(beta0)",
        (0.0, extent),
        (0.0, extent),
    )
    .layer(Layer::new("", vec![vec![(0.0, 0.0), (0.0, extent)], vec![(0.0, 0.0), (extent, 0.0)]], "#999999", Style::Dashed))
    .layer(Layer::new("closed", points.into_iter().map(|p| vec![p]).collect(), PALETTE[0], Style::Dots));
    plot.equal_aspect = true;

    let mut meta = Map::new();
    meta.insert("warnings".into(), warnings.into());
    Ok(output("expmap", Some(*spec), table, meta, plot))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::surface::{make_torus, Family};

    #[test]
    fn names() {
        assert_eq!(kebab("CircularStable"), "circular-stable");
        assert_eq!(kebab_of(&Family::Ring), "ring");
    }

    #[test]
    fn wrapping_splits_paths() {
        let p = unit_square([(0.0, 0.9 * TAU), (0.0, 1.1 * TAU)].into_iter());
        assert_eq!(p.len(), 2);
        assert!((p[1][0].1 - 0.1).abs() < 1e-12);
    }

    #[test]
    fn potential_hits_inner_level() {
        let s = make_torus(2.0, 1.0).unwrap();
        let out = potential(&s, 1.0, (-PI, PI), 721, None).unwrap();
        let last = out.table.rows.last().unwrap();
        assert_eq!(last[0], Cell::Num(PI));
        assert_eq!(last[2], Cell::Num(0.5));
    }
}

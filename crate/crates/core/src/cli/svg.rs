//! Minimal self-contained SVG line and scatter plots.

use std::fmt::Write;

const WIDTH: f64 = 720.0;
const HEIGHT: f64 = 540.0;
const MARGIN_L: f64 = 72.0;
const MARGIN_R: f64 = 150.0;
const MARGIN_T: f64 = 40.0;
const MARGIN_B: f64 = 56.0;

pub const PALETTE: [&str; 8] = ["#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#e377c2", "#17becf"];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Style {
    Line,
    Dashed,
    Dots,
}

#[derive(Debug, Clone)]
pub struct Layer {
    pub name: String,
    /// Separate polylines; non-finite `x` or NaN `y` also breaks a line.
    pub paths: Vec<Vec<(f64, f64)>>,
    pub color: &'static str,
    pub style: Style,
}

impl Layer {
    pub fn new(name: impl Into<String>, paths: Vec<Vec<(f64, f64)>>, color: &'static str, style: Style) -> Self {
        Layer { name: name.into(), paths, color, style }
    }
}

#[derive(Debug, Clone)]
pub struct Plot {
    pub title: String,
    pub x_label: String,
    pub y_label: String,
    pub x_range: (f64, f64),
    pub y_range: (f64, f64),
    pub equal_aspect: bool,
    pub layers: Vec<Layer>,
}

impl Plot {
    pub fn new(title: impl Into<String>, x_label: &str, y_label: &str, x_range: (f64, f64), y_range: (f64, f64)) -> Self {
        Plot {
            title: title.into(),
            x_label: x_label.into(),
            y_label: y_label.into(),
            x_range,
            y_range,
            equal_aspect: false,
            layers: Vec::new(),
        }
    }

    pub fn layer(mut self, layer: Layer) -> Self {
        self.layers.push(layer);
        self
    }
}

fn nice_step(span: f64) -> f64 {
    let raw = span / 5.0;
    let mag = 10f64.powf(raw.log10().floor());
    let f = raw / mag;
    let nice = if f < 1.5 {
        1.0
    } else if f < 3.5 {
        2.0
    } else if f < 7.5 {
        5.0
    } else {
        10.0
    };
    nice * mag
}

fn ticks(lo: f64, hi: f64) -> Vec<f64> {
    let step = nice_step(hi - lo);
    let first = (lo / step).ceil() as i64;
    let last = (hi / step).floor() as i64;
    (first..=last).map(|k| k as f64 * step).collect()
}

fn label(x: f64) -> String {
    let s = format!("{:.6}", x);
    let s = s.trim_end_matches('0').trim_end_matches('.');
    if s == "-0" {
        "0".into()
    } else {
        s.into()
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

/// Splits a polyline into finite runs, with infinite `y` pinned just beyond the
/// frame so walls reach the clipped edge.
fn runs(path: &[(f64, f64)], y_range: (f64, f64)) -> Vec<Vec<(f64, f64)>> {
    let pad = 0.05 * (y_range.1 - y_range.0);
    let (lo, hi) = (y_range.0 - pad, y_range.1 + pad);
    let mut out = vec![Vec::new()];
    for &(x, y) in path {
        if !x.is_finite() || y.is_nan() {
            out.push(Vec::new());
            continue;
        }
        out.last_mut().expect("nonempty").push((x, y.clamp(lo, hi)));
    }
    out.retain(|r| !r.is_empty());
    out
}

pub fn render(plot: &Plot) -> String {
    let (mut x0, mut x1) = plot.x_range;
    let (mut y0, mut y1) = plot.y_range;
    if x1 <= x0 {
        x1 = x0 + 1.0;
    }
    if y1 <= y0 {
        y1 = y0 + 1.0;
    }
    let mut pw = WIDTH - MARGIN_L - MARGIN_R;
    let mut ph = HEIGHT - MARGIN_T - MARGIN_B;
    if plot.equal_aspect {
        let scale = (pw / (x1 - x0)).min(ph / (y1 - y0));
        let (cx, cy) = (0.5 * (x0 + x1), 0.5 * (y0 + y1));
        x0 = cx - 0.5 * pw / scale;
        x1 = cx + 0.5 * pw / scale;
        y0 = cy - 0.5 * ph / scale;
        y1 = cy + 0.5 * ph / scale;
        pw = scale * (x1 - x0);
        ph = scale * (y1 - y0);
    }
    let sx = |x: f64| MARGIN_L + (x - x0) / (x1 - x0) * pw;
    let sy = |y: f64| MARGIN_T + (y1 - y) / (y1 - y0) * ph;

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(
        s,
        r#"<defs><clipPath id="frame"><rect x="{MARGIN_L}" y="{MARGIN_T}" width="{pw:.2}" height="{ph:.2}"/></clipPath></defs>"#
    );
    let _ = writeln!(s, r#"<text x="{:.2}" y="24" text-anchor="middle" font-size="15">{}</text>"#, MARGIN_L + pw / 2.0, escape(&plot.title));

    for t in ticks(x0, x1) {
        let x = sx(t);
        let _ = writeln!(s, r##"<line x1="{x:.2}" y1="{MARGIN_T}" x2="{x:.2}" y2="{:.2}" stroke="#e6e6e6"/>"##, MARGIN_T + ph);
        let _ = writeln!(s, r#"<text x="{x:.2}" y="{:.2}" text-anchor="middle">{}</text>"#, MARGIN_T + ph + 16.0, label(t));
    }
    for t in ticks(y0, y1) {
        let y = sy(t);
        let _ = writeln!(s, r##"<line x1="{MARGIN_L}" y1="{y:.2}" x2="{:.2}" y2="{y:.2}" stroke="#e6e6e6"/>"##, MARGIN_L + pw);
        let _ = writeln!(s, r#"<text x="{:.2}" y="{:.2}" text-anchor="end">{}</text>"#, MARGIN_L - 6.0, y + 4.0, label(t));
    }
    let _ = writeln!(
        s,
        r#"<rect x="{MARGIN_L}" y="{MARGIN_T}" width="{pw:.2}" height="{ph:.2}" fill="none" stroke="black"/>"#
    );
    let _ = writeln!(
        s,
        r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">{}</text>"#,
        MARGIN_L + pw / 2.0,
        MARGIN_T + ph + 40.0,
        escape(&plot.x_label)
    );
    let _ = writeln!(
        s,
        r#"<text transform="translate(20 {:.2}) rotate(-90)" text-anchor="middle">{}</text>"#,
        MARGIN_T + ph / 2.0,
        escape(&plot.y_label)
    );

    let _ = writeln!(s, r#"<g clip-path="url(#frame)" fill="none">"#);
    for layer in &plot.layers {
        for run in layer.paths.iter().flat_map(|p| runs(p, (y0, y1))) {
            match layer.style {
                Style::Dots => {
                    for (x, y) in run {
                        let _ = writeln!(s, r#"<circle cx="{:.2}" cy="{:.2}" r="3" fill="{}"/>"#, sx(x), sy(y), layer.color);
                    }
                }
                Style::Line | Style::Dashed => {
                    let mut d = String::new();
                    for (i, (x, y)) in run.iter().enumerate() {
                        let _ = write!(d, "{}{:.2} {:.2}", if i == 0 { "M" } else { " L" }, sx(*x), sy(*y));
                    }
                    let dash = if layer.style == Style::Dashed { r#" stroke-dasharray="6 4""# } else { "" };
                    let _ = writeln!(s, r#"<path d="{d}" stroke="{}" stroke-width="1.4"{dash}/>"#, layer.color);
                }
            }
        }
    }
    let _ = writeln!(s, "</g>");

    let lx = MARGIN_L + pw + 14.0;
    for (i, layer) in plot.layers.iter().filter(|l| !l.name.is_empty()).enumerate() {
        let y = MARGIN_T + 10.0 + 18.0 * i as f64;
        let _ = writeln!(s, r#"<rect x="{lx:.2}" y="{:.2}" width="12" height="3" fill="{}"/>"#, y - 4.0, layer.color);
        let _ = writeln!(s, r#"<text x="{:.2}" y="{y:.2}">{}</text>"#, lx + 18.0, escape(&layer.name));
    }
    s.push_str("</svg>\n");
    s
}

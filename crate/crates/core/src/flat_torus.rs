//! Closed geodesics of the flat square torus: straight lines of rational
//! slope in the unit square with opposite edges identified.

use std::cmp::Ordering;

use serde::Serialize;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct FlatLabel {
    pub m: u32,
    pub n: u32,
}

fn gcd(a: u32, b: u32) -> u32 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

impl FlatLabel {
    pub fn new(m: u32, n: u32) -> Self {
        FlatLabel { m, n }
    }

    pub fn is_primitive(&self) -> bool {
        gcd(self.m, self.n) == 1
    }

    fn check(&self) -> Result<()> {
        if self.m == 0 && self.n == 0 {
            return Err(Error::InvalidParameter("[0,0] is not a closed geodesic".into()));
        }
        Ok(())
    }
}

impl std::fmt::Display for FlatLabel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "[{},{}]", self.m, self.n)
    }
}

pub fn flat_length(label: FlatLabel) -> Result<f64> {
    label.check()?;
    Ok((label.m as f64).hypot(label.n as f64))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FlatSegment {
    pub start: (f64, f64),
    pub end: (f64, f64),
}

impl FlatSegment {
    pub fn length(&self) -> f64 {
        (self.end.0 - self.start.0).hypot(self.end.1 - self.start.1)
    }
}

/// Pieces of the line from `(0,0)` to `(m,n)` after wrapping into the unit
/// square, in order along the line.
pub fn flat_segments(label: FlatLabel) -> Result<Vec<FlatSegment>> {
    label.check()?;
    let g = gcd(label.m, label.n);
    if g != 1 {
        return Err(Error::NonPrimitive {
            label: label.to_string(),
            primitive: FlatLabel::new(label.m / g, label.n / g).to_string(),
        });
    }
    let (m, n) = (label.m as u64, label.n as u64);
    // Line parameters where a coordinate is an integer, as fractions i/m and j/n.
    let mut breaks: Vec<(u64, u64)> = (0..=m).filter(|_| m > 0).map(|i| (i, m)).collect();
    breaks.extend((1..n).map(|j| (j, n)));
    if m == 0 {
        breaks.extend([(0, 1), (1, 1)]);
    }
    breaks.sort_by(|a, b| (a.0 * b.1).cmp(&(b.0 * a.1)));
    breaks.dedup_by(|a, b| a.0 * b.1 == b.0 * a.1);
    let point = |(num, den): (u64, u64)| ((m * num) as f64 / den as f64, (n * num) as f64 / den as f64);
    let mut out = Vec::with_capacity(breaks.len() - 1);
    for w in breaks.windows(2) {
        let (p0, p1) = (point(w[0]), point(w[1]));
        let cell = ((0.5 * (p0.0 + p1.0)).floor(), (0.5 * (p0.1 + p1.1)).floor());
        out.push(FlatSegment { start: (p0.0 - cell.0, p0.1 - cell.1), end: (p1.0 - cell.0, p1.1 - cell.1) });
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FlatEntry {
    pub label: FlatLabel,
    pub length: f64,
}

/// Primitive labels with `m <= m_max` and `n <= n_max`, by length and then label.
pub fn flat_lattice(m_max: u32, n_max: u32) -> Vec<FlatEntry> {
    let mut out: Vec<FlatEntry> = (0..=m_max)
        .flat_map(|m| (0..=n_max).map(move |n| FlatLabel::new(m, n)))
        .filter(|l| l.is_primitive())
        .map(|label| FlatEntry { label, length: (label.m as f64).hypot(label.n as f64) })
        .collect();
    out.sort_by(|a, b| a.length.partial_cmp(&b.length).unwrap_or(Ordering::Equal).then(a.label.cmp(&b.label)));
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lengths() {
        assert_eq!(flat_length(FlatLabel::new(2, 3)).unwrap(), 13f64.sqrt());
        assert_eq!(flat_length(FlatLabel::new(1, 0)).unwrap(), 1.0);
        assert_eq!(flat_length(FlatLabel::new(1, 1)).unwrap(), 2f64.sqrt());
        assert!(flat_length(FlatLabel::new(0, 0)).is_err());
    }

    #[test]
    fn segments() {
        let s = flat_segments(FlatLabel::new(2, 3)).unwrap();
        assert_eq!(s.len(), 4);
        assert_eq!(s[0].start, (0.0, 0.0));
        let total: f64 = s.iter().map(FlatSegment::length).sum();
        assert!((total - 13f64.sqrt()).abs() < 1e-12);
        assert_eq!(flat_segments(FlatLabel::new(1, 1)).unwrap(), vec![FlatSegment { start: (0.0, 0.0), end: (1.0, 1.0) }]);
        assert_eq!(flat_segments(FlatLabel::new(1, 0)).unwrap(), vec![FlatSegment { start: (0.0, 0.0), end: (1.0, 0.0) }]);
        assert_eq!(flat_segments(FlatLabel::new(0, 1)).unwrap(), vec![FlatSegment { start: (0.0, 0.0), end: (0.0, 1.0) }]);
        assert!(matches!(flat_segments(FlatLabel::new(2, 4)), Err(Error::NonPrimitive { .. })));
    }

    #[test]
    fn lattice() {
        let l = flat_lattice(6, 6);
        assert_eq!(l.len(), 25);
        assert_eq!(l.iter().filter(|e| e.label.m > 0 && e.label.n > 0).count(), 23);
        assert_eq!(l[2].label, FlatLabel::new(1, 1));
        assert!(l.iter().any(|e| e.label == FlatLabel::new(2, 3)));
        assert!(l.iter().any(|e| e.label == FlatLabel::new(3, 2)));
        assert!(l.windows(2).all(|w| w[0].length <= w[1].length));
    }
}

//! Bracketed scalar root finding.

use crate::error::{Error, Result};

const MAX_ITER: usize = 300;

/// Brent's method on `[a, b]`; `f(a)` and `f(b)` must differ in sign.
/// Errors raised by `f` propagate unchanged.
pub fn brent<F>(mut f: F, a: f64, b: f64, xtol: f64) -> Result<f64>
where
    F: FnMut(f64) -> Result<f64>,
{
    let (mut a, mut b) = (a, b);
    let mut fa = f(a)?;
    let mut fb = f(b)?;
    if fa == 0.0 {
        return Ok(a);
    }
    if fb == 0.0 {
        return Ok(b);
    }
    if (fa > 0.0) == (fb > 0.0) {
        return Err(Error::Root(format!("no sign change on [{a}, {b}] (f = {fa}, {fb})")));
    }
    let (mut c, mut fc) = (a, fa);
    let mut d = b - a;
    let mut e = d;
    for _ in 0..MAX_ITER {
        if (fb > 0.0) == (fc > 0.0) {
            c = a;
            fc = fa;
            d = b - a;
            e = d;
        }
        if fc.abs() < fb.abs() {
            a = b;
            b = c;
            c = a;
            fa = fb;
            fb = fc;
            fc = fa;
        }
        let tol = 2.0 * f64::EPSILON * b.abs() + 0.5 * xtol;
        let m = 0.5 * (c - b);
        if m.abs() <= tol || fb == 0.0 {
            return Ok(b);
        }
        if e.abs() >= tol && fa.abs() > fb.abs() {
            let s = fb / fa;
            let (mut p, mut q);
            if a == c {
                p = 2.0 * m * s;
                q = 1.0 - s;
            } else {
                let qa = fa / fc;
                let r = fb / fc;
                p = s * (2.0 * m * qa * (qa - r) - (b - a) * (r - 1.0));
                q = (qa - 1.0) * (r - 1.0) * (s - 1.0);
            }
            if p > 0.0 {
                q = -q;
            } else {
                p = -p;
            }
            if 2.0 * p < (3.0 * m * q - (tol * q).abs()).min((e * q).abs()) {
                e = d;
                d = p / q;
            } else {
                d = m;
                e = d;
            }
        } else {
            d = m;
            e = d;
        }
        a = b;
        fa = fb;
        b += if d.abs() > tol { d } else { tol.copysign(m) };
        fb = f(b)?;
    }
    Err(Error::Root(format!("no convergence after {MAX_ITER} iterations near {b}")))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn finds_simple_roots() {
        let x = brent(|x| Ok(x * x - 2.0), 0.0, 2.0, 1e-15).unwrap();
        assert!((x - 2f64.sqrt()).abs() < 1e-14);
        let x = brent(|x| Ok(x.cos() - x), 0.0, 1.0, 1e-15).unwrap();
        assert!((x.cos() - x).abs() < 1e-14);
        let x = brent(|x: f64| Ok((x - 1e-3).powi(3)), -1.0, 1.0, 1e-14).unwrap();
        assert!((x - 1e-3).abs() < 1e-4);
    }

    #[test]
    fn rejects_missing_bracket_and_propagates_errors() {
        assert!(matches!(brent(|x| Ok(x * x + 1.0), -1.0, 1.0, 1e-12), Err(Error::Root(_))));
        let r = brent(|_| Err(Error::Domain("nope".into())), 0.0, 1.0, 1e-12);
        assert!(matches!(r, Err(Error::Domain(_))));
    }
}

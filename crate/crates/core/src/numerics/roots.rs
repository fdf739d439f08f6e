//! Bracketing root finder (Brent) and a bracket expander.

use crate::error::{Error, Result};

/// Brent's method on a sign-changing bracket `[a, b]`.
pub fn brent<F: FnMut(f64) -> f64>(mut f: F, mut a: f64, mut b: f64, xtol: f64, max_iter: usize) -> Result<f64> {
    let mut fa = f(a);
    let mut fb = f(b);
    if fa == 0.0 {
        return Ok(a);
    }
    if fb == 0.0 {
        return Ok(b);
    }
    if fa.signum() == fb.signum() {
        return Err(Error::Convergence(format!("root not bracketed on [{a}, {b}]")));
    }
    let mut c = a;
    let mut fc = fa;
    let mut d = b - a;
    let mut e = d;
    for _ in 0..max_iter {
        if fb.signum() == fc.signum() {
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
                e = m;
            }
        } else {
            d = m;
            e = m;
        }
        a = b;
        fa = fb;
        b += if d.abs() > tol { d } else { tol.copysign(m) };
        fb = f(b);
    }
    Err(Error::Convergence("Brent iteration limit reached".into()))
}

/// Step from `x0` in direction `step` (growing geometrically) until `f`
/// changes sign or `limit` is passed. Returns the bracketing pair.
pub fn expand_bracket<F: FnMut(f64) -> f64>(mut f: F, x0: f64, mut step: f64, limit: f64) -> Option<(f64, f64)> {
    let f0 = f(x0);
    let mut prev = x0;
    let dir = step.signum();
    loop {
        let mut x = prev + step;
        if (x - limit) * dir >= 0.0 {
            x = limit;
        }
        let fx = f(x);
        if fx.is_finite() && fx.signum() != f0.signum() {
            return Some((prev.min(x), prev.max(x)));
        }
        if x == limit {
            return None;
        }
        prev = x;
        step *= 1.6;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn finds_cubic_root() {
        let r = brent(|x| x * x * x - 2.0, 0.0, 2.0, 1e-15, 200).unwrap();
        assert!((r - 2f64.cbrt()).abs() < 1e-14);
    }

    #[test]
    fn rejects_unbracketed() {
        assert!(brent(|x| x * x + 1.0, -1.0, 1.0, 1e-12, 100).is_err());
    }

    #[test]
    fn expands_to_find_sign_change() {
        let (a, b) = expand_bracket(|x| x - 10.0, 0.0, 0.5, 100.0).unwrap();
        assert!(a <= 10.0 && b >= 10.0);
        assert!(expand_bracket(|x| x + 1.0, 0.0, 0.5, 100.0).is_none());
    }
}

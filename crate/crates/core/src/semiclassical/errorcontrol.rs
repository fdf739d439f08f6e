//! Error-control functions of the Airy and parabolic-cylinder
//! approximations.
//!
//! Both are evaluated in regularized form: the full integrand, including
//! the comparison-function term, is integrated from the turning point, so
//! the value is zero there and finite nearby. The integrand behaves like
//! `|x − x_i|^{−1/2}` times a smooth function at a turning point; within a
//! small neighborhood that smooth factor is interpolated from exterior
//! nodes to avoid the 0/0 cancellation.

use crate::numerics::neville;
use crate::numerics::quad::integrate;
use crate::potentials::{Domain, Splitting};
use crate::{Error, Result};

use super::maps::{AiryMap, ZetaMap};
use super::{TurningPointSet, TurningPoints};

/// `q/g − 5g'²/(16g³) + g''/(4g²)`.
fn braces(split: &Splitting, x: f64) -> f64 {
    let j = split.g_jet(x);
    let (g, g1, g2) = (j.value(), j.deriv(1), j.deriv(2));
    split.q(x) / g - 5.0 * g1 * g1 / (16.0 * g * g * g) + g2 / (4.0 * g * g)
}

/// Whether q carries the `−1/(4x²)` pole that keeps ℋ and ℐ finite at a
/// second-order pole of g.
fn pole_cured(split: &Splitting) -> bool {
    let x = 1e-6 * split.spec.length_scale();
    (split.q(x) * x * x + 0.25).abs() < 1e-3
}

/// `∫ j` along the path from `anchor` to `x`, where `j ~ |t|^{−p} K(t)` at
/// the anchor and `ell` is the local length there.
fn control_integral<J: Fn(f64) -> f64>(split: &Splitting, anchor: f64, x: f64, ell: f64, p: f64, j: J) -> f64 {
    if x == anchor {
        return 0.0;
    }
    let dir = (x - anchor).signum();
    let dist = (x - anchor).abs();
    let delta = (0.05 * ell).min(dist);
    let domain = split.spec.domain();
    let mut ts = Vec::new();
    let mut ks = Vec::new();
    for k in 0..5 {
        for s in [-1.0, 1.0] {
            let t = s * 0.05 * ell * (1.0 + 0.25 * k as f64);
            if domain.contains(anchor + t) {
                ts.push(t);
                ks.push(j(anchor + t) * t.abs().powf(p));
            }
        }
    }
    let smooth = |t: f64| neville(&ts, &ks, t);
    let rel = 1e-10;
    let abs = 1e-14;
    let head = if p > 0.0 {
        // t = s², j dt = 2 K(s²) ds for p = 1/2
        integrate(|s: f64| 2.0 * smooth(dir * s * s), 0.0, delta.sqrt(), rel, abs).value
    } else {
        integrate(|t: f64| smooth(dir * t), 0.0, delta, rel, abs).value
    };
    if dist <= delta {
        return head;
    }
    let b0 = anchor + dir * delta;
    let tail = if domain == Domain::HalfLine && dir < 0.0 {
        integrate(
            |u: f64| {
                let t = b0 * (-u).exp();
                j(t) * t
            },
            0.0,
            (b0 / x).ln(),
            rel,
            abs,
        )
        .value
    } else {
        let umax = ((dist - delta) / delta).ln_1p();
        integrate(|u: f64| j(b0 + dir * delta * u.exp_m1()) * delta * u.exp(), 0.0, umax, rel, abs).value
    };
    head + tail
}

fn check_point(split: &Splitting, x: f64) -> Result<Option<f64>> {
    if split.spec.domain() == Domain::HalfLine && x == 0.0 {
        if !pole_cured(split) {
            return Ok(Some(f64::INFINITY));
        }
        return Ok(None);
    }
    if !split.spec.domain().contains(x) {
        return Err(Error::Domain { x });
    }
    Ok(None)
}

/// ℋ at x for the Airy approximation about the simple turning point x0.
/// Returns `+∞` at an uncured pole.
pub fn error_control_h(split: &Splitting, x0: f64, x: f64) -> Result<f64> {
    if let Some(v) = check_point(split, x)? {
        return Ok(v);
    }
    let x = if x == 0.0 { 1e-14 * split.spec.length_scale() } else { x };
    let map = AiryMap::new(split, x0)?;
    // g must keep one sign between x0 and x
    let expect = map.xi(x).signum();
    for i in 1..=32 {
        let t = x0 + (x - x0) * i as f64 / 32.0;
        let g = split.g(t);
        if g.is_finite() && g.signum() != expect && g.abs() > 1e-9 * split.spec.k2_factor() * split.spec.energy_scale()
        {
            return Err(Error::Classification(format!("another turning point lies between {x0} and {x}")));
        }
    }
    let j = |t: f64| {
        let g = split.g(t);
        let xi = map.xi(t).abs();
        g.abs().sqrt() * (5.0 / (16.0 * xi * xi * xi) + g.signum() * braces(split, t))
    };
    Ok(control_integral(split, x0, x, map.airy_length(), 0.5, j))
}

/// ℐ at x for the parabolic-cylinder approximation. Anchored at the nearer
/// real turning point, or at the extreme point for complex or coalesced
/// pairs.
pub fn error_control_i(split: &Splitting, tps: &TurningPointSet, x: f64) -> Result<f64> {
    if let Some(v) = check_point(split, x)? {
        return Ok(v);
    }
    let x = if x == 0.0 { 1e-14 * split.spec.length_scale() } else { x };
    let map = ZetaMap::new(split, tps)?;
    let sigma = if map.is_barrier() { -1.0 } else { 1.0 };
    let j = |t: f64| {
        let g = split.g(t);
        let z = map.locate(t);
        let f = z.f;
        let schwarz = (20.0 * z.zeta * z.zeta - 8.0 * sigma * f) / (16.0 * f * f);
        g.abs().sqrt() * (schwarz / f.abs() + f.signum() * braces(split, t))
    };
    let (anchor, ell, p) = match tps.points {
        TurningPoints::PairReal { x1, x2 } => {
            let mid = tps.x_m.unwrap_or(0.5 * (x1 + x2));
            let a = if x <= mid { x1 } else { x2 };
            (a, 1.0 / split.g_jet(a).deriv(1).abs().cbrt(), 0.5)
        }
        TurningPoints::PairComplexConj { .. } | TurningPoints::Coalesced { .. } => {
            let x_m = tps.x_m.ok_or_else(|| Error::Classification("pair without an extreme point".into()))?;
            (x_m, split.g_jet(x_m).deriv(2).abs().powf(-0.25), 0.0)
        }
        other => return Err(Error::Classification(format!("ℐ needs a pair of turning points, found {other:?}"))),
    };
    Ok(control_integral(split, anchor, x, ell, p, j))
}

/// Coefficient of `ln|x2 − x1|` in the small-separation expansion of ℐ,
/// `[(7f'² − 6ff'')/(32f²) − q]/√|f|` at `Re x1`, with
/// `g = f (x − x1)(x − x2)`. Vanishes when q(Re x_i) matches the extreme
/// rule in the coalescence limit.
pub fn extreme_log_coefficient(split: &Splitting, tps: &TurningPointSet) -> Result<f64> {
    let (at, f0, f1, f2) = match tps.points {
        TurningPoints::PairReal { x1, x2 } => {
            let j = split.g_jet(x1);
            let (g1, g2, g3) = (j.deriv(1), j.deriv(2) / 2.0, j.deriv(3) / 6.0);
            // (f0 + f1 t + f2 t²)(t − d) = g1 t + g2 t² + g3 t³, t = x − x1
            let d = x2 - x1;
            let f0 = -g1 / d;
            let f1 = (f0 - g2) / d;
            let f2 = (f1 - g3) / d;
            (x1, f0, f1, f2)
        }
        TurningPoints::PairComplexConj { x1, .. } => {
            let (a, b2) = (x1.re, x1.im * x1.im);
            let j = split.g_jet(a);
            // g = f (t² + b²), t = x − Re x1
            let f0 = j.value() / b2;
            let f1 = j.deriv(1) / b2;
            let f2 = (j.deriv(2) / 2.0 - f0) / b2;
            (a, f0, f1, f2)
        }
        other => return Err(Error::Classification(format!("expected a pair, found {other:?}"))),
    };
    let (fp, fpp) = (f1, 2.0 * f2);
    Ok(((7.0 * fp * fp - 6.0 * f0 * fpp) / (32.0 * f0 * f0) - split.q(at)) / f0.abs().sqrt())
}

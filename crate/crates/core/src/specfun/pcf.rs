//! Parabolic cylinder functions.
//!
//! `U(a,z)` and its companion `Ū(a,z)` solve `w'' = (z²/4 + a) w`; `W(a,z)`
//! solves `w'' = (a − z²/4) w`. Values near the origin come from the
//! Maclaurin series seeded with the closed-form values at z = 0. Away from
//! it each solution is continued with the Taylor propagator in its stable
//! direction: recessive solutions inward from a large-|z| asymptotic start,
//! dominant ones outward from the series. `Ū` is taken as the standard
//! companion `V(a,z)`, whose Wronskian with `U` is `√(2/π)`.

use super::gamma::{lgamma_sign, ln_gamma_complex};
use super::taylor::{propagate, taylor_step, QuadraticCoeff, ScaledPair};
use super::{Regime, SpecFunValue};
use crate::error::{Error, Result};
use crate::numerics::ode::dopri5;
use num_complex::Complex64;
use std::f64::consts::{LN_2, PI};

/// Largest supported |a|.
pub const MAX_ABS_A: f64 = 1e3;

/// `m · exp(l)`.
#[derive(Clone, Copy, Debug)]
struct LogNum {
    m: f64,
    l: f64,
}

impl LogNum {
    const ZERO: LogNum = LogNum { m: 0.0, l: 0.0 };

    fn new(ln_abs: f64, sign: f64) -> Self {
        if sign == 0.0 || ln_abs == f64::NEG_INFINITY {
            LogNum::ZERO
        } else {
            LogNum { m: sign, l: ln_abs }
        }
    }

    fn mul(self, o: LogNum) -> LogNum {
        if self.m == 0.0 || o.m == 0.0 {
            return LogNum::ZERO;
        }
        LogNum { m: self.m * o.m, l: self.l + o.l }
    }

    fn scale(self, s: f64) -> LogNum {
        if s == 0.0 {
            LogNum::ZERO
        } else {
            LogNum { m: self.m * s, l: self.l }
        }
    }

    fn add(self, o: LogNum) -> LogNum {
        if self.m == 0.0 {
            return o;
        }
        if o.m == 0.0 {
            return self;
        }
        let l = self.l.max(o.l);
        LogNum { m: self.m * (self.l - l).exp() + o.m * (o.l - l).exp(), l }
    }
}

fn check(a: f64, z: f64) -> Result<()> {
    if !a.is_finite() || !z.is_finite() {
        return Err(Error::Range(format!("non-finite argument a = {a}, z = {z}")));
    }
    if a.abs() > MAX_ABS_A {
        return Err(Error::Range(format!("|a| = {} exceeds supported {MAX_ABS_A}", a.abs())));
    }
    Ok(())
}

fn weber(a: f64) -> QuadraticCoeff {
    QuadraticCoeff { p0: a, p1: 0.0, p2: 0.25 }
}

fn inverted(a: f64) -> QuadraticCoeff {
    QuadraticCoeff { p0: a, p1: 0.0, p2: -0.25 }
}

fn series_limit(a: f64) -> f64 {
    2.5f64.min(2.5 / a.abs().sqrt())
}

/// `1/Γ(x)` as a log-number.
fn rgamma(x: f64) -> LogNum {
    let (l, s) = lgamma_sign(x);
    LogNum::new(-l, s)
}

fn pair_from(w: LogNum, dw: LogNum) -> ScaledPair {
    let l = if w.m == 0.0 {
        dw.l
    } else if dw.m == 0.0 {
        w.l
    } else {
        w.l.max(dw.l)
    };
    ScaledPair { w: w.m * (w.l - l).exp(), dw: dw.m * (dw.l - l).exp(), log_scale: l, rel_err: 4.0 * f64::EPSILON }
}

/// `(U(a,0), U'(a,0))`.
fn u_zero(a: f64) -> (LogNum, LogNum) {
    let ln_sqrt_pi = 0.5 * PI.ln();
    let u0 = LogNum::new(ln_sqrt_pi - (0.5 * a + 0.25) * LN_2, 1.0).mul(rgamma(0.75 + 0.5 * a));
    let du0 = LogNum::new(ln_sqrt_pi - (0.5 * a - 0.25) * LN_2, -1.0).mul(rgamma(0.25 + 0.5 * a));
    (u0, du0)
}

/// `(V(a,0), V'(a,0))`.
fn v_zero(a: f64) -> (LogNum, LogNum) {
    let r1 = rgamma(0.75 - 0.5 * a);
    let r2 = rgamma(0.25 - 0.5 * a);
    let v0 = LogNum::new(PI.ln() + (0.5 * a + 0.25) * LN_2, 1.0).mul(r1).mul(r1).mul(rgamma(0.25 + 0.5 * a));
    let dv0 = LogNum::new(PI.ln() + (0.5 * a + 0.75) * LN_2, 1.0).mul(r2).mul(r2).mul(rgamma(0.75 + 0.5 * a));
    (v0, dv0)
}

fn maclaurin(eq: &QuadraticCoeff, start: ScaledPair, z: f64) -> ScaledPair {
    let (w, dw, mag) = taylor_step(eq, 0.0, start.w, start.dw, z);
    let size = w.abs().max(dw.abs()).max(1e-300);
    ScaledPair { w, dw, log_scale: start.log_scale, rel_err: start.rel_err + 4.0 * f64::EPSILON * (1.0 + mag / size) }
}

/// Real large-z expansion `Σ t_s` with `t_{s+1} = t_s · ratio(s)`; returns
/// the sum, the derivative sum with factor `dfac(s)`, and a relative error,
/// or `None` when the expansion diverges before reaching 1e-17.
fn real_asymptotic<R: Fn(f64) -> f64, D: Fn(f64) -> f64>(ratio: R, dfac: D) -> Option<(f64, f64, f64)> {
    let mut t = 1.0f64;
    let mut w = 0.0;
    let mut dw = 0.0;
    let mut tmax: f64 = 1.0;
    let mut falling = false;
    for s in 0..2000 {
        let sf = s as f64;
        w += t;
        dw += t * dfac(sf);
        tmax = tmax.max(t.abs());
        let next = t * ratio(sf);
        if next == 0.0 || next.abs() < 1e-17 * w.abs() {
            let rel = next.abs() / w.abs() + 4.0 * f64::EPSILON * tmax / w.abs();
            return Some((w, dw, rel));
        }
        if next.abs() < t.abs() {
            falling = true;
        } else if falling {
            return None;
        }
        t = next;
    }
    None
}

fn u_asymptotic(a: f64, z: f64) -> Option<ScaledPair> {
    let z2 = z * z;
    let (w, dw, rel) = real_asymptotic(
        |s| -(0.5 + a + 2.0 * s) * (1.5 + a + 2.0 * s) / ((s + 1.0) * 2.0 * z2),
        |s| -0.5 * z - (a + 0.5 + 2.0 * s) / z,
    )?;
    if rel > 1e-14 {
        return None;
    }
    Some(ScaledPair { w, dw, log_scale: -0.25 * z2 - (a + 0.5) * z.ln(), rel_err: rel })
}

fn v_asymptotic(a: f64, z: f64) -> Option<ScaledPair> {
    let z2 = z * z;
    let (w, dw, rel) = real_asymptotic(
        |s| (0.5 - a + 2.0 * s) * (1.5 - a + 2.0 * s) / ((s + 1.0) * 2.0 * z2),
        |s| 0.5 * z + (a - 0.5 - 2.0 * s) / z,
    )?;
    if rel > 1e-14 {
        return None;
    }
    let pre = (2.0 / PI).sqrt();
    Some(ScaledPair { w: pre * w, dw: pre * dw, log_scale: 0.25 * z2 + (a - 0.5) * z.ln(), rel_err: rel })
}

/// Smallest start point (from a fixed ladder) where `f` converges.
fn asymptotic_start<F: Fn(f64) -> Option<ScaledPair>>(a: f64, f: F) -> (f64, ScaledPair) {
    let mut z = 9.5f64.max(2.0 * a.abs().sqrt() + 6.0);
    loop {
        if let Some(p) = f(z) {
            return (z, p);
        }
        z *= 1.2;
    }
}

fn u_positive(a: f64, x: f64) -> (ScaledPair, Regime) {
    let eq = weber(a);
    if x <= series_limit(a) {
        let (u0, du0) = u_zero(a);
        return (maclaurin(&eq, pair_from(u0, du0), x), Regime::Series);
    }
    let (za, start) = asymptotic_start(a, |z| u_asymptotic(a, z));
    if x >= za {
        if let Some(p) = u_asymptotic(a, x) {
            return (p, Regime::Asymptotic);
        }
    }
    (propagate(&eq, za, start, x), Regime::OdeContinued)
}

fn v_positive(a: f64, x: f64) -> (ScaledPair, Regime) {
    let eq = weber(a);
    let xs = series_limit(a);
    let (v0, dv0) = v_zero(a);
    let start = pair_from(v0, dv0);
    if x <= xs {
        return (maclaurin(&eq, start, x), Regime::Series);
    }
    let (za, _) = asymptotic_start(a, |z| v_asymptotic(a, z));
    if x >= za {
        if let Some(p) = v_asymptotic(a, x) {
            return (p, Regime::Asymptotic);
        }
    }
    (propagate(&eq, xs, maclaurin(&eq, start, xs), x), Regime::OdeContinued)
}

fn to_lognums(p: &ScaledPair) -> (LogNum, LogNum) {
    (LogNum { m: p.w, l: p.log_scale }, LogNum { m: p.dw, l: p.log_scale })
}

/// Value and derivative at `-x` from the basis `U(a,x), V(a,x)`.
fn reflect(a: f64, x: f64, alpha: LogNum, beta: LogNum) -> (ScaledPair, Regime) {
    let (pu, ru) = u_positive(a, x);
    let (pv, rv) = v_positive(a, x);
    let (u, du) = to_lognums(&pu);
    let (v, dv) = to_lognums(&pv);
    let w = alpha.mul(u).add(beta.mul(v));
    let dw = alpha.mul(du).add(beta.mul(dv)).scale(-1.0);
    let mut p = pair_from(w, dw);
    p.rel_err = pu.rel_err + pv.rel_err;
    let regime =
        if ru == Regime::Asymptotic && rv == Regime::Asymptotic { Regime::Asymptotic } else { Regime::OdeContinued };
    (p, regime)
}

/// `sin(πa)` with exact zeros at the integers.
fn sin_pi(a: f64) -> f64 {
    let r = a % 2.0;
    if r == r.round() {
        0.0
    } else {
        (PI * r).sin()
    }
}

/// `cos(πa)` with exact zeros at the half-integers.
fn cos_pi(a: f64) -> f64 {
    let r = a % 2.0;
    if (r - 0.5) == (r - 0.5).round() {
        0.0
    } else {
        (PI * r).cos()
    }
}

fn u_pair(a: f64, z: f64) -> (ScaledPair, Regime) {
    if z >= 0.0 {
        return u_positive(a, z);
    }
    let x = -z;
    if x <= series_limit(a) {
        let (u0, du0) = u_zero(a);
        return (maclaurin(&weber(a), pair_from(u0, du0), z), Regime::Series);
    }
    let alpha = LogNum::new(0.0, -sin_pi(a));
    let beta = LogNum::new(PI.ln(), 1.0).mul(rgamma(0.5 + a));
    reflect(a, x, alpha, beta)
}

fn v_pair(a: f64, z: f64) -> (ScaledPair, Regime) {
    if z >= 0.0 {
        return v_positive(a, z);
    }
    let x = -z;
    if x <= series_limit(a) {
        let (v0, dv0) = v_zero(a);
        return (maclaurin(&weber(a), pair_from(v0, dv0), z), Regime::Series);
    }
    let alpha = LogNum::new(0.0, cos_pi(a)).mul(rgamma(0.5 - a));
    let beta = LogNum::new(0.0, sin_pi(a));
    reflect(a, x, alpha, beta)
}

/// `ln k` with `k = √(1+e^{2πa}) − e^{πa}`.
fn ln_k(a: f64) -> f64 {
    let pa = PI * a;
    if pa > 0.0 {
        -pa - (1.0 + (1.0 + (-2.0 * pa).exp()).sqrt()).ln()
    } else {
        let e = pa.exp();
        -((1.0 + e * e).sqrt() + e).ln()
    }
}

/// `W(a,0)` and `W'(a,0)`.
fn w_zero(a: f64) -> (f64, f64) {
    let lg1 = ln_gamma_complex(Complex64::new(0.25, 0.5 * a)).re;
    let lg3 = ln_gamma_complex(Complex64::new(0.75, 0.5 * a)).re;
    let c1 = (-0.75 * LN_2 + 0.5 * (lg1 - lg3)).exp();
    let c2 = (-0.75 * LN_2 + 0.5 * (LN_2 + lg3 - lg1)).exp();
    (c1, -c2)
}

/// Large-x forms of `W(a,x)` and `W(a,-x)` (derivatives with respect to the
/// function's own argument).
fn w_asymptotic(a: f64, x: f64) -> Option<(ScaledPair, ScaledPair)> {
    let x2 = x * x;
    let mut t = Complex64::new(1.0, 0.0);
    let mut s = Complex64::new(0.0, 0.0);
    let mut ds = Complex64::new(0.0, 0.0);
    let mut tmax: f64 = 1.0;
    let mut falling = false;
    let mut rel = f64::INFINITY;
    for k in 0..2000 {
        let kf = k as f64;
        s += t;
        ds += t * (-2.0 * kf / x);
        tmax = tmax.max(t.norm());
        let mu = Complex64::new(0.5 + 2.0 * kf, a) * Complex64::new(1.5 + 2.0 * kf, a);
        let next = t * mu * Complex64::new(0.0, -1.0) / ((kf + 1.0) * 2.0 * x2);
        if next.norm() < 1e-17 * s.norm() {
            rel = next.norm() / s.norm() + 4.0 * f64::EPSILON * tmax / s.norm();
            break;
        }
        if next.norm() < t.norm() {
            falling = true;
        } else if falling {
            return None;
        }
        t = next;
    }
    if rel > 1e-14 {
        return None;
    }
    let phi2 = ln_gamma_complex(Complex64::new(0.5, a)).im;
    let omega = 0.25 * x2 - a * x.ln() + 0.25 * PI + 0.5 * phi2;
    let eiw = Complex64::from_polar(1.0, omega);
    let amp = (2.0 / x).sqrt();
    // E = amp e^{iω} S,  E' = E (−1/(2x) + iω') + amp e^{iω} S'
    let e = eiw * s * amp;
    let de = e * Complex64::new(-0.5 / x, 0.5 * x - a / x) + eiw * ds * amp;
    let lk = ln_k(a);
    let plus = ScaledPair { w: e.re, dw: de.re, log_scale: 0.5 * lk, rel_err: rel };
    // W(a,−x) = k^{-1/2} Im E, d/dz W(a,z) at z = −x is −k^{-1/2} Im E'
    let minus = ScaledPair { w: e.im, dw: -de.im, log_scale: -0.5 * lk, rel_err: rel };
    Some((plus, minus))
}

fn w_pair_inner(a: f64, z: f64) -> (ScaledPair, Regime) {
    let eq = inverted(a);
    let (w0, dw0) = w_zero(a);
    let start = ScaledPair::new(w0, dw0);
    let xs = series_limit(a);
    if z.abs() <= xs {
        return (maclaurin(&eq, start, z), Regime::Series);
    }
    let (za, (plus, minus)) = {
        let mut zz = 9.5f64.max(2.0 * a.abs().sqrt() + 6.0);
        loop {
            if let Some(p) = w_asymptotic(a, zz) {
                break (zz, p);
            }
            zz *= 1.2;
        }
    };
    if z.abs() >= za {
        if let Some((p, m)) = w_asymptotic(a, z.abs()) {
            return (if z > 0.0 { p } else { m }, Regime::Asymptotic);
        }
    }
    if z > 0.0 && a > 0.5 {
        // recessive through the barrier: come in from the oscillatory side
        return (propagate(&eq, za, plus, z), Regime::OdeContinued);
    }
    let _ = minus;
    let from = xs.copysign(z);
    (propagate(&eq, from, maclaurin(&eq, start, from), z), Regime::OdeContinued)
}

/// `U(a,z)`.
pub fn pcf_u(a: f64, z: f64) -> Result<SpecFunValue> {
    Ok(pcf_u_pair(a, z)?.0)
}

/// `U(a,z)` and `dU/dz`.
pub fn pcf_u_pair(a: f64, z: f64) -> Result<(SpecFunValue, SpecFunValue)> {
    check(a, z)?;
    let (p, r) = u_pair(a, z);
    Ok((SpecFunValue::from_pair(&p, false, r), SpecFunValue::from_pair(&p, true, r)))
}

/// `Ū(a,z)`, the companion solution `V(a,z)`.
pub fn pcf_ubar(a: f64, z: f64) -> Result<SpecFunValue> {
    Ok(pcf_ubar_pair(a, z)?.0)
}

pub fn pcf_ubar_pair(a: f64, z: f64) -> Result<(SpecFunValue, SpecFunValue)> {
    check(a, z)?;
    let (p, r) = v_pair(a, z);
    Ok((SpecFunValue::from_pair(&p, false, r), SpecFunValue::from_pair(&p, true, r)))
}

/// `W(a,z)`.
pub fn pcf_w(a: f64, z: f64) -> Result<SpecFunValue> {
    Ok(pcf_w_pair(a, z)?.0)
}

/// `W(a,−z)`.
pub fn pcf_w_neg(a: f64, z: f64) -> Result<SpecFunValue> {
    Ok(pcf_w_pair(a, -z)?.0)
}

/// `W(a,z)` and `dW/dz`.
pub fn pcf_w_pair(a: f64, z: f64) -> Result<(SpecFunValue, SpecFunValue)> {
    check(a, z)?;
    let (p, r) = w_pair_inner(a, z);
    Ok((SpecFunValue::from_pair(&p, false, r), SpecFunValue::from_pair(&p, true, r)))
}

fn oracle(eq: QuadraticCoeff, z0: f64, w0: f64, dw0: f64, z1: f64) -> Result<(f64, f64)> {
    if ![z0, w0, dw0, z1].iter().all(|v| v.is_finite()) {
        return Err(Error::Range("non-finite oracle input".into()));
    }
    if (z1 - z0).abs() > 50.0 {
        return Err(Error::Range(format!("|z1 - z0| = {} exceeds 50", (z1 - z0).abs())));
    }
    let scale = w0.abs().max(dw0.abs()).max(1e-300);
    let (y, _) = dopri5(|z, y: &[f64; 2]| [y[1], eq.at(z) * y[0]], z0, [w0, dw0], z1, 1e-12, 1e-14 * scale, 1e-3)?;
    Ok((y[0], y[1]))
}

/// Integrate `w'' = (z²/4 + a) w` from `z0` to `z1` with DP5(4) at relative
/// tolerance 1e-12. Test oracle for the `U`-type functions.
pub fn ode_comparison_oracle(a: f64, z0: f64, w0: f64, dw0: f64, z1: f64) -> Result<(f64, f64)> {
    oracle(weber(a), z0, w0, dw0, z1)
}

/// Same oracle for `w'' = (a − z²/4) w`, the equation of `W`.
pub fn ode_comparison_oracle_w(a: f64, z0: f64, w0: f64, dw0: f64, z1: f64) -> Result<(f64, f64)> {
    oracle(inverted(a), z0, w0, dw0, z1)
}

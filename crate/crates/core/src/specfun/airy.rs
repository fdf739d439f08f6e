//! Airy functions Ai, Bi and their derivatives on the real line.
//!
//! Maclaurin series for |x| ≤ 4.5, Taylor continuation of the Airy equation
//! for 4.5 < |x| < 10, asymptotic expansions beyond. The asymptotic series
//! at |x| = 4.5 only reaches ~1e-6 relative accuracy, hence the middle band.

use super::taylor::{propagate, taylor_step, QuadraticCoeff, ScaledPair};
use super::{Regime, SpecFunValue};
use crate::error::{Error, Result};
use std::f64::consts::{FRAC_PI_4, PI};

const AI0: f64 = 0.355_028_053_887_817_2;
const DAI0: f64 = -0.258_819_403_792_806_8;
const BI0: f64 = 0.614_926_627_446_000_7;
const DBI0: f64 = 0.448_288_357_353_826_4;

const SERIES_LIMIT: f64 = 4.5;
const ASYMPTOTIC_LIMIT: f64 = 10.0;

const AIRY: QuadraticCoeff = QuadraticCoeff { p0: 0.0, p1: 1.0, p2: 0.0 };

#[derive(Clone, Copy, PartialEq, Eq)]
enum Which {
    Ai,
    Bi,
}

fn u_coeffs(n: usize) -> Vec<(f64, f64)> {
    let mut out = Vec::with_capacity(n);
    let mut u = 1.0;
    out.push((1.0, 1.0));
    for k in 1..n {
        let kf = k as f64;
        u *= (6.0 * kf - 5.0) * (6.0 * kf - 3.0) * (6.0 * kf - 1.0) / (216.0 * kf * (2.0 * kf - 1.0));
        let v = -(6.0 * kf + 1.0) / (6.0 * kf - 1.0) * u;
        out.push((u, v));
    }
    out
}

/// Sum `Σ c_k s^k` truncated at the smallest term; returns (sum, last term).
fn asymptotic_sum<I: Iterator<Item = f64>>(coeffs: I, s: f64) -> (f64, f64) {
    let mut sum = 0.0;
    let mut p = 1.0;
    let mut prev = f64::INFINITY;
    let mut last = 0.0;
    for c in coeffs {
        let t = c * p;
        if t.abs() > prev {
            break;
        }
        sum += t;
        last = t.abs();
        prev = t.abs();
        if last < 1e-17 * sum.abs() {
            break;
        }
        p *= s;
    }
    (sum, last)
}

/// Positive-argument asymptotics: (mantissa pair, log scale, rel error).
fn asymptotic_positive(x: f64, which: Which) -> ScaledPair {
    let zeta = 2.0 / 3.0 * x.powf(1.5);
    let uv = u_coeffs(60);
    let sgn = if which == Which::Ai { -1.0 } else { 1.0 };
    let (su, eu) = asymptotic_sum(uv.iter().map(|c| c.0), sgn / zeta);
    let (sv, ev) = asymptotic_sum(uv.iter().map(|c| c.1), sgn / zeta);
    let x4 = x.powf(0.25);
    let sp = PI.sqrt();
    let (w, dw, log_scale) = match which {
        Which::Ai => (su / (2.0 * sp * x4), -x4 * sv / (2.0 * sp), -zeta),
        Which::Bi => (su / (sp * x4), x4 * sv / sp, zeta),
    };
    ScaledPair { w, dw, log_scale, rel_err: eu.max(ev) + 4.0 * f64::EPSILON }
}

fn asymptotic_negative(x: f64, which: Which) -> ScaledPair {
    let y = -x;
    let zeta = 2.0 / 3.0 * y.powf(1.5);
    let uv = u_coeffs(60);
    let s = -1.0 / (zeta * zeta);
    let (ue, e1) = asymptotic_sum(uv.iter().step_by(2).map(|c| c.0), s);
    let (uo, e2) = asymptotic_sum(uv.iter().skip(1).step_by(2).map(|c| c.0), s);
    let (ve, e3) = asymptotic_sum(uv.iter().step_by(2).map(|c| c.1), s);
    let (vo, e4) = asymptotic_sum(uv.iter().skip(1).step_by(2).map(|c| c.1), s);
    let (uo, vo) = (uo / zeta, vo / zeta);
    let th = zeta - FRAC_PI_4;
    let (sn, cs) = th.sin_cos();
    let y4 = y.powf(0.25);
    let sp = PI.sqrt();
    let (w, dw) = match which {
        Which::Ai => ((cs * ue + sn * uo) / (sp * y4), y4 * (sn * ve - cs * vo) / sp),
        Which::Bi => ((-sn * ue + cs * uo) / (sp * y4), y4 * (cs * ve + sn * vo) / sp),
    };
    let err = e1.max(e2).max(e3).max(e4) + 8.0 * f64::EPSILON * (1.0 + zeta * f64::EPSILON);
    ScaledPair { w, dw, log_scale: 0.0, rel_err: err }
}

fn series(x: f64, which: Which) -> ScaledPair {
    let (w0, dw0) = match which {
        Which::Ai => (AI0, DAI0),
        Which::Bi => (BI0, DBI0),
    };
    let (w, dw, mag) = taylor_step(&AIRY, 0.0, w0, dw0, x);
    let size = w.abs().max(dw.abs()).max(1e-300);
    ScaledPair { w, dw, log_scale: 0.0, rel_err: 4.0 * f64::EPSILON * (1.0 + mag / size) }
}

fn pair(x: f64, which: Which) -> (ScaledPair, Regime) {
    if x.abs() <= SERIES_LIMIT {
        return (series(x, which), Regime::Series);
    }
    if x >= ASYMPTOTIC_LIMIT {
        return (asymptotic_positive(x, which), Regime::Asymptotic);
    }
    if x <= -ASYMPTOTIC_LIMIT {
        return (asymptotic_negative(x, which), Regime::Asymptotic);
    }
    let p = match (which, x > 0.0) {
        // recessive: continue inward from the asymptotic side
        (Which::Ai, true) => propagate(&AIRY, ASYMPTOTIC_LIMIT, asymptotic_positive(ASYMPTOTIC_LIMIT, which), x),
        (_, true) => propagate(&AIRY, SERIES_LIMIT, series(SERIES_LIMIT, which), x),
        (_, false) => propagate(&AIRY, -SERIES_LIMIT, series(-SERIES_LIMIT, which), x),
    };
    (p, Regime::OdeContinued)
}

fn to_value(derivative: bool, p: &ScaledPair, regime: Regime) -> SpecFunValue {
    SpecFunValue::from_pair(p, derivative, regime)
}

fn check(x: f64) -> Result<()> {
    if x.is_finite() {
        Ok(())
    } else {
        Err(Error::Range(format!("Airy argument {x} is not finite")))
    }
}

fn unscaled_bi(v: SpecFunValue) -> Result<SpecFunValue> {
    if v.log_scale > 700.0 {
        Err(Error::Overflow { scaled: v.value, log_scale: v.log_scale })
    } else {
        Ok(v)
    }
}

pub fn airy_ai(x: f64) -> Result<SpecFunValue> {
    check(x)?;
    let (p, r) = pair(x, Which::Ai);
    Ok(to_value(false, &p, r))
}

pub fn airy_ai_prime(x: f64) -> Result<SpecFunValue> {
    check(x)?;
    let (p, r) = pair(x, Which::Ai);
    Ok(to_value(true, &p, r))
}

/// Bi; errors with [`Error::Overflow`] once the value leaves f64 range.
pub fn airy_bi(x: f64) -> Result<SpecFunValue> {
    check(x)?;
    let (p, r) = pair(x, Which::Bi);
    unscaled_bi(to_value(false, &p, r))
}

pub fn airy_bi_prime(x: f64) -> Result<SpecFunValue> {
    check(x)?;
    let (p, r) = pair(x, Which::Bi);
    unscaled_bi(to_value(true, &p, r))
}

/// `Ai(x)` and `Ai'(x)` together, scaled by `exp(zeta)` for x > 0, where
/// `zeta = (2/3) x^{3/2}`.
pub fn airy_ai_scaled(x: f64) -> Result<(f64, f64)> {
    check(x)?;
    let (p, _) = pair(x, Which::Ai);
    let shift = if x > 0.0 { 2.0 / 3.0 * x.powf(1.5) } else { 0.0 };
    let f = (p.log_scale + shift).exp();
    Ok((p.w * f, p.dw * f))
}

/// `Bi(x)` and `Bi'(x)` scaled by `exp(-zeta)` for x > 0.
pub fn airy_bi_scaled(x: f64) -> Result<(f64, f64)> {
    check(x)?;
    let (p, _) = pair(x, Which::Bi);
    let shift = if x > 0.0 { -2.0 / 3.0 * x.powf(1.5) } else { 0.0 };
    let f = (p.log_scale + shift).exp();
    Ok((p.w * f, p.dw * f))
}

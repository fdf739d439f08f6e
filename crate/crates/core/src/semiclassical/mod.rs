//! Turning points, phase integrals, ζ₀², the ξ/ζ maps, error-control
//! functions, quantization and transmission.

mod errorcontrol;
mod maps;
mod phase;
mod quantize;
mod transmit;

pub use errorcontrol::{error_control_h, error_control_i, extreme_log_coefficient};
pub use maps::{xi_of_x, zeta_of_x, AiryMap, ZetaMap, ZetaPoint};
pub use phase::{phase_integral_complex, phase_integral_real, zeta0_squared, PhaseIntegral, PhasePath, PhaseSign};
pub use quantize::{
    allowed_phase, exact_levels, solve_level, solve_spectrum_improved, solve_spectrum_wkb, QuantizationRule,
    SpectrumEntry, SpectrumMethod, SpectrumResult,
};
pub use transmit::{
    transmission_curve, transmission_improved, transmission_wkb, TransmissionCurve, TransmissionMethod,
    TransmissionSample,
};

use num_complex::Complex64;
use serde::Serialize;

use crate::numerics::roots::brent;
use crate::potentials::{Domain, ExtremeKind, Splitting};
use crate::{Error, Result};

/// Classified zeros of g.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(tag = "type", rename_all = "kebab-case")]
pub enum TurningPoints {
    /// g has no zero; `allowed` tells whether g < 0 everywhere.
    None {
        allowed: bool,
    },
    SingleReal {
        x0: f64,
    },
    PairReal {
        x1: f64,
        x2: f64,
    },
    /// Two turning points closer than the tie-break distance.
    Coalesced {
        x: f64,
    },
    /// `x1 = conj(x2)`, `Im x1 < 0`.
    PairComplexConj {
        x1: Complex64,
        x2: Complex64,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct TurningPointSet {
    pub points: TurningPoints,
    pub x_m: Option<f64>,
    pub extreme: Option<ExtremeKind>,
}

impl TurningPointSet {
    /// Whether the pair encloses a well (g < 0 between the points).
    pub fn is_well(&self) -> bool {
        self.extreme == Some(ExtremeKind::Minimum)
    }

    pub fn is_barrier(&self) -> bool {
        self.extreme == Some(ExtremeKind::Maximum)
    }
}

/// Separation below which two real turning points count as coalesced, in
/// units of the natural length.
const COALESCE: f64 = 1e-8;

/// Locate and classify the zeros of g.
pub fn find_turning_points(split: &Splitting) -> Result<TurningPointSet> {
    let extreme = split.extreme_point()?;
    let l = split.spec.length_scale();
    let g_scale = split.spec.k2_factor() * split.spec.energy_scale();
    let Some((x_m, kind)) = extreme else {
        return Ok(TurningPointSet { points: monotone_points(split)?, x_m: None, extreme: None });
    };
    let g_m = split.g(x_m);
    let set = |points| Ok(TurningPointSet { points, x_m: Some(x_m), extreme: Some(kind) });
    if g_m.abs() <= 1e-13 * g_scale {
        return set(TurningPoints::Coalesced { x: x_m });
    }
    let inside_positive = kind == ExtremeKind::Maximum;
    if (g_m > 0.0) != inside_positive {
        // g keeps the sign of its extreme value unless the tails cross zero
        let left = search_side(split, x_m, -1.0, inside_positive)?;
        let right = search_side(split, x_m, 1.0, inside_positive)?;
        match (left, right) {
            (Some(a), Some(b)) if kind == ExtremeKind::Maximum => {
                // barrier tails crossing back: over-barrier energy above a
                // barrier whose asymptotes exceed E
                return Err(Error::UnsupportedTopology(format!("zeros at {a} and {b} outside an over-top barrier")));
            }
            _ => {}
        }
        if kind == ExtremeKind::Minimum {
            return set(TurningPoints::None { allowed: false });
        }
        return set(complex_pair(split, x_m)?);
    }
    let want_positive = !inside_positive;
    let left = search_side(split, x_m, -1.0, want_positive)?;
    let right = search_side(split, x_m, 1.0, want_positive)?;
    let points = match (left, right) {
        (Some(x1), Some(x2)) if (x2 - x1).abs() < COALESCE * l => TurningPoints::Coalesced { x: x_m },
        (Some(x1), Some(x2)) => TurningPoints::PairReal { x1, x2 },
        (Some(x0), None) | (None, Some(x0)) => TurningPoints::SingleReal { x0 },
        (None, None) => TurningPoints::None { allowed: g_m < 0.0 },
    };
    set(points)
}

/// Zero of g on one side of `from` where g takes the sign `want_positive`,
/// or `None` if g keeps its sign out to the edge of the search range.
pub(crate) fn search_side(split: &Splitting, from: f64, dir: f64, want_positive: bool) -> Result<Option<f64>> {
    let l = split.spec.length_scale();
    let half = split.spec.domain() == Domain::HalfLine;
    let k2 = split.spec.k2_factor();
    let hit = |x: f64| {
        let g = split.g(x);
        // round-off floor of g = k2 (U − E)
        let noise = 64.0 * f64::EPSILON * k2 * (split.energy.abs() + split.effective_potential(x).abs());
        if want_positive {
            g > noise
        } else {
            g < -noise
        }
    };
    let mut prev = from;
    for k in 0..200 {
        let x = if half && dir < 0.0 { from * 0.5f64.powi(k + 1) } else { from + dir * l * 0.125 * 1.5f64.powi(k) };
        if (half && x < 1e-200 * l) || x.abs() > 1e12 * l {
            return Ok(None);
        }
        let g = split.g(x);
        if !g.is_finite() {
            return Ok(None);
        }
        if hit(x) {
            let (a, b) = if prev < x { (prev, x) } else { (x, prev) };
            let tol = 1e-15 * a.abs().max(b.abs()).max(if half { 0.0 } else { l });
            return brent(|t| split.g(t), a, b, tol.max(f64::MIN_POSITIVE), 300).map(Some);
        }
        prev = x;
    }
    Ok(None)
}

/// Turning points of a g without an interior extreme: at most one zero.
fn monotone_points(split: &Splitting) -> Result<TurningPoints> {
    let l = split.spec.length_scale();
    let grid: Vec<f64> = match split.spec.domain() {
        Domain::HalfLine => (0..=1400).map(|i| l * 1e-6 * 10f64.powf(i as f64 / 100.0)).collect(),
        Domain::FullLine => (0..=1200).map(|i| l * 0.2 * ((i as f64 - 600.0) / 100.0).sinh()).collect(),
    };
    let vals: Vec<f64> = grid.iter().map(|&x| split.g(x)).collect();
    let mut zeros = Vec::new();
    // (x, g) of the previous finite nonzero sample
    let mut prev: Option<(usize, f64)> = None;
    for i in 0..grid.len() {
        let v = vals[i];
        if !v.is_finite() || v == 0.0 {
            continue;
        }
        if let Some((j, w)) = prev {
            if w * v < 0.0 {
                let z = if j + 2 == i && vals[j + 1] == 0.0 {
                    grid[j + 1]
                } else {
                    brent(|t| split.g(t), grid[j], grid[i], 1e-15 * grid[j].abs().max(l * 1e-300), 300)?
                };
                zeros.push(z);
            }
        }
        prev = Some((i, v));
    }
    match zeros.len() {
        0 => {
            let mid = vals.iter().copied().find(|v| v.is_finite() && *v != 0.0).unwrap_or(1.0);
            Ok(TurningPoints::None { allowed: mid < 0.0 })
        }
        1 => Ok(TurningPoints::SingleReal { x0: zeros[0] }),
        n => Err(Error::UnsupportedTopology(format!("{n} sign changes of g"))),
    }
}

/// Complex-conjugate zeros over a barrier top, continued in energy from the
/// top where the quadratic estimate `x_m ± i√(2g_m/|g''|)` is accurate.
fn complex_pair(split: &Splitting, x_m: f64) -> Result<TurningPoints> {
    if split.g_complex(Complex64::new(x_m, 0.0)).is_none() {
        return Err(Error::Unsupported("complex turning points need an analytic catalog potential".into()));
    }
    let k2 = split.spec.k2_factor();
    let top = split.effective_potential(x_m);
    let excess = split.energy - top;
    let g2 = split.g_jet(x_m).deriv(2).abs();
    let l = split.spec.length_scale();
    // start where the quadratic estimate holds, then double the excess
    let start = excess.min(1e-4 * split.spec.energy_scale());
    let steps = (excess / start).log2().ceil().max(0.0) as i32;
    let mut z = Complex64::new(x_m, 0.0);
    let mut prev: Option<(f64, Complex64)> = None;
    let mut e_prev = top;
    for k in 0..=steps {
        let e = if k == steps { split.energy } else { top + start * 2f64.powi(k) };
        let s = split.with_energy(e);
        let guess = match prev {
            None => Complex64::new(x_m, (2.0 * k2 * (e - top) / g2).sqrt()),
            // linear extrapolation in E from the last two roots
            Some((e0, z0)) => z + (z - z0) * ((e - e_prev) / (e_prev - e0)),
        };
        let next = newton_complex(&s, guess, l)?;
        prev = Some((e_prev, if k == 0 { Complex64::new(x_m, 0.0) } else { z }));
        e_prev = e;
        z = next;
    }
    if z.im < 0.0 {
        z = z.conj();
    }
    Ok(TurningPoints::PairComplexConj { x1: z.conj(), x2: z })
}

fn newton_complex(split: &Splitting, z0: Complex64, l: f64) -> Result<Complex64> {
    let g = |z: Complex64| split.g_complex(z).unwrap();
    let mut z = z0;
    let mut gz = g(z);
    for _ in 0..100 {
        let h = 1e-4 * z.im.abs().max(1e-8 * l);
        let d = (g(z + h) - g(z - h)) / (2.0 * h);
        let mut step = gz / d;
        let mut t = 1.0;
        let mut next = z - step;
        let mut gn = g(next);
        while !(gn.norm() < gz.norm()) && t > 1e-6 {
            t *= 0.5;
            step *= 0.5;
            next = z - step;
            gn = g(next);
        }
        z = next;
        gz = gn;
        if step.norm() <= 1e-15 * (z.norm() + l) || gz.norm() == 0.0 {
            return Ok(z);
        }
    }
    if gz.norm() <= 1e-10 * split.spec.k2_factor() * split.spec.energy_scale() {
        return Ok(z);
    }
    Err(Error::Convergence(format!("complex turning point near {z0}")))
}

/// WKB validity measure `ħ²|3p'²/4p⁴ − p''/2p³|` with `p² = 2m(E − V)`.
pub fn wkb_condition(split: &Splitting, x: f64) -> f64 {
    let k2 = split.spec.k2_factor();
    let v = split.spec.v_jet(x);
    let p2 = k2 * (split.energy - v.value());
    let (d1, d2) = (-k2 * v.deriv(1), -k2 * v.deriv(2));
    // in terms of P = p²/ħ²: |5P'²/(16P³) − P''/(4P²)|
    (5.0 * d1 * d1 / (16.0 * p2 * p2 * p2) - d2 / (4.0 * p2 * p2)).abs()
}

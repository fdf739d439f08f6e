//! Uniform approximate wave functions on a grid: `ψ = ξ'^{−1/2} w(ξ)` with
//! w an Airy function about one turning point, or a parabolic cylinder
//! function of `√2ζ` for a well or a barrier.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::potentials::Splitting;
use crate::semiclassical::{
    find_turning_points, solve_level, AiryMap, QuantizationRule, TurningPointSet, TurningPoints, ZetaMap,
};
use crate::specfun::{airy_ai_scaled, airy_bi_scaled, pcf_u, pcf_w_pair, SpecFunValue};
use crate::{Error, Result};

/// Classification of a grid point by the sign of g.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Region {
    Allowed,
    Forbidden,
    TurningNeighborhood,
}

/// `(psi + i·im) · exp(log_scale)` at x, with the comparison-map value when
/// one is used. `im` is zero except for scattering states.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct WaveSample {
    pub x: f64,
    pub psi: f64,
    pub im: f64,
    pub log_scale: f64,
    pub region: Region,
    pub map: Option<f64>,
}

impl WaveSample {
    /// The unscaled real part; may overflow or underflow.
    pub fn value(&self) -> f64 {
        self.psi * self.log_scale.exp()
    }

    pub fn complex(&self) -> Complex64 {
        Complex64::new(self.psi, self.im) * self.log_scale.exp()
    }

    fn new(x: f64, psi: Complex64, log_scale: f64, region: Region, map: f64) -> Self {
        // fold the scale back in whenever the product is representable
        let (psi, log_scale) = if log_scale.abs() < 600.0 { (psi * log_scale.exp(), 0.0) } else { (psi, log_scale) };
        WaveSample { x, psi: psi.re, im: psi.im, log_scale, region, map: Some(map) }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "type")]
pub enum BcKind {
    DecayAtInfinity,
    DecayAtOrigin,
    IncidentFromLeft,
    Coefficients { a: f64, b: f64 },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Normalization {
    UnitL2,
    UnitIncidentFlux,
    Raw,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundaryCondition {
    pub kind: BcKind,
    pub normalization: Normalization,
}

impl BoundaryCondition {
    pub fn new(kind: BcKind, normalization: Normalization) -> Self {
        BoundaryCondition { kind, normalization }
    }
}

fn check_grid(split: &Splitting, grid: &[f64]) -> Result<()> {
    match grid.iter().find(|&&x| !split.spec.domain().contains(x)) {
        Some(&x) => Err(Error::Domain { x }),
        None => Ok(()),
    }
}

fn sign_region(g: f64) -> Region {
    if g > 0.0 {
        Region::Forbidden
    } else {
        Region::Allowed
    }
}

/// `(ξ/g)^{1/4}(a Ai(ξ) + b Bi(ξ))` about the simple turning point x0, with
/// ξ > 0 on the forbidden side.
pub fn psi_single_tp(split: &Splitting, x0: f64, bc: BoundaryCondition, grid: &[f64]) -> Result<Vec<WaveSample>> {
    let tps = find_turning_points(split)?;
    let TurningPoints::SingleReal { x0: found } = tps.points else {
        return Err(Error::Classification("expected a single real turning point".into()));
    };
    if (found - x0).abs() > 1e-8 * split.spec.length_scale().max(x0.abs()) {
        return Err(Error::Classification(format!("x0 = {x0} is not the turning point {found}")));
    }
    check_grid(split, grid)?;
    let map = AiryMap::new(split, x0)?;
    // forbidden side to the right when g increases through x0
    let forbidden_right = split.g_jet(x0).deriv(1) > 0.0;
    let (a, b) = match bc.kind {
        BcKind::DecayAtInfinity if forbidden_right => (1.0, 0.0),
        BcKind::DecayAtOrigin if !forbidden_right => (1.0, 0.0),
        BcKind::Coefficients { a, b } => (a, b),
        k => return Err(Error::Boundary(format!("{k:?} does not fit the forbidden side of x0"))),
    };
    let scale = match bc.normalization {
        Normalization::Raw => 1.0,
        // each travelling half of Ai(−|ξ|) carries amplitude |g|^{−1/4}/(2√π)
        Normalization::UnitIncidentFlux if b == 0.0 => 2.0 * std::f64::consts::PI.sqrt(),
        n => return Err(Error::Boundary(format!("{n:?} is not available for a single turning point"))),
    };
    grid.par_iter()
        .map(|&x| {
            let xi = map.xi(x);
            let pre = map.dxi(x).powf(-0.5) * scale;
            let (ai, _) = airy_ai_scaled(xi)?;
            let (bi, _) = airy_bi_scaled(xi)?;
            let (m, ls) = if xi > 0.0 {
                let s = 2.0 / 3.0 * xi.powf(1.5);
                if b == 0.0 {
                    (a * ai, -s)
                } else {
                    (b * bi + a * ai * (-2.0 * s).exp(), s)
                }
            } else {
                (a * ai + b * bi, 0.0)
            };
            let region = if xi.abs() <= 1.0 { Region::TurningNeighborhood } else { sign_region(split.g(x)) };
            Ok(WaveSample::new(x, Complex64::new(pre * m, 0.0), ls, region, xi))
        })
        .collect()
}

fn pair_region(zeta0_sq: f64, f: f64, g: f64) -> Region {
    if zeta0_sq > 0.0 && f.abs() <= (2.0 * zeta0_sq.sqrt()).powf(2.0 / 3.0) {
        Region::TurningNeighborhood
    } else {
        sign_region(g)
    }
}

/// Bound state n of a well: `((ζ² − ζ0²)/(−g))^{1/4} U(−n − ½, √2ζ)`,
/// normalized to unit L2 norm on the grid with decaying tails.
pub fn psi_well(split: &Splitting, tps: &TurningPointSet, n: usize, grid: &[f64]) -> Result<Vec<WaveSample>> {
    if !matches!(tps.points, TurningPoints::PairReal { .. }) || !tps.is_well() {
        return Err(Error::Classification("psi_well needs two real turning points around a minimum".into()));
    }
    check_grid(split, grid)?;
    let level = solve_level(&split.spec, QuantizationRule::Improved, n, None)?;
    let distance = (split.energy - level.energy).abs();
    if distance > 1e-6 * split.spec.energy_scale() {
        return Err(Error::OffShell { energy: split.energy, distance });
    }
    let map = ZetaMap::new(split, tps)?;
    let a = -(n as f64) - 0.5;
    // U(−n − ½, z) has parity (−1)^n; evaluating on |z| keeps both tails recessive
    let parity = if n.is_multiple_of(2) { 1.0 } else { -1.0 };
    let mut samples = grid
        .par_iter()
        .map(|&x| {
            let p = map.locate(x);
            let z = std::f64::consts::SQRT_2 * p.zeta;
            let u = pcf_u(a, z.abs())?;
            let s = if z < 0.0 { parity } else { 1.0 };
            let pre = map.dzeta(x).powf(-0.5);
            let region = pair_region(map.zeta0_squared(), p.f, split.g(x));
            Ok(WaveSample::new(x, Complex64::new(s * pre * u.value, 0.0), u.log_scale, region, p.zeta))
        })
        .collect::<Result<Vec<_>>>()?;
    let norm = l2_norm(split, &samples);
    if !(norm > 0.0 && norm.is_finite()) {
        return Err(Error::Extent("the grid does not cover the state".into()));
    }
    let f = norm.sqrt().recip();
    for s in &mut samples {
        s.psi *= f;
    }
    Ok(samples)
}

/// Trapezoid `∫ψ²` with the decaying tails `ψ²/(2√g)` added at grid ends that
/// lie in a forbidden region.
fn l2_norm(split: &Splitting, s: &[WaveSample]) -> f64 {
    if s.is_empty() {
        return 0.0;
    }
    let v2 = |w: &WaveSample| {
        let v = w.value();
        v * v
    };
    let mut sum = 0.0;
    for w in s.windows(2) {
        sum += 0.5 * (v2(&w[0]) + v2(&w[1])) * (w[1].x - w[0].x).abs();
    }
    for w in [&s[0], &s[s.len() - 1]] {
        let g = split.kinetic(w.x);
        if g > 0.0 {
            sum += v2(w) / (2.0 * g.sqrt());
        }
    }
    sum
}

/// Plane-wave amplitudes of a barrier scattering state, in the same units as
/// the wave function.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct BarrierAmplitudes {
    pub incident: f64,
    pub reflected: f64,
    pub transmitted: f64,
}

impl BarrierAmplitudes {
    pub fn transmission(&self) -> f64 {
        (self.transmitted / self.incident).powi(2)
    }

    pub fn reflection(&self) -> f64 {
        (self.reflected / self.incident).powi(2)
    }
}

/// Scattering state of a barrier with a wave incident from the left:
/// `ζ'^{−1/2}[k^{−1/2}W(a, √2ζ) + i k^{1/2}W(a, −√2ζ)]`, `a = ζ0²/2`,
/// `k = √(1 + e^{2πa}) − e^{πa}`, purely outgoing on the right.
pub fn psi_barrier(
    split: &Splitting,
    tps: &TurningPointSet,
    bc: BoundaryCondition,
    grid: &[f64],
) -> Result<(Vec<WaveSample>, BarrierAmplitudes)> {
    if !tps.is_barrier() {
        return Err(Error::Classification("psi_barrier needs a maximum of g".into()));
    }
    if bc.kind != BcKind::IncidentFromLeft {
        return Err(Error::Boundary(format!("{:?} does not describe barrier scattering", bc.kind)));
    }
    check_grid(split, grid)?;
    let map = ZetaMap::new(split, tps)?;
    let a = 0.5 * map.zeta0_squared();
    let epa = (std::f64::consts::PI * a).exp();
    let root = (1.0 + epa * epa).sqrt();
    let k = 1.0 / (root + epa);
    // far from the barrier each wave is A ζ'^{−1/2}√(2/|z|) e^{±iω}, whose flux
    // Im(ψ*ψ') is √2|A|²; the transmitted wave has A = 1
    let amp = |a: f64| a * 2f64.powf(0.25);
    let mut amps = BarrierAmplitudes { incident: amp(root), reflected: amp(epa), transmitted: amp(1.0) };
    let scale = match bc.normalization {
        Normalization::Raw => 1.0,
        Normalization::UnitIncidentFlux => 1.0 / amps.incident,
        Normalization::UnitL2 => return Err(Error::Boundary("a scattering state is not normalizable".into())),
    };
    amps.incident *= scale;
    amps.reflected *= scale;
    amps.transmitted *= scale;
    let samples = grid
        .par_iter()
        .map(|&x| {
            let p = map.locate(x);
            let z = std::f64::consts::SQRT_2 * p.zeta;
            let w1 = full(pcf_w_pair(a, z)?.0)?;
            let w2 = full(pcf_w_pair(a, -z)?.0)?;
            let pre = map.dzeta(x).powf(-0.5) * scale;
            let psi = Complex64::new(w1 / k.sqrt(), k.sqrt() * w2) * pre;
            // the incident wave carries phase i relative to the transmitted one; drop it
            let psi = psi * Complex64::new(0.0, -1.0);
            let region = pair_region(map.zeta0_squared(), p.f, split.g(x));
            Ok(WaveSample::new(x, psi, 0.0, region, p.zeta))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok((samples, amps))
}

fn full(v: SpecFunValue) -> Result<f64> {
    let f = v.full();
    if f.is_finite() {
        Ok(f)
    } else {
        Err(Error::Overflow { scaled: v.value, log_scale: v.log_scale })
    }
}

/// `Im(ψ* dψ/dx)` from a complex sample triple with spacing h.
pub fn flux(prev: &WaveSample, mid: &WaveSample, next: &WaveSample) -> f64 {
    let d = (next.complex() - prev.complex()) / (next.x - prev.x);
    (mid.complex().conj() * d).im
}

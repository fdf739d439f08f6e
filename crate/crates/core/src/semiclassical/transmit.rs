//! Barrier transmission: the uniform result `1/(1 + e^{πζ0²})` and the WKB
//! tunneling exponential.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::phase::{phase_integral_real, zeta0_squared, PhaseSign};
use super::{find_turning_points, TurningPoints};
use crate::potentials::{build_splitting, wkb_splitting, ExtremeKind, PotentialKind, PotentialSpec, Tail};
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TransmissionMethod {
    Improved,
    Wkb,
    ExactNumeric,
    ClosedForm,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct TransmissionSample {
    pub energy: f64,
    pub t: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TransmissionCurve {
    pub method: TransmissionMethod,
    pub samples: Vec<TransmissionSample>,
    /// Barrier parameters the curve was computed for.
    pub params: Vec<(String, f64)>,
}

impl TransmissionCurve {
    /// Evaluate `t` at each energy in parallel.
    pub fn build<F>(method: TransmissionMethod, spec: &PotentialSpec, energies: &[f64], t: F) -> Result<Self>
    where
        F: Fn(&PotentialSpec, f64) -> Result<f64> + Sync,
    {
        let samples = energies
            .par_iter()
            .map(|&energy| Ok(TransmissionSample { energy, t: t(spec, energy)? }))
            .collect::<Result<Vec<_>>>()?;
        let params = spec.params.entries(spec.kind).into_iter().map(|(k, v)| (k.to_string(), v)).collect();
        Ok(TransmissionCurve { method, samples, params })
    }
}

/// Improved or WKB transmission over a list of energies.
pub fn transmission_curve(
    spec: &PotentialSpec,
    energies: &[f64],
    method: TransmissionMethod,
) -> Result<TransmissionCurve> {
    match method {
        TransmissionMethod::Improved => TransmissionCurve::build(method, spec, energies, transmission_improved),
        TransmissionMethod::Wkb => TransmissionCurve::build(method, spec, energies, transmission_wkb),
        _ => Err(Error::Unsupported(format!("{method:?} curves come from the oracle module"))),
    }
}

fn check_scattering(spec: &PotentialSpec, energy: f64) -> Result<()> {
    if spec.tail() != Tail::ShortRange {
        return Err(Error::Classification("transmission needs a potential that vanishes on both sides".into()));
    }
    let level = spec.threshold();
    if energy <= level {
        return Err(Error::NoScattering { energy, level });
    }
    Ok(())
}

/// `T = 1/(1 + e^{πζ0²})`, valid below and above the effective top.
pub fn transmission_improved(spec: &PotentialSpec, energy: f64) -> Result<f64> {
    if spec.kind == PotentialKind::PoschlTellerBarrier {
        let p = &spec.params;
        if 8.0 * p.m * p.v0 / (p.hbar * p.hbar) <= p.alpha * p.alpha {
            return Err(Error::MethodInapplicable("the barrier needs 8mv0/ħ² > α²".into()));
        }
    }
    check_scattering(spec, energy)?;
    let split = build_splitting(spec, energy)?;
    let tps = find_turning_points(&split)?;
    if !tps.is_barrier() {
        return Err(Error::Classification("g has no maximum: not a barrier".into()));
    }
    let z = zeta0_squared(&tps, &split)?;
    Ok(1.0 / (1.0 + (std::f64::consts::PI * z).exp()))
}

/// `T = exp(−2∫√(2m(V − E))/ħ)` between the classical turning points.
pub fn transmission_wkb(spec: &PotentialSpec, energy: f64) -> Result<f64> {
    check_scattering(spec, energy)?;
    let split = wkb_splitting(spec, energy);
    let tps = find_turning_points(&split)?;
    match (tps.points, tps.extreme) {
        (TurningPoints::None { allowed: true }, None) => Ok(1.0),
        (TurningPoints::PairReal { x1, x2 }, Some(ExtremeKind::Maximum)) => {
            Ok((-2.0 * phase_integral_real(&split, x1, x2, PhaseSign::Forbidden)?.value).exp())
        }
        (_, Some(ExtremeKind::Maximum)) => {
            Err(Error::MethodInapplicable("E is at or above the barrier peak; no real classical turning points".into()))
        }
        _ => Err(Error::Classification("not a barrier".into())),
    }
}

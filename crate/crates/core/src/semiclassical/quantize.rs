//! Bound-state quantization: `∫√(−g) = (n + 1/2)π` between two turning
//! points, or `(n + 3/4)π` between a hard wall and one turning point.

use std::f64::consts::PI;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::phase::{phase_integral_real, PhaseSign};
use super::{find_turning_points, search_side, TurningPoints};
use crate::numerics::roots::brent;
use crate::potentials::{
    exact_spectrum, select_q, Domain, ExtremeKind, PotentialSpec, QFunction, QProvenance, SelectedQ, Splitting, Tail,
};
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SpectrumMethod {
    Exact,
    Wkb,
    Improved,
    Numerov,
}

/// Which splitting the quantization condition uses.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum QuantizationRule {
    /// Selected q with the effective potential.
    Improved,
    /// q ≡ 0.
    Wkb,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SpectrumEntry {
    pub n: usize,
    pub energy: f64,
    /// `|Φ(E) − (n + ν)π|` at the returned energy.
    pub residual: f64,
    pub iterations: usize,
    /// The level sits exactly at the continuum threshold, where the
    /// condition holds through an improper phase integral.
    pub at_threshold: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SpectrumResult {
    pub method: SpectrumMethod,
    pub entries: Vec<SpectrumEntry>,
}

impl SpectrumResult {
    pub fn energies(&self) -> Vec<f64> {
        self.entries.iter().map(|e| e.energy).collect()
    }
}

fn selected(spec: &PotentialSpec, rule: QuantizationRule) -> Result<SelectedQ> {
    match rule {
        QuantizationRule::Improved => select_q(spec),
        QuantizationRule::Wkb => Ok(SelectedQ { q: QFunction::Zero, provenance: QProvenance::Zero }),
    }
}

/// Phase integral `∫√(−g)` over the classically allowed region at the
/// splitting's energy; zero where no allowed region exists yet.
pub fn allowed_phase(split: &Splitting, boundary: Option<f64>) -> Result<f64> {
    let domain = split.spec.domain();
    if domain == Domain::HalfLine {
        let x = 1e-8 * split.spec.length_scale();
        if split.g(x) * x * x < -1e-6 {
            return Err(Error::MethodInapplicable(
                "g has an attractive second-order pole; the phase integral diverges at the origin".into(),
            ));
        }
    }
    let real = |a: f64, b: f64| Ok(phase_integral_real(split, a, b, PhaseSign::Allowed)?.value);
    if let Some(xb) = boundary {
        if !(domain.contains(xb) || (domain == Domain::HalfLine && xb == 0.0)) {
            return Err(Error::Domain { x: xb });
        }
        let from = if xb == 0.0 && domain == Domain::HalfLine { 1e-300 } else { xb };
        if !(split.g(from) < 0.0) {
            return Ok(0.0);
        }
        let x0 = search_side(split, from, 1.0, true)?
            .ok_or_else(|| Error::Boundary(format!("no turning point to the right of x_b = {xb}")))?;
        return real(xb, x0);
    }
    let tps = find_turning_points(split)?;
    match tps.points {
        TurningPoints::PairReal { x1, x2 } if tps.extreme == Some(ExtremeKind::Minimum) => real(x1, x2),
        TurningPoints::Coalesced { .. } | TurningPoints::None { allowed: false } if !tps.is_barrier() => Ok(0.0),
        TurningPoints::None { allowed: true } => real(domain.lower(), f64::INFINITY),
        TurningPoints::SingleReal { x0 } => {
            if split.g_jet(x0).deriv(1) > 0.0 {
                real(domain.lower(), x0)
            } else {
                real(x0, f64::INFINITY)
            }
        }
        other => Err(Error::Classification(format!("no potential well at E = {}: {other:?}", split.energy))),
    }
}

/// Energy of level n.
pub fn solve_level(
    spec: &PotentialSpec,
    rule: QuantizationRule,
    n: usize,
    boundary: Option<f64>,
) -> Result<SpectrumEntry> {
    let base = Splitting::from_q(spec, 0.0, selected(spec, rule)?);
    let nu = if boundary.is_some() { 0.75 } else { 0.5 };
    let target = (n as f64 + nu) * PI;
    let f = |e: f64| -> Result<f64> { Ok(allowed_phase(&base.with_energy(e), boundary)? - target) };
    let scale = spec.energy_scale();

    let mut lo = lowest_energy(&base, boundary)?;
    let mut step = scale;
    let mut k = 0;
    while f(lo)? >= 0.0 {
        lo -= step;
        step *= 2.0;
        k += 1;
        if k > 200 {
            return Err(Error::Convergence("no energy below level n found".into()));
        }
    }

    let hi = match spec.tail() {
        Tail::ShortRange => {
            let thr = spec.threshold();
            let ft = f(thr)?;
            // at the threshold g = k2(V − E) loses its tail below √ε, which
            // bounds the accuracy of the improper integral
            if ft.abs() <= 1e-7 * target.max(1.0) {
                return Ok(SpectrumEntry { n, energy: thr, residual: ft.abs(), iterations: 1, at_threshold: true });
            }
            if ft < 0.0 {
                return Err(Error::NoBoundState { n });
            }
            thr
        }
        Tail::Coulomb => {
            let thr = spec.threshold();
            let mut hi = lo;
            let mut found = false;
            for _ in 0..1000 {
                hi = thr - 0.5 * (thr - hi);
                if f(hi)? > 0.0 {
                    found = true;
                    break;
                }
            }
            if !found {
                return Err(Error::NoBoundState { n });
            }
            hi
        }
        Tail::Confining => {
            let mut hi = lo + scale;
            let mut step = scale;
            let mut k = 0;
            while f(hi)? <= 0.0 {
                step *= 2.0;
                hi += step;
                k += 1;
                if k > 200 {
                    return Err(Error::Convergence("no energy above level n found".into()));
                }
            }
            hi
        }
    };

    let mut first_err = None;
    let mut iterations = 0;
    let xtol = 1e-15 * lo.abs().max(hi.abs()).max(scale);
    let energy = brent(
        |e| {
            iterations += 1;
            match f(e) {
                Ok(v) => v,
                Err(err) => {
                    first_err.get_or_insert(err);
                    0.0
                }
            }
        },
        lo,
        hi,
        xtol,
        300,
    )?;
    if let Some(err) = first_err {
        return Err(err);
    }
    let residual = f(energy)?.abs();
    Ok(SpectrumEntry { n, energy, residual, iterations, at_threshold: false })
}

/// Lower edge of the bound-state window: the bottom of U.
fn lowest_energy(split: &Splitting, boundary: Option<f64>) -> Result<f64> {
    let spec = &split.spec;
    let mut lo = f64::INFINITY;
    if let Some(xb) = boundary {
        let x = if xb == 0.0 && spec.domain() == Domain::HalfLine { 1e-12 * spec.length_scale() } else { xb };
        lo = split.effective_potential(x);
    }
    if let Some((x_m, ExtremeKind::Minimum)) = split.extreme_point()? {
        if boundary.is_none_or(|xb| x_m > xb) {
            lo = lo.min(split.effective_potential(x_m));
        }
    }
    if lo.is_finite() {
        return Ok(lo);
    }
    let l = spec.length_scale();
    let grid: Vec<f64> = match spec.domain() {
        Domain::HalfLine => (0..=1200).map(|i| l * 1e-4 * 10f64.powf(i as f64 / 150.0)).collect(),
        Domain::FullLine => (0..=1200).map(|i| l * 0.2 * ((i as f64 - 600.0) / 100.0).sinh()).collect(),
    };
    let min =
        grid.iter().map(|&x| split.effective_potential(x)).filter(|u| u.is_finite()).fold(f64::INFINITY, f64::min);
    if min.is_finite() {
        Ok(min)
    } else {
        Err(Error::Unsupported("cannot bound the potential from below".into()))
    }
}

fn solve_all(
    spec: &PotentialSpec,
    rule: QuantizationRule,
    ns: &[usize],
    boundary: Option<f64>,
) -> Result<Vec<SpectrumEntry>> {
    ns.par_iter().map(|&n| solve_level(spec, rule, n, boundary)).collect()
}

/// Improved spectrum for the levels in `ns`.
pub fn solve_spectrum_improved(spec: &PotentialSpec, ns: &[usize], boundary: Option<f64>) -> Result<SpectrumResult> {
    Ok(SpectrumResult {
        method: SpectrumMethod::Improved,
        entries: solve_all(spec, QuantizationRule::Improved, ns, boundary)?,
    })
}

/// WKB spectrum for the levels in `ns`.
pub fn solve_spectrum_wkb(spec: &PotentialSpec, ns: &[usize], boundary: Option<f64>) -> Result<SpectrumResult> {
    Ok(SpectrumResult { method: SpectrumMethod::Wkb, entries: solve_all(spec, QuantizationRule::Wkb, ns, boundary)? })
}

/// Closed-form exact levels.
pub fn exact_levels(spec: &PotentialSpec, ns: &[usize]) -> Result<SpectrumResult> {
    let entries = ns
        .iter()
        .map(|&n| {
            let energy = exact_spectrum(spec, n)?;
            let at_threshold = spec.tail() == Tail::ShortRange && energy == spec.threshold();
            Ok(SpectrumEntry { n, energy, residual: 0.0, iterations: 0, at_threshold })
        })
        .collect::<Result<_>>()?;
    Ok(SpectrumResult { method: SpectrumMethod::Exact, entries })
}

#[cfg(test)]
mod tests {
    use super::super::tests::{spec, spec_with};
    use super::*;
    use crate::potentials::{build_splitting, wkb_spectrum_closed_form, PotentialKind};
    use proptest::prelude::*;

    fn improved(sp: &PotentialSpec, n: usize) -> f64 {
        solve_level(sp, QuantizationRule::Improved, n, None).unwrap().energy
    }

    #[test]
    fn hydrogen_levels_are_exact() {
        let sp = spec(PotentialKind::Hydrogen);
        let r = solve_spectrum_improved(&sp, &[0, 1, 2, 3], None).unwrap();
        for e in &r.entries {
            let exact = -0.5 / ((e.n + 1) as f64).powi(2);
            assert!((e.energy - exact).abs() < 1e-10, "{e:?}");
            assert!(e.residual < 1e-10);
        }
        let w = solve_level(&sp, QuantizationRule::Wkb, 0, None).unwrap();
        assert!((w.energy + 2.0).abs() < 1e-10, "{w:?}");
    }

    #[test]
    fn oscillator_d_and_morse() {
        let sp = spec_with(PotentialKind::OscillatorD, |p| p.l = 1);
        assert!((improved(&sp, 0) - 2.5).abs() < 1e-10);
        let m = spec(PotentialKind::Morse);
        let w = solve_level(&m, QuantizationRule::Wkb, 0, None).unwrap().energy;
        assert!((w - exact_spectrum(&m, 0).unwrap()).abs() < 1e-10);
        assert!(matches!(solve_level(&m, QuantizationRule::Wkb, 1, None), Err(Error::NoBoundState { n: 1 })));
    }

    #[test]
    fn threshold_levels_are_marginal() {
        let e = solve_level(&spec(PotentialKind::Eckart), QuantizationRule::Improved, 0, None).unwrap();
        assert!(e.at_threshold && e.energy == -4.0);
        let p = solve_level(&spec(PotentialKind::PoschlTellerWell), QuantizationRule::Improved, 4, None).unwrap();
        assert!(p.at_threshold && p.energy == 0.0);
        assert!(matches!(
            solve_level(&spec(PotentialKind::PoschlTellerWell), QuantizationRule::Improved, 5, None),
            Err(Error::NoBoundState { n: 5 })
        ));
    }

    #[test]
    fn catalog_levels_match_closed_forms() {
        for kind in PotentialKind::CATALOG {
            if !kind.has_closed_forms() {
                continue;
            }
            let sp = spec(kind);
            for n in 0..4 {
                if let Ok(exact) = exact_spectrum(&sp, n) {
                    let e = solve_level(&sp, QuantizationRule::Improved, n, None).unwrap();
                    assert!((e.energy - exact).abs() < 1e-9 * exact.abs().max(1.0), "{kind} {n} {e:?} {exact}");
                }
                if let Ok(w) = wkb_spectrum_closed_form(&sp, n) {
                    let e = solve_level(&sp, QuantizationRule::Wkb, n, None).unwrap();
                    assert!((e.energy - w).abs() < 1e-9 * w.abs().max(1.0), "{kind} {n} {e:?} {w}");
                }
            }
        }
    }

    #[test]
    fn inapplicable_wkb_for_attractive_pole() {
        let sp = spec_with(PotentialKind::OscillatorD, |p| p.d = 2);
        assert!(matches!(solve_level(&sp, QuantizationRule::Wkb, 0, None), Err(Error::MethodInapplicable(_))));
    }

    #[test]
    fn hard_wall_levels() {
        // half oscillator: ∫_0^{√2E} √(2E − x²) = πE/2 = (n + 3/4)π
        let sp = spec(PotentialKind::PureOscillator1d);
        for n in 0..3 {
            let e = solve_level(&sp, QuantizationRule::Wkb, n, Some(0.0)).unwrap();
            assert!((e.energy - (2.0 * n as f64 + 1.5)).abs() < 1e-10, "{e:?}");
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]
        #[test]
        fn phase_is_increasing_in_energy(a in -0.49f64..-0.01, b in -0.49f64..-0.01) {
            prop_assume!((a - b).abs() > 1e-4);
            let sp = spec(PotentialKind::Hydrogen);
            let (lo, hi) = if a < b { (a, b) } else { (b, a) };
            let phi = |e: f64| allowed_phase(&build_splitting(&sp, e).unwrap(), None).unwrap();
            prop_assert!(phi(lo) < phi(hi));
        }
    }
}

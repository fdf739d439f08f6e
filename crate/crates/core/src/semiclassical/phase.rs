//! Phase integrals between turning points and the signed ζ₀² parameter.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::Serialize;

use super::{TurningPointSet, TurningPoints};
use crate::numerics::quad::{integrate_sqrt_endpoints, integrate_to_infinity};
use crate::potentials::Splitting;
use crate::{Error, Result};

const REL: f64 = 1e-12;

/// Which sign of g the integrand `√(∓g)` expects between the limits.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum PhaseSign {
    /// `∫√(−g)`, classically allowed interval.
    Allowed,
    /// `∫√g`, forbidden interval.
    Forbidden,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(tag = "type", rename_all = "kebab-case")]
pub enum PhasePath {
    Real { a: f64, b: f64 },
    Complex { a: Complex64, b: Complex64 },
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct PhaseIntegral {
    pub value: f64,
    pub error: f64,
    pub path: PhasePath,
}

/// `∫_a^b √(∓g) dx` for `a < b`. Either limit may be a turning point, the
/// domain edge, or infinite.
pub fn phase_integral_real(split: &Splitting, a: f64, b: f64, sign: PhaseSign) -> Result<PhaseIntegral> {
    if !(a < b) {
        return Err(Error::InvalidParams(format!("phase integral limits {a} >= {b}")));
    }
    let s = match sign {
        PhaseSign::Allowed => -1.0,
        PhaseSign::Forbidden => 1.0,
    };
    check_interior_sign(split, a, b, s)?;
    let f = |x: f64| (s * split.g(x)).max(0.0).sqrt();
    let l = split.spec.length_scale();
    let abs = 1e-14 * l * (split.spec.k2_factor() * split.spec.energy_scale()).sqrt();
    let (value, error) = match (a.is_finite(), b.is_finite()) {
        (true, true) => {
            let r = integrate_sqrt_endpoints(f, a, b, REL, abs);
            (r.value, r.error)
        }
        (true, false) => to_infinity(f, a, l, abs),
        (false, true) => to_infinity(|t| f(-t), -b, l, abs),
        (false, false) => {
            let (v1, e1) = to_infinity(f, 0.0, l, abs);
            let (v2, e2) = to_infinity(|t| f(-t), 0.0, l, abs);
            (v1 + v2, e1 + e2)
        }
    };
    if !value.is_finite() {
        return Err(Error::Convergence(format!("phase integral over [{a}, {b}] is not finite")));
    }
    Ok(PhaseIntegral { value, error, path: PhasePath::Real { a, b } })
}

/// `[a, a+L]` with square-root handling at `a`, then the tail.
fn to_infinity<F: Fn(f64) -> f64>(f: F, a: f64, l: f64, abs: f64) -> (f64, f64) {
    let head = integrate_sqrt_endpoints(&f, a, a + l, REL, abs);
    let tail = integrate_to_infinity(&f, a + l, l, REL, abs);
    (head.value + tail.value, head.error + tail.error)
}

fn check_interior_sign(split: &Splitting, a: f64, b: f64, s: f64) -> Result<()> {
    let scale = split.spec.k2_factor() * split.spec.energy_scale();
    let l = split.spec.length_scale();
    let (lo, hi) =
        (if a.is_finite() { a } else { b.min(0.0) - 50.0 * l }, if b.is_finite() { b } else { a.max(0.0) + 50.0 * l });
    for i in 1..16 {
        let x = lo + (hi - lo) * i as f64 / 16.0;
        let g = split.g(x);
        if g.is_finite() && s * g < -1e-9 * scale {
            return Err(Error::Classification(format!("g changes sign inside [{a}, {b}] at x = {x}")));
        }
    }
    Ok(())
}

/// `∫_{z1}^{z2} √g dz` along the straight segment, with the branch chosen to
/// agree with the real-axis value at the midpoint.
pub fn phase_integral_complex(split: &Splitting, z1: Complex64, z2: Complex64) -> Result<PhaseIntegral> {
    let d = z2 - z1;
    let mid = z1 + d * 0.5;
    let g = |z: Complex64| {
        split
            .g_complex(z)
            .ok_or_else(|| Error::Unsupported("complex phase integral needs an analytic potential".into()))
    };
    let ref_root = g(mid)?.sqrt();
    let f = |t: f64| {
        let r = g(z1 + d * t).map(|v| v.sqrt()).unwrap_or_default();
        // keep the branch continuous through the midpoint value
        let r = if (r - ref_root).norm() > (r + ref_root).norm() { -r } else { r };
        r * d
    };
    let l = split.spec.length_scale();
    let abs = 1e-14 * l * (split.spec.k2_factor() * split.spec.energy_scale()).sqrt();
    let r = integrate_sqrt_endpoints(f, 0.0, 1.0, REL, abs);
    Ok(PhaseIntegral { value: r.value.norm(), error: r.error, path: PhasePath::Complex { a: z1, b: z2 } })
}

/// Signed ζ₀²: positive for a real pair, zero at coalescence, negative for a
/// complex pair.
pub fn zeta0_squared(tps: &TurningPointSet, split: &Splitting) -> Result<f64> {
    match tps.points {
        TurningPoints::PairReal { x1, x2 } => {
            let sign = if tps.is_barrier() { PhaseSign::Forbidden } else { PhaseSign::Allowed };
            Ok(2.0 / PI * phase_integral_real(split, x1, x2, sign)?.value)
        }
        TurningPoints::Coalesced { .. } => Ok(0.0),
        TurningPoints::PairComplexConj { x1, x2 } => Ok(-2.0 / PI * phase_integral_complex(split, x1, x2)?.value),
        other => Err(Error::Classification(format!("ζ₀² needs a pair of turning points, found {other:?}"))),
    }
}

#[cfg(test)]
mod tests {
    use super::super::find_turning_points;
    use super::super::tests::{spec, spec_with};
    use super::*;
    use crate::potentials::{build_splitting, wkb_splitting, PotentialKind};
    use proptest::prelude::*;

    #[test]
    fn oscillator_phase_is_pi_e() {
        let s = build_splitting(&spec(PotentialKind::PureOscillator1d), 2.5).unwrap();
        let r = phase_integral_real(&s, -(5f64.sqrt()), 5f64.sqrt(), PhaseSign::Allowed).unwrap();
        // ∫√(2E − x²) = πE
        assert!((r.value - 2.5 * PI).abs() < 1e-12, "{}", r.value);
        assert!(r.error < 1e-10);
    }

    #[test]
    fn morse_threshold_phase_has_closed_form() {
        // U = e^{−2x} − 2e^{−x}: ∫√(−2U) over the allowed side of x0 = −ln 2
        let s = wkb_splitting(
            &spec_with(PotentialKind::Morse, |p| {
                p.v0 = 1.0;
                p.v1 = -2.0;
            }),
            0.0,
        );
        let r = phase_integral_real(&s, -(2f64.ln()), f64::INFINITY, PhaseSign::Allowed).unwrap();
        // with y = e^{−x}: √2 ∫_0^2 √((2 − y)/y) dy = π√2
        assert!((r.value - PI * 2f64.sqrt()).abs() < 1e-10, "{}", r.value);
    }

    #[test]
    fn forbidden_region_is_rejected_as_allowed() {
        let s = build_splitting(&spec(PotentialKind::PureOscillator1d), 0.5).unwrap();
        assert!(matches!(phase_integral_real(&s, 2.0, 3.0, PhaseSign::Allowed), Err(Error::Classification(_))));
        assert!(phase_integral_real(&s, 1.0, 3.0, PhaseSign::Forbidden).is_ok());
    }

    #[test]
    fn barrier_zeta0_sign_follows_topology() {
        let sp = spec(PotentialKind::PoschlTellerBarrier);
        let z = |e: f64| {
            let s = build_splitting(&sp, e).unwrap();
            zeta0_squared(&find_turning_points(&s).unwrap(), &s).unwrap()
        };
        assert!(z(1.0) > 0.0);
        assert_eq!(z(2.375), 0.0);
        assert!(z(4.0) < 0.0);
        // continuity through the top
        assert!(z(2.375 - 1e-6).abs() < 1e-5 && z(2.375 + 1e-6).abs() < 1e-5);
        // quadratic top: ζ₀² ≈ 2(U_top − E)/√|U''| with U'' = −2·2.375α²
        let d = 1e-3;
        let expect = 2.0 * d / 4.75f64.sqrt();
        assert!((z(2.375 - d) / expect - 1.0).abs() < 1e-2, "{} {}", z(2.375 - d), expect);
        assert!((z(2.375 + d) / expect + 1.0).abs() < 1e-2);
    }

    #[test]
    fn well_zeta0_is_positive() {
        let s = build_splitting(&spec(PotentialKind::Hydrogen), -0.125).unwrap();
        let t = find_turning_points(&s).unwrap();
        // ∫√(−g) on the hydrogen well equals π(n + 1/2) at the levels
        assert!((zeta0_squared(&t, &s).unwrap() - 3.0).abs() < 1e-10);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]
        #[test]
        fn zeta0_monotone_in_energy(e1 in 0.05f64..6.0, e2 in 0.05f64..6.0) {
            prop_assume!((e1 - e2).abs() > 1e-3);
            let sp = spec(PotentialKind::PoschlTellerBarrier);
            let z = |e: f64| {
                let s = build_splitting(&sp, e).unwrap();
                zeta0_squared(&find_turning_points(&s).unwrap(), &s).unwrap()
            };
            let (lo, hi) = if e1 < e2 { (e1, e2) } else { (e2, e1) };
            prop_assert!(z(lo) > z(hi));
        }
    }
}

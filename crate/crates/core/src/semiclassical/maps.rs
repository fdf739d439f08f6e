//! The Airy map ξ(x) and the two-turning-point map ζ(x), obtained by
//! matching `∫√|g| dx` to the area of the comparison function.

use crate::numerics::neville;
use crate::numerics::quad::{integrate, integrate_sqrt_endpoints};
use crate::potentials::{Domain, Splitting};
use crate::{Error, Result};

use super::{phase::zeta0_squared, TurningPointSet, TurningPoints};

/// `∫ √|g|` between `from` and `to` (unsigned). `from` may be a turning
/// point; the path may run out to the pole at the origin.
pub(crate) fn area(split: &Splitting, from: f64, to: f64) -> f64 {
    if from == to {
        return 0.0;
    }
    let dir = (to - from).signum();
    let dist = (to - from).abs();
    let l = split.spec.length_scale();
    let h0 = dist.min(0.25 * l);
    let f = |x: f64| split.g(x).abs().sqrt();
    let abs = 1e-16 * h0 * (split.spec.k2_factor() * split.spec.energy_scale()).sqrt();
    let rel = 1e-13;
    let mut total = integrate_sqrt_endpoints(f, from, from + dir * h0, rel, abs).value.abs();
    if dist > h0 {
        let b0 = from + dir * h0;
        let toward_origin = split.spec.domain() == Domain::HalfLine && dir < 0.0;
        total += if toward_origin {
            // x = b0 e^{−u}
            integrate(
                |u: f64| {
                    let x = b0 * (-u).exp();
                    f(x) * x
                },
                0.0,
                (b0 / to).ln(),
                rel,
                abs,
            )
            .value
        } else {
            // x = b0 + dir h0 (e^u − 1)
            let umax = ((dist - h0) / h0).ln_1p();
            integrate(|u: f64| f(b0 + dir * h0 * u.exp_m1()) * h0 * u.exp(), 0.0, umax, rel, abs).value
        };
    }
    total
}

/// Area under `√|w(2ζ0 + σw)|` from 0 to w: the comparison area measured
/// from a turning point, inward (σ = −1) or outward (σ = +1).
fn pair_area(w: f64, z0: f64, sigma: f64) -> f64 {
    let u = w / z0;
    if u < 0.1 {
        // √(2ζ0) Σ C(½,k) σ^k (2ζ0)^{−k} w^{k+3/2}/(k+3/2)
        let y = sigma * w / (2.0 * z0);
        let (mut b, mut yk, mut s) = (1.0, 1.0, 0.0);
        for k in 0..16 {
            let kf = k as f64;
            s += b * yk / (kf + 1.5);
            b *= (0.5 - kf) / (kf + 1.0);
            yk *= y;
        }
        return (2.0 * z0).sqrt() * w.powf(1.5) * s;
    }
    let root = (w * (2.0 * z0 + sigma * w)).max(0.0).sqrt();
    if sigma < 0.0 {
        0.5 * ((w - z0) * root + z0 * z0 * 2.0 * (0.5 * u).sqrt().min(1.0).asin())
    } else {
        0.5 * ((z0 + w) * root - z0 * z0 * (u + (u * (2.0 + u)).sqrt()).ln_1p())
    }
}

/// Area under `√(v² + c)` from 0 to z.
fn complex_area(z: f64, c: f64) -> f64 {
    0.5 * (z * (z * z + c).sqrt() + c * (z / c.sqrt()).asinh())
}

/// Solve `area(w) = a` for `w ∈ [0, hi]`, area increasing with derivative `d`.
fn invert<A: Fn(f64) -> f64, D: Fn(f64) -> f64>(area: A, d: D, a: f64, mut hi: f64, guess: f64) -> f64 {
    if a <= 0.0 {
        return 0.0;
    }
    let mut lo = 0.0;
    let mut w = guess.clamp(0.0, hi);
    for _ in 0..200 {
        let r = area(w) - a;
        if r > 0.0 {
            hi = w;
        } else {
            lo = w;
        }
        let dv = d(w);
        let mut next = if dv > 0.0 { w - r / dv } else { f64::NAN };
        if !(next > lo && next < hi) {
            next = 0.5 * (lo + hi);
        }
        if (next - w).abs() <= 1e-15 * hi.max(1e-300) {
            return next;
        }
        w = next;
    }
    w
}

/// The Airy map about a simple turning point x0: `ξ = ±(3/2 ∫|√g|)^{2/3}`,
/// positive where g > 0.
#[derive(Clone, Debug)]
pub struct AiryMap {
    pub split: Splitting,
    pub x0: f64,
    /// Sign of g'(x0).
    slope_sign: f64,
    /// `(g'(x0))^{1/3}` in magnitude, the limit of ξ'.
    slope: f64,
    ell: f64,
}

impl AiryMap {
    pub fn new(split: &Splitting, x0: f64) -> Result<Self> {
        let g1 = split.g_jet(x0).deriv(1);
        if g1 == 0.0 || !g1.is_finite() {
            return Err(Error::Classification(format!("x0 = {x0} is not a simple turning point")));
        }
        Ok(AiryMap {
            split: split.clone(),
            x0,
            slope_sign: g1.signum(),
            slope: g1.abs().cbrt(),
            ell: 1.0 / g1.abs().cbrt(),
        })
    }

    /// Local Airy length `|g'(x0)|^{−1/3}`.
    pub fn airy_length(&self) -> f64 {
        self.ell
    }

    pub fn xi(&self, x: f64) -> f64 {
        let s = self.slope_sign * (x - self.x0).signum();
        s * (1.5 * area(&self.split, self.x0, x)).powf(2.0 / 3.0)
    }

    /// `ξ' = √(|g|/|ξ|)`, interpolated through the exact limit near x0.
    pub fn dxi(&self, x: f64) -> f64 {
        let delta = 0.02 * self.ell;
        let direct = |x: f64| (self.split.g(x).abs() / self.xi(x).abs()).sqrt();
        if (x - self.x0).abs() >= delta {
            return direct(x);
        }
        let mut xs = vec![self.x0];
        let mut ys = vec![self.slope];
        for k in 0..5 {
            for s in [-1.0, 1.0] {
                let t = self.x0 + s * delta * (1.0 + 0.5 * k as f64);
                if self.split.spec.domain().contains(t) {
                    xs.push(t);
                    ys.push(direct(t));
                }
            }
        }
        neville(&xs, &ys, x)
    }
}

/// ξ(x) about the turning point x0.
pub fn xi_of_x(split: &Splitting, x0: f64, x: f64) -> Result<f64> {
    if !split.spec.domain().contains(x) {
        return Err(Error::Domain { x });
    }
    Ok(AiryMap::new(split, x0)?.xi(x))
}

#[derive(Clone, Copy, Debug)]
enum Kind {
    /// Real pair with ζ = ∓ζ0 at x1, x2.
    Real {
        x1: f64,
        x2: f64,
        z0: f64,
        ell1: f64,
        ell2: f64,
    },
    /// Complex pair, ζ = 0 at x_m, `c = −ζ0²`.
    Complex {
        x_m: f64,
        c: f64,
    },
    Coalesced {
        x_m: f64,
    },
}

/// Where x sits relative to the map's reference points.
#[derive(Clone, Copy, Debug)]
pub struct ZetaPoint {
    pub zeta: f64,
    /// Comparison function value: `ζ² − ζ0²` for a well, `ζ0² − ζ²` for a
    /// barrier.
    pub f: f64,
}

/// The two-turning-point map, `ζ'² f(ζ) = g` with `f = σ(ζ² − ζ0²)` and
/// σ = +1 for a well, −1 for a barrier.
#[derive(Clone, Debug)]
pub struct ZetaMap {
    pub split: Splitting,
    zeta0_sq: f64,
    sigma: f64,
    kind: Kind,
    /// Total area between real turning points.
    total: f64,
}

impl ZetaMap {
    pub fn new(split: &Splitting, tps: &TurningPointSet) -> Result<Self> {
        let zeta0_sq = zeta0_squared(tps, split)?;
        let sigma = if tps.is_barrier() { -1.0 } else { 1.0 };
        let x_m = tps.x_m.unwrap_or(0.0);
        let ell = |x: f64| 1.0 / split.g_jet(x).deriv(1).abs().cbrt();
        let kind = match tps.points {
            TurningPoints::PairReal { x1, x2 } => {
                Kind::Real { x1, x2, z0: zeta0_sq.sqrt(), ell1: ell(x1), ell2: ell(x2) }
            }
            TurningPoints::PairComplexConj { .. } => Kind::Complex { x_m, c: -zeta0_sq },
            TurningPoints::Coalesced { x } => Kind::Coalesced { x_m: x },
            _ => unreachable!("zeta0_squared rejects other topologies"),
        };
        let total = std::f64::consts::FRAC_PI_2 * zeta0_sq.max(0.0);
        Ok(ZetaMap { split: split.clone(), zeta0_sq, sigma, kind, total })
    }

    pub fn zeta0_squared(&self) -> f64 {
        self.zeta0_sq
    }

    pub fn is_barrier(&self) -> bool {
        self.sigma < 0.0
    }

    /// The real turning points, if any.
    pub fn turning_points(&self) -> Option<(f64, f64)> {
        match self.kind {
            Kind::Real { x1, x2, .. } => Some((x1, x2)),
            _ => None,
        }
    }

    pub fn locate(&self, x: f64) -> ZetaPoint {
        let s = self.sigma;
        match self.kind {
            Kind::Real { x1, x2, z0, .. } => {
                let (zeta, f) = if x < x1 {
                    let w = self.outward(area(&self.split, x1, x), z0);
                    (-z0 - w, w * (2.0 * z0 + w))
                } else if x > x2 {
                    let w = self.outward(area(&self.split, x2, x), z0);
                    (z0 + w, w * (2.0 * z0 + w))
                } else {
                    let a1 = area(&self.split, x1, x);
                    if a1 <= 0.5 * self.total {
                        let w = self.inward(a1, z0);
                        (-z0 + w, -w * (2.0 * z0 - w))
                    } else {
                        let w = self.inward(area(&self.split, x2, x), z0);
                        (z0 - w, -w * (2.0 * z0 - w))
                    }
                };
                ZetaPoint { zeta, f: s * f }
            }
            Kind::Complex { x_m, c } => {
                let a = area(&self.split, x_m, x);
                let hi = (2.0 * a).sqrt().min(a / c.sqrt());
                let z = invert(|z| complex_area(z, c), |z| (z * z + c).sqrt(), a, hi, a / c.sqrt());
                let zeta = z * (x - x_m).signum();
                ZetaPoint { zeta, f: s * (zeta * zeta + c) }
            }
            Kind::Coalesced { x_m } => {
                let z = (2.0 * area(&self.split, x_m, x)).sqrt();
                let zeta = z * (x - x_m).signum();
                ZetaPoint { zeta, f: s * zeta * zeta }
            }
        }
    }

    fn inward(&self, a: f64, z0: f64) -> f64 {
        let guess = (1.5 * a / (2.0 * z0).sqrt()).powf(2.0 / 3.0);
        invert(|w| pair_area(w, z0, -1.0), |w| (w * (2.0 * z0 - w)).max(0.0).sqrt(), a, z0, guess)
    }

    fn outward(&self, a: f64, z0: f64) -> f64 {
        let hi = (2.0 * a).sqrt().min((1.5 * a / (2.0 * z0).sqrt()).powf(2.0 / 3.0));
        invert(|w| pair_area(w, z0, 1.0), |w| (w * (2.0 * z0 + w)).sqrt(), a, hi, hi)
    }

    pub fn zeta(&self, x: f64) -> f64 {
        self.locate(x).zeta
    }

    /// `ζ' = √(|g|/|f(ζ)|)`, interpolated through the exact limit at real
    /// turning points and at a coalesced pair.
    pub fn dzeta(&self, x: f64) -> f64 {
        let direct = |x: f64| (self.split.g(x).abs() / self.locate(x).f.abs()).sqrt();
        let near = match self.kind {
            Kind::Real { x1, x2, z0, ell1, ell2 } => {
                let g1 = |x: f64| self.split.g_jet(x).deriv(1).abs();
                if (x - x1).abs() < 0.02 * ell1 {
                    Some((x1, 0.02 * ell1, (g1(x1) / (2.0 * z0)).cbrt()))
                } else if (x - x2).abs() < 0.02 * ell2 {
                    Some((x2, 0.02 * ell2, (g1(x2) / (2.0 * z0)).cbrt()))
                } else {
                    None
                }
            }
            Kind::Coalesced { x_m } => {
                let g2 = self.split.g_jet(x_m).deriv(2).abs();
                let ell = g2.powf(-0.25);
                ((x - x_m).abs() < 0.02 * ell).then(|| (x_m, 0.02 * ell, (0.5 * g2).powf(0.25)))
            }
            Kind::Complex { .. } => None,
        };
        let Some((xi, delta, limit)) = near else { return direct(x) };
        let mut xs = vec![xi];
        let mut ys = vec![limit];
        for k in 0..5 {
            for s in [-1.0, 1.0] {
                let t = xi + s * delta * (1.0 + 0.5 * k as f64);
                if self.split.spec.domain().contains(t) {
                    xs.push(t);
                    ys.push(direct(t));
                }
            }
        }
        neville(&xs, &ys, x)
    }
}

/// ζ(x) for the pair described by `tps`.
pub fn zeta_of_x(split: &Splitting, tps: &TurningPointSet, x: f64) -> Result<f64> {
    if !split.spec.domain().contains(x) {
        return Err(Error::Domain { x });
    }
    Ok(ZetaMap::new(split, tps)?.zeta(x))
}

#![allow(clippy::excessive_precision)]
//! Adaptive Gauss-Kronrod (7/15) quadrature with global subdivision.

use num_complex::Complex64;
use std::ops::{Add, Mul, Sub};

const XGK: [f64; 8] = [
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
];
const WGK: [f64; 8] = [
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
];
const WG: [f64; 4] = [
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
];

/// Integrand values: real or complex.
pub trait QuadValue: Copy + Add<Output = Self> + Sub<Output = Self> + Mul<f64, Output = Self> {
    fn zero() -> Self;
    fn magnitude(self) -> f64;
}

impl QuadValue for f64 {
    fn zero() -> Self {
        0.0
    }
    fn magnitude(self) -> f64 {
        self.abs()
    }
}

impl QuadValue for Complex64 {
    fn zero() -> Self {
        Complex64::new(0.0, 0.0)
    }
    fn magnitude(self) -> f64 {
        self.norm()
    }
}

#[derive(Clone, Copy, Debug)]
pub struct QuadResult<T> {
    pub value: T,
    pub error: f64,
    pub evals: usize,
}

fn kronrod<T: QuadValue, F: FnMut(f64) -> T>(f: &mut F, a: f64, b: f64) -> (T, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut rk = fc * WGK[7];
    let mut rg = fc * WG[3];
    for j in 0..7 {
        let dx = h * XGK[j];
        let s = f(c - dx) + f(c + dx);
        rk = rk + s * WGK[j];
        if j % 2 == 1 {
            rg = rg + s * WG[j / 2];
        }
    }
    let err = ((rk - rg) * h).magnitude();
    (rk * h, err)
}

/// Integrate `f` over `[a, b]` to `max(abs_tol, rel_tol*|I|)`.
///
/// Never panics; when the subdivision budget runs out the best estimate is
/// returned and the reported error exceeds the tolerance.
pub fn integrate<T: QuadValue, F: FnMut(f64) -> T>(
    mut f: F,
    a: f64,
    b: f64,
    rel_tol: f64,
    abs_tol: f64,
) -> QuadResult<T> {
    if a == b {
        return QuadResult { value: T::zero(), error: 0.0, evals: 0 };
    }
    let max_intervals = 2000;
    let (v, e) = kronrod(&mut f, a, b);
    let mut parts = vec![(a, b, v, e)];
    let mut total = v;
    let mut err = e;
    let mut evals = 15;
    while err > abs_tol.max(rel_tol * total.magnitude()) && parts.len() < max_intervals {
        let (idx, _) = parts.iter().enumerate().max_by(|x, y| x.1 .3.total_cmp(&y.1 .3)).unwrap();
        let (lo, hi, pv, pe) = parts.swap_remove(idx);
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            parts.push((lo, hi, pv, pe));
            break;
        }
        let (v1, e1) = kronrod(&mut f, lo, mid);
        let (v2, e2) = kronrod(&mut f, mid, hi);
        evals += 30;
        total = total - pv + v1 + v2;
        parts.push((lo, mid, v1, e1));
        parts.push((mid, hi, v2, e2));
        err = parts.iter().map(|p| p.3).sum();
    }
    // re-sum to shed accumulated cancellation in `total`
    let value = parts.iter().fold(T::zero(), |s, p| s + p.2);
    QuadResult { value, error: err, evals }
}

/// Integral over `[a, b]` of an integrand with square-root behavior at both
/// ends, via `x = a + (b - a) sin²θ`.
pub fn integrate_sqrt_endpoints<T: QuadValue, F: FnMut(f64) -> T>(
    mut f: F,
    a: f64,
    b: f64,
    rel_tol: f64,
    abs_tol: f64,
) -> QuadResult<T> {
    let w = b - a;
    integrate(
        |t: f64| {
            let s = t.sin();
            let x = a + w * s * s;
            // near θ = π/2 use the complement to keep x - b accurate
            let x = if t > std::f64::consts::FRAC_PI_4 {
                let c = t.cos();
                b - w * c * c
            } else {
                x
            };
            f(x) * (w * (2.0 * t).sin())
        },
        0.0,
        std::f64::consts::FRAC_PI_2,
        rel_tol,
        abs_tol,
    )
}

/// Integral over `[a, ∞)` via `x = a + s·t/(1-t)`.
pub fn integrate_to_infinity<T: QuadValue, F: FnMut(f64) -> T>(
    mut f: F,
    a: f64,
    s: f64,
    rel_tol: f64,
    abs_tol: f64,
) -> QuadResult<T> {
    integrate(
        |t: f64| {
            let u = 1.0 - t;
            if u <= 0.0 {
                return T::zero();
            }
            let x = a + s * t / u;
            let v = f(x);
            if v.magnitude() == 0.0 {
                v
            } else {
                v * (s / (u * u))
            }
        },
        0.0,
        1.0,
        rel_tol,
        abs_tol,
    )
}

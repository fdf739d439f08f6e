//! Quadrature, root finding, ODE integration and small helpers.

pub mod ode;
pub mod quad;
pub mod roots;

/// Neville interpolation through `(xs[i], ys[i])` evaluated at `x`.
pub fn neville(xs: &[f64], ys: &[f64], x: f64) -> f64 {
    let mut p = ys.to_vec();
    let n = xs.len();
    for m in 1..n {
        for i in 0..n - m {
            p[i] = ((x - xs[i + m]) * p[i] + (xs[i] - x) * p[i + 1]) / (xs[i] - xs[i + m]);
        }
    }
    p[0]
}

/// Richardson-extrapolated central differences of `f` at `x`: returns
/// derivatives of order 1..=4. Orders 3 and 4 use step `10h` to keep
/// round-off below truncation error.
pub fn fd_derivatives<F: Fn(f64) -> f64>(f: F, x: f64, h: f64) -> [f64; 4] {
    let raw = |h: f64| {
        let f0 = f(x);
        let (p1, m1) = (f(x + h), f(x - h));
        let (p2, m2) = (f(x + 2.0 * h), f(x - 2.0 * h));
        [
            (p1 - m1) / (2.0 * h),
            (p1 - 2.0 * f0 + m1) / (h * h),
            (p2 - 2.0 * p1 + 2.0 * m1 - m2) / (2.0 * h * h * h),
            (p2 - 4.0 * p1 + 6.0 * f0 - 4.0 * m1 + m2) / (h * h * h * h),
        ]
    };
    let extrapolated = |h: f64| {
        let a = raw(h);
        let b = raw(0.5 * h);
        let mut out = [0.0; 4];
        for i in 0..4 {
            out[i] = (4.0 * b[i] - a[i]) / 3.0;
        }
        out
    };
    let low = extrapolated(h);
    let high = extrapolated(10.0 * h);
    [low[0], low[1], high[2], high[3]]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn neville_reproduces_cubic() {
        let xs = [0.0, 1.0, 2.0, 3.0];
        let ys: Vec<f64> = xs.iter().map(|x| x * x * x - x).collect();
        assert!((neville(&xs, &ys, 1.5) - (1.5f64.powi(3) - 1.5)).abs() < 1e-14);
    }

    #[test]
    fn finite_difference_derivatives_of_exp() {
        let d = fd_derivatives(|x: f64| (2.0 * x).exp(), 0.1, 1.1e-3);
        let e = 0.2f64.exp();
        let want = [2.0 * e, 4.0 * e, 8.0 * e, 16.0 * e];
        for i in 0..4 {
            assert!((d[i] - want[i]).abs() < 1e-6 * want[i], "{i}: {} vs {}", d[i], want[i]);
        }
    }
}

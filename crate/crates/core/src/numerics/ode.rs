//! Dormand-Prince 5(4) with PI step control.

use crate::error::{Error, Result};

const C: [f64; 7] = [0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
const B: [f64; 7] = [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0, 0.0];
const BS: [f64; 7] =
    [5179.0 / 57600.0, 0.0, 7571.0 / 16695.0, 393.0 / 640.0, -92097.0 / 339200.0, 187.0 / 2100.0, 1.0 / 40.0];

#[derive(Clone, Copy, Debug)]
pub struct OdeStats {
    pub accepted: usize,
    pub rejected: usize,
}

/// Integrate `y' = f(t, y)` from `t0` to `t1` (either direction).
pub fn dopri5<const N: usize, F: FnMut(f64, &[f64; N]) -> [f64; N]>(
    mut f: F,
    t0: f64,
    y0: [f64; N],
    t1: f64,
    rtol: f64,
    atol: f64,
    h0: f64,
) -> Result<([f64; N], OdeStats)> {
    let mut stats = OdeStats { accepted: 0, rejected: 0 };
    if t0 == t1 {
        return Ok((y0, stats));
    }
    let dir = (t1 - t0).signum();
    let span = (t1 - t0).abs();
    let mut h = h0.abs().min(span) * dir;
    let mut t = t0;
    let mut y = y0;
    let mut k = [[0.0; N]; 7];
    k[0] = f(t, &y);
    let mut err_prev: f64 = 1e-4;
    let max_steps = 5_000_000;
    while (t1 - t) * dir > 0.0 {
        if stats.accepted + stats.rejected > max_steps {
            return Err(Error::Convergence("ODE step budget exhausted".into()));
        }
        if (t + h - t1) * dir > 0.0 {
            h = t1 - t;
        }
        if h.abs() < 1e-14 * span.max(t.abs()) {
            return Err(Error::Convergence(format!("ODE step size collapsed at t = {t}")));
        }
        for s in 1..7 {
            let mut ys = y;
            for i in 0..N {
                let mut acc = 0.0;
                for j in 0..s {
                    acc += A[s][j] * k[j][i];
                }
                ys[i] += h * acc;
            }
            k[s] = f(t + C[s] * h, &ys);
        }
        let mut ynew = y;
        let mut err: f64 = 0.0;
        for i in 0..N {
            let mut hi = 0.0;
            let mut lo = 0.0;
            for s in 0..7 {
                hi += B[s] * k[s][i];
                lo += BS[s] * k[s][i];
            }
            ynew[i] = y[i] + h * hi;
            let sc = atol + rtol * y[i].abs().max(ynew[i].abs());
            let e = h * (hi - lo) / sc;
            err += e * e;
        }
        let err = (err / N as f64).sqrt();
        if err <= 1.0 {
            t += h;
            y = ynew;
            k[0] = k[6];
            stats.accepted += 1;
            let fac = 0.9 * err.max(1e-10).powf(-0.7 / 5.0) * err_prev.powf(0.4 / 5.0);
            h *= fac.clamp(0.2, 5.0);
            err_prev = err.max(1e-4);
        } else {
            stats.rejected += 1;
            h *= (0.9 * err.powf(-0.2)).max(0.2);
        }
    }
    Ok((y, stats))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn harmonic_motion_one_period() {
        let (y, _) =
            dopri5(|_t, y: &[f64; 2]| [y[1], -y[0]], 0.0, [1.0, 0.0], 2.0 * std::f64::consts::PI, 1e-12, 1e-14, 0.01)
                .unwrap();
        assert!((y[0] - 1.0).abs() < 1e-10 && y[1].abs() < 1e-10);
    }

    #[test]
    fn backward_exponential() {
        let (y, _) = dopri5(|_t, y: &[f64; 1]| [y[0]], 1.0, [1.0], 0.0, 1e-12, 0.0, 0.1).unwrap();
        assert!((y[0] - (-1f64).exp()).abs() < 1e-11);
    }
}

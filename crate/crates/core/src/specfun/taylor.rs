//! Taylor-series propagation for `w'' = (p0 + p1 z + p2 z²) w`.
//!
//! Covers the Airy equation and both parabolic-cylinder equations. The
//! solution is carried as a mantissa pair with a separate log-scale so
//! that growing solutions never overflow.

#[derive(Clone, Copy, Debug)]
pub struct QuadraticCoeff {
    pub p0: f64,
    pub p1: f64,
    pub p2: f64,
}

impl QuadraticCoeff {
    pub fn at(&self, z: f64) -> f64 {
        self.p0 + z * (self.p1 + z * self.p2)
    }
}

/// `(w, w')` at some abscissa, true value `= mantissa · exp(log_scale)`.
#[derive(Clone, Copy, Debug)]
pub struct ScaledPair {
    pub w: f64,
    pub dw: f64,
    pub log_scale: f64,
    /// Accumulated relative error estimate.
    pub rel_err: f64,
}

impl ScaledPair {
    pub fn new(w: f64, dw: f64) -> Self {
        ScaledPair { w, dw, log_scale: 0.0, rel_err: 0.0 }
    }

    fn renormalize(&mut self) {
        let m = self.w.abs().max(self.dw.abs());
        if m > 0.0 && !(1e-100..=1e100).contains(&m) {
            let l = m.ln();
            self.w /= m;
            self.dw /= m;
            self.log_scale += l;
        }
    }
}

/// One Taylor step of length `h` from `z0`. Returns the new pair and the sum
/// of absolute term magnitudes (for cancellation estimates).
pub fn taylor_step(eq: &QuadraticCoeff, z0: f64, w0: f64, dw0: f64, h: f64) -> (f64, f64, f64) {
    if h == 0.0 {
        return (w0, dw0, w0.abs());
    }
    let q0 = eq.at(z0);
    let q1 = eq.p1 + 2.0 * eq.p2 * z0;
    let q2 = eq.p2;
    // c[j] carries coefficient times h^j
    let (mut cm2, mut cm1, mut c0, mut c1) = (0.0, 0.0, w0, dw0 * h);
    let mut w = c0 + c1;
    let mut dw = dw0;
    let mut mag = c0.abs() + c1.abs();
    let h2 = h * h;
    let mut small = 0;
    let mut j = 0usize;
    loop {
        let jf = j as f64;
        let c2 = (q0 * h2 * c0 + q1 * h2 * h * cm1 + q2 * h2 * h2 * cm2) / ((jf + 2.0) * (jf + 1.0));
        w += c2;
        dw += (jf + 2.0) * c2 / h;
        mag += c2.abs();
        let scale = w.abs().max(dw.abs() * h.abs()).max(1e-300);
        if c2.abs() <= 1e-18 * scale && c1.abs() <= 1e-18 * scale {
            small += 1;
            if small >= 3 {
                break;
            }
        } else {
            small = 0;
        }
        cm2 = cm1;
        cm1 = c0;
        c0 = c1;
        c1 = c2;
        j += 1;
        if j > 400 {
            break;
        }
    }
    (w, dw, mag)
}

/// Propagate from `z0` to `z1` in steps sized by the local coefficient.
pub fn propagate(eq: &QuadraticCoeff, z0: f64, start: ScaledPair, z1: f64) -> ScaledPair {
    let mut z = z0;
    let mut p = start;
    let dir = (z1 - z0).signum();
    while (z1 - z) * dir > 0.0 {
        let q = eq.at(z).abs();
        let q1 = (eq.p1 + 2.0 * eq.p2 * z).abs();
        let mut h = 0.5f64;
        if q > 0.0 {
            h = h.min(1.0 / q.sqrt());
        }
        if q1 > 0.0 {
            h = h.min(1.0 / q1.cbrt());
        }
        let mut h = h * dir;
        if (z + h - z1) * dir > 0.0 {
            h = z1 - z;
        }
        let (w, dw, mag) = taylor_step(eq, z, p.w, p.dw, h);
        let size = w.abs().max(dw.abs() * h.abs()).max(1e-300);
        p.rel_err += 4.0 * f64::EPSILON * (1.0 + mag / size);
        p.w = w;
        p.dw = dw;
        p.renormalize();
        z += h;
    }
    p
}

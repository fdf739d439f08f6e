//! Gamma-function helpers.

use num_complex::Complex64;

/// `(ln|Γ(x)|, sign Γ(x))`; sign is 0 at the poles.
pub fn lgamma_sign(x: f64) -> (f64, f64) {
    if x <= 0.0 && x == x.floor() {
        return (f64::INFINITY, 0.0);
    }
    let (v, s) = libm::lgamma_r(x);
    (v, s as f64)
}

/// `ln Γ(z)` for `Re z > 0`.
pub fn ln_gamma_complex(z: Complex64) -> Complex64 {
    let mut z = z;
    let mut shift = Complex64::new(0.0, 0.0);
    while z.re < 15.0 {
        shift += z.ln();
        z += 1.0;
    }
    const B: [f64; 7] = [1.0 / 6.0, -1.0 / 30.0, 1.0 / 42.0, -1.0 / 30.0, 5.0 / 66.0, -691.0 / 2730.0, 7.0 / 6.0];
    let mut s = (z - 0.5) * z.ln() - z + 0.5 * (2.0 * std::f64::consts::PI).ln();
    let zi = 1.0 / z;
    let z2 = zi * zi;
    let mut p = zi;
    for (k, b) in B.iter().enumerate() {
        let n = 2.0 * (k + 1) as f64;
        s += p * (b / (n * (n - 1.0)));
        p *= z2;
    }
    s - shift
}

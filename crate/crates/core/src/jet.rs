//! Truncated Taylor arithmetic.
//!
//! Catalog potentials are written once against [`Analytic`] and evaluated on
//! `f64`, `Complex64` or [`Jet`]; the jet gives exact derivatives through
//! fifth order.

use num_complex::Complex64;
use std::ops::{Add, Div, Mul, Neg, Sub};

pub const JET_LEN: usize = 6;

/// Normalized Taylor coefficients `c[k] = f^(k)(x0) / k!`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Jet {
    pub c: [f64; JET_LEN],
}

impl Jet {
    pub fn constant(v: f64) -> Self {
        let mut c = [0.0; JET_LEN];
        c[0] = v;
        Jet { c }
    }

    /// The identity function expanded about `x0`.
    pub fn variable(x0: f64) -> Self {
        let mut c = [0.0; JET_LEN];
        c[0] = x0;
        c[1] = 1.0;
        Jet { c }
    }

    pub fn value(&self) -> f64 {
        self.c[0]
    }

    /// k-th derivative at the expansion point.
    pub fn deriv(&self, k: usize) -> f64 {
        let mut f = 1.0;
        for i in 2..=k {
            f *= i as f64;
        }
        self.c[k] * f
    }

    fn scale(self, s: f64) -> Self {
        let mut c = self.c;
        c.iter_mut().for_each(|v| *v *= s);
        Jet { c }
    }
}

impl Add for Jet {
    type Output = Jet;
    fn add(self, o: Jet) -> Jet {
        let mut c = self.c;
        for (a, b) in c.iter_mut().zip(o.c) {
            *a += b;
        }
        Jet { c }
    }
}

impl Sub for Jet {
    type Output = Jet;
    fn sub(self, o: Jet) -> Jet {
        self + (-o)
    }
}

impl Neg for Jet {
    type Output = Jet;
    fn neg(self) -> Jet {
        self.scale(-1.0)
    }
}

impl Mul for Jet {
    type Output = Jet;
    fn mul(self, o: Jet) -> Jet {
        let mut c = [0.0; JET_LEN];
        for (k, ck) in c.iter_mut().enumerate() {
            *ck = (0..=k).map(|j| self.c[j] * o.c[k - j]).sum();
        }
        Jet { c }
    }
}

impl Div for Jet {
    type Output = Jet;
    fn div(self, o: Jet) -> Jet {
        let mut c = [0.0; JET_LEN];
        for k in 0..JET_LEN {
            let s: f64 = (1..=k).map(|j| o.c[j] * c[k - j]).sum();
            c[k] = (self.c[k] - s) / o.c[0];
        }
        Jet { c }
    }
}

/// Scalar types the catalog formulas can be evaluated on.
pub trait Analytic:
    Copy + Add<Output = Self> + Sub<Output = Self> + Mul<Output = Self> + Div<Output = Self> + Neg<Output = Self>
{
    fn from_f64(v: f64) -> Self;
    fn exp(self) -> Self;
    /// Real part of the expansion point, used for branch choices.
    fn re(self) -> f64;

    fn sqr(self) -> Self {
        self * self
    }

    fn recip(self) -> Self {
        Self::from_f64(1.0) / self
    }

    /// sech², evaluated through exp(-2|y|) to stay finite for large |y|.
    fn sech2(self) -> Self {
        let s = if self.re() >= 0.0 { -2.0 } else { 2.0 };
        let t = (self * Self::from_f64(s)).exp();
        let one = Self::from_f64(1.0);
        Self::from_f64(4.0) * t / (one + t).sqr()
    }

    fn csch2(self) -> Self {
        let s = if self.re() >= 0.0 { -2.0 } else { 2.0 };
        let t = (self * Self::from_f64(s)).exp();
        let one = Self::from_f64(1.0);
        Self::from_f64(4.0) * t / (one - t).sqr()
    }

    fn coth(self) -> Self {
        let (s, sg) = if self.re() >= 0.0 { (-2.0, 1.0) } else { (2.0, -1.0) };
        let t = (self * Self::from_f64(s)).exp();
        let one = Self::from_f64(1.0);
        Self::from_f64(sg) * (one + t) / (one - t)
    }
}

impl Analytic for f64 {
    fn from_f64(v: f64) -> Self {
        v
    }
    fn exp(self) -> Self {
        f64::exp(self)
    }
    fn re(self) -> f64 {
        self
    }
}

impl Analytic for Complex64 {
    fn from_f64(v: f64) -> Self {
        Complex64::new(v, 0.0)
    }
    fn exp(self) -> Self {
        Complex64::exp(self)
    }
    fn re(self) -> f64 {
        self.re
    }
}

impl Analytic for Jet {
    fn from_f64(v: f64) -> Self {
        Jet::constant(v)
    }
    fn exp(self) -> Self {
        let mut c = [0.0; JET_LEN];
        c[0] = self.c[0].exp();
        for k in 1..JET_LEN {
            let s: f64 = (1..=k).map(|j| j as f64 * self.c[j] * c[k - j]).sum();
            c[k] = s / k as f64;
        }
        Jet { c }
    }
    fn re(self) -> f64 {
        self.c[0]
    }
}

//! Solutions of the comparison equations: Airy and parabolic cylinder
//! functions, plus an independent ODE oracle for testing them.

mod airy;
pub mod gamma;
mod pcf;
pub mod taylor;

pub use airy::{airy_ai, airy_ai_prime, airy_ai_scaled, airy_bi, airy_bi_prime, airy_bi_scaled};
pub use pcf::{
    ode_comparison_oracle, ode_comparison_oracle_w, pcf_u, pcf_u_pair, pcf_ubar, pcf_ubar_pair, pcf_w, pcf_w_neg,
    pcf_w_pair, MAX_ABS_A,
};

use serde::Serialize;
use taylor::ScaledPair;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Regime {
    Series,
    Asymptotic,
    OdeContinued,
}

/// A real special-function value `value · exp(log_scale)` with an absolute
/// error estimate on `value`. `log_scale` is zero unless the value would
/// leave f64 range.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SpecFunValue {
    pub value: f64,
    pub error: f64,
    pub log_scale: f64,
    pub regime: Regime,
}

impl SpecFunValue {
    pub(crate) fn from_pair(p: &ScaledPair, derivative: bool, regime: Regime) -> Self {
        let m = if derivative { p.dw } else { p.w };
        let size = p.w.abs().max(p.dw.abs());
        Self::from_parts(m, size * p.rel_err, p.log_scale, regime)
    }

    fn from_parts(m: f64, err: f64, log_scale: f64, regime: Regime) -> Self {
        if log_scale.abs() < 600.0 {
            let f = log_scale.exp();
            SpecFunValue { value: m * f, error: err * f, log_scale: 0.0, regime }
        } else {
            SpecFunValue { value: m, error: err, log_scale, regime }
        }
    }

    /// The unscaled value; may overflow to ±inf or underflow to 0.
    pub fn full(&self) -> f64 {
        if self.log_scale == 0.0 {
            self.value
        } else {
            self.value * self.log_scale.exp()
        }
    }
}

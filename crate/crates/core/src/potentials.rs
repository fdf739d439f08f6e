//! Potential catalog, physical parameters and the q(x) selection rules.
//!
//! The Schrödinger equation is written as `ψ'' = (g + q) ψ` with
//! `g + q = 2m(V − E)/ħ²`. The catalog q are E-independent, so it is
//! convenient to carry the effective potential `U = V − ħ² q / 2m`, in terms
//! of which `g = 2m(U − E)/ħ²`.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use num_complex::Complex64;
use serde::Serialize;

use crate::jet::{Analytic, Jet, JET_LEN};
use crate::numerics::fd_derivatives;
use crate::numerics::roots::brent;
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum PotentialKind {
    Hydrogen,
    OscillatorD,
    Morse,
    PoschlTellerWell,
    PoschlTellerBarrier,
    Eckart,
    PureOscillator1d,
    UserDefined,
}

impl PotentialKind {
    pub const CATALOG: [PotentialKind; 7] = [
        PotentialKind::Hydrogen,
        PotentialKind::OscillatorD,
        PotentialKind::Morse,
        PotentialKind::PoschlTellerWell,
        PotentialKind::PoschlTellerBarrier,
        PotentialKind::Eckart,
        PotentialKind::PureOscillator1d,
    ];

    pub fn name(self) -> &'static str {
        match self {
            PotentialKind::Hydrogen => "hydrogen",
            PotentialKind::OscillatorD => "oscillator-d",
            PotentialKind::Morse => "morse",
            PotentialKind::PoschlTellerWell => "poschl-teller-well",
            PotentialKind::PoschlTellerBarrier => "poschl-teller-barrier",
            PotentialKind::Eckart => "eckart",
            PotentialKind::PureOscillator1d => "pure-oscillator-1d",
            PotentialKind::UserDefined => "user-defined",
        }
    }

    /// Parameter keys that apply to this kind, beyond `m` and `hbar`.
    pub fn param_keys(self) -> &'static [&'static str] {
        match self {
            PotentialKind::Hydrogen => &["e", "l"],
            PotentialKind::OscillatorD => &["omega", "l", "D"],
            PotentialKind::Morse | PotentialKind::Eckart => &["v0", "v1", "alpha"],
            PotentialKind::PoschlTellerWell | PotentialKind::PoschlTellerBarrier => &["v0", "alpha"],
            PotentialKind::PureOscillator1d => &["omega"],
            PotentialKind::UserDefined => &[],
        }
    }

    /// Whether the kind has closed-form exact and WKB spectra.
    pub fn has_closed_forms(self) -> bool {
        !matches!(self, PotentialKind::UserDefined)
    }
}

impl fmt::Display for PotentialKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for PotentialKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        PotentialKind::CATALOG
            .iter()
            .chain(std::iter::once(&PotentialKind::UserDefined))
            .find(|k| k.name() == s)
            .copied()
            .ok_or_else(|| {
                let names: Vec<_> = PotentialKind::CATALOG.iter().map(|k| k.name()).collect();
                Error::InvalidParams(format!("unknown potential '{s}'; valid: {}", names.join(", ")))
            })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Domain {
    HalfLine,
    FullLine,
}

impl Domain {
    pub fn contains(self, x: f64) -> bool {
        match self {
            Domain::HalfLine => x > 0.0 && x < f64::INFINITY,
            Domain::FullLine => x.is_finite(),
        }
    }

    pub fn lower(self) -> f64 {
        match self {
            Domain::HalfLine => 0.0,
            Domain::FullLine => f64::NEG_INFINITY,
        }
    }
}

/// Mass, ħ and the potential-specific constants. Unused fields are ignored.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct PhysicalParams {
    pub m: f64,
    pub hbar: f64,
    pub e: f64,
    pub omega: f64,
    pub l: u32,
    #[serde(rename = "D")]
    pub d: u32,
    pub v0: f64,
    pub v1: f64,
    pub alpha: f64,
}

impl Default for PhysicalParams {
    fn default() -> Self {
        PhysicalParams { m: 1.0, hbar: 1.0, e: 1.0, omega: 1.0, l: 0, d: 3, v0: 0.0, v1: 0.0, alpha: 1.0 }
    }
}

impl PhysicalParams {
    /// Defaults used by the CLI when a key is not given.
    pub fn defaults_for(kind: PotentialKind) -> Self {
        let mut p = PhysicalParams::default();
        match kind {
            PotentialKind::Morse => {
                p.v0 = 1.0;
                p.v1 = -2.0;
            }
            PotentialKind::PoschlTellerWell => p.v0 = -10.0,
            PotentialKind::PoschlTellerBarrier => p.v0 = 2.5,
            PotentialKind::Eckart => {
                p.v0 = 1.0;
                p.v1 = -4.0;
            }
            _ => {}
        }
        p
    }

    /// Set one `key=value` entry, rejecting keys that do not apply to `kind`.
    pub fn set(&mut self, kind: PotentialKind, key: &str, value: &str) -> Result<()> {
        let keys = kind.param_keys();
        if key != "m" && key != "hbar" && !keys.contains(&key) {
            return Err(Error::InvalidParams(format!(
                "parameter '{key}' does not apply to {kind}; valid: m, hbar{}{}",
                if keys.is_empty() { "" } else { ", " },
                keys.join(", ")
            )));
        }
        let bad = || Error::InvalidParams(format!("parameter {key} = '{value}' is not a valid number"));
        if key == "l" || key == "D" {
            let n: u32 = value.parse().map_err(|_| bad())?;
            if key == "l" {
                self.l = n;
            } else {
                self.d = n;
            }
            return Ok(());
        }
        let v: f64 = value.parse().map_err(|_| bad())?;
        match key {
            "m" => self.m = v,
            "hbar" => self.hbar = v,
            "e" => self.e = v,
            "omega" => self.omega = v,
            "v0" => self.v0 = v,
            "v1" => self.v1 = v,
            "alpha" => self.alpha = v,
            _ => unreachable!(),
        }
        Ok(())
    }

    /// The applicable parameters as `(key, value)` pairs, for reporting.
    pub fn entries(&self, kind: PotentialKind) -> Vec<(&'static str, f64)> {
        let mut out = vec![("m", self.m), ("hbar", self.hbar)];
        for &k in kind.param_keys() {
            let v = match k {
                "e" => self.e,
                "omega" => self.omega,
                "l" => self.l as f64,
                "D" => self.d as f64,
                "v0" => self.v0,
                "v1" => self.v1,
                "alpha" => self.alpha,
                _ => unreachable!(),
            };
            out.push((k, v));
        }
        out
    }

    fn validate(&self, kind: PotentialKind) -> Result<()> {
        let positive = |name: &str, v: f64| {
            if v > 0.0 && v.is_finite() {
                Ok(())
            } else {
                Err(Error::InvalidParams(format!("{name} must be positive and finite, got {v}")))
            }
        };
        positive("m", self.m)?;
        positive("hbar", self.hbar)?;
        for (k, v) in self.entries(kind) {
            if !v.is_finite() {
                return Err(Error::InvalidParams(format!("{k} must be finite, got {v}")));
            }
        }
        match kind {
            PotentialKind::Hydrogen => positive("e", self.e)?,
            PotentialKind::OscillatorD => {
                positive("omega", self.omega)?;
                if self.d < 2 {
                    return Err(Error::InvalidParams(
                        "D must be at least 2 (use pure-oscillator-1d for one dimension)".into(),
                    ));
                }
            }
            PotentialKind::PureOscillator1d => positive("omega", self.omega)?,
            PotentialKind::Morse => {
                positive("alpha", self.alpha)?;
                positive("v0", self.v0)?;
            }
            PotentialKind::PoschlTellerWell => {
                positive("alpha", self.alpha)?;
                if self.v0 >= 0.0 {
                    return Err(Error::InvalidParams(format!("poschl-teller-well needs v0 < 0, got {}", self.v0)));
                }
            }
            PotentialKind::PoschlTellerBarrier => {
                positive("alpha", self.alpha)?;
                positive("v0", self.v0)?;
            }
            PotentialKind::Eckart => {
                positive("alpha", self.alpha)?;
                if 1.0 + 8.0 * self.m * self.v0 / (self.alpha * self.hbar).powi(2) < 0.0 {
                    return Err(Error::InvalidParams("eckart needs 1 + 8 m v0 / (α ħ)² ≥ 0".into()));
                }
            }
            PotentialKind::UserDefined => {}
        }
        Ok(())
    }

    fn alpha_hbar2(&self) -> f64 {
        (self.alpha * self.hbar).powi(2)
    }
}

/// A potential supplied as a plain function of x.
#[derive(Clone)]
pub struct UserPotential {
    pub name: String,
    pub v: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
    pub domain: Domain,
    /// 0, or 2 for a `1/x²` pole at the origin of a half-line problem.
    pub pole_order: u32,
    /// Continuum level; `None` for a confining potential.
    pub threshold: Option<f64>,
    /// Seed for the extreme-point search.
    pub extreme_hint: Option<f64>,
}

impl fmt::Debug for UserPotential {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("UserPotential")
            .field("name", &self.name)
            .field("domain", &self.domain)
            .field("pole_order", &self.pole_order)
            .field("threshold", &self.threshold)
            .finish()
    }
}

/// Large-x behavior of the potential relative to its continuum level.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Tail {
    Confining,
    Coulomb,
    ShortRange,
}

#[derive(Clone, Debug)]
pub struct PotentialSpec {
    pub kind: PotentialKind,
    pub params: PhysicalParams,
    user: Option<UserPotential>,
}

impl PotentialSpec {
    pub fn new(kind: PotentialKind, params: PhysicalParams) -> Result<Self> {
        if kind == PotentialKind::UserDefined {
            return Err(Error::InvalidParams("user-defined potentials are built with PotentialSpec::user".into()));
        }
        params.validate(kind)?;
        Ok(PotentialSpec { kind, params, user: None })
    }

    /// A user-defined potential; only `m` and `hbar` of `params` are used.
    pub fn user(user: UserPotential, params: PhysicalParams) -> Result<Self> {
        params.validate(PotentialKind::UserDefined)?;
        if user.pole_order != 0 && user.pole_order != 2 {
            return Err(Error::Unsupported(format!("pole of order {} at the origin", user.pole_order)));
        }
        if user.pole_order == 2 && user.domain != Domain::HalfLine {
            return Err(Error::Unsupported("a second-order pole needs the half-line domain".into()));
        }
        Ok(PotentialSpec { kind: PotentialKind::UserDefined, params, user: Some(user) })
    }

    pub fn domain(&self) -> Domain {
        match self.kind {
            PotentialKind::Hydrogen | PotentialKind::OscillatorD | PotentialKind::Eckart => Domain::HalfLine,
            PotentialKind::UserDefined => self.user.as_ref().map(|u| u.domain).unwrap_or(Domain::FullLine),
            _ => Domain::FullLine,
        }
    }

    pub fn pole_order(&self) -> u32 {
        match self.kind {
            PotentialKind::Hydrogen | PotentialKind::OscillatorD | PotentialKind::Eckart => 2,
            PotentialKind::UserDefined => self.user.as_ref().map(|u| u.pole_order).unwrap_or(0),
            _ => 0,
        }
    }

    /// Coefficient c of the origin pole `V ~ ħ² c / (2 m x²)`.
    pub fn pole_strength(&self) -> f64 {
        let p = &self.params;
        match self.kind {
            PotentialKind::Hydrogen => (p.l * (p.l + 1)) as f64,
            PotentialKind::OscillatorD => oscillator_l2(p),
            PotentialKind::Eckart => 2.0 * p.m * p.v0 / p.alpha_hbar2(),
            PotentialKind::UserDefined if self.pole_order() == 2 => {
                let x = 1e-7;
                2.0 * p.m * x * x * self.v_f64(x) / (p.hbar * p.hbar)
            }
            _ => 0.0,
        }
    }

    /// Continuum threshold; `+∞` for confining potentials.
    pub fn threshold(&self) -> f64 {
        match self.kind {
            PotentialKind::OscillatorD | PotentialKind::PureOscillator1d => f64::INFINITY,
            PotentialKind::Eckart => self.params.v1,
            PotentialKind::UserDefined => self.user.as_ref().and_then(|u| u.threshold).unwrap_or(f64::INFINITY),
            _ => 0.0,
        }
    }

    pub fn tail(&self) -> Tail {
        match self.kind {
            PotentialKind::Hydrogen => Tail::Coulomb,
            _ if self.threshold().is_infinite() => Tail::Confining,
            _ => Tail::ShortRange,
        }
    }

    /// Natural length unit of the problem.
    pub fn length_scale(&self) -> f64 {
        let p = &self.params;
        match self.kind {
            PotentialKind::Hydrogen => p.hbar * p.hbar / (p.m * p.e * p.e),
            PotentialKind::OscillatorD | PotentialKind::PureOscillator1d => (p.hbar / (p.m * p.omega)).sqrt(),
            PotentialKind::UserDefined => 1.0,
            _ => 1.0 / p.alpha,
        }
    }

    /// Natural energy unit, `ħ² / (m L²)`.
    pub fn energy_scale(&self) -> f64 {
        let l = self.length_scale();
        self.params.hbar * self.params.hbar / (self.params.m * l * l)
    }

    /// `2m/ħ²`.
    pub fn k2_factor(&self) -> f64 {
        2.0 * self.params.m / (self.params.hbar * self.params.hbar)
    }

    pub fn user_potential(&self) -> Option<&UserPotential> {
        self.user.as_ref()
    }

    /// Catalog potential on any analytic scalar; `None` for user-defined.
    pub fn v_analytic<T: Analytic>(&self, x: T) -> Option<T> {
        let p = &self.params;
        let c = T::from_f64;
        let v = match self.kind {
            PotentialKind::Hydrogen => {
                let r = x.recip();
                c(-p.e * p.e) * r + c(p.hbar * p.hbar * (p.l * (p.l + 1)) as f64 / (2.0 * p.m)) * r.sqr()
            }
            PotentialKind::OscillatorD => {
                c(0.5 * p.m * p.omega * p.omega) * x.sqr()
                    + c(p.hbar * p.hbar * oscillator_l2(p) / (2.0 * p.m)) * x.sqr().recip()
            }
            PotentialKind::Morse => {
                let t = (x * c(-p.alpha)).exp();
                c(p.v0) * t.sqr() + c(p.v1) * t
            }
            PotentialKind::PoschlTellerWell | PotentialKind::PoschlTellerBarrier => c(p.v0) * (x * c(p.alpha)).sech2(),
            PotentialKind::Eckart => {
                let y = x * c(p.alpha);
                c(p.v0) * y.csch2() + c(p.v1) * y.coth()
            }
            PotentialKind::PureOscillator1d => c(0.5 * p.m * p.omega * p.omega) * x.sqr(),
            PotentialKind::UserDefined => return None,
        };
        Some(v)
    }

    fn v_f64(&self, x: f64) -> f64 {
        match &self.user {
            Some(u) => (u.v)(x),
            None => self.v_analytic(x).unwrap(),
        }
    }

    /// `V` and its derivatives at x as a jet; finite differences for
    /// user-defined potentials.
    pub fn v_jet(&self, x: f64) -> Jet {
        match &self.user {
            Some(u) => {
                let f = u.v.clone();
                jet_from_fd(|t| f(t), x, u.domain)
            }
            None => self.v_analytic(Jet::variable(x)).unwrap(),
        }
    }
}

/// `L² = l(D+l−2) + (D−1)(D−3)/4`.
fn oscillator_l2(p: &PhysicalParams) -> f64 {
    let (l, d) = (p.l as f64, p.d as f64);
    l * (d + l - 2.0) + (d - 1.0) * (d - 3.0) / 4.0
}

/// Jet built from finite-difference derivatives with step `(|x|+1)·10⁻³`,
/// shrunk near the origin of a half-line so the stencil stays inside.
fn jet_from_fd<F: Fn(f64) -> f64>(f: F, x: f64, domain: Domain) -> Jet {
    let mut h = (x.abs() + 1.0) * 1e-3;
    if domain == Domain::HalfLine {
        h = h.min(x / 50.0);
    }
    let d = fd_derivatives(&f, x, h);
    let mut c = [0.0; JET_LEN];
    c[0] = f(x);
    let mut fact = 1.0;
    for k in 1..=4 {
        fact *= k as f64;
        c[k] = d[k - 1] / fact;
    }
    Jet { c }
}

/// `V(x)` with a domain check.
pub fn eval_potential(spec: &PotentialSpec, x: f64) -> Result<f64> {
    if !spec.domain().contains(x) {
        return Err(Error::Domain { x });
    }
    let v = spec.v_f64(x);
    if v.is_finite() {
        Ok(v)
    } else {
        Err(Error::Domain { x })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum QProvenance {
    PoleRule,
    ExtremeRule,
    Zero,
    User,
}

/// The q(x) term of a splitting.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum QFunction {
    Zero,
    /// `c / x²`.
    InverseSquare {
        c: f64,
    },
    /// `a · sech²(αx)`.
    Sech2 {
        a: f64,
        alpha: f64,
    },
    /// `a · csch²(αx)`.
    Csch2 {
        a: f64,
        alpha: f64,
    },
    /// `pole · (−1/4x²) + delta · exp(−((x − x_m)/width)²)`.
    Bump {
        pole: bool,
        delta: f64,
        x_m: f64,
        width: f64,
    },
}

impl QFunction {
    pub fn eval<T: Analytic>(&self, x: T) -> T {
        let c = T::from_f64;
        match *self {
            QFunction::Zero => c(0.0),
            QFunction::InverseSquare { c: k } => c(k) * x.sqr().recip(),
            QFunction::Sech2 { a, alpha } => c(a) * (x * c(alpha)).sech2(),
            QFunction::Csch2 { a, alpha } => c(a) * (x * c(alpha)).csch2(),
            QFunction::Bump { pole, delta, x_m, width } => {
                let u = (x - c(x_m)) * c(1.0 / width);
                let bump = c(delta) * (-u.sqr()).exp();
                if pole {
                    c(-0.25) * x.sqr().recip() + bump
                } else {
                    bump
                }
            }
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SelectedQ {
    pub q: QFunction,
    pub provenance: QProvenance,
}

/// Closed-form q for catalog kinds; pole-plus-bump completion for
/// user-defined potentials.
pub fn select_q(spec: &PotentialSpec) -> Result<SelectedQ> {
    let p = &spec.params;
    let (q, provenance) = match spec.kind {
        PotentialKind::Hydrogen | PotentialKind::OscillatorD => {
            (QFunction::InverseSquare { c: -0.25 }, QProvenance::PoleRule)
        }
        PotentialKind::Morse | PotentialKind::PureOscillator1d => (QFunction::Zero, QProvenance::Zero),
        PotentialKind::PoschlTellerWell | PotentialKind::PoschlTellerBarrier => {
            (QFunction::Sech2 { a: p.alpha * p.alpha / 4.0, alpha: p.alpha }, QProvenance::ExtremeRule)
        }
        PotentialKind::Eckart => {
            (QFunction::Csch2 { a: -p.alpha * p.alpha / 4.0, alpha: p.alpha }, QProvenance::PoleRule)
        }
        PotentialKind::UserDefined => return select_user_q(spec),
    };
    Ok(SelectedQ { q, provenance })
}

/// Completion `q = q_pole + δ·bump`, with δ solved for so the extreme-point
/// value holds at the extreme of the resulting g.
fn select_user_q(spec: &PotentialSpec) -> Result<SelectedQ> {
    let pole = spec.pole_order() == 2;
    let q = QFunction::Bump { pole, delta: 0.0, x_m: 0.0, width: 1.0 };
    let Some((mut x_m, _)) =
        Splitting::from_q(spec, 0.0, SelectedQ { q, provenance: QProvenance::User }).extreme_point()?
    else {
        return Ok(SelectedQ { q, provenance: QProvenance::User });
    };
    let v2 = spec.v_jet(x_m).deriv(2).abs();
    if v2 == 0.0 {
        return Err(Error::DegenerateExtreme { x_m });
    }
    // harmonic length: distance from x_m to the ground-state turning point
    let width = (spec.params.hbar * spec.params.hbar / (spec.params.m * v2)).powf(0.25);
    // residual of the extreme rule for a bump of size δ centred at `c`
    let residual = |delta: f64, c: f64| -> Result<(f64, f64)> {
        let q = QFunction::Bump { pole, delta, x_m: c, width };
        let split = Splitting::from_q(spec, 0.0, SelectedQ { q, provenance: QProvenance::User });
        let Some((xm, _)) = split.extreme_point()? else {
            return Err(Error::SelectionFailure("the extreme point disappears under the bump correction".into()));
        };
        Ok((q0_from_extreme(&split, xm)? - split.q(xm), xm))
    };
    let mut delta = 0.0;
    for _ in 0..20 {
        // secant in δ with the centre held fixed
        let (mut d0, (mut r0, _)) = (delta, residual(delta, x_m)?);
        let mut d1 = delta + r0;
        let (mut r1, mut xm1) = residual(d1, x_m)?;
        for _ in 0..60 {
            if r1 == r0 || r1.abs() <= 1e-13 * (1.0 + d1.abs()) {
                break;
            }
            let d2 = d1 - r1 * (d1 - d0) / (r1 - r0);
            (d0, r0) = (d1, r1);
            d1 = d2;
            (r1, xm1) = residual(d1, x_m)?;
        }
        if !d1.is_finite() {
            break;
        }
        delta = d1;
        if (xm1 - x_m).abs() <= 1e-12 * (1.0 + x_m.abs()) && r1.abs() <= 1e-10 * (1.0 + delta.abs()) {
            return Ok(SelectedQ { q: QFunction::Bump { pole, delta, x_m, width }, provenance: QProvenance::User });
        }
        x_m = xm1;
    }
    Err(Error::SelectionFailure("pole and extreme-point constraints did not reconcile".into()))
}

/// `7g'''²/(288g''²) − g''''/(32g'')` at a stationary point of g.
pub fn q0_from_derivatives(g2: f64, g3: f64, g4: f64) -> Result<f64> {
    if g2 == 0.0 || g2.abs() <= 1e-14 * (g3.abs() + g4.abs()) {
        return Err(Error::DegenerateExtreme { x_m: f64::NAN });
    }
    Ok(7.0 * g3 * g3 / (288.0 * g2 * g2) - g4 / (32.0 * g2))
}

/// Extreme-point value of q from the derivatives of the splitting's g.
pub fn q0_from_extreme(split: &Splitting, x_m: f64) -> Result<f64> {
    let j = split.g_jet(x_m);
    q0_from_derivatives(j.deriv(2), j.deriv(3), j.deriv(4)).map_err(|_| Error::DegenerateExtreme { x_m })
}

/// Same, for a bare evaluator, by finite differences.
pub fn q0_from_fn<F: Fn(f64) -> f64>(g: F, x_m: f64) -> Result<f64> {
    let d = fd_derivatives(g, x_m, (x_m.abs() + 1.0) * 1e-3);
    q0_from_derivatives(d[1], d[2], d[3]).map_err(|_| Error::DegenerateExtreme { x_m })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExtremeKind {
    /// g has a minimum: a well.
    Minimum,
    /// g has a maximum: a barrier.
    Maximum,
}

/// `g` and `q` at a fixed energy.
#[derive(Clone, Debug)]
pub struct Splitting {
    pub spec: PotentialSpec,
    pub energy: f64,
    pub selected: SelectedQ,
}

/// The uniform-approximation splitting with the selected q.
pub fn build_splitting(spec: &PotentialSpec, energy: f64) -> Result<Splitting> {
    Ok(Splitting::from_q(spec, energy, select_q(spec)?))
}

/// The WKB splitting, q ≡ 0.
pub fn wkb_splitting(spec: &PotentialSpec, energy: f64) -> Splitting {
    Splitting::from_q(spec, energy, SelectedQ { q: QFunction::Zero, provenance: QProvenance::Zero })
}

impl Splitting {
    pub fn from_q(spec: &PotentialSpec, energy: f64, selected: SelectedQ) -> Self {
        Splitting { spec: spec.clone(), energy, selected }
    }

    pub fn with_energy(&self, energy: f64) -> Self {
        Splitting { spec: self.spec.clone(), energy, selected: self.selected }
    }

    pub fn provenance(&self) -> QProvenance {
        self.selected.provenance
    }

    pub fn q(&self, x: f64) -> f64 {
        self.selected.q.eval(x)
    }

    /// `2m(V − E)/ħ² = g + q`.
    pub fn kinetic(&self, x: f64) -> f64 {
        self.spec.k2_factor() * (self.spec.v_f64(x) - self.energy)
    }

    pub fn g(&self, x: f64) -> f64 {
        self.kinetic(x) - self.q(x)
    }

    /// Effective potential `U = V − ħ² q / 2m`, so that `g = 2m(U − E)/ħ²`.
    pub fn effective_potential(&self, x: f64) -> f64 {
        self.spec.v_f64(x) - self.q(x) / self.spec.k2_factor()
    }

    pub fn g_jet(&self, x: f64) -> Jet {
        let k = self.spec.k2_factor();
        let q = self.selected.q.eval(Jet::variable(x));
        (self.spec.v_jet(x) - Jet::constant(self.energy)) * Jet::constant(k) - q
    }

    /// Analytic continuation of g; `None` for user-defined potentials.
    pub fn g_complex(&self, z: Complex64) -> Option<Complex64> {
        let v = self.spec.v_analytic(z)?;
        let k = self.spec.k2_factor();
        Some((v - self.energy) * k - self.selected.q.eval(z))
    }

    /// The interior stationary point of g and whether it is a minimum or a
    /// maximum; `None` when g is monotone. More than one stationary point is
    /// outside the supported topology.
    pub fn extreme_point(&self) -> Result<Option<(f64, ExtremeKind)>> {
        if let Some(x) = self.catalog_extreme() {
            return Ok(x.map(|x| (x, self.extreme_kind(x))));
        }
        let d1 = |x: f64| self.g_jet(x).deriv(1);
        let l = self.spec.length_scale();
        let grid: Vec<f64> = match self.spec.domain() {
            Domain::HalfLine => (0..=1200).map(|i| l * 1e-4 * 10f64.powf(i as f64 / 150.0)).collect(),
            Domain::FullLine => (0..=1200).map(|i| l * 40.0 * ((i as f64 - 600.0) / 100.0).sinh() / 200.0f64).collect(),
        };
        let hint = self.spec.user_potential().and_then(|u| u.extreme_hint);
        let vals: Vec<f64> = grid.iter().map(|&x| d1(x)).collect();
        let mut found = Vec::new();
        for i in 0..grid.len() - 1 {
            let (a, b) = (vals[i], vals[i + 1]);
            if !(a.is_finite() && b.is_finite()) {
                continue;
            }
            // an exact zero counts only with a sign change across it; flat
            // zeros come from underflow in the tails
            if a == 0.0 {
                if i > 0 && vals[i - 1] * b < 0.0 {
                    found.push(grid[i]);
                }
            } else if a * b < 0.0 {
                found.push(brent(d1, grid[i], grid[i + 1], 1e-15 * l, 200)?);
            }
        }
        found.dedup_by(|a, b| (*a - *b).abs() < 1e-9 * l);
        match found.len() {
            0 => Ok(None),
            1 => Ok(Some((found[0], self.extreme_kind(found[0])))),
            _ => match hint {
                Some(h) => {
                    let x = *found.iter().min_by(|a, b| (*a - h).abs().total_cmp(&(*b - h).abs())).unwrap();
                    Ok(Some((x, self.extreme_kind(x))))
                }
                None => Err(Error::UnsupportedTopology(format!("{} stationary points of g", found.len()))),
            },
        }
    }

    fn extreme_kind(&self, x: f64) -> ExtremeKind {
        if self.g_jet(x).deriv(2) >= 0.0 {
            ExtremeKind::Minimum
        } else {
            ExtremeKind::Maximum
        }
    }

    /// Closed-form extreme points where they are elementary. `Some(None)`
    /// means "known to have none"; `None` means "search numerically".
    fn catalog_extreme(&self) -> Option<Option<f64>> {
        let p = &self.spec.params;
        let q = self.selected.q;
        let (hb2, m) = (p.hbar * p.hbar, p.m);
        // pole coefficient of U in units of ħ²/2m
        let pole_c = |c: f64| match q {
            QFunction::InverseSquare { c: k } => c - k,
            QFunction::Zero => c,
            _ => f64::NAN,
        };
        match (self.spec.kind, q) {
            (PotentialKind::Hydrogen, QFunction::Zero | QFunction::InverseSquare { .. }) => {
                let c = pole_c(self.spec.pole_strength());
                Some(if c > 0.0 { Some(hb2 * c / (m * p.e * p.e)) } else { None })
            }
            (PotentialKind::OscillatorD, QFunction::Zero | QFunction::InverseSquare { .. }) => {
                let c = pole_c(self.spec.pole_strength());
                Some(if c > 0.0 { Some((hb2 * c / (m * m * p.omega * p.omega)).powf(0.25)) } else { None })
            }
            (PotentialKind::Morse, QFunction::Zero) => {
                Some(if p.v1 < 0.0 { Some((-2.0 * p.v0 / p.v1).ln() / p.alpha) } else { None })
            }
            (
                PotentialKind::PoschlTellerWell | PotentialKind::PoschlTellerBarrier,
                QFunction::Zero | QFunction::Sech2 { .. },
            ) => {
                // U = (v0 − ħ²a/2m) sech²; a flat U has no extreme
                let a = if let QFunction::Sech2 { a, .. } = q { a } else { 0.0 };
                Some(if p.v0 - hb2 * a / (2.0 * m) != 0.0 { Some(0.0) } else { None })
            }
            (PotentialKind::PureOscillator1d, QFunction::Zero) => Some(Some(0.0)),
            _ => None,
        }
    }
}

/// Whether `E_n` of a finite spectrum is bound (`value ≤ limit`, with
/// equality meaning the level sits exactly at the continuum threshold).
fn bound_check(value: f64, limit: f64, n: usize) -> Result<()> {
    if value <= limit * (1.0 + 1e-12) {
        Ok(())
    } else {
        Err(Error::NoBoundState { n })
    }
}

/// Closed-form exact spectrum.
pub fn exact_spectrum(spec: &PotentialSpec, n: usize) -> Result<f64> {
    let p = &spec.params;
    let nf = n as f64;
    let ah2 = p.alpha_hbar2();
    match spec.kind {
        PotentialKind::Hydrogen => Ok(-p.m * p.e.powi(4) / (2.0 * p.hbar * p.hbar * (nf + p.l as f64 + 1.0).powi(2))),
        PotentialKind::OscillatorD => Ok((2.0 * nf + p.l as f64 + p.d as f64 / 2.0) * p.hbar * p.omega),
        PotentialKind::PureOscillator1d => Ok((nf + 0.5) * p.hbar * p.omega),
        PotentialKind::Morse => morse_level(spec, n),
        PotentialKind::PoschlTellerWell => {
            let r = (1.0 - 8.0 * p.m * p.v0 / ah2).sqrt();
            // levels exist while 2n + 1 ≤ r
            bound_check(2.0 * nf + 1.0, r, n)?;
            Ok(p.v0 - ah2 / (4.0 * p.m) * (2.0 * nf * nf + 2.0 * nf + 1.0 - (2.0 * nf + 1.0) * r))
        }
        PotentialKind::Eckart => eckart_level(spec, n, (1.0 + 8.0 * p.m * p.v0 / ah2).sqrt()),
        PotentialKind::PoschlTellerBarrier => Err(Error::NoBoundState { n }),
        PotentialKind::UserDefined => {
            Err(Error::Unsupported("closed-form spectrum of a user-defined potential".into()))
        }
    }
}

/// Closed-form WKB spectrum.
pub fn wkb_spectrum_closed_form(spec: &PotentialSpec, n: usize) -> Result<f64> {
    let p = &spec.params;
    let nf = n as f64;
    let ah2 = p.alpha_hbar2();
    match spec.kind {
        PotentialKind::Hydrogen => {
            let s = ((p.l * (p.l + 1)) as f64).sqrt();
            Ok(-p.m * p.e.powi(4) / (2.0 * p.hbar * p.hbar * (nf + 0.5 + s).powi(2)))
        }
        PotentialKind::OscillatorD => {
            let l2 = oscillator_l2(p);
            if l2 < 0.0 {
                return Err(Error::MethodInapplicable(
                    "attractive centrifugal term; the WKB phase integral diverges at the origin".into(),
                ));
            }
            Ok((2.0 * nf + l2.sqrt() + 1.0) * p.hbar * p.omega)
        }
        PotentialKind::PureOscillator1d => Ok((nf + 0.5) * p.hbar * p.omega),
        PotentialKind::Morse => morse_level(spec, n),
        PotentialKind::PoschlTellerWell => {
            let r = (-8.0 * p.m * p.v0 / ah2).sqrt();
            bound_check(2.0 * nf + 1.0, r, n)?;
            Ok(p.v0 - ah2 / (4.0 * p.m) * ((2.0 * nf + 1.0).powi(2) / 2.0 - (2.0 * nf + 1.0) * r))
        }
        PotentialKind::Eckart => eckart_level(spec, n, (8.0 * p.m * p.v0 / ah2).max(0.0).sqrt()),
        PotentialKind::PoschlTellerBarrier => Err(Error::NoBoundState { n }),
        PotentialKind::UserDefined => {
            Err(Error::Unsupported("closed-form spectrum of a user-defined potential".into()))
        }
    }
}

fn morse_level(spec: &PotentialSpec, n: usize) -> Result<f64> {
    let p = &spec.params;
    let k = (2.0 * n as f64 + 1.0) * p.alpha * p.hbar;
    // bound while (2n+1)αħ√v0 ≤ √(2m)|v1| with v1 < 0
    if p.v1 >= 0.0 {
        return Err(Error::NoBoundState { n });
    }
    bound_check(k * p.v0.sqrt(), (2.0 * p.m).sqrt() * -p.v1, n)?;
    Ok(-(2.0 * p.m * p.v1 * p.v1 + k * (2.0 * (2.0 * p.m * p.v0).sqrt() * p.v1 + k * p.v0)) / (8.0 * p.m * p.v0))
}

fn eckart_level(spec: &PotentialSpec, n: usize, root: f64) -> Result<f64> {
    let p = &spec.params;
    let ah2 = p.alpha_hbar2();
    let k = root + 2.0 * n as f64 + 1.0;
    // the level lies at or below v1 only while k² ≤ 4m|v1|/(αħ)²
    if p.v1 >= 0.0 {
        return Err(Error::NoBoundState { n });
    }
    bound_check(k * k, 4.0 * p.m * -p.v1 / ah2, n)?;
    Ok(-2.0 * p.m * p.v1 * p.v1 / (ah2 * k * k) - ah2 * k * k / (8.0 * p.m))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    pub(crate) fn catalog(kind: PotentialKind) -> PotentialSpec {
        PotentialSpec::new(kind, PhysicalParams::defaults_for(kind)).unwrap()
    }

    fn with(kind: PotentialKind, f: impl FnOnce(&mut PhysicalParams)) -> PotentialSpec {
        let mut p = PhysicalParams::defaults_for(kind);
        f(&mut p);
        PotentialSpec::new(kind, p).unwrap()
    }

    #[test]
    fn potential_values() {
        let h = catalog(PotentialKind::Hydrogen);
        assert_eq!(eval_potential(&h, 1.0).unwrap(), -1.0);
        assert_eq!(eval_potential(&catalog(PotentialKind::PoschlTellerWell), 0.0).unwrap(), -10.0);
        assert_eq!(eval_potential(&catalog(PotentialKind::Morse), 0.0).unwrap(), -1.0);
        assert!(matches!(eval_potential(&h, 0.0), Err(Error::Domain { .. })));
        assert!(matches!(eval_potential(&h, -1.0), Err(Error::Domain { .. })));
        let e = catalog(PotentialKind::Eckart);
        let x: f64 = 0.7;
        let want = 1.0 / x.sinh().powi(2) - 4.0 / x.tanh();
        assert!((eval_potential(&e, x).unwrap() - want).abs() < 1e-13);
    }

    #[test]
    fn domains_and_poles() {
        for k in [PotentialKind::Hydrogen, PotentialKind::OscillatorD, PotentialKind::Eckart] {
            let s = catalog(k);
            assert_eq!((s.domain(), s.pole_order()), (Domain::HalfLine, 2));
        }
        for k in [PotentialKind::Morse, PotentialKind::PoschlTellerWell, PotentialKind::PoschlTellerBarrier] {
            let s = catalog(k);
            assert_eq!((s.domain(), s.pole_order()), (Domain::FullLine, 0));
        }
    }

    #[test]
    fn catalog_q_choices() {
        let sel = |k| select_q(&catalog(k)).unwrap();
        let x: f64 = 0.37;
        assert_eq!(sel(PotentialKind::Hydrogen).q.eval(x), -0.25 / (x * x));
        assert_eq!(sel(PotentialKind::Hydrogen).provenance, QProvenance::PoleRule);
        assert_eq!(sel(PotentialKind::Morse).q.eval(x), 0.0);
        let a = 1.3;
        for k in [PotentialKind::PoschlTellerWell, PotentialKind::PoschlTellerBarrier] {
            let s = select_q(&with(k, |p| p.alpha = a)).unwrap();
            let want = a * a / (4.0 * (a * x).cosh().powi(2));
            assert!((s.q.eval(x) - want).abs() < 1e-15);
            assert_eq!(s.provenance, QProvenance::ExtremeRule);
        }
        let s = select_q(&with(PotentialKind::Eckart, |p| p.alpha = a)).unwrap();
        assert!((s.q.eval(x) + a * a / (4.0 * (a * x).sinh().powi(2))).abs() < 1e-14);
    }

    #[test]
    fn q0_values() {
        for &(v0, a) in &[(-10.0, 1.0), (-3.0, 0.5), (2.5, 2.0), (7.0, 1.7)] {
            let kind = if v0 < 0.0 { PotentialKind::PoschlTellerWell } else { PotentialKind::PoschlTellerBarrier };
            let s = with(kind, |p| {
                p.v0 = v0;
                p.alpha = a
            });
            let split = build_splitting(&s, 0.3 * v0).unwrap();
            let q0 = q0_from_extreme(&split, 0.0).unwrap();
            assert!((q0 - a * a / 4.0).abs() <= 1e-12 * a * a, "{q0}");
        }
        let morse = build_splitting(&catalog(PotentialKind::Morse), -0.5).unwrap();
        let (xm, kind) = morse.extreme_point().unwrap().unwrap();
        assert_eq!(kind, ExtremeKind::Minimum);
        assert!(q0_from_extreme(&morse, xm).unwrap().abs() < 1e-12);
        let osc = build_splitting(&catalog(PotentialKind::PureOscillator1d), 0.5).unwrap();
        assert_eq!(q0_from_extreme(&osc, 0.0).unwrap(), 0.0);
        // fourth differences set the noise floor
        assert!(q0_from_fn(|x| x * x - 1.0, 0.0).unwrap().abs() < 1e-7);
        assert!(matches!(q0_from_fn(|x: f64| x.powi(3), 0.0), Err(Error::DegenerateExtreme { .. })));
    }

    #[test]
    fn extreme_rule_holds_for_catalog_q() {
        let mut specs = vec![
            catalog(PotentialKind::Hydrogen),
            with(PotentialKind::Hydrogen, |p| p.l = 2),
            catalog(PotentialKind::OscillatorD),
            with(PotentialKind::OscillatorD, |p| p.l = 1),
            catalog(PotentialKind::Morse),
            catalog(PotentialKind::PoschlTellerWell),
            catalog(PotentialKind::PoschlTellerBarrier),
            catalog(PotentialKind::Eckart),
            with(PotentialKind::Eckart, |p| p.v1 = -10.0),
        ];
        specs.push(catalog(PotentialKind::PureOscillator1d));
        for s in specs {
            let split = build_splitting(&s, -0.3).unwrap();
            let (xm, _) = split.extreme_point().unwrap().unwrap();
            assert!(split.g_jet(xm).deriv(1).abs() < 1e-10, "{}", s.kind);
            let q0 = q0_from_extreme(&split, xm).unwrap();
            let q = split.q(xm);
            assert!((q - q0).abs() <= 1e-8 * (q0.abs() + 1.0), "{}: q={q} q0={q0}", s.kind);
        }
    }

    #[test]
    fn splitting_examples() {
        let h = build_splitting(&catalog(PotentialKind::Hydrogen), -0.5).unwrap();
        assert!((h.g(2.0) - 1.0 / 16.0).abs() < 1e-15);
        let o = build_splitting(&catalog(PotentialKind::PureOscillator1d), 0.5).unwrap();
        assert_eq!(o.g(0.0), -1.0);
    }

    #[test]
    fn exact_spectra() {
        let h = catalog(PotentialKind::Hydrogen);
        assert_eq!(exact_spectrum(&h, 0).unwrap(), -0.5);
        let o = catalog(PotentialKind::OscillatorD);
        assert_eq!(exact_spectrum(&o, 1).unwrap(), 3.5);
        let pt = catalog(PotentialKind::PoschlTellerWell);
        assert!((exact_spectrum(&pt, 0).unwrap() + 8.0).abs() < 1e-14);
        // n = 4 sits exactly at the threshold, n = 5 is not bound
        assert!(exact_spectrum(&pt, 4).unwrap().abs() < 1e-14);
        assert_eq!(exact_spectrum(&pt, 5), Err(Error::NoBoundState { n: 5 }));
        let e = catalog(PotentialKind::Eckart);
        assert!((exact_spectrum(&e, 0).unwrap() + 4.0).abs() < 1e-14);
        assert_eq!(exact_spectrum(&e, 1), Err(Error::NoBoundState { n: 1 }));
        let m = catalog(PotentialKind::Morse);
        let want = -(1.0 - 2.0 * 2f64.sqrt()).powi(2) / 8.0;
        assert!((exact_spectrum(&m, 0).unwrap() - want).abs() < 1e-14);
        assert_eq!(exact_spectrum(&m, 1), Err(Error::NoBoundState { n: 1 }));
        assert!(exact_spectrum(&catalog(PotentialKind::PoschlTellerBarrier), 0).is_err());
    }

    #[test]
    fn wkb_spectra() {
        assert_eq!(wkb_spectrum_closed_form(&catalog(PotentialKind::Hydrogen), 0).unwrap(), -2.0);
        let m = catalog(PotentialKind::Morse);
        assert_eq!(wkb_spectrum_closed_form(&m, 0), exact_spectrum(&m, 0));
        let pt = wkb_spectrum_closed_form(&catalog(PotentialKind::PoschlTellerWell), 0).unwrap();
        assert!((pt - (-10.0 - 0.125 + 80f64.sqrt() / 4.0)).abs() < 1e-13);
        let o = catalog(PotentialKind::OscillatorD);
        assert_eq!(wkb_spectrum_closed_form(&o, 2).unwrap(), 5.0);
        let o2 = with(PotentialKind::OscillatorD, |p| p.d = 2);
        assert!(matches!(wkb_spectrum_closed_form(&o2, 0), Err(Error::MethodInapplicable(_))));
        let e = wkb_spectrum_closed_form(&catalog(PotentialKind::Eckart), 0).unwrap();
        let k = 8f64.sqrt() + 1.0;
        assert!((e - (-32.0 / (k * k) - k * k / 8.0)).abs() < 1e-13);
    }

    #[test]
    fn params_parsing_and_validation() {
        let mut p = PhysicalParams::defaults_for(PotentialKind::Morse);
        p.set(PotentialKind::Morse, "v1", "-3.5").unwrap();
        assert_eq!(p.v1, -3.5);
        assert!(p.set(PotentialKind::Morse, "l", "1").is_err());
        assert!(p.set(PotentialKind::Morse, "v0", "abc").is_err());
        assert!("nope".parse::<PotentialKind>().is_err());
        assert_eq!("eckart".parse::<PotentialKind>().unwrap(), PotentialKind::Eckart);
        let bad = PhysicalParams { m: -1.0, ..Default::default() };
        assert!(PotentialSpec::new(PotentialKind::Hydrogen, bad).is_err());
        assert!(PotentialSpec::new(PotentialKind::PoschlTellerWell, PhysicalParams::default()).is_err());
    }

    fn user_well(pole_order: u32) -> PotentialSpec {
        // anharmonic well 0.5x² + 0.1x⁴, or a radial Kratzer-like well
        let (v, domain): (Arc<dyn Fn(f64) -> f64 + Send + Sync>, _) = if pole_order == 0 {
            (Arc::new(|x: f64| 0.5 * x * x + 0.1 * x.powi(4)), Domain::FullLine)
        } else {
            (Arc::new(|x: f64| 1.0 / (x * x) - 2.0 / x + 0.05 * x * x), Domain::HalfLine)
        };
        let u = UserPotential { name: "test".into(), v, domain, pole_order, threshold: None, extreme_hint: None };
        PotentialSpec::user(u, PhysicalParams::default()).unwrap()
    }

    #[test]
    fn user_q_satisfies_both_rules() {
        for order in [0, 2] {
            let s = user_well(order);
            let sel = select_q(&s).unwrap();
            assert_eq!(sel.provenance, QProvenance::User);
            let split = Splitting::from_q(&s, 0.0, sel);
            let (xm, _) = split.extreme_point().unwrap().unwrap();
            let q0 = q0_from_extreme(&split, xm).unwrap();
            assert!((split.q(xm) - q0).abs() <= 1e-8 * (q0.abs() + 1.0), "order {order}");
            if order == 2 {
                for x in [1e-2, 1e-4, 1e-6] {
                    assert!((x * x * split.q(x) + 0.25).abs() < 1e-3);
                }
            }
        }
        let u = UserPotential {
            name: "bad".into(),
            v: Arc::new(|x: f64| x),
            domain: Domain::HalfLine,
            pole_order: 1,
            threshold: None,
            extreme_hint: None,
        };
        assert!(matches!(PotentialSpec::user(u, PhysicalParams::default()), Err(Error::Unsupported(_))));
    }

    fn all_catalog() -> Vec<PotentialSpec> {
        PotentialKind::CATALOG.iter().map(|&k| catalog(k)).collect()
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(1000))]

        #[test]
        fn splitting_identity(e in -20.0f64..20.0, t in 0.001f64..0.999) {
            for s in all_catalog() {
                let x = match s.domain() {
                    Domain::HalfLine => { let u = t * 8.0; u.exp() * 1e-3 }
                    Domain::FullLine => (t - 0.5) * 20.0,
                };
                let split = build_splitting(&s, e).unwrap();
                let (g, q) = (split.g(x), split.q(x));
                let v = eval_potential(&s, x).unwrap();
                let resid = g + q + s.k2_factor() * (e - v);
                prop_assert!(resid.abs() <= 1e-12 * (g.abs() + q.abs() + 1.0), "{} x={x}: {resid}", s.kind);
            }
        }

        #[test]
        fn langer_equivalence(l in 0u32..6, e in -2.0f64..-0.01, x in 0.01f64..50.0) {
            let s = with(PotentialKind::Hydrogen, |p| p.l = l);
            let split = build_splitting(&s, e).unwrap();
            let lf = l as f64;
            let v_langer = -1.0 / x + (lf + 0.5).powi(2) / (2.0 * x * x);
            let want = 2.0 * (v_langer - e);
            prop_assert!((split.g(x) - want).abs() <= 1e-13 * (want.abs() + 1.0 / (x * x)));
        }
    }

    #[test]
    fn pole_rule_limit() {
        for s in [catalog(PotentialKind::Hydrogen), catalog(PotentialKind::OscillatorD), catalog(PotentialKind::Eckart)]
        {
            let split = build_splitting(&s, -1.0).unwrap();
            for x in [1e-2, 1e-4, 1e-6] {
                let r = x * x * split.q(x);
                assert!((r + 0.25).abs() < 1e-4, "{}: {r}", s.kind);
            }
        }
    }
}

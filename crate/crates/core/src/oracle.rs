//! Independent numerical reference: Numerov shooting for bound states and
//! direct integration of the Schrödinger equation for barrier transmission.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::numerics::neville;
use crate::numerics::ode::dopri5;
use crate::potentials::{wkb_splitting, Domain, PotentialKind, PotentialSpec, Splitting};
use crate::semiclassical::{SpectrumEntry, SpectrumMethod, SpectrumResult, TransmissionCurve, TransmissionMethod};
use crate::wavefunction::{Region, WaveSample};
use crate::{Error, Result};

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OracleConfig {
    /// Initial number of grid intervals; doubled until the eigenvalue is stable.
    pub points: usize,
    /// Fixed grid ends; chosen from the decay of the state when `None`.
    pub extent: Option<(f64, f64)>,
    /// Start of the half-line grid in natural length units.
    pub origin_offset: f64,
    /// Relative width at which the eigenvalue bisection stops.
    pub shooting_tol: f64,
    /// Largest accepted eigenvalue change between steps h and 2h, in energy units.
    pub step_tol: f64,
    /// Matching point for eigenfunctions; the outer classical turning point when `None`.
    pub matching: Option<f64>,
    pub max_nodes: usize,
    /// Decay exponent `∫√(2m(V − E))/ħ` required beyond the outer turning points.
    pub decay: f64,
    /// Largest accepted change of T when the ODE tolerance is tightened 16-fold.
    pub transmission_tol: f64,
}

impl Default for OracleConfig {
    fn default() -> Self {
        OracleConfig {
            points: 4000,
            extent: None,
            origin_offset: 1e-6,
            shooting_tol: 1e-14,
            step_tol: 1e-7,
            matching: None,
            max_nodes: 64,
            decay: 40.0,
            transmission_tol: 1e-8,
        }
    }
}

/// Behavior of the solution beyond a grid end.
#[derive(Clone, Copy, Debug, PartialEq)]
enum End {
    /// Regular solution `ψ ~ x^{ν+½}` at the origin.
    Power(f64),
    /// Constant potential at the continuum level: exponential decay.
    Flat,
    /// Dirichlet wall far inside the forbidden region.
    Wall,
}

/// The potential sampled once, with the quantities every grid needs.
struct Problem {
    split: Splitting,
    k2: f64,
    thr: f64,
    length: f64,
    scale: f64,
    half: bool,
    nu: f64,
    x_min: f64,
    x_start: f64,
    v_min: f64,
    flat_tol: f64,
}

impl Problem {
    fn new(spec: &PotentialSpec, cfg: &OracleConfig) -> Result<Self> {
        let split = wkb_splitting(spec, 0.0);
        let length = spec.length_scale();
        let half = spec.domain() == Domain::HalfLine;
        let c = spec.pole_strength();
        if c < -0.25 {
            return Err(Error::Unsupported("pole strength below −1/4: no regular solution".into()));
        }
        let k2 = spec.k2_factor();
        let v = |x: f64| split.kinetic(x) / k2;
        let samples: Vec<f64> = if half {
            (0..600).map(|k| 1e-4 * length * 1.03f64.powi(k)).collect()
        } else {
            (0..=2400).map(|k| length * (-60.0 + 0.05 * k as f64)).collect()
        };
        let (x_start, v_min) = samples
            .iter()
            .map(|&x| (x, v(x)))
            .filter(|p| p.1.is_finite())
            .fold((f64::NAN, f64::INFINITY), |a, b| if b.1 < a.1 { b } else { a });
        if !v_min.is_finite() {
            return Err(Error::Domain { x: x_start });
        }
        let scale = spec.energy_scale();
        Ok(Problem {
            k2,
            thr: spec.threshold(),
            length,
            scale,
            half,
            nu: (c + 0.25).sqrt(),
            x_min: cfg.origin_offset * length,
            x_start,
            v_min,
            flat_tol: 1e-13 * scale,
            split,
        })
    }

    fn v(&self, x: f64) -> f64 {
        self.split.kinetic(x) / self.k2
    }

    fn is_flat(&self, x: f64, dir: f64) -> bool {
        self.thr.is_finite()
            && (self.v(x) - self.thr).abs() <= self.flat_tol
            && (self.v(x + dir * 5.0 * self.length) - self.thr).abs() <= self.flat_tol
    }

    /// Grid end on one side for states at or below `energy`.
    fn scan_end(&self, dir: f64, energy: f64, decay: f64) -> Result<(f64, End)> {
        let (mut x, mut h, mut acc) = (self.x_start, 0.02 * self.length, 0.0);
        for _ in 0..200_000 {
            let xn = x + dir * h;
            if self.half && xn <= self.x_min {
                return Ok((self.x_min, End::Power(self.nu)));
            }
            let val = self.v(xn);
            if !val.is_finite() {
                return Ok((x, End::Wall));
            }
            if self.is_flat(xn, dir) {
                return Ok((xn, End::Flat));
            }
            let k = self.k2 * (val - energy);
            if k > 0.0 {
                acc += k.sqrt() * h;
                h = h.min(1.0 / k.sqrt());
            } else {
                acc = 0.0;
            }
            if acc >= decay {
                return Ok((xn, End::Wall));
            }
            x = xn;
            h *= 1.01;
            if (x - self.x_start).abs() > 1e7 * self.length {
                break;
            }
        }
        Err(Error::Extent(format!("the state at E = {energy} does not decay within 1e7 length units")))
    }

    fn grid(&self, cfg: &OracleConfig, energy: f64, intervals: usize) -> Result<Grid> {
        let (a, left, b, right) = match cfg.extent {
            Some((a, b)) if self.half => (a.max(self.x_min), End::Power(self.nu), b, End::Wall),
            Some((a, b)) => (a, End::Wall, b, End::Wall),
            None => {
                let (b, right) = self.scan_end(1.0, energy, cfg.decay)?;
                let (a, left) =
                    if self.half { (self.x_min, End::Power(self.nu)) } else { self.scan_end(-1.0, energy, cfg.decay)? };
                (a, left, b, right)
            }
        };
        if !(b > a) {
            return Err(Error::Extent(format!("empty grid [{a}, {b}]")));
        }
        let mut g = Grid::new(self, a, b, intervals, left, right);
        // keep h²f well inside the stable range of the recurrence
        let fmax = (0..g.x.len()).map(|i| g.coeff(i, energy)).fold(0.0, f64::max);
        let need = g.h * g.h * fmax;
        if need > 0.5 {
            let n = ((intervals as f64) * (need / 0.5).sqrt()).ceil() as usize;
            if n > 4_000_000 {
                return Err(Error::Extent("grid resolution exceeds 4e6 intervals".into()));
            }
            g = Grid::new(self, a, b, n, left, right);
        }
        Ok(g)
    }
}

/// Uniform grid in t = x (full line) or t = ln x (half line). On the log
/// grid the recurrence acts on `φ = ψ/√x`, which obeys `φ'' = (x²k + ¼)φ`.
#[derive(Clone, Debug)]
struct Grid {
    log: bool,
    t0: f64,
    h: f64,
    x: Vec<f64>,
    v: Vec<f64>,
    left: End,
    right: End,
    k2: f64,
    thr: f64,
}

impl Grid {
    fn new(p: &Problem, a: f64, b: f64, intervals: usize, left: End, right: End) -> Self {
        let log = p.half;
        let (t0, t1) = if log { (a.ln(), b.ln()) } else { (a, b) };
        let h = (t1 - t0) / intervals as f64;
        let x: Vec<f64> = (0..=intervals)
            .map(|i| {
                let t = t0 + h * i as f64;
                if log {
                    t.exp()
                } else {
                    t
                }
            })
            .collect();
        let v = x.iter().map(|&x| p.v(x)).collect();
        Grid { log, t0, h, x, v, left, right, k2: p.k2, thr: p.thr }
    }

    fn with_intervals(&self, p: &Problem, intervals: usize) -> Self {
        Grid::new(p, self.x[0], *self.x.last().unwrap(), intervals, self.left, self.right)
    }

    fn coeff(&self, i: usize, e: f64) -> f64 {
        let k = self.k2 * (self.v[i] - e);
        if self.log {
            self.x[i] * self.x[i] * k + 0.25
        } else {
            k
        }
    }

    fn kappa(&self, e: f64) -> f64 {
        (self.k2 * (self.thr - e)).max(0.0).sqrt()
    }

    fn factor(&self, i: usize) -> f64 {
        if self.log {
            self.x[i].sqrt()
        } else {
            1.0
        }
    }

    fn start_left(&self, e: f64) -> (f64, f64) {
        match self.left {
            End::Power(nu) => (1.0, (nu * self.h).exp()),
            End::Flat => (1.0, (self.kappa(e) * (self.x[1] - self.x[0])).exp() * self.factor(0) / self.factor(1)),
            End::Wall => (0.0, 1.0),
        }
    }

    fn start_right(&self, e: f64) -> (f64, f64) {
        let n = self.x.len() - 1;
        match self.right {
            End::Flat => {
                (1.0, (self.kappa(e) * (self.x[n] - self.x[n - 1])).exp() * self.factor(n) / self.factor(n - 1))
            }
            _ => (0.0, 1.0),
        }
    }

    /// Numerov sweep; `ys` receives the solution when given.
    fn sweep(&self, e: f64, forward: bool, mut ys: Option<&mut Vec<f64>>) -> (usize, f64, f64) {
        let n = self.x.len();
        let idx = |j: usize| if forward { j } else { n - 1 - j };
        let (mut y0, mut y1) = if forward { self.start_left(e) } else { self.start_right(e) };
        let h2 = self.h * self.h / 12.0;
        let w = |j: usize| 1.0 - h2 * self.coeff(idx(j), e);
        let (mut w0, mut w1) = (w(0), w(1));
        if let Some(v) = ys.as_deref_mut() {
            v.clear();
            v.push(y0);
            v.push(y1);
        }
        let mut nodes = 0;
        let mut last_sign = if y1 != 0.0 { y1.signum() } else { y0.signum() };
        for j in 1..n - 1 {
            let w2 = w(j + 1);
            let y2 = ((12.0 - 10.0 * w1) * y1 - w0 * y0) / w2;
            if y2 != 0.0 {
                if last_sign != 0.0 && y2.signum() != last_sign {
                    nodes += 1;
                }
                last_sign = y2.signum();
            }
            y0 = y1;
            y1 = y2;
            w0 = w1;
            w1 = w2;
            if let Some(v) = ys.as_deref_mut() {
                v.push(y2);
                if y2.abs() > 1e100 {
                    v.iter_mut().for_each(|y| *y *= 1e-100);
                    y0 *= 1e-100;
                    y1 *= 1e-100;
                }
            } else if y2.abs() > 1e100 {
                y0 *= 1e-100;
                y1 *= 1e-100;
            }
        }
        (nodes, y0, y1)
    }

    /// Number of eigenvalues below e.
    fn count(&self, e: f64) -> usize {
        let (mut nodes, ya, yb) = self.sweep(e, true, None);
        if self.right == End::Flat {
            let n = self.x.len() - 1;
            let (pa, pb) = (ya * self.factor(n - 1), yb * self.factor(n));
            let growth = pb * (self.kappa(e) * (self.x[n] - self.x[n - 1])).exp() - pa;
            // the continuation beyond the end crosses zero once more
            if growth * pb < 0.0 {
                nodes += 1;
            }
        }
        nodes
    }

    fn bisect(&self, n: usize, mut lo: f64, mut hi: f64, tol: f64, scale: f64) -> Result<(f64, usize)> {
        for it in 1..=400 {
            let mid = 0.5 * (lo + hi);
            if self.count(mid) > n {
                hi = mid;
            } else {
                lo = mid;
            }
            if hi - lo <= tol * lo.abs().max(hi.abs()).max(scale) {
                return Ok((0.5 * (lo + hi), it));
            }
        }
        Err(Error::Convergence(format!("eigenvalue bisection for n = {n} did not converge")))
    }
}

/// Count of eigenvalues below e, on a grid sized for e itself.
fn count_adaptive(p: &Problem, cfg: &OracleConfig, e: f64) -> Result<usize> {
    Ok(p.grid(cfg, e, cfg.points)?.count(e))
}

struct Level {
    entry: SpectrumEntry,
    grid: Grid,
}

fn solve_level(p: &Problem, cfg: &OracleConfig, n: usize) -> Result<Level> {
    if n > cfg.max_nodes {
        return Err(Error::InvalidParams(format!("n = {n} exceeds the node limit {}", cfg.max_nodes)));
    }
    let scale = p.scale;
    let mut lo = p.v_min;
    let mut guard = 0;
    while count_adaptive(p, cfg, lo)? > n {
        lo -= lo.abs() + scale;
        guard += 1;
        if guard > 60 {
            return Err(Error::Convergence("no lower energy bound".into()));
        }
    }
    let mut at_threshold = false;
    let hi = if p.thr.is_finite() {
        let mut found = None;
        let mut gap = p.thr - lo;
        while gap > 1e-12 * scale {
            gap *= 0.25;
            let e = p.thr - gap;
            if count_adaptive(p, cfg, e)? > n {
                found = Some(e);
                break;
            }
        }
        match found {
            Some(e) => e,
            None => {
                // a level closer to the threshold than 1e-12 is reported at it
                let g = p.grid(cfg, p.thr - 1e-12 * scale, cfg.points)?;
                if g.left != End::Wall && g.right != End::Wall && g.count(p.thr) > n {
                    at_threshold = true;
                    p.thr
                } else {
                    return Err(Error::NoBoundState { n });
                }
            }
        }
    } else {
        let mut e = lo + scale;
        let mut guard = 0;
        while count_adaptive(p, cfg, e)? <= n {
            e = lo + 2.0 * (e - lo);
            guard += 1;
            if guard > 200 {
                return Err(Error::Convergence("no upper energy bound".into()));
            }
        }
        e
    };
    let mut iterations = 0;
    let rough = if at_threshold {
        p.thr
    } else {
        // coarse stage: every count on a grid sized for its own energy
        let (mut a, mut b) = (lo, hi);
        while b - a > 1e-9 * a.abs().max(b.abs()).max(scale) {
            let mid = 0.5 * (a + b);
            if count_adaptive(p, cfg, mid)? > n {
                b = mid;
            } else {
                a = mid;
            }
            iterations += 1;
            if iterations > 400 {
                return Err(Error::Convergence(format!("eigenvalue bisection for n = {n} did not converge")));
            }
        }
        0.5 * (a + b)
    };
    let mut intervals = cfg.points;
    for _ in 0..6 {
        let sized = if at_threshold { p.thr - 1e-12 * scale } else { rough };
        let grid = p.grid(cfg, sized, intervals)?;
        let coarse = grid.with_intervals(p, grid.x.len().div_ceil(2));
        let (e, it) = refine(&grid, n, rough, p, cfg, at_threshold)?;
        let (e2, _) = refine(&coarse, n, rough, p, cfg, at_threshold)?;
        iterations += it;
        let change = (e - e2).abs();
        if change <= cfg.step_tol * scale {
            let entry = SpectrumEntry { n, energy: e, residual: change, iterations, at_threshold };
            return Ok(Level { entry, grid });
        }
        intervals = 2 * (grid.x.len() - 1);
    }
    Err(Error::Convergence(format!("grid doubling did not settle the level n = {n}")))
}

/// Bisection on a fixed grid around a rough eigenvalue.
fn refine(
    grid: &Grid,
    n: usize,
    rough: f64,
    p: &Problem,
    cfg: &OracleConfig,
    at_threshold: bool,
) -> Result<(f64, usize)> {
    let mut w = 1e-8 * rough.abs().max(p.scale);
    for _ in 0..12 {
        let lo = rough - w;
        let hi = if p.thr.is_finite() { (rough + w).min(p.thr) } else { rough + w };
        if grid.count(lo) <= n && grid.count(hi) > n {
            return grid.bisect(n, lo, hi, cfg.shooting_tol, p.scale);
        }
        if at_threshold && grid.count(lo) <= n {
            return Ok((p.thr, 0));
        }
        w *= 10.0;
    }
    Err(Error::Convergence(format!("level n = {n} moved between grids")))
}

/// Numerov eigenvalues for n = 0..=n_max. The list stops at the first n
/// without a bound state.
pub fn numerov_eigenvalues(spec: &PotentialSpec, n_max: usize, config: &OracleConfig) -> Result<SpectrumResult> {
    let p = Problem::new(spec, config)?;
    let results: Vec<Result<SpectrumEntry>> =
        (0..=n_max).into_par_iter().map(|n| solve_level(&p, config, n).map(|l| l.entry)).collect();
    let mut entries = Vec::new();
    for r in results {
        match r {
            Ok(e) => entries.push(e),
            Err(Error::NoBoundState { .. }) => break,
            Err(e) => return Err(e),
        }
    }
    Ok(SpectrumResult { method: SpectrumMethod::Numerov, entries })
}

/// A normalized Numerov eigenfunction on its own grid.
#[derive(Clone, Debug)]
pub struct NumerovState {
    pub n: usize,
    pub energy: f64,
    grid: Grid,
    psi: Vec<f64>,
    kappa: f64,
}

impl NumerovState {
    pub fn new(spec: &PotentialSpec, n: usize, config: &OracleConfig) -> Result<Self> {
        let p = Problem::new(spec, config)?;
        let level = solve_level(&p, config, n)?;
        let (e, grid) = (level.entry.energy, level.grid);
        let len = grid.x.len();
        let mut out = Vec::with_capacity(len);
        let mut inw = Vec::with_capacity(len);
        grid.sweep(e, true, Some(&mut out));
        grid.sweep(e, false, Some(&mut inw));
        inw.reverse();
        let m = match config.matching {
            Some(xm) => grid.x.iter().position(|&x| x >= xm).unwrap_or(len / 2),
            None => grid.v.iter().rposition(|&v| v < e).unwrap_or(len / 2),
        }
        .clamp(2, len - 3);
        let c = out[m] / inw[m];
        let mut psi: Vec<f64> = (0..len).map(|i| grid.factor(i) * if i <= m { out[i] } else { c * inw[i] }).collect();
        let peak = psi.iter().fold(0.0f64, |a, &b| a.max(b.abs()));
        let first = psi.iter().find(|y| y.abs() > 1e-3 * peak).copied().unwrap_or(1.0);
        let mut st = NumerovState { n, energy: e, kappa: grid.kappa(e), grid, psi: Vec::new() };
        let sign = first.signum();
        psi.iter_mut().for_each(|y| *y *= sign);
        st.psi = psi;
        let norm = st.norm().sqrt();
        st.psi.iter_mut().for_each(|y| *y /= norm);
        Ok(st)
    }

    pub fn x(&self) -> &[f64] {
        &self.grid.x
    }

    pub fn psi(&self) -> &[f64] {
        &self.psi
    }

    /// `∫ψ²` by the trapezoid rule plus the analytic tails beyond the grid.
    pub fn norm(&self) -> f64 {
        let g = &self.grid;
        let n = g.x.len() - 1;
        let w = |i: usize| self.psi[i] * self.psi[i] * if g.log { g.x[i] } else { 1.0 };
        let mut s = 0.5 * (w(0) + w(n));
        s += (1..n).map(w).sum::<f64>();
        s *= g.h;
        s += self.tail(g.left, 0);
        s + self.tail(g.right, n)
    }

    fn tail(&self, end: End, i: usize) -> f64 {
        let y2 = self.psi[i] * self.psi[i];
        match end {
            End::Power(nu) => y2 * self.grid.x[i] / (2.0 * nu + 2.0),
            End::Flat if self.kappa > 0.0 => y2 / (2.0 * self.kappa),
            _ => 0.0,
        }
    }

    /// ψ at x: 4-point interpolation inside the grid, asymptotic forms outside.
    pub fn eval(&self, x: f64) -> Result<f64> {
        let g = &self.grid;
        let n = g.x.len() - 1;
        if g.log && x <= 0.0 {
            return Err(Error::Domain { x });
        }
        if x < g.x[0] {
            return Ok(match g.left {
                End::Power(nu) => self.psi[0] * (x / g.x[0]).powf(nu + 0.5),
                End::Flat => self.psi[0] * (self.kappa * (x - g.x[0])).exp(),
                End::Wall => 0.0,
            });
        }
        if x > g.x[n] {
            return Ok(match g.right {
                End::Flat => self.psi[n] * (-self.kappa * (x - g.x[n])).exp(),
                _ => 0.0,
            });
        }
        let t = if g.log { x.ln() } else { x };
        let i = (((t - g.t0) / g.h).floor() as usize).clamp(1, n - 2);
        let ts: Vec<f64> = (i - 1..=i + 2).map(|j| g.t0 + g.h * j as f64).collect();
        Ok(neville(&ts, &self.psi[i - 1..=i + 2], t))
    }

    pub fn sample(&self, xs: &[f64]) -> Result<Vec<WaveSample>> {
        let k2 = self.grid.k2;
        let p = &self.grid;
        xs.iter()
            .map(|&x| {
                let psi = self.eval(x)?;
                let v = interp_v(p, x);
                let region = if k2 * (v - self.energy) < 0.0 { Region::Allowed } else { Region::Forbidden };
                Ok(WaveSample { x, psi, im: 0.0, log_scale: 0.0, region, map: None })
            })
            .collect()
    }
}

fn interp_v(g: &Grid, x: f64) -> f64 {
    let n = g.x.len() - 1;
    if x <= g.x[0] {
        return g.v[0];
    }
    if x >= g.x[n] {
        return g.v[n];
    }
    let t = if g.log { x.ln() } else { x };
    let i = (((t - g.t0) / g.h).floor() as usize).min(n - 1);
    let s = (t - (g.t0 + g.h * i as f64)) / g.h;
    g.v[i] * (1.0 - s) + g.v[i + 1] * s
}

/// The normalized Numerov eigenfunction of level n sampled on `grid`.
pub fn numerov_eigenfunction(
    spec: &PotentialSpec,
    n: usize,
    config: &OracleConfig,
    grid: &[f64],
) -> Result<Vec<WaveSample>> {
    NumerovState::new(spec, n, config)?.sample(grid)
}

/// Transmission and reflection from direct integration.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ScatteringResult {
    pub energy: f64,
    pub t: f64,
    pub r: f64,
    /// Change of T at the last tolerance tightening.
    pub change: f64,
}

/// Integrate from the transmitted side with an outgoing wave and split the
/// incident side into incident and reflected waves.
pub fn numerical_transmission(spec: &PotentialSpec, energy: f64, config: &OracleConfig) -> Result<ScatteringResult> {
    if spec.domain() != Domain::FullLine || !spec.threshold().is_finite() {
        return Err(Error::Classification("scattering needs a full-line potential with a finite level".into()));
    }
    let p = Problem::new(spec, config)?;
    if energy <= p.thr {
        return Err(Error::NoScattering { energy, level: p.thr });
    }
    let (xl, xr) = match config.extent {
        Some(ext) => ext,
        None => (flat_end(&p, -1.0)?, flat_end(&p, 1.0)?),
    };
    let k = (p.k2 * (energy - p.thr)).sqrt();
    let kin = |x: f64| p.k2 * (p.v(x) - energy);
    let run = |rtol: f64| -> Result<(f64, f64)> {
        let start = Complex64::new(0.0, k * xr).exp();
        let d = Complex64::new(0.0, k) * start;
        let y0 = [start.re, start.im, d.re, d.im];
        let (y, _) = dopri5(
            |x, y: &[f64; 4]| {
                let q = kin(x);
                [y[2], y[3], q * y[0], q * y[1]]
            },
            xr,
            y0,
            xl,
            rtol,
            rtol * 1e-3,
            0.01 / k.max(1.0 / p.length),
        )?;
        let psi = Complex64::new(y[0], y[1]);
        let dpsi = Complex64::new(y[2], y[3]) / Complex64::new(0.0, k);
        let a = 0.5 * (psi + dpsi) * Complex64::new(0.0, -k * xl).exp();
        let b = 0.5 * (psi - dpsi) * Complex64::new(0.0, k * xl).exp();
        Ok((1.0 / a.norm_sqr(), b.norm_sqr() / a.norm_sqr()))
    };
    let mut rtol = 1e-9;
    let mut prev = run(rtol)?;
    while rtol > 1e-14 {
        rtol /= 16.0;
        let cur = run(rtol)?;
        let change = (cur.0 - prev.0).abs();
        if change <= config.transmission_tol {
            return Ok(ScatteringResult { energy, t: cur.0, r: cur.1, change });
        }
        prev = cur;
    }
    Err(Error::Convergence(format!("transmission at E = {energy} did not settle")))
}

/// First point where the potential stays at its asymptotic level.
fn flat_end(p: &Problem, dir: f64) -> Result<f64> {
    let from = (0..=2400)
        .map(|k| p.length * (-60.0 + 0.05 * k as f64))
        .max_by(|a, b| (p.v(*a) - p.thr).abs().total_cmp(&(p.v(*b) - p.thr).abs()))
        .unwrap();
    let (mut x, mut h) = (from, 0.02 * p.length);
    while (x - from).abs() < 1e6 * p.length {
        x += dir * h;
        if p.is_flat(x, dir) {
            return Ok(x);
        }
        h *= 1.01;
    }
    Err(Error::Classification("the potential does not level off at its threshold".into()))
}

/// Exact transmission of `V = v0 sech²(αx)` from the hypergeometric solution.
pub fn poschl_teller_transmission(spec: &PotentialSpec, energy: f64) -> Result<f64> {
    if !matches!(spec.kind, PotentialKind::PoschlTellerBarrier | PotentialKind::PoschlTellerWell) {
        return Err(Error::Unsupported(format!("closed-form transmission of {}", spec.kind.name())));
    }
    if energy <= 0.0 {
        return Err(Error::NoScattering { energy, level: 0.0 });
    }
    let pr = &spec.params;
    let s = std::f64::consts::PI * (2.0 * pr.m * energy).sqrt() / (pr.hbar * pr.alpha);
    let u = 8.0 * pr.m * pr.v0 / (pr.hbar * pr.hbar * pr.alpha * pr.alpha);
    let y = 0.5 * std::f64::consts::PI * (u - 1.0).abs().sqrt();
    // ln|c| − ln sinh s, with c = cosh y above u = 1 and cos y below
    let ln_c = if u > 1.0 { y + (0.5 * (1.0 + (-2.0 * y).exp())).ln() } else { y.cos().abs().ln() };
    let ln_sinh = s + (0.5 * (1.0 - (-2.0 * s).exp())).ln();
    Ok(1.0 / (1.0 + (2.0 * (ln_c - ln_sinh)).exp()))
}

pub fn closed_form_curve(spec: &PotentialSpec, energies: &[f64]) -> Result<TransmissionCurve> {
    TransmissionCurve::build(TransmissionMethod::ClosedForm, spec, energies, poschl_teller_transmission)
}

pub fn numerical_curve(spec: &PotentialSpec, energies: &[f64], config: &OracleConfig) -> Result<TransmissionCurve> {
    TransmissionCurve::build(TransmissionMethod::ExactNumeric, spec, energies, |s, e| {
        numerical_transmission(s, e, config).map(|r| r.t)
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::potentials::{exact_spectrum, PhysicalParams, UserPotential};
    use std::sync::Arc;

    fn spec(kind: PotentialKind, f: impl FnOnce(&mut PhysicalParams)) -> PotentialSpec {
        let mut p = PhysicalParams::defaults_for(kind);
        f(&mut p);
        PotentialSpec::new(kind, p).unwrap()
    }

    fn levels(sp: &PotentialSpec, n_max: usize) -> Vec<f64> {
        numerov_eigenvalues(sp, n_max, &OracleConfig::default()).unwrap().energies()
    }

    #[test]
    fn hydrogen_levels() {
        let e = levels(&spec(PotentialKind::Hydrogen, |_| {}), 1);
        assert!((e[0] + 0.5).abs() < 1e-6, "{e:?}");
        assert!((e[1] + 0.125).abs() < 1e-6, "{e:?}");
    }

    #[test]
    fn poschl_teller_ground_state() {
        let e = levels(&spec(PotentialKind::PoschlTellerWell, |_| {}), 0);
        assert!((e[0] + 8.0).abs() < 1e-6, "{e:?}");
    }

    #[test]
    fn oscillator_levels() {
        let r =
            numerov_eigenvalues(&spec(PotentialKind::PureOscillator1d, |_| {}), 5, &OracleConfig::default()).unwrap();
        for en in &r.entries {
            assert!((en.energy - (en.n as f64 + 0.5)).abs() < 1e-7, "{en:?}");
            assert!(en.residual <= 1e-7);
        }
        assert_eq!(r.entries.len(), 6);
    }

    #[test]
    fn catalog_agrees_with_closed_forms() {
        let cases = [
            spec(PotentialKind::Hydrogen, |p| p.l = 2),
            spec(PotentialKind::OscillatorD, |p| p.l = 1),
            spec(PotentialKind::Morse, |_| {}),
            spec(PotentialKind::PoschlTellerWell, |_| {}),
            spec(PotentialKind::Eckart, |p| p.v1 = -10.0),
        ];
        for sp in &cases {
            let r = numerov_eigenvalues(sp, 5, &OracleConfig::default()).unwrap();
            for en in &r.entries {
                let exact = exact_spectrum(sp, en.n).unwrap();
                assert!((en.energy - exact).abs() < 1e-6, "{:?} n={} {} {}", sp.kind, en.n, en.energy, exact);
            }
            assert!(!r.entries.is_empty());
        }
    }

    #[test]
    fn ground_state_shape() {
        let sp = spec(PotentialKind::Hydrogen, |_| {});
        let st = NumerovState::new(&sp, 0, &OracleConfig::default()).unwrap();
        assert!((st.norm() - 1.0).abs() < 1e-6);
        let xs: Vec<f64> = (1..=4000).map(|i| i as f64 * 1e-3).collect();
        let s = st.sample(&xs).unwrap();
        let peak = s.iter().max_by(|a, b| a.psi.total_cmp(&b.psi)).unwrap();
        assert!((peak.x - 1.0).abs() <= 1e-3, "{}", peak.x);
        assert!(s.iter().all(|w| w.psi > 0.0));
        // 2x e^{−x} on the log grid
        for w in s.iter().step_by(97) {
            assert!((w.psi - 2.0 * w.x * (-w.x).exp()).abs() < 1e-6, "{:?}", w);
        }
    }

    #[test]
    fn excited_states_have_n_nodes() {
        let sp = spec(PotentialKind::PureOscillator1d, |_| {});
        for n in 0..4 {
            let st = NumerovState::new(&sp, n, &OracleConfig::default()).unwrap();
            assert!((st.norm() - 1.0).abs() < 1e-6);
            let ps: Vec<f64> = st.psi().iter().copied().filter(|y| y.abs() > 1e-8).collect();
            let nodes = ps.windows(2).filter(|w| w[0] * w[1] < 0.0).count();
            assert_eq!(nodes, n);
        }
    }

    #[test]
    fn free_motion() {
        let u = UserPotential {
            name: "free".into(),
            v: Arc::new(|_| 0.0),
            domain: Domain::FullLine,
            pole_order: 0,
            threshold: Some(0.0),
            extreme_hint: None,
        };
        let sp = PotentialSpec::user(u, PhysicalParams::default()).unwrap();
        let r = numerical_transmission(&sp, 0.7, &OracleConfig::default()).unwrap();
        assert!((r.t - 1.0).abs() < 1e-10 && r.r < 1e-10);
    }

    #[test]
    fn barrier_matches_hypergeometric_form() {
        for v0 in [0.25, 1.25, 2.5] {
            let sp = spec(PotentialKind::PoschlTellerBarrier, |p| p.v0 = v0);
            for e in [0.05, 0.3, 1.0, 2.0, 2.5, 4.0, 9.0] {
                let r = numerical_transmission(&sp, e, &OracleConfig::default()).unwrap();
                let exact = poschl_teller_transmission(&sp, e).unwrap();
                assert!((r.t - exact).abs() < 1e-7, "v0={v0} e={e} {} {}", r.t, exact);
                assert!((r.t + r.r - 1.0).abs() < 1e-8);
            }
        }
        let sp = spec(PotentialKind::PoschlTellerBarrier, |_| {});
        assert!(matches!(numerical_transmission(&sp, -0.1, &OracleConfig::default()), Err(Error::NoScattering { .. })));
        assert!(matches!(
            numerical_transmission(&spec(PotentialKind::Hydrogen, |_| {}), 1.0, &OracleConfig::default()),
            Err(Error::Classification(_))
        ));
    }

    #[test]
    fn reflectionless_well() {
        // v0 = −α²ħ²λ(λ+1)/2m with λ = 3 transmits fully
        let sp = spec(PotentialKind::PoschlTellerWell, |p| p.v0 = -6.0);
        for e in [0.1, 1.0, 3.0] {
            assert!((poschl_teller_transmission(&sp, e).unwrap() - 1.0).abs() < 1e-12);
            let r = numerical_transmission(&sp, e, &OracleConfig::default()).unwrap();
            assert!(r.r < 1e-8, "{e} {}", r.r);
        }
    }
}

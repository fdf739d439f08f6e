//! Request validation, library calls and artifact assembly.

use std::io::Write;

use rayon::prelude::*;
use serde_json::{Map, Value};
use uaa_core::oracle::{
    numerical_transmission, numerov_eigenfunction, numerov_eigenvalues, poschl_teller_transmission, OracleConfig,
};
use uaa_core::potentials::{
    build_splitting, exact_spectrum, wkb_splitting, Domain, PhysicalParams, PotentialKind, PotentialSpec, Splitting,
};
use uaa_core::semiclassical::{
    error_control_h, error_control_i, find_turning_points, solve_level, transmission_improved, transmission_wkb,
    QuantizationRule, TurningPoints,
};
use uaa_core::wavefunction::{
    psi_barrier, psi_single_tp, psi_well, BcKind, BoundaryCondition, Normalization, WaveSample,
};
use uaa_core::Error;

use crate::table::{render_csv, render_json, Cell, Meta, Table, Units};
use crate::{BcArg, Command, Common, ControlFn, Format, NormArg, XGrid};

const SPECTRUM_METHODS: &[&str] = &["exact", "wkb", "improved", "numerov"];
const TRANSMIT_METHODS: &[&str] = &["improved", "wkb", "exact-numeric", "closed-form"];
const WAVE_METHODS: &[&str] = &["uniform", "numerov"];
const CONTROL_METHODS: &[&str] = &["improved", "wkb"];

#[derive(Debug)]
pub struct Failure {
    pub code: u8,
    pub message: String,
}

impl Failure {
    fn invalid(message: impl Into<String>) -> Self {
        Failure { code: 2, message: message.into() }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure { code: if e.is_validation() { 2 } else { 3 }, message: e.to_string() }
    }
}

type Outcome<T> = std::result::Result<T, Failure>;

/// The validated potential plus the bookkeeping every artifact carries.
struct Context {
    spec: PotentialSpec,
    methods: Vec<String>,
    notes: Vec<String>,
}

impl Context {
    fn new(common: &Common, valid: &[&str], default: &[&str], command: &str) -> Outcome<Self> {
        let kind: PotentialKind = common.potential.parse()?;
        if kind == PotentialKind::UserDefined {
            let names: Vec<_> = PotentialKind::CATALOG.iter().map(|k| k.name()).collect();
            return Err(Failure::invalid(format!(
                "user-defined potentials are library-only; valid: {}",
                names.join(", ")
            )));
        }
        let mut params = PhysicalParams::defaults_for(kind);
        for pair in common.params.split(',').map(str::trim).filter(|s| !s.is_empty()) {
            let (k, v) = pair
                .split_once('=')
                .ok_or_else(|| Failure::invalid(format!("parameter '{pair}' is not of the form key=value")))?;
            params.set(kind, k.trim(), v.trim())?;
        }
        let spec = PotentialSpec::new(kind, params)?;
        let methods = parse_methods(&common.methods, valid, default, command)?;
        Ok(Context { spec, methods, notes: Vec::new() })
    }

    /// Keep going past a missing value (no level, no real turning points,
    /// below threshold) but stop on anything else.
    fn soft<T>(&mut self, method: &str, r: uaa_core::Result<T>) -> Outcome<Option<T>> {
        match r {
            Ok(v) => Ok(Some(v)),
            Err(e @ (Error::NoBoundState { .. } | Error::MethodInapplicable(_) | Error::NoScattering { .. })) => {
                self.note(format!("{method}: {e}"));
                Ok(None)
            }
            Err(e) => Err(e.into()),
        }
    }

    fn note(&mut self, s: String) {
        if !self.notes.contains(&s) {
            self.notes.push(s);
        }
    }

    fn meta(self, command: &str) -> Meta {
        let p = self.spec.params;
        let params: Map<String, Value> = p
            .entries(self.spec.kind)
            .into_iter()
            .map(|(k, v)| {
                let v = if k == "l" || k == "D" { Value::from(v as u64) } else { Value::from(v) };
                (k.to_string(), v)
            })
            .collect();
        Meta {
            command: command.into(),
            potential: self.spec.kind.name().into(),
            params,
            method: self.methods,
            version: format!("uaa-core {}", uaa_core::VERSION),
            units: Units {
                m: p.m,
                hbar: p.hbar,
                system: "energies and lengths in the units fixed by m, hbar and the potential parameters",
            },
            notes: self.notes,
        }
    }
}

fn parse_methods(given: &[String], valid: &[&str], default: &[&str], command: &str) -> Outcome<Vec<String>> {
    let list: Vec<&str> = if given.is_empty() { default.to_vec() } else { given.iter().map(|s| s.trim()).collect() };
    let mut out: Vec<String> = Vec::new();
    for m in list {
        if !valid.contains(&m) {
            return Err(Failure::invalid(format!("unknown method '{m}' for {command}; valid: {}", valid.join(", "))));
        }
        if !out.iter().any(|o| o == m) {
            out.push(m.to_string());
        }
    }
    Ok(out)
}

fn parse_levels(s: &str) -> Outcome<Vec<usize>> {
    let bad = || Failure::invalid(format!("level range '{s}' must be 'a..b' with a <= b, or a single level"));
    let (a, b) = match s.split_once("..") {
        Some((a, b)) => (a.trim().parse().map_err(|_| bad())?, b.trim().parse().map_err(|_| bad())?),
        None => {
            let n = s.trim().parse().map_err(|_| bad())?;
            (n, n)
        }
    };
    if a > b {
        return Err(bad());
    }
    Ok((a..=b).collect())
}

fn linspace(lo: f64, hi: f64, steps: usize, what: &str) -> Outcome<Vec<f64>> {
    if !(lo.is_finite() && hi.is_finite()) || lo > hi || steps == 0 {
        return Err(Failure::invalid(format!("{what} range needs finite min <= max and at least one step")));
    }
    if steps == 1 {
        return Ok(vec![lo]);
    }
    Ok((0..steps).map(|i| lo + (hi - lo) * i as f64 / (steps - 1) as f64).collect())
}

fn energy_grid(emin: f64, emax: f64, steps: usize) -> Outcome<Vec<f64>> {
    linspace(emin, emax, steps, "energy")
}

fn x_grid(spec: &PotentialSpec, g: &XGrid) -> Outcome<Vec<f64>> {
    let l = spec.length_scale();
    let (lo, hi) = match spec.domain() {
        Domain::HalfLine => (1e-3 * l, 40.0 * l),
        Domain::FullLine => (-15.0 * l, 15.0 * l),
    };
    let (lo, hi) = (g.xmin.unwrap_or(lo), g.xmax.unwrap_or(hi));
    if g.points < 2 || lo >= hi {
        return Err(Failure::invalid("x grid needs xmin < xmax and at least two points"));
    }
    linspace(lo, hi, g.points, "x")
}

fn emit(format: Format, output: &Option<std::path::PathBuf>, meta: &Meta, table: &Table) -> Outcome<()> {
    let text = match format {
        Format::Csv => render_csv(meta, table),
        Format::Json => render_json(meta, table),
    };
    let io = |e: std::io::Error| Failure { code: 3, message: format!("cannot write artifact: {e}") };
    match output {
        Some(path) => std::fs::write(path, text).map_err(io),
        None => std::io::stdout().lock().write_all(text.as_bytes()).map_err(io),
    }
}

pub fn run(command: Command) -> Outcome<()> {
    match command {
        Command::Spectrum { common, n, boundary } => {
            let mut ctx = Context::new(&common, SPECTRUM_METHODS, &["exact", "wkb", "improved"], "spectrum")?;
            let levels = parse_levels(&n)?;
            let values = spectrum_values(&mut ctx, &levels, boundary)?;
            let mut table = Table::new(&["n", "method", "E"]);
            for (m, column) in ctx.methods.iter().zip(&values) {
                for (&n, e) in levels.iter().zip(column) {
                    table.rows.push(vec![Cell::Int(n as i64), Cell::Text(m.clone()), Cell::Num(e.unwrap_or(f64::NAN))]);
                }
            }
            emit(common.format, &common.output, &ctx.meta("spectrum"), &table)
        }
        Command::Transmit { common, emin, emax, steps } => {
            let mut ctx = Context::new(&common, TRANSMIT_METHODS, &["improved"], "transmit")?;
            let energies = energy_grid(emin, emax, steps)?;
            let values = transmission_values(&mut ctx, &energies)?;
            let mut table = Table::new(&["E", "method", "T"]);
            for (m, column) in ctx.methods.iter().zip(&values) {
                for (&e, t) in energies.iter().zip(column) {
                    table.rows.push(vec![Cell::Num(e), Cell::Text(m.clone()), Cell::Num(t.unwrap_or(f64::NAN))]);
                }
            }
            emit(common.format, &common.output, &ctx.meta("transmit"), &table)
        }
        Command::Wavefunction { common, n, energy, grid, bc, normalization } => {
            let mut ctx = Context::new(&common, WAVE_METHODS, &["uniform"], "wavefunction")?;
            let xs = x_grid(&ctx.spec, &grid)?;
            let table = wavefunction_table(&mut ctx, n, energy, bc, normalization, &xs)?;
            emit(common.format, &common.output, &ctx.meta("wavefunction"), &table)
        }
        Command::ErrorControl { common, energy, grid, function, anchor } => {
            let mut ctx = Context::new(&common, CONTROL_METHODS, &["improved"], "error-control")?;
            let xs = x_grid(&ctx.spec, &grid)?;
            let table = control_table(&mut ctx, energy, function, anchor, &xs)?;
            emit(common.format, &common.output, &ctx.meta("error-control"), &table)
        }
        Command::Compare { common, n, emin, emax, steps } => compare(common, n, emin, emax, steps),
    }
}

/// Barriers, or any request with an energy range, compare T(E); everything
/// else compares bound-state energies.
fn compare(
    common: Common,
    n: Option<String>,
    emin: Option<f64>,
    emax: Option<f64>,
    steps: Option<usize>,
) -> Outcome<()> {
    let kind: PotentialKind = common.potential.parse()?;
    let transmit = kind == PotentialKind::PoschlTellerBarrier || emin.is_some() || emax.is_some() || steps.is_some();
    if transmit {
        let mut ctx = Context::new(&common, TRANSMIT_METHODS, &["improved", "wkb", "exact-numeric"], "compare")?;
        if n.is_some() {
            return Err(Failure::invalid("--n does not apply to a transmission comparison"));
        }
        // default window: from just above zero to twice the barrier height
        let v0 = ctx.spec.params.v0;
        let (emin, emax) = match (emin, emax, kind) {
            (Some(a), Some(b), _) => (a, b),
            (a, b, PotentialKind::PoschlTellerBarrier) => (a.unwrap_or(v0 / 250.0), b.unwrap_or(2.0 * v0)),
            _ => return Err(Failure::invalid("a transmission comparison needs --emin and --emax")),
        };
        let energies = energy_grid(emin, emax, steps.unwrap_or(200))?;
        let values = transmission_values(&mut ctx, &energies)?;
        let mut cols = vec!["E"];
        cols.extend(ctx.methods.iter().map(String::as_str));
        let mut table = Table::new(&cols);
        for (i, &e) in energies.iter().enumerate() {
            let mut row = vec![Cell::Num(e)];
            row.extend(values.iter().map(|c| Cell::Num(c[i].unwrap_or(f64::NAN))));
            table.rows.push(row);
        }
        emit(common.format, &common.output, &ctx.meta("compare"), &table)
    } else {
        let mut ctx = Context::new(&common, SPECTRUM_METHODS, SPECTRUM_METHODS, "compare")?;
        let levels = parse_levels(n.as_deref().unwrap_or("0..5"))?;
        let values = spectrum_values(&mut ctx, &levels, None)?;
        let mut cols = vec!["n"];
        cols.extend(ctx.methods.iter().map(String::as_str));
        let mut table = Table::new(&cols);
        for (i, &n) in levels.iter().enumerate() {
            let mut row = vec![Cell::Int(n as i64)];
            row.extend(values.iter().map(|c| Cell::Num(c[i].unwrap_or(f64::NAN))));
            table.rows.push(row);
        }
        emit(common.format, &common.output, &ctx.meta("compare"), &table)
    }
}

/// One column of energies per method, `None` where the level does not exist.
fn spectrum_values(ctx: &mut Context, levels: &[usize], boundary: Option<f64>) -> Outcome<Vec<Vec<Option<f64>>>> {
    let spec = ctx.spec.clone();
    let mut out = Vec::new();
    for m in ctx.methods.clone() {
        let column = match m.as_str() {
            "numerov" => {
                let n_max = *levels.last().expect("level range is non-empty");
                let found = numerov_eigenvalues(&spec, n_max, &OracleConfig::default())?;
                levels
                    .iter()
                    .map(|&n| {
                        let e = found.entries.iter().find(|e| e.n == n).map(|e| e.energy);
                        if e.is_none() {
                            ctx.note(format!("numerov: {}", Error::NoBoundState { n }));
                        }
                        e
                    })
                    .collect()
            }
            name => {
                let mut column = Vec::new();
                for &n in levels {
                    let r = match name {
                        "exact" => exact_spectrum(&spec, n),
                        "wkb" => solve_level(&spec, QuantizationRule::Wkb, n, boundary).map(|e| e.energy),
                        _ => solve_level(&spec, QuantizationRule::Improved, n, boundary).map(|e| e.energy),
                    };
                    column.push(ctx.soft(name, r)?);
                }
                column
            }
        };
        out.push(column);
    }
    Ok(out)
}

/// One column of T per method, evaluated in parallel over the energies.
fn transmission_values(ctx: &mut Context, energies: &[f64]) -> Outcome<Vec<Vec<Option<f64>>>> {
    let spec = ctx.spec.clone();
    let config = OracleConfig::default();
    let mut out = Vec::new();
    for m in ctx.methods.clone() {
        if m == "closed-form" && spec.kind != PotentialKind::PoschlTellerBarrier {
            return Err(Failure::invalid("closed-form transmission exists only for poschl-teller-barrier"));
        }
        let results: Vec<uaa_core::Result<f64>> = energies
            .par_iter()
            .map(|&e| match m.as_str() {
                "improved" => transmission_improved(&spec, e),
                "wkb" => transmission_wkb(&spec, e),
                "exact-numeric" => numerical_transmission(&spec, e, &config).map(|s| s.t),
                _ => poschl_teller_transmission(&spec, e),
            })
            .collect();
        let mut column = Vec::with_capacity(results.len());
        for r in results {
            column.push(ctx.soft(&m, r)?);
        }
        out.push(column);
    }
    Ok(out)
}

fn wave_rows(table: &mut Table, method: &str, energy: f64, samples: &[WaveSample]) {
    for s in samples {
        let region = serde_json::to_value(s.region).ok().and_then(|v| v.as_str().map(String::from)).unwrap_or_default();
        table.rows.push(vec![
            Cell::Num(s.x),
            Cell::Text(method.into()),
            Cell::Num(energy),
            Cell::Num(s.psi),
            Cell::Num(s.im),
            Cell::Num(s.log_scale),
            Cell::Text(region),
            Cell::Num(s.map.unwrap_or(f64::NAN)),
        ]);
    }
}

fn wavefunction_table(
    ctx: &mut Context,
    n: Option<usize>,
    energy: Option<f64>,
    bc: Option<BcArg>,
    normalization: Option<NormArg>,
    xs: &[f64],
) -> Outcome<Table> {
    let spec = ctx.spec.clone();
    let mut table = Table::new(&["x", "method", "E", "psi", "im", "log_scale", "region", "map"]);
    if n.is_some() && energy.is_some() {
        return Err(Failure::invalid("give either --n for a bound level or --energy, not both"));
    }
    for m in ctx.methods.clone() {
        match (m.as_str(), n) {
            ("numerov", Some(n)) => {
                let samples = numerov_eigenfunction(&spec, n, &OracleConfig::default(), xs)?;
                let e = numerov_eigenvalues(&spec, n, &OracleConfig::default())?
                    .entries
                    .iter()
                    .find(|e| e.n == n)
                    .map(|e| e.energy)
                    .ok_or(Error::NoBoundState { n })?;
                wave_rows(&mut table, "numerov", e, &samples);
            }
            ("numerov", None) => return Err(Failure::invalid("the numerov wave function needs --n")),
            (_, Some(n)) => {
                let e = solve_level(&spec, QuantizationRule::Improved, n, None)?.energy;
                let split = build_splitting(&spec, e)?;
                let tps = find_turning_points(&split)?;
                wave_rows(&mut table, "uniform", e, &psi_well(&split, &tps, n, xs)?);
            }
            (_, None) => {
                let e = energy.ok_or_else(|| Failure::invalid("the wave function needs --n or --energy"))?;
                let split = build_splitting(&spec, e)?;
                let tps = find_turning_points(&split)?;
                let samples = if tps.is_barrier() {
                    let norm = normalization.map(norm_kind).unwrap_or(Normalization::UnitIncidentFlux);
                    let kind = bc.map(bc_kind).unwrap_or(BcKind::IncidentFromLeft);
                    let (samples, amps) = psi_barrier(&split, &tps, BoundaryCondition::new(kind, norm), xs)?;
                    ctx.note(format!("uniform: T = {:.16e}, R = {:.16e}", amps.transmission(), amps.reflection()));
                    samples
                } else if let TurningPoints::SingleReal { x0 } = tps.points {
                    let norm = normalization.map(norm_kind).unwrap_or(Normalization::Raw);
                    let kind = bc.map(bc_kind).unwrap_or_else(|| decaying_side(&split, x0));
                    psi_single_tp(&split, x0, BoundaryCondition::new(kind, norm), xs)?
                } else if tps.is_well() {
                    return Err(Failure::invalid("bound states are addressed by --n"));
                } else {
                    return Err(Failure::invalid("no uniform form for this turning-point topology"));
                };
                wave_rows(&mut table, "uniform", e, &samples);
            }
        }
    }
    Ok(table)
}

fn bc_kind(b: BcArg) -> BcKind {
    match b {
        BcArg::DecayAtInfinity => BcKind::DecayAtInfinity,
        BcArg::DecayAtOrigin => BcKind::DecayAtOrigin,
        BcArg::IncidentFromLeft => BcKind::IncidentFromLeft,
    }
}

fn norm_kind(n: NormArg) -> Normalization {
    match n {
        NormArg::UnitL2 => Normalization::UnitL2,
        NormArg::UnitIncidentFlux => Normalization::UnitIncidentFlux,
        NormArg::Raw => Normalization::Raw,
    }
}

/// The decaying solution on whichever side of x0 is forbidden.
fn decaying_side(split: &Splitting, x0: f64) -> BcKind {
    let dx = 1e-3 * split.spec.length_scale().max(x0.abs());
    if split.g(x0 + dx) > 0.0 {
        BcKind::DecayAtInfinity
    } else {
        BcKind::DecayAtOrigin
    }
}

fn control_table(
    ctx: &mut Context,
    energy: f64,
    function: ControlFn,
    anchor: Option<f64>,
    xs: &[f64],
) -> Outcome<Table> {
    let spec = ctx.spec.clone();
    let mut table = Table::new(&["x", "method", "value"]);
    for m in ctx.methods.clone() {
        let split = if m == "wkb" { wkb_splitting(&spec, energy) } else { build_splitting(&spec, energy)? };
        let tps = find_turning_points(&split)?;
        let values: Vec<f64> = match function {
            ControlFn::H => {
                let x0 = match (anchor, tps.points) {
                    (Some(a), _) => a,
                    (None, TurningPoints::SingleReal { x0 }) => x0,
                    (None, TurningPoints::PairReal { x1, .. }) => x1,
                    _ => {
                        return Err(Failure::invalid(format!("{m}: no real turning point to anchor at; pass --anchor")))
                    }
                };
                xs.par_iter().map(|&x| error_control_h(&split, x0, x)).collect::<uaa_core::Result<_>>()?
            }
            ControlFn::I => {
                xs.par_iter().map(|&x| error_control_i(&split, &tps, x)).collect::<uaa_core::Result<_>>()?
            }
        };
        if values.iter().any(|v| !v.is_finite()) {
            ctx.note(format!("{m}: the error-control function diverges on part of the grid"));
        }
        for (&x, v) in xs.iter().zip(values) {
            table.rows.push(vec![Cell::Num(x), Cell::Text(m.clone()), Cell::Num(v)]);
        }
    }
    Ok(table)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn level_ranges_are_inclusive() {
        assert_eq!(parse_levels("0..5").unwrap(), vec![0, 1, 2, 3, 4, 5]);
        assert_eq!(parse_levels("3").unwrap(), vec![3]);
        assert_eq!(parse_levels("4..2").unwrap_err().code, 2);
        assert!(parse_levels("a..2").is_err());
    }

    #[test]
    fn grids_hit_both_ends() {
        let g = linspace(0.01, 5.0, 200, "energy").unwrap();
        assert_eq!((g[0], g[199], g.len()), (0.01, 5.0, 200));
        assert_eq!(linspace(1.0, 1.0, 1, "x").unwrap(), vec![1.0]);
        assert!(linspace(1.0, 0.0, 3, "x").is_err());
        assert!(linspace(0.0, 1.0, 0, "x").is_err());
    }

    #[test]
    fn methods_are_deduplicated_in_order() {
        let given: Vec<String> = ["wkb", "exact", "wkb"].iter().map(|s| s.to_string()).collect();
        assert_eq!(parse_methods(&given, SPECTRUM_METHODS, &["exact"], "spectrum").unwrap(), ["wkb", "exact"]);
        assert_eq!(parse_methods(&[], SPECTRUM_METHODS, &["exact"], "spectrum").unwrap(), ["exact"]);
    }
}

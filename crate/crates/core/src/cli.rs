//! Command-line front end.
//!
//! Every command prints a table, CSV (default) or JSON (an array of flat
//! records with the CSV column names). Floats are written with 17
//! significant digits. Exit codes: 0 success, 2 invalid input, 3 numerical
//! non-convergence.

use std::collections::HashSet;
use std::fs;
use std::io::{self, Write};
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde_json::{Map, Number, Value};

use crate::asymptotics::{classify, DEFAULT_THRESHOLD};
use crate::error::{Error, Result};
use crate::force::{find_force_zeros, force};
use crate::kernels::{kernel_value, Axis, GRoute, KernelConfig};
use crate::model::{energy_unit, force_unit, to_reduced, AtomSpec, Environment, ReducedPoint, StateLabel};
use crate::shifts::shift_states;

const SI_CAVEAT: &str = "note: SI values are reduced values times 3 hbar omega0^4 alpha0 / (128 pi eps0 c^3), \
with alpha in the same convention as the reduced formulas; absolute calibration depends on that convention";

#[derive(Parser, Debug)]
#[command(name = "atomwall", version, about = "Level shifts and forces on a two-level atom near a conducting wall")]
#[command(args_override_self = true)]
struct Cli {
    /// File of `key = value` lines used as default flags; flags on the command line win.
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Shift at one point.
    Shift(ShiftArgs),
    /// Shifts over a distance grid.
    Sweep(SweepArgs),
    /// Temperature and distance regime of a point.
    Classify(ClassifyArgs),
    /// Per-axis kernel values.
    Kernels(KernelArgs),
    /// Force at one point, or its zeros with `force zeros`.
    Force(ForceArgs),
}

#[derive(Args, Debug, Clone)]
struct AtomArgs {
    /// Transition angular frequency, rad/s. Needed for physical inputs and SI output.
    #[arg(long)]
    omega0: Option<f64>,
    /// Total polarizability, split evenly over the three axes.
    #[arg(long, conflicts_with = "alpha")]
    isotropic: Option<f64>,
    /// Per-axis polarizabilities `ax,ay,az`.
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    alpha: Option<Vec<f64>>,
}

#[derive(Args, Debug, Clone)]
struct TemperatureArgs {
    /// Temperature, kelvin (0 allowed).
    #[arg(long, conflicts_with = "theta")]
    temp: Option<f64>,
    /// Reduced inverse temperature hbar omega0 / (k_B T); `inf` for T = 0.
    #[arg(long)]
    theta: Option<f64>,
}

#[derive(Args, Debug, Clone)]
struct DistanceArgs {
    /// Distance from the wall, metres.
    #[arg(long, conflicts_with = "zeta")]
    z: Option<f64>,
    /// Reduced distance omega0 z / c.
    #[arg(long)]
    zeta: Option<f64>,
}

#[derive(Args, Debug, Clone)]
struct NumericArgs {
    /// Relative tolerance of the kernel sums.
    #[arg(long, default_value_t = 1e-10)]
    tol: f64,
    #[arg(long, value_enum, default_value_t = RouteArg::Auto)]
    route: RouteArg,
}

#[derive(Args, Debug, Clone)]
struct OutputArgs {
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
    /// Write here instead of stdout.
    #[arg(long, value_name = "PATH")]
    output: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = UnitsArg::Reduced)]
    units: UnitsArg,
}

#[derive(Args, Debug, Clone)]
struct ShiftArgs {
    #[command(flatten)]
    atom: AtomArgs,
    #[command(flatten)]
    temperature: TemperatureArgs,
    #[command(flatten)]
    distance: DistanceArgs,
    #[arg(long, value_enum, default_value_t = StateArg::All)]
    state: StateArg,
    #[command(flatten)]
    numeric: NumericArgs,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args, Debug, Clone)]
struct SweepArgs {
    #[command(flatten)]
    atom: AtomArgs,
    #[command(flatten)]
    temperature: TemperatureArgs,
    /// Smallest distance, metres.
    #[arg(long, requires = "z_max", conflicts_with_all = ["zeta_min", "zeta_max"])]
    z_min: Option<f64>,
    #[arg(long, requires = "z_min")]
    z_max: Option<f64>,
    /// Smallest reduced distance.
    #[arg(long, requires = "zeta_max")]
    zeta_min: Option<f64>,
    #[arg(long, requires = "zeta_min")]
    zeta_max: Option<f64>,
    /// Number of grid points.
    #[arg(long, default_value_t = 32)]
    count: usize,
    #[arg(long, value_enum, default_value_t = Spacing::Linear)]
    spacing: Spacing,
    #[arg(long, value_enum, default_value_t = StateArg::All)]
    state: StateArg,
    #[command(flatten)]
    numeric: NumericArgs,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args, Debug, Clone)]
struct ClassifyArgs {
    #[arg(long)]
    omega0: Option<f64>,
    #[command(flatten)]
    temperature: TemperatureArgs,
    #[command(flatten)]
    distance: DistanceArgs,
    #[arg(long, default_value_t = DEFAULT_THRESHOLD)]
    threshold: f64,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
    #[arg(long, value_name = "PATH")]
    output: Option<PathBuf>,
}

#[derive(Args, Debug, Clone)]
struct KernelArgs {
    #[arg(long)]
    omega0: Option<f64>,
    #[command(flatten)]
    temperature: TemperatureArgs,
    #[command(flatten)]
    distance: DistanceArgs,
    #[command(flatten)]
    numeric: NumericArgs,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
    #[arg(long, value_name = "PATH")]
    output: Option<PathBuf>,
}

#[derive(Args, Debug, Clone)]
#[command(args_conflicts_with_subcommands = true)]
struct ForceArgs {
    #[command(subcommand)]
    zeros: Option<ForceSub>,
    #[command(flatten)]
    point: ForcePointArgs,
}

#[derive(Args, Debug, Clone)]
struct ForcePointArgs {
    #[command(flatten)]
    atom: AtomArgs,
    #[command(flatten)]
    temperature: TemperatureArgs,
    #[command(flatten)]
    distance: DistanceArgs,
    #[arg(long, value_enum, default_value_t = StateArg::All)]
    state: StateArg,
    #[command(flatten)]
    numeric: NumericArgs,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Subcommand, Debug, Clone)]
enum ForceSub {
    /// Zeros of the force on a reduced-distance interval.
    Zeros(ZerosArgs),
}

#[derive(Args, Debug, Clone)]
struct ZerosArgs {
    #[command(flatten)]
    atom: AtomArgs,
    #[command(flatten)]
    temperature: TemperatureArgs,
    #[arg(long)]
    zeta_min: f64,
    #[arg(long)]
    zeta_max: f64,
    #[arg(long, value_enum, default_value_t = StateArg::All)]
    state: StateArg,
    /// Absolute tolerance on the located zeta.
    #[arg(long, default_value_t = 1e-10)]
    root_tol: f64,
    #[command(flatten)]
    numeric: NumericArgs,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
    #[arg(long, value_name = "PATH")]
    output: Option<PathBuf>,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
enum Format {
    Csv,
    Json,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
enum UnitsArg {
    Reduced,
    Si,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
enum Spacing {
    Linear,
    Log,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
enum RouteArg {
    Auto,
    Image,
    Frequency,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
enum StateArg {
    Ground,
    Excited,
    Average,
    All,
}

impl StateArg {
    fn states(self) -> Vec<StateLabel> {
        match self {
            StateArg::Ground => vec![StateLabel::Ground],
            StateArg::Excited => vec![StateLabel::Excited],
            StateArg::Average => vec![StateLabel::ThermalAverage],
            StateArg::All => StateLabel::ALL.to_vec(),
        }
    }
}

impl NumericArgs {
    fn config(&self) -> KernelConfig {
        let route = match self.route {
            RouteArg::Auto => GRoute::Auto,
            RouteArg::Image => GRoute::ImageSum,
            RouteArg::Frequency => GRoute::FrequencySum,
        };
        KernelConfig::with_tol(self.tol).with_route(route)
    }
}

/// Placeholder frequency for purely reduced runs; reduced results do not depend on it.
const REDUCED_OMEGA0: f64 = 1.0;

fn build_atom(a: &AtomArgs, need_omega0: bool) -> Result<AtomSpec> {
    let omega0 = match a.omega0 {
        Some(w) => w,
        None if need_omega0 => {
            return Err(Error::invalid("--omega0 is required for physical inputs and SI output"))
        }
        None => REDUCED_OMEGA0,
    };
    match (&a.isotropic, &a.alpha) {
        (Some(a0), None) => AtomSpec::isotropic(omega0, *a0),
        (None, Some(v)) => match v[..] {
            [ax, ay, az] => AtomSpec::new(omega0, ax, ay, az),
            _ => Err(Error::invalid(format!("--alpha takes three values ax,ay,az, got {}", v.len()))),
        },
        _ => Err(Error::invalid("polarizability missing: give --isotropic or --alpha")),
    }
}

fn bare_atom(omega0: Option<f64>, need_omega0: bool) -> Result<AtomSpec> {
    build_atom(
        &AtomArgs {
            omega0,
            isotropic: Some(1.0),
            alpha: None,
        },
        need_omega0,
    )
}

fn physical_input(t: &TemperatureArgs, z: Option<f64>) -> bool {
    t.temp.is_some() || z.is_some()
}

fn theta_of(atom: &AtomSpec, t: &TemperatureArgs) -> Result<f64> {
    match (t.temp, t.theta) {
        (Some(temp), None) => Ok(to_reduced(atom, &Environment::new(temp, 1.0)?)?.theta),
        (None, Some(theta)) => Ok(theta),
        _ => Err(Error::invalid("temperature missing: give --temp or --theta")),
    }
}

fn zeta_of(atom: &AtomSpec, z: Option<f64>, zeta: Option<f64>) -> Result<f64> {
    match (z, zeta) {
        (Some(z), None) => Ok(to_reduced(atom, &Environment::new(0.0, z)?)?.zeta),
        (None, Some(zeta)) => Ok(zeta),
        _ => Err(Error::invalid("distance missing: give --z or --zeta")),
    }
}

fn point_of(atom: &AtomSpec, t: &TemperatureArgs, d: &DistanceArgs) -> Result<ReducedPoint> {
    let theta = theta_of(atom, t)?;
    ReducedPoint::new(zeta_of(atom, d.z, d.zeta)?, theta)
}

enum Cell {
    Num(f64),
    Int(u64),
    Text(String),
}

struct Table {
    headers: Vec<&'static str>,
    rows: Vec<Vec<Cell>>,
}

fn fmt_num(x: f64) -> String {
    if x.is_infinite() {
        if x > 0.0 { "inf".into() } else { "-inf".into() }
    } else {
        format!("{x:.16e}")
    }
}

impl Table {
    fn new(headers: &[&'static str]) -> Self {
        Self {
            headers: headers.to_vec(),
            rows: Vec::new(),
        }
    }

    fn check_finite(&self) -> Result<()> {
        for row in &self.rows {
            for c in row {
                if let Cell::Num(x) = c {
                    if x.is_nan() {
                        return Err(Error::no_convergence("output", "a value came out as NaN"));
                    }
                }
            }
        }
        Ok(())
    }

    fn render(&self, format: Format) -> String {
        match format {
            Format::Csv => {
                let mut s = self.headers.join(",");
                s.push('\n');
                for row in &self.rows {
                    let cells: Vec<String> = row
                        .iter()
                        .map(|c| match c {
                            Cell::Num(x) => fmt_num(*x),
                            Cell::Int(i) => i.to_string(),
                            Cell::Text(t) => t.clone(),
                        })
                        .collect();
                    s.push_str(&cells.join(","));
                    s.push('\n');
                }
                s
            }
            Format::Json => {
                let records: Vec<Value> = self
                    .rows
                    .iter()
                    .map(|row| {
                        let mut m = Map::new();
                        for (h, c) in self.headers.iter().zip(row) {
                            let v = match c {
                                Cell::Num(x) => Number::from_f64(*x)
                                    .map(Value::Number)
                                    .unwrap_or_else(|| Value::String(fmt_num(*x))),
                                Cell::Int(i) => Value::from(*i),
                                Cell::Text(t) => Value::String(t.clone()),
                            };
                            m.insert((*h).to_string(), v);
                        }
                        Value::Object(m)
                    })
                    .collect();
                let mut s = serde_json::to_string_pretty(&Value::Array(records)).expect("json of plain values");
                s.push('\n');
                s
            }
        }
    }
}

const SHIFT_HEADERS: [&str; 8] = ["zeta", "theta", "state", "tf", "rr", "total", "err", "regime"];

fn shift_rows(
    table: &mut Table,
    atom: &AtomSpec,
    points: &[ReducedPoint],
    states: &[StateLabel],
    cfg: &KernelConfig,
    scale: f64,
) -> Result<()> {
    let results: Vec<Result<_>> = points
        .par_iter()
        .map(|&p| Ok((p, shift_states(states, atom, p, cfg)?, classify(p, DEFAULT_THRESHOLD)?)))
        .collect();
    for r in results {
        let (p, shifts, regime) = r?;
        for b in shifts {
            table.rows.push(vec![
                Cell::Num(p.zeta),
                Cell::Num(p.theta),
                Cell::Text(b.state.as_str().into()),
                Cell::Num(b.tf * scale),
                Cell::Num(b.rr * scale),
                Cell::Num(b.tf * scale + b.rr * scale),
                Cell::Num(b.error_estimate() * scale),
                Cell::Text(regime.to_string()),
            ]);
        }
    }
    Ok(())
}

fn si_scale(units: UnitsArg, unit: impl Fn() -> f64, err: &mut dyn Write) -> f64 {
    match units {
        UnitsArg::Reduced => 1.0,
        UnitsArg::Si => {
            let _ = writeln!(err, "{SI_CAVEAT}");
            unit()
        }
    }
}

fn cmd_shift(a: &ShiftArgs, err: &mut dyn Write) -> Result<Table> {
    let need = physical_input(&a.temperature, a.distance.z) || a.output.units == UnitsArg::Si;
    let atom = build_atom(&a.atom, need)?;
    let p = point_of(&atom, &a.temperature, &a.distance)?;
    let cfg = a.numeric.config();
    let scale = si_scale(a.output.units, || energy_unit(&atom), err);
    let mut t = Table::new(&SHIFT_HEADERS);
    shift_rows(&mut t, &atom, &[p], &a.state.states(), &cfg, scale)?;
    Ok(t)
}

fn grid(lo: f64, hi: f64, count: usize, spacing: Spacing) -> Result<Vec<f64>> {
    if count == 0 {
        return Err(Error::invalid("--count must be at least 1"));
    }
    if !(lo.is_finite() && hi.is_finite() && lo > 0.0 && hi >= lo) {
        return Err(Error::invalid(format!("bad distance range [{lo}, {hi}]")));
    }
    if count == 1 {
        return Ok(vec![lo]);
    }
    let n = (count - 1) as f64;
    Ok((0..count)
        .map(|i| {
            if i == 0 {
                return lo;
            }
            if i == count - 1 {
                return hi;
            }
            let s = i as f64 / n;
            match spacing {
                Spacing::Linear => lo + (hi - lo) * s,
                Spacing::Log => (lo.ln() + (hi.ln() - lo.ln()) * s).exp(),
            }
        })
        .collect())
}

fn cmd_sweep(a: &SweepArgs, err: &mut dyn Write) -> Result<Table> {
    let physical = a.temperature.temp.is_some() || a.z_min.is_some();
    let need = physical || a.output.units == UnitsArg::Si;
    let atom = build_atom(&a.atom, need)?;
    let theta = theta_of(&atom, &a.temperature)?;
    let (lo, hi) = match (a.z_min, a.z_max, a.zeta_min, a.zeta_max) {
        (Some(lo), Some(hi), None, None) => (zeta_of(&atom, Some(lo), None)?, zeta_of(&atom, Some(hi), None)?),
        (None, None, Some(lo), Some(hi)) => (lo, hi),
        _ => return Err(Error::invalid("distance range missing: give --z-min/--z-max or --zeta-min/--zeta-max")),
    };
    let points = grid(lo, hi, a.count, a.spacing)?
        .into_iter()
        .map(|z| ReducedPoint::new(z, theta))
        .collect::<Result<Vec<_>>>()?;
    let cfg = a.numeric.config();
    let scale = si_scale(a.output.units, || energy_unit(&atom), err);
    let mut t = Table::new(&SHIFT_HEADERS);
    shift_rows(&mut t, &atom, &points, &a.state.states(), &cfg, scale)?;
    Ok(t)
}

fn cmd_classify(a: &ClassifyArgs) -> Result<Table> {
    let atom = bare_atom(a.omega0, physical_input(&a.temperature, a.distance.z))?;
    let p = point_of(&atom, &a.temperature, &a.distance)?;
    let tag = classify(p, a.threshold)?;
    let mut t = Table::new(&["zeta", "theta", "temperature", "distance", "regime", "threshold"]);
    t.rows.push(vec![
        Cell::Num(p.zeta),
        Cell::Num(p.theta),
        Cell::Text(tag.temperature.as_str().into()),
        Cell::Text(tag.distance.as_str().into()),
        Cell::Text(tag.to_string()),
        Cell::Num(tag.threshold),
    ]);
    Ok(t)
}

fn cmd_kernels(a: &KernelArgs) -> Result<Table> {
    let atom = bare_atom(a.omega0, physical_input(&a.temperature, a.distance.z))?;
    let p = point_of(&atom, &a.temperature, &a.distance)?;
    let cfg = a.numeric.config();
    let mut t = Table::new(&[
        "zeta",
        "theta",
        "axis",
        "f_hat",
        "df_dzeta",
        "g_hat",
        "g_err",
        "dg_dzeta",
        "dg_err",
        "route",
        "max_index",
        "evaluations",
    ]);
    for axis in [Axis::Parallel, Axis::Perpendicular] {
        let k = kernel_value(axis, p, &cfg)?;
        t.rows.push(vec![
            Cell::Num(p.zeta),
            Cell::Num(p.theta),
            Cell::Text(axis.as_str().into()),
            Cell::Num(k.f_hat),
            Cell::Num(k.df_dzeta),
            Cell::Num(k.g_hat),
            Cell::Num(k.g_error),
            Cell::Num(k.dg_dzeta),
            Cell::Num(k.dg_error),
            Cell::Text(k.route.to_string()),
            Cell::Int(k.max_index),
            Cell::Int(k.evaluations as u64),
        ]);
    }
    Ok(t)
}

fn cmd_force(a: &ForcePointArgs, err: &mut dyn Write) -> Result<Table> {
    let need = physical_input(&a.temperature, a.distance.z) || a.output.units == UnitsArg::Si;
    let atom = build_atom(&a.atom, need)?;
    let p = point_of(&atom, &a.temperature, &a.distance)?;
    let cfg = a.numeric.config();
    let scale = si_scale(a.output.units, || force_unit(&atom), err);
    let regime = classify(p, DEFAULT_THRESHOLD)?;
    let mut t = Table::new(&["zeta", "theta", "state", "force", "err", "direction", "regime"]);
    for s in a.state.states() {
        let f = force(s, &atom, p, &cfg)?;
        t.rows.push(vec![
            Cell::Num(p.zeta),
            Cell::Num(p.theta),
            Cell::Text(s.as_str().into()),
            Cell::Num(f.value * scale),
            Cell::Num(f.error_estimate * scale),
            Cell::Text(f.direction.as_str().into()),
            Cell::Text(regime.to_string()),
        ]);
    }
    Ok(t)
}

fn cmd_zeros(a: &ZerosArgs) -> Result<Table> {
    let atom = build_atom(&a.atom, a.temperature.temp.is_some())?;
    let theta = theta_of(&atom, &a.temperature)?;
    let cfg = a.numeric.config();
    let mut t = Table::new(&["zeta", "theta", "state", "stability"]);
    for s in a.state.states() {
        for z in find_force_zeros(s, &atom, theta, (a.zeta_min, a.zeta_max), a.root_tol, &cfg)? {
            let label = match z.stability {
                crate::force::Stability::Stable => "stable",
                crate::force::Stability::Unstable => "unstable",
            };
            t.rows.push(vec![
                Cell::Num(z.zeta),
                Cell::Num(theta),
                Cell::Text(s.as_str().into()),
                Cell::Text(label.into()),
            ]);
        }
    }
    Ok(t)
}

/// Flags that exclude one another; a config value is dropped when the
/// command line sets any flag of its group.
const FLAG_GROUPS: [&[&str]; 4] = [
    &["z", "zeta", "z-min", "z-max", "zeta-min", "zeta-max"],
    &["temp", "theta"],
    &["isotropic", "alpha"],
    &["config"],
];

fn flag_name(arg: &str) -> Option<&str> {
    arg.strip_prefix("--").map(|s| s.split('=').next().unwrap_or(s))
}

/// Config file lines as flags, minus anything the command line overrides.
fn config_flags(text: &str, cli_flags: &HashSet<String>) -> Result<Vec<String>> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| Error::invalid(format!("config line {}: expected key = value", i + 1)))?;
        let key = k.trim().replace('_', "-");
        let value = v.trim();
        if key.is_empty() {
            return Err(Error::invalid(format!("config line {}: empty key", i + 1)));
        }
        let group: &[&str] = FLAG_GROUPS
            .iter()
            .copied()
            .find(|g| g.contains(&key.as_str()))
            .unwrap_or(&[]);
        let overridden = cli_flags.contains(&key) || group.iter().any(|g| cli_flags.contains(*g));
        if overridden {
            continue;
        }
        out.push(format!("--{key}={value}"));
    }
    Ok(out)
}

/// Merge `--config` contents into the argument list just after the
/// subcommand path, so that later command-line flags override them.
fn expand_config(args: Vec<String>) -> Result<Vec<String>> {
    let mut path = None;
    let mut rest = Vec::with_capacity(args.len());
    let mut it = args.into_iter();
    if let Some(bin) = it.next() {
        rest.push(bin);
    }
    while let Some(a) = it.next() {
        if a == "--config" {
            path = Some(it.next().ok_or_else(|| Error::invalid("--config needs a file"))?);
        } else if let Some(p) = a.strip_prefix("--config=") {
            path = Some(p.to_string());
        } else {
            rest.push(a);
        }
    }
    let Some(path) = path else { return Ok(rest) };
    let text = fs::read_to_string(&path).map_err(|e| Error::invalid(format!("cannot read config {path}: {e}")))?;
    let cli_flags: HashSet<String> = rest.iter().filter_map(|a| flag_name(a)).map(str::to_string).collect();
    let extra = config_flags(&text, &cli_flags)?;

    // insertion point: after the command (and `zeros` for `force zeros`)
    let mut at = rest.iter().skip(1).position(|a| !a.starts_with('-')).map_or(rest.len(), |i| i + 2);
    if rest.get(at - 1).map(String::as_str) == Some("force") && rest.get(at).map(String::as_str) == Some("zeros") {
        at += 1;
    }
    let at = at.min(rest.len());
    rest.splice(at..at, extra);
    Ok(rest)
}

fn exit_code(e: &Error) -> i32 {
    match e {
        Error::InvalidInput(_) => 2,
        Error::NonConvergence { .. } => 3,
    }
}

/// Run with explicit arguments and streams; returns the exit code.
pub fn run_with(args: Vec<String>, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let args = match expand_config(args) {
        Ok(a) => a,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            return exit_code(&e);
        }
    };
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            let text = e.render().to_string();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(out, "{text}");
                    0
                }
                _ => {
                    let _ = write!(err, "{text}");
                    2
                }
            };
        }
    };

    let (result, format, output) = match &cli.command {
        Command::Shift(a) => (cmd_shift(a, err), a.output.format, a.output.output.clone()),
        Command::Sweep(a) => (cmd_sweep(a, err), a.output.format, a.output.output.clone()),
        Command::Classify(a) => (cmd_classify(a), a.format, a.output.clone()),
        Command::Kernels(a) => (cmd_kernels(a), a.format, a.output.clone()),
        Command::Force(ForceArgs {
            zeros: Some(ForceSub::Zeros(z)),
            ..
        }) => (cmd_zeros(z), z.format, z.output.clone()),
        Command::Force(ForceArgs { point: p, .. }) => (cmd_force(p, err), p.output.format, p.output.output.clone()),
    };

    let text = match result.and_then(|t| t.check_finite().map(|_| t)) {
        Ok(t) => t.render(format),
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            return exit_code(&e);
        }
    };
    let written = match output {
        Some(path) => fs::write(&path, text).map_err(|e| format!("cannot write {}: {e}", path.display())),
        None => out.write_all(text.as_bytes()).map_err(|e| e.to_string()),
    };
    match written {
        Ok(()) => 0,
        Err(msg) => {
            let _ = writeln!(err, "error: {msg}");
            2
        }
    }
}

/// Entry point of the binary.
pub fn main_entry() -> i32 {
    let stdout = io::stdout();
    let stderr = io::stderr();
    run_with(std::env::args().collect(), &mut stdout.lock(), &mut stderr.lock())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run(args: &[&str]) -> (i32, String, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let mut v = vec!["atomwall".to_string()];
        v.extend(args.iter().map(|s| s.to_string()));
        let code = run_with(v, &mut out, &mut err);
        (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
    }

    #[test]
    fn grid_endpoints_are_exact() {
        let g = grid(0.1, 7.3, 5, Spacing::Log).unwrap();
        assert_eq!(g[0], 0.1);
        assert_eq!(g[4], 7.3);
        assert_eq!(grid(2.0, 2.0, 1, Spacing::Linear).unwrap(), vec![2.0]);
        assert!(grid(0.0, 1.0, 3, Spacing::Log).is_err());
        assert!(grid(1.0, 2.0, 0, Spacing::Linear).is_err());
    }

    #[test]
    fn config_lines_respect_overrides() {
        let cli: HashSet<String> = ["zeta".to_string(), "tol".to_string()].into_iter().collect();
        let f = config_flags("# comment\nz = 1e-9\ntol=1e-8\nisotropic = 1\n\nstate = ground\n", &cli).unwrap();
        assert_eq!(f, vec!["--isotropic=1", "--state=ground"]);
        assert!(config_flags("nonsense", &HashSet::new()).is_err());
    }

    #[test]
    fn number_format_has_17_digits() {
        assert_eq!(fmt_num(-4.0 / 3.0), "-1.3333333333333333e0");
        assert_eq!(fmt_num(f64::INFINITY), "inf");
    }

    #[test]
    fn missing_alpha_names_the_flag() {
        let (code, _, err) = run(&["shift", "--zeta", "1", "--theta", "2"]);
        assert_eq!(code, 2);
        assert!(err.contains("--isotropic"));
    }

    #[test]
    fn help_exits_zero() {
        let (code, out, _) = run(&["--help"]);
        assert_eq!(code, 0);
        assert!(out.contains("sweep"));
    }
}

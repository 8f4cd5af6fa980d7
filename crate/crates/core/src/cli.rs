//! The `ciag` command line.
//!
//! Exit codes: 0 success, 1 usage or I/O error, 2 invalid parameters (or no
//! equilibrium for them), 3 a verification check failed.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::equilibrium::solve_pbe;
use crate::montecarlo::{run_simulation, SimulationError};
use crate::oracle::DEFAULT_GRID_N;
use crate::report;
use crate::scenario::{self, Scenario, ScenarioError, SweepSpec};
use crate::sweep::{linspace, sweep, SweepAxis};
use crate::verify::{verify, VerifyError};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_INVALID: i32 = 2;
pub const EXIT_VERIFY_FAILED: i32 = 3;

/// Points in an `a..b` range when no count is given.
pub const DEFAULT_RANGE_POINTS: usize = 20;

#[derive(Parser, Debug)]
#[command(
    name = "ciag",
    version,
    about = "Cyber insurance audit game: equilibria and Monte Carlo"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Classify the equilibrium and print strategies and beliefs.
    Solve(Options),
    /// Simulate the policyholder's equilibrium play against each audit model.
    Simulate(Options),
    /// Re-solve and re-simulate along one parameter axis.
    Sweep(Options),
    /// Check the equilibrium against the deviation and indifference oracles.
    Verify(Options),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Human,
}

#[derive(Args, Debug, Clone, Default)]
pub struct Options {
    /// Scenario file (`key: value` lines), layered over --preset if both are given.
    #[arg(long, value_name = "FILE")]
    pub scenario: Option<PathBuf>,
    /// Built-in scenario; `paper-default` is used when no --scenario is given.
    #[arg(long, value_name = "NAME")]
    pub preset: Option<String>,
    /// Override one scenario key; repeatable.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    pub set: Vec<String>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long, value_name = "N")]
    pub reps: Option<u64>,
    /// audit-cost, discount, discount-pct, loss, repetitions or prior.
    #[arg(long, value_name = "NAME")]
    pub axis: Option<String>,
    /// `a..b` (20 points), `a..b:n`, or a comma-separated list.
    #[arg(long, value_name = "LIST", allow_hyphen_values = true)]
    pub values: Option<String>,
    /// Write results here instead of stdout. Sweeps also write
    /// `<stem>_gt_advantage.csv` next to it.
    #[arg(long, value_name = "PATH")]
    pub out: Option<PathBuf>,
    /// Defaults to csv when --out is given, human otherwise.
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// Grid resolution for deviation searches (verify only).
    #[arg(long, value_name = "N", default_value_t = DEFAULT_GRID_N)]
    pub grid: usize,
}

/// Parses `a..b`, `a..b:n` or `x,y,z`.
pub fn parse_values(s: &str) -> Result<Vec<f64>, String> {
    let num = |t: &str| {
        t.trim()
            .replace('_', "")
            .parse::<f64>()
            .ok()
            .filter(|v| v.is_finite())
            .ok_or_else(|| format!("`{}` is not a number", t.trim()))
    };
    if let Some((lo, rest)) = s.split_once("..") {
        let (hi, n) = match rest.split_once(':') {
            Some((hi, n)) => (
                hi,
                n.trim()
                    .parse::<usize>()
                    .map_err(|_| format!("`{}` is not a point count", n.trim()))?,
            ),
            None => (rest, DEFAULT_RANGE_POINTS),
        };
        if n == 0 {
            return Err("a range needs at least one point".into());
        }
        return Ok(linspace(num(lo)?, num(hi)?, n));
    }
    let values = s.split(',').map(num).collect::<Result<Vec<_>, _>>()?;
    if values.is_empty() {
        return Err("no values given".into());
    }
    Ok(values)
}

enum Failure {
    Usage(String),
    Invalid(String),
}

impl From<ScenarioError> for Failure {
    fn from(e: ScenarioError) -> Self {
        match e {
            ScenarioError::Parse { .. } => Failure::Usage(e.to_string()),
            ScenarioError::Validation { .. } => Failure::Invalid(e.to_string()),
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Usage(e.to_string())
    }
}

impl From<report::ReportError> for Failure {
    fn from(e: report::ReportError) -> Self {
        Failure::Usage(e.to_string())
    }
}

impl From<SimulationError> for Failure {
    fn from(e: SimulationError) -> Self {
        Failure::Invalid(e.to_string())
    }
}

/// Builds the scenario from the preset, file, `--set` and shortcut flags.
pub fn load_scenario(opts: &Options) -> Result<Scenario, ScenarioError> {
    let usage = |msg: String| ScenarioError::Parse {
        line: 0,
        key: None,
        message: msg,
    };
    let mut layers: Vec<String> = Vec::new();
    match (&opts.preset, &opts.scenario) {
        (Some(name), _) => layers.push(
            scenario::preset(name)
                .ok_or_else(|| {
                    usage(format!(
                        "unknown preset `{name}` (available: paper-default)"
                    ))
                })?
                .to_string(),
        ),
        (None, None) => layers.push(scenario::CALIBRATED.to_string()),
        (None, Some(_)) => {}
    }
    if let Some(path) = &opts.scenario {
        layers.push(
            fs::read_to_string(path)
                .map_err(|e| usage(format!("cannot read {}: {e}", path.display())))?,
        );
    }
    let mut overrides = String::new();
    for kv in &opts.set {
        let (k, v) = kv
            .split_once('=')
            .ok_or_else(|| usage(format!("--set expects KEY=VALUE, got `{kv}`")))?;
        overrides.push_str(&format!("{}: {}\n", k.trim(), v.trim()));
    }
    if let Some(seed) = opts.seed {
        overrides.push_str(&format!("seed: {seed}\n"));
    }
    if let Some(reps) = opts.reps {
        overrides.push_str(&format!("repetitions: {reps}\n"));
    }
    layers.push(overrides);

    let refs: Vec<&str> = layers.iter().map(String::as_str).collect();
    let mut sc = scenario::parse_layers(&refs)?;
    sc.output = opts.out.clone();
    Ok(sc)
}

/// Resolves --axis/--values. Returns the axis, the values it is swept over
/// in the simulator's units, and the values to report.
fn sweep_values(
    opts: &Options,
    sc: &Scenario,
) -> Result<(SweepAxis, String, Vec<f64>, Vec<f64>), Failure> {
    let axis_name = opts
        .axis
        .as_deref()
        .ok_or_else(|| Failure::Usage("sweep needs --axis".into()))?;
    let raw = opts
        .values
        .as_deref()
        .ok_or_else(|| Failure::Usage("sweep needs --values".into()))?;
    let shown = parse_values(raw).map_err(|e| Failure::Usage(format!("--values: {e}")))?;
    let normalized = axis_name.trim().to_ascii_lowercase().replace('_', "-");
    if normalized == "discount-pct" {
        let dollars = shown
            .iter()
            .map(|&pct| sc.params.premium.percent(pct).as_f64())
            .collect();
        return Ok((SweepAxis::Discount, "discount-pct".into(), dollars, shown));
    }
    let axis = axis_name
        .parse::<SweepAxis>()
        .map_err(|e| Failure::Usage(e.to_string()))?;
    Ok((axis, axis.name().into(), shown.clone(), shown))
}

fn emit(out: &mut dyn Write, path: Option<&Path>, text: &[u8]) -> Result<(), Failure> {
    match path {
        Some(p) => fs::write(p, text)?,
        None => out.write_all(text)?,
    }
    Ok(())
}

fn companion_path(path: &Path) -> PathBuf {
    let stem = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "sweep".into());
    path.with_file_name(format!("{stem}_gt_advantage.csv"))
}

fn execute(cmd: &Command, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32, Failure> {
    let opts = match cmd {
        Command::Solve(o) | Command::Simulate(o) | Command::Sweep(o) | Command::Verify(o) => o,
    };
    let mut sc = load_scenario(opts)?;
    let format = opts.format.unwrap_or(if opts.out.is_some() {
        Format::Csv
    } else {
        Format::Human
    });
    let path = sc.output.clone();

    match cmd {
        Command::Solve(_) => {
            let sol =
                solve_pbe(&sc.params, &sc.utility).map_err(|e| Failure::Invalid(e.to_string()))?;
            let mut buf = Vec::new();
            match format {
                Format::Csv => report::write_solution_csv(&mut buf, &sol)?,
                Format::Human => buf.extend_from_slice(sol.to_string().as_bytes()),
            }
            emit(out, path.as_deref(), &buf)?;
        }
        Command::Simulate(_) => {
            let summary = run_simulation(&sc.simulation_config())?;
            let mut buf = Vec::new();
            match format {
                Format::Csv => report::write_simulation_csv(&mut buf, &summary)?,
                Format::Human => {
                    buf.extend_from_slice(report::render_simulation(&summary).as_bytes())
                }
            }
            emit(out, path.as_deref(), &buf)?;
        }
        Command::Sweep(_) => {
            let (axis, label, values, shown) = sweep_values(opts, &sc)?;
            sc.sweep = Some(SweepSpec {
                axis,
                values: values.clone(),
            });
            let mut table = sweep(&sc.simulation_config(), axis, &values)
                .map_err(|e| Failure::Usage(e.to_string()))?;
            table.axis_label = label;
            for (pt, v) in table.points.iter_mut().zip(shown) {
                pt.axis_value = v;
            }
            for pt in &table.points {
                if let Err(e) = &pt.result {
                    writeln!(
                        err,
                        "warning: {} = {}: {e}",
                        table.axis_label, pt.axis_value
                    )?;
                }
            }
            let mut buf = Vec::new();
            match format {
                Format::Csv => report::write_sweep_csv(&mut buf, &table)?,
                Format::Human => buf.extend_from_slice(report::render_sweep(&table).as_bytes()),
            }
            emit(out, path.as_deref(), &buf)?;
            if let (Some(p), Format::Csv) = (&path, format) {
                let mut adv = Vec::new();
                report::write_gt_advantage_csv(&mut adv, &table.gt_advantage())?;
                fs::write(companion_path(p), adv)?;
            }
        }
        Command::Verify(_) => {
            let v = verify(&sc.params, &sc.utility, opts.grid).map_err(|e| match e {
                VerifyError::Oracle(o) => Failure::Usage(o.to_string()),
                other => Failure::Invalid(other.to_string()),
            })?;
            let mut text = format!("{}", v.solution);
            for c in &v.checks {
                text.push_str(&format!("{c}\n"));
            }
            emit(out, path.as_deref(), text.as_bytes())?;
            if !v.passed() {
                return Ok(EXIT_VERIFY_FAILED);
            }
        }
    }
    Ok(EXIT_OK)
}

/// Runs the command line `args` (program name first) and returns the exit
/// code.
pub fn run_command<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let text = e.render().to_string();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = out.write_all(text.as_bytes());
                    EXIT_OK
                }
                _ => {
                    let _ = err.write_all(text.as_bytes());
                    EXIT_USAGE
                }
            };
        }
    };
    match execute(&cli.command, out, err) {
        Ok(code) => code,
        Err(Failure::Usage(msg)) => {
            let _ = writeln!(err, "error: {msg}");
            EXIT_USAGE
        }
        Err(Failure::Invalid(msg)) => {
            let _ = writeln!(err, "error: {msg}");
            EXIT_INVALID
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn value_lists() {
        assert_eq!(parse_values("1,2.5, 3").unwrap(), vec![1.0, 2.5, 3.0]);
        assert_eq!(parse_values("0..10:3").unwrap(), vec![0.0, 5.0, 10.0]);
        let v = parse_values("5000..100000").unwrap();
        assert_eq!(v.len(), DEFAULT_RANGE_POINTS);
        assert_eq!((v[0], v[19]), (5000.0, 100_000.0));
        assert_eq!(parse_values("-1,1").unwrap(), vec![-1.0, 1.0]);
        assert!(parse_values("1..2:0").is_err());
        assert!(parse_values("a,b").is_err());
    }

    #[test]
    fn companion_file_name() {
        assert_eq!(
            companion_path(Path::new("out/fig.csv")),
            PathBuf::from("out/fig_gt_advantage.csv")
        );
    }
}

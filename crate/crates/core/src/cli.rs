//! Batch front end: configuration, command dispatch and run manifests.
//!
//! A run is described by a [`RunConfig`], read from a TOML file and then
//! overridden by command-line flags. Each flag names exactly one config leaf
//! key (`--K` sets `family.K`, `--p-max` sets `solve.p_max`, and so on). Every
//! run emits a JSON manifest
//! `{version, command, config, results, diagnostics, wall_time_ms}` where
//! `config` is the fully resolved configuration. Identical configs produce
//! identical manifests apart from `wall_time_ms`.
//!
//! Exit codes: 0 success, 1 configuration error, 2 domain error,
//! 3 escalation exhaustion or quadrature non-convergence.

use std::ffi::OsString;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::asymptotics::{convergence_report, limit_params, predicted_limit_negative, predicted_limit_positive, scaled_trajectory, LimitMode};
use crate::coefficients::{ClosedForm, CoefficientFamily};
use crate::error::{Error, Result};
use crate::oracle::{freud_x1_closed_form_rho, x1_quadrature_rho};
use crate::precision::{check_precision, RealP};
use crate::recurrence::{residual, Trajectory};
use crate::shooting::{scan, solve, Outcome, Policy};
use crate::uniqueness::{verdict, Condition};

/// Environment variable consulted for the working precision when neither the
/// config nor the flags set `prec`.
pub const DEFAULT_PREC_ENV: &str = "DP1_DEFAULT_PREC";
pub const DEFAULT_PREC: u32 = 128;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "snake_case")]
#[value(rename_all = "snake_case")]
pub enum Command {
    Solve,
    Scan,
    Check,
    Asymptotics,
    Oracle,
    Residual,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Solve => "solve",
            Command::Scan => "scan",
            Command::Check => "check",
            Command::Asymptotics => "asymptotics",
            Command::Oracle => "oracle",
            Command::Residual => "residual",
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "snake_case")]
#[value(rename_all = "snake_case")]
pub enum FamilyName {
    #[default]
    Freud,
    Sqrtn,
    MiddleOnly,
    ConstantSigmas,
    ClosedForm,
    Table,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "snake_case")]
#[value(rename_all = "snake_case")]
pub enum ModeName {
    #[default]
    ClosedForm,
    Tail,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FamilyConfig {
    pub kind: FamilyName,
    pub c: String,
    #[serde(rename = "K")]
    pub k: String,
    pub rho: String,
    /// Side coefficient for `constant_sigmas`.
    pub side: Option<String>,
    /// Middle coefficient for `constant_sigmas`.
    pub mid: Option<String>,
    /// Coefficient table for `table`.
    pub coefficients: Option<PathBuf>,
    /// Formulas for `closed_form`.
    pub closed_form: Option<ClosedForm>,
}

impl Default for FamilyConfig {
    fn default() -> Self {
        FamilyConfig {
            kind: FamilyName::Freud,
            c: "1".into(),
            k: "0".into(),
            rho: "0".into(),
            side: None,
            mid: None,
            coefficients: None,
            closed_form: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SolveConfig {
    pub n0: usize,
    pub p_max: u32,
    pub max_escalations: u32,
}

impl Default for SolveConfig {
    fn default() -> Self {
        let p = Policy::default();
        SolveConfig {
            n0: p.initial_steps,
            p_max: p.max_precision,
            max_escalations: p.max_escalations,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScanConfig {
    pub grid: Option<Vec<String>>,
    pub from: Option<String>,
    pub to: Option<String>,
    pub count: Option<usize>,
    pub steps: usize,
    /// Worker pool size; all logical cores when unset.
    pub threads: Option<usize>,
}

impl Default for ScanConfig {
    fn default() -> Self {
        ScanConfig {
            grid: None,
            from: None,
            to: None,
            count: None,
            steps: 32,
            threads: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CheckConfig {
    pub window: usize,
}

impl Default for CheckConfig {
    fn default() -> Self {
        CheckConfig { window: 1000 }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AsymptoticsConfig {
    pub mode: ModeName,
    pub n1: Option<usize>,
    pub n2: Option<usize>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ResidualConfig {
    /// Trajectory CSV with columns `n,x_n[,t_n]`.
    pub table: Option<PathBuf>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputConfig {
    /// Manifest path; standard output when unset.
    pub manifest: Option<PathBuf>,
    pub csv: Option<PathBuf>,
}

/// Full description of a run. Real-valued inputs are decimal strings so the
/// config round-trips exactly.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub x0: String,
    /// Working precision `P₀` in bits.
    pub prec: Option<u32>,
    pub tol: String,
    pub family: FamilyConfig,
    pub solve: SolveConfig,
    pub scan: ScanConfig,
    pub check: CheckConfig,
    pub asymptotics: AsymptoticsConfig,
    pub residual: ResidualConfig,
    pub output: OutputConfig,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            x0: "0".into(),
            prec: None,
            tol: "1e-10".into(),
            family: FamilyConfig::default(),
            solve: SolveConfig::default(),
            scan: ScanConfig::default(),
            check: CheckConfig::default(),
            asymptotics: AsymptoticsConfig::default(),
            residual: ResidualConfig::default(),
            output: OutputConfig::default(),
        }
    }
}

impl RunConfig {
    pub fn from_toml_str(s: &str) -> Result<Self> {
        toml::from_str(s).map_err(|e| Error::ConfigInvalid(e.to_string()))
    }

    pub fn from_path(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::ConfigInvalid(format!("{}: {e}", path.display())))?;
        Self::from_toml_str(&text)
    }

    pub fn to_toml_string(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::ConfigInvalid(e.to_string()))
    }

    /// Fills `prec` from the environment or the built-in default.
    pub fn resolve(mut self) -> Result<Self> {
        if self.prec.is_none() {
            let prec = match std::env::var(DEFAULT_PREC_ENV) {
                Ok(v) => v
                    .trim()
                    .parse::<u32>()
                    .map_err(|_| Error::ConfigInvalid(format!("{DEFAULT_PREC_ENV}={v:?} is not a bit count")))?,
                Err(_) => DEFAULT_PREC,
            };
            self.prec = Some(prec);
        }
        check_precision(self.precision())?;
        Ok(self)
    }

    pub fn precision(&self) -> u32 {
        self.prec.unwrap_or(DEFAULT_PREC)
    }

    pub fn tolerance(&self) -> Result<f64> {
        match self.tol.trim().parse::<f64>() {
            Ok(t) if t > 0.0 && t.is_finite() => Ok(t),
            _ => Err(Error::ConfigInvalid(format!("tol = {:?} is not a positive number", self.tol))),
        }
    }

    pub fn x0_value(&self) -> Result<RealP> {
        RealP::parse(&self.x0, self.precision())
    }

    pub fn policy(&self) -> Policy {
        Policy {
            initial_steps: self.solve.n0,
            initial_precision: self.precision(),
            max_precision: self.solve.p_max,
            max_escalations: self.solve.max_escalations,
        }
    }

    pub fn build_family(&self) -> Result<CoefficientFamily> {
        let f = &self.family;
        let missing = |what: &str| Error::ConfigInvalid(format!("family kind {:?} needs {what}", f.kind));
        match f.kind {
            FamilyName::Freud => CoefficientFamily::freud(&f.c, &f.k, &f.rho),
            FamilyName::Sqrtn => Ok(CoefficientFamily::sqrt_n_example()),
            FamilyName::MiddleOnly => Ok(CoefficientFamily::middle_only_example()),
            FamilyName::ConstantSigmas => CoefficientFamily::constant_sigmas(
                f.side.as_deref().ok_or_else(|| missing("side"))?,
                f.mid.as_deref().ok_or_else(|| missing("mid"))?,
            ),
            FamilyName::ClosedForm => {
                CoefficientFamily::closed_form(f.closed_form.clone().ok_or_else(|| missing("closed_form"))?)
            }
            FamilyName::Table => {
                CoefficientFamily::from_csv_path(f.coefficients.as_ref().ok_or_else(|| missing("coefficients"))?)
            }
        }
    }

    fn grid(&self) -> Result<Vec<RealP>> {
        let prec = self.precision();
        let s = &self.scan;
        if let Some(points) = &s.grid {
            return points.iter().map(|p| RealP::parse(p.trim(), prec)).collect();
        }
        match (&s.from, &s.to, s.count) {
            (Some(from), Some(to), Some(count)) if count >= 2 => {
                let from = RealP::parse(from, prec)?;
                let to = RealP::parse(to, prec)?;
                let step = (&to - &from) / RealP::from_int(count as i64 - 1, prec);
                Ok((0..count).map(|i| &from + &(&step * &RealP::from_int(i as i64, prec))).collect())
            }
            _ => Err(Error::ConfigInvalid(
                "scan needs scan.grid or scan.from, scan.to and scan.count >= 2".into(),
            )),
        }
    }
}

/// Results of a dispatched command, before it is wrapped in a manifest.
#[derive(Clone, Debug)]
pub struct RunOutput {
    pub results: Value,
    pub diagnostics: Value,
    pub csv: Option<Vec<u8>>,
}

#[derive(Serialize)]
pub struct Manifest<'a> {
    pub version: &'static str,
    pub command: &'static str,
    pub config: &'a RunConfig,
    pub results: Value,
    pub diagnostics: Value,
    pub wall_time_ms: u64,
}

fn csv_bytes(write: impl FnOnce(&mut Vec<u8>) -> Result<()>) -> Result<Option<Vec<u8>>> {
    let mut buf = Vec::new();
    write(&mut buf)?;
    Ok(Some(buf))
}

/// Dispatches one command. `config` must already be resolved.
pub fn run(command: Command, config: &RunConfig) -> Result<RunOutput> {
    let prec = config.precision();
    let x0 = config.x0_value()?;
    match command {
        Command::Solve => {
            let family = config.build_family()?;
            let tol = config.tolerance()?;
            let sol = solve(&family, &x0, tol, &config.policy())?;
            let csv = csv_bytes(|buf| {
                let mut w = csv::Writer::from_writer(buf);
                w.write_record(["t", "outcome", "first_index", "precision_bits", "steps", "lo", "hi"])?;
                for e in &sol.trace {
                    w.write_record([
                        e.t.to_decimal(),
                        e.outcome.label().into(),
                        e.outcome.index().to_string(),
                        e.precision_bits.to_string(),
                        e.steps.to_string(),
                        e.lo.to_decimal(),
                        e.hi.to_decimal(),
                    ])?;
                }
                w.flush()?;
                Ok(())
            })?;
            Ok(RunOutput {
                results: json!({
                    "family": family.id(),
                    "x0": x0,
                    "tol": config.tol,
                    "x1_star": sol.x1_star,
                    "lo": sol.bracket.lo,
                    "hi": sol.bracket.hi,
                    "N_used": sol.steps_used,
                    "P_used": sol.precision_used,
                    "classifications_count": sol.classifications,
                    "lo_index": sol.bracket.lo_index,
                    "hi_index": sol.bracket.hi_index,
                    "depth_n": sol.bracket.depth_n,
                    "certified_depth": sol.bracket.certified_depth,
                }),
                diagnostics: json!({
                    "escalations": sol.escalations,
                    "inconsistencies": sol.inconsistencies,
                    "bisection_steps": sol.trace.len(),
                }),
                csv,
            })
        }
        Command::Scan => {
            let family = config.build_family()?;
            let grid = config.grid()?;
            let res = scan(&family, &x0, &grid, config.scan.steps, prec, config.scan.threads)?;
            let points: Vec<Value> = res
                .points
                .iter()
                .map(|p| match &p.classification {
                    Ok(c) => json!({
                        "t": p.t,
                        "outcome": c.outcome.label(),
                        "first_index": match c.outcome { Outcome::Survived(_) => None, o => Some(o.index()) },
                        "reliable": c.reliable,
                    }),
                    Err(e) => json!({ "t": p.t, "outcome": "error", "error": e }),
                })
                .collect();
            let errors = res.points.iter().filter(|p| p.classification.is_err()).count();
            let unreliable = res
                .points
                .iter()
                .filter(|p| matches!(&p.classification, Ok(c) if !c.reliable))
                .count();
            Ok(RunOutput {
                results: json!({
                    "family": family.id(),
                    "steps": config.scan.steps,
                    "alpha": res.alpha,
                    "beta": res.beta,
                    "points": points,
                }),
                diagnostics: json!({ "point_errors": errors, "unreliable_points": unreliable }),
                csv: csv_bytes(|buf| res.write_csv(buf))?,
            })
        }
        Command::Check => {
            let family = config.build_family()?;
            let report = verdict(&family, &x0, config.check.window)?;
            Ok(RunOutput {
                results: json!({ "family": family.id(), "report": report }),
                diagnostics: json!({
                    "star": report.count(Condition::Star),
                    "dagger": report.count(Condition::Dagger),
                    "neither": report.count(Condition::Neither),
                }),
                csv: csv_bytes(|buf| report.write_csv(buf))?,
            })
        }
        Command::Asymptotics => {
            let family = config.build_family()?;
            let mode = match config.asymptotics.mode {
                ModeName::ClosedForm => LimitMode::ClosedForm,
                ModeName::Tail => match (config.asymptotics.n1, config.asymptotics.n2) {
                    (Some(n1), Some(n2)) => LimitMode::TailEstimate { n1, n2 },
                    _ => return Err(Error::ConfigInvalid("tail mode needs asymptotics.n1 and asymptotics.n2".into())),
                },
            };
            let params = limit_params(&family, &mode, prec)?;
            let tol = config.tolerance()?;
            let sol = solve(&family, &x0, tol, &config.policy())?;
            let traj = sol.trajectory(&family, &x0)?;
            let depth = Some(sol.bracket.certified_depth);
            let report = convergence_report(&traj, &family, &params, depth)?;
            let scaled = scaled_trajectory(&traj, &family)?;
            Ok(RunOutput {
                results: json!({
                    "family": family.id(),
                    "params": params,
                    "predicted_positive": predicted_limit_positive(&params),
                    "predicted_negative": predicted_limit_negative(&params),
                    "gap_at_tail": report.abs_gap,
                    "convergence": report,
                }),
                diagnostics: json!({ "x1_star": sol.x1_star, "certified_depth": depth }),
                csv: csv_bytes(|buf| scaled.write_csv(buf))?,
            })
        }
        Command::Oracle => {
            let f = &config.family;
            let c = RealP::parse(&f.c, prec)?;
            let k = RealP::parse(&f.k, prec)?;
            let rho = RealP::parse(&f.rho, prec)?;
            let tol = config.tolerance()?;
            let quad = x1_quadrature_rho(&c, &k, &rho, tol, prec)?;
            let closed = if k.is_zero() {
                Some(freud_x1_closed_form_rho(&c, &rho, prec)?)
            } else {
                None
            };
            Ok(RunOutput {
                results: json!({
                    "c": f.c,
                    "K": f.k,
                    "rho": f.rho,
                    "value": quad.value,
                    "est_error": quad.est_error,
                    "closed_form": closed,
                }),
                diagnostics: json!({ "cutoff_r": quad.cutoff_r, "levels_used": quad.levels_used }),
                csv: None,
            })
        }
        Command::Residual => {
            let family = config.build_family()?;
            let path = config
                .residual
                .table
                .as_ref()
                .ok_or_else(|| Error::ConfigInvalid("residual needs residual.table".into()))?;
            let file = std::fs::File::open(path)?;
            let traj = Trajectory::from_csv_reader(file, prec, family.id())?;
            let r = residual(&traj, &family)?;
            Ok(RunOutput {
                results: json!({ "family": family.id(), "max_relative_residual": r, "terms": traj.len() }),
                diagnostics: json!({ "precision_bits": prec }),
                csv: None,
            })
        }
    }
}

/// Serializes a manifest; `pretty` output ends with a newline.
pub fn manifest_json(command: Command, config: &RunConfig, out: &RunOutput, wall_time_ms: u64) -> String {
    let m = Manifest {
        version: env!("CARGO_PKG_VERSION"),
        command: command.name(),
        config,
        results: out.results.clone(),
        diagnostics: out.diagnostics.clone(),
        wall_time_ms,
    };
    let mut s = serde_json::to_string_pretty(&m).expect("serializable");
    s.push('\n');
    s
}

#[derive(Parser, Debug)]
#[command(name = "dp1", version, about = "Positive solutions of discrete Painleve I type recurrences")]
pub struct Cli {
    #[command(subcommand)]
    pub command: CliCommand,
}

#[derive(Subcommand, Debug)]
pub enum CliCommand {
    /// Bisect for the positive-solution initial value.
    Solve(Flags),
    /// Classify a grid of initial values.
    Scan(Flags),
    /// Check the uniqueness conditions.
    Check(Flags),
    /// Predicted limit of x_n / sqrt(ell_n) against a solved trajectory.
    Asymptotics(Flags),
    /// Moment-ratio initial value by quadrature and closed form.
    Oracle(Flags),
    /// Maximum relative residual of a trajectory table.
    Residual(Flags),
}

impl CliCommand {
    fn split(self) -> (Command, Flags) {
        match self {
            CliCommand::Solve(f) => (Command::Solve, f),
            CliCommand::Scan(f) => (Command::Scan, f),
            CliCommand::Check(f) => (Command::Check, f),
            CliCommand::Asymptotics(f) => (Command::Asymptotics, f),
            CliCommand::Oracle(f) => (Command::Oracle, f),
            CliCommand::Residual(f) => (Command::Residual, f),
        }
    }
}

/// One flag per config leaf key.
#[derive(clap::Args, Debug, Default)]
pub struct Flags {
    /// TOML config file; flags override its values.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub x0: Option<String>,
    #[arg(long)]
    pub prec: Option<u32>,
    #[arg(long)]
    pub tol: Option<String>,
    #[arg(long)]
    pub family: Option<FamilyName>,
    #[arg(long)]
    pub c: Option<String>,
    #[arg(long = "K", allow_hyphen_values = true)]
    pub k: Option<String>,
    #[arg(long)]
    pub rho: Option<String>,
    #[arg(long)]
    pub side: Option<String>,
    #[arg(long)]
    pub mid: Option<String>,
    #[arg(long)]
    pub coefficients: Option<PathBuf>,
    #[arg(long)]
    pub n0: Option<usize>,
    #[arg(long)]
    pub p_max: Option<u32>,
    #[arg(long)]
    pub max_escalations: Option<u32>,
    /// Comma-separated grid values.
    #[arg(long, value_delimiter = ',')]
    pub grid: Option<Vec<String>>,
    #[arg(long)]
    pub from: Option<String>,
    #[arg(long)]
    pub to: Option<String>,
    #[arg(long)]
    pub count: Option<usize>,
    #[arg(long)]
    pub steps: Option<usize>,
    #[arg(long)]
    pub threads: Option<usize>,
    #[arg(long)]
    pub window: Option<usize>,
    #[arg(long)]
    pub mode: Option<ModeName>,
    #[arg(long)]
    pub n1: Option<usize>,
    #[arg(long)]
    pub n2: Option<usize>,
    #[arg(long)]
    pub table: Option<PathBuf>,
    #[arg(long)]
    pub manifest: Option<PathBuf>,
    #[arg(long)]
    pub csv: Option<PathBuf>,
}

impl Flags {
    pub fn apply(self, cfg: &mut RunConfig) {
        fn set<T>(slot: &mut T, v: Option<T>) {
            if let Some(v) = v {
                *slot = v;
            }
        }
        fn set_opt<T>(slot: &mut Option<T>, v: Option<T>) {
            if v.is_some() {
                *slot = v;
            }
        }
        set(&mut cfg.x0, self.x0);
        set_opt(&mut cfg.prec, self.prec);
        set(&mut cfg.tol, self.tol);
        set(&mut cfg.family.kind, self.family);
        set(&mut cfg.family.c, self.c);
        set(&mut cfg.family.k, self.k);
        set(&mut cfg.family.rho, self.rho);
        set_opt(&mut cfg.family.side, self.side);
        set_opt(&mut cfg.family.mid, self.mid);
        set_opt(&mut cfg.family.coefficients, self.coefficients);
        set(&mut cfg.solve.n0, self.n0);
        set(&mut cfg.solve.p_max, self.p_max);
        set(&mut cfg.solve.max_escalations, self.max_escalations);
        set_opt(&mut cfg.scan.grid, self.grid);
        set_opt(&mut cfg.scan.from, self.from);
        set_opt(&mut cfg.scan.to, self.to);
        set_opt(&mut cfg.scan.count, self.count);
        set(&mut cfg.scan.steps, self.steps);
        set_opt(&mut cfg.scan.threads, self.threads);
        set(&mut cfg.check.window, self.window);
        set(&mut cfg.asymptotics.mode, self.mode);
        set_opt(&mut cfg.asymptotics.n1, self.n1);
        set_opt(&mut cfg.asymptotics.n2, self.n2);
        set_opt(&mut cfg.residual.table, self.table);
        set_opt(&mut cfg.output.manifest, self.manifest);
        set_opt(&mut cfg.output.csv, self.csv);
    }
}

fn write_file(path: &Path, bytes: &[u8]) -> Result<()> {
    std::fs::write(path, bytes).map_err(Error::from)
}

fn emit(command: Command, config: &RunConfig, out: &RunOutput, wall_time_ms: u64) -> Result<()> {
    let text = manifest_json(command, config, out, wall_time_ms);
    match &config.output.manifest {
        Some(path) => write_file(path, text.as_bytes())?,
        None => print!("{text}"),
    }
    if let (Some(path), Some(csv)) = (&config.output.csv, &out.csv) {
        write_file(path, csv)?;
    }
    Ok(())
}

/// Parses arguments, runs the command and returns the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    let (command, flags) = cli.command.split();
    let config = match load_config(flags) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("dp1: {e}");
            return e.exit_code();
        }
    };
    let start = Instant::now();
    let result = run(command, &config);
    let wall = start.elapsed().as_millis() as u64;
    match result {
        Ok(out) => match emit(command, &config, &out, wall) {
            Ok(()) => 0,
            Err(e) => {
                eprintln!("dp1: {e}");
                e.exit_code()
            }
        },
        Err(e) => {
            eprintln!("dp1: {e}");
            let out = RunOutput {
                results: Value::Null,
                diagnostics: json!({ "error": e.to_string(), "exit_code": e.exit_code() }),
                csv: None,
            };
            if let Err(io) = emit(command, &config, &out, wall) {
                eprintln!("dp1: {io}");
            }
            e.exit_code()
        }
    }
}

fn load_config(flags: Flags) -> Result<RunConfig> {
    let mut config = match &flags.config {
        Some(path) => RunConfig::from_path(path)?,
        None => RunConfig::default(),
    };
    flags.apply(&mut config);
    config.tolerance()?;
    config.resolve()
}

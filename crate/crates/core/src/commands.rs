//! Command-line workflows behind the `walklab` binary.
//!
//! Each subcommand builds a [`Report`] that renders either as CSV (metadata in
//! `# key: value` comment lines, then a header row and one record per line) or
//! as JSON (`{"meta", "summary", "records"}`). Output depends only on the
//! arguments, so identical invocations give byte-identical files.
//!
//! Disorder laws on the command line use `family:key=value,...`
//! (`poisson:lambda=1`, `binomial:n=2,p=0.5`, `hypergeometric:N=10,K=5,n=2`,
//! `negative_binomial:r=1,k=0.5`, `geometric:k=0.5`, `geometric_shifted:k=0.5`)
//! or one of the presets `tableII-binomial`, `tableII-hypergeometric`,
//! `tableII-negbinomial`, `tableII-geometric`.

use std::fmt::Write as _;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Map, Value};

use crate::disorder::{realization_seed, table_two_presets, DisorderSpec};
use crate::ensemble::{
    disorder_avg_absorb_time, ensemble_exponent, Engine, EnsembleConfig, FitResult,
};
use crate::error::{Error, Result};
use crate::lattice::{ClassicalState, PositionDistribution, WalkerState};
use crate::raabe::{
    raabe_estimate, ClassicalMeanTimeTerms, GeometricTerms, QuantumMeanTimeTerms, RaabeReport,
};
use crate::series::{absorption_summary, absorption_table, StartCoin, TailModel, DEFAULT_ORDER};
use crate::walk::{AbsorberConfig, AbsorptionRecord, CoinKind, CoinState, StepLengths, WalkRunConfig};

/// Master seed used when neither `--seed` nor `WALKLAB_SEED` is given.
pub const DEFAULT_SEED: u64 = 2024;

#[derive(Debug, Parser)]
#[command(name = "walklab", version, about = "Quantum and classical walks with absorbers and step-length disorder")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Position distributions at snapshot times.
    Walk(WalkArgs),
    /// Per-step absorption, cumulative probability and average absorbing time.
    Absorb(AbsorbArgs),
    /// Generating-function absorption table or a Raabe convergence report.
    Series(SeriesArgs),
    /// Spreading exponent from a log-log fit of the (averaged) spread.
    Exponent(ExponentArgs),
    /// Exponents with and without absorber for a list of disorder laws.
    Sweep(SweepArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Args)]
pub struct CommonArgs {
    /// Master seed for disorder sampling.
    #[arg(long, env = "WALKLAB_SEED", default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    /// Worker threads for ensembles (defaults to all cores).
    #[arg(long, env = "WALKLAB_WORKERS")]
    pub workers: Option<usize>,
    /// Output format.
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// Write to this file instead of stdout.
    #[arg(long, short)]
    pub output: Option<std::path::PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct WalkerArgs {
    #[arg(long, default_value = "quantum")]
    pub engine: Engine,
    /// Coin: hadamard, hadamard-paper or kempe (quantum only).
    #[arg(long)]
    pub coin: Option<CoinKind>,
    /// Initial coin state: L, R or sym (quantum only).
    #[arg(long)]
    pub initial: Option<CoinState>,
    /// Absorbing site m1 (nonzero).
    #[arg(long, allow_hyphen_values = true)]
    pub absorber: Option<i64>,
    /// Step-length law, e.g. `poisson:lambda=1`.
    #[arg(long)]
    pub disorder: Option<DisorderSpec>,
}

impl WalkerArgs {
    fn absorber(&self) -> Result<Option<AbsorberConfig>> {
        self.absorber.map(AbsorberConfig::new).transpose()
    }

    fn coin(&self) -> Result<(CoinKind, CoinState)> {
        if self.engine == Engine::Classical && (self.coin.is_some() || self.initial.is_some()) {
            return Err(Error::InvalidParameter(
                "--coin and --initial apply only to --engine quantum".into(),
            ));
        }
        Ok((
            self.coin.unwrap_or(CoinKind::Hadamard),
            self.initial.unwrap_or(CoinState::L),
        ))
    }

    fn ensemble(&self, steps: usize, realizations: usize, common: &CommonArgs) -> Result<EnsembleConfig> {
        let (coin, state) = self.coin()?;
        let mut cfg = EnsembleConfig::new(self.engine, steps)
            .with_coin(coin, state)
            .with_seed(common.seed);
        cfg.absorber = self.absorber()?;
        if let Some(spec) = self.disorder {
            cfg = cfg.with_disorder(spec, realizations);
        }
        cfg.workers = common.workers;
        cfg.validate()?;
        Ok(cfg)
    }

    fn echo(&self, meta: &mut Vec<(String, Value)>) {
        meta.push(("engine".into(), json!(self.engine.to_string())));
        if self.engine == Engine::Quantum {
            let (coin, state) = self.coin().unwrap_or((CoinKind::Hadamard, CoinState::L));
            meta.push(("coin".into(), json!(coin.to_string())));
            meta.push(("initial".into(), json!(state.to_string())));
        }
        meta.push((
            "absorber".into(),
            self.absorber.map_or(json!("none"), |m| json!(m)),
        ));
        meta.push((
            "disorder".into(),
            self.disorder.map_or(json!("none"), |d| json!(d.to_string())),
        ));
        if let Some(note) = self.disorder.and_then(preset_note) {
            meta.push(("disorder_note".into(), json!(note)));
        }
    }
}

fn preset_note(spec: DisorderSpec) -> Option<&'static str> {
    table_two_presets()
        .into_iter()
        .find(|p| p.spec == spec)
        .and_then(|p| p.note)
}

#[derive(Debug, Clone, Args)]
pub struct WalkArgs {
    #[command(flatten)]
    pub walker: WalkerArgs,
    #[arg(long)]
    pub steps: usize,
    /// Snapshot times (comma separated); defaults to the final step.
    #[arg(long, value_delimiter = ',')]
    pub snapshot: Vec<usize>,
    #[command(flatten)]
    pub common: CommonArgs,
}

#[derive(Debug, Clone, Args)]
pub struct AbsorbArgs {
    #[command(flatten)]
    pub walker: WalkerArgs,
    #[arg(long)]
    pub steps: usize,
    /// Disorder realizations to average over.
    #[arg(long, default_value_t = 40)]
    pub realizations: usize,
    /// Horizons n reported for disorder averages (comma separated); defaults to every step.
    #[arg(long, value_delimiter = ',')]
    pub horizons: Vec<usize>,
    #[command(flatten)]
    pub common: CommonArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum RaabeSeries {
    Classical,
    Quantum,
    Geometric,
}

#[derive(Debug, Clone, Args)]
pub struct SeriesArgs {
    /// Absorber range `a..b` (inclusive).
    #[arg(long = "m1-range", default_value = "1..10")]
    pub m1_range: String,
    /// Absorber for a single row or for `--raabe`.
    #[arg(long, allow_hyphen_values = true)]
    pub m1: Option<i64>,
    /// Truncation order of the series.
    #[arg(long = "T", alias = "order", default_value_t = DEFAULT_ORDER)]
    pub order: usize,
    #[arg(long, default_value = "power_law")]
    pub tail: TailModel,
    #[arg(long, default_value = "L")]
    pub initial: StartCoin,
    /// Run the Raabe diagnostic on this series instead of the table.
    #[arg(long, value_enum)]
    pub raabe: Option<RaabeSeries>,
    #[arg(long = "n-max", default_value_t = 1_000_000)]
    pub n_max: u64,
    /// Ratio of the geometric test series.
    #[arg(long, default_value_t = 0.5)]
    pub q: f64,
    #[command(flatten)]
    pub common: CommonArgs,
}

#[derive(Debug, Clone, Args)]
pub struct ExponentArgs {
    #[command(flatten)]
    pub walker: WalkerArgs,
    /// Fit range `t_lo:t_hi`.
    #[arg(long = "t-range", default_value = "20:80")]
    pub t_range: String,
    /// Steps to run; defaults to the top of the fit range.
    #[arg(long)]
    pub steps: Option<usize>,
    #[arg(long, default_value_t = 200)]
    pub realizations: usize,
    #[command(flatten)]
    pub common: CommonArgs,
}

#[derive(Debug, Clone, Args)]
pub struct SweepArgs {
    #[arg(long, default_value = "quantum")]
    pub engine: Engine,
    #[arg(long)]
    pub coin: Option<CoinKind>,
    #[arg(long)]
    pub initial: Option<CoinState>,
    /// Disorder laws to sweep (repeatable); defaults to the four presets.
    #[arg(long)]
    pub disorder: Vec<DisorderSpec>,
    #[arg(long, allow_hyphen_values = true, default_value_t = 2)]
    pub absorber: i64,
    #[arg(long = "t-range", default_value = "20:80")]
    pub t_range: String,
    #[arg(long, default_value_t = 200)]
    pub realizations: usize,
    #[command(flatten)]
    pub common: CommonArgs,
}

/// Tabular output with metadata and a scalar summary.
#[derive(Debug, Clone, PartialEq)]
pub struct Report {
    pub meta: Vec<(String, Value)>,
    pub summary: Vec<(String, Value)>,
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Value>>,
    pub default_format: Format,
}

impl Report {
    fn new(command: &str, columns: Vec<&'static str>, default_format: Format) -> Self {
        Self {
            meta: vec![
                ("tool".into(), json!("walklab")),
                ("version".into(), json!(env!("CARGO_PKG_VERSION"))),
                ("command".into(), json!(command)),
            ],
            summary: Vec::new(),
            columns,
            rows: Vec::new(),
            default_format,
        }
    }

    fn meta(&mut self, key: &str, value: Value) {
        self.meta.push((key.into(), value));
    }

    fn summary(&mut self, key: &str, value: Value) {
        self.summary.push((key.into(), value));
    }

    pub fn render(&self, format: Option<Format>) -> String {
        match format.unwrap_or(self.default_format) {
            Format::Csv => self.to_csv(),
            Format::Json => self.to_json(),
        }
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        for (k, v) in self.meta.iter().chain(&self.summary) {
            let _ = writeln!(out, "# {k}: {}", plain(v));
        }
        out.push_str(&self.columns.join(","));
        out.push('\n');
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(csv_cell).collect();
            out.push_str(&cells.join(","));
            out.push('\n');
        }
        out
    }

    pub fn to_json(&self) -> String {
        let to_map = |pairs: &[(String, Value)]| -> Map<String, Value> {
            pairs.iter().cloned().collect()
        };
        let records: Vec<Value> = self
            .rows
            .iter()
            .map(|row| {
                Value::Object(
                    self.columns
                        .iter()
                        .map(|c| c.to_string())
                        .zip(row.iter().cloned())
                        .collect(),
                )
            })
            .collect();
        let doc = json!({
            "meta": to_map(&self.meta),
            "summary": to_map(&self.summary),
            "records": records,
        });
        let mut s = serde_json::to_string_pretty(&doc).expect("report values serialize");
        s.push('\n');
        s
    }
}

fn plain(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        Value::Null => String::new(),
        other => other.to_string(),
    }
}

fn csv_cell(v: &Value) -> String {
    let s = plain(v);
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s
    }
}

fn num(x: f64) -> Value {
    serde_json::Number::from_f64(x).map_or(Value::Null, Value::Number)
}

fn parse_range(s: &str, seps: &[&str], flag: &str) -> Result<(i64, i64)> {
    seps.iter()
        .find_map(|sep| s.split_once(sep))
        .and_then(|(a, b)| Some((a.trim().parse().ok()?, b.trim().parse().ok()?)))
        .ok_or_else(|| Error::InvalidParameter(format!("{flag}: cannot parse range `{s}`")))
}

fn fit_range(s: &str) -> Result<(u64, u64)> {
    let (lo, hi) = parse_range(s, &[":", ".."], "--t-range")?;
    if lo < 1 || hi <= lo {
        return Err(Error::InvalidParameter(format!(
            "--t-range needs 1 <= t_lo < t_hi, got {s}"
        )));
    }
    Ok((lo as u64, hi as u64))
}

/// Exit status for a failed command: 3 for numerical failures, 2 otherwise.
pub fn exit_code(err: &Error) -> i32 {
    if err.is_numerical() {
        3
    } else {
        2
    }
}

/// Runs a parsed command and returns the rendered output with its destination.
pub fn run(cli: &Cli) -> Result<(String, Option<std::path::PathBuf>)> {
    let (report, common) = match &cli.command {
        Command::Walk(a) => (cmd_walk(a)?, &a.common),
        Command::Absorb(a) => (cmd_absorb(a)?, &a.common),
        Command::Series(a) => (cmd_series(a)?, &a.common),
        Command::Exponent(a) => (cmd_exponent(a)?, &a.common),
        Command::Sweep(a) => (cmd_sweep(a)?, &a.common),
    };
    Ok((report.render(common.format), common.output.clone()))
}

pub fn cmd_walk(args: &WalkArgs) -> Result<Report> {
    let w = &args.walker;
    if args.steps == 0 {
        return Err(Error::InvalidParameter("--steps must be positive".into()));
    }
    let mut snapshots = args.snapshot.clone();
    if snapshots.is_empty() {
        snapshots.push(args.steps);
    }
    snapshots.sort_unstable();
    snapshots.dedup();
    if let Some(t) = snapshots.iter().find(|t| **t > args.steps) {
        return Err(Error::InvalidParameter(format!(
            "--snapshot {t} exceeds --steps {}",
            args.steps
        )));
    }
    let absorber = w.absorber()?;
    let (coin, state) = w.coin()?;
    let seed = w.disorder.map(|_| realization_seed(args.common.seed, 0));
    let lengths = match (w.disorder, seed) {
        (Some(spec), Some(seed)) => StepLengths::Sequence(spec.sampler()?.realization(args.steps, seed).lengths),
        _ => StepLengths::Clean,
    };
    let dists = snapshot_distributions(w.engine, coin, state, absorber, &lengths, &snapshots)?;

    let mut report = Report::new("walk", vec!["t", "n", "p"], Format::Csv);
    w.echo(&mut report.meta);
    report.meta("steps", json!(args.steps));
    report.meta("seed", json!(args.common.seed));
    if let Some(s) = seed {
        report.meta("realization_seed", json!(s));
    }
    let mut masses = Vec::new();
    for d in &dists {
        masses.push(json!({"t": d.time, "mass": num(d.sum()), "sigma": d.std_dev().map(num).unwrap_or(Value::Null)}));
        for (n, p) in d.support() {
            report.rows.push(vec![json!(d.time), json!(n), num(p)]);
        }
    }
    report.summary("snapshots", Value::Array(masses));
    Ok(report)
}

fn snapshot_distributions(
    engine: Engine,
    coin: CoinKind,
    state: CoinState,
    absorber: Option<AbsorberConfig>,
    lengths: &StepLengths,
    snapshots: &[usize],
) -> Result<Vec<PositionDistribution>> {
    let last = *snapshots.last().expect("at least one snapshot");
    let mut out = Vec::with_capacity(snapshots.len());
    let mut next = snapshots.iter().peekable();
    match engine {
        Engine::Quantum => {
            let op = coin.operator();
            let mut s = WalkRunConfig::new(op, state, last).initial_state();
            for t in 1..=last {
                s.step(&op, lengths.at(t));
                if let Some(a) = &absorber {
                    s.apply_absorber(a);
                }
                if next.next_if(|x| **x == t).is_some() {
                    out.push(s.probability_distribution());
                }
            }
        }
        Engine::Classical => {
            let mut s = ClassicalState::localized(0);
            for t in 1..=last {
                s.crw_step(lengths.at(t));
                if let Some(a) = &absorber {
                    s.crw_apply_absorber(a);
                }
                if next.next_if(|x| **x == t).is_some() {
                    out.push(s.probability_distribution());
                }
            }
        }
    }
    Ok(out)
}

pub fn cmd_absorb(args: &AbsorbArgs) -> Result<Report> {
    let w = &args.walker;
    if w.absorber.is_none() {
        return Err(Error::InvalidParameter("--absorber is required".into()));
    }
    let cfg = w.ensemble(args.steps, args.realizations, &args.common)?;

    if w.disorder.is_none() {
        let record = single_record(&cfg)?;
        if !(record.cumulative > 0.0) {
            return Err(Error::NoAbsorption { horizon: args.steps });
        }
        let mut report = Report::new("absorb", vec!["t", "p_t", "cumulative", "t_a_n"], Format::Csv);
        w.echo(&mut report.meta);
        report.meta("steps", json!(args.steps));
        report.meta("seed", json!(args.common.seed));
        report.meta("exclusions", json!(0));
        let running = record.running_avg_time();
        let mut cumulative = 0.0;
        for (i, p) in record.per_step.iter().enumerate() {
            cumulative += p;
            report.rows.push(vec![
                json!(i + 1),
                num(*p),
                num(cumulative),
                running[i].map_or(Value::Null, num),
            ]);
        }
        report.summary("total_absorption", num(record.cumulative));
        report.summary(
            "avg_absorb_time",
            running.last().copied().flatten().map_or(Value::Null, num),
        );
        return Ok(report);
    }

    let horizons = if args.horizons.is_empty() {
        (1..=args.steps).collect()
    } else {
        args.horizons.clone()
    };
    let curve = disorder_avg_absorb_time(&cfg, &horizons)?;
    let mut report = Report::new(
        "absorb",
        vec!["n", "mean_t_a", "std_error", "count", "excluded"],
        Format::Csv,
    );
    w.echo(&mut report.meta);
    report.meta("steps", json!(args.steps));
    report.meta("realizations", json!(args.realizations));
    report.meta("seed", json!(args.common.seed));
    report.meta("exclusions", json!(curve.total_excluded()));
    if w.engine == Engine::Classical {
        report.meta(
            "note",
            json!("classical averages keep growing with the horizon; values depend on n and the ensemble size"),
        );
    }
    let excluded = curve.excluded();
    for i in 0..curve.abscissa.len() {
        report.rows.push(vec![
            json!(curve.abscissa[i]),
            num(curve.values[i]),
            num(curve.std_errors[i]),
            json!(curve.counts[i]),
            json!(excluded[i]),
        ]);
    }
    let last = curve.values.len() - 1;
    report.summary("final_horizon", json!(curve.abscissa[last]));
    report.summary("final_mean_t_a", num(curve.values[last]));
    Ok(report)
}

fn single_record(cfg: &EnsembleConfig) -> Result<AbsorptionRecord> {
    Ok(crate::ensemble::run_realization(cfg, 0)?.record)
}

pub fn cmd_series(args: &SeriesArgs) -> Result<Report> {
    if let Some(kind) = args.raabe {
        return raabe_report(args, kind);
    }
    let (lo, hi) = match args.m1 {
        Some(m) => (m, m),
        None => parse_range(&args.m1_range, &["..", ":"], "--m1-range")?,
    };
    if lo > hi {
        return Err(Error::InvalidParameter(format!(
            "--m1-range is empty: {}",
            args.m1_range
        )));
    }
    let rows = if lo >= 1 {
        absorption_table(hi as u32, args.initial, args.order, args.tail)?
            .into_iter()
            .filter(|r| r.m1 >= lo)
            .collect()
    } else {
        (lo..=hi)
            .filter(|m| *m != 0)
            .map(|m| absorption_summary(m, args.initial, args.order, args.tail))
            .collect::<Result<Vec<_>>>()?
    };
    let mut report = Report::new("series", vec!["m1", "P", "t_a", "tail_exponent"], Format::Csv);
    report.meta("coin", json!("hadamard"));
    report.meta("initial", json!(args.initial.to_string()));
    report.meta("order", json!(args.order));
    report.meta("tail", json!(match args.tail { TailModel::None => "none", TailModel::PowerLaw => "power_law" }));
    for r in &rows {
        report.rows.push(vec![
            json!(r.m1),
            num(r.total),
            num(r.mean_time),
            r.tail.map_or(Value::Null, |t| num(t.exponent)),
        ]);
    }
    report.summary("rows", json!(rows.len()));
    Ok(report)
}

fn raabe_report(args: &SeriesArgs, kind: RaabeSeries) -> Result<Report> {
    let m1 = args.m1.unwrap_or(2);
    let rep: RaabeReport = match kind {
        RaabeSeries::Classical => {
            if m1 < 1 {
                return Err(Error::InvalidParameter("--m1 must be positive".into()));
            }
            raabe_estimate(&ClassicalMeanTimeTerms { m1: m1 as u64 }, args.n_max)?
        }
        RaabeSeries::Quantum => {
            if m1 != 2 {
                return Err(Error::InvalidParameter(
                    "--raabe quantum has closed-form terms for --m1 2 only".into(),
                ));
            }
            raabe_estimate(&QuantumMeanTimeTerms, args.n_max)?
        }
        RaabeSeries::Geometric => {
            if !(args.q > 0.0 && args.q < 1.0) {
                return Err(Error::InvalidParameter("--q must lie in (0, 1)".into()));
            }
            raabe_estimate(&GeometricTerms { q: args.q }, args.n_max)?
        }
    };
    let mut report = Report::new("series", vec!["n", "E_n"], Format::Csv);
    let name = match kind {
        RaabeSeries::Classical => "classical",
        RaabeSeries::Quantum => "quantum",
        RaabeSeries::Geometric => "geometric",
    };
    report.meta("raabe", json!(name));
    if kind == RaabeSeries::Geometric {
        report.meta("q", num(args.q));
    } else {
        report.meta("m1", json!(m1));
    }
    report.meta("n_max", json!(args.n_max));
    for (n, e) in &rep.estimates {
        report.rows.push(vec![json!(n), num(*e)]);
    }
    report.summary("E", num(rep.extrapolated));
    report.summary("verdict", json!(rep.verdict.to_string()));
    Ok(report)
}

fn fit_summary(report: &mut Report, prefix: &str, fit: &FitResult) {
    let key = |k: &str| {
        if prefix.is_empty() {
            k.to_string()
        } else {
            format!("{prefix}_{k}")
        }
    };
    report.summary(&key("alpha"), num(fit.alpha));
    report.summary(&key("intercept"), num(fit.intercept));
    report.summary(&key("ci95_halfwidth"), num(fit.ci95_halfwidth));
    report.summary(&key("residual_rms"), num(fit.residual_rms));
}

pub fn cmd_exponent(args: &ExponentArgs) -> Result<Report> {
    let (t_lo, t_hi) = fit_range(&args.t_range)?;
    let steps = args.steps.unwrap_or(t_hi as usize);
    if (steps as u64) < t_hi {
        return Err(Error::InvalidParameter(format!(
            "--steps {steps} is below the top of --t-range {t_hi}"
        )));
    }
    let cfg = args.walker.ensemble(steps, args.realizations, &args.common)?;
    let (curve, fit) = ensemble_exponent(&cfg, t_lo, t_hi)?;

    let mut report = Report::new("exponent", vec!["t", "sigma", "std_error"], Format::Json);
    args.walker.echo(&mut report.meta);
    report.meta("steps", json!(steps));
    report.meta("realizations", json!(cfg.effective_realizations()));
    report.meta("seed", json!(args.common.seed));
    report.meta("exclusions", json!(curve.total_excluded()));
    report.meta("fit_range", json!(format!("{t_lo}:{t_hi}")));
    for i in 0..curve.abscissa.len() {
        report.rows.push(vec![
            json!(curve.abscissa[i]),
            num(curve.values[i]),
            num(curve.std_errors[i]),
        ]);
    }
    fit_summary(&mut report, "", &fit);
    Ok(report)
}

pub fn cmd_sweep(args: &SweepArgs) -> Result<Report> {
    let (t_lo, t_hi) = fit_range(&args.t_range)?;
    let laws: Vec<(String, DisorderSpec)> = if args.disorder.is_empty() {
        table_two_presets()
            .into_iter()
            .map(|p| (p.name.to_string(), p.spec))
            .collect()
    } else {
        args.disorder.iter().map(|d| (d.to_string(), *d)).collect()
    };
    let absorber = AbsorberConfig::new(args.absorber)?;
    let coin = WalkerArgs {
        engine: args.engine,
        coin: args.coin,
        initial: args.initial,
        absorber: None,
        disorder: None,
    }
    .coin()?;

    let mut report = Report::new(
        "sweep",
        vec![
            "disorder",
            "mean",
            "variance",
            "dispersion",
            "alpha_absorber",
            "ci95_absorber",
            "alpha_free",
            "ci95_free",
            "gap",
        ],
        Format::Csv,
    );
    report.meta("engine", json!(args.engine.to_string()));
    if args.engine == Engine::Quantum {
        report.meta("coin", json!(coin.0.to_string()));
        report.meta("initial", json!(coin.1.to_string()));
    }
    report.meta("absorber", json!(args.absorber));
    report.meta("realizations", json!(args.realizations));
    report.meta("steps", json!(t_hi));
    report.meta("fit_range", json!(format!("{t_lo}:{t_hi}")));
    report.meta("seed", json!(args.common.seed));
    for (_, spec) in &laws {
        if let Some(note) = preset_note(*spec) {
            report.meta("disorder_note", json!(note));
        }
    }

    for (name, spec) in &laws {
        let mut base = EnsembleConfig::new(args.engine, t_hi as usize)
            .with_coin(coin.0, coin.1)
            .with_disorder(*spec, args.realizations)
            .with_seed(args.common.seed);
        base.workers = args.common.workers;
        let (_, free) = ensemble_exponent(&base, t_lo, t_hi)?;
        let (_, absorbed) = ensemble_exponent(&base.clone().with_absorber(absorber), t_lo, t_hi)?;
        let m = spec.moments();
        report.rows.push(vec![
            json!(name),
            num(m.mean),
            num(m.variance),
            json!(serde_json::to_value(spec.dispersion()).unwrap_or(Value::Null)),
            num(absorbed.alpha),
            num(absorbed.ci95_halfwidth),
            num(free.alpha),
            num(free.ci95_halfwidth),
            num(absorbed.alpha - free.alpha),
        ]);
    }
    report.summary("laws", json!(laws.len()));
    Ok(report)
}

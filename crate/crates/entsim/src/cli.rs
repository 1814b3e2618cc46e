//! Command-line front end: run protocol presets, scan a parameter, print
//! spectrum tables; export trajectories as CSV or JSON and optional
//! line-plot description files.
//!
//! Exit codes: 0 on success, 1 on usage or input errors, 2 when a protocol
//! runs but misses its success threshold.

use crate::model::QubitSystem;
use crate::protocols::{
    build_protocol, run_protocol, run_rwa_validation, Overrides, ProtocolName, ProtocolResult,
};
use crate::spectrum::diagonalize_bare;
use crate::C64;
use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::PathBuf;

pub const EXIT_OK: i32 = 0;
pub const EXIT_ERROR: i32 = 1;
pub const EXIT_THRESHOLD: i32 = 2;

#[derive(Debug, Parser)]
#[command(
    name = "entsim",
    about = "Entangled-state generation in exchange-coupled driven qubits",
    version
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run one protocol preset and export its trajectory.
    Run(RunArgs),
    /// Run a preset once per value of one override key.
    Scan(ScanArgs),
    /// Print the exact spectrum of the bare coupled-qubit system.
    Spectrum(SpectrumArgs),
}

#[derive(Debug, Args)]
pub struct RunArgs {
    /// Protocol preset name (e.g. phi_minus_fstirap).
    #[arg(long)]
    pub protocol: Option<String>,
    /// Override one preset parameter, as key=value. Repeatable.
    #[arg(long = "override", value_name = "KEY=VALUE")]
    pub overrides: Vec<String>,
    /// Output format.
    #[arg(long, default_value = "csv")]
    pub format: String,
    /// Trajectory output path (defaults to <protocol>.<format>).
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Number of output samples (≥ 2).
    #[arg(long, default_value_t = 1000)]
    pub samples: usize,
    /// Seed for protocols that draw jitter.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Also write a line-plot description (JSON) to this path.
    #[arg(long)]
    pub plot: Option<PathBuf>,
    /// Read a run configuration file (JSON); flags override its fields.
    #[arg(long)]
    pub config: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ScanArgs {
    #[command(flatten)]
    pub run: RunArgs,
    /// Override key to scan.
    #[arg(long)]
    pub key: String,
    /// Comma-separated values for the scanned key.
    #[arg(long, value_delimiter = ',')]
    pub values: Vec<f64>,
}

#[derive(Debug, Args)]
pub struct SpectrumArgs {
    /// Number of qubits (2..=12).
    #[arg(long)]
    pub n: usize,
    /// Exchange coupling strength.
    #[arg(long)]
    pub lambda: f64,
    /// Level splitting.
    #[arg(long)]
    pub omega0: f64,
    /// Write the table here instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// A resolved run configuration; serializable so batch jobs can be kept in
/// version control.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunConfig {
    pub protocol: String,
    #[serde(default)]
    pub overrides: BTreeMap<String, f64>,
    #[serde(default)]
    pub output: Option<PathBuf>,
    #[serde(default = "default_format")]
    pub format: OutputFormat,
    #[serde(default = "default_samples")]
    pub samples: usize,
    #[serde(default)]
    pub seed: u64,
}

fn default_format() -> OutputFormat {
    OutputFormat::Csv
}

fn default_samples() -> usize {
    1000
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    Csv,
    Json,
}

/// Scalar summary printed after a run and embedded in JSON exports.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunSummary {
    pub protocol: String,
    pub final_fidelity: f64,
    pub final_negativity: f64,
    pub max_norm_error: f64,
    pub passed: bool,
    pub extra: BTreeMap<String, f64>,
    pub warnings: Vec<String>,
}

/// Entry point used by the binary.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            // clap handles --help/--version by "erroring" with the text
            let _ = e.print();
            return if e.use_stderr() { EXIT_ERROR } else { EXIT_OK };
        }
    };
    match cli.command {
        Command::Run(args) => cmd_run(args),
        Command::Scan(args) => cmd_scan(args),
        Command::Spectrum(args) => cmd_spectrum(args),
    }
}

fn parse_override(s: &str) -> Result<(String, f64), String> {
    let (key, value) = s
        .split_once('=')
        .ok_or_else(|| format!("override `{s}` is not of the form key=value"))?;
    let parsed: f64 = value
        .trim()
        .parse()
        .map_err(|_| format!("override `{key}` needs a plain float, got `{value}`"))?;
    Ok((key.trim().to_string(), parsed))
}

fn resolve_config(args: &RunArgs) -> Result<RunConfig, String> {
    let mut config = if let Some(path) = &args.config {
        let text = std::fs::read_to_string(path)
            .map_err(|e| format!("cannot read config {}: {e}", path.display()))?;
        serde_json::from_str::<RunConfig>(&text)
            .map_err(|e| format!("cannot parse config {}: {e}", path.display()))?
    } else {
        RunConfig {
            protocol: String::new(),
            overrides: BTreeMap::new(),
            output: None,
            format: OutputFormat::Csv,
            samples: 1000,
            seed: 0,
        }
    };
    if let Some(protocol) = &args.protocol {
        config.protocol = protocol.clone();
    }
    if config.protocol.is_empty() {
        return Err("no protocol given (use --protocol or a config file)".into());
    }
    for pair in &args.overrides {
        let (k, v) = parse_override(pair)?;
        config.overrides.insert(k, v);
    }
    match args.format.as_str() {
        "csv" => config.format = OutputFormat::Csv,
        "json" => config.format = OutputFormat::Json,
        other => return Err(format!("unknown format `{other}` (csv or json)")),
    }
    if let Some(out) = &args.out {
        config.output = Some(out.clone());
    }
    config.samples = args.samples;
    config.seed = args.seed;
    if config.samples < 2 {
        return Err("--samples must be at least 2".into());
    }
    Ok(config)
}

pub fn cmd_run(args: RunArgs) -> i32 {
    let plot = args.plot.clone();
    let config = match resolve_config(&args) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_ERROR;
        }
    };
    match run_from_config(&config) {
        Ok((summary, csv, plot_doc)) => {
            let ext = match config.format {
                OutputFormat::Csv => "csv",
                OutputFormat::Json => "json",
            };
            let out_path = config
                .output
                .clone()
                .unwrap_or_else(|| PathBuf::from(format!("{}.{ext}", config.protocol)));
            let payload = match config.format {
                OutputFormat::Csv => csv,
                OutputFormat::Json => {
                    serde_json::to_string_pretty(&serde_json::json!({
                        "summary": summary,
                        "trajectory": plot_doc.trajectory_table(),
                    }))
                    .expect("serializable")
                        + "\n"
                }
            };
            if let Err(e) = std::fs::write(&out_path, payload) {
                eprintln!("error: cannot write {}: {e}", out_path.display());
                return EXIT_ERROR;
            }
            if let Some(plot_path) = plot {
                if let Err(e) = std::fs::write(&plot_path, plot_doc.to_json()) {
                    eprintln!("error: cannot write {}: {e}", plot_path.display());
                    return EXIT_ERROR;
                }
            }
            for w in &summary.warnings {
                eprintln!("warning: {w}");
            }
            println!(
                "{}: fidelity={:.6} Ne={:.6} norm_err={:.2e} {}",
                summary.protocol,
                summary.final_fidelity,
                summary.final_negativity,
                summary.max_norm_error,
                if summary.passed { "PASS" } else { "FAIL" }
            );
            if summary.passed {
                EXIT_OK
            } else {
                EXIT_THRESHOLD
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_ERROR
        }
    }
}

/// Plot-description document: a few named series over a shared x axis.
#[derive(Debug, Clone, Serialize)]
pub struct PlotDoc {
    pub title: String,
    pub x_label: String,
    pub y_label: String,
    pub series: Vec<PlotSeries>,
}

#[derive(Debug, Clone, Serialize)]
pub struct PlotSeries {
    pub label: String,
    pub x: Vec<f64>,
    pub y: Vec<f64>,
}

impl PlotDoc {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("serializable") + "\n"
    }

    /// Column-oriented table used in the JSON trajectory export.
    fn trajectory_table(&self) -> serde_json::Value {
        let mut columns = serde_json::Map::new();
        if let Some(first) = self.series.first() {
            columns.insert("t".into(), serde_json::json!(first.x));
        }
        for s in &self.series {
            columns.insert(s.label.clone(), serde_json::json!(s.y));
        }
        serde_json::Value::Object(columns)
    }
}

/// Run a protocol from a resolved configuration. Returns the summary, the
/// CSV payload, and the plot document (which doubles as the JSON table).
pub fn run_from_config(
    config: &RunConfig,
) -> Result<(RunSummary, String, PlotDoc), Box<dyn std::error::Error>> {
    let name = ProtocolName::parse(&config.protocol)?;
    let (summary, csv, plot) = match name {
        ProtocolName::RwaValidation => {
            let report = run_rwa_validation(&Overrides(config.overrides.clone()))?;
            let mut extra = BTreeMap::new();
            extra.insert("max_deviation".into(), report.max_deviation);
            extra.insert("omega0_over_rabi".into(), report.omega0_over_rabi);
            extra.insert("lambda_over_omega0".into(), report.lambda_over_omega0);
            let labels = ["00", "minus", "plus", "11"];
            let mut csv = String::from("basis,effective,lab\n");
            for (k, label) in labels.iter().enumerate() {
                let _ = writeln!(
                    csv,
                    "{label},{},{}",
                    fmt_float(report.effective_populations[k]),
                    fmt_float(report.lab_populations[k])
                );
            }
            let plot = PlotDoc {
                title: "effective vs lab-frame final populations".into(),
                x_label: "basis index".into(),
                y_label: "population".into(),
                series: vec![
                    PlotSeries {
                        label: "effective".into(),
                        x: (0..4).map(|k| k as f64).collect(),
                        y: report.effective_populations.clone(),
                    },
                    PlotSeries {
                        label: "lab".into(),
                        x: (0..4).map(|k| k as f64).collect(),
                        y: report.lab_populations.clone(),
                    },
                ],
            };
            let summary = RunSummary {
                protocol: config.protocol.clone(),
                final_fidelity: 1.0 - report.max_deviation,
                final_negativity: 0.0,
                max_norm_error: 0.0,
                passed: report.max_deviation <= 0.01,
                extra,
                warnings: Vec::new(),
            };
            (summary, csv, plot)
        }
        _ => {
            let spec = build_protocol(name, &Overrides(config.overrides.clone()))?;
            let result = run_protocol(&spec, config.samples)?;
            let mut summary = summarize(&config.protocol, &result);
            summary.extra.insert("peak_negativity".into(), peak_negativity(&result));
            let csv = trajectory_csv(&result);
            let plot = trajectory_plot(&config.protocol, &result);
            (summary, csv, plot)
        }
    };
    Ok((summary, csv, plot))
}

fn summarize(protocol: &str, result: &ProtocolResult) -> RunSummary {
    RunSummary {
        protocol: protocol.to_string(),
        final_fidelity: result.final_fidelity,
        final_negativity: result.final_negativity,
        max_norm_error: result.trajectory.max_norm_error(),
        passed: result.passed,
        extra: result.extra.clone(),
        warnings: result.trajectory.warnings.clone(),
    }
}

/// Shortest round-trip float formatting: re-reading the text reproduces
/// the exact binary value, which keeps exports byte-deterministic.
/// Exponent form outside a plain-decimal range keeps tiny magnitudes
/// short.
fn fmt_float(x: f64) -> String {
    if x == 0.0 {
        return "0".to_string();
    }
    let magnitude = x.abs();
    if (1e-4..1e16).contains(&magnitude) {
        format!("{x}")
    } else {
        format!("{x:e}")
    }
}

/// CSV export: `t,pop_<label>...,negativity,norm_error` per sample.
pub fn trajectory_csv(result: &ProtocolResult) -> String {
    let traj = &result.trajectory;
    let mut out = String::from("t");
    for label in &traj.labels {
        let _ = write!(out, ",pop_{label}");
    }
    out.push_str(",negativity,norm_error\n");
    for (k, t) in traj.times.iter().enumerate() {
        let _ = write!(out, "{}", fmt_float(*t));
        for p in &traj.populations[k] {
            let _ = write!(out, ",{}", fmt_float(*p));
        }
        let ne = traj.negativity.get(k).copied().unwrap_or(0.0);
        let _ = writeln!(out, ",{},{}", fmt_float(ne), fmt_float(traj.norm_error[k]));
    }
    out
}

fn trajectory_plot(protocol: &str, result: &ProtocolResult) -> PlotDoc {
    let traj = &result.trajectory;
    let mut series: Vec<PlotSeries> = traj
        .labels
        .iter()
        .enumerate()
        .map(|(c, label)| PlotSeries {
            label: format!("pop_{label}"),
            x: traj.times.clone(),
            y: traj.populations.iter().map(|row| row[c]).collect(),
        })
        .collect();
    series.push(PlotSeries {
        label: "negativity".into(),
        x: traj.times.clone(),
        y: traj.negativity.clone(),
    });
    PlotDoc {
        title: protocol.to_string(),
        x_label: "t".into(),
        y_label: "population / negativity".into(),
        series,
    }
}

pub fn cmd_scan(args: ScanArgs) -> i32 {
    if args.values.is_empty() {
        eprintln!("error: scan needs at least one value");
        return EXIT_ERROR;
    }
    let key = args.key.clone();
    let config = match resolve_config(&args.run) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_ERROR;
        }
    };
    let stem = config
        .output
        .clone()
        .unwrap_or_else(|| PathBuf::from(format!("{}_scan", config.protocol)));
    let stem = stem.with_extension("");
    let mut index = format!("{key},peak_negativity,final_negativity\n");
    let mut worst = EXIT_OK;
    for value in &args.values {
        let mut point = config.clone();
        point.overrides.insert(key.clone(), *value);
        match run_from_config(&point) {
            Ok((summary, csv, _)) => {
                let path = PathBuf::from(format!(
                    "{}_{}_{}.csv",
                    stem.display(),
                    key,
                    fmt_float(*value)
                ));
                if let Err(e) = std::fs::write(&path, csv) {
                    eprintln!("error: cannot write {}: {e}", path.display());
                    return EXIT_ERROR;
                }
                let peak = summary
                    .extra
                    .get("peak_negativity")
                    .copied()
                    .unwrap_or(summary.final_negativity);
                let _ = writeln!(
                    index,
                    "{},{},{}",
                    fmt_float(*value),
                    fmt_float(peak),
                    fmt_float(summary.final_negativity)
                );
                println!(
                    "{} {key}={}: fidelity={:.6} Ne={:.6} {}",
                    summary.protocol,
                    fmt_float(*value),
                    summary.final_fidelity,
                    summary.final_negativity,
                    if summary.passed { "PASS" } else { "FAIL" }
                );
                if !summary.passed {
                    worst = worst.max(EXIT_THRESHOLD);
                }
            }
            Err(e) => {
                eprintln!("error: {e}");
                return EXIT_ERROR;
            }
        }
    }
    let index_path = PathBuf::from(format!("{}_index.csv", stem.display()));
    if let Err(e) = std::fs::write(&index_path, index) {
        eprintln!("error: cannot write {}: {e}", index_path.display());
        return EXIT_ERROR;
    }
    worst
}

pub fn cmd_spectrum(args: SpectrumArgs) -> i32 {
    match spectrum_table(args.n, args.lambda, args.omega0) {
        Ok(table) => {
            if let Some(path) = &args.out {
                if let Err(e) = std::fs::write(path, &table) {
                    eprintln!("error: cannot write {}: {e}", path.display());
                    return EXIT_ERROR;
                }
            } else {
                print!("{table}");
            }
            EXIT_OK
        }
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_ERROR
        }
    }
}

/// CSV table `index,energy,excitation,shift_exponent` of the bare system.
pub fn spectrum_table(n: usize, lambda: f64, omega0: f64) -> Result<String, String> {
    let sys = QubitSystem::new(n, lambda, omega0, vec![C64::new(1.0, 0.0); n])
        .map_err(|e| e.to_string())?;
    let es = diagonalize_bare(&sys).map_err(|e| e.to_string())?;
    let mut out = String::from("index,energy,excitation,shift_exponent\n");
    for k in 0..es.dim() {
        let label = &es.labels[k];
        let shift = label
            .shift_exponent
            .map(|e| e.to_string())
            .unwrap_or_default();
        let _ = writeln!(
            out,
            "{k},{},{},{shift}",
            fmt_float(es.eigenvalues[k]),
            label.excitation
        );
    }
    Ok(out)
}

/// Largest negativity over a finished trajectory; used by scan indexing.
pub fn peak_negativity(result: &ProtocolResult) -> f64 {
    result.trajectory.negativity.iter().cloned().fold(0.0, f64::max)
}

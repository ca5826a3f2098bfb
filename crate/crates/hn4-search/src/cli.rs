//! Command-line surface: `topology`, `run`, `sweep` and `fit` subcommands.
//!
//! Every flag can instead be supplied through `--config FILE`, a flat
//! `key = value` file using the long flag names as keys; explicit flags
//! override file values. Each command appends a row to
//! `<out-dir>/manifest.csv` recording the resolved parameter set, the
//! artifact version, the output paths and the wall-clock duration, so any
//! output can be reproduced from its manifest row alone.

use std::collections::HashMap;
use std::fmt::Display;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::str::FromStr;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};

use crate::analysis::{
    default_c_grid, default_epsilon_grid, default_n_range, fit_powerlaw, sweep, SweepSpec,
    SweepVariable,
};
use crate::error::{Error, Result};
use crate::search::{
    detect_first_peak, evaluate_cost, run_walk, Method, PeakParams, SearchConfig,
};
use crate::tables;
use crate::topology::{EdgeMode, NetworkTopology};
use crate::walker::{CosDeltaRule, TulsiParams};

#[derive(Parser)]
#[command(name = "hn4-search", version, about = "Quantum-walk spatial search on HN4 networks")]
struct Cli {
    /// Long-range edge interpretation: paired | chain
    #[arg(long, global = true)]
    mode: Option<String>,

    /// Worker threads for sweeps (default: all cores)
    #[arg(long, global = true)]
    jobs: Option<usize>,

    /// Directory for default output paths and the manifest
    #[arg(long, global = true)]
    out_dir: Option<PathBuf>,

    /// Flat key = value file mirroring the flags; flags win
    #[arg(long, value_name = "FILE", global = true)]
    config: Option<PathBuf>,

    /// Write the final walker state of `run` as CSV
    #[arg(long, value_name = "FILE", global = true)]
    dump_state: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Export the HN4 edge list
    Topology(TopologyArgs),
    /// Run one search and report its first peak
    Run(RunArgs),
    /// Run a grid of searches over size, epsilon or delta
    Sweep(SweepArgs),
    /// Fit a power law through two columns of a sweep table
    Fit(FitArgs),
}

#[derive(Args)]
struct TopologyArgs {
    /// Network levels; N = 2^n vertices
    #[arg(long)]
    n: Option<u32>,
    /// Output path (default <out-dir>/edges.csv)
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct RunArgs {
    /// abstract | tulsi | modified
    #[arg(long)]
    method: Option<String>,
    #[arg(long)]
    n: Option<u32>,
    /// Marked vertex (default 3)
    #[arg(long)]
    k0: Option<usize>,
    /// Coin bias in (0, 2]; the abstract method forces 1
    #[arg(long)]
    epsilon: Option<f64>,
    /// Explicit cos(delta) for the tulsi method
    #[arg(long)]
    cos_delta: Option<f64>,
    /// Rotation scale for the size-dependent delta rules (default 1)
    #[arg(long)]
    c: Option<f64>,
    /// inv-log | inv-sqrt-log (default inv-log)
    #[arg(long)]
    delta_rule: Option<String>,
    /// Step horizon (default ceil(6 N^0.75))
    #[arg(long)]
    tmax: Option<usize>,
    /// Series output path (default <out-dir>/series.csv)
    #[arg(long)]
    series_out: Option<PathBuf>,
    /// Report output path (default <out-dir>/report.csv)
    #[arg(long)]
    report_out: Option<PathBuf>,
}

#[derive(Args)]
struct SweepArgs {
    /// size | epsilon | delta
    #[arg(long)]
    variable: Option<String>,
    #[arg(long)]
    method: Option<String>,
    /// Fixed size for epsilon/delta sweeps (default 9)
    #[arg(long)]
    n: Option<u32>,
    /// Size-sweep range (defaults 5..=12)
    #[arg(long)]
    n_min: Option<u32>,
    #[arg(long)]
    n_max: Option<u32>,
    #[arg(long)]
    k0: Option<usize>,
    /// Fixed coin bias for size/delta sweeps
    #[arg(long)]
    epsilon: Option<f64>,
    /// Comma-separated grid for epsilon sweeps
    #[arg(long)]
    epsilon_grid: Option<String>,
    /// Comma-separated grid for delta sweeps
    #[arg(long)]
    c_grid: Option<String>,
    #[arg(long)]
    cos_delta: Option<f64>,
    #[arg(long)]
    c: Option<f64>,
    #[arg(long)]
    delta_rule: Option<String>,
    /// Output path (default <out-dir>/sweep.csv)
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct FitArgs {
    /// Input table (default <out-dir>/sweep.csv)
    #[arg(long)]
    input: Option<PathBuf>,
    /// Column for x (default N)
    #[arg(long)]
    x: Option<String>,
    /// Column for y: p_f | cost_single | cost_total | t_f
    #[arg(long)]
    y: Option<String>,
    /// Exclude rows with n below this (default 5)
    #[arg(long)]
    min_n: Option<u32>,
    /// Output path (default <out-dir>/fit.csv)
    #[arg(long)]
    out: Option<PathBuf>,
}

pub fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(code) => code,
        Err(Error::NoPeak(msg)) => {
            eprintln!("no peak: {msg}");
            ExitCode::from(3)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}

/// Key-value settings from `--config`, consulted wherever a flag is absent.
struct FileSettings(HashMap<String, String>);

impl FileSettings {
    fn load(path: Option<&Path>) -> Result<Self> {
        let mut map = HashMap::new();
        if let Some(path) = path {
            let text = fs::read_to_string(path)?;
            for (idx, line) in text.lines().enumerate() {
                let line = line.trim();
                if line.is_empty() || line.starts_with('#') {
                    continue;
                }
                let (key, value) = line.split_once('=').ok_or(Error::Parse {
                    line: idx + 1,
                    msg: "expected `key = value`".into(),
                })?;
                map.insert(key.trim().to_string(), value.trim().to_string());
            }
        }
        Ok(FileSettings(map))
    }

    /// Flag value if given, else config-file value, else `None`.
    fn get<T: FromStr + Clone>(&self, flag: Option<&T>, key: &str) -> Result<Option<T>>
    where
        T::Err: Display,
    {
        if let Some(v) = flag {
            return Ok(Some(v.clone()));
        }
        match self.0.get(key) {
            Some(raw) => raw
                .parse::<T>()
                .map(Some)
                .map_err(|e| Error::domain(format!("config key `{key}` = `{raw}`: {e}"))),
            None => Ok(None),
        }
    }
}

fn parse_grid(raw: &str, key: &str) -> Result<Vec<f64>> {
    raw.split(',')
        .map(|part| {
            part.trim()
                .parse::<f64>()
                .map_err(|_| Error::domain(format!("{key}: `{part}` is not a number")))
        })
        .collect()
}

fn dispatch(cli: Cli) -> Result<ExitCode> {
    let file = FileSettings::load(cli.config.as_deref())?;
    let mode: EdgeMode =
        file.get(cli.mode.as_ref(), "mode")?.map(|s| s.parse()).transpose()?.unwrap_or_default();
    let out_dir = file.get(cli.out_dir.as_ref(), "out-dir")?.unwrap_or_else(|| PathBuf::from("."));
    fs::create_dir_all(&out_dir)?;
    if let Some(jobs) = file.get(cli.jobs.as_ref(), "jobs")? {
        // Ignore the error if a pool already exists (tests call in-process).
        let _ = rayon::ThreadPoolBuilder::new().num_threads(jobs).build_global();
    }
    let dump_state = file.get(cli.dump_state.as_ref(), "dump-state")?;

    match &cli.command {
        Command::Topology(args) => cmd_topology(args, &file, mode, &out_dir),
        Command::Run(args) => cmd_run(args, &file, mode, &out_dir, dump_state.as_deref()),
        Command::Sweep(args) => cmd_sweep(args, &file, mode, &out_dir),
        Command::Fit(args) => cmd_fit(args, &file, &out_dir),
    }
}

fn cmd_topology(
    args: &TopologyArgs,
    file: &FileSettings,
    mode: EdgeMode,
    out_dir: &Path,
) -> Result<ExitCode> {
    let started = Instant::now();
    let n = file
        .get(args.n.as_ref(), "n")?
        .ok_or_else(|| Error::domain("topology needs --n".to_string()))?;
    let out = file.get(args.out.as_ref(), "out")?.unwrap_or_else(|| out_dir.join("edges.csv"));

    let topo = NetworkTopology::new(n, mode)?;
    let edges = topo.dump_edges();
    write_output(&out, &tables::edges_csv(&edges))?;
    println!("wrote {} edges ({} vertices, mode {mode}) to {}", edges.len(), 1u64 << n, out.display());

    let params = vec![
        ("n".to_string(), n.to_string()),
        ("mode".to_string(), mode.to_string()),
        ("out".to_string(), out.display().to_string()),
    ];
    append_manifest(out_dir, "topology", &params, &[&out], started)?;
    Ok(ExitCode::SUCCESS)
}

/// Shared run parameters of `run` and the sweep templates.
struct RunSettings {
    method: Method,
    n: u32,
    k0: usize,
    epsilon: f64,
    tulsi: TulsiParams,
    tmax: Option<usize>,
}

fn resolve_run_settings(
    file: &FileSettings,
    method: Option<&String>,
    n: Option<&u32>,
    default_n: Option<u32>,
    k0: Option<&usize>,
    epsilon: Option<&f64>,
    cos_delta: Option<&f64>,
    c: Option<&f64>,
    delta_rule: Option<&String>,
    tmax: Option<&usize>,
) -> Result<RunSettings> {
    let method: Method = file
        .get(method, "method")?
        .map(|s| s.parse())
        .transpose()?
        .ok_or_else(|| Error::domain("missing --method".to_string()))?;
    let n = file
        .get(n, "n")?
        .or(default_n)
        .ok_or_else(|| Error::domain("missing --n".to_string()))?;
    let k0 = file.get(k0, "k0")?.unwrap_or(crate::search::DEFAULT_K0);
    let epsilon = file.get(epsilon, "epsilon")?.unwrap_or(1.0);
    let tmax = file.get(tmax, "tmax")?;

    let cos_delta = file.get(cos_delta, "cos-delta")?;
    let c = file.get(c, "c")?;
    let rule_name = file.get(delta_rule, "delta-rule")?;
    let tulsi = match (cos_delta, rule_name.as_deref()) {
        (Some(value), None | Some("explicit")) => TulsiParams::explicit_cos(value)?,
        (Some(_), Some(other)) => {
            return Err(Error::domain(format!(
                "--cos-delta conflicts with --delta-rule {other}"
            )))
        }
        (None, rule) => {
            let rule = match rule.unwrap_or("inv-log") {
                "inv-log" => CosDeltaRule::InvLog,
                "inv-sqrt-log" => CosDeltaRule::InvSqrtLog,
                "explicit" => {
                    return Err(Error::domain(
                        "--delta-rule explicit needs --cos-delta".to_string(),
                    ))
                }
                other => {
                    return Err(Error::domain(format!("unknown delta rule `{other}`")))
                }
            };
            TulsiParams::with_scale(rule, c.unwrap_or(1.0))?
        }
    };
    Ok(RunSettings { method, n, k0, epsilon, tulsi, tmax })
}

fn build_config(settings: &RunSettings, mode: EdgeMode) -> SearchConfig {
    let mut config = SearchConfig::new(settings.method, settings.n, settings.epsilon, mode);
    config.k0 = settings.k0;
    config.tulsi = settings.tulsi;
    if let Some(tmax) = settings.tmax {
        config.t_max = tmax;
        config.peak = PeakParams::for_horizon(tmax);
    }
    config
}

fn run_params(config: &SearchConfig, mode: EdgeMode) -> Vec<(String, String)> {
    let mut params = vec![
        ("method".to_string(), config.method.to_string()),
        ("mode".to_string(), mode.to_string()),
        ("n".to_string(), config.n.to_string()),
        ("k0".to_string(), config.k0.to_string()),
        ("epsilon".to_string(), config.epsilon.to_string()),
        ("tmax".to_string(), config.t_max.to_string()),
    ];
    if let Some(cos_delta) = config.cos_delta() {
        params.push(("cos-delta".to_string(), cos_delta.to_string()));
    }
    params
}

fn cmd_run(
    args: &RunArgs,
    file: &FileSettings,
    mode: EdgeMode,
    out_dir: &Path,
    dump_state: Option<&Path>,
) -> Result<ExitCode> {
    let started = Instant::now();
    let settings = resolve_run_settings(
        file,
        args.method.as_ref(),
        args.n.as_ref(),
        None,
        args.k0.as_ref(),
        args.epsilon.as_ref(),
        args.cos_delta.as_ref(),
        args.c.as_ref(),
        args.delta_rule.as_ref(),
        args.tmax.as_ref(),
    )?;
    let config = build_config(&settings, mode);
    let series_out =
        file.get(args.series_out.as_ref(), "series-out")?.unwrap_or_else(|| out_dir.join("series.csv"));
    let report_out =
        file.get(args.report_out.as_ref(), "report-out")?.unwrap_or_else(|| out_dir.join("report.csv"));

    let (series, state) = run_walk(&config)?;
    write_output(&series_out, &tables::series_csv(&series))?;
    if let Some(path) = dump_state {
        write_output(path, &tables::state_csv(&state))?;
    }

    let mut params = run_params(&config, mode);
    params.push(("series-out".to_string(), series_out.display().to_string()));

    let report = match detect_first_peak(&series, &config.peak) {
        Ok(report) => report,
        Err(e) => {
            // Series stays on disk; the missing peak maps to exit status 3.
            println!("series written to {}", series_out.display());
            append_manifest(out_dir, "run", &params, &[&series_out], started)?;
            return Err(e);
        }
    };
    write_output(&report_out, &tables::report_csv(&config, &report))?;
    params.push(("report-out".to_string(), report_out.display().to_string()));

    let cost = evaluate_cost(&report);
    println!(
        "method={} mode={mode} n={} N={} k0={} epsilon={}",
        config.method,
        config.n,
        config.num_vertices(),
        config.k0,
        config.epsilon
    );
    println!("t_f = {}  p_f = {}", report.t_f, report.p_f);
    println!(
        "cost_single = {}  cost_total = {}  repetitions ~ {}",
        cost.cost_single, cost.cost_total, cost.repetitions_estimate
    );
    println!("series written to {}", series_out.display());
    println!("report written to {}", report_out.display());

    append_manifest(out_dir, "run", &params, &[&series_out, &report_out], started)?;
    Ok(ExitCode::SUCCESS)
}

fn cmd_sweep(
    args: &SweepArgs,
    file: &FileSettings,
    mode: EdgeMode,
    out_dir: &Path,
) -> Result<ExitCode> {
    let started = Instant::now();
    let variable: SweepVariable = file
        .get(args.variable.as_ref(), "variable")?
        .map(|s| s.parse())
        .transpose()?
        .ok_or_else(|| Error::domain("missing --variable".to_string()))?;

    // Epsilon/delta sweeps hold the size fixed (default n = 9); size sweeps
    // derive per-point horizons, so the template size is a placeholder.
    let default_n = Some(if variable == SweepVariable::Size { 5 } else { 9 });
    let settings = resolve_run_settings(
        file,
        args.method.as_ref(),
        args.n.as_ref(),
        default_n,
        args.k0.as_ref(),
        args.epsilon.as_ref(),
        args.cos_delta.as_ref(),
        args.c.as_ref(),
        args.delta_rule.as_ref(),
        None,
    )?;
    let template = build_config(&settings, mode);

    let n_min = file.get(args.n_min.as_ref(), "n-min")?;
    let n_max = file.get(args.n_max.as_ref(), "n-max")?;
    let n_range = match (n_min, n_max) {
        (None, None) => default_n_range(),
        (lo, hi) => {
            let lo = lo.unwrap_or(5);
            let hi = hi.unwrap_or(12);
            if lo > hi {
                return Err(Error::domain(format!("empty size range {lo}..={hi}")));
            }
            (lo..=hi).collect()
        }
    };
    let epsilon_grid = match file.get(args.epsilon_grid.as_ref(), "epsilon-grid")? {
        Some(raw) => parse_grid(&raw, "epsilon-grid")?,
        None => default_epsilon_grid(),
    };
    let c_grid = match file.get(args.c_grid.as_ref(), "c-grid")? {
        Some(raw) => parse_grid(&raw, "c-grid")?,
        None => default_c_grid(),
    };

    let spec = SweepSpec { variable, n_range, epsilon_grid, c_grid, template };
    let rows = sweep(&spec)?;
    let out = file.get(args.out.as_ref(), "out")?.unwrap_or_else(|| out_dir.join("sweep.csv"));
    write_output(&out, &tables::sweep_csv(&rows))?;

    let flagged = rows.iter().filter(|row| row.report.is_none()).count();
    println!("wrote {} rows to {} ({flagged} flagged no_peak)", rows.len(), out.display());

    let mut params = run_params(&spec.template, mode);
    params.retain(|(k, _)| k != "tmax"); // per-point horizons
    params.push(("variable".to_string(), variable.to_string()));
    match variable {
        SweepVariable::Size => {
            params.push(("n-min".to_string(), spec.n_range[0].to_string()));
            params.push(("n-max".to_string(), spec.n_range[spec.n_range.len() - 1].to_string()));
        }
        SweepVariable::Epsilon => {
            let grid: Vec<String> = spec.epsilon_grid.iter().map(|x| x.to_string()).collect();
            params.push(("epsilon-grid".to_string(), grid.join(",")));
        }
        SweepVariable::Delta => {
            let grid: Vec<String> = spec.c_grid.iter().map(|x| x.to_string()).collect();
            params.push(("c-grid".to_string(), grid.join(",")));
        }
    }
    params.push(("out".to_string(), out.display().to_string()));
    append_manifest(out_dir, "sweep", &params, &[&out], started)?;

    Ok(if flagged == 0 { ExitCode::SUCCESS } else { ExitCode::from(3) })
}

fn cmd_fit(args: &FitArgs, file: &FileSettings, out_dir: &Path) -> Result<ExitCode> {
    let started = Instant::now();
    let input = file.get(args.input.as_ref(), "input")?.unwrap_or_else(|| out_dir.join("sweep.csv"));
    let x_col = file.get(args.x.as_ref(), "x")?.unwrap_or_else(|| "N".to_string());
    let y_col = file
        .get(args.y.as_ref(), "y")?
        .ok_or_else(|| Error::domain("missing --y (e.g. p_f, cost_single, cost_total)".to_string()))?;
    let min_n = file.get(args.min_n.as_ref(), "min-n")?.unwrap_or(crate::analysis::FIT_MIN_LEVELS);
    let out = file.get(args.out.as_ref(), "out")?.unwrap_or_else(|| out_dir.join("fit.csv"));

    let table = tables::parse_csv(&fs::read_to_string(&input)?)?;
    let xi = table.column_index(&x_col)?;
    let yi = table.column_index(&y_col)?;
    let status = table.column_index("status").ok();
    let ni = table.column_index("n").ok();

    let mut points = Vec::with_capacity(table.rows.len());
    for (line, fields) in &table.rows {
        if let Some(si) = status {
            if fields[si] != "ok" {
                continue;
            }
        }
        if let Some(ni) = ni {
            if (tables::parse_field(&fields[ni], *line)? as u32) < min_n {
                continue;
            }
        }
        points.push((
            tables::parse_field(&fields[xi], *line)?,
            tables::parse_field(&fields[yi], *line)?,
        ));
    }
    let fit = fit_powerlaw(&points)?;
    write_output(&out, &tables::fit_csv(&fit))?;
    println!(
        "fit {y_col} ~ {} * {x_col}^{} (r^2 = {}, {} points) written to {}",
        fit.prefactor,
        fit.exponent,
        fit.r_squared,
        fit.points_used,
        out.display()
    );

    let params = vec![
        ("input".to_string(), input.display().to_string()),
        ("x".to_string(), x_col),
        ("y".to_string(), y_col),
        ("min-n".to_string(), min_n.to_string()),
        ("out".to_string(), out.display().to_string()),
    ];
    append_manifest(out_dir, "fit", &params, &[&out], started)?;
    Ok(ExitCode::SUCCESS)
}

fn write_output(path: &Path, text: &str) -> Result<()> {
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            fs::create_dir_all(parent)?;
        }
    }
    fs::write(path, text)?;
    Ok(())
}

fn csv_quote(field: &str) -> String {
    if field.contains([',', '"', '\n']) {
        format!("\"{}\"", field.replace('"', "\"\""))
    } else {
        field.to_string()
    }
}

/// One manifest row per command invocation; the params field is a space
/// joined `key=value` list that can be replayed as a config file.
fn append_manifest(
    out_dir: &Path,
    command: &str,
    params: &[(String, String)],
    outputs: &[&Path],
    started: Instant,
) -> Result<()> {
    let path = out_dir.join("manifest.csv");
    let mut body = if path.exists() {
        fs::read_to_string(&path)?
    } else {
        "command,version,params,outputs,duration_ms\n".to_string()
    };
    let params: Vec<String> = params.iter().map(|(k, v)| format!("{k}={v}")).collect();
    let outputs: Vec<String> = outputs.iter().map(|p| p.display().to_string()).collect();
    body.push_str(&format!(
        "{command},{},{},{},{}\n",
        env!("CARGO_PKG_VERSION"),
        csv_quote(&params.join(" ")),
        csv_quote(&outputs.join(";")),
        started.elapsed().as_millis(),
    ));
    fs::write(&path, body)?;
    Ok(())
}

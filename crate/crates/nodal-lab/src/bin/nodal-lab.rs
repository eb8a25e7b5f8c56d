//! Batch driver: configuration, experiment orchestration, CSV/JSON
//! reporting. Logs go to standard error, data to files; exit codes:
//! 0 success, 1 configuration error, 2 every mode failed.

use clap::Parser;
use nodal_lab::continuation::{growth_profile, ContinuationParams};
use nodal_lab::counting::{write_csv, CountOptions, CountRecord};
use nodal_lab::experiments::{diagnostics_json, disc_family, ellipse_family, run_counting};
use nodal_lab::geometry::AnalyticCurve;
use nodal_lab::modes::{disc_mode, load_trace, BoundaryCondition, EigenMode, Parity};
use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::str::FromStr;

#[derive(Parser, Debug)]
#[command(
    name = "nodal-lab",
    about = "Boundary nodal-point laboratory: counting and continuation experiments on analytic plane domains"
)]
struct Cli {
    /// Flat key=value configuration file; flags override file keys.
    #[arg(long)]
    config: Option<PathBuf>,
    /// disc-scan | ellipse-scan | continue | count | goodness | report
    #[arg(long)]
    experiment: Option<String>,
    /// Output path for the CSV (a .json diagnostics sidecar is written next
    /// to it).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Annulus half-width for complex counting / growth scans.
    #[arg(long)]
    epsilon: Option<f64>,
    /// Angular index range A:B.
    #[arg(long, value_name = "A:B")]
    m_range: Option<String>,
    /// Radial index range A:B.
    #[arg(long, value_name = "A:B")]
    n_range: Option<String>,
    /// neumann | dirichlet
    #[arg(long)]
    bc: Option<String>,
    /// sin | cos
    #[arg(long)]
    parity: Option<String>,
    /// Ellipse eccentricity parameter a in (0, 1).
    #[arg(long)]
    ecc: Option<f64>,
    /// Worker threads (falls back to NODAL_LAB_THREADS, then all cores).
    #[arg(long)]
    threads: Option<usize>,
    /// Multiplies every quadrature/grid density.
    #[arg(long)]
    resolution_scale: Option<f64>,
    /// Boundary curve file (Fourier coefficient exchange format).
    #[arg(long)]
    curve_file: Option<PathBuf>,
    /// Boundary trace file ("lambda bc N" header).
    #[arg(long)]
    trace_file: Option<PathBuf>,
    /// Interior curve radius for the goodness experiment.
    #[arg(long)]
    interior_radius: Option<f64>,
}

#[derive(Debug)]
struct ConfigError {
    field: String,
    message: String,
}

impl ConfigError {
    fn new(field: &str, message: impl Into<String>) -> Self {
        ConfigError {
            field: field.into(),
            message: message.into(),
        }
    }
}

impl std::fmt::Display for ConfigError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "config error in '{}': {}", self.field, self.message)
    }
}

#[derive(Debug, Clone)]
struct Config {
    experiment: String,
    out: PathBuf,
    epsilon: f64,
    m_range: (u32, u32),
    n_range: (u32, u32),
    bc: BoundaryCondition,
    parity: Parity,
    ecc: f64,
    threads: Option<usize>,
    resolution_scale: f64,
    curve_file: Option<PathBuf>,
    trace_file: Option<PathBuf>,
    interior_radius: f64,
}

fn parse_range(field: &str, text: &str) -> Result<(u32, u32), ConfigError> {
    let mut it = text.split(':');
    let a = it
        .next()
        .and_then(|v| v.trim().parse::<u32>().ok())
        .ok_or_else(|| ConfigError::new(field, format!("expected A:B, got '{text}'")))?;
    let b = it
        .next()
        .and_then(|v| v.trim().parse::<u32>().ok())
        .ok_or_else(|| ConfigError::new(field, format!("expected A:B, got '{text}'")))?;
    if it.next().is_some() || b < a {
        return Err(ConfigError::new(field, format!("bad range '{text}'")));
    }
    Ok((a, b))
}

fn read_config_file(path: &Path) -> Result<BTreeMap<String, String>, ConfigError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| ConfigError::new("config", format!("cannot read {}: {e}", path.display())))?;
    let mut map = BTreeMap::new();
    for (idx, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (k, v) = line.split_once('=').ok_or_else(|| {
            ConfigError::new("config", format!("line {}: expected key=value", idx + 1))
        })?;
        map.insert(k.trim().to_string(), v.trim().to_string());
    }
    Ok(map)
}

fn build_config(cli: &Cli) -> Result<Config, ConfigError> {
    let file = match &cli.config {
        Some(p) => read_config_file(p)?,
        None => BTreeMap::new(),
    };
    let get = |key: &str| file.get(key).cloned();

    let experiment = cli
        .experiment
        .clone()
        .or_else(|| get("experiment"))
        .ok_or_else(|| {
            ConfigError::new("experiment", "missing (flag --experiment or config key)")
        })?;
    let known = [
        "disc-scan",
        "ellipse-scan",
        "continue",
        "count",
        "goodness",
        "report",
    ];
    if !known.contains(&experiment.as_str()) {
        return Err(ConfigError::new(
            "experiment",
            format!("unknown experiment '{experiment}' (expected one of {known:?})"),
        ));
    }
    let out = cli
        .out
        .clone()
        .or_else(|| get("out").map(PathBuf::from))
        .ok_or_else(|| ConfigError::new("out", "missing output path"))?;
    let epsilon = match (cli.epsilon, get("epsilon")) {
        (Some(v), _) => v,
        (None, Some(v)) => v
            .parse()
            .map_err(|e| ConfigError::new("epsilon", format!("{e}")))?,
        (None, None) => 0.05,
    };
    let m_range = match (&cli.m_range, get("m_range")) {
        (Some(v), _) => parse_range("m_range", v)?,
        (None, Some(v)) => parse_range("m_range", &v)?,
        (None, None) => (1, 5),
    };
    let n_range = match (&cli.n_range, get("n_range")) {
        (Some(v), _) => parse_range("n_range", v)?,
        (None, Some(v)) => parse_range("n_range", &v)?,
        (None, None) => (1, 1),
    };
    let bc = match (&cli.bc, get("bc")) {
        (Some(v), _) => {
            BoundaryCondition::from_str(v).map_err(|e| ConfigError::new("bc", format!("{e}")))?
        }
        (None, Some(v)) => {
            BoundaryCondition::from_str(&v).map_err(|e| ConfigError::new("bc", format!("{e}")))?
        }
        (None, None) => BoundaryCondition::Neumann,
    };
    let parity = match (&cli.parity, get("parity")) {
        (Some(v), _) => {
            Parity::from_str(v).map_err(|e| ConfigError::new("parity", format!("{e}")))?
        }
        (None, Some(v)) => {
            Parity::from_str(&v).map_err(|e| ConfigError::new("parity", format!("{e}")))?
        }
        (None, None) => Parity::Sin,
    };
    let ecc = match (cli.ecc, get("ecc")) {
        (Some(v), _) => v,
        (None, Some(v)) => v
            .parse()
            .map_err(|e| ConfigError::new("ecc", format!("{e}")))?,
        (None, None) => 0.05,
    };
    let threads = match (cli.threads, get("threads")) {
        (Some(v), _) => Some(v),
        (None, Some(v)) => Some(
            v.parse()
                .map_err(|e| ConfigError::new("threads", format!("{e}")))?,
        ),
        (None, None) => std::env::var("NODAL_LAB_THREADS")
            .ok()
            .and_then(|v| v.parse().ok()),
    };
    let resolution_scale = match (cli.resolution_scale, get("resolution_scale")) {
        (Some(v), _) => v,
        (None, Some(v)) => v
            .parse()
            .map_err(|e| ConfigError::new("resolution_scale", format!("{e}")))?,
        (None, None) => 1.0,
    };
    let curve_file = cli
        .curve_file
        .clone()
        .or_else(|| get("curve_file").map(PathBuf::from));
    let trace_file = cli
        .trace_file
        .clone()
        .or_else(|| get("trace_file").map(PathBuf::from));
    let interior_radius = match (cli.interior_radius, get("interior_radius")) {
        (Some(v), _) => v,
        (None, Some(v)) => v
            .parse()
            .map_err(|e| ConfigError::new("interior_radius", format!("{e}")))?,
        (None, None) => 0.5,
    };

    // field-level validation
    if !(epsilon >= 0.0) {
        return Err(ConfigError::new("epsilon", "must be nonnegative"));
    }
    if !(ecc > 0.0 && ecc < 1.0) && experiment == "ellipse-scan" {
        return Err(ConfigError::new("ecc", "must lie in (0, 1)"));
    }
    if !(resolution_scale > 0.0) {
        return Err(ConfigError::new("resolution_scale", "must be positive"));
    }
    if !(interior_radius > 0.0 && interior_radius < 1.0) && experiment == "goodness" {
        return Err(ConfigError::new("interior_radius", "must lie in (0, 1)"));
    }
    Ok(Config {
        experiment,
        out,
        epsilon,
        m_range,
        n_range,
        bc,
        parity,
        ecc,
        threads,
        resolution_scale,
        curve_file,
        trace_file,
        interior_radius,
    })
}

fn boundary_curve(cfg: &Config) -> Result<AnalyticCurve, ConfigError> {
    match &cfg.curve_file {
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|e| {
                ConfigError::new("curve_file", format!("cannot read {}: {e}", path.display()))
            })?;
            AnalyticCurve::from_text(&text)
                .map_err(|e| ConfigError::new("curve_file", format!("{e}")))
        }
        None => Ok(AnalyticCurve::circle(1.0)),
    }
}

fn check_epsilon(cfg: &Config, curve: &AnalyticCurve) -> Result<(), ConfigError> {
    if cfg.epsilon >= curve.margin() {
        return Err(ConfigError::new(
            "epsilon",
            format!(
                "{} exceeds the curve's analyticity margin {}",
                cfg.epsilon,
                curve.margin()
            ),
        ));
    }
    Ok(())
}

fn sidecar_path(out: &Path) -> PathBuf {
    let mut p = out.to_path_buf();
    p.set_extension("json");
    p
}

fn write_outputs(
    cfg: &Config,
    records: &[CountRecord],
    diags_json: &str,
) -> Result<(), std::io::Error> {
    std::fs::write(&cfg.out, write_csv(records))?;
    std::fs::write(sidecar_path(&cfg.out), diags_json)?;
    Ok(())
}

fn load_mode(cfg: &Config) -> Result<EigenMode, ConfigError> {
    match &cfg.trace_file {
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|e| {
                ConfigError::new("trace_file", format!("cannot read {}: {e}", path.display()))
            })?;
            load_trace(&text).map_err(|e| ConfigError::new("trace_file", format!("{e}")))
        }
        None => disc_mode(cfg.m_range.0, cfg.n_range.0, cfg.bc, cfg.parity)
            .map_err(|e| ConfigError::new("m_range", format!("{e}"))),
    }
}

fn run(cfg: &Config) -> Result<u8, String> {
    let params = ContinuationParams::default();
    let opts_base = CountOptions {
        epsilon: cfg.epsilon,
        with_complex: cfg.epsilon > 0.0,
        with_critical: true,
        with_goodness: None,
        params: params.clone(),
        resolution_scale: cfg.resolution_scale,
    };
    match cfg.experiment.as_str() {
        "disc-scan" | "count" | "report" | "goodness" => {
            let curve = boundary_curve(cfg).map_err(|e| e.to_string())?;
            check_epsilon(cfg, &curve).map_err(|e| e.to_string())?;
            let family = disc_family(cfg.m_range, cfg.n_range, cfg.bc, cfg.parity)
                .map_err(|e| format!("family construction: {e}"))?;
            let mut opts = opts_base.clone();
            if cfg.experiment == "goodness" || cfg.experiment == "report" {
                opts.with_goodness = Some(AnalyticCurve::circle(cfg.interior_radius));
            }
            if cfg.experiment == "goodness" {
                opts.with_complex = false;
            }
            let (records, diags) = run_counting(&family, &opts);
            write_outputs(cfg, &records, &diagnostics_json(&diags))
                .map_err(|e| format!("writing outputs: {e}"))?;
            let failed = records.iter().filter(|r| r.status != "ok").count();
            eprintln!(
                "{}: {} modes, {} failed -> {}",
                cfg.experiment,
                records.len(),
                failed,
                cfg.out.display()
            );
            Ok(if failed == records.len() && !records.is_empty() {
                2
            } else {
                0
            })
        }
        "ellipse-scan" => {
            let family = ellipse_family(cfg.ecc, cfg.m_range, cfg.n_range, cfg.bc, cfg.parity)
                .map_err(|e| format!("ellipse family: {e}"))?;
            let mut opts = opts_base.clone();
            opts.with_complex = false; // lambda and real counts on the ellipse
            let (records, diags) = run_counting(&family, &opts);
            write_outputs(cfg, &records, &diagnostics_json(&diags))
                .map_err(|e| format!("writing outputs: {e}"))?;
            let failed = records.iter().filter(|r| r.status != "ok").count();
            eprintln!(
                "ellipse-scan: {} modes, {} failed -> {}",
                records.len(),
                failed,
                cfg.out.display()
            );
            Ok(if failed == records.len() && !records.is_empty() {
                2
            } else {
                0
            })
        }
        "continue" => {
            let curve = boundary_curve(cfg).map_err(|e| e.to_string())?;
            check_epsilon(cfg, &curve).map_err(|e| e.to_string())?;
            let mode = load_mode(cfg).map_err(|e| e.to_string())?;
            let profile = growth_profile(
                &curve,
                &mode,
                cfg.epsilon,
                (24.0 * cfg.resolution_scale) as usize,
                (8.0 * cfg.resolution_scale) as usize,
                cfg.epsilon * 0.4,
                &params,
            )
            .map_err(|e| format!("growth profile: {e}"))?;
            let max_log = profile
                .rows
                .iter()
                .map(|r| r.1)
                .fold(f64::NEG_INFINITY, f64::max);
            #[derive(serde::Serialize)]
            struct ContinueReport {
                mode_id: String,
                lambda: f64,
                epsilon: f64,
                max_log_mod: f64,
                fitted_rate: f64,
                rows: Vec<(f64, f64)>,
            }
            let report = ContinueReport {
                mode_id: mode.id(),
                lambda: mode.lambda,
                epsilon: cfg.epsilon,
                max_log_mod: max_log,
                fitted_rate: profile.fitted_rate,
                rows: profile.rows.clone(),
            };
            std::fs::write(
                &cfg.out,
                serde_json::to_string_pretty(&report).expect("report serialize"),
            )
            .map_err(|e| format!("writing {}: {e}", cfg.out.display()))?;
            eprintln!(
                "continue: lambda = {}, max log|u| = {max_log:.6} -> {}",
                mode.lambda,
                cfg.out.display()
            );
            Ok(0)
        }
        other => Err(format!("unhandled experiment {other}")),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let cfg = match build_config(&cli) {
        Ok(cfg) => cfg,
        Err(e) => {
            eprintln!("{e}");
            return ExitCode::from(1);
        }
    };
    if let Some(threads) = cfg.threads {
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global();
    }
    match run(&cfg) {
        Ok(code) => ExitCode::from(code),
        Err(message) => {
            eprintln!("{message}");
            ExitCode::from(2)
        }
    }
}

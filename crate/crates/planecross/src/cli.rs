//! Command-line front end.

use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use planecross_core::crossings::count_crossings_grid;
use planecross_core::geometry::{ProjectionPlane, SpherePoint, Vec3};
use planecross_core::seeding::STREAM_GRAPH;
use planecross_core::theory::{
    admissible_alpha_window, expected_crossings, expected_crossings_kernel, radius_for_regime,
    RegimeSpec, LOG_REGIME_EXPONENT_LIMIT,
};
use planecross_core::{BallWindow, ModelConstants};
use serde::Serialize;

use crate::config::{parse_plane, parse_region, ExperimentConfig};
use crate::error::{ConfigError, RunError};
use crate::experiments::{
    replication_graph, run_distribution, run_existence_scan, run_find_plane, run_two_plane,
};
use crate::output::{render_text, write_dump, write_outputs, Format, SuiteReport};
use crate::selftest;

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_SELFTEST: i32 = 3;

#[derive(Debug, Parser)]
#[command(
    name = "planecross",
    version,
    about = "Crossings of random geometric graphs projected onto planes"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Print the model constants, and the radius and mean for a regime.
    Theory(TheoryArgs),
    /// Crossing-count law on one plane.
    Distribution(SuiteArgs),
    /// Covariance of the counts on two planes.
    TwoPlane(SuiteArgs),
    /// Number of uniform planes drawn until one has no crossing.
    FindPlane(SuiteArgs),
    /// Scan a grid of planes for crossing-free directions.
    ExistenceScan(SuiteArgs),
    /// Run the built-in oracle and invariance checks.
    Selftest(SelftestArgs),
}

#[derive(Debug, Args)]
struct RegimeArgs {
    /// Intensity of the Poisson process.
    #[arg(long)]
    t: Option<f64>,
    /// Constant regime: t²r⁴ = C.
    #[arg(long = "c-const", value_name = "C", conflicts_with = "c_log")]
    c_const: Option<f64>,
    /// Log regime: r = (C' ln t / t⁴)^(1/8).
    #[arg(long = "c-log", value_name = "C'")]
    c_log: Option<f64>,
}

impl RegimeArgs {
    fn regime(&self) -> Result<Option<RegimeSpec>, ConfigError> {
        let spec = match (self.c_const, self.c_log) {
            (Some(c), None) => RegimeSpec::Constant(c),
            (None, Some(c)) => RegimeSpec::Log(c),
            (None, None) => return Ok(None),
            (Some(_), Some(_)) => {
                return Err(ConfigError::invalid(
                    "--c-const",
                    "cannot be combined with --c-log",
                ));
            }
        };
        spec.validate()
            .map_err(|e| ConfigError::invalid(flag_of(&spec), e.to_string()))?;
        Ok(Some(spec))
    }
}

fn flag_of(spec: &RegimeSpec) -> &'static str {
    match spec {
        RegimeSpec::Constant(_) => "--c-const",
        RegimeSpec::Log(_) => "--c-log",
    }
}

#[derive(Debug, Args)]
struct TheoryArgs {
    #[command(flatten)]
    regime: RegimeArgs,
    /// text or json.
    #[arg(long, default_value = "text")]
    format: Format,
}

#[derive(Debug, Args)]
struct SuiteArgs {
    /// Key-value config file; flags override its entries.
    #[arg(long, value_name = "FILE")]
    config: Option<PathBuf>,
    #[command(flatten)]
    regime: RegimeArgs,
    /// Number of replications.
    #[arg(long)]
    reps: Option<u64>,
    /// Master seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Normal of the projection plane.
    #[arg(long, value_name = "X,Y,Z")]
    plane: Option<String>,
    /// Spherical separation of the two normals, in radians.
    #[arg(long, value_name = "RADIANS")]
    sep: Option<f64>,
    /// Grid resolution g (g × g planes).
    #[arg(long, value_name = "N")]
    grid: Option<usize>,
    /// Planes drawn before a replication is censored.
    #[arg(long = "max-planes", value_name = "M")]
    max_planes: Option<u32>,
    /// Count only crossings in this region of the plane.
    #[arg(long, value_name = "disk:R|rect:A,B,C,D")]
    region: Option<String>,
    /// Two-plane suite: independent graph for the second plane.
    #[arg(long)]
    control: bool,
    /// Accept configurations with t·r³ ≥ 0.1.
    #[arg(long = "allow-dense")]
    allow_dense: bool,
    /// Allow --radius.
    #[arg(long = "unsafe")]
    unsafe_: bool,
    /// Connection radius, bypassing the regime.
    #[arg(long, requires = "unsafe_")]
    radius: Option<f64>,
    /// Output directory.
    #[arg(long, value_name = "DIR")]
    out: Option<PathBuf>,
    /// Record format: csv, json, or text (summary only).
    #[arg(long)]
    format: Option<Format>,
    /// Worker threads; results do not depend on it.
    #[arg(long)]
    jobs: Option<usize>,
    /// Distribution suite: also dump the graph and crossings of this replication.
    #[arg(long, value_name = "REP", requires = "out")]
    dump: Option<u64>,
}

#[derive(Debug, Args)]
struct SelftestArgs {
    /// Multiplies the number of random instances.
    #[arg(long, default_value_t = 1)]
    scale: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Suite {
    Distribution,
    TwoPlane,
    FindPlane,
    ExistenceScan,
}

#[derive(Debug, Clone, PartialEq)]
#[allow(clippy::large_enum_variant)]
pub enum Action {
    Theory {
        t: Option<f64>,
        regime: Option<RegimeSpec>,
        format: Format,
    },
    Suite {
        suite: Suite,
        config: ExperimentConfig,
        out: Option<PathBuf>,
        format: Format,
        jobs: Option<usize>,
        dump: Option<u64>,
    },
    Selftest {
        scale: usize,
    },
}

/// A validated command line.
#[derive(Debug, Clone, PartialEq)]
pub struct CliInvocation {
    pub action: Action,
    pub warnings: Vec<String>,
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Usage(#[from] clap::Error),
    #[error(transparent)]
    Config(#[from] ConfigError),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(e) if !e.use_stderr() => EXIT_OK,
            _ => EXIT_CONFIG,
        }
    }
}

/// Parses and validates `argv` (including the program name). No sampling
/// happens here.
pub fn parse_args<I, S>(argv: I) -> Result<CliInvocation, CliError>
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let cli = Cli::try_parse_from(argv)?;
    let mut warnings = Vec::new();
    let action = match cli.command {
        Command::Theory(a) => {
            let regime = a.regime.regime()?;
            if let Some(t) = a.regime.t {
                if let Some(spec) = regime {
                    radius_for_regime(t, spec)
                        .map_err(|e| ConfigError::invalid("--t", e.to_string()))?;
                }
            }
            Action::Theory {
                t: a.regime.t,
                regime,
                format: a.format,
            }
        }
        Command::Selftest(a) => Action::Selftest {
            scale: a.scale.max(1),
        },
        Command::Distribution(a) => suite_action(Suite::Distribution, a, &mut warnings)?,
        Command::TwoPlane(a) => suite_action(Suite::TwoPlane, a, &mut warnings)?,
        Command::FindPlane(a) => suite_action(Suite::FindPlane, a, &mut warnings)?,
        Command::ExistenceScan(a) => suite_action(Suite::ExistenceScan, a, &mut warnings)?,
    };
    Ok(CliInvocation { action, warnings })
}

fn suite_action(
    suite: Suite,
    a: SuiteArgs,
    warnings: &mut Vec<String>,
) -> Result<Action, CliError> {
    let regime = a.regime.regime()?;
    let mut cfg = match &a.config {
        Some(path) => {
            let mut cfg = ExperimentConfig::load(path)?;
            if let Some(t) = a.regime.t {
                cfg.t = t;
            }
            if let Some(spec) = regime {
                cfg.regime = spec;
            }
            cfg
        }
        None => {
            let t = a
                .regime
                .t
                .ok_or_else(|| ConfigError::invalid("--t", "required (or give --config)"))?;
            let spec = regime.ok_or_else(|| {
                ConfigError::invalid("--c-const", "one of --c-const or --c-log is required")
            })?;
            ExperimentConfig::new(t, spec)
        }
    };
    if let Some(n) = a.reps {
        cfg.replications = n;
    }
    if let Some(s) = a.seed {
        cfg.master_seed = s;
    }
    if let Some(p) = &a.plane {
        cfg.plane = Some(parse_plane(p).map_err(|e| rename(e, "--plane"))?);
    }
    if let Some(s) = a.sep {
        cfg.separation = Some(s);
    }
    if let Some(g) = a.grid {
        cfg.grid_resolution = Some(g);
    }
    if let Some(m) = a.max_planes {
        cfg.max_planes = Some(m);
    }
    if let Some(r) = &a.region {
        cfg.region = Some(parse_region(r).map_err(|e| rename(e, "--region"))?);
    }
    cfg.control |= a.control;
    cfg.allow_dense |= a.allow_dense;
    if let Some(r) = a.radius {
        cfg.radius = Some(r);
    }
    if a.jobs == Some(0) {
        return Err(ConfigError::invalid("--jobs", "must be at least 1").into());
    }
    if a.dump.is_some() && suite != Suite::Distribution {
        return Err(
            ConfigError::invalid("--dump", "only the distribution suite dumps graphs").into(),
        );
    }
    if let Some(rep) = a.dump {
        if rep >= cfg.replications {
            return Err(ConfigError::invalid(
                "--dump",
                format!("replication {rep} is not below --reps"),
            )
            .into());
        }
    }
    cfg.validate().map_err(rename_config_key)?;
    match suite {
        Suite::TwoPlane if cfg.separation.is_none() => {
            return Err(ConfigError::invalid("--sep", "required for the two-plane suite").into());
        }
        Suite::FindPlane if !matches!(cfg.regime, RegimeSpec::Constant(_)) => {
            return Err(ConfigError::invalid(
                "--c-const",
                "the find-plane suite needs the constant regime",
            )
            .into());
        }
        Suite::ExistenceScan => match cfg.regime.log_exponent(&cfg.window()) {
            Some(c) if c >= LOG_REGIME_EXPONENT_LIMIT => warnings.push(format!(
                "--c-log {} implies c = {c:.5} ≥ 1/8, outside the proven existence regime",
                cfg.regime.parameter()
            )),
            None => warnings.push("existence scan outside the log regime".to_string()),
            _ => {}
        },
        _ => {}
    }
    let format = a.format.unwrap_or(if a.out.is_some() {
        Format::Csv
    } else {
        Format::Text
    });
    Ok(Action::Suite {
        suite,
        config: cfg,
        out: a.out,
        format,
        jobs: a.jobs,
        dump: a.dump,
    })
}

fn rename(e: ConfigError, flag: &str) -> ConfigError {
    match e {
        ConfigError::Invalid { message, .. } => ConfigError::invalid(flag, message),
        other => other,
    }
}

// Config keys that have a differently named flag.
fn rename_config_key(e: ConfigError) -> ConfigError {
    let flag = |key: &str| match key {
        "t" => "--t",
        "regime" => "--c-const/--c-log",
        "replications" => "--reps",
        "separation" => "--sep",
        "grid_resolution" => "--grid",
        "max_planes" => "--max-planes",
        "region" => "--region",
        "radius" => "--radius",
        _ => "",
    };
    match e {
        ConfigError::Invalid { key, message } if !flag(&key).is_empty() => {
            ConfigError::invalid(flag(&key), message)
        }
        other => other,
    }
}

#[derive(Debug, Serialize)]
struct TheoryTable {
    window_radius: f64,
    beta_3_3half: f64,
    c_d: f64,
    crossing_kernel: f64,
    f_full: f64,
    #[serde(rename = "M_const_1")]
    m_const_1: f64,
    #[serde(rename = "M_kernel_const_1")]
    m_kernel_const_1: f64,
    exp_minus_m: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    regime: Option<RegimeRow>,
}

#[derive(Debug, Serialize)]
struct RegimeRow {
    t: f64,
    regime: String,
    radius: f64,
    sparsity: f64,
    #[serde(rename = "M")]
    m: f64,
    #[serde(rename = "M_kernel")]
    m_kernel: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    log_exponent: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    alpha_window: Option<(f64, f64)>,
}

fn theory_table(t: Option<f64>, regime: Option<RegimeSpec>) -> Result<TheoryTable, RunError> {
    let window = BallWindow::unit_volume();
    let k = ModelConstants::for_window(&window);
    let m1 = k.constant_regime_mean(1.0);
    let row = match (t, regime) {
        (Some(t), Some(spec)) => {
            let r = radius_for_regime(t, spec)?;
            let log_exponent = spec.log_exponent(&window);
            Some(RegimeRow {
                t,
                regime: crate::config::format_regime(&spec),
                radius: r,
                sparsity: t * r * r * r,
                m: expected_crossings(t, r, &window, None)?,
                m_kernel: expected_crossings_kernel(t, r, &window, None)?,
                log_exponent,
                alpha_window: log_exponent.and_then(admissible_alpha_window),
            })
        }
        _ => None,
    };
    Ok(TheoryTable {
        window_radius: k.radius,
        beta_3_3half: k.beta_3_32,
        c_d: k.c_d,
        crossing_kernel: k.crossing_kernel,
        f_full: k.f_full,
        m_const_1: m1,
        m_kernel_const_1: k.constant_regime_mean_kernel(1.0),
        exp_minus_m: (-m1).exp(),
        regime: row,
    })
}

fn render_theory(tab: &TheoryTable) -> String {
    let mut rows = vec![
        ("R (unit-volume ball)", format!("{:.12}", tab.window_radius)),
        ("B(3, 3/2)", format!("{:.12}", tab.beta_3_3half)),
        ("c_d", format!("{:.12}", tab.c_d)),
        ("crossing kernel", format!("{:.12}", tab.crossing_kernel)),
        ("f_full = 2πR⁴", format!("{:.12}", tab.f_full)),
        ("M (c = 1)", format!("{:.6}", tab.m_const_1)),
        ("M kernel (c = 1)", format!("{:.6}", tab.m_kernel_const_1)),
        ("e^-M (c = 1)", format!("{:.6}", tab.exp_minus_m)),
    ];
    if let Some(r) = &tab.regime {
        rows.push(("t", format!("{}", r.t)));
        rows.push(("regime", r.regime.clone()));
        rows.push(("r", format!("{:.6e}", r.radius)));
        rows.push(("t·r³", format!("{:.6e}", r.sparsity)));
        rows.push(("M", format!("{:.6}", r.m)));
        rows.push(("M kernel", format!("{:.6}", r.m_kernel)));
        if let Some(c) = r.log_exponent {
            rows.push(("log exponent c", format!("{c:.6}")));
            rows.push((
                "alpha window",
                match r.alpha_window {
                    Some((lo, hi)) => format!("({lo:.6}, {hi:.6})"),
                    None => "empty (c ≥ 1/8)".to_string(),
                },
            ));
        }
    }
    let width = rows
        .iter()
        .map(|(k, _)| k.chars().count())
        .max()
        .unwrap_or(0);
    rows.iter()
        .map(|(k, v)| format!("{k}{} {v}\n", " ".repeat(width - k.chars().count())))
        .collect()
}

fn run_suite(suite: Suite, cfg: &ExperimentConfig) -> Result<SuiteReport, RunError> {
    Ok(match suite {
        Suite::Distribution => SuiteReport::Distribution(run_distribution(cfg)?),
        Suite::TwoPlane => SuiteReport::TwoPlane(run_two_plane(cfg)?),
        Suite::FindPlane => SuiteReport::FindPlane(run_find_plane(cfg)?),
        Suite::ExistenceScan => SuiteReport::Existence(run_existence_scan(cfg)?),
    })
}

/// Runs `f` on a pool with the given number of workers, or on the global
/// pool.
pub fn with_jobs<T: Send>(
    jobs: Option<usize>,
    f: impl FnOnce() -> T + Send,
) -> Result<T, RunError> {
    match jobs {
        None => Ok(f()),
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map(|pool| pool.install(f))
            .map_err(|e| RunError::Pool(e.to_string())),
    }
}

fn write_out(out: &mut dyn Write, text: &str) -> Result<(), RunError> {
    out.write_all(text.as_bytes())
        .map_err(|e| RunError::io("<stdout>", e))
}

/// Executes an invocation, writing human-readable output to `out`. Returns
/// the process exit code.
pub fn run(inv: &CliInvocation, out: &mut dyn Write) -> Result<i32, RunError> {
    for w in &inv.warnings {
        eprintln!("warning: {w}");
    }
    match &inv.action {
        Action::Theory { t, regime, format } => {
            let tab = theory_table(*t, *regime)?;
            let text = match format {
                Format::Json => serde_json::to_string_pretty(&tab).expect("serializable") + "\n",
                _ => render_theory(&tab),
            };
            write_out(out, &text)?;
            Ok(EXIT_OK)
        }
        Action::Selftest { scale } => {
            let checks = selftest::run(*scale);
            let mut text = String::new();
            for c in &checks {
                text.push_str(&format!(
                    "[{}] {} ({})\n",
                    if c.passed { "PASS" } else { "FAIL" },
                    c.name,
                    c.detail
                ));
            }
            write_out(out, &text)?;
            Ok(if checks.iter().all(|c| c.passed) {
                EXIT_OK
            } else {
                EXIT_SELFTEST
            })
        }
        Action::Suite {
            suite,
            config,
            out: dir,
            format,
            jobs,
            dump,
        } => {
            let report = with_jobs(*jobs, || run_suite(*suite, config))??;
            let summary = report.summary(config);
            match dir {
                Some(dir) => {
                    let written = write_outputs(dir, &report, &summary, *format)?;
                    let mut text = render_text(&summary);
                    if let Some(rep) = dump {
                        let r = config.connection_radius()?;
                        let (_, graph) = replication_graph(config, r, *rep, STREAM_GRAPH)?;
                        let normal = config
                            .plane
                            .unwrap_or_else(|| SpherePoint::new(Vec3::E3).expect("unit"));
                        let set = count_crossings_grid(
                            &graph,
                            &ProjectionPlane::from_sphere_point(normal),
                            config.region.as_ref(),
                        );
                        for p in write_dump(dir, &graph, &set)? {
                            text.push_str(&format!("wrote {}\n", p.display()));
                        }
                    }
                    for p in written {
                        text.push_str(&format!("wrote {}\n", p.display()));
                    }
                    write_out(out, &text)?;
                }
                None => match format {
                    Format::Text => write_out(out, &render_text(&summary))?,
                    f => report
                        .write_records(*f, &mut *out)
                        .map_err(|e| RunError::io("<stdout>", e))?,
                },
            }
            Ok(EXIT_OK)
        }
    }
}

/// Parses, runs and maps every failure to an exit code.
pub fn main_with_args<I, S>(argv: I, out: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let inv = match parse_args(argv) {
        Ok(inv) => inv,
        Err(CliError::Usage(e)) => {
            let code = if e.use_stderr() { EXIT_CONFIG } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
        Err(e) => {
            eprintln!("error: {e}");
            return e.exit_code();
        }
    };
    match run(&inv, out) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                RunError::Config(_) => EXIT_CONFIG,
                _ => EXIT_FAILURE,
            }
        }
    }
}

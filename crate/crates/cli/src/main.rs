//! `slabwave`: band structure, Bloch dispersion, slab scattering and pulse
//! runs for one-dimensional periodic potentials truncated to N periods.
//!
//! Exit codes: 0 success, 1 usage error, 2 numeric failure, 3 verification
//! failure, 4 success with an under-resolution warning.

use std::fmt::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand, ValueEnum};

use slabwave_core::potentials::PotentialSpec;
use slabwave_core::scattering::{scatter_direct, scatter_semi_infinite, transparency_points};
use slabwave_core::spectrum::{bloch_k, find_bands};
use slabwave_core::timedomain::{freq_domain_oracle, write_snapshot, PulseConfig, Simulation};
use slabwave_core::transfer::Frequency;
use slabwave_core::verify::{self, Overrides};

#[derive(Parser)]
#[command(
    name = "slabwave",
    version,
    about = "Waves in truncated periodic media: bands, dispersion, scattering, pulses",
    disable_help_subcommand = true
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Scan a frequency range for spectral bands and classify their edges.
    Bands(BandsArgs),
    /// Tabulate the discriminant and Bloch phase over a frequency sweep.
    Dispersion(DispersionArgs),
    /// Reflection and transmission of the N-period slab over a sweep.
    Scatter(ScatterArgs),
    /// Locate the in-band frequencies where the slab is perfectly transparent.
    Transparency(TransparencyArgs),
    /// Reflection by the semi-infinite periodic medium.
    Semi(SemiArgs),
    /// Time-domain pulse run with the energy ledger.
    Pulse(PulseArgs),
    /// Run the built-in verification suite.
    Verify(VerifyArgs),
}

#[derive(Args)]
struct SpecArg {
    /// Potential spec: inline JSON (starts with '{') or a path to a JSON file.
    #[arg(long)]
    spec: String,
}

impl SpecArg {
    fn load(&self) -> Result<PotentialSpec, AppError> {
        let text = if self.spec.trim_start().starts_with('{') {
            self.spec.clone()
        } else {
            std::fs::read_to_string(&self.spec)
                .map_err(|e| AppError::Usage(format!("cannot read spec file {}: {e}", self.spec)))?
        };
        PotentialSpec::from_json(&text).map_err(|e| AppError::Usage(format!("bad spec: {e}")))
    }
}

#[derive(Args)]
struct SweepArgs {
    #[arg(long)]
    omega_min: f64,
    #[arg(long)]
    omega_max: f64,
    /// Number of samples across the range (inclusive endpoints).
    #[arg(long, default_value_t = 200)]
    omega_steps: usize,
}

impl SweepArgs {
    fn values(&self) -> Result<Vec<f64>, AppError> {
        if !(self.omega_min > 0.0 && self.omega_min < self.omega_max && self.omega_steps >= 2) {
            return Err(AppError::Usage(
                "sweep requires 0 < omega-min < omega-max and at least 2 steps".into(),
            ));
        }
        let n = self.omega_steps;
        Ok((0..n)
            .map(|i| self.omega_min + (self.omega_max - self.omega_min) * i as f64 / (n - 1) as f64)
            .collect())
    }
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Args)]
struct OutputArgs {
    /// Output path; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
}

#[derive(Args)]
struct BandsArgs {
    #[command(flatten)]
    spec: SpecArg,
    #[command(flatten)]
    sweep: SweepArgs,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args)]
struct DispersionArgs {
    #[command(flatten)]
    spec: SpecArg,
    #[command(flatten)]
    sweep: SweepArgs,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args)]
struct ScatterArgs {
    #[command(flatten)]
    spec: SpecArg,
    #[command(flatten)]
    sweep: SweepArgs,
    /// Slab length in periods; repeat the flag to sweep several lengths.
    #[arg(long = "periods", default_values_t = [8u32])]
    periods: Vec<u32>,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args)]
struct TransparencyArgs {
    #[command(flatten)]
    spec: SpecArg,
    #[command(flatten)]
    sweep: SweepArgs,
    #[arg(long = "periods", default_value_t = 8)]
    periods: u32,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args)]
struct SemiArgs {
    #[command(flatten)]
    spec: SpecArg,
    #[command(flatten)]
    sweep: SweepArgs,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args)]
struct PulseArgs {
    /// Comb amplitude; 0 runs the free medium (needs --omega0 and --pulse-width).
    #[arg(long)]
    amplitude: f64,
    #[arg(long, default_value_t = 1.0)]
    period: f64,
    #[arg(long, default_value_t = 1)]
    band_index: u32,
    #[arg(long, default_value_t = 2.0)]
    theta: f64,
    #[arg(long, default_value_t = 3)]
    periods: u32,
    /// Spatial width of the incident pulse; defaults to amplitude^1.2.
    #[arg(long)]
    pulse_width: Option<f64>,
    /// Carrier frequency; defaults to the in-band placement from theta.
    #[arg(long)]
    omega0: Option<f64>,
    /// Grid points per period.
    #[arg(long, default_value_t = 64)]
    resolution: u32,
    #[arg(long)]
    t_end: Option<f64>,
    /// Write a binary field snapshot every K recorded samples.
    #[arg(long)]
    snapshot_every: Option<usize>,
    #[arg(long)]
    snapshot_dir: Option<PathBuf>,
    /// Where to write the summary JSON; stdout when omitted.
    #[arg(long)]
    summary_out: Option<PathBuf>,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long, default_value_t = 0x51ab_0001)]
    seed: u64,
    /// Tolerance overrides, `--set scattering.gap_decay_rel_tol=0.01`.
    #[arg(long = "set")]
    set: Vec<String>,
    /// Comma-separated criterion ids to run (default: all).
    #[arg(long)]
    only: Option<String>,
    /// Write the machine-readable JSON report here.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug)]
enum AppError {
    Usage(String),
    Numeric(String),
    Io(std::io::Error),
}

impl std::fmt::Display for AppError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            AppError::Usage(m) => write!(f, "{m}"),
            AppError::Numeric(m) => write!(f, "{m}"),
            AppError::Io(e) => write!(f, "{e}"),
        }
    }
}

impl From<std::io::Error> for AppError {
    fn from(e: std::io::Error) -> Self {
        AppError::Io(e)
    }
}

impl AppError {
    fn exit_code(&self) -> ExitCode {
        match self {
            AppError::Usage(_) => ExitCode::from(1),
            AppError::Numeric(_) | AppError::Io(_) => ExitCode::from(2),
        }
    }
}

fn numeric<E: std::fmt::Display>(e: E) -> AppError {
    AppError::Numeric(e.to_string())
}

// ---------------------------------------------------------------------------
// Tables

#[derive(Clone)]
enum Cell {
    Num(f64),
    Int(i64),
    Text(String),
}

struct Table {
    columns: Vec<&'static str>,
    rows: Vec<Vec<Cell>>,
}

/// 17 significant digits, enough to reproduce any f64 exactly.
fn fmt_f64(x: f64) -> String {
    if x.is_nan() {
        "nan".to_string()
    } else {
        format!("{:.16e}", x)
    }
}

impl Table {
    fn to_csv(&self) -> String {
        let mut out = String::new();
        out.push_str(&self.columns.join(","));
        out.push('\n');
        for row in &self.rows {
            let mut first = true;
            for cell in row {
                if !first {
                    out.push(',');
                }
                first = false;
                match cell {
                    Cell::Num(x) => out.push_str(&fmt_f64(*x)),
                    Cell::Int(i) => {
                        let _ = write!(out, "{i}");
                    }
                    Cell::Text(s) => out.push_str(s),
                }
            }
            out.push('\n');
        }
        out
    }

    fn to_json(&self) -> String {
        let rows: Vec<serde_json::Value> = self
            .rows
            .iter()
            .map(|row| {
                let map: serde_json::Map<String, serde_json::Value> = self
                    .columns
                    .iter()
                    .zip(row)
                    .map(|(name, cell)| {
                        let value = match cell {
                            Cell::Num(x) if x.is_nan() => serde_json::Value::Null,
                            Cell::Num(x) => serde_json::json!(x),
                            Cell::Int(i) => serde_json::json!(i),
                            Cell::Text(s) => serde_json::json!(s),
                        };
                        (name.to_string(), value)
                    })
                    .collect();
                serde_json::Value::Object(map)
            })
            .collect();
        serde_json::to_string_pretty(&rows).expect("table serializes")
    }

    fn write(&self, output: &OutputArgs) -> Result<(), AppError> {
        let text = match output.format {
            Format::Csv => self.to_csv(),
            Format::Json => self.to_json(),
        };
        match &output.out {
            Some(path) => std::fs::write(path, text)?,
            None => print!("{text}"),
        }
        Ok(())
    }
}

// ---------------------------------------------------------------------------
// Parallel sweep helper

/// Ordered parallel map over `0..n`; thread count capped by SCATTER_THREADS.
fn parallel_map<T, F>(n: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync,
{
    let threads = std::env::var("SCATTER_THREADS")
        .ok()
        .and_then(|s| s.parse::<usize>().ok())
        .unwrap_or_else(|| {
            std::thread::available_parallelism()
                .map(|p| p.get())
                .unwrap_or(1)
        })
        .clamp(1, 64);
    if threads == 1 || n < 32 {
        return (0..n).map(f).collect();
    }
    let mut slots: Vec<Option<T>> = (0..n).map(|_| None).collect();
    let chunk = n.div_ceil(threads);
    std::thread::scope(|scope| {
        for (t, piece) in slots.chunks_mut(chunk).enumerate() {
            let f = &f;
            scope.spawn(move || {
                for (j, slot) in piece.iter_mut().enumerate() {
                    *slot = Some(f(t * chunk + j));
                }
            });
        }
    });
    slots
        .into_iter()
        .map(|s| s.expect("every index computed"))
        .collect()
}

// ---------------------------------------------------------------------------
// Commands

fn cmd_bands(args: &BandsArgs) -> Result<ExitCode, AppError> {
    let spec = args.spec.load()?;
    args.sweep.values()?; // range validation
    let scan = find_bands(
        &spec,
        args.sweep.omega_min,
        args.sweep.omega_max,
        args.sweep.omega_steps,
    )
    .map_err(numeric)?;
    let mut table = Table {
        columns: vec!["n", "lo", "hi", "lo_class", "hi_class", "width"],
        rows: Vec::new(),
    };
    for band in &scan.bands {
        table.rows.push(vec![
            Cell::Int(band.index as i64),
            Cell::Num(band.lo),
            Cell::Num(band.hi),
            Cell::Text(band.lo_class.to_string()),
            Cell::Text(band.hi_class.to_string()),
            Cell::Num(band.width()),
        ]);
    }
    table.write(&args.output)?;
    if !scan.under_resolved.is_empty() {
        eprintln!(
            "warning: {} band(s) narrower than two grid cells; refine the grid near:",
            scan.under_resolved.len()
        );
        for (lo, hi) in &scan.under_resolved {
            eprintln!("  [{lo}, {hi}]");
        }
        return Ok(ExitCode::from(4));
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_dispersion(args: &DispersionArgs) -> Result<ExitCode, AppError> {
    let spec = args.spec.load()?;
    let omegas = args.sweep.values()?;
    let rows = parallel_map(omegas.len(), |i| {
        let w = omegas[i];
        Frequency::real(w)
            .map_err(|e| e.to_string())
            .and_then(|f| bloch_k(f, &spec).map_err(|e| e.to_string()))
    });
    let mut table = Table {
        columns: vec!["omega", "re_f", "im_f", "re_k", "im_k", "regime"],
        rows: Vec::new(),
    };
    for (w, row) in omegas.iter().zip(rows) {
        match row {
            Ok(s) => table.rows.push(vec![
                Cell::Num(*w),
                Cell::Num(s.f.re),
                Cell::Num(s.f.im),
                Cell::Num(s.k.re),
                Cell::Num(s.k.im),
                Cell::Text(s.regime.to_string()),
            ]),
            Err(e) => return Err(AppError::Numeric(format!("omega = {w}: {e}"))),
        }
    }
    table.write(&args.output)?;
    Ok(ExitCode::SUCCESS)
}

fn cmd_scatter(args: &ScatterArgs) -> Result<ExitCode, AppError> {
    let spec = args.spec.load()?;
    let omegas = args.sweep.values()?;
    if args.periods.is_empty() || args.periods.iter().any(|&n| n < 1) {
        return Err(AppError::Usage("--periods must be at least 1".into()));
    }
    let mut pairs = Vec::new();
    for &n in &args.periods {
        for &w in &omegas {
            pairs.push((w, n));
        }
    }
    let rows = parallel_map(pairs.len(), |i| {
        let (w, n) = pairs[i];
        Frequency::real(w)
            .map_err(|e| e.to_string())
            .and_then(|f| scatter_direct(f, &spec, n).map_err(|e| e.to_string()))
            .and_then(|s| {
                bloch_k(s.omega, &spec)
                    .map(|d| (s, d.regime.to_string()))
                    .map_err(|e| e.to_string())
            })
    });
    let mut table = Table {
        columns: vec![
            "omega",
            "periods",
            "re_r",
            "im_r",
            "abs_t",
            "energy_sum",
            "regime",
            "error",
        ],
        rows: Vec::new(),
    };
    for ((w, n), row) in pairs.iter().zip(rows) {
        // Per-point failures become rows with the error column set; the run
        // continues.
        match row {
            Ok((s, regime)) => table.rows.push(vec![
                Cell::Num(*w),
                Cell::Int(*n as i64),
                Cell::Num(s.r.re),
                Cell::Num(s.r.im),
                Cell::Num(s.t.norm()),
                Cell::Num(s.r.norm_sqr() + s.t.norm_sqr()),
                Cell::Text(regime),
                Cell::Text(String::new()),
            ]),
            Err(e) => table.rows.push(vec![
                Cell::Num(*w),
                Cell::Int(*n as i64),
                Cell::Num(f64::NAN),
                Cell::Num(f64::NAN),
                Cell::Num(f64::NAN),
                Cell::Num(f64::NAN),
                Cell::Text(String::new()),
                Cell::Text(e),
            ]),
        }
    }
    table.write(&args.output)?;
    Ok(ExitCode::SUCCESS)
}

fn cmd_transparency(args: &TransparencyArgs) -> Result<ExitCode, AppError> {
    let spec = args.spec.load()?;
    args.sweep.values()?;
    let scan = find_bands(
        &spec,
        args.sweep.omega_min,
        args.sweep.omega_max,
        args.sweep.omega_steps,
    )
    .map_err(numeric)?;
    let mut table = Table {
        columns: vec!["band_index", "m", "omega", "residual"],
        rows: Vec::new(),
    };
    for band in &scan.bands {
        match transparency_points(&spec, band, args.periods) {
            Ok(points) => {
                for (m, p) in points.iter().enumerate() {
                    table.rows.push(vec![
                        Cell::Int(band.index as i64),
                        Cell::Int((m + 1) as i64),
                        Cell::Num(p.omega),
                        Cell::Num(p.residual),
                    ]);
                }
            }
            Err(e) => {
                eprintln!("note: band {} skipped: {e}", band.index);
            }
        }
    }
    table.write(&args.output)?;
    Ok(ExitCode::SUCCESS)
}

fn cmd_semi(args: &SemiArgs) -> Result<ExitCode, AppError> {
    let spec = args.spec.load()?;
    let omegas = args.sweep.values()?;
    let rows = parallel_map(omegas.len(), |i| {
        Frequency::real(omegas[i])
            .map_err(|e| e.to_string())
            .and_then(|f| scatter_semi_infinite(f, &spec).map_err(|e| e.to_string()))
    });
    let mut table = Table {
        columns: vec![
            "omega",
            "re_r",
            "im_r",
            "abs_r",
            "re_m_plus",
            "im_m_plus",
            "error",
        ],
        rows: Vec::new(),
    };
    for (w, row) in omegas.iter().zip(rows) {
        match row {
            Ok(s) => table.rows.push(vec![
                Cell::Num(*w),
                Cell::Num(s.r.re),
                Cell::Num(s.r.im),
                Cell::Num(s.r.norm()),
                Cell::Num(s.m_plus.re),
                Cell::Num(s.m_plus.im),
                Cell::Text(String::new()),
            ]),
            Err(e) => table.rows.push(vec![
                Cell::Num(*w),
                Cell::Num(f64::NAN),
                Cell::Num(f64::NAN),
                Cell::Num(f64::NAN),
                Cell::Num(f64::NAN),
                Cell::Num(f64::NAN),
                Cell::Text(e),
            ]),
        }
    }
    table.write(&args.output)?;
    Ok(ExitCode::SUCCESS)
}

fn build_pulse_config(args: &PulseArgs) -> Result<PulseConfig, AppError> {
    let usage = |m: String| AppError::Usage(m);
    let mut cfg = if args.amplitude == 0.0 {
        let omega0 = args
            .omega0
            .ok_or_else(|| usage("free-medium pulse needs --omega0".into()))?;
        let width = args
            .pulse_width
            .ok_or_else(|| usage("free-medium pulse needs --pulse-width".into()))?;
        PulseConfig::free_pulse(omega0, args.period, args.periods, width).map_err(numeric)?
    } else {
        PulseConfig::desk(
            args.band_index,
            args.theta,
            args.amplitude,
            args.period,
            args.periods,
        )
        .map_err(numeric)?
    };
    if let Some(b) = args.pulse_width {
        cfg.pulse_width = b;
        cfg.t_end = 2.0 * cfg.pulse_width + 2.0 * cfg.transit_time();
    }
    if let Some(w0) = args.omega0 {
        cfg.omega0 = w0;
    }
    cfg.points_per_period = args.resolution;
    if let Some(t) = args.t_end {
        cfg.t_end = t;
    }
    cfg.validate().map_err(numeric)?;
    Ok(cfg)
}

fn cmd_pulse(args: &PulseArgs) -> Result<ExitCode, AppError> {
    let cfg = build_pulse_config(args)?;
    if args.snapshot_every.is_some() && args.snapshot_dir.is_none() {
        return Err(AppError::Usage(
            "--snapshot-every needs --snapshot-dir".into(),
        ));
    }
    if let Some(dir) = &args.snapshot_dir {
        std::fs::create_dir_all(dir)?;
    }

    let sim = Simulation::new(cfg.clone()).map_err(numeric)?;
    let mut snapshot_counter = 0usize;
    let mut record_counter = 0usize;
    let report = sim
        .run_with(|sim, _snap| {
            if let (Some(every), Some(dir)) = (args.snapshot_every, &args.snapshot_dir) {
                if record_counter.is_multiple_of(every) {
                    let path = dir.join(format!("field_{snapshot_counter:06}.bin"));
                    write_snapshot(&path, sim)?;
                    snapshot_counter += 1;
                }
            }
            record_counter += 1;
            Ok(())
        })
        .map_err(numeric)?;

    let mut table = Table {
        columns: vec!["t", "e_total", "e_left", "e_slab", "e_right"],
        rows: Vec::new(),
    };
    for s in &report.samples {
        table.rows.push(vec![
            Cell::Num(s.time),
            Cell::Num(s.total),
            Cell::Num(s.left),
            Cell::Num(s.slab),
            Cell::Num(s.right),
        ]);
    }
    table.write(&args.output)?;

    let oracle = freq_domain_oracle(&cfg).map_err(numeric)?;
    let oracle_gap = (report.transmitted_fraction() - oracle.transmitted_fraction).abs()
        / oracle.transmitted_fraction.max(f64::MIN_POSITIVE);
    let summary = serde_json::json!({
        "initial_energy": report.initial_energy,
        "final": report.final_energy,
        "reflected_fraction": report.reflected_fraction(),
        "slab_fraction": report.slab_fraction(),
        "transmitted_fraction": report.transmitted_fraction(),
        "energy_drift": report.drift,
        "reflected_remainder_energy": report.g_energy,
        "pre_transit_right_fraction": report.pre_transit_right_fraction,
        "oracle": oracle,
        "oracle_relative_gap": oracle_gap,
        "snapshots_written": snapshot_counter,
    });
    let text = serde_json::to_string_pretty(&summary).expect("summary serializes");
    match &args.summary_out {
        Some(path) => std::fs::write(path, text)?,
        None => println!("{text}"),
    }
    Ok(ExitCode::SUCCESS)
}

const KNOWN_KEYS: &[&str] = &[
    "transfer.det_tol",
    "transfer.chebyshev_tol",
    "scattering.reflection_tol",
    "scattering.transmittance_tol",
    "scattering.conservation_tol",
    "scattering.degenerate_r_tol",
    "scattering.transparency_tol",
    "scattering.gap_decay_rel_tol",
    "scattering.edge_law_factor",
    "scattering.semi_ratio_bound",
    "scattering.semi_factor_bound",
    "spectrum.edge_secant_tol",
    "spectrum.edge_asymptote_tol",
    "spectrum.vg_slope_tol",
    "spectrum.degenerate_slope_tol",
    "spectrum.wkb_scan_grid",
    "timedomain.drift_tol",
    "timedomain.oracle_rel_tol",
    "timedomain.a2_ratio_lo",
    "timedomain.a2_ratio_hi",
    "timedomain.pre_transit_tol",
];

fn parse_overrides(pairs: &[String]) -> Result<Overrides, AppError> {
    let mut overrides = Overrides::new();
    for pair in pairs {
        let (key, value) = pair
            .split_once('=')
            .ok_or_else(|| AppError::Usage(format!("--set expects key=value, got '{pair}'")))?;
        if !KNOWN_KEYS.contains(&key) {
            return Err(AppError::Usage(format!(
                "unknown tolerance key '{key}'; known keys: {}",
                KNOWN_KEYS.join(", ")
            )));
        }
        let value: f64 = value
            .parse()
            .map_err(|_| AppError::Usage(format!("--set {key}: '{value}' is not a number")))?;
        overrides.set(key, value);
    }
    Ok(overrides)
}

fn cmd_verify(args: &VerifyArgs) -> Result<ExitCode, AppError> {
    let overrides = parse_overrides(&args.set)?;
    let wanted: Option<Vec<u32>> = match &args.only {
        None => None,
        Some(list) => Some(
            list.split(',')
                .map(|s| {
                    s.trim()
                        .parse::<u32>()
                        .map_err(|_| AppError::Usage(format!("--only: bad criterion id '{s}'")))
                })
                .collect::<Result<_, _>>()?,
        ),
    };

    let mut criteria = Vec::new();
    for (id, _, f) in verify::CRITERIA.iter() {
        if wanted.as_ref().is_some_and(|w| !w.contains(id)) {
            continue;
        }
        let report = f(args.seed, &overrides);
        println!("{}", verify::format_line(&report));
        criteria.push(report);
    }
    if criteria.is_empty() {
        return Err(AppError::Usage("--only matched no criteria".into()));
    }
    let all_pass = criteria.iter().all(|c| c.pass);
    let report = verify::VerifyReport {
        seed: args.seed,
        criteria,
        all_pass,
    };
    if let Some(path) = &args.out {
        std::fs::write(path, report.to_json())?;
    }
    if all_pass {
        Ok(ExitCode::SUCCESS)
    } else {
        Ok(ExitCode::from(3))
    }
}

fn run(cli: Cli) -> Result<ExitCode, AppError> {
    match &cli.command {
        Command::Bands(args) => cmd_bands(args),
        Command::Dispersion(args) => cmd_dispersion(args),
        Command::Scatter(args) => cmd_scatter(args),
        Command::Transparency(args) => cmd_transparency(args),
        Command::Semi(args) => cmd_semi(args),
        Command::Pulse(args) => cmd_pulse(args),
        Command::Verify(args) => cmd_verify(args),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = e.print();
                return ExitCode::SUCCESS;
            }
            eprintln!("{e}");
            return ExitCode::from(1);
        }
    };
    match run(cli) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err}");
            err.exit_code()
        }
    }
}

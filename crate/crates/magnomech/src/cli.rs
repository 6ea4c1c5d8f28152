//! Command-line front end.
//!
//! Exit codes: 0 success, 1 validation or convergence failure, 2 usage error.

use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use magnomech_core::analysis::{delay_sign_crossings, find_windows, SweepParameter, SweepSpec, DEFAULT_PROMINENCE};
use magnomech_core::oracle::{cross_validate, MAX_CONDITION};
use magnomech_core::params::CouplingMode;
use magnomech_core::response::{default_step, linspace};
use magnomech_core::steady::{kerr_validity, steady_state, KERR_THRESHOLD};
use magnomech_core::SystemParams;

use crate::config::{parse_config, serialize_config, ConfigError};
use crate::csv::{self, Table};
use crate::presets::{self, DEFAULT_DELTA_POINTS};
use crate::run;

/// Relative deviation above which `validate` fails.
pub const VALIDATION_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Parser)]
#[command(name = "magnomech", version, about = "Probe response of a two-cavity magnomechanical system")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Absorption, dispersion, transmission and group delay over a δ grid.
    Spectrum(Common),
    /// Steady-state magnon number, at the configured B or over a B range.
    Steady {
        #[command(flatten)]
        common: Common,
        /// B range in tesla, `lo:hi`, sampled with `--grid` points.
        #[arg(long, value_parser = parse_range)]
        b_range: Option<(f64, f64)>,
        /// Solve every field independently instead of continuing the branch.
        #[arg(long)]
        no_warm_start: bool,
    },
    /// Sign crossings of τ at fixed δ while one frequency parameter is swept
    /// over `--range` (in ω_p units).
    Delay {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value = "f")]
        parameter: String,
        /// Fixed probe detuning in ω_p units.
        #[arg(long, default_value_t = 1.0)]
        delta: f64,
    },
    /// Transparency windows in the absorption spectrum.
    Windows(Common),
    /// Spectra over the Cartesian product of one or two parameter grids.
    Sweep {
        #[command(flatten)]
        common: Common,
        /// `name=lo:hi:n`, values in file units (Hz for frequencies, tesla for
        /// B). Repeat for a second axis.
        #[arg(long = "param", required = true)]
        params: Vec<String>,
    },
    /// Cross-check the closed-form response against the direct 12×12 solve.
    Validate(Common),
    /// Run a figure preset.
    Preset {
        #[arg(value_parser = clap::builder::PossibleValuesParser::new(presets::NAMES))]
        name: String,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        grid: Option<usize>,
        #[arg(long, default_value_t = DEFAULT_PROMINENCE)]
        prominence: f64,
    },
}

#[derive(Debug, Args)]
struct Common {
    #[arg(long)]
    config: PathBuf,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    grid: Option<usize>,
    /// Probe-detuning range in ω_p units, `lo:hi`.
    #[arg(long, value_parser = parse_range)]
    range: Option<(f64, f64)>,
    #[arg(long, default_value_t = DEFAULT_PROMINENCE)]
    prominence: f64,
    #[arg(long)]
    mode: Option<Mode>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Mode {
    Effective,
    Microscopic,
}

fn parse_range(s: &str) -> Result<(f64, f64), String> {
    let (lo, hi) = s.split_once(':').ok_or("expected `lo:hi`")?;
    let lo: f64 = lo.trim().parse().map_err(|_| format!("bad lower bound `{lo}`"))?;
    let hi: f64 = hi.trim().parse().map_err(|_| format!("bad upper bound `{hi}`"))?;
    if !(lo.is_finite() && hi.is_finite() && lo < hi) {
        return Err("need finite lo < hi".into());
    }
    Ok((lo, hi))
}

#[derive(Debug, thiserror::Error)]
enum Failure {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Config(#[from] ConfigError),
    #[error("{0}")]
    Core(#[from] magnomech_core::Error),
    #[error("cannot write {path}: {source}")]
    Write { path: PathBuf, source: std::io::Error },
    #[error("{0}")]
    Check(String),
}

impl Failure {
    fn exit_code(&self) -> i32 {
        match self {
            Failure::Usage(_) => 2,
            _ => 1,
        }
    }
}

/// Where the CSV goes and how to describe the run in its manifest.
struct Output<'a> {
    out: Option<&'a Path>,
    summary: Vec<String>,
}

impl Output<'_> {
    fn say(&mut self, line: String) {
        self.summary.push(line);
    }

    /// Writes the CSV (file or stdout), the manifest next to it and the
    /// summary lines.
    fn finish(self, body: &str, manifest: Option<String>) -> Result<(), Failure> {
        match self.out {
            Some(path) => {
                write(path, body)?;
                if let Some(m) = manifest {
                    write(&manifest_path(path), &m)?;
                }
                for line in &self.summary {
                    println!("{line}");
                }
            }
            None => {
                print!("{body}");
                for line in &self.summary {
                    eprintln!("{line}");
                }
            }
        }
        Ok(())
    }
}

fn write(path: &Path, text: &str) -> Result<(), Failure> {
    fs::write(path, text).map_err(|source| Failure::Write {
        path: path.to_path_buf(),
        source,
    })
}

/// `<out>.manifest`.
pub fn manifest_path(out: &Path) -> PathBuf {
    let mut s = out.as_os_str().to_owned();
    s.push(".manifest");
    PathBuf::from(s)
}

/// A manifest is itself a parameter file: the resolved parameters preceded by
/// comments holding the command that reproduces the output.
pub fn manifest(params: &SystemParams, rerun: &str, notes: &[String]) -> String {
    let mut text = String::from("# magnomech run manifest\n");
    text.push_str(&format!("# rerun: {rerun}\n"));
    for note in notes {
        text.push_str(&format!("# {note}\n"));
    }
    text.push_str(&serialize_config(params));
    text
}

/// The argv with the config path replaced by the manifest path.
fn rerun_command(argv: &[String], manifest: &Path) -> String {
    let mut out: Vec<String> = vec!["magnomech".into()];
    let mut iter = argv.iter().skip(1);
    while let Some(arg) = iter.next() {
        if arg == "--config" {
            iter.next();
            out.push("--config".into());
            out.push(manifest.display().to_string());
        } else if arg.starts_with("--config=") {
            out.push(format!("--config={}", manifest.display()));
        } else {
            out.push(arg.clone());
        }
    }
    out.join(" ")
}

fn load(common: &Common) -> Result<SystemParams, Failure> {
    let text = fs::read_to_string(&common.config)
        .map_err(|e| Failure::Usage(format!("cannot read config {}: {e}", common.config.display())))?;
    let mut params = parse_config(&text)?;
    if let Some(mode) = common.mode {
        params.coupling_mode = match mode {
            Mode::Effective => CouplingMode::Effective,
            Mode::Microscopic => CouplingMode::Microscopic,
        };
        params.validate()?;
    }
    Ok(params)
}

fn delta_grid(common: &Common, omega_p: f64) -> Result<Vec<f64>, Failure> {
    let (lo, hi) = common.range.unwrap_or((0.0, 2.0));
    let n = points(common.grid, DEFAULT_DELTA_POINTS)?;
    Ok(linspace(lo * omega_p, hi * omega_p, n))
}

fn points(grid: Option<usize>, default: usize) -> Result<usize, Failure> {
    match grid {
        Some(0) => Err(Failure::Usage("--grid must be at least 1".into())),
        Some(n) => Ok(n),
        None => Ok(default),
    }
}

fn check_prominence(p: f64) -> Result<(), Failure> {
    if p > 0.0 && p < 1.0 {
        Ok(())
    } else {
        Err(Failure::Usage("--prominence must lie in (0, 1)".into()))
    }
}

/// Parses argv and runs; returns the process exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let argv: Vec<OsString> = argv.into_iter().map(Into::into).collect();
    let cli = match Cli::try_parse_from(&argv) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    let argv: Vec<String> = argv.iter().map(|a| a.to_string_lossy().into_owned()).collect();
    let pool = match run::thread_pool() {
        Ok(pool) => pool,
        Err(e) => {
            eprintln!("error: {e}");
            return 2;
        }
    };
    match pool.install(|| dispatch(cli.command, &argv)) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

fn dispatch(command: Command, argv: &[String]) -> Result<(), Failure> {
    match command {
        Command::Spectrum(common) => spectrum(&common, argv),
        Command::Steady {
            common,
            b_range,
            no_warm_start,
        } => steady(&common, b_range, !no_warm_start, argv),
        Command::Delay {
            common,
            parameter,
            delta,
        } => delay(&common, &parameter, delta, argv),
        Command::Windows(common) => windows(&common, argv),
        Command::Sweep { common, params } => sweep(&common, &params, argv),
        Command::Validate(common) => validate(&common, argv),
        Command::Preset {
            name,
            out,
            grid,
            prominence,
        } => preset(&name, out.as_deref(), grid, prominence, argv),
    }
}

fn output(common: &Common) -> Output<'_> {
    Output {
        out: common.out.as_deref(),
        summary: Vec::new(),
    }
}

fn run_manifest(common: &Common, params: &SystemParams, argv: &[String], notes: &[String]) -> Option<String> {
    let out = common.out.as_deref()?;
    let path = manifest_path(out);
    Some(manifest(params, &rerun_command(argv, &path), notes))
}

fn spectrum(common: &Common, argv: &[String]) -> Result<(), Failure> {
    let params = load(common)?;
    let grid = delta_grid(common, params.omega_p)?;
    let spec = run::spectrum(&params, &grid, default_step(&params))?;
    let mut table = Table::new(csv::SPECTRUM_HEADER, false);
    csv::spectrum_rows(&mut table, "", &spec, params.omega_p);
    let mut out = output(common);
    out.say(format!(
        "{} points, max Richardson change {:.2e}",
        spec.points.len(),
        spec.max_richardson()
    ));
    let manifest = run_manifest(common, &params, argv, &[]);
    out.finish(&table.finish(), manifest)
}

fn steady(common: &Common, b_range: Option<(f64, f64)>, warm_start: bool, argv: &[String]) -> Result<(), Failure> {
    let params = load(common)?;
    if params.coupling_mode != CouplingMode::Microscopic {
        return Err(Failure::Check(
            "steady needs coupling_mode = microscopic (or --mode microscopic)".into(),
        ));
    }
    let b_grid = match b_range {
        Some((lo, hi)) => linspace(lo, hi, points(common.grid, presets::DEFAULT_B_POINTS)?),
        None => vec![params.b_field.unwrap_or(0.0)],
    };
    let sweep = run::magnon_sweep(&params, &b_grid, warm_start)?;
    let mut table = Table::new(csv::STEADY_HEADER, false);
    csv::steady_rows(&mut table, "", &sweep);
    let mut out = output(common);
    out.say(format!(
        "{} fields, strictly increasing: {}, jumps at rows {:?}",
        sweep.points.len(),
        sweep.strictly_increasing,
        sweep.jumps
    ));
    if let Some(kerr) = params.kerr {
        for p in &sweep.points {
            let omega = params.rabi_frequency_at(p.b_field)?;
            let d = kerr_validity(&p.state, kerr, omega, KERR_THRESHOLD);
            if !d.ok {
                out.say(format!(
                    "Kerr term not negligible at B = {:.6e} T (ratio {:.3e})",
                    p.b_field, d.ratio
                ));
            }
        }
    }
    let manifest = run_manifest(common, &params, argv, &[]);
    out.finish(&table.finish(), manifest)
}

fn delay(common: &Common, parameter: &str, delta: f64, argv: &[String]) -> Result<(), Failure> {
    let params = load(common)?;
    let parameter: SweepParameter = parameter.parse().map_err(|e: magnomech_core::Error| Failure::Usage(e.to_string()))?;
    if !parameter.is_frequency() {
        return Err(Failure::Usage(format!(
            "delay sweeps take a frequency parameter; `{}` is not one",
            parameter.name()
        )));
    }
    let (lo, hi) = common.range.unwrap_or((0.0, 0.5));
    let values = linspace(lo * params.omega_p, hi * params.omega_p, points(common.grid, presets::DEFAULT_SWEEP_POINTS)?);
    let report = delay_sign_crossings(&params, parameter, &values, delta * params.omega_p)?;
    let mut table = Table::new(csv::CROSSINGS_HEADER, false);
    csv::crossing_rows(&mut table, "", &report);
    let mut out = output(common);
    for line in run::crossing_summary(parameter.name(), &report) {
        out.say(line);
    }
    let manifest = run_manifest(common, &params, argv, &[]);
    out.finish(&table.finish(), manifest)
}

fn windows(common: &Common, argv: &[String]) -> Result<(), Failure> {
    check_prominence(common.prominence)?;
    let params = load(common)?;
    let grid = delta_grid(common, params.omega_p)?;
    let spec = run::spectrum(&params, &grid, default_step(&params))?;
    let report = find_windows(&spec.deltas(), &spec.absorption(), common.prominence)?;
    let mut table = Table::new(csv::WINDOWS_HEADER, false);
    csv::window_rows(&mut table, "", &report, params.omega_p);
    let mut out = output(common);
    out.say(format!("{} transparency windows", report.count()));
    let manifest = run_manifest(common, &params, argv, &[]);
    out.finish(&table.finish(), manifest)
}

/// Parses `name=lo:hi:n` into a parameter and its grid in internal units.
fn sweep_axis(spec: &str) -> Result<(SweepParameter, Vec<f64>), Failure> {
    let usage = || Failure::Usage(format!("--param expects name=lo:hi:n, got `{spec}`"));
    let (name, rest) = spec.split_once('=').ok_or_else(usage)?;
    let parameter: SweepParameter = name
        .trim()
        .parse()
        .map_err(|e: magnomech_core::Error| Failure::Usage(e.to_string()))?;
    let parts: Vec<&str> = rest.split(':').collect();
    let [lo, hi, n] = parts.as_slice() else {
        return Err(usage());
    };
    let lo: f64 = lo.trim().parse().map_err(|_| usage())?;
    let hi: f64 = hi.trim().parse().map_err(|_| usage())?;
    let n: usize = n.trim().parse().map_err(|_| usage())?;
    let scale = if parameter.is_frequency() { magnomech_core::TAU } else { 1.0 };
    Ok((parameter, linspace(lo * scale, hi * scale, n)))
}

fn sweep(common: &Common, axes: &[String], argv: &[String]) -> Result<(), Failure> {
    let params = load(common)?;
    if axes.len() > 2 {
        return Err(Failure::Usage("--param may be given at most twice".into()));
    }
    let axes = axes.iter().map(|a| sweep_axis(a)).collect::<Result<Vec<_>, _>>()?;
    let spec = SweepSpec {
        axes,
        delta_grid: delta_grid(common, params.omega_p)?,
    };
    let results = run::sweep(&params, &spec)?;

    let tag_columns: Vec<String> = spec
        .axes
        .iter()
        .map(|(p, _)| {
            if p.is_frequency() {
                format!("{}_hz", p.name())
            } else {
                format!("{}_tesla", p.name())
            }
        })
        .collect();
    let mut text = format!("{},{}\n", tag_columns.join(","), csv::SPECTRUM_HEADER);
    for tagged in &results {
        let tags: Vec<String> = tagged
            .tags
            .iter()
            .map(|(p, v)| csv::number(if p.is_frequency() { v / magnomech_core::TAU } else { *v }))
            .collect();
        let mut table = Table::new("", true);
        csv::spectrum_rows(&mut table, &tags.join(","), &tagged.spectrum, params.omega_p);
        text.extend(table.finish().lines().skip(1).map(|l| format!("{l}\n")));
    }
    let mut out = output(common);
    out.say(format!("{} spectra", results.len()));
    let manifest = run_manifest(common, &params, argv, &[]);
    out.finish(&text, manifest)
}

fn validate(common: &Common, argv: &[String]) -> Result<(), Failure> {
    let params = load(common)?;
    let grid = delta_grid(common, params.omega_p)?;
    let state = steady_state(&params)?;
    let report = cross_validate(&params, &state, &grid)?;
    let mut out = output(common);
    out.say(format!(
        "max relative deviation {:.3e} at delta/omega_p = {:.6}, max oracle residual {:.3e}",
        report.max_rel_dev,
        report.argmax_delta / params.omega_p,
        report.max_residual
    ));
    let failures = report.failures().count();
    let manifest = run_manifest(common, &params, argv, &[]);
    let verdict = if failures > 0 {
        Some(format!(
            "{failures} grid points failed (condition limit {MAX_CONDITION:e})"
        ))
    } else if !(report.max_rel_dev < VALIDATION_TOLERANCE) {
        Some(format!(
            "closed form deviates from the direct solve by {:.3e} (limit {VALIDATION_TOLERANCE:e})",
            report.max_rel_dev
        ))
    } else {
        None
    };
    out.finish(&csv::validation_csv(&report, params.omega_p), manifest)?;
    match verdict {
        Some(msg) => Err(Failure::Check(msg)),
        None => Ok(()),
    }
}

fn preset(name: &str, out_path: Option<&Path>, grid: Option<usize>, prominence: f64, argv: &[String]) -> Result<(), Failure> {
    check_prominence(prominence)?;
    points(grid, 1)?;
    let preset = presets::preset(name, grid).ok_or_else(|| Failure::Usage(format!("unknown preset `{name}`")))?;
    let result = run::run_preset(&preset, prominence)?;
    let mut out = Output {
        out: out_path,
        summary: vec![format!("{}: {}", preset.name, preset.description)],
    };
    for line in &result.summary {
        out.say(line.clone());
    }
    let manifest = out_path.map(|_| {
        let mut notes: Vec<String> = vec!["parameters below are the shared template; series overrides:".into()];
        notes.extend(preset.series.iter().map(|s| format!("  series {}", s.label)));
        manifest(&preset.template, &argv_command(argv), &notes)
    });
    if let (Some(path), Some(crossings)) = (out_path, &result.crossings_csv) {
        let mut s = path.as_os_str().to_owned();
        s.push(".crossings.csv");
        write(Path::new(&s), crossings)?;
    } else if let Some(crossings) = &result.crossings_csv {
        eprint!("{crossings}");
    }
    out.finish(&result.csv, manifest)
}

fn argv_command(argv: &[String]) -> String {
    std::iter::once("magnomech".to_string())
        .chain(argv.iter().skip(1).cloned())
        .collect::<Vec<_>>()
        .join(" ")
}

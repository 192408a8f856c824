use std::ffi::OsString;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

use biphoton_core::entanglement::entropy_of_entanglement;
use biphoton_core::schmidt::{oracle_reduced_density, schmidt_decompose, schmidt_eigenvalues, DEFAULT_RETAINED};
use biphoton_core::sweep::{
    convergence_check, find_extrema, ParamPath, SweepPlan, DEFAULT_CELL_RESOLUTION,
};
use biphoton_core::{build_kernel, spectral_amplitude, FrequencyGrid, QuadratureScheme};
use clap::{Args, Parser, Subcommand};

use crate::config::{self, AxisSection, ConfigError, ConfigFile, EnsembleEntry, Loaded, Real, SweepSection};
use crate::output::{self, fmt_f64, RunManifest};
use crate::parallel::{par_sweep, worker_count};
use crate::phase::parse_phase;

/// Process exit status.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[repr(i32)]
pub enum ExitCode {
    Success = 0,
    Usage = 1,
    Numerical = 2,
    NullKernel = 3,
}

#[derive(Debug, Parser)]
#[command(name = "biphoton", version, about = "Schmidt decomposition and entanglement entropy of multiplexed biphoton sources")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Args)]
struct Source {
    /// TOML configuration file.
    #[arg(long, short)]
    config: Option<PathBuf>,
    /// Start from a preset (two-symmetric, three-symmetric).
    #[arg(long)]
    preset: Option<String>,
    /// Set a parameter, e.g. `--set delta_p1=5 --set theta2=4/3pi`.
    #[arg(long = "set", value_name = "PARAM=VALUE")]
    set: Vec<String>,
    /// Points per frequency axis.
    #[arg(long)]
    n: Option<usize>,
    /// Half-width of the square spectral window, in Γ₃.
    #[arg(long)]
    window: Option<f64>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Print the (unnormalized) joint spectral amplitude at one point.
    Eval {
        #[command(flatten)]
        source: Source,
        /// Signal detuning Δω_s in Γ₃.
        #[arg(long, allow_hyphen_values = true, default_value = "0")]
        ws: String,
        /// Idler detuning Δω_i in Γ₃.
        #[arg(long, allow_hyphen_values = true, default_value = "0")]
        wi: String,
    },
    /// Write Schmidt eigenvalues and mode functions.
    Decompose {
        #[command(flatten)]
        source: Source,
        #[arg(long, default_value = ".")]
        out: PathBuf,
        /// Mode pairs to keep and write.
        #[arg(long, default_value_t = DEFAULT_RETAINED)]
        modes: usize,
    },
    /// Print the entropy of entanglement in bits.
    Entropy {
        #[command(flatten)]
        source: Source,
        #[arg(long, default_value = ".")]
        out: PathBuf,
    },
    /// Map the entropy over one or two parameter axes.
    Sweep {
        #[command(flatten)]
        source: Source,
        /// `PARAM=START:STOP:POINTS` or `PARAM=V1,V2,...`, e.g. `theta2=0:2pi:33`.
        #[arg(long, allow_hyphen_values = true)]
        axis1: Option<String>,
        #[arg(long, allow_hyphen_values = true)]
        axis2: Option<String>,
        /// Kernel points per axis for each cell (default 512).
        #[arg(long)]
        resolution: Option<usize>,
        /// Worker threads (default: $BIPHOTON_WORKERS or all cores).
        #[arg(long)]
        workers: Option<usize>,
        #[arg(long, default_value = ".")]
        out: PathBuf,
    },
    /// Grid-convergence and oracle checks; exits 2 on a tolerance breach.
    Check {
        #[command(flatten)]
        source: Source,
        #[arg(long, default_value_t = 2)]
        factor: usize,
        /// Largest accepted entropy change under refinement, in bits.
        #[arg(long, default_value_t = 1e-3)]
        tol: f64,
        /// Points per axis for the oracle comparison.
        #[arg(long, default_value_t = 128)]
        oracle_n: usize,
        #[arg(long, default_value_t = 1e-8)]
        oracle_tol: f64,
    },
}

#[derive(Debug, thiserror::Error)]
enum Failure {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Core(#[from] biphoton_core::Error),
    #[error("{0}")]
    Io(#[from] std::io::Error),
    #[error("{0}")]
    Csv(#[from] csv::Error),
    #[error("{0}")]
    Check(String),
}

impl Failure {
    fn code(&self) -> ExitCode {
        match self {
            Failure::Usage(_) => ExitCode::Usage,
            Failure::Core(e) if e.is_null_kernel() => ExitCode::NullKernel,
            _ => ExitCode::Numerical,
        }
    }
}

/// Run with process stdout/stderr.
pub fn run<I, T>(args: I) -> ExitCode
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    run_with(args, &mut stdout.lock(), &mut stderr.lock())
}

pub fn run_with<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> ExitCode
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = write!(err, "{}", e.render());
            return if e.use_stderr() { ExitCode::Usage } else { ExitCode::Success };
        }
    };
    match dispatch(cli.command, out) {
        Ok(()) => ExitCode::Success,
        Err(f) => {
            let code = f.code();
            let _ = writeln!(err, "error: {f}");
            code
        }
    }
}

fn dispatch(command: Command, out: &mut dyn Write) -> Result<(), Failure> {
    match command {
        Command::Eval { source, ws, wi } => eval(&source, &ws, &wi, out),
        Command::Decompose { source, out: dir, modes } => decompose(&source, &dir, modes, out),
        Command::Entropy { source, out: dir } => entropy(&source, &dir, out),
        Command::Sweep { source, axis1, axis2, resolution, workers, out: dir } => {
            sweep(&source, axis1.as_deref(), axis2.as_deref(), resolution, workers, &dir, out)
        }
        Command::Check { source, factor, tol, oracle_n, oracle_tol } => {
            check(&source, factor, tol, oracle_n, oracle_tol, out)
        }
    }
}

fn parse_assignment(text: &str) -> Result<(String, f64), Failure> {
    let (k, v) = text
        .split_once('=')
        .ok_or_else(|| Failure::Usage(format!("expected PARAM=VALUE, got `{text}`")))?;
    let value = parse_phase(v).map_err(Failure::Usage)?;
    Ok((k.trim().to_string(), value))
}

/// Config file after command-line overrides, and its validated form.
fn load(source: &Source) -> Result<(ConfigFile, Loaded), Failure> {
    let mut file = match &source.config {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| ConfigError::Io { path: path.display().to_string(), source: e })?;
            config::parse_config(&text, &path.display().to_string())?
        }
        None => ConfigFile::default(),
    };
    if file.ensembles.is_empty() && file.sweep.is_none() && source.preset.is_none() {
        // nothing specified: the unshifted single-ensemble source
        file.ensembles.push(EnsembleEntry { delta_p: 0.0, delta_q: 0.0, theta: Real(0.0) });
    }
    if let Some(p) = &source.preset {
        file.sweep.get_or_insert_with(SweepSection::default).preset = Some(p.clone());
    }
    for s in &source.set {
        let (key, value) = parse_assignment(s)?;
        let path: ParamPath = key.parse().map_err(|e: biphoton_core::Error| Failure::Usage(e.to_string()))?;
        match file.sweep.as_mut() {
            Some(sweep) if file.ensembles.is_empty() => {
                sweep.fixed.insert(path.to_string(), Real(value));
            }
            _ => {
                let count = file.ensembles.len();
                let e = file.ensembles.get_mut(path.ensemble).ok_or_else(|| {
                    Failure::Usage(format!("{path}: the config has {count} ensembles"))
                })?;
                match path.field {
                    biphoton_core::sweep::Field::DeltaP => e.delta_p = value,
                    biphoton_core::sweep::Field::DeltaQ => e.delta_q = value,
                    biphoton_core::sweep::Field::Theta => e.theta = Real(value),
                }
            }
        }
    }
    if let Some(n) = source.n {
        file.grid.n_s = n;
        file.grid.n_i = n;
    }
    if let Some(w) = source.window {
        (file.grid.s_min, file.grid.s_max, file.grid.i_min, file.grid.i_max) = (-w, w, -w, w);
    }
    let loaded = file.resolve()?;
    Ok((file, loaded))
}

fn resolved_parameters(file: &ConfigFile, loaded: &Loaded, grid: &FrequencyGrid) -> ConfigFile {
    let mut p = ConfigFile::from_parts(&loaded.config, grid);
    p.sweep = file.sweep.clone();
    p
}

fn create(path: &Path) -> Result<BufWriter<File>, Failure> {
    Ok(BufWriter::new(File::create(path)?))
}

fn eval(source: &Source, ws: &str, wi: &str, out: &mut dyn Write) -> Result<(), Failure> {
    let (_, loaded) = load(source)?;
    let ws = parse_phase(ws).map_err(Failure::Usage)?;
    let wi = parse_phase(wi).map_err(Failure::Usage)?;
    // a cancelling configuration has no state to describe
    build_kernel(&loaded.config, &loaded.grid)?;
    let f = spectral_amplitude(&loaded.config, ws, wi);
    writeln!(out, "{} {}", fmt_f64(f.re), fmt_f64(f.im))?;
    Ok(())
}

fn decompose(source: &Source, dir: &Path, modes: usize, out: &mut dyn Write) -> Result<(), Failure> {
    let start = Instant::now();
    let (file, loaded) = load(source)?;
    let kernel = build_kernel(&loaded.config, &loaded.grid)?;
    let spectrum = schmidt_decompose(&kernel, modes)?;
    std::fs::create_dir_all(dir)?;

    let eig_path = dir.join("eigenvalues.csv");
    output::write_eigenvalues(create(&eig_path)?, &spectrum)?;
    let kept = spectrum.retained_count();
    let signal: Vec<_> = (1..=kept).map(|n| spectrum.signal_mode(n)).collect::<Result<_, _>>()?;
    let idler: Vec<_> = (1..=kept).map(|n| spectrum.idler_mode(n)).collect::<Result<_, _>>()?;
    let sig_path = dir.join("signal_modes.csv");
    let idl_path = dir.join("idler_modes.csv");
    output::write_modes(create(&sig_path)?, loaded.grid.signal(), &signal)?;
    output::write_modes(create(&idl_path)?, loaded.grid.idler(), &idler)?;

    let s = entropy_of_entanglement(&spectrum)?;
    writeln!(out, "S_bits={} lambda_1={} digest={}", fmt_f64(s.bits), fmt_f64(spectrum.eigenvalues()[0]), s.config_digest)?;

    let mut manifest = RunManifest::new("decompose", resolved_parameters(&file, &loaded, &loaded.grid));
    manifest.arguments.insert("modes".into(), modes.to_string());
    manifest.outputs = vec![eig_path, sig_path, idl_path];
    manifest.write(dir, start.elapsed())?;
    Ok(())
}

fn entropy(source: &Source, dir: &Path, out: &mut dyn Write) -> Result<(), Failure> {
    let start = Instant::now();
    let (file, loaded) = load(source)?;
    let kernel = build_kernel(&loaded.config, &loaded.grid)?;
    let spectrum = schmidt_decompose(&kernel, DEFAULT_RETAINED)?;
    let s = entropy_of_entanglement(&spectrum)?;
    writeln!(out, "S_bits={} lambda_tail={} digest={}", fmt_f64(s.bits), fmt_f64(s.lambda_tail), s.config_digest)?;
    std::fs::create_dir_all(dir)?;
    let mut manifest = RunManifest::new("entropy", resolved_parameters(&file, &loaded, &loaded.grid));
    manifest.arguments.insert("S_bits".into(), fmt_f64(s.bits));
    manifest.write(dir, start.elapsed())?;
    Ok(())
}

/// `PARAM=START:STOP:POINTS` or `PARAM=V1,V2,...`.
fn parse_axis(text: &str) -> Result<AxisSection, Failure> {
    let usage = || Failure::Usage(format!("cannot parse axis `{text}` (expected PARAM=START:STOP:POINTS or PARAM=V1,V2,...)"));
    let (target, spec) = text.split_once('=').ok_or_else(usage)?;
    let mut section =
        AxisSection { target: target.trim().to_string(), values: None, start: None, stop: None, points: None, link: None };
    let parts: Vec<&str> = spec.split(':').collect();
    if parts.len() == 3 {
        section.start = Some(Real(parse_phase(parts[0]).map_err(Failure::Usage)?));
        section.stop = Some(Real(parse_phase(parts[1]).map_err(Failure::Usage)?));
        section.points = Some(parts[2].trim().parse().map_err(|_| usage())?);
    } else if parts.len() == 1 {
        let values = spec
            .split(',')
            .map(|v| parse_phase(v).map(Real))
            .collect::<Result<Vec<_>, _>>()
            .map_err(Failure::Usage)?;
        section.values = Some(values);
    } else {
        return Err(usage());
    }
    Ok(section)
}

fn sweep(
    source: &Source,
    axis1: Option<&str>,
    axis2: Option<&str>,
    resolution: Option<usize>,
    workers: Option<usize>,
    dir: &Path,
    out: &mut dyn Write,
) -> Result<(), Failure> {
    let start = Instant::now();
    let (mut file, _) = load(source)?;
    {
        let section = file.sweep.get_or_insert_with(SweepSection::default);
        if let Some(a) = axis1 {
            section.axis1 = Some(parse_axis(a)?);
        }
        if let Some(a) = axis2 {
            section.axis2 = Some(parse_axis(a)?);
        }
        if let Some(r) = resolution {
            section.resolution = Some(r);
        }
    }
    let loaded = file.resolve()?;
    let spec = loaded.sweep.clone().expect("sweep section was inserted");
    let axis1 = spec
        .axis1
        .ok_or_else(|| Failure::Usage("sweep needs an axis (--axis1 or [sweep.axis1])".into()))?;
    let template = spec.template;

    let res = spec.resolution.unwrap_or(DEFAULT_CELL_RESOLUTION);
    let g = &loaded.grid;
    let cell_grid = FrequencyGrid::new(g.signal().range(), g.idler().range(), res, res, g.scheme())?;
    let plan = SweepPlan::new(template, axis1, spec.axis2, cell_grid.clone())?;
    let map = par_sweep(&plan, workers.unwrap_or_else(worker_count));

    std::fs::create_dir_all(dir)?;
    let map_path = dir.join("map.csv");
    output::write_map(create(&map_path)?, &map)?;
    let ext_path = dir.join("extrema.csv");
    match find_extrema(&map) {
        Ok(report) => {
            output::write_extrema(create(&ext_path)?, &report)?;
            let fmt = |c: (f64, Option<f64>)| match c.1 {
                Some(b) => format!("({}, {})", fmt_f64(c.0), fmt_f64(b)),
                None => format!("({})", fmt_f64(c.0)),
            };
            writeln!(
                out,
                "cells={} failures={} global_min={} at {} global_max={} at {}",
                plan.cell_count(),
                map.failures.len(),
                fmt_f64(report.global_min.value),
                fmt(report.global_min.coords),
                fmt_f64(report.global_max.value),
                fmt(report.global_max.coords),
            )?;
        }
        Err(biphoton_core::Error::EmptyMap) => {
            let mut w = create(&ext_path)?;
            writeln!(w, "kind,axis1,axis2,S_bits")?;
            writeln!(out, "cells={} failures={} (no finite cells)", plan.cell_count(), map.failures.len())?;
        }
        Err(e) => return Err(e.into()),
    }

    let mut params = resolved_parameters(&file, &loaded, &loaded.grid);
    params.sweep = file.sweep.clone();
    let mut manifest = RunManifest::new("sweep", params);
    manifest.arguments.insert("cell_resolution".into(), res.to_string());
    manifest.outputs = vec![map_path, ext_path];
    manifest.write(dir, start.elapsed())?;
    Ok(())
}

fn check(source: &Source, factor: usize, tol: f64, oracle_n: usize, oracle_tol: f64, out: &mut dyn Write) -> Result<(), Failure> {
    let (_, loaded) = load(source)?;
    let g = &loaded.grid;
    let conv = convergence_check(&loaded.config, g, factor)?;
    let conv_ok = conv.delta < tol;
    writeln!(
        out,
        "convergence: S({}x{})={} S(x{factor})={} |dS|={} tol={} {}",
        g.signal().len(),
        g.idler().len(),
        fmt_f64(conv.coarse),
        fmt_f64(conv.fine),
        fmt_f64(conv.delta),
        fmt_f64(tol),
        if conv_ok { "PASS" } else { "FAIL" }
    )?;

    let (ns, ni) = (g.signal().len().min(oracle_n), g.idler().len().min(oracle_n));
    let oracle_grid = FrequencyGrid::new(g.signal().range(), g.idler().range(), ns, ni, g.scheme())
        .or_else(|_| FrequencyGrid::new(g.signal().range(), g.idler().range(), ns, ni, QuadratureScheme::UniformMidpoint))?;
    let kernel = build_kernel(&loaded.config, &oracle_grid)?;
    let svd = schmidt_eigenvalues(&kernel)?;
    let oracle = oracle_reduced_density(&kernel)?;
    let worst = svd.iter().zip(&oracle).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    let oracle_ok = worst <= oracle_tol;
    writeln!(
        out,
        "oracle: grid {ns}x{ni} max|lambda_svd - lambda_rho|={} tol={} {}",
        fmt_f64(worst),
        fmt_f64(oracle_tol),
        if oracle_ok { "PASS" } else { "FAIL" }
    )?;
    if conv_ok && oracle_ok {
        Ok(())
    } else {
        Err(Failure::Check("tolerance breached".into()))
    }
}


//! `qcorr` command line: point reports, sweeps, boundary curves, measurement
//! designs and simulated experiments.

pub mod csv_io;
pub mod error;
pub mod format;

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::json;

use qcorr_core::expsim::{estimate_measures, MeasureEstimates, PauliCounts};
use qcorr_core::steering::{
    appendix_d_settings, combined_axes_16, lhs_bound, platonic_axes, Solid, C16_THRESHOLD,
};
use qcorr_core::sweep::{
    evaluate_point, sweep_grid, trace_boundary_curve, BoundaryCurve, Measure, ParamRange,
    ScanOptions,
};
use qcorr_core::unsteering::UnsteeringVariant;
use qcorr_core::{family_state, StatePoint};

pub use csv_io::{parse_sweep_csv, write_sweep_csv, SweepRow, SWEEP_HEADER};
pub use error::CliError;
pub use format::{fmt_num, parse_angle};

use csv_io::{csv_writer, finish};

#[derive(Debug, Parser)]
#[command(
    name = "qcorr",
    version,
    about = "Nonlocal correlations of two qubits under amplitude damping"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Args)]
pub struct Output {
    /// Output file (written atomically); standard output when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum DesignSet {
    Octahedron,
    Cube,
    Icosahedron,
    Dodecahedron,
    Combined16,
    /// The tabulated 16-setting design evaluated at `--theta`, `--damping`.
    Table16,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Variant {
    Derived,
    AsPrinted,
}

fn angle_arg(s: &str) -> Result<f64, String> {
    parse_angle(s).map_err(|e| e.to_string())
}

fn measure_arg(s: &str) -> Result<Measure, String> {
    s.parse().map_err(|e: qcorr_core::QcError| e.to_string())
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Every quantifier at one (theta, D).
    Measures {
        #[arg(long, value_parser = angle_arg, allow_hyphen_values = true)]
        theta: f64,
        #[arg(long, allow_hyphen_values = true)]
        damping: f64,
        #[command(flatten)]
        output: Output,
    },
    /// Row-major grid, theta outer.
    Sweep {
        #[arg(long, value_parser = angle_arg, default_value = "0")]
        theta_min: f64,
        #[arg(long, value_parser = angle_arg, default_value = "0.5pi")]
        theta_max: f64,
        #[arg(long, default_value_t = 51)]
        theta_steps: usize,
        #[arg(long, default_value_t = 0.0)]
        d_min: f64,
        #[arg(long, default_value_t = 1.0)]
        d_max: f64,
        #[arg(long, default_value_t = 51)]
        d_steps: usize,
        #[command(flatten)]
        output: Output,
    },
    /// Sudden-death curve D*(theta) of one measure.
    Boundary {
        #[arg(long, value_parser = measure_arg)]
        measure: Measure,
        #[arg(long, value_parser = angle_arg, default_value = "0.01pi")]
        theta_min: f64,
        #[arg(long, value_parser = angle_arg, default_value = "0.49pi")]
        theta_max: f64,
        #[arg(long, default_value_t = 100)]
        theta_steps: usize,
        #[arg(long, default_value_t = 1e-3)]
        scan_step: f64,
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
        #[arg(long, value_enum, default_value_t = Variant::Derived)]
        variant: Variant,
        #[command(flatten)]
        output: Output,
    },
    /// Measurement axes and their local-hidden-state bound.
    Designs {
        #[arg(long, value_enum)]
        set: DesignSet,
        #[arg(long, value_parser = angle_arg, default_value = "0.25pi")]
        theta: f64,
        #[arg(long, default_value_t = 0.0)]
        damping: f64,
        #[command(flatten)]
        output: Output,
    },
    /// Simulated counting experiment with bootstrap error bars.
    Experiment {
        #[arg(long, value_parser = angle_arg)]
        theta: f64,
        #[arg(long)]
        damping: f64,
        /// Mean counts per setting.
        #[arg(long, default_value_t = 1e5)]
        counts: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 100)]
        replicas: usize,
        #[command(flatten)]
        output: Output,
    },
}

impl Command {
    pub fn output(&self) -> &Output {
        match self {
            Command::Measures { output, .. }
            | Command::Sweep { output, .. }
            | Command::Boundary { output, .. }
            | Command::Designs { output, .. }
            | Command::Experiment { output, .. } => output,
        }
    }
}

fn to_json<T: Serialize>(value: &T) -> Result<Vec<u8>, CliError> {
    let mut v = serde_json::to_value(value)?;
    format::round_json(&mut v);
    let mut out = serde_json::to_vec_pretty(&v)?;
    out.push(b'\n');
    Ok(out)
}

fn solid_of(set: DesignSet) -> Option<Solid> {
    match set {
        DesignSet::Octahedron => Some(Solid::Octahedron),
        DesignSet::Cube => Some(Solid::Cube),
        DesignSet::Icosahedron => Some(Solid::Icosahedron),
        DesignSet::Dodecahedron => Some(Solid::Dodecahedron),
        _ => None,
    }
}

fn render_boundary(curve: &BoundaryCurve, format: Format) -> Result<Vec<u8>, CliError> {
    if format == Format::Json {
        return to_json(curve);
    }
    let mut w = csv_writer();
    w.write_record(["kind", "theta", "damping", "branch", "next_branch"])?;
    for s in &curve.samples {
        let branch = s.branch.map(|b| b.as_str()).unwrap_or("");
        w.write_record(["sample", &fmt_num(s.theta), &fmt_num(s.d_star), branch, ""])?;
    }
    for s in &curve.switch_points {
        w.write_record([
            "switch",
            &fmt_num(s.theta),
            &fmt_num(s.damping),
            s.from.as_str(),
            s.to.as_str(),
        ])?;
    }
    finish(w)
}

fn render_designs(set: DesignSet, p: StatePoint, format: Format) -> Result<Vec<u8>, CliError> {
    if set == DesignSet::Table16 {
        let report = appendix_d_settings(p);
        if format == Format::Json {
            return to_json(&report);
        }
        let mut w = csv_writer();
        w.write_record([
            "index",
            "bob_raw_x",
            "bob_raw_y",
            "bob_raw_z",
            "bob_raw_norm",
            "bob_x",
            "bob_y",
            "bob_z",
            "alice_polar",
            "alice_azimuth",
            "alice_x",
            "alice_y",
            "alice_z",
            "bob_deviation",
            "alice_deviation",
        ])?;
        for r in &report.rows {
            let mut rec = vec![r.index.to_string()];
            rec.extend(r.bob_raw.iter().map(|v| fmt_num(*v)));
            rec.push(fmt_num(r.bob_raw_norm));
            rec.extend(r.bob.iter().map(|v| fmt_num(*v)));
            rec.push(fmt_num(r.alice_polar));
            rec.push(fmt_num(r.alice_azimuth));
            rec.extend(r.alice.iter().map(|v| fmt_num(*v)));
            rec.push(fmt_num(r.bob_deviation));
            rec.push(r.alice_deviation.map(fmt_num).unwrap_or_default());
            w.write_record(rec)?;
        }
        return finish(w);
    }

    let axes = match solid_of(set) {
        Some(solid) => platonic_axes(solid),
        None => combined_axes_16(),
    };
    let bound = lhs_bound(&axes)?;
    if format == Format::Json {
        return to_json(&json!({
            "set": axes.label(),
            "axes": axes.axes(),
            "lhs_bound": bound,
            "threshold": C16_THRESHOLD,
        }));
    }
    let mut w = csv_writer();
    w.write_record(["set", "index", "x", "y", "z", "lhs_bound", "threshold"])?;
    for (k, n) in axes.axes().iter().enumerate() {
        w.write_record([
            axes.label().to_string(),
            (k + 1).to_string(),
            fmt_num(n[0]),
            fmt_num(n[1]),
            fmt_num(n[2]),
            fmt_num(bound),
            fmt_num(C16_THRESHOLD),
        ])?;
    }
    finish(w)
}

#[derive(Serialize)]
struct ExperimentReport {
    point: StatePoint,
    mean_counts: f64,
    seed: u64,
    replicas: usize,
    estimates: MeasureEstimates,
}

fn render_experiment(report: &ExperimentReport, format: Format) -> Result<Vec<u8>, CliError> {
    if format == Format::Json {
        return to_json(report);
    }
    let e = &report.estimates;
    let mut w = csv_writer();
    w.write_record(["measure", "value", "std_error", "replicas"])?;
    for (name, est) in [
        ("concurrence", e.concurrence),
        ("bell_S", e.bell_s),
        ("steering_T16", e.t16),
        ("unsteering_tU", e.t_u),
    ] {
        w.write_record([
            name.to_string(),
            fmt_num(est.value),
            fmt_num(est.std_error),
            est.replicas.to_string(),
        ])?;
    }
    finish(w)
}

/// Output bytes of a command; no side effects.
pub fn render(command: &Command) -> Result<Vec<u8>, CliError> {
    let format = command.output().format;
    match command {
        Command::Measures { theta, damping, .. } => {
            let report = evaluate_point(StatePoint::new(*theta, *damping)?)?;
            match format {
                Format::Json => to_json(&report),
                Format::Csv => write_sweep_csv(&[report]),
            }
        }
        Command::Sweep {
            theta_min,
            theta_max,
            theta_steps,
            d_min,
            d_max,
            d_steps,
            ..
        } => {
            let theta = ParamRange::new(*theta_min, *theta_max, *theta_steps)?;
            let damping = ParamRange::new(*d_min, *d_max, *d_steps)?;
            let reports = sweep_grid(theta, damping)?;
            match format {
                Format::Json => to_json(&reports),
                Format::Csv => write_sweep_csv(&reports),
            }
        }
        Command::Boundary {
            measure,
            theta_min,
            theta_max,
            theta_steps,
            scan_step,
            tol,
            variant,
            ..
        } => {
            let opts = ScanOptions {
                scan_step: *scan_step,
                tol: *tol,
                unsteering_variant: match variant {
                    Variant::Derived => UnsteeringVariant::Derived,
                    Variant::AsPrinted => UnsteeringVariant::AsPrinted,
                },
            };
            let curve =
                trace_boundary_curve(*measure, *theta_min, *theta_max, *theta_steps, &opts)?;
            render_boundary(&curve, format)
        }
        Command::Designs {
            set,
            theta,
            damping,
            ..
        } => render_designs(*set, StatePoint::new(*theta, *damping)?, format),
        Command::Experiment {
            theta,
            damping,
            counts,
            seed,
            replicas,
            ..
        } => {
            let point = StatePoint::new(*theta, *damping)?;
            let estimates = estimate_measures(&family_state(point), *counts, *seed, *replicas)?;
            render_experiment(
                &ExperimentReport {
                    point,
                    mean_counts: *counts,
                    seed: *seed,
                    replicas: *replicas,
                    estimates,
                },
                format,
            )
        }
    }
}

/// Writes `bytes` to `out` through a temporary file in the same directory, or
/// to standard output.
pub fn write_output(bytes: &[u8], out: Option<&Path>) -> Result<(), CliError> {
    match out {
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(bytes)?;
            stdout.flush()?;
        }
        Some(path) => {
            let dir = path
                .parent()
                .filter(|p| !p.as_os_str().is_empty())
                .unwrap_or(Path::new("."));
            let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
            tmp.write_all(bytes)?;
            tmp.as_file().sync_all()?;
            tmp.persist(path).map_err(|e| CliError::Io(e.error))?;
        }
    }
    Ok(())
}

/// Applies `QCORR_THREADS` to the global worker pool.
pub fn configure_threads(value: Option<&str>) -> Result<(), CliError> {
    let Some(v) = value else {
        return Ok(());
    };
    let n: usize = v.trim().parse().ok().filter(|n| *n > 0).ok_or_else(|| {
        CliError::Input(format!("QCORR_THREADS = {v:?} is not a positive integer"))
    })?;
    // A second initialization in the same process keeps the first pool.
    let _ = rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global();
    Ok(())
}

/// Decodes 36 little-endian `u32` counts, ordered `[alice][bob][outcome]`
/// over the x, y, z Pauli settings.
pub fn decode_pauli_counts(bytes: &[u8]) -> Result<PauliCounts, CliError> {
    if bytes.len() != 36 * 4 {
        return Err(CliError::Input(format!(
            "expected 144 bytes of counts, got {}",
            bytes.len()
        )));
    }
    let mut counts = [[[0.0; 4]; 3]; 3];
    for (k, chunk) in bytes.chunks_exact(4).enumerate() {
        let v = u32::from_le_bytes(chunk.try_into().expect("4-byte chunk"));
        counts[k / 12][(k / 4) % 3][k % 4] = v as f64;
    }
    Ok(PauliCounts(counts))
}

/// Parses `args`, runs the command and returns the process exit status.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 1 } else { 0 };
        }
    };
    let threads = std::env::var("QCORR_THREADS").ok();
    let result = configure_threads(threads.as_deref()).and_then(|()| {
        let bytes = render(&cli.command)?;
        write_output(&bytes, cli.command.output().out.as_deref())
    });
    match result {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("qcorr: {e}");
            e.exit_code()
        }
    }
}

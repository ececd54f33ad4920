//! `qnodes`: sweeps, verification, eigensolves and node reports for the
//! particle in a box, the particle on a ring and the harmonic oscillator.

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use qnodes_core::analytic::Provenance;
use qnodes_core::report::{self, Format, SweepConfig};
use qnodes_core::{Constants, Error, Result, SystemKind, SystemSpec};

const EXIT_VERIFY_FAILED: u8 = 1;
const EXIT_USAGE: u8 = 2;
const EXIT_NUMERIC: u8 = 3;

#[derive(Parser)]
#[command(name = "qnodes", version, about = "Uncertainty products and node counts for textbook quantum systems")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Tabulate energies, uncertainties and node counts over a level range.
    Sweep(SweepArgs),
    /// Check bounds, node laws and cross-path agreement; exit 1 on any failure.
    Verify {
        #[command(flatten)]
        sweep: SweepArgs,
        /// Subtract hbar/4 from the first path's product at this level (checker self-test).
        #[arg(long, allow_hyphen_values = true)]
        corrupt: Option<i64>,
    },
    /// Lowest finite-difference eigenvalues against the closed forms.
    Eigensolve {
        #[command(flatten)]
        system: SystemArgs,
        /// Number of levels to compute.
        #[arg(long, default_value_t = 6)]
        count: usize,
        #[arg(long)]
        grid_points: Option<usize>,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Node counts and positions of sampled states.
    Nodes(SweepArgs),
}

#[derive(Args)]
struct SystemArgs {
    /// box, ring or oscillator.
    #[arg(long)]
    system: String,
    /// Physical parameter as key=value (length/a, mass/m, inertia/I, omega/w).
    #[arg(long = "param", value_name = "KEY=VALUE")]
    params: Vec<String>,
    #[arg(long, default_value_t = 1.0)]
    hbar: f64,
}

#[derive(Args)]
struct OutputArgs {
    #[arg(long, default_value = "csv")]
    format: String,
    /// Write to this file instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SweepArgs {
    #[command(flatten)]
    system: SystemArgs,
    /// Inclusive range LO:HI, or a single level.
    #[arg(long, allow_hyphen_values = true)]
    levels: String,
    /// Comma-separated subset of analytic, oracle, eigen.
    #[arg(long, default_value = "analytic")]
    paths: String,
    #[arg(long)]
    grid_points: Option<usize>,
    /// Largest relative disagreement accepted between paths.
    #[arg(long, default_value_t = report::DEFAULT_TOLERANCE)]
    tol: f64,
    /// Evaluate levels on one thread.
    #[arg(long)]
    sequential: bool,
    #[command(flatten)]
    output: OutputArgs,
}

fn parse_f64(key: &str, value: &str) -> Result<f64> {
    value.trim().parse().map_err(|_| Error::Config(format!("parameter {key}: '{value}' is not a number")))
}

fn build_spec(args: &SystemArgs) -> Result<SystemSpec<f64>> {
    let kind: SystemKind = args.system.parse()?;
    let constants = Constants::new(args.hbar).map_err(|e| Error::Config(e.to_string()))?;
    let (mut length, mut mass, mut inertia, mut omega) = (1.0, 1.0, 1.0, 1.0);
    for p in &args.params {
        let (key, value) = p.split_once('=').ok_or_else(|| Error::Config(format!("expected key=value, got '{p}'")))?;
        let slot = match (kind, key.trim()) {
            (SystemKind::Box, "length" | "a") => &mut length,
            (SystemKind::Box | SystemKind::Oscillator, "mass" | "m") => &mut mass,
            (SystemKind::Ring, "inertia" | "I") => &mut inertia,
            (SystemKind::Oscillator, "omega" | "w") => &mut omega,
            (_, other) => return Err(Error::Config(format!("unknown parameter '{other}' for {kind}"))),
        };
        *slot = parse_f64(key, value)?;
    }
    let spec = match kind {
        SystemKind::Box => SystemSpec::particle_in_box(length, mass, constants),
        SystemKind::Ring => SystemSpec::ring(inertia, constants),
        SystemKind::Oscillator => SystemSpec::oscillator(mass, omega, constants),
    };
    spec.map_err(|e| Error::Config(e.to_string()))
}

fn parse_levels(s: &str) -> Result<(i64, i64)> {
    let bad = || Error::Config(format!("levels must be LO:HI or N, got '{s}'"));
    let parse = |t: &str| t.trim().parse::<i64>().map_err(|_| bad());
    match s.split_once(':') {
        Some((lo, hi)) => Ok((parse(lo)?, parse(hi)?)),
        None => parse(s).map(|n| (n, n)),
    }
}

fn parse_paths(s: &str) -> Result<Vec<Provenance>> {
    s.split(',').filter(|t| !t.trim().is_empty()).map(|t| t.trim().parse()).collect()
}

fn sweep_config(args: &SweepArgs) -> Result<SweepConfig> {
    let spec = build_spec(&args.system)?;
    let (lo, hi) = parse_levels(&args.levels)?;
    let mut cfg =
        SweepConfig::new(spec, lo, hi, &parse_paths(&args.paths)?)?.with_grid_points(args.grid_points)?.with_tolerance(args.tol)?;
    cfg.parallel = !args.sequential;
    Ok(cfg)
}

fn write_output(output: &OutputArgs, text: &str) -> Result<()> {
    let result = match &output.out {
        Some(path) => std::fs::write(path, text).map_err(|e| format!("{}: {e}", path.display())),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(text.as_bytes()).and_then(|_| stdout.flush()).map_err(|e| format!("stdout: {e}"))
        }
    };
    result.map_err(Error::Output)
}

fn run(cli: Cli) -> Result<u8> {
    match cli.command {
        Command::Sweep(args) => {
            let format: Format = args.output.format.parse()?;
            let cfg = sweep_config(&args)?;
            let rows = report::run_sweep(&cfg)?;
            write_output(&args.output, &report::emit(&rows, format, &report::sweep_metadata(&cfg)?)?)?;
            Ok(0)
        }
        Command::Verify { sweep, corrupt } => {
            let format: Format = sweep.output.format.parse()?;
            let mut cfg = sweep_config(&sweep)?;
            cfg.corrupt_level = corrupt;
            cfg.validate()?;
            let outcome = report::verify(&cfg)?;
            if sweep.output.out.is_some() {
                write_output(&sweep.output, &report::emit(&outcome.rows, format, &report::sweep_metadata(&cfg)?)?)?;
            }
            for failure in &outcome.failures {
                eprintln!("FAIL {failure}");
            }
            if outcome.passed() {
                println!("verified {} rows", outcome.rows.len());
                Ok(0)
            } else {
                eprintln!("{} check(s) failed over {} rows", outcome.failures.len(), outcome.rows.len());
                Ok(EXIT_VERIFY_FAILED)
            }
        }
        Command::Eigensolve { system, count, grid_points, output } => {
            let format: Format = output.format.parse()?;
            let spec = build_spec(&system)?;
            let rows = report::eigensolve_table(&spec, count, grid_points)?;
            let top = rows.last().map_or(0, |r| r.level);
            let meta = report::metadata(&spec, top, grid_points, &[Provenance::Eigen], report::DEFAULT_TOLERANCE)?;
            write_output(&output, &report::emit(&rows, format, &meta)?)?;
            Ok(0)
        }
        Command::Nodes(args) => {
            let format: Format = args.output.format.parse()?;
            let cfg = sweep_config(&args)?;
            let rows = report::node_table(&cfg)?;
            write_output(&args.output, &report::emit(&rows, format, &report::sweep_metadata(&cfg)?)?)?;
            Ok(0)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("qnodes: {e}");
            ExitCode::from(if e.is_usage() { EXIT_USAGE } else { EXIT_NUMERIC })
        }
    }
}

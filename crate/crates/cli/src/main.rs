use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};

use qsle_core::state_file::{read_state, write_state};
use qsle_core::{haar_random_state, OptConfig, PureState};

mod report;

#[derive(Parser, Debug)]
#[command(name = "qsle", version, about = "Geometric entanglement and minimal separabilization times")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Geometric measures E_m and the closest m-separable partition.
    Entanglement(StateArgs),
    /// Minimal time tau_m to reach an m-separable state (needs --omega).
    Tau(StateArgs),
    /// Evolve under the optimal Hamiltonian for tau_m and check the result is m-separable.
    Verify(StateArgs),
    /// Table of tau = arcsin(sqrt(E)) / omega for plotting.
    Figure(FigureArgs),
    /// Write a Haar-random state file.
    Sample(SampleArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum MSelect {
    All,
    One(usize),
}

impl FromStr for MSelect {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        if s.eq_ignore_ascii_case("all") {
            return Ok(MSelect::All);
        }
        s.parse()
            .map(MSelect::One)
            .map_err(|_| format!("expected an integer or \"all\", got {s:?}"))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Table,
    Csv,
    Json,
}

#[derive(Args, Debug)]
struct OutputArgs {
    #[arg(long, value_enum, default_value = "table")]
    format: Format,
    /// Write to this file instead of standard output.
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct StateArgs {
    /// JSON state file: {"dims": [...], "amplitudes": [[re, im], ...]}.
    #[arg(long)]
    input: PathBuf,
    /// Separability level, or "all" for m = 2..K.
    #[arg(long, default_value = "all")]
    m: MSelect,
    /// Angular frequency of the optimal Hamiltonian in rad/s.
    #[arg(long)]
    omega: Option<f64>,
    #[arg(long)]
    restarts: Option<usize>,
    #[arg(long)]
    max_iters: Option<usize>,
    #[arg(long)]
    tol: Option<f64>,
    #[arg(long)]
    seed: Option<u64>,
    #[command(flatten)]
    out: OutputArgs,
}

#[derive(Args, Debug)]
struct FigureArgs {
    /// Comma-separated angular frequencies.
    #[arg(long, value_delimiter = ',', default_value = "0.5,1,2")]
    omega: Vec<f64>,
    /// Either start:step:stop or a comma-separated list of values in [0, 1].
    #[arg(long, default_value = "0:0.01:1")]
    e_grid: String,
    #[command(flatten)]
    out: OutputArgs,
}

#[derive(Args, Debug)]
struct SampleArgs {
    /// Comma-separated subsystem dimensions.
    #[arg(long, value_delimiter = ',', required = true)]
    dims: Vec<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    output: PathBuf,
}

/// Failure with the process exit code it maps to.
#[derive(Debug)]
pub struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    pub fn usage(message: impl Into<String>) -> Self {
        Self {
            code: 2,
            message: message.into(),
        }
    }
}

impl From<qsle_core::Error> for Failure {
    fn from(e: qsle_core::Error) -> Self {
        Failure::usage(e.to_string())
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Self {
            code: 1,
            message: e.to_string(),
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    configure_threads();
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

fn configure_threads() {
    let Ok(raw) = std::env::var("QSLE_THREADS") else {
        return;
    };
    match raw.trim().parse::<usize>() {
        Ok(n) if n > 0 => {
            if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
                log::warn!("QSLE_THREADS ignored: {e}");
            }
        }
        _ => log::warn!("QSLE_THREADS={raw:?} is not a positive integer; ignored"),
    }
}

fn run(cli: Cli) -> Result<ExitCode, Failure> {
    match cli.command {
        Command::Entanglement(args) => {
            let (psi, cfg, ms) = load(&args)?;
            let mut out = open_output(&args.out)?;
            report::entanglement(&psi, &ms, &cfg, args.out.format, &mut out)?;
            out.flush()?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Tau(args) => {
            let omega = args
                .omega
                .ok_or_else(|| Failure::usage("tau needs --omega (rad/s)"))?;
            check_omega(omega)?;
            let (psi, cfg, ms) = load(&args)?;
            let mut out = open_output(&args.out)?;
            report::tau(&psi, &ms, omega, &cfg, args.out.format, &mut out)?;
            out.flush()?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Verify(args) => {
            let omega = args.omega.unwrap_or(1.0);
            check_omega(omega)?;
            let (psi, cfg, ms) = load(&args)?;
            let mut out = open_output(&args.out)?;
            let passed = report::verify(&psi, &ms, omega, &cfg, args.out.format, &mut out)?;
            out.flush()?;
            Ok(if passed {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            })
        }
        Command::Figure(args) => {
            for &w in &args.omega {
                check_omega(w)?;
            }
            let grid = parse_grid(&args.e_grid)?;
            let mut out = open_output(&args.out)?;
            report::figure(&args.omega, &grid, args.out.format, &mut out)?;
            out.flush()?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Sample(args) => {
            let psi = haar_random_state(&args.dims, args.seed)?;
            write_state(&args.output, &psi)?;
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn check_omega(omega: f64) -> Result<(), Failure> {
    if omega > 0.0 && omega.is_finite() {
        Ok(())
    } else {
        Err(Failure::usage(format!("--omega must be positive, got {omega}")))
    }
}

fn load(args: &StateArgs) -> Result<(PureState, OptConfig, Vec<usize>), Failure> {
    let psi = read_state(&args.input).map_err(|e| Failure::usage(e.to_string()))?;
    let defaults = OptConfig::default();
    let cfg = OptConfig {
        restarts: args.restarts.unwrap_or(defaults.restarts),
        max_iters: args.max_iters.unwrap_or(defaults.max_iters),
        tol: args.tol.unwrap_or(defaults.tol),
        seed: args.seed.unwrap_or(defaults.seed),
    };
    cfg.validate()?;
    let k = psi.num_subsystems();
    let ms = match args.m {
        MSelect::All if k < 2 => {
            return Err(Failure::usage("state has a single subsystem; no m >= 2 exists"))
        }
        MSelect::All => (2..=k).collect(),
        MSelect::One(m) if (2..=k).contains(&m) => vec![m],
        MSelect::One(m) => {
            return Err(Failure::usage(format!("--m must lie in [2, {k}], got {m}")))
        }
    };
    Ok((psi, cfg, ms))
}

fn open_output(args: &OutputArgs) -> Result<Box<dyn Write>, Failure> {
    Ok(match &args.output {
        Some(path) => Box::new(BufWriter::new(File::create(path)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

/// `start:step:stop` (inclusive, step counted from start) or `a,b,c`.
fn parse_grid(text: &str) -> Result<Vec<f64>, Failure> {
    let bad = || Failure::usage(format!("--e-grid: cannot parse {text:?}"));
    let num = |s: &str| s.trim().parse::<f64>().map_err(|_| bad());
    let grid: Vec<f64> = if let [start, step, stop] = text.split(':').collect::<Vec<_>>()[..] {
        let (start, step, stop) = (num(start)?, num(step)?, num(stop)?);
        if !(step > 0.0) || stop < start {
            return Err(bad());
        }
        let n = ((stop - start) / step + 1e-9).floor() as usize;
        (0..=n).map(|i| start + i as f64 * step).collect()
    } else {
        text.split(',').map(num).collect::<Result<_, _>>()?
    };
    if let Some(e) = grid.iter().find(|e| !(0.0..=1.0).contains(*e)) {
        return Err(Failure::usage(format!("--e-grid value {e} outside [0, 1]")));
    }
    Ok(grid)
}

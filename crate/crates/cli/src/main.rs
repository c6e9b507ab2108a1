mod commands;
mod report;

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};

use report::{Flags, RunReport};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] pseudovol::Error),

    #[error("{0}")]
    Input(String),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        use pseudovol::Error as E;
        match self {
            CliError::Core(E::DimensionCapExceeded { .. } | E::VertexProductCapExceeded { .. }) => 3,
            CliError::Core(_) | CliError::Input(_) => 2,
        }
    }
}

#[derive(Parser, Debug)]
#[command(name = "pseudovol", version, about = "Pseudovolumes and mixed pseudovolumes of convex bodies in C^n")]
struct Cli {
    #[command(flatten)]
    global: GlobalArgs,

    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct GlobalArgs {
    /// Monte Carlo samples per estimate.
    #[arg(long, global = true, default_value_t = 2_000_000)]
    pub samples: usize,

    #[arg(long, global = true, default_value_t = 42)]
    pub seed: u64,

    /// Rank and geometric tolerance (default 1e-9).
    #[arg(long, global = true)]
    pub tol: Option<f64>,

    /// Build face lattices with exact rational arithmetic.
    #[arg(long, global = true)]
    pub exact: bool,

    /// Recompute the result along an independent path and compare.
    #[arg(long, global = true)]
    pub oracle: bool,

    /// Write the JSON report to PATH, or to standard output when PATH is
    /// omitted or `-`.
    #[arg(long, global = true, num_args = 0..=1, default_missing_value = "-", value_name = "PATH")]
    pub json: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Phi {
    Rho,
    Unit,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Method {
    Interior,
    Boundary,
    Solid,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SuiteArg {
    Tables,
    Invariants,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Area distortion of the direction space of a polytope.
    Rho { file: PathBuf },
    /// Face lattice with volumes and distortion coefficients.
    Faces {
        file: PathBuf,
        #[arg(long)]
        dim: Option<usize>,
    },
    /// Outer angles of the faces of one dimension, or of the given faces.
    Angle {
        file: PathBuf,
        #[arg(long)]
        dim: Option<usize>,
        #[arg(long, value_delimiter = ',')]
        face: Vec<usize>,
    },
    /// Volume of a polytope in its affine hull.
    Volume { file: PathBuf },
    /// k-th intrinsic volume.
    Intrinsic {
        file: PathBuf,
        #[arg(long)]
        k: usize,
    },
    /// k-th intrinsic phi-volume.
    PhiVolume {
        file: PathBuf,
        #[arg(long)]
        k: usize,
        #[arg(long, value_enum, default_value_t = Phi::Rho)]
        phi: Phi,
    },
    /// n-pseudovolume with the per-face breakdown.
    Pseudovolume { file: PathBuf },
    /// Mixed pseudovolume of n polytopes, or of k polytopes and n - k unit balls.
    Mixed {
        #[arg(required = true)]
        files: Vec<PathBuf>,
        /// Number of unit-ball slots.
        #[arg(long)]
        ball: Option<usize>,
    },
    /// Pseudovolume of the eps-neighbourhood and its polynomial coefficients.
    EpsExpand {
        file: PathBuf,
        #[arg(long, default_value_t = 1.0)]
        eps: f64,
        /// Write eps,value rows for a grid on [0, eps].
        #[arg(long)]
        csv: Option<PathBuf>,
        #[arg(long, default_value_t = 21)]
        points: usize,
    },
    /// Pseudovolume of one smooth body, or mixed pseudovolume of n bodies.
    Smooth {
        #[arg(required = true)]
        bodies: Vec<PathBuf>,
        #[arg(long, value_enum, default_value_t = Method::Interior)]
        method: Method,
    },
    /// Mixed discriminant of n complex n x n matrices.
    Discriminant { file: PathBuf },
    /// Built-in verification suites.
    Verify {
        #[arg(long, value_enum, default_value_t = SuiteArg::Tables)]
        suite: SuiteArg,
    },
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Rho { .. } => "rho",
            Command::Faces { .. } => "faces",
            Command::Angle { .. } => "angle",
            Command::Volume { .. } => "volume",
            Command::Intrinsic { .. } => "intrinsic",
            Command::PhiVolume { .. } => "phi-volume",
            Command::Pseudovolume { .. } => "pseudovolume",
            Command::Mixed { .. } => "mixed",
            Command::EpsExpand { .. } => "eps-expand",
            Command::Smooth { .. } => "smooth",
            Command::Discriminant { .. } => "discriminant",
            Command::Verify { .. } => "verify",
        }
    }

    fn options(&self) -> Vec<(String, String)> {
        let kv = |k: &str, v: String| (k.to_string(), v);
        match self {
            Command::Faces { dim: Some(d), .. } => vec![kv("dim", d.to_string())],
            Command::Angle { dim, face, .. } => {
                let mut o = Vec::new();
                if let Some(d) = dim {
                    o.push(kv("dim", d.to_string()));
                }
                if !face.is_empty() {
                    o.push(kv("face", face.iter().map(|f| f.to_string()).collect::<Vec<_>>().join(",")));
                }
                o
            }
            Command::Intrinsic { k, .. } => vec![kv("k", k.to_string())],
            Command::PhiVolume { k, phi, .. } => vec![kv("k", k.to_string()), kv("phi", format!("{phi:?}").to_lowercase())],
            Command::Mixed { ball: Some(b), .. } => vec![kv("ball", b.to_string())],
            Command::EpsExpand { eps, csv, points, .. } => {
                let mut o = vec![kv("eps", eps.to_string()), kv("points", points.to_string())];
                if let Some(c) = csv {
                    o.push(kv("csv", c.display().to_string()));
                }
                o
            }
            Command::Smooth { method, .. } => vec![kv("method", format!("{method:?}").to_lowercase())],
            Command::Verify { suite } => vec![kv("suite", format!("{suite:?}").to_lowercase())],
            _ => Vec::new(),
        }
    }
}

fn emit(report: &RunReport, json: &Option<PathBuf>) -> Result<(), CliError> {
    match json {
        Some(p) if p.as_os_str() == "-" => println!("{}", report.to_json()),
        Some(p) => {
            std::fs::write(p, report.to_json()).map_err(|e| CliError::Input(format!("{}: {e}", p.display())))?;
            print!("{}", report.render());
        }
        None => print!("{}", report.render()),
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let flags = Flags {
        samples: cli.global.samples,
        seed: cli.global.seed,
        tol: cli.global.tol,
        exact: cli.global.exact,
        oracle: cli.global.oracle,
        options: cli.command.options(),
    };
    let start = Instant::now();
    let result = commands::run(&cli.command, &cli.global, RunReport::new(cli.command.name(), Vec::new(), flags));
    match result {
        Ok(mut report) => {
            report.wall_time = start.elapsed().as_secs_f64();
            if let Err(e) = emit(&report, &cli.global.json) {
                eprintln!("error: {e}");
                return ExitCode::from(e.exit_code());
            }
            if report.all_checks_pass() {
                ExitCode::SUCCESS
            } else {
                eprintln!("verification failed");
                ExitCode::from(1)
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

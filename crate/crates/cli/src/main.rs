//! `congruence`: congruence modules and ideals of augmented algebras over
//! a DVR, from problem files.
//!
//! Exit status: 0 computed, 1 a verdict fails, 2 input error, 3 a search
//! bound was exceeded.

mod commands;
mod render;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use congruence_core::poly::DEFAULT_DEGREE_BOUND;
use congruence_core::Error;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Structured,
}

#[derive(Parser, Debug)]
#[command(name = "congruence", version, about = "Congruence modules and ideals over a DVR")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Resolution strategy: auto, koszul, matrix_factorization, shamash,
    /// syzygy or file. Overrides the problem file.
    #[arg(long, global = true)]
    pub strategy: Option<String>,
    /// Monomial degree bound for standard bases and syzygies.
    #[arg(long, global = true, default_value_t = DEFAULT_DEGREE_BOUND)]
    pub degree_bound: u32,
    /// Number of differentials to compute (default: codimension + 2).
    #[arg(long, global = true)]
    pub length: Option<usize>,
    #[arg(long, global = true, value_enum, default_value = "text")]
    pub format: Format,
    /// Seed for randomized commands.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Every invariant and verdict, for each module of the file.
    Analyze {
        file: PathBuf,
        /// Restrict to one module.
        #[arg(long)]
        module: Option<String>,
    },
    /// Congruence ideal of a module (default: the ring itself).
    Eta {
        file: PathBuf,
        #[arg(long, default_value = "ring")]
        module: String,
    },
    /// Congruence module of a module (default: the ring itself).
    Psi {
        file: PathBuf,
        #[arg(long, default_value = "ring")]
        module: String,
    },
    /// Torsion of the cotangent module at the augmentation.
    Phi { file: PathBuf },
    /// A numerical criterion: defect0, wld, iso or cotangent_iso.
    Criterion {
        file: PathBuf,
        #[arg(long)]
        mode: String,
        #[arg(long, default_value = "ring")]
        module: String,
        /// Target problem file for iso and cotangent_iso.
        #[arg(long)]
        target: Option<PathBuf>,
        /// Surjection onto the target, as `x -> poly, y -> poly`.
        #[arg(long)]
        map: Option<String>,
    },
    /// Cut by a regular element and compare both sides of the length
    /// identity.
    Deform {
        file: PathBuf,
        #[arg(long)]
        element: String,
        #[arg(long, default_value = "ring")]
        module: String,
    },
    /// Congruence module and discriminant of a split lattice.
    Lattice { file: PathBuf },
    /// Ranks of Ext^i(O, O) against binomial coefficients.
    Serre {
        file: PathBuf,
        /// Also check that Ext^1 generates the top degree under products.
        #[arg(long)]
        products: bool,
    },
    /// Random algebras testing whether Fitt_c(p/p^2) lies in eta(A).
    ProbeFittingQuestion {
        #[arg(long, default_value_t = 100)]
        count: u64,
        /// Residue characteristic of the p-adic base ring.
        #[arg(long, default_value_t = 3)]
        p: u64,
        /// Module-finite instances only.
        #[arg(long)]
        codim0: bool,
    },
    /// eta of a target module computed over the source and over the target.
    Invariance {
        file: PathBuf,
        #[arg(long)]
        target: PathBuf,
        #[arg(long)]
        map: String,
        /// Module of the target file.
        #[arg(long, default_value = "ring")]
        module: String,
    },
}

/// Run failures, with the exit status they map to.
#[derive(Debug)]
pub enum Failure {
    Io(PathBuf, std::io::Error),
    Engine(Option<PathBuf>, Error),
}

impl Failure {
    fn exit_code(&self) -> u8 {
        match self {
            Failure::Engine(_, e) if e.is_bound() => 3,
            _ => 2,
        }
    }
}

impl std::fmt::Display for Failure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Failure::Io(p, e) => write!(f, "{}: {e}", p.display()),
            Failure::Engine(Some(p), Error::Parse { line, column, message }) => {
                write!(f, "{}:{line}:{column}: {message}", p.display())
            }
            Failure::Engine(Some(p), e) => write!(f, "{}: {e}", p.display()),
            Failure::Engine(None, e) => write!(f, "{e}"),
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match commands::run(&cli) {
        Ok(out) => {
            let s = match cli.format {
                Format::Text => render::text(&out.record),
                Format::Structured => render::structured(&out.record),
            };
            print!("{s}");
            ExitCode::from(if out.fails { 1 } else { 0 })
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

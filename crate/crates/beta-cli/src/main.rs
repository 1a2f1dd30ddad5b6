//! `beta` — command-line driver for the event-state machine.
//!
//! Subcommands cover the four public surfaces: running `.beta` programs,
//! analyses of the quasi-periodic operator class, lattice-law demonstrations,
//! and operator recovery from integer trajectories. Every subcommand can emit
//! its machine-readable JSON document (`--json` on stdout, `--out` to a file);
//! identical invocations with identical seeds produce byte-identical JSON.

mod commands;

use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

/// Clean completion.
pub const EXIT_OK: i32 = 0;
/// Input content was rejected: syntax/resolution diagnostics, malformed
/// trajectory data, runtime rule failures.
pub const EXIT_DIAGNOSTICS: i32 = 1;
/// The invocation itself was unusable: unknown flags, unreadable paths,
/// out-of-range arguments. clap's own errors use this code too.
pub const EXIT_USAGE: i32 = 2;
/// An internal numeric routine failed; inputs passed validation.
pub const EXIT_INTERNAL: i32 = 3;

#[derive(Parser)]
#[command(
    name = "beta",
    version,
    about = "Event-state machine driver: runs .beta programs, operator-class \
             analyses, lattice demonstrations, and operator recovery"
)]
struct Cli {
    /// Measurement batch size per step (default 1024).
    #[arg(long, global = true, value_parser = clap::value_parser!(u64).range(1..))]
    shots: Option<u64>,

    /// Seed for every random draw (default 0). On `run`, passing a seed
    /// switches the machine into sampled mode.
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Entropy threshold for convergence (default 1e-9).
    #[arg(long, global = true)]
    epsilon: Option<f64>,

    /// Step bound for convergence runs (default 64).
    #[arg(long, global = true, value_parser = clap::value_parser!(u64).range(1..))]
    max_steps: Option<u64>,

    /// Print the machine-readable JSON report on stdout instead of text.
    #[arg(long, global = true)]
    json: bool,

    /// Also write the JSON report to this path.
    #[arg(long, global = true, value_name = "PATH")]
    out: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Parse, resolve, and execute a .beta program to entropy convergence.
    Run {
        /// Path to the .beta source file.
        path: PathBuf,
    },
    /// Analyses of the quasi-periodic operator class.
    #[command(subcommand)]
    Omega(OmegaCmd),
    /// Distributivity-failure witness plus seeded orthomodular spot checks.
    Lattice {
        /// Space dimension for the witness and the random pairs (>= 2).
        #[arg(long)]
        dim: usize,
        /// Number of random subspace pairs to test.
        #[arg(long, default_value_t = 200, value_parser = clap::value_parser!(u64).range(1..))]
        trials: u64,
    },
    /// Search a candidate operator family for matrices consistent with an
    /// observed integer trajectory.
    Hypothesize {
        /// Path to a JSON file holding an array of integer vectors.
        path: PathBuf,
        /// Candidate family to enumerate.
        #[arg(long, value_enum, default_value_t = FamilyFlag::Binary2x2)]
        family: FamilyFlag,
    },
}

#[derive(Subcommand)]
enum OmegaCmd {
    /// Classify all 16 binary 2x2 matrices by spectrum irrationality.
    Classify,
    /// Exact stepping-operator iterate count with closed-form cross-check.
    Fib {
        /// Iterate index (0 through 90).
        n: u32,
    },
    /// Division trace of Euclid's algorithm on a pair q >= p >= 1.
    Euclid { p: u64, q: u64 },
    /// Substitution word after K rewritings of the seed "0".
    Word {
        /// Rewriting count (0 through 30).
        k: u32,
    },
    /// Scan all 512 binary 3x3 matrices against the rule-110 one-step map.
    Ca {
        /// Arithmetic for the candidate action.
        #[arg(long, value_enum, default_value_t = ArithFlag::Both)]
        arithmetic: ArithFlag,
    },
    /// Best almost-period of a two-frequency signal over a sample grid.
    AlmostPeriod {
        /// First angular frequency.
        #[arg(long, default_value_t = 1.0)]
        w1: f64,
        /// Second angular frequency (default: the golden ratio).
        #[arg(long, default_value_t = beta_core::omega::GOLDEN_RATIO)]
        w2: f64,
        /// Accept a shift when its uniform deviation stays below this.
        #[arg(long, default_value_t = 0.5)]
        tolerance: f64,
        /// Grid start.
        #[arg(long, default_value_t = 0.0)]
        start: f64,
        /// Grid end.
        #[arg(long, default_value_t = 200.0)]
        end: f64,
        /// Grid step.
        #[arg(long, default_value_t = 0.01)]
        step: f64,
    },
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ArithFlag {
    Integer,
    #[value(name = "mod2")]
    Mod2,
    Both,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum FamilyFlag {
    #[value(name = "binary2x2")]
    Binary2x2,
    #[value(name = "binary3x3")]
    Binary3x3,
}

/// Where and how reports leave the process.
pub struct Emit {
    json: bool,
    out: Option<PathBuf>,
}

impl Emit {
    /// Prints `text` (or the JSON document under `--json`) on stdout,
    /// mirrors the JSON document to `--out` when given, and returns the
    /// exit code.
    pub fn finish<T: Serialize>(&self, doc: &T, text: &str) -> i32 {
        let rendered = match serde_json::to_string_pretty(doc) {
            Ok(s) => s,
            Err(e) => return fail(&format!("report serialization failed: {e}"), EXIT_INTERNAL),
        };
        if let Some(path) = &self.out {
            if let Err(e) = std::fs::write(path, format!("{rendered}\n")) {
                return fail(
                    &format!("cannot write report to {}: {e}", path.display()),
                    EXIT_USAGE,
                );
            }
        }
        write_stdout(if self.json { &rendered } else { text })
    }
}

/// Writes one line to stdout. A closed pipe (e.g. `| head`) is a normal
/// way for a consumer to stop reading, not an error.
fn write_stdout(s: &str) -> i32 {
    use std::io::Write;
    let stdout = std::io::stdout();
    let mut lock = stdout.lock();
    match writeln!(lock, "{s}").and_then(|()| lock.flush()) {
        Ok(()) => EXIT_OK,
        Err(e) if e.kind() == std::io::ErrorKind::BrokenPipe => EXIT_OK,
        Err(e) => fail(&format!("cannot write to stdout: {e}"), EXIT_INTERNAL),
    }
}

/// Prints one error line on stderr and hands back the exit code.
pub fn fail(message: &str, code: i32) -> i32 {
    eprintln!("error: {message}");
    code
}

/// Exit code for a core-library error reported against command-line
/// arguments: domain/shape/capacity problems are usage errors, numeric
/// breakdowns are internal, the rest are content diagnostics.
pub fn arg_error_code(e: &beta_core::Error) -> i32 {
    use beta_core::Error::*;
    match e {
        Numeric(_) => EXIT_INTERNAL,
        Domain(_) | Dimension(_) | Capacity(_) => EXIT_USAGE,
        _ => EXIT_DIAGNOSTICS,
    }
}

fn main() {
    let cli = Cli::parse();
    if let Some(eps) = cli.epsilon {
        if !(eps > 0.0) || !eps.is_finite() {
            std::process::exit(fail("--epsilon must be positive and finite", EXIT_USAGE));
        }
    }
    let emit = Emit {
        json: cli.json,
        out: cli.out.clone(),
    };
    let code = match &cli.command {
        Command::Run { path } => commands::run::cmd_run(
            path,
            commands::run::Overrides {
                shots: cli.shots,
                seed: cli.seed,
                epsilon: cli.epsilon,
                max_steps: cli.max_steps,
            },
            &emit,
        ),
        Command::Omega(sub) => commands::omega::cmd_omega(sub, &emit),
        Command::Lattice { dim, trials } => {
            commands::lattice::cmd_lattice(*dim, *trials, cli.seed.unwrap_or(0), &emit)
        }
        Command::Hypothesize { path, family } => {
            commands::hypothesize::cmd_hypothesize(path, *family, &emit)
        }
    };
    std::process::exit(code);
}

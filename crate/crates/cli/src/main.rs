use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

mod commands;
mod error;
mod io;
mod text;

use commands::{Output, SinkhornArgs};
use error::CliError;

/// Quantum states with fixed marginals: Choi states, PPT checks, extremality
/// tests and operator scaling.
///
/// Exit codes: 0 pass, 1 semantic failure, 2 input or usage error.
#[derive(Debug, Parser)]
#[command(name = "qmarg", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct Common {
    /// Relative tolerance for rank cuts and validity checks.
    #[arg(long, default_value_t = qmarg::DEFAULT_TOL)]
    tol: f64,
    /// Emit JSON instead of text.
    #[arg(long)]
    json: bool,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Validate a state file and report marginals, rank, PPT and extremality.
    VerifyState {
        /// State JSON file, or - for stdin.
        state: String,
        /// Kraus family to test with the doubly constrained criterion.
        #[arg(long)]
        kraus: Option<String>,
        /// Expected dimensions n,m.
        #[arg(long, value_parser = parse_dims)]
        dims: Option<(usize, usize)>,
        #[command(flatten)]
        common: Common,
    },
    /// Build the Choi state of a Kraus family.
    Choi {
        /// Kraus JSON file, or - for stdin.
        kraus: String,
        /// Output state file, or - for stdout.
        #[arg(long, default_value = "-")]
        out: String,
        #[arg(long, default_value_t = qmarg::DEFAULT_TOL)]
        tol: f64,
    },
    /// Recover a Kraus family from a state.
    Kraus {
        /// State JSON file, or - for stdin.
        state: String,
        /// Output Kraus file, or - for stdout.
        #[arg(long, default_value = "-")]
        out: String,
        #[arg(long, value_parser = parse_dims)]
        dims: Option<(usize, usize)>,
        #[arg(long, default_value_t = qmarg::DEFAULT_TOL)]
        tol: f64,
    },
    /// Run both extremality criteria and the perturbation oracle on a Kraus family.
    ExtremalCheck {
        /// Kraus JSON file, or - for stdin.
        kraus: String,
        #[arg(long, value_parser = parse_dims)]
        dims: Option<(usize, usize)>,
        #[command(flatten)]
        common: Common,
    },
    /// Scale a seeded random Kraus family to prescribed marginals.
    Sinkhorn {
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        m: Option<usize>,
        /// Dimensions n,m (alternative to --n/--m).
        #[arg(long, value_parser = parse_dims, conflicts_with_all = ["n", "m"])]
        dims: Option<(usize, usize)>,
        /// Number of Kraus operators.
        #[arg(long)]
        r: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Target for Σ V†V (m×m matrix file); defaults to 1/m.
        #[arg(long)]
        k_file: Option<String>,
        /// Target for Σ V V† (n×n matrix file); defaults to 1/n.
        #[arg(long)]
        l_file: Option<String>,
        #[arg(long, default_value_t = qmarg::scaling::DEFAULT_MAX_ITER)]
        max_iter: usize,
        /// Residual tolerance for convergence.
        #[arg(long, default_value_t = qmarg::scaling::DEFAULT_RESIDUAL_TOL)]
        tol: f64,
        /// Rank tolerance for the extremality verdict.
        #[arg(long, default_value_t = qmarg::DEFAULT_TOL)]
        rank_tol: f64,
        /// Keep only the last N residual history entries in the output.
        #[arg(long, value_name = "N")]
        history_tail: Option<usize>,
        /// Write the scaled Kraus file here (- for stdout; the report then goes to stderr).
        #[arg(long)]
        out: Option<String>,
        #[arg(long)]
        json: bool,
    },
    /// Build the 2x3 extremal entangled example and run every check on it.
    Example {
        #[command(flatten)]
        common: Common,
    },
}

fn parse_dims(s: &str) -> Result<(usize, usize), String> {
    let (a, b) = s
        .split_once(',')
        .ok_or_else(|| format!("expected n,m but got `{s}`"))?;
    let parse = |x: &str| {
        x.trim()
            .parse::<usize>()
            .ok()
            .filter(|&v| v > 0)
            .ok_or_else(|| format!("`{x}` is not a positive integer"))
    };
    Ok((parse(a)?, parse(b)?))
}

fn run(cli: Cli) -> Result<bool, CliError> {
    let stdout = |json| Output {
        json,
        to_stderr: false,
    };
    match cli.command {
        Command::VerifyState {
            state,
            kraus,
            dims,
            common,
        } => commands::verify_state(&state, kraus.as_deref(), dims, common.tol, &stdout(common.json)),
        Command::Choi { kraus, out, tol } => commands::choi(&kraus, &out, tol),
        Command::Kraus {
            state,
            out,
            dims,
            tol,
        } => commands::kraus(&state, &out, dims, tol),
        Command::ExtremalCheck {
            kraus,
            dims,
            common,
        } => commands::extremal_check(&kraus, dims, common.tol, &stdout(common.json)),
        Command::Sinkhorn {
            n,
            m,
            dims,
            r,
            seed,
            k_file,
            l_file,
            max_iter,
            tol,
            rank_tol,
            history_tail,
            out,
            json,
        } => {
            let (n, m) = match (dims, n, m) {
                (Some(d), _, _) => d,
                (None, Some(n), Some(m)) => (n, m),
                _ => return Err(CliError::Usage("give --n and --m, or --dims n,m".into())),
            };
            let output = Output {
                json,
                to_stderr: out.as_deref() == Some("-"),
            };
            let args = SinkhornArgs {
                n,
                m,
                r,
                seed,
                k_file,
                l_file,
                max_iter,
                residual_tol: tol,
                rank_tol,
                history_tail,
                out,
            };
            commands::sinkhorn(&args, &output)
        }
        Command::Example { common } => commands::example(common.tol, &stdout(common.json)),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(error::EXIT_FAIL),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

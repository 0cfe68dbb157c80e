//! `gtm`: check, format, run and analyse generalized Turing machines.
//!
//! Exit status is 0 on success, 1 when a check fails (a refuted sample, a
//! single-use violation, a rejected run, insufficient precision) and 2 on
//! usage or parse errors.

mod commands;
mod examples;
mod literal;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use output::Format;

#[derive(Parser, Debug)]
#[command(
    name = "gtm",
    version,
    about = "Generalized Turing machines over named carriers"
)]
struct Cli {
    /// `human` text, or `lines`: one JSON object per line.
    #[arg(long, global = true, value_enum, default_value_t = Format::Human)]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Parse and validate a machine.
    Check { file: PathBuf },
    /// Print a machine in canonical form.
    Fmt {
        file: PathBuf,
        /// Rewrite the file instead of printing.
        #[arg(long)]
        write: bool,
    },
    /// Run a machine on input literals.
    Run {
        file: PathBuf,
        /// One per input tape, e.g. `word:01`, `rho:1/3`, `stream:1(0)`.
        #[arg(long = "input", short)]
        inputs: Vec<String>,
        /// Seed of the choice-token sequence.
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 10_000, value_parser = clap::value_parser!(u64).range(1..))]
        max_steps: u64,
        /// Print every step (always on with `--format lines`).
        #[arg(long)]
        trace: bool,
        /// Explore every choice instead of following the seed.
        #[arg(long)]
        enumerate: bool,
        #[arg(long, default_value_t = 16)]
        max_branch: usize,
        /// Stream symbols to show in results.
        #[arg(long, default_value_t = 64)]
        show: usize,
    },
    /// Evaluate a stream machine to a demanded output length through its
    /// word-machine generators.
    Eval {
        file: PathBuf,
        #[arg(long = "inputs", alias = "input", num_args = 1..)]
        inputs: Vec<String>,
        #[arg(long, default_value_t = 64)]
        demand: usize,
        /// Largest input prefix length tried.
        #[arg(long, default_value_t = 4096)]
        limit: usize,
        #[arg(long, default_value_t = 10_000, value_parser = clap::value_parser!(u64).range(1..))]
        max_steps: u64,
        /// TOML table `[generators]` mapping stream functions to word functions.
        #[arg(long)]
        generators: Option<PathBuf>,
    },
    /// Encode a value as a name.
    Encode {
        #[arg(value_enum)]
        kind: NameKind,
        #[arg(allow_hyphen_values = true)]
        value: String,
        /// Symbols to print of infinite names.
        #[arg(long, default_value_t = 256)]
        length: usize,
    },
    /// Decode a name. Infinite names are given by a finite prefix.
    Decode {
        #[arg(value_enum)]
        kind: NameKind,
        name: String,
        /// For `rho`: demanded width `2^-d`.
        #[arg(long)]
        precision: Option<u32>,
    },
    /// Replace the functions of an abstract machine by realizers.
    Lower {
        file: PathBuf,
        #[arg(long)]
        realizers: PathBuf,
    },
    /// Check empirically that the lowered machine realizes the abstract one.
    Checkreal {
        file: PathBuf,
        #[arg(long)]
        realizers: PathBuf,
        /// File with one sample per line: one literal per input tape.
        #[arg(long, conflicts_with = "random")]
        samples: Option<PathBuf>,
        /// Number of random rational samples.
        #[arg(long)]
        random: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 50)]
        precision: u32,
        #[arg(long, default_value_t = 10_000)]
        max_steps: usize,
    },
    /// Sum a power series to a demanded precision.
    Series {
        /// `geometric` (all coefficients 1) or a file with one rational per line.
        #[arg(long, default_value = "geometric")]
        coeffs: String,
        #[arg(long)]
        r: String,
        #[arg(long = "M", alias = "m")]
        m: String,
        /// `re,im` or `re`.
        #[arg(long, allow_hyphen_values = true)]
        z: String,
        #[arg(long, default_value_t = 40)]
        precision: u32,
    },
    /// Exact real arithmetic on rational literals.
    Real {
        #[command(subcommand)]
        op: RealOp,
    },
    /// Split a machine at its oracle calls into pre- and post-processor.
    Wsplit {
        file: PathBuf,
        #[arg(long)]
        oracle: String,
        /// Write `<name>_h.gtm` and `<name>_g.gtm` here instead of printing.
        #[arg(long)]
        out_dir: Option<PathBuf>,
    },
    /// Check the decomposition of a split machine on seeded inputs.
    Wverify {
        #[arg(long)]
        machine: PathBuf,
        #[arg(long)]
        oracle: String,
        /// Registry function used as the oracle's realizer (default: the oracle itself).
        #[arg(long)]
        oracle_impl: Option<String>,
        #[arg(long, default_value_t = 100)]
        samples: u64,
        #[arg(long, default_value_t = 64)]
        demand: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 10_000)]
        max_steps: usize,
    },
    /// Worked examples.
    Examples {
        #[arg(value_enum)]
        which: examples::Example,
        #[arg(long, default_value_t = 30)]
        precision: u32,
    },
}

#[derive(Subcommand, Debug)]
enum RealOp {
    /// Add two reals given as rationals through their binary names.
    Add {
        #[arg(allow_hyphen_values = true)]
        a: String,
        #[arg(allow_hyphen_values = true)]
        b: String,
        #[arg(long, default_value_t = 30)]
        precision: u32,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum NameKind {
    Nat,
    Int,
    Rat,
    Interval,
    Iota,
    Beta,
    Rho,
}

/// How a command ended.
#[derive(Debug)]
pub enum Failure {
    /// A check did not pass.
    Verdict(String),
    /// Bad arguments or unreadable input.
    Usage(String),
}

pub type Outcome = Result<(), Failure>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let out = output::Out::new(cli.format);
    let result = match cli.command {
        Command::Check { file } => commands::check(&out, &file),
        Command::Fmt { file, write } => commands::fmt(&out, &file, write),
        Command::Run {
            file,
            inputs,
            seed,
            max_steps,
            trace,
            enumerate,
            max_branch,
            show,
        } => commands::run(
            &out,
            &file,
            &inputs,
            seed,
            max_steps as usize,
            trace,
            enumerate.then_some(max_branch),
            show,
        ),
        Command::Eval {
            file,
            inputs,
            demand,
            limit,
            max_steps,
            generators,
        } => commands::eval(
            &out,
            &file,
            &inputs,
            demand,
            limit,
            max_steps as usize,
            generators.as_deref(),
        ),
        Command::Encode {
            kind,
            value,
            length,
        } => commands::encode(&out, kind, &value, length),
        Command::Decode {
            kind,
            name,
            precision,
        } => commands::decode(&out, kind, &name, precision),
        Command::Lower { file, realizers } => commands::lower(&out, &file, &realizers),
        Command::Checkreal {
            file,
            realizers,
            samples,
            random,
            seed,
            precision,
            max_steps,
        } => commands::checkreal(
            &out,
            &file,
            &realizers,
            samples.as_deref(),
            random,
            seed,
            precision,
            max_steps,
        ),
        Command::Series {
            coeffs,
            r,
            m,
            z,
            precision,
        } => commands::series(&out, &coeffs, &r, &m, &z, precision),
        Command::Real {
            op: RealOp::Add { a, b, precision },
        } => commands::real_add(&out, &a, &b, precision),
        Command::Wsplit {
            file,
            oracle,
            out_dir,
        } => commands::wsplit(&out, &file, &oracle, out_dir.as_deref()),
        Command::Wverify {
            machine,
            oracle,
            oracle_impl,
            samples,
            demand,
            seed,
            max_steps,
        } => commands::wverify(
            &out,
            &machine,
            &oracle,
            oracle_impl.as_deref(),
            samples,
            demand,
            seed,
            max_steps,
        ),
        Command::Examples { which, precision } => examples::run(&out, which, precision),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Verdict(msg)) => {
            out.error(&msg);
            ExitCode::from(1)
        }
        Err(Failure::Usage(msg)) => {
            out.error(&msg);
            ExitCode::from(2)
        }
    }
}

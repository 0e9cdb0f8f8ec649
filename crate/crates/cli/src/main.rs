//! `lawless-lab`: reproducible runs over schedules, words and certificates.

mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use lawless_core::Error;

/// Exit status for usage errors (BSD `EX_USAGE`).
const EXIT_USAGE: u8 = 64;
/// Exit status for failed certificates and hypotheses.
const EXIT_FAILED: u8 = 2;

#[derive(Parser)]
#[command(name = "lawless-lab", version, about = "Exact lawlessness-growth workbench for sparse wreath products")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct Global {
    /// Seed for witness searches and randomized checks.
    #[arg(long, global = true, default_value_t = lawless_core::psl2::DEFAULT_SEED)]
    seed: u64,
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    jobs: Option<usize>,
    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// PSL2(p) arithmetic and law checks.
    #[command(subcommand)]
    Psl2(Psl2Cmd),
    /// Law combination.
    #[command(subcommand)]
    Laws(LawsCmd),
    /// Build and check sparse schedules.
    #[command(subcommand)]
    Schedule(ScheduleCmd),
    /// Normal forms and coordinates in the sparse wreath product.
    #[command(subcommand)]
    Wreath(WreathCmd),
    /// Growth certificates.
    #[command(subcommand)]
    Cert(CertCmd),
    /// Run the whole acceptance suite.
    VerifyAll {
        #[arg(long, value_enum, default_value_t = Profile::Desk)]
        profile: Profile,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Profile {
    Desk,
}

#[derive(Subcommand)]
enum Psl2Cmd {
    /// Order of an element given as `a,b,c,d`.
    Order {
        #[arg(long)]
        p: u64,
        #[arg(long, allow_hyphen_values = true)]
        elem: String,
    },
    /// Exhaustive law check; `--word explicit` uses the explicit law of PSL2(p).
    IsLaw {
        #[arg(long)]
        p: u64,
        #[arg(long, allow_hyphen_values = true)]
        word: String,
    },
    /// First rank-2 law of length at most `max-len`.
    ShortestLaw {
        #[arg(long)]
        p: u64,
        #[arg(long)]
        max_len: usize,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum CombineMode {
    Pair,
    Tree,
}

#[derive(Subcommand)]
enum LawsCmd {
    /// Combine the words of a JSON array into one word vanishing wherever any does.
    Combine {
        #[arg(long)]
        words: PathBuf,
        #[arg(long, value_enum, default_value_t = CombineMode::Tree)]
        mode: CombineMode,
    },
    /// The iterated law of a schedule at level `n`.
    Tower {
        #[arg(long)]
        schedule: PathBuf,
        #[arg(long)]
        n: usize,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Inverse {
    Lower,
    Upper,
}

#[derive(Subcommand)]
enum ScheduleCmd {
    /// Build a schedule and emit it as JSON.
    Build {
        #[arg(long)]
        mode: String,
        #[arg(long, default_value_t = 5)]
        n: usize,
        /// Growth function, `pow:NUM[/NUM]`, `pow:DECIMAL` or `table:@FILE`.
        #[arg(long)]
        f: Option<String>,
        #[arg(long = "T")]
        t: Option<u128>,
        /// Scaling constant; searched for when omitted.
        #[arg(long = "M")]
        m: Option<u128>,
        /// Comma-separated L values for custom schedules.
        #[arg(long = "L")]
        l: Option<String>,
        /// Pseudo-inverse used as g in slow mode.
        #[arg(long, value_enum, default_value_t = Inverse::Upper)]
        g: Inverse,
        #[arg(long)]
        name: Option<String>,
    },
    /// Recompute flags and report any problems.
    Check { path: PathBuf },
}

#[derive(Subcommand)]
enum WreathCmd {
    /// Normal form of a word over ĝ, ĥ, t and its value at one coordinate.
    Eval {
        #[arg(long)]
        schedule: PathBuf,
        #[arg(long)]
        word: String,
        #[arg(long, allow_hyphen_values = true)]
        coord: i64,
    },
    /// Pairwise support intersections of shifted generators.
    CheckSupports {
        #[arg(long)]
        schedule: PathBuf,
        #[arg(long, default_value_t = 20)]
        shift_range: i64,
        #[arg(long, default_value_t = 8)]
        window: usize,
    },
}

#[derive(Subcommand)]
enum CertCmd {
    /// Upper witnesses for every word up to a length, or for one word.
    Upper {
        #[arg(long)]
        schedule: PathBuf,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        all_words_up_to: Option<usize>,
        #[arg(long, allow_hyphen_values = true)]
        word: Option<String>,
    },
    /// Exhaustive lower-bound audit.
    Audit {
        #[arg(long)]
        schedule: PathBuf,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        budget: usize,
    },
    /// The constants inequalities on a schedule prefix.
    Constants {
        #[arg(long)]
        schedule: PathBuf,
        #[arg(long)]
        f: String,
        #[arg(long = "K")]
        k: u128,
        #[arg(long = "C")]
        c: u128,
        #[arg(long)]
        m_max: usize,
    },
    /// Plan a schedule and constants for a growth function.
    Plan {
        #[arg(long)]
        f: String,
        #[arg(long)]
        mode: String,
        #[arg(long)]
        n: usize,
    },
    /// Witness that the sparse wreath product is not residually finite.
    NotRf {
        #[arg(long)]
        schedule: PathBuf,
        #[arg(long)]
        window: Option<usize>,
    },
    /// Growth table as CSV.
    Table {
        #[arg(long)]
        schedule: PathBuf,
        #[arg(long)]
        n_max: Option<usize>,
        /// Also audit every level whose gap admits this budget.
        #[arg(long)]
        budget: Option<usize>,
    },
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::CertificateFailed(_) | Error::HypothesisFailed { .. } | Error::BoundViolated { .. } => EXIT_FAILED,
        Error::Parse(_) | Error::InvalidLetter { .. } => EXIT_USAGE,
        _ => 1,
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    if let Some(jobs) = cli.global.jobs {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(jobs).build_global() {
            eprintln!("lawless-lab: {e}");
            return ExitCode::from(EXIT_USAGE);
        }
    }
    match commands::run(cli.command, &cli.global) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(EXIT_FAILED),
        Err(e) => {
            let reason = serde_json::json!({
                "status": "failed",
                "error": e.kind(),
                "message": e.to_string(),
            });
            println!("{reason}");
            eprintln!("lawless-lab: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}

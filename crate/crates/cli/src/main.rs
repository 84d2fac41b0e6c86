//! `entail`: scores NLI pairs by how much of the hypothesis's semantic
//! structure the premise contains, and aggregates the scores into ranking
//! reports.

mod commands;
mod options;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser)]
#[command(
    name = "entail",
    version,
    about = "Scores premise-hypothesis pairs by semantic containment",
    long_about = "Scores premise-hypothesis pairs by measuring how much of the \
hypothesis's semantic structure (tokens, token embeddings, or AMR graphs) is \
contained in the premise, and aggregates the scores into ranking-quality \
reports. Identical flags and seed always produce byte-identical outputs; \
--threads only changes wall time."
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Score every pair with the requested metrics and write a TSV table.
    Score(ScoreArgs),
    /// Aggregate scores into AUC, top-percent, subset and alpha-sweep reports.
    Eval(EvalArgs),
    /// Parse every AMR graph in the inputs, printing triple counts and errors.
    ValidateAmr(ValidateArgs),
}

#[derive(Args)]
pub struct InputArgs {
    /// Dataset as `name=path` or a bare path (its file stem becomes the
    /// name). Repeat for several datasets.
    #[arg(long = "in", value_name = "NAME=PATH")]
    pub inputs: Vec<String>,

    /// Input format; inferred from the file extension when omitted.
    #[arg(long, value_enum, value_name = "FORMAT")]
    pub format: Option<FormatArg>,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum FormatArg {
    Jsonl,
    Tsv,
}

#[derive(Args)]
pub struct ResourceArgs {
    /// Whitespace-separated token embedding table, optionally starting with
    /// a `count dim` header line.
    #[arg(long, env = "ENTAIL_EMBEDDINGS", value_name = "PATH")]
    pub embeddings: Option<PathBuf>,

    /// JSONL sidecar of per-pair contextual token vectors, keyed by pair id;
    /// overrides the static table for the vector-matching metrics.
    #[arg(long, value_name = "PATH")]
    pub sidecar: Option<PathBuf>,

    /// Seed for alignment hill-climb restarts and out-of-vocabulary vectors.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,

    /// Restarts per hill-climb alignment search.
    #[arg(long, default_value_t = 8)]
    pub restarts: usize,

    /// Largest variable count the exact alignment search accepts; larger
    /// graphs fall back to seeded hill-climbing.
    #[arg(long, default_value_t = 12)]
    pub exact_limit: usize,

    /// Worker threads for pair scoring. Output bytes never depend on this.
    #[arg(long, default_value_t = 1)]
    pub threads: usize,
}

#[derive(Args)]
pub struct ScoreArgs {
    #[command(flatten)]
    pub inputs: InputArgs,

    /// Comma-separated score columns, e.g. TokP,SmatchP,external:trainBERT.
    #[arg(long, value_delimiter = ',', value_name = "LIST", required = true)]
    pub metrics: Vec<String>,

    #[command(flatten)]
    pub resources: ResourceArgs,

    /// Output TSV path; a directory of `<name>.tsv` files when several
    /// datasets are given. Stdout when omitted (single dataset only).
    #[arg(long, value_name = "PATH")]
    pub out: Option<PathBuf>,
}

#[derive(Args)]
pub struct EvalArgs {
    #[command(flatten)]
    pub inputs: InputArgs,

    /// Precomputed score table as `name=path` (TSV as written by `score`);
    /// evaluated as-is instead of recomputing. Repeatable.
    #[arg(long = "scores", value_name = "NAME=PATH")]
    pub scores: Vec<String>,

    /// Metric columns to report; defaults to every computable metric, or to
    /// a precomputed table's columns.
    #[arg(long, value_delimiter = ',', value_name = "LIST")]
    pub metrics: Vec<String>,

    #[command(flatten)]
    pub resources: ResourceArgs,

    /// Percent cutoffs for the precision-at-top table, e.g. 1,2,3,4,5,7,10,15.
    #[arg(long = "top-p", value_delimiter = ',', value_name = "LIST")]
    pub top_p: Vec<String>,

    /// Id list (one per line, `#` comments) for an extra report section
    /// restricted to those pairs.
    #[arg(long, value_name = "PATH")]
    pub subset: Option<PathBuf>,

    /// Alpha grid `start:end:step` for the blended-score sweep; needs
    /// --hybrid.
    #[arg(long = "sweep-alpha", value_name = "START:END:STEP")]
    pub sweep_alpha: Option<String>,

    /// Blended score, e.g. graph=WWLKP,text=trainBERT,alpha=0.5. The text
    /// side accepts a metric name or an external score name.
    #[arg(long, value_name = "GRAPH,TEXT,ALPHA")]
    pub hybrid: Option<String>,

    /// Min-max rescale both hybrid components per dataset before blending.
    #[arg(long)]
    pub normalize: bool,

    /// Dataset names left out of the `avg_nli` averages (comma-separated).
    #[arg(
        long = "exclude-from-nli-avg",
        value_delimiter = ',',
        value_name = "NAMES"
    )]
    pub exclude_from_nli_avg: Vec<String>,

    /// Write the per-dataset score tables here (file for one dataset,
    /// directory for several).
    #[arg(long = "scores-out", value_name = "PATH")]
    pub scores_out: Option<PathBuf>,

    /// Write the alpha-sweep curve as CSV.
    #[arg(long = "sweep-out", value_name = "PATH")]
    pub sweep_out: Option<PathBuf>,

    /// Write the JSON report here instead of stdout.
    #[arg(long, value_name = "PATH")]
    pub report: Option<PathBuf>,
}

#[derive(Args)]
pub struct ValidateArgs {
    #[command(flatten)]
    pub inputs: InputArgs,
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn"))
        .format_timestamp(None)
        .init();
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Score(args) => commands::score(args),
        Command::Eval(args) => commands::eval(args),
        Command::ValidateAmr(args) => commands::validate(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(failure) => {
            eprintln!("error: {}", failure.message());
            ExitCode::from(failure.exit_code() as u8)
        }
    }
}

//! `sectore`: generate pattern graphs, train, evaluate and inspect models.
//!
//! Exit status is 0 on success, 1 for usage errors and 2 when a command
//! fails at run time.

mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use sectore::{Norm, Pattern, Split};

#[derive(Debug, Parser)]
#[command(name = "sectore", version, about = "Annular-sector knowledge graph embeddings")]
struct Cli {
    /// Worker threads for training and evaluation (results do not depend on it)
    #[arg(long, global = true, default_value_t = 1, value_parser = clap::value_parser!(u64).range(1..))]
    threads: u64,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Train a model and write checkpoints, metrics and the effective config
    Train(TrainArgs),
    /// Filtered link-prediction metrics for a checkpoint
    Eval(EvalArgs),
    /// Inspect a trained checkpoint
    #[command(subcommand)]
    Analyze(AnalyzeCommand),
    /// Generate a synthetic graph governed by one relation pattern
    Gen(GenArgs),
    /// Run the built-in property checks
    Selftest,
}

#[derive(Debug, Args)]
struct TrainArgs {
    /// JSON config file; flags below override its values
    #[arg(long)]
    config: Option<PathBuf>,
    /// Directory with train.txt, valid.txt and test.txt
    #[arg(long)]
    data: PathBuf,
    /// Output directory
    #[arg(long)]
    out: PathBuf,
    /// Continue from a checkpoint
    #[arg(long)]
    resume: Option<PathBuf>,
    #[command(flatten)]
    overrides: ConfigOverrides,
}

#[derive(Debug, Default, Args)]
pub struct ConfigOverrides {
    #[arg(long)]
    pub dim: Option<usize>,
    #[arg(long)]
    pub batch_size: Option<usize>,
    #[arg(long)]
    pub negatives: Option<usize>,
    #[arg(long)]
    pub gamma: Option<f64>,
    #[arg(long)]
    pub alpha: Option<f64>,
    #[arg(long)]
    pub beta: Option<f64>,
    #[arg(long)]
    pub lr: Option<f64>,
    #[arg(long)]
    pub steps: Option<u64>,
    #[arg(long)]
    pub valid_every: Option<u64>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub norm: Option<Norm>,
    /// Drop the modulus part of the score
    #[arg(long)]
    pub no_modulus: bool,
    /// Drop the phase part of the score
    #[arg(long)]
    pub no_phase: bool,
    /// Use bare base points without the pairwise bump
    #[arg(long)]
    pub no_bump: bool,
}

#[derive(Debug, Args)]
struct EvalArgs {
    #[arg(long)]
    checkpoint: PathBuf,
    #[arg(long)]
    data: PathBuf,
    #[arg(long, default_value = "test", value_parser = parse_eval_split)]
    split: Split,
    /// Add one row per relation
    #[arg(long)]
    per_relation: bool,
    /// Print JSON instead of a table
    #[arg(long)]
    json: bool,
}

fn parse_eval_split(s: &str) -> Result<Split, String> {
    match s.parse::<Split>()? {
        Split::Train => Err("evaluation split must be valid or test".into()),
        split => Ok(split),
    }
}

#[derive(Debug, Subcommand)]
enum AnalyzeCommand {
    /// Geometric-mean head and tail sector areas with cardinality labels
    Areas {
        #[arg(long)]
        checkpoint: PathBuf,
        /// Dataset directory for relation names
        #[arg(long)]
        data: PathBuf,
        /// Ratio threshold for one-to-many and many-to-one labels
        #[arg(long, default_value_t = sectore::analysis::DEFAULT_CARDINALITY_THRESHOLD)]
        threshold: f64,
        #[arg(long)]
        json: bool,
    },
    /// Check a relation pattern's region condition
    Patterns {
        #[arg(long)]
        checkpoint: PathBuf,
        #[arg(long)]
        pattern: Pattern,
        /// Comma-separated relation names (with --data) or ids
        #[arg(long, value_delimiter = ',', required = true)]
        relations: Vec<String>,
        #[arg(long)]
        data: Option<PathBuf>,
        /// Boundary tolerance
        #[arg(long, default_value_t = sectore::geometry::DEFAULT_TOLERANCE)]
        eps: f64,
        #[arg(long)]
        json: bool,
    },
    /// Write polar coordinates of entities as CSV
    Export {
        #[arg(long)]
        checkpoint: PathBuf,
        /// Comma-separated entity names (with --data) or ids
        #[arg(long, value_delimiter = ',', required = true)]
        entities: Vec<String>,
        /// Partner entities whose bumps are applied, one per entity
        #[arg(long, value_delimiter = ',')]
        contexts: Vec<String>,
        #[arg(long)]
        data: Option<PathBuf>,
        /// Output file (default: standard output)
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Debug, Args)]
struct GenArgs {
    #[arg(long)]
    pattern: Pattern,
    #[arg(long)]
    entities: usize,
    #[arg(long)]
    facts: usize,
    #[arg(long, default_value_t = 0.2)]
    holdout: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            let code = if err.use_stderr() { 1 } else { 0 };
            let _ = err.print();
            return ExitCode::from(code);
        }
    };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info"))
        .format_timestamp(None)
        .init();
    match commands::run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(2)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_train_with_overrides() {
        let cli = Cli::try_parse_from([
            "sectore",
            "--threads",
            "4",
            "train",
            "--data",
            "d",
            "--out",
            "o",
            "--lr",
            "0.1",
            "--norm",
            "l2",
            "--no-bump",
        ])
        .unwrap();
        assert_eq!(cli.threads, 4);
        let Command::Train(args) = cli.command else {
            panic!("not train")
        };
        assert_eq!(args.overrides.lr, Some(0.1));
        assert_eq!(args.overrides.norm, Some(Norm::L2));
        assert!(args.overrides.no_bump);
        assert!(args.config.is_none());
    }

    #[test]
    fn threads_flag_after_subcommand() {
        let cli = Cli::try_parse_from(["sectore", "selftest", "--threads", "8"]).unwrap();
        assert_eq!(cli.threads, 8);
    }

    #[test]
    fn rejects_zero_threads_and_train_split() {
        assert!(Cli::try_parse_from(["sectore", "--threads", "0", "selftest"]).is_err());
        assert!(Cli::try_parse_from([
            "sectore",
            "eval",
            "--checkpoint",
            "c",
            "--data",
            "d",
            "--split",
            "train"
        ])
        .is_err());
    }

    #[test]
    fn pattern_names_are_kebab_case() {
        let cli = Cli::try_parse_from([
            "sectore",
            "analyze",
            "patterns",
            "--checkpoint",
            "c",
            "--pattern",
            "mutual-exclusion",
            "--relations",
            "a,b",
        ])
        .unwrap();
        let Command::Analyze(AnalyzeCommand::Patterns { pattern, relations, .. }) = cli.command else {
            panic!("not patterns")
        };
        assert_eq!(pattern, Pattern::MutualExclusion);
        assert_eq!(relations, ["a", "b"]);
    }

    #[test]
    fn command_definition_is_consistent() {
        use clap::CommandFactory;
        Cli::command().debug_assert();
    }
}

mod commands;

use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};

#[derive(Parser)]
#[command(name = "concern", version, about = "Concern-type and moral-value detection pipeline")]
struct Cli {
    /// Log progress (repeat for more detail).
    #[arg(short, long, action = clap::ArgAction::Count, global = true)]
    verbose: u8,

    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
pub enum ScopeArg {
    Proposition,
    FullText,
}

#[derive(Clone, Copy, ValueEnum)]
pub enum ModeArg {
    Concern,
    Moral,
}

#[derive(Clone, Copy, ValueEnum)]
pub enum AgainstArg {
    Union,
    A1,
    A2,
    Expert,
}

#[derive(Subcommand)]
pub enum Command {
    /// Produce proposition frames from SRL output or the built-in heuristic.
    Extract {
        #[arg(long)]
        tweets: PathBuf,
        /// Canonical SRL JSON lines; without it frames come from the heuristic extractor.
        #[arg(long)]
        srl: Option<PathBuf>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Expand a baseline moral lexicon through WordNet.
    Expand {
        /// 2, 3 or 4.
        #[arg(long, value_parser = clap::value_parser!(u8).range(2..=4))]
        variant: u8,
        #[arg(long, default_value_t = 0.9)]
        threshold: f64,
        /// Baseline CSV `term,foundation,endorsement`.
        #[arg(long)]
        baseline: PathBuf,
        /// Frames whose moral positions supply candidate words.
        #[arg(long)]
        frames: PathBuf,
        /// WordNet 3.0 dict directory.
        #[arg(long)]
        wordnet: PathBuf,
        /// Binary cache of the parsed taxonomy.
        #[arg(long)]
        cache: Option<PathBuf>,
        /// Score on one thread.
        #[arg(long)]
        serial: bool,
        #[arg(long)]
        out: PathBuf,
    },
    /// Rank terms, verbs and arguments into candidate propositions.
    Induce {
        #[arg(long)]
        tweets: PathBuf,
        #[arg(long)]
        srl: PathBuf,
        /// JSON induction settings; `key_terms` is required.
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out_candidates: PathBuf,
    },
    /// Compile curated assignments into a concern-type lexicon.
    CompileLexicon {
        #[arg(long)]
        candidates: PathBuf,
        /// JSON array or JSON lines of `{item, label}`.
        #[arg(long)]
        assignments: PathBuf,
        /// Allowed labels; each appears in the output even without triggers.
        #[arg(long)]
        labels: Option<PathBuf>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Detect concern types and moral values per tweet.
    Detect {
        #[arg(long)]
        tweets: PathBuf,
        #[arg(long)]
        srl: Option<PathBuf>,
        #[arg(long)]
        concern_lexicon: PathBuf,
        #[arg(long)]
        moral_lexicon: PathBuf,
        #[arg(long, value_enum, default_value = "proposition")]
        scope: ScopeArg,
        /// Label moral hits by pair id ("care: 1.4") instead of side name.
        #[arg(long)]
        legacy_labels: bool,
        /// Print a readable rendering of every tweet.
        #[arg(long)]
        show: bool,
        #[arg(long)]
        serial: bool,
        #[arg(long)]
        out: PathBuf,
    },
    /// Score predictions against ground truth.
    Evaluate {
        #[arg(long)]
        preds: PathBuf,
        #[command(flatten)]
        gt: GtArgs,
        #[arg(long, value_enum)]
        mode: ModeArg,
        #[arg(long, value_enum)]
        against: Option<AgainstArg>,
        /// Name shown in the table.
        #[arg(long)]
        system: Option<String>,
        /// Show unweighted macro averages in the table.
        #[arg(long)]
        unweighted: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// McNemar's test between two prediction files.
    Significance {
        #[arg(long)]
        preds_a: PathBuf,
        #[arg(long)]
        preds_b: PathBuf,
        #[command(flatten)]
        gt: GtArgs,
        #[arg(long, value_enum, default_value = "concern")]
        mode: ModeArg,
        #[arg(long, value_enum)]
        against: Option<AgainstArg>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the curation service.
    Serve {
        #[arg(long)]
        candidates: PathBuf,
        #[arg(long)]
        labels: PathBuf,
        #[arg(long)]
        state: PathBuf,
        #[arg(long, default_value_t = 8080)]
        port: u16,
        #[arg(long, default_value = "127.0.0.1")]
        host: std::net::IpAddr,
        /// Require this token on API requests.
        #[arg(long, env = "CONCERN_SESSION_TOKEN")]
        token: Option<String>,
        /// Static files to serve at `/`.
        #[arg(long)]
        ui: Option<PathBuf>,
    },
    /// Convert MoralStrength lexicon files into a baseline CSV.
    ImportMoralstrength {
        #[arg(long)]
        dir: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Random baseline predictions for the tweets of a ground-truth file.
    RandomChooser {
        #[command(flatten)]
        gt: GtArgs,
        #[arg(long, value_enum)]
        mode: ModeArg,
        #[arg(long, default_value_t = 0.5)]
        p: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Concern labels to choose from; defaults to every label in the ground truth.
        #[arg(long)]
        labels: Option<PathBuf>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Inter-annotator agreement on concern types (macro Cohen's kappa).
    Agreement {
        #[command(flatten)]
        gt: GtArgs,
        #[arg(long)]
        labels: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(clap::Args)]
#[group(required = true, multiple = true)]
pub struct GtArgs {
    /// Ground truth as a JSON array or JSON lines.
    #[arg(long, conflicts_with_all = ["sheet_a1", "sheet_a2"])]
    gt: Option<PathBuf>,
    /// First annotator's sheet (CSV).
    #[arg(long, requires = "sheet_a2")]
    sheet_a1: Option<PathBuf>,
    /// Second annotator's sheet (CSV).
    #[arg(long, requires = "sheet_a1")]
    sheet_a2: Option<PathBuf>,
    /// Which sheet holds the expert moral labels.
    #[arg(long, default_value_t = 2, value_parser = clap::value_parser!(u8).range(1..=2))]
    moral_from: u8,
}

fn main() -> anyhow::Result<()> {
    let cli = Cli::parse();
    let level = match cli.verbose {
        0 => "warn",
        1 => "info",
        _ => "debug",
    };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level))
        .format_timestamp(None)
        .init();
    commands::run(cli.command)
}

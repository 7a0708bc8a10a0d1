use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(
    name = "chis",
    version,
    about = "Sentence relevance and stance classification for health queries"
)]
#[command(args_override_self = true)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// File of key=value lines (flag names without dashes); explicit flags win.
    /// Expanded before parsing, so this field is never populated.
    #[arg(long, global = true, value_name = "PATH")]
    pub config: Option<std::path::PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Train a relevance (task 1) or stance (task 2) model
    Train(TrainArgs),
    /// Label a dataset with a trained model
    Predict(PredictArgs),
    /// Per-query accuracy of predictions against gold labels
    Evaluate(EvaluateArgs),
    /// Dump feature vectors as CSV
    Features(FeaturesArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum TaskArg {
    #[value(name = "1")]
    Relevance,
    #[value(name = "2")]
    Stance,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum KernelArg {
    Linear,
    Poly,
    Rbf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum StanceClassesArg {
    #[value(name = "three_class")]
    ThreeClass,
    #[value(name = "two_class")]
    TwoClass,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ColumnArg {
    Relevance,
    Stance,
}

#[derive(Debug, Args)]
pub struct LexiconArgs {
    /// Gloss dictionary (term<TAB>gloss)
    #[arg(long)]
    pub gloss: Option<PathBuf>,
    /// Noun list, one word per line
    #[arg(long)]
    pub nouns: Option<PathBuf>,
    /// Sentiment lexicon (term<TAB>pos<TAB>neg)
    #[arg(long)]
    pub sentiment: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SvmArgs {
    /// Soft-margin penalty
    #[arg(long = "C", visible_alias = "c")]
    pub c: Option<f64>,
    #[arg(long, value_enum)]
    pub kernel: Option<KernelArg>,
    #[arg(long)]
    pub gamma: Option<f64>,
    /// Polynomial degree
    #[arg(long, default_value_t = 3)]
    pub degree: u32,
    /// Polynomial offset
    #[arg(long, default_value_t = 0.0)]
    pub coef0: f64,
    /// KKT stopping tolerance
    #[arg(long, default_value_t = 1e-3)]
    pub tol: f64,
    /// Iteration cap as a multiple of the training set size
    #[arg(long, default_value_t = 1000)]
    pub max_passes: usize,
}

#[derive(Debug, Args)]
pub struct TrainArgs {
    #[arg(long, value_enum)]
    pub task: TaskArg,
    /// Labelled dataset CSV
    #[arg(long)]
    pub data: PathBuf,
    /// Model file to write
    #[arg(long)]
    pub out: PathBuf,
    #[command(flatten)]
    pub lexicons: LexiconArgs,
    #[command(flatten)]
    pub svm: SvmArgs,
    #[arg(long, value_enum, default_value = "three_class")]
    pub stance_classes: StanceClassesArg,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Share of each query's rows used for fitting while tuning
    #[arg(long, default_value_t = 0.6)]
    pub train_fraction: f64,
    /// Grid-search C and gamma on a train/dev split first
    #[arg(long, num_args = 0..=1, default_value_t = false, default_missing_value = "true", action = clap::ArgAction::Set)]
    pub tune: bool,
    /// Comma-separated C values for --tune
    #[arg(long, value_delimiter = ',', default_value = "1e5,1e6,1e7")]
    pub grid_c: Vec<f64>,
    /// Comma-separated gamma values for --tune
    #[arg(long, value_delimiter = ',', default_value = "0.001,0.005,0.006,0.01")]
    pub grid_gamma: Vec<f64>,
    /// After tuning, refit on all rows instead of keeping the split fit
    #[arg(long, num_args = 0..=1, default_value_t = true, default_missing_value = "true", action = clap::ArgAction::Set)]
    pub retrain_full: bool,
    /// Run manifest path [default: <out>.manifest.json]
    #[arg(long)]
    pub manifest: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct PredictArgs {
    #[arg(long, value_enum, required_unless_present = "chain")]
    pub task: Option<TaskArg>,
    /// Model file for --task
    #[arg(long, required_unless_present = "chain")]
    pub model: Option<PathBuf>,
    /// Run task 1 and feed its labels into task 2
    #[arg(long, num_args = 0..=1, default_value_t = false, default_missing_value = "true", action = clap::ArgAction::Set)]
    pub chain: bool,
    #[arg(long, required_if_eq("chain", "true"))]
    pub model1: Option<PathBuf>,
    #[arg(long, required_if_eq("chain", "true"))]
    pub model2: Option<PathBuf>,
    /// Dataset CSV; labels may be blank
    #[arg(long)]
    pub data: PathBuf,
    /// Predictions CSV to write
    #[arg(long)]
    pub out: PathBuf,
    #[command(flatten)]
    pub lexicons: LexiconArgs,
    #[arg(long)]
    pub manifest: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct EvaluateArgs {
    /// Dataset CSV with gold labels
    #[arg(long)]
    pub gold: PathBuf,
    /// Predictions CSV, row-aligned with --gold
    #[arg(long = "pred", visible_alias = "predictions")]
    pub pred: PathBuf,
    #[arg(long, value_enum)]
    pub column: ColumnArg,
    /// Also write the report as CSV
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub manifest: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct FeaturesArgs {
    #[arg(long, value_enum)]
    pub task: TaskArg,
    #[arg(long)]
    pub data: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
    #[command(flatten)]
    pub lexicons: LexiconArgs,
    /// Take vocabularies from this model instead of fitting them on --data
    #[arg(long)]
    pub model: Option<PathBuf>,
    #[arg(long)]
    pub manifest: Option<PathBuf>,
}

/// Problems with `--config`.
#[derive(Debug)]
pub enum ConfigError {
    Read { path: String, source: std::io::Error },
    Syntax { path: String, line: usize },
    MissingValue,
}

impl std::fmt::Display for ConfigError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ConfigError::Read { path, source } => write!(f, "cannot read config file {path}: {source}"),
            ConfigError::Syntax { path, line } => write!(f, "{path}:{line}: expected key=value"),
            ConfigError::MissingValue => write!(f, "--config needs a file path"),
        }
    }
}

impl ConfigError {
    /// Unreadable files are runtime errors; malformed ones are usage errors.
    pub fn exit_code(&self) -> i32 {
        match self {
            ConfigError::Read { .. } => 1,
            _ => 2,
        }
    }
}

/// Replaces `--config <path>` with the `--key=value` flags from the file,
/// placed right after the subcommand so that explicit flags win.
pub fn expand_config(args: Vec<OsString>) -> Result<Vec<OsString>, ConfigError> {
    let mut rest = Vec::with_capacity(args.len());
    let mut config = None;
    let mut iter = args.into_iter();
    while let Some(arg) = iter.next() {
        let text = arg.to_string_lossy();
        if text == "--config" {
            config = Some(iter.next().ok_or(ConfigError::MissingValue)?);
        } else if let Some(path) = text.strip_prefix("--config=") {
            config = Some(OsString::from(path));
        } else {
            rest.push(arg);
        }
    }
    let Some(path) = config else { return Ok(rest) };
    let display = path.to_string_lossy().into_owned();
    let text = std::fs::read_to_string(&path).map_err(|source| ConfigError::Read {
        path: display.clone(),
        source,
    })?;
    let mut flags = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            return Err(ConfigError::Syntax {
                path: display,
                line: i + 1,
            });
        };
        let key = key.trim().trim_start_matches("--");
        if key.is_empty() {
            return Err(ConfigError::Syntax {
                path: display,
                line: i + 1,
            });
        }
        flags.push(OsString::from(format!("--{key}={}", value.trim())));
    }
    // program name, then the subcommand if there is one
    let at = if rest.len() > 1 { 2 } else { rest.len() };
    rest.splice(at..at, flags);
    Ok(rest)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn os(v: &[&str]) -> Vec<OsString> {
        v.iter().map(OsString::from).collect()
    }

    #[test]
    fn config_flags_precede_explicit_ones() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("run.conf");
        std::fs::write(&path, "# defaults\nseed = 5\nC=1e5\n\n--gamma=0.01\n").unwrap();
        let args = os(&["chis", "train", "--seed", "9", "--config", path.to_str().unwrap()]);
        let out = expand_config(args).unwrap();
        assert_eq!(
            out,
            os(&["chis", "train", "--seed=5", "--C=1e5", "--gamma=0.01", "--seed", "9"])
        );
    }

    #[test]
    fn config_errors() {
        assert!(matches!(
            expand_config(os(&["chis", "train", "--config"])),
            Err(ConfigError::MissingValue)
        ));
        let missing = expand_config(os(&["chis", "train", "--config=/nonexistent/x.conf"])).unwrap_err();
        assert_eq!(missing.exit_code(), 1);
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("bad.conf");
        std::fs::write(&path, "seed 5\n").unwrap();
        let bad = expand_config(os(&["chis", "train", "--config", path.to_str().unwrap()])).unwrap_err();
        assert!(matches!(bad, ConfigError::Syntax { line: 1, .. }));
        assert_eq!(bad.exit_code(), 2);
    }

    #[test]
    fn later_flags_override_earlier() {
        let cli = Cli::try_parse_from([
            "chis",
            "train",
            "--task",
            "1",
            "--data",
            "d.csv",
            "--out",
            "m.json",
            "--seed=5",
            "--seed",
            "9",
            "--retrain-full=false",
            "--tune",
        ])
        .unwrap();
        let Command::Train(t) = cli.command else {
            panic!("expected train")
        };
        assert_eq!(t.seed, 9);
        assert!(!t.retrain_full);
        assert!(t.tune);
        assert_eq!(t.grid_c, [1e5, 1e6, 1e7]);
    }

    #[test]
    fn chain_requires_both_models() {
        assert!(
            Cli::try_parse_from(["chis", "predict", "--chain", "--data", "d", "--out", "o", "--model1", "a"]).is_err()
        );
        assert!(Cli::try_parse_from([
            "chis", "predict", "--chain", "--data", "d", "--out", "o", "--model1", "a", "--model2", "b"
        ])
        .is_ok());
        assert!(Cli::try_parse_from(["chis", "predict", "--data", "d", "--out", "o"]).is_err());
    }
}

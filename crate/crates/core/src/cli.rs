//! Command-line front end. `main.rs` only forwards to [`main_with_args`].
//!
//! Exit codes: 0 ok, 2 I/O failure, 3 invalid input, 4 dangling
//! reference between files, 5 internal error.

use std::ffi::OsString;
use std::fs::File;
use std::io::{self, BufRead, BufReader, BufWriter, Read, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};

use crate::code_model::{extract_named_dfg, parse, tokenize, NamedDataFlowGraph, SyntaxTree, Token};
use crate::config::{ConfigError, Settings};
use crate::curriculum::build_schedule;
use crate::dataset::{build_sample, dedup, read_jsonl, repo_split, write_jsonl, DatasetError, RepairSample};
use crate::eval::{evaluate, EvalError, Prediction};
use crate::filter::{filter_batch, FilterItem};
use crate::grpo::{group_objective, PolicyEval, RewardGroup};
use crate::metrics::score_pair;
use crate::service::{serve, serve_tcp};

pub const EXIT_IO: i32 = 2;
pub const EXIT_INVALID: i32 = 3;
pub const EXIT_REFERENCE: i32 = 4;
pub const EXIT_INTERNAL: i32 = 5;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Io(String),
    #[error("{0}")]
    Invalid(String),
    #[error("{0}")]
    Reference(String),
    #[error("{0}")]
    Internal(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Io(_) => EXIT_IO,
            CliError::Invalid(_) => EXIT_INVALID,
            CliError::Reference(_) => EXIT_REFERENCE,
            CliError::Internal(_) => EXIT_INTERNAL,
        }
    }
}

impl From<DatasetError> for CliError {
    fn from(e: DatasetError) -> Self {
        match e {
            DatasetError::Io(_) => CliError::Io(e.to_string()),
            _ => CliError::Invalid(e.to_string()),
        }
    }
}

impl From<ConfigError> for CliError {
    fn from(e: ConfigError) -> Self {
        match e {
            ConfigError::Io { .. } => CliError::Io(e.to_string()),
            _ => CliError::Invalid(e.to_string()),
        }
    }
}

impl From<EvalError> for CliError {
    fn from(e: EvalError) -> Self {
        match e {
            EvalError::UnknownIds(_) => CliError::Reference(e.to_string()),
            _ => CliError::Invalid(e.to_string()),
        }
    }
}

fn invalid(e: impl std::fmt::Display) -> CliError {
    CliError::Invalid(e.to_string())
}

fn io_err(path: &Path, e: io::Error) -> CliError {
    CliError::Io(format!("{}: {e}", path.display()))
}

#[derive(Debug, Parser)]
#[command(name = "repairscore", version, about = "Patch scoring and RL support for vulnerability repair")]
pub struct Cli {
    /// Settings file, JSON or key=value lines.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Override one setting, e.g. --set threshold=0.6. Repeatable.
    #[arg(long = "set", value_name = "KEY=VALUE", global = true)]
    pub overrides: Vec<String>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Score one candidate file against one oracle file.
    Score {
        #[arg(long)]
        candidate: PathBuf,
        #[arg(long)]
        oracle: PathBuf,
    },
    /// Evaluate prediction JSONL against a dataset JSONL.
    Eval {
        #[arg(long)]
        dataset: PathBuf,
        #[arg(long)]
        predictions: PathBuf,
        #[command(flatten)]
        out: OutArg,
    },
    /// Reward service on stdin/stdout, or on a TCP address.
    Serve {
        #[arg(long, value_name = "ADDR")]
        listen: Option<String>,
    },
    /// Turn raw {id, repo, cwe, vulnerable_fn, fixed_fn} pairs into
    /// deduplicated dataset records.
    Build {
        #[arg(long)]
        input: PathBuf,
        #[command(flatten)]
        out: OutArg,
    },
    /// Repository-level train/val/test manifest.
    Split {
        #[arg(long)]
        dataset: PathBuf,
        #[arg(long)]
        seed: Option<u64>,
        #[command(flatten)]
        out: OutArg,
    },
    /// Schema and CodeBLEU filtering of {id, response, oracle} JSONL.
    Filter {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        kept: PathBuf,
        #[arg(long)]
        rejections: PathBuf,
        #[arg(long)]
        threshold: Option<f64>,
    },
    #[command(subcommand)]
    Curriculum(CurriculumCommand),
    #[command(subcommand)]
    Grpo(GrpoCommand),
    /// Dump tokens, syntax tree and data-flow graph of a file.
    Parse {
        #[arg(long)]
        input: PathBuf,
        #[command(flatten)]
        out: OutArg,
    },
}

#[derive(Debug, Subcommand)]
pub enum CurriculumCommand {
    /// Three cumulative stages from a dataset JSONL.
    Plan {
        #[arg(long)]
        dataset: PathBuf,
        #[command(flatten)]
        out: OutArg,
    },
}

#[derive(Debug, Subcommand)]
pub enum GrpoCommand {
    /// Group-normalized advantages for {prompt_id, rewards} JSONL.
    Advantages {
        #[arg(long)]
        input: PathBuf,
        #[command(flatten)]
        out: OutArg,
    },
    /// Clipped surrogate and loss for {prompt_id, rewards, logp_new, logp_old} JSONL.
    Objective {
        #[arg(long)]
        input: PathBuf,
        #[command(flatten)]
        out: OutArg,
    },
}

#[derive(Debug, Args)]
pub struct OutArg {
    /// Output file; standard output when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

fn open(path: &Path) -> Result<Box<dyn BufRead>, CliError> {
    if path == Path::new("-") {
        return Ok(Box::new(BufReader::new(io::stdin())));
    }
    let f = File::open(path).map_err(|e| io_err(path, e))?;
    Ok(Box::new(BufReader::new(f)))
}

fn create(path: Option<&Path>) -> Result<Box<dyn Write>, CliError> {
    match path {
        None => Ok(Box::new(BufWriter::new(io::stdout()))),
        Some(p) => {
            let f = File::create(p).map_err(|e| io_err(p, e))?;
            Ok(Box::new(BufWriter::new(f)))
        }
    }
}

fn read_text(path: &Path) -> Result<String, CliError> {
    let mut text = String::new();
    open(path)?.read_to_string(&mut text).map_err(|e| io_err(path, e))?;
    Ok(text)
}

fn read_records<T: serde::de::DeserializeOwned>(path: &Path) -> Result<Vec<T>, CliError> {
    read_jsonl(open(path)?).map_err(|e| match e {
        DatasetError::Io(io) => io_err(path, io),
        other => CliError::Invalid(format!("{}: {other}", path.display())),
    })
}

fn write_document<T: Serialize>(out: Option<&Path>, value: &T) -> Result<(), CliError> {
    let mut w = create(out)?;
    serde_json::to_writer_pretty(&mut w, value).map_err(|e| CliError::Internal(e.to_string()))?;
    w.write_all(b"\n").and_then(|_| w.flush()).map_err(|e| CliError::Io(e.to_string()))
}

fn write_lines<T: Serialize>(out: Option<&Path>, items: &[T]) -> Result<(), CliError> {
    write_jsonl(create(out)?, items).map_err(CliError::from)
}

fn settings(cli: &Cli) -> Result<Settings, CliError> {
    let base = match &cli.config {
        Some(path) => Settings::load(path)?,
        None => Settings::default(),
    };
    let mut pairs = Vec::with_capacity(cli.overrides.len());
    for item in &cli.overrides {
        let (k, v) = item
            .split_once('=')
            .ok_or_else(|| CliError::Invalid(format!("--set expects KEY=VALUE, got {item:?}")))?;
        pairs.push((k, v));
    }
    Ok(base.with_overrides(pairs)?)
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawPair {
    id: String,
    repo: String,
    #[serde(default)]
    cwe: Option<String>,
    vulnerable_fn: String,
    fixed_fn: String,
}

#[derive(Debug, Deserialize)]
struct AdvantageRequest {
    prompt_id: String,
    rewards: Vec<f64>,
}

#[derive(Debug, Serialize)]
struct AdvantageRecord {
    prompt_id: String,
    mu: f64,
    sigma: f64,
    advantages: Vec<f64>,
}

#[derive(Debug, Deserialize)]
struct ObjectiveRequest {
    prompt_id: String,
    rewards: Vec<f64>,
    logp_new: Vec<f64>,
    logp_old: Vec<f64>,
}

#[derive(Debug, Serialize)]
struct ObjectiveRecord {
    prompt_id: String,
    advantages: Vec<f64>,
    #[serde(flatten)]
    surrogate: crate::grpo::SurrogateReport,
}

#[derive(Debug, Serialize)]
struct ParseDump<'a> {
    tokens: &'a [Token],
    failed: bool,
    diagnostics: &'a [crate::code_model::Diagnostic],
    tree: Option<&'a SyntaxTree>,
    dfg: Option<NamedDataFlowGraph>,
}

/// Runs one parsed command line.
pub fn run(cli: &Cli) -> Result<(), CliError> {
    let settings = settings(cli)?;
    let metric = settings.metric();
    match &cli.command {
        Command::Score { candidate, oracle } => {
            let cand = read_text(candidate)?;
            let oracle = read_text(oracle)?;
            let report = score_pair(&cand, &oracle, &metric).map_err(invalid)?;
            write_document(None, &report)
        }
        Command::Eval { dataset, predictions, out } => {
            let samples: Vec<RepairSample> = read_records(dataset)?;
            let preds: Vec<Prediction> = read_records(predictions)?;
            let report = evaluate(&samples, &preds, &metric)?;
            write_document(out.out.as_deref(), &report)
        }
        Command::Serve { listen } => match listen {
            Some(addr) => serve_tcp(addr.as_str(), &metric).map_err(|e| CliError::Io(e.to_string())),
            None => {
                let stdin = io::stdin();
                let stdout = io::stdout();
                serve(stdin.lock(), stdout.lock(), &metric)
                    .map(|_| ())
                    .map_err(|e| CliError::Io(e.to_string()))
            }
        },
        Command::Build { input, out } => {
            let raw: Vec<RawPair> = read_records(input)?;
            let samples = raw
                .into_iter()
                .map(|r| {
                    build_sample(r.id.clone(), r.repo, r.cwe, r.vulnerable_fn, r.fixed_fn)
                        .map_err(|e| CliError::Invalid(format!("{}: {e}", r.id)))
                })
                .collect::<Result<Vec<_>, _>>()?;
            write_lines(out.out.as_deref(), &dedup(&samples))
        }
        Command::Split { dataset, seed, out } => {
            let samples: Vec<RepairSample> = read_records(dataset)?;
            let manifest = repo_split(&samples, settings.ratios, seed.unwrap_or(settings.seed))?;
            write_document(out.out.as_deref(), &manifest)
        }
        Command::Filter { input, kept, rejections, threshold } => {
            let items: Vec<FilterItem> = read_records(input)?;
            let threshold = threshold.unwrap_or(settings.threshold);
            let outcome = filter_batch(&items, threshold, &metric).map_err(invalid)?;
            write_lines(Some(kept), &outcome.kept)?;
            write_lines(Some(rejections), &outcome.rejected)?;
            write_document(None, &outcome.report)
        }
        Command::Curriculum(CurriculumCommand::Plan { dataset, out }) => {
            let samples: Vec<RepairSample> = read_records(dataset)?;
            for s in &samples {
                s.validate()?;
            }
            let schedule = build_schedule(&samples).map_err(invalid)?;
            write_document(out.out.as_deref(), &schedule)
        }
        Command::Grpo(GrpoCommand::Advantages { input, out }) => {
            let reqs: Vec<AdvantageRequest> = read_records(input)?;
            let records = reqs
                .into_iter()
                .map(|r| {
                    let g = RewardGroup::new(r.prompt_id.clone(), &r.rewards, settings.epsilon)
                        .map_err(|e| CliError::Invalid(format!("{}: {e}", r.prompt_id)))?;
                    Ok(AdvantageRecord {
                        prompt_id: g.prompt_id,
                        mu: g.mu,
                        sigma: g.sigma,
                        advantages: g.advantages,
                    })
                })
                .collect::<Result<Vec<_>, CliError>>()?;
            write_lines(out.out.as_deref(), &records)
        }
        Command::Grpo(GrpoCommand::Objective { input, out }) => {
            let reqs: Vec<ObjectiveRequest> = read_records(input)?;
            let cfg = settings.grpo();
            let records = reqs
                .into_iter()
                .map(|r| {
                    let fail = |e: crate::grpo::GrpoError| CliError::Invalid(format!("{}: {e}", r.prompt_id));
                    let g = RewardGroup::new(r.prompt_id.clone(), &r.rewards, cfg.epsilon).map_err(fail)?;
                    let eval = PolicyEval { logp_new: r.logp_new.clone(), logp_old: r.logp_old.clone() };
                    let surrogate = group_objective(&g, &eval, &cfg).map_err(fail)?;
                    Ok(ObjectiveRecord { prompt_id: g.prompt_id, advantages: g.advantages, surrogate })
                })
                .collect::<Result<Vec<_>, CliError>>()?;
            write_lines(out.out.as_deref(), &records)
        }
        Command::Parse { input, out } => {
            let text = read_text(input)?;
            let tokens = tokenize(&text);
            let outcome = parse(&tokens);
            let dump = ParseDump {
                tokens: &tokens,
                failed: outcome.failed,
                diagnostics: &outcome.diagnostics,
                tree: outcome.tree.as_ref(),
                dfg: outcome.tree.as_ref().map(extract_named_dfg),
            };
            write_document(out.out.as_deref(), &dump)
        }
    }
}

/// Parses arguments, runs, reports errors on stderr and returns the exit
/// code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_INVALID } else { 0 };
        }
    };
    match std::panic::catch_unwind(|| run(&cli)) {
        Ok(Ok(())) => 0,
        Ok(Err(e)) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
        Err(_) => EXIT_INTERNAL,
    }
}

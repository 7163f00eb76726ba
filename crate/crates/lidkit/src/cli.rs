//! The `lidkit` command line.
//!
//! Exit codes: 0 on success, 2 for usage and input errors, 3 for empty input
//! under `--strict`.

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::fmt::Write as _;
use std::fs;
use std::io::{self, BufRead, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use lidkit_core::classify::{is_short_input, TokenizerConfig};
use lidkit_core::eval::{
    compare, group_errors, split_corpus, EvalReport, GroupErrorReport, MacroAverage, SplitSpec,
};
use lidkit_core::text::clean_social;
use lidkit_core::{
    train, Error as CoreError, LanguageModel, Method, MethodParams, NormForm, Registry, TokenUnit,
    TrainConfig,
};
use rayon::prelude::*;
use serde_json::json;

use crate::bundle::{load_bundle, save_bundle};
use crate::corpus::{read_corpus, write_corpus};
use crate::error::LidError;
use crate::report::{confusion_csv, read_f1_table, write_report};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_EMPTY: i32 = 3;

/// Environment variable naming the default model bundle.
pub const MODEL_ENV: &str = "LIDKIT_MODEL";

#[derive(Debug, Parser)]
#[command(
    name = "lidkit",
    version,
    about = "Train, run and evaluate n-gram language identifiers"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Split a labeled corpus into train/dev/test files per language.
    Split(SplitArgs),
    /// Train a model and write it as a bundle.
    Train(TrainArgs),
    /// Identify the language of texts.
    Identify(IdentifyArgs),
    /// Evaluate a model on a labeled corpus.
    Evaluate(EvaluateArgs),
    /// Compare per-language F1 of several tools.
    Compare(CompareArgs),
    /// Print a summary of a model bundle.
    Inspect(InspectArgs),
}

#[derive(Debug, Args)]
pub struct SplitArgs {
    /// Corpus file with `code<TAB>text` rows.
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long, default_value_t = 5000)]
    pub train_n: usize,
    #[arg(long, default_value_t = 50)]
    pub dev_n: usize,
    #[arg(long, default_value_t = 100)]
    pub test_n: usize,
    /// Languages with fewer sentences are excluded.
    #[arg(long, default_value_t = 2000)]
    pub min_total: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub out_dir: PathBuf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MethodArg {
    Rank,
    Heli,
    Liga,
    Nb,
    Markov,
    Varbyte,
}

impl From<MethodArg> for Method {
    fn from(m: MethodArg) -> Method {
        match m {
            MethodArg::Rank => Method::RankDistance,
            MethodArg::Heli => Method::Heli,
            MethodArg::Liga => Method::Liga,
            MethodArg::Nb => Method::NaiveBayes,
            MethodArg::Markov => Method::Markov,
            MethodArg::Varbyte => Method::VarByte,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum UnitArg {
    Char,
    Word,
    Bpe,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FormArg {
    Composed,
    Decomposed,
}

#[derive(Debug, Args)]
pub struct TrainArgs {
    #[arg(long, value_enum)]
    pub method: MethodArg,
    #[arg(long, value_enum, default_value = "char")]
    pub tokenizer: UnitArg,
    /// Unicode normalization form.
    #[arg(long, value_enum, default_value = "composed")]
    pub form: FormArg,
    /// Keep letter case instead of folding it.
    #[arg(long)]
    pub no_case_fold: bool,
    /// Target vocabulary size of the BPE tokenizer.
    #[arg(long, default_value_t = 2000)]
    pub bpe_vocab: usize,
    /// Pairs seen fewer times than this are never merged.
    #[arg(long, default_value_t = 2)]
    pub bpe_min_pair_frequency: u64,
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
    /// Gzip the bundle.
    #[arg(long)]
    pub compress: bool,
    /// Softmax temperature for confidences.
    #[arg(long, default_value_t = 1.0)]
    pub temperature: f64,
    /// Registry file replacing the built-in language list.
    #[arg(long, conflicts_with = "any_code")]
    pub registry: Option<PathBuf>,
    /// Accept any three-letter code.
    #[arg(long)]
    pub any_code: bool,
    #[command(flatten)]
    pub method_flags: MethodFlags,
}

/// Method parameters; each flag is rejected by methods that lack it.
#[derive(Debug, Default, Args)]
pub struct MethodFlags {
    /// Smallest n-gram order (rank, nb, varbyte).
    #[arg(long)]
    pub n_min: Option<usize>,
    /// Largest n-gram order (rank, nb, varbyte).
    #[arg(long)]
    pub n_max: Option<usize>,
    /// Profile length (rank).
    #[arg(long)]
    pub max_rank: Option<usize>,
    /// Rank each order separately (rank).
    #[arg(long)]
    pub per_order: bool,
    /// Missing-gram penalty (rank: integer, heli: real).
    #[arg(long)]
    pub penalty: Option<f64>,
    /// Largest order (heli).
    #[arg(long)]
    pub nmax: Option<usize>,
    /// Grams kept per order (heli).
    #[arg(long)]
    pub top_f: Option<usize>,
    /// Average per word instead of per position (heli).
    #[arg(long)]
    pub word_average: bool,
    /// Padding symbol around segments (rank, heli, liga).
    #[arg(long, conflicts_with = "no_pad")]
    pub pad: Option<String>,
    /// Disable padding (rank, heli, liga).
    #[arg(long)]
    pub no_pad: bool,
    /// Additive smoothing (nb, markov).
    #[arg(long)]
    pub alpha: Option<f64>,
    /// Uniform class prior (nb).
    #[arg(long)]
    pub uniform_prior: bool,
    /// Grams kept per language (varbyte).
    #[arg(long)]
    pub k: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    Tsv,
    JsonLines,
}

#[derive(Debug, Args)]
pub struct IdentifyArgs {
    #[arg(long, env = MODEL_ENV)]
    pub model: PathBuf,
    /// A single text.
    #[arg(long, conflicts_with_all = ["stdin", "input"])]
    pub text: Option<String>,
    /// Read one text per line from standard input.
    #[arg(long, conflicts_with = "input")]
    pub stdin: bool,
    /// Read one text per line from a file.
    #[arg(long)]
    pub input: Option<PathBuf>,
    #[arg(long, default_value_t = 1)]
    pub top_k: usize,
    #[arg(long, value_enum, default_value = "tsv")]
    pub format: OutputFormat,
    /// Exit with status 3 on empty input instead of warning.
    #[arg(long)]
    pub strict: bool,
    /// Strip URLs and @handles first.
    #[arg(long)]
    pub clean_social: bool,
}

#[derive(Debug, Args)]
pub struct EvaluateArgs {
    #[arg(long, env = MODEL_ENV)]
    pub model: PathBuf,
    /// Labeled corpus with `code<TAB>text` rows.
    #[arg(long)]
    pub input: PathBuf,
    /// Write the JSON report here.
    #[arg(long)]
    pub report: Option<PathBuf>,
    /// Write the confusion matrix as CSV here.
    #[arg(long)]
    pub confusion: Option<PathBuf>,
    /// Average F1 over all model labels, not only those in the gold data.
    #[arg(long)]
    pub all_labels: bool,
    /// Analyze errors within a registry group (repeatable).
    #[arg(long = "group")]
    pub groups_named: Vec<String>,
    /// Group file: `name<TAB>code,code,...` rows, or a bare registry group name.
    #[arg(long)]
    pub groups: Option<PathBuf>,
    /// Registry providing group definitions.
    #[arg(long)]
    pub registry: Option<PathBuf>,
    /// Fail on empty samples instead of skipping them.
    #[arg(long)]
    pub strict: bool,
    #[arg(long)]
    pub clean_social: bool,
}

#[derive(Debug, Args)]
pub struct CompareArgs {
    /// Per-language F1 tables: JSON reports or `code<TAB>f1` files, optionally
    /// as `name=path`.
    #[arg(long, num_args = 1.., required = true)]
    pub reports: Vec<String>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct InspectArgs {
    #[arg(long, env = MODEL_ENV)]
    pub model: PathBuf,
}

/// A failure with the exit status it maps to.
#[derive(Debug)]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

impl CliError {
    fn input(message: impl Into<String>) -> Self {
        CliError {
            code: EXIT_INPUT,
            message: message.into(),
        }
    }
}

impl From<LidError> for CliError {
    fn from(e: LidError) -> Self {
        CliError::input(e.to_string())
    }
}

impl From<CoreError> for CliError {
    fn from(e: CoreError) -> Self {
        CliError::input(e.to_string())
    }
}

impl From<io::Error> for CliError {
    fn from(e: io::Error) -> Self {
        CliError::input(e.to_string())
    }
}

type CliResult = std::result::Result<(), CliError>;

/// Parses arguments, runs the command and returns the exit status.
pub fn run_from<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
        }
    };
    let stdout = io::stdout();
    let mut out = io::BufWriter::new(stdout.lock());
    let result = run(cli, &mut out);
    let _ = out.flush();
    match result {
        Ok(()) => EXIT_OK,
        Err(e) => {
            eprintln!("lidkit: {}", e.message);
            e.code
        }
    }
}

pub fn run(cli: Cli, out: &mut impl Write) -> CliResult {
    match cli.command {
        Command::Split(a) => cmd_split(&a, out),
        Command::Train(a) => cmd_train(&a, out),
        Command::Identify(a) => cmd_identify(&a, out),
        Command::Evaluate(a) => cmd_evaluate(&a, out),
        Command::Compare(a) => cmd_compare(&a, out),
        Command::Inspect(a) => cmd_inspect(&a, out),
    }
}

fn cmd_split(a: &SplitArgs, out: &mut impl Write) -> CliResult {
    let corpus = read_corpus(&a.input)?;
    let spec = SplitSpec {
        train_n: a.train_n,
        dev_n: a.dev_n,
        test_n: a.test_n,
        min_total: a.min_total,
        seed: a.seed,
    };
    let split = split_corpus(&corpus, &spec)?;
    fs::create_dir_all(&a.out_dir).map_err(|e| LidError::io(&a.out_dir, e))?;
    write_corpus(&a.out_dir.join("train.tsv"), &split.train)?;
    write_corpus(&a.out_dir.join("dev.tsv"), &split.dev)?;
    write_corpus(&a.out_dir.join("test.tsv"), &split.test)?;
    let excluded_path = a.out_dir.join("excluded.txt");
    let mut excluded = String::new();
    for code in &split.excluded {
        excluded.push_str(code);
        excluded.push('\n');
    }
    fs::write(&excluded_path, excluded).map_err(|e| LidError::io(&excluded_path, e))?;
    writeln!(
        out,
        "train {}\tdev {}\ttest {}\texcluded {}",
        split.train.len(),
        split.dev.len(),
        split.test.len(),
        split.excluded.len()
    )?;
    Ok(())
}

fn not_for(flag: &str, method: Method) -> CliError {
    CliError::input(format!(
        "--{flag} does not apply to method {}",
        method.name()
    ))
}

/// Applies the method flags to the default parameters of `method`.
pub fn method_params(
    method: Method,
    f: &MethodFlags,
) -> std::result::Result<MethodParams, CliError> {
    let mut params = method.default_params();
    let pad = if f.no_pad {
        Some(None)
    } else {
        f.pad.clone().map(Some)
    };
    macro_rules! take {
        ($value:expr, $slot:expr) => {
            if let Some(v) = $value {
                $slot = v;
            }
        };
    }
    match &mut params {
        MethodParams::RankDistance(p) => {
            take!(f.n_min, p.n_min);
            take!(f.n_max, p.n_max);
            take!(f.max_rank, p.max_rank);
            take!(pad, p.pad);
            p.per_order = f.per_order;
            if let Some(v) = f.penalty {
                if v < 0.0 || v.fract() != 0.0 || v > u64::MAX as f64 {
                    return Err(CliError::input(format!(
                        "rank penalty {v} must be a whole number"
                    )));
                }
                p.missing_penalty = Some(v as u64);
            }
        }
        MethodParams::Heli(p) => {
            take!(f.nmax, p.nmax);
            take!(f.top_f, p.top_f);
            take!(f.penalty, p.penalty);
            take!(pad, p.pad);
            p.word_average = f.word_average;
        }
        MethodParams::Liga(p) => take!(pad, p.pad),
        MethodParams::NaiveBayes(p) => {
            take!(f.n_min, p.n_min);
            take!(f.n_max, p.n_max);
            take!(f.alpha, p.alpha);
            p.uniform_prior = f.uniform_prior;
        }
        MethodParams::Markov(p) => take!(f.alpha, p.alpha),
        MethodParams::VarByte(p) => {
            take!(f.n_min, p.n_min);
            take!(f.n_max, p.n_max);
            take!(f.k, p.k);
        }
    }
    let accepts = |flag: &str| -> bool {
        use Method::*;
        match flag {
            "n-min" | "n-max" => matches!(method, RankDistance | NaiveBayes | VarByte),
            "max-rank" | "per-order" => method == RankDistance,
            "penalty" => matches!(method, RankDistance | Heli),
            "nmax" | "top-f" | "word-average" => method == Heli,
            "pad" | "no-pad" => matches!(method, RankDistance | Heli | Liga),
            "alpha" => matches!(method, NaiveBayes | Markov),
            "uniform-prior" => method == NaiveBayes,
            "k" => method == VarByte,
            _ => false,
        }
    };
    let given = [
        ("n-min", f.n_min.is_some()),
        ("n-max", f.n_max.is_some()),
        ("max-rank", f.max_rank.is_some()),
        ("per-order", f.per_order),
        ("penalty", f.penalty.is_some()),
        ("nmax", f.nmax.is_some()),
        ("top-f", f.top_f.is_some()),
        ("word-average", f.word_average),
        ("pad", f.pad.is_some()),
        ("no-pad", f.no_pad),
        ("alpha", f.alpha.is_some()),
        ("uniform-prior", f.uniform_prior),
        ("k", f.k.is_some()),
    ];
    if let Some((flag, _)) = given.iter().find(|(flag, set)| *set && !accepts(flag)) {
        return Err(not_for(flag, method));
    }
    params.validate()?;
    Ok(params)
}

fn cmd_train(a: &TrainArgs, out: &mut impl Write) -> CliResult {
    let method: Method = a.method.into();
    let params = method_params(method, &a.method_flags)?;
    let registry = if a.any_code {
        None
    } else if let Some(path) = &a.registry {
        let text = fs::read_to_string(path).map_err(|e| LidError::io(path, e))?;
        Some(
            Registry::parse(&text)
                .map_err(|e| CliError::input(format!("{}: {e}", path.display())))?,
        )
    } else {
        Some(Registry::builtin())
    };
    let corpus = read_corpus(&a.input)?;
    let config = TrainConfig {
        params,
        tokenizer: TokenizerConfig {
            unit: match a.tokenizer {
                UnitArg::Char => TokenUnit::Char,
                UnitArg::Word => TokenUnit::Word,
                UnitArg::Bpe => TokenUnit::Bpe,
            },
            form: match a.form {
                FormArg::Composed => NormForm::Composed,
                FormArg::Decomposed => NormForm::Decomposed,
            },
            case_fold: !a.no_case_fold,
            bpe_vocab: a.bpe_vocab,
            bpe_min_pair_frequency: a.bpe_min_pair_frequency,
        },
        temperature: a.temperature,
    };
    let start = Instant::now();
    let model = train(&corpus, &config, registry.as_ref())?;
    let elapsed = start.elapsed();
    save_bundle(&model, &a.out, a.compress)?;

    let mut samples: BTreeMap<&str, usize> = BTreeMap::new();
    for (code, _) in &corpus {
        *samples.entry(code.as_str()).or_default() += 1;
    }
    for (code, n) in &samples {
        writeln!(out, "{code}\t{n}")?;
    }
    writeln!(
        out,
        "trained {} on {} languages in {:.3}s",
        method.name(),
        model.labels().len(),
        elapsed.as_secs_f64()
    )?;
    Ok(())
}

fn read_lines(reader: impl BufRead) -> io::Result<Vec<String>> {
    reader
        .lines()
        .map(|l| l.map(|l| l.strip_suffix('\r').map(str::to_string).unwrap_or(l)))
        .collect()
}

fn identify_inputs(a: &IdentifyArgs) -> std::result::Result<Vec<String>, CliError> {
    if let Some(text) = &a.text {
        Ok(vec![text.clone()])
    } else if a.stdin {
        Ok(read_lines(io::stdin().lock())?)
    } else if let Some(path) = &a.input {
        let file = fs::File::open(path).map_err(|e| LidError::io(path, e))?;
        Ok(read_lines(io::BufReader::new(file)).map_err(|e| LidError::io(path, e))?)
    } else {
        Err(CliError::input(
            "one of --text, --stdin or --input is required",
        ))
    }
}

fn cmd_identify(a: &IdentifyArgs, out: &mut impl Write) -> CliResult {
    if a.top_k == 0 {
        return Err(CliError::input("--top-k must be at least 1"));
    }
    let model = load_bundle(&a.model)?;
    let inputs = identify_inputs(a)?;
    let prepared: Vec<String> = if a.clean_social {
        inputs.iter().map(|t| clean_social(t)).collect()
    } else {
        inputs
    };
    let results: Vec<_> = prepared
        .par_iter()
        .map(|text| model.identify(text, a.top_k))
        .collect();

    for (index, (text, result)) in prepared.iter().zip(results).enumerate() {
        let predictions = match result {
            Ok(p) => p,
            Err(CoreError::EmptyInput) => {
                if a.strict {
                    out.flush()?;
                    return Err(CliError {
                        code: EXIT_EMPTY,
                        message: format!("input {index} is empty"),
                    });
                }
                eprintln!("lidkit: warning: input {index} is empty");
                match a.format {
                    OutputFormat::Tsv => writeln!(out, "# input {index}: empty")?,
                    OutputFormat::JsonLines => writeln!(
                        out,
                        "{}",
                        json!({ "input_index": index, "predictions": [], "warning": "empty input" })
                    )?,
                }
                continue;
            }
            Err(e) => return Err(e.into()),
        };
        if is_short_input(model.tokenizer(), text) {
            eprintln!("lidkit: warning: input {index} is short; the prediction may be unreliable");
        }
        match a.format {
            OutputFormat::Tsv => {
                for (rank, p) in predictions.iter().enumerate() {
                    writeln!(out, "{}\t{}\t{:.6}", rank + 1, p.code, p.confidence)?;
                }
            }
            OutputFormat::JsonLines => {
                let preds: Vec<_> = predictions
                    .iter()
                    .map(|p| json!({ "code": p.code, "confidence": p.confidence }))
                    .collect();
                writeln!(
                    out,
                    "{}",
                    json!({ "input_index": index, "predictions": preds })
                )?;
            }
        }
    }
    Ok(())
}

/// Group definitions from a group file. Rows are `name<TAB>code,code,...`; a
/// row with only a name refers to a registry group. Members are not checked
/// against any registry.
pub fn parse_group_file(
    text: &str,
    registry: &Registry,
) -> std::result::Result<Vec<(String, Vec<String>)>, CliError> {
    let mut groups = Vec::new();
    for (idx, line) in text.lines().enumerate() {
        let line = line.trim_end_matches('\r');
        if line.trim().is_empty() || line.starts_with('#') {
            continue;
        }
        match line.split_once('\t') {
            Some((name, codes)) => {
                let members: Vec<String> = codes
                    .split(',')
                    .map(str::trim)
                    .filter(|c| !c.is_empty())
                    .map(str::to_string)
                    .collect();
                groups.push((name.trim().to_string(), members));
            }
            None => {
                let name = line.trim();
                let members = registry.group(name).ok_or_else(|| {
                    CliError::input(format!("line {}: unknown group `{name}`", idx + 1))
                })?;
                groups.push((name.to_string(), members.to_vec()));
            }
        }
    }
    Ok(groups)
}

fn cmd_evaluate(a: &EvaluateArgs, out: &mut impl Write) -> CliResult {
    let model = load_bundle(&a.model)?;
    let registry = match &a.registry {
        Some(path) => {
            let text = fs::read_to_string(path).map_err(|e| LidError::io(path, e))?;
            Registry::parse(&text)
                .map_err(|e| CliError::input(format!("{}: {e}", path.display())))?
        }
        None => Registry::builtin(),
    };
    let mut group_defs = Vec::new();
    for name in &a.groups_named {
        let members = registry
            .group(name)
            .ok_or_else(|| CliError::input(format!("unknown group `{name}`")))?;
        group_defs.push((name.clone(), members.to_vec()));
    }
    if let Some(path) = &a.groups {
        let text = fs::read_to_string(path).map_err(|e| LidError::io(path, e))?;
        group_defs.extend(parse_group_file(&text, &registry)?);
    }

    let corpus = read_corpus(&a.input)?;
    if let Some((code, _)) = corpus
        .iter()
        .find(|(code, _)| model.labels().binary_search(code).is_err())
    {
        return Err(CoreError::UnknownGoldLabel(code.clone()).into());
    }
    let predictions: Vec<_> = corpus
        .par_iter()
        .map(|(_, text)| {
            let text = if a.clean_social {
                clean_social(text)
            } else {
                text.clone()
            };
            model.identify(&text, 1)
        })
        .collect();
    let mut pairs = Vec::with_capacity(corpus.len());
    let mut skipped = 0usize;
    for (idx, ((gold, _), result)) in corpus.iter().zip(predictions).enumerate() {
        match result {
            Ok(p) => pairs.push((gold.as_str(), p[0].code.clone())),
            Err(CoreError::EmptyInput) if !a.strict => skipped += 1,
            Err(CoreError::EmptyInput) => {
                return Err(CliError {
                    code: EXIT_EMPTY,
                    message: format!("sample {} is empty", idx + 1),
                })
            }
            Err(e) => return Err(e.into()),
        }
    }
    if skipped > 0 {
        eprintln!("lidkit: warning: skipped {skipped} empty samples");
    }
    if pairs.is_empty() {
        return Err(CliError {
            code: EXIT_EMPTY,
            message: "no samples to evaluate".into(),
        });
    }
    let average = if a.all_labels {
        MacroAverage::AllLabels
    } else {
        MacroAverage::GoldPresent
    };
    let report = EvalReport::from_pairs(model.labels(), &pairs, average)?;
    let mut groups: Vec<GroupErrorReport> = Vec::new();
    for (name, members) in &group_defs {
        let g = group_errors(&report, name, members)?;
        for w in &g.warnings {
            eprintln!("lidkit: warning: group {name}: {w}");
        }
        groups.push(g);
    }

    writeln!(out, "samples\t{}", pairs.len())?;
    writeln!(out, "accuracy\t{:.6}", report.accuracy)?;
    writeln!(out, "macro_f1\t{:.6}", report.macro_f1)?;
    let h = &report.f1_histogram;
    writeln!(
        out,
        "f1_histogram\t=1.0 {}\t[0.95,1) {}\t[0.90,0.95) {}\t<0.90 {}",
        h.perfect, h.from_95, h.from_90, h.below_90
    )?;
    for g in &groups {
        let share = g
            .within_share_of_errors
            .map_or_else(|| "-".to_string(), |s| format!("{s:.6}"));
        writeln!(
            out,
            "group {}\tmembers {}\twithin_share_of_errors {share}",
            g.group,
            g.members.len()
        )?;
        for m in &g.members {
            writeln!(
                out,
                "  {}\tcorrect {:.4}\twithin {:.4}\tothers {:.4}",
                m.code, m.correct, m.within_group, m.others
            )?;
        }
    }
    if let Some(path) = &a.report {
        write_report(path, &report, &groups)?;
    }
    if let Some(path) = &a.confusion {
        fs::write(path, confusion_csv(&report)).map_err(|e| LidError::io(path, e))?;
    }
    Ok(())
}

fn tool_source(spec: &str) -> (String, PathBuf) {
    if let Some((name, path)) = spec.split_once('=') {
        if !name.is_empty() && !name.contains(['/', '\\']) {
            return (name.to_string(), PathBuf::from(path));
        }
    }
    let path = PathBuf::from(spec);
    let name = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| spec.to_string());
    (name, path)
}

fn cmd_compare(a: &CompareArgs, out: &mut impl Write) -> CliResult {
    if a.reports.len() < 2 {
        return Err(CliError::input("compare needs at least two reports"));
    }
    let mut tables = BTreeMap::new();
    for spec in &a.reports {
        let (name, path) = tool_source(spec);
        let table = read_f1_table(&path)?;
        if tables.insert(name.clone(), table).is_some() {
            return Err(CliError::input(format!("tool name `{name}` is used twice")));
        }
    }
    let rendered = compare(&tables).render();
    match &a.out {
        Some(path) => fs::write(path, &rendered).map_err(|e| LidError::io(path, e))?,
        None => out.write_all(rendered.as_bytes())?,
    }
    Ok(())
}

/// Human-readable summary of a model.
pub fn describe(model: &LanguageModel, path: &Path) -> String {
    let mut s = String::new();
    let tok = model.tokenizer();
    let _ = writeln!(s, "bundle\t{}", path.display());
    let _ = writeln!(s, "method\t{}", model.method().name());
    let _ = writeln!(
        s,
        "tokenizer\tunit={} form={} case_fold={}",
        tok.unit.name(),
        tok.form.name(),
        tok.case_fold
    );
    if let Some(bpe) = &tok.bpe {
        let _ = writeln!(
            s,
            "bpe\ttarget_vocab_size={} base={} merges={}",
            bpe.target_vocab_size(),
            bpe.base_symbols().len(),
            bpe.merges().len()
        );
    }
    let _ = writeln!(s, "temperature\t{:?}", model.temperature());
    for (k, v) in model.kind().params().to_pairs() {
        let _ = writeln!(s, "param\t{k}\t{v}");
    }
    let _ = writeln!(s, "labels\t{}", model.labels().len());
    let sizes = table_sizes(model);
    for (code, size) in model.labels().iter().zip(sizes) {
        let _ = writeln!(s, "  {code}\t{size}");
    }
    s
}

fn table_sizes(model: &LanguageModel) -> Vec<usize> {
    use lidkit_core::classify::ModelKind;
    match model.kind() {
        ModelKind::RankDistance(m) => m.counts().iter().map(|c| c.len()).collect(),
        ModelKind::Heli(m) => m.counts().iter().map(|c| c.len()).collect(),
        ModelKind::Liga(m) => m.counts().iter().map(|c| c.len()).collect(),
        ModelKind::NaiveBayes(m) => m.counts().iter().map(|c| c.len()).collect(),
        ModelKind::Markov(m) => m.transition_counts().iter().map(|c| c.len()).collect(),
        ModelKind::VarByte(m) => m.counts().iter().map(|c| c.len()).collect(),
    }
}

fn cmd_inspect(a: &InspectArgs, out: &mut impl Write) -> CliResult {
    let model = load_bundle(&a.model)?;
    out.write_all(describe(&model, &a.model).as_bytes())?;
    Ok(())
}

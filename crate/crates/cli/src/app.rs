use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use clap::error::ErrorKind;
use clap::{Arg, ArgAction, ArgMatches, Args, FromArgMatches, Parser, Subcommand};
use log::info;
use serde::Serialize;
use subeval_core::align::{
    parse_bitext, parse_parallel_bitext, train_aligner, viterbi_align, write_pharaoh, AlignerConfig, BitextPair,
    TranslationModel,
};
use subeval_core::consistency::validate_lexical_metric;
use subeval_core::quality::{bootstrap_significance, Metric};

use crate::config::{OutputKind, RunConfig, ValueKind, KEYS};
use crate::pipeline::{load_document, read, run_eval};
use crate::report::diagnostics_jsonl;
use crate::UsageError;

#[derive(Parser)]
#[command(name = "subeval", version, about = "Evaluate captions and subtitles: quality, conformity and consistency")]
struct Cli {
    /// More log output (repeatable).
    #[arg(short, long, action = ArgAction::Count, global = true)]
    verbose: u8,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Score a system's captions and subtitles.
    Eval(EvalArgs),
    /// Train or apply the word aligner.
    #[command(subcommand)]
    Align(AlignCommand),
    /// Paired bootstrap test between two systems.
    Significance(SignificanceArgs),
    /// Compare automatic lexical consistency with manual annotation.
    ValidateLexical(ValidateArgs),
}

#[derive(Args)]
struct EvalArgs {
    /// Flat `key value` configuration file; flags override it.
    #[arg(long, value_name = "PATH")]
    config: Option<PathBuf>,
    /// Write the resolved configuration to PATH.
    #[arg(long, value_name = "PATH")]
    write_config: Option<PathBuf>,
    /// Write report.json / report.tsv into DIR instead of stdout.
    #[arg(long, value_name = "DIR")]
    output_dir: Option<PathBuf>,
    /// Write per-pair lexical diagnostics as JSON lines.
    #[arg(long, value_name = "PATH")]
    diagnostics: Option<PathBuf>,
    #[command(flatten)]
    settings: Settings,
}

/// Configuration keys given on the command line, in flag order of [`KEYS`].
#[derive(Debug, Default, Clone)]
struct Settings(Vec<(&'static str, String)>);

const NEGATIONS: [(&str, &str, &str); 2] = [
    ("no-diagonal", "diagonal", "Disable the diagonal alignment prior"),
    ("fixed-tension", "optimize-tension", "Keep the initial tension"),
];

impl FromArgMatches for Settings {
    fn from_arg_matches(m: &ArgMatches) -> Result<Self, clap::Error> {
        let mut s = Settings::default();
        s.update_from_arg_matches(m)?;
        Ok(s)
    }

    fn update_from_arg_matches(&mut self, m: &ArgMatches) -> Result<(), clap::Error> {
        for spec in KEYS {
            match spec.kind {
                ValueKind::Bool => {
                    if m.get_flag(spec.key) {
                        self.0.push((spec.key, "true".into()));
                    }
                }
                _ => {
                    if let Some(v) = m.get_one::<String>(spec.key) {
                        self.0.push((spec.key, v.clone()));
                    }
                }
            }
        }
        for (flag, key, _) in NEGATIONS {
            if m.get_flag(flag) {
                self.0.push((key, "false".into()));
            }
        }
        Ok(())
    }
}

impl Args for Settings {
    fn augment_args(cmd: clap::Command) -> clap::Command {
        let cmd = KEYS.iter().fold(cmd, |cmd, spec| {
            let arg = Arg::new(spec.key).long(spec.key).help(spec.help);
            cmd.arg(match spec.kind {
                ValueKind::Bool => arg.action(ArgAction::SetTrue),
                ValueKind::Path => arg.value_name("PATH"),
                ValueKind::Value => arg.value_name("VALUE"),
            })
        });
        NEGATIONS.iter().fold(cmd, |cmd, &(flag, key, help)| {
            cmd.arg(Arg::new(flag).long(flag).help(help).action(ArgAction::SetTrue).conflicts_with(key))
        })
    }

    fn augment_args_for_update(cmd: clap::Command) -> clap::Command {
        Self::augment_args(cmd)
    }
}

#[derive(Subcommand)]
enum AlignCommand {
    /// Train a model and write it as a plain-text table.
    Train(TrainArgs),
    /// Decode Pharaoh links with a trained model.
    Apply(ApplyArgs),
}

#[derive(Args)]
struct BitextArgs {
    /// `left ||| right` file of whitespace-tokenized text.
    #[arg(long, value_name = "PATH")]
    train_bitext: Option<PathBuf>,
    /// Left side as a line-parallel file.
    #[arg(long, value_name = "PATH", requires = "train_target", conflicts_with = "train_bitext")]
    train_source: Option<PathBuf>,
    /// Right side as a line-parallel file.
    #[arg(long, value_name = "PATH", requires = "train_source")]
    train_target: Option<PathBuf>,
}

#[derive(Args)]
struct TrainArgs {
    #[command(flatten)]
    bitext: BitextArgs,
    /// Further `left ||| right` files appended to the corpus (repeatable).
    #[arg(long, value_name = "PATH")]
    extra_bitext: Vec<PathBuf>,
    /// Output model path.
    #[arg(long, value_name = "PATH")]
    model: PathBuf,
    /// Treat the right side as the source language.
    #[arg(long)]
    reverse: bool,
    #[arg(long, default_value_t = 5)]
    iterations: usize,
    #[arg(long, default_value_t = 0.08)]
    null_prob: f64,
    #[arg(long, default_value_t = 4.0)]
    tension: f64,
    #[arg(long)]
    no_diagonal: bool,
    #[arg(long)]
    fixed_tension: bool,
}

#[derive(Args)]
struct ApplyArgs {
    #[arg(long, value_name = "PATH")]
    model: PathBuf,
    #[command(flatten)]
    bitext: BitextArgs,
    /// The model was trained with `--reverse`.
    #[arg(long)]
    reverse: bool,
    /// Write links here instead of stdout.
    #[arg(long, value_name = "PATH")]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct SignificanceArgs {
    #[arg(long, value_name = "PATH")]
    system_a: PathBuf,
    #[arg(long, value_name = "PATH")]
    system_b: PathBuf,
    #[arg(long, value_name = "PATH")]
    reference: PathBuf,
    #[arg(long, default_value = "bleu")]
    metric: Metric,
    #[arg(long, default_value_t = 1000)]
    resamples: usize,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    #[arg(long, default_value = "mustcinema", value_parser = ["mustcinema", "srt"])]
    format: String,
}

#[derive(Args)]
struct ValidateArgs {
    /// Automatic per-pair scores, one number per line.
    #[arg(long, value_name = "PATH")]
    automatic: PathBuf,
    /// Manual per-pair scores, one number per line.
    #[arg(long, value_name = "PATH")]
    manual: PathBuf,
    /// Automatic per-block judgements, one `true`/`false` (or 1/0) per line.
    #[arg(long, value_name = "PATH")]
    auto_judgements: PathBuf,
    /// Manual per-block judgements.
    #[arg(long, value_name = "PATH")]
    manual_judgements: PathBuf,
}

fn write_out(path: Option<&Path>, text: &str) -> Result<()> {
    match path {
        Some(p) => fs::write(p, text).with_context(|| format!("cannot write {}", p.display())),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes())?;
            out.flush()?;
            Ok(())
        }
    }
}

fn cmd_eval(args: EvalArgs) -> Result<()> {
    let mut config = RunConfig::default();
    if let Some(path) = &args.config {
        config.apply_file(&read(path)?)?;
    }
    for (key, value) in &args.settings.0 {
        config.set(key, value)?;
    }
    config.check()?;
    if let Some(p) = &args.write_config {
        write_out(Some(p), &config.to_config_text())?;
    }
    let eval = run_eval(&config)?;
    let json = matches!(config.out, OutputKind::Json | OutputKind::Both);
    let tsv = matches!(config.out, OutputKind::Tsv | OutputKind::Both);
    match &args.output_dir {
        Some(dir) => {
            fs::create_dir_all(dir).with_context(|| format!("cannot create {}", dir.display()))?;
            if json {
                write_out(Some(&dir.join("report.json")), &eval.report.to_json())?;
            }
            if tsv {
                write_out(Some(&dir.join("report.tsv")), &eval.report.to_tsv())?;
            }
        }
        None => {
            let mut text = String::new();
            if json {
                text.push_str(&eval.report.to_json());
            }
            if tsv {
                text.push_str(&eval.report.to_tsv());
            }
            write_out(None, &text)?;
        }
    }
    if let Some(p) = &args.diagnostics {
        write_out(Some(p), &diagnostics_jsonl(&eval.per_pair))?;
    }
    Ok(())
}

fn load_bitext(args: &BitextArgs) -> Result<Vec<BitextPair>> {
    match (&args.train_bitext, &args.train_source, &args.train_target) {
        (Some(p), _, _) => Ok(parse_bitext(&read(p)?).with_context(|| p.display().to_string())?),
        (None, Some(s), Some(t)) => Ok(parse_parallel_bitext(&read(s)?, &read(t)?)
            .with_context(|| format!("{} / {}", s.display(), t.display()))?),
        _ => Err(UsageError("a bitext is required: --train-bitext or --train-source with --train-target".into()).into()),
    }
}

fn cmd_align_train(args: TrainArgs) -> Result<()> {
    let config = AlignerConfig {
        iterations: args.iterations,
        use_diagonal_prior: !args.no_diagonal,
        null_prob: args.null_prob,
        initial_tension: args.tension,
        optimize_tension: !args.fixed_tension,
    };
    config.validate().map_err(|e| UsageError(e.to_string()))?;
    let mut corpus = load_bitext(&args.bitext)?;
    for p in &args.extra_bitext {
        corpus.extend(parse_bitext(&read(p)?).with_context(|| p.display().to_string())?);
    }
    if args.reverse {
        corpus = corpus.iter().map(BitextPair::reversed).collect();
    }
    let run = train_aligner(&corpus, &config)?;
    for (k, (ll, t)) in run.log_likelihood.iter().zip(&run.tension).enumerate() {
        info!("iteration {}: log-likelihood {ll}, tension {t}", k + 1);
    }
    write_out(Some(&args.model), &run.model.to_text())
}

fn cmd_align_apply(args: ApplyArgs) -> Result<()> {
    let model = TranslationModel::from_text(&read(&args.model)?).with_context(|| args.model.display().to_string())?;
    let pairs = load_bitext(&args.bitext)?;
    let mut out = String::new();
    for pair in &pairs {
        let links = if args.reverse {
            viterbi_align(&model, &pair.reversed()).transposed()
        } else {
            viterbi_align(&model, pair)
        };
        out.push_str(&write_pharaoh(&links));
        out.push('\n');
    }
    write_out(args.output.as_deref(), &out)
}

#[derive(Serialize)]
struct SignificanceOutput {
    p_value: f64,
    delta_mean: f64,
    resamples: usize,
    seed: u64,
}

fn cmd_significance(args: SignificanceArgs) -> Result<()> {
    if args.resamples == 0 {
        return Err(UsageError("--resamples must be positive".into()).into());
    }
    let format = if args.format == "srt" {
        crate::config::InputFormat::Srt
    } else {
        crate::config::InputFormat::MustCinema
    };
    let load = |p: &Path| load_document(p, format, None, false);
    let (a, b, r) = (load(&args.system_a)?, load(&args.system_b)?, load(&args.reference)?);
    let res = bootstrap_significance(a.utterances(), b.utterances(), r.utterances(), args.metric, args.resamples, args.seed)?;
    let out = SignificanceOutput {
        p_value: res.p_value,
        delta_mean: res.delta_mean,
        resamples: res.resamples,
        seed: res.seed,
    };
    write_out(None, &(serde_json::to_string_pretty(&out)? + "\n"))
}

fn read_column<T>(path: &Path, parse: impl Fn(&str) -> Option<T>) -> Result<Vec<T>> {
    read(path)?
        .lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(n, l)| parse(l.trim()).with_context(|| format!("{}:{}: cannot parse {l:?}", path.display(), n + 1)))
        .collect()
}

fn cmd_validate(args: ValidateArgs) -> Result<()> {
    let num = |s: &str| s.parse::<f64>().ok().filter(|x| x.is_finite());
    let flag = |s: &str| match s {
        "true" | "1" => Some(true),
        "false" | "0" => Some(false),
        _ => None,
    };
    let v = validate_lexical_metric(
        &read_column(&args.automatic, num)?,
        &read_column(&args.manual, num)?,
        &read_column(&args.auto_judgements, flag)?,
        &read_column(&args.manual_judgements, flag)?,
    )?;
    write_out(None, &(serde_json::to_string_pretty(&v)? + "\n"))
}

/// Runs the command line and returns the process exit code: 0 on success,
/// 1 for usage errors, 2 for data errors.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
        }
    };
    let level = match cli.verbose {
        0 => log::LevelFilter::Warn,
        1 => log::LevelFilter::Info,
        _ => log::LevelFilter::Debug,
    };
    let _ = env_logger::Builder::new().filter_level(level).format_timestamp(None).try_init();
    let result = match cli.command {
        Command::Eval(a) => cmd_eval(a),
        Command::Align(AlignCommand::Train(a)) => cmd_align_train(a),
        Command::Align(AlignCommand::Apply(a)) => cmd_align_apply(a),
        Command::Significance(a) => cmd_significance(a),
        Command::ValidateLexical(a) => cmd_validate(a),
    };
    match result {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e:#}");
            if e.downcast_ref::<UsageError>().is_some() {
                1
            } else {
                2
            }
        }
    }
}

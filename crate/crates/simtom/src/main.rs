use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use simtom::dataset::{self, PerspectiveRecord};
use simtom::gateway::{self, ChatBackend, LiveBackend, LiveConfig, MockConfound, MockPerfect, Recorder, Replay};
use simtom::harness::{self, HarnessError, RunConfig};
use simtom::report::{self, Format, Report};
use simtom_core::corpus::generate_tomi_corpus;
use simtom_core::oracle::{answer_ground_truth, oracle_perspective_text};
use simtom_core::{Benchmark, Method, ModelFamily};

#[derive(Parser)]
#[command(name = "simtom", version, about = "Perspective-taking prompting experiments on false-belief benchmarks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a balanced ToMI-style corpus.
    Generate {
        #[arg(long, default_value = "tomi")]
        benchmark: String,
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        n_per_type: usize,
        #[arg(long)]
        out: PathBuf,
    },
    /// Convert a BigTOM table into dataset JSONL.
    Ingest {
        #[arg(long, default_value = "bigtom")]
        benchmark: String,
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Write symbolic-oracle perspectives and answers for a ToMI dataset.
    Oracle {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Run a prompting method over a dataset.
    Run(RunArgs),
    /// Aggregate results into a report.
    Score {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value = "markdown")]
        format: String,
    },
    /// Column-wise differences between two JSON reports (b minus a).
    Diff {
        #[arg(long)]
        a: PathBuf,
        #[arg(long)]
        b: PathBuf,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum BackendKind {
    Live,
    Replay,
    MockPerfect,
    MockConfound,
}

#[derive(clap::Args)]
struct RunArgs {
    #[arg(long)]
    dataset: PathBuf,
    #[arg(long)]
    method: String,
    #[arg(long, value_enum)]
    backend: BackendKind,
    #[arg(long, default_value = "gpt-3.5-turbo")]
    model: String,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
    #[arg(long)]
    resume: bool,
    /// Perspective JSONL for simtom_oracle (required for BigTOM).
    #[arg(long)]
    oracle_perspectives: Option<PathBuf>,
    #[arg(long, default_value = "https://api.openai.com/v1")]
    base_url: String,
    /// Cassette directory: read by the replay backend, written with --record.
    #[arg(long)]
    cassette: Option<PathBuf>,
    /// Store every exchange in the cassette directory.
    #[arg(long)]
    record: bool,
    #[arg(long, default_value_t = 4)]
    max_concurrency: usize,
    /// Requests per minute for the live backend.
    #[arg(long)]
    rpm: Option<u32>,
    #[arg(long, default_value_t = gateway::DEFAULT_MAX_TOKENS)]
    max_tokens: u32,
    /// Prompt dialect; inferred from the model id when absent.
    #[arg(long)]
    family: Option<String>,
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match dispatch(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}

fn dispatch(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Command::Generate { benchmark, seed, n_per_type, out } => {
            if Benchmark::parse(&benchmark) != Some(Benchmark::Tomi) {
                bail!("only ToMI corpora can be generated; ingest BigTOM with `simtom ingest`");
            }
            let samples = generate_tomi_corpus(seed, n_per_type);
            dataset::write_jsonl(&out, &samples)?;
            println!("wrote {} samples to {}", samples.len(), out.display());
        }
        Command::Ingest { benchmark, input, out } => {
            if Benchmark::parse(&benchmark) != Some(Benchmark::BigTom) {
                bail!("ingest reads BigTOM tables only");
            }
            let ingest = dataset::load_bigtom(&input)?;
            dataset::write_jsonl(&out, &ingest.samples)?;
            println!(
                "wrote {} samples to {} ({} backward rows excluded, {} unknown skipped)",
                ingest.samples.len(),
                out.display(),
                ingest.backward_excluded,
                ingest.unknown_skipped
            );
        }
        Command::Oracle { input, out } => {
            let samples = dataset::read_jsonl(&input)?;
            let mut records = Vec::with_capacity(samples.len());
            for s in &samples {
                if s.story.benchmark() == Benchmark::BigTom {
                    bail!(
                        "{}: BigTOM has no symbolic oracle; pass annotated perspectives to `run --oracle-perspectives`",
                        s.id
                    );
                }
                records.push(PerspectiveRecord {
                    id: s.id.clone(),
                    character: s.character.clone(),
                    perspective_text: oracle_perspective_text(s).with_context(|| s.id.clone())?,
                    ground_truth: Some(answer_ground_truth(s).with_context(|| s.id.clone())?),
                });
            }
            dataset::write_perspectives(&out, &records)?;
            println!("wrote {} perspectives to {}", records.len(), out.display());
        }
        Command::Run(args) => return run(args),
        Command::Score { input, out, format } => {
            let format = Format::parse(&format)?;
            let results = harness::read_results(&input)?;
            let label = results.first().map_or_else(String::new, |r| r.method.to_string());
            let (metrics, errored) = harness::score_results(&results)?;
            let report = Report::new(&label, &metrics, errored);
            std::fs::write(&out, report::emit(&report, format)).with_context(|| out.display().to_string())?;
            print!("{}", report::to_markdown(&report));
        }
        Command::Diff { a, b } => {
            let load = |p: &Path| -> Result<Report> {
                let text = std::fs::read_to_string(p).with_context(|| p.display().to_string())?;
                Ok(report::from_json(&text)?)
            };
            let (_, table) = report::diff_table(&load(&a)?.row, &load(&b)?.row)?;
            print!("{table}");
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn backend(args: &RunArgs) -> Result<Box<dyn ChatBackend>> {
    let inner: Box<dyn ChatBackend> = match args.backend {
        BackendKind::Live => {
            let mut config = LiveConfig::new(&args.base_url);
            config.api_key = std::env::var(gateway::API_KEY_ENV).ok();
            if config.api_key.is_none() {
                log::warn!("{} is not set; sending requests without a credential", gateway::API_KEY_ENV);
            }
            config.rpm = args.rpm;
            Box::new(LiveBackend::new(config)?)
        }
        BackendKind::Replay => {
            let dir = args.cassette.as_ref().context("--backend replay needs --cassette DIR")?;
            return Ok(Box::new(Replay::new(dir)));
        }
        BackendKind::MockPerfect => Box::new(MockPerfect),
        BackendKind::MockConfound => Box::new(MockConfound),
    };
    if args.record {
        let dir = args.cassette.as_ref().context("--record needs --cassette DIR")?;
        return Ok(Box::new(Recorder::new(inner, dir)?));
    }
    Ok(inner)
}

fn run(args: RunArgs) -> Result<ExitCode> {
    let method = Method::parse(&args.method).with_context(|| format!("unknown method {}", args.method))?;
    let samples = dataset::read_jsonl(&args.dataset)?;
    let family = match &args.family {
        Some(f) => ModelFamily::parse(f).with_context(|| format!("unknown model family {f}"))?,
        None => ModelFamily::from_model_id(&args.model),
    };
    let mut config = RunConfig::new(args.dataset.display().to_string(), method, &args.model, &args.out);
    config.family = family;
    config.seed = args.seed;
    config.resume = args.resume;
    config.max_concurrency = args.max_concurrency;
    config.max_tokens = Some(args.max_tokens);
    if let Some(p) = &args.oracle_perspectives {
        config.oracle_perspectives = dataset::read_perspectives(p)?.into_iter().collect();
    }
    let backend = backend(&args)?;
    match harness::run_experiment(&samples, &config, backend.as_ref()) {
        Ok(summary) => {
            println!(
                "{} items, {} queried, {} errored; results in {}",
                summary.total,
                summary.attempted,
                summary.errored,
                args.out.join(harness::RESULTS_FILE).display()
            );
            if let Ok((metrics, errored)) = harness::score_results(&summary.results) {
                print!("{}", report::to_markdown(&Report::new(method.as_str(), &metrics, errored)));
            }
            Ok(if summary.errored > 0 { ExitCode::from(2) } else { ExitCode::SUCCESS })
        }
        Err(e @ HarnessError::Aborted { .. }) => {
            eprintln!("error: {e}");
            Ok(ExitCode::from(1))
        }
        Err(e) => Err(e.into()),
    }
}

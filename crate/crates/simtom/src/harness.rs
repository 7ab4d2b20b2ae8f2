//! Runs a prompting method over a dataset and persists per-item results.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fs::{self, File, OpenOptions};
use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicBool, AtomicUsize, Ordering};
use std::sync::mpsc;

use serde::{Deserialize, Serialize};
use simtom_core::metrics::{score, Metrics};
use simtom_core::oracle::oracle_perspective_text;
use simtom_core::prompt::{parse_answer, perspective_postprocess, render};
use simtom_core::{Benchmark, Method, ModelFamily, QuestionType, Sample, ScoreError, Stage, Verdict};

use crate::gateway::{ChatBackend, ChatRequest};

pub const RESULTS_FILE: &str = "results.jsonl";
pub const LOG_FILE: &str = "run.log";
pub const RUN_FILE: &str = "run.json";

#[derive(Debug, thiserror::Error)]
pub enum HarnessError {
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("cannot run {method} on this dataset: {reason}")]
    Unsupported { method: Method, reason: String },
    #[error("{0} is a different run ({1}); use a fresh output directory")]
    RunMismatch(String, String),
    #[error("aborted: {errored} of {total} items failed")]
    Aborted { errored: usize, total: usize },
    #[error("results line {line}: {reason}")]
    BadResult { line: usize, reason: String },
    #[error(transparent)]
    Score(#[from] ScoreError),
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> HarnessError + '_ {
    move |source| HarnessError::Io { path: path.display().to_string(), source }
}

#[derive(Debug, Clone)]
pub struct RunConfig {
    /// Recorded in `run.json` to identify the run.
    pub dataset: String,
    pub method: Method,
    pub model_id: String,
    pub family: ModelFamily,
    pub seed: u64,
    pub out_dir: PathBuf,
    pub resume: bool,
    pub max_concurrency: usize,
    pub max_tokens: Option<u32>,
    /// Perspectives keyed by sample id for `simtom_oracle`. ToMI samples
    /// missing here fall back to the symbolic oracle.
    pub oracle_perspectives: HashMap<String, String>,
}

impl RunConfig {
    pub fn new(
        dataset: impl Into<String>,
        method: Method,
        model_id: impl Into<String>,
        out_dir: impl Into<PathBuf>,
    ) -> Self {
        let model_id = model_id.into();
        RunConfig {
            dataset: dataset.into(),
            method,
            family: ModelFamily::from_model_id(&model_id),
            model_id,
            seed: 0,
            out_dir: out_dir.into(),
            resume: false,
            max_concurrency: 4,
            max_tokens: Some(crate::gateway::DEFAULT_MAX_TOKENS),
            oracle_perspectives: HashMap::new(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
struct RunIdentity {
    dataset: String,
    method: Method,
    model_id: String,
    seed: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ItemResult {
    pub sample_id: String,
    pub qtype: String,
    pub method: Method,
    pub stage1_prompt: Option<String>,
    pub stage1_output: Option<String>,
    pub stage2_prompt: Option<String>,
    pub stage2_output: Option<String>,
    pub verdict: Option<Verdict>,
    pub correct: bool,
    pub perspective_fallback: bool,
    pub error: Option<String>,
}

impl ItemResult {
    fn new(sample: &Sample, method: Method) -> Self {
        ItemResult {
            sample_id: sample.id.clone(),
            qtype: sample.qtype.label(),
            method,
            stage1_prompt: None,
            stage1_output: None,
            stage2_prompt: None,
            stage2_output: None,
            verdict: None,
            correct: false,
            perspective_fallback: false,
            error: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RunSummary {
    pub total: usize,
    /// Items sent to the backend in this invocation.
    pub attempted: usize,
    pub errored: usize,
    pub results: Vec<ItemResult>,
}

fn perspective_for(sample: &Sample, config: &RunConfig) -> Result<String, String> {
    if let Some(p) = config.oracle_perspectives.get(&sample.id) {
        return Ok(p.clone());
    }
    match sample.story.benchmark() {
        Benchmark::Tomi => oracle_perspective_text(sample).map_err(|e| e.to_string()),
        Benchmark::BigTom => Err(format!("no annotated perspective for {}", sample.id)),
    }
}

fn ask(backend: &dyn ChatBackend, config: &RunConfig, messages: Vec<simtom_core::Message>) -> Result<String, String> {
    let request = ChatRequest::new(&config.model_id, messages, config.max_tokens);
    backend.complete(&request).map(|r| r.content).map_err(|e| e.to_string())
}

/// One sample through every stage of the configured method.
pub fn run_item(sample: &Sample, config: &RunConfig, backend: &dyn ChatBackend) -> ItemResult {
    let mut out = ItemResult::new(sample, config.method);
    if let Err(e) = run_stages(sample, config, backend, &mut out) {
        out.error = Some(e);
    }
    out
}

fn run_stages(
    sample: &Sample,
    config: &RunConfig,
    backend: &dyn ChatBackend,
    out: &mut ItemResult,
) -> Result<(), String> {
    let method = config.method;
    let benchmark = sample.story.benchmark();
    let render_err = |e: simtom_core::PromptError| e.to_string();
    let final_messages = if method.stages() == 2 {
        let perspective = if method == Method::SimtomOracle {
            perspective_for(sample, config)?
        } else {
            let messages = render(method, Stage::Perspective, sample, config.family, None).map_err(render_err)?;
            out.stage1_prompt = Some(messages.last().map(|m| m.content.clone()).unwrap_or_default());
            let raw = ask(backend, config, messages)?;
            let cleaned = perspective_postprocess(&raw, benchmark, &sample.story.text());
            if cleaned.fell_back {
                log::warn!("{}: empty perspective, using the full story", sample.id);
                out.perspective_fallback = true;
            }
            out.stage1_output = Some(raw);
            cleaned.text
        };
        if method == Method::SimtomOracle {
            out.stage1_output = Some(perspective.clone());
        }
        render(method, Stage::Qa, sample, config.family, Some(&perspective)).map_err(render_err)?
    } else {
        render(method, Stage::Combined, sample, config.family, None).map_err(render_err)?
    };
    out.stage2_prompt = Some(final_messages.last().map(|m| m.content.clone()).unwrap_or_default());
    let answer = ask(backend, config, final_messages)?;
    let parsed = parse_answer(&answer, (&sample.choices.0, &sample.choices.1));
    out.stage2_output = Some(answer);
    out.verdict = Some(parsed.verdict);
    out.correct = parsed.verdict.choice() == Some(sample.correct);
    Ok(())
}

/// Fails early when the method cannot be rendered for these samples.
fn preflight(samples: &[Sample], config: &RunConfig) -> Result<(), HarnessError> {
    let unsupported = |reason: String| HarnessError::Unsupported { method: config.method, reason };
    let Some(first) = samples.first() else { return Ok(()) };
    if config.method == Method::SimtomOracle {
        for s in samples {
            perspective_for(s, config).map_err(unsupported)?;
        }
        return Ok(());
    }
    let stage = if config.method.stages() == 2 { Stage::Perspective } else { Stage::Combined };
    render(config.method, stage, first, config.family, None).map_err(|e| unsupported(e.to_string()))?;
    Ok(())
}

/// Results already in `path`, keyed by sample id. A torn last line from an
/// interrupted write is ignored.
pub fn read_results(path: &Path) -> Result<Vec<ItemResult>, HarnessError> {
    let file = match File::open(path) {
        Ok(f) => f,
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Ok(Vec::new()),
        Err(e) => return Err(io_err(path)(e)),
    };
    let lines: Vec<String> = BufReader::new(file).lines().collect::<Result<_, _>>().map_err(io_err(path))?;
    let mut out = Vec::new();
    for (i, line) in lines.iter().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        match serde_json::from_str::<ItemResult>(line) {
            Ok(r) => out.push(r),
            Err(_) if i + 1 == lines.len() => log::warn!("ignoring truncated last line of {}", path.display()),
            Err(e) => return Err(HarnessError::BadResult { line: i + 1, reason: e.to_string() }),
        }
    }
    Ok(out)
}

fn jsonl(results: &[ItemResult]) -> String {
    let mut text = String::new();
    for r in results {
        text.push_str(&serde_json::to_string(r).expect("results serialize"));
        text.push('\n');
    }
    text
}

fn write_atomic(path: &Path, text: &str) -> Result<(), HarnessError> {
    let tmp = path.with_extension("jsonl.tmp");
    fs::write(&tmp, text).map_err(io_err(&tmp))?;
    fs::rename(&tmp, path).map_err(io_err(path))
}

struct RunLog(Option<File>);

impl RunLog {
    fn open(dir: &Path) -> Self {
        RunLog(OpenOptions::new().create(true).append(true).open(dir.join(LOG_FILE)).ok())
    }

    fn line(&mut self, msg: &str) {
        if let Some(f) = &mut self.0 {
            let _ = writeln!(f, "{} {msg}", chrono::Utc::now().to_rfc3339());
        }
    }
}

fn check_identity(config: &RunConfig) -> Result<(), HarnessError> {
    let identity = RunIdentity {
        dataset: config.dataset.clone(),
        method: config.method,
        model_id: config.model_id.clone(),
        seed: config.seed,
    };
    let path = config.out_dir.join(RUN_FILE);
    let text = serde_json::to_string_pretty(&identity).expect("identity serializes") + "\n";
    if config.resume {
        if let Ok(existing) = fs::read_to_string(&path) {
            let existing: RunIdentity = serde_json::from_str(&existing)
                .map_err(|e| HarnessError::BadResult { line: 0, reason: format!("{RUN_FILE}: {e}") })?;
            if existing != identity {
                return Err(HarnessError::RunMismatch(
                    config.out_dir.display().to_string(),
                    format!("{} / {} / seed {}", existing.method, existing.model_id, existing.seed),
                ));
            }
        }
    }
    fs::write(&path, text).map_err(io_err(&path))
}

/// Runs `config.method` over `samples`, streaming results to
/// `out_dir/results.jsonl` and finally rewriting it sorted by sample id.
///
/// With `resume`, items already completed without error are kept and not
/// re-queried. More than 10% errored items aborts the run.
pub fn run_experiment(
    samples: &[Sample],
    config: &RunConfig,
    backend: &dyn ChatBackend,
) -> Result<RunSummary, HarnessError> {
    fs::create_dir_all(&config.out_dir).map_err(io_err(&config.out_dir))?;
    check_identity(config)?;
    preflight(samples, config)?;
    let results_path = config.out_dir.join(RESULTS_FILE);
    let mut log = RunLog::open(&config.out_dir);

    let ids: HashSet<&str> = samples.iter().map(|s| s.id.as_str()).collect();
    let mut done: BTreeMap<String, ItemResult> = BTreeMap::new();
    if config.resume {
        for r in read_results(&results_path)? {
            if r.error.is_none() && ids.contains(r.sample_id.as_str()) {
                done.insert(r.sample_id.clone(), r);
            }
        }
    }
    let kept: Vec<ItemResult> = done.values().cloned().collect();
    write_atomic(&results_path, &jsonl(&kept))?;

    let pending: Vec<&Sample> = samples.iter().filter(|s| !done.contains_key(&s.id)).collect();
    log.line(&format!(
        "start method={} model={} items={} pending={}",
        config.method,
        config.model_id,
        samples.len(),
        pending.len()
    ));

    let total = samples.len();
    let next = AtomicUsize::new(0);
    let abort = AtomicBool::new(false);
    let mut errored = 0usize;
    let mut attempted = 0usize;
    let mut writer = OpenOptions::new().append(true).open(&results_path).map_err(io_err(&results_path))?;
    let mut write_failure = None;

    std::thread::scope(|scope| {
        let (tx, rx) = mpsc::channel::<ItemResult>();
        for _ in 0..config.max_concurrency.max(1).min(pending.len().max(1)) {
            let tx = tx.clone();
            let (next, abort, pending) = (&next, &abort, &pending);
            scope.spawn(move || loop {
                if abort.load(Ordering::Relaxed) {
                    break;
                }
                let i = next.fetch_add(1, Ordering::Relaxed);
                let Some(sample) = pending.get(i) else { break };
                if tx.send(run_item(sample, config, backend)).is_err() {
                    break;
                }
            });
        }
        drop(tx);
        for result in rx {
            attempted += 1;
            let line = serde_json::to_string(&result).expect("results serialize");
            if let Err(e) = writeln!(writer, "{line}").and_then(|_| writer.flush()) {
                write_failure.get_or_insert(e);
                abort.store(true, Ordering::Relaxed);
            }
            match &result.error {
                Some(e) => {
                    errored += 1;
                    log.line(&format!("{} error: {e}", result.sample_id));
                    if errored * 10 > total {
                        abort.store(true, Ordering::Relaxed);
                    }
                }
                None => log.line(&format!("{} done", result.sample_id)),
            }
            done.insert(result.sample_id.clone(), result);
        }
    });
    if let Some(e) = write_failure {
        return Err(io_err(&results_path)(e));
    }

    let results: Vec<ItemResult> = done.into_values().collect();
    write_atomic(&results_path, &jsonl(&results))?;
    log.line(&format!("end attempted={attempted} errored={errored}"));
    if abort.load(Ordering::Relaxed) {
        return Err(HarnessError::Aborted { errored, total });
    }
    Ok(RunSummary { total, attempted, errored, results })
}

/// Metrics over the results that completed; errored items are left out of
/// every denominator and counted separately.
pub fn score_results(results: &[ItemResult]) -> Result<(Metrics, usize), HarnessError> {
    let mut outcomes = Vec::new();
    let mut errored = 0;
    for (i, r) in results.iter().enumerate() {
        if r.error.is_some() {
            errored += 1;
            continue;
        }
        let qtype = QuestionType::from_label(&r.qtype)
            .ok_or_else(|| HarnessError::BadResult { line: i + 1, reason: format!("unknown qtype {}", r.qtype) })?;
        outcomes.push((qtype, r.correct));
    }
    Ok((score(outcomes)?, errored))
}

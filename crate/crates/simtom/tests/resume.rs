use std::sync::atomic::{AtomicUsize, Ordering};

use simtom::gateway::{ChatBackend, ChatRequest, ChatResponse, GatewayError, MockPerfect};
use simtom::harness::{run_experiment, RunConfig, RESULTS_FILE};
use simtom_core::corpus::generate_tomi_corpus;
use simtom_core::Method;

#[derive(Default)]
struct Counting(AtomicUsize);

impl ChatBackend for Counting {
    fn complete(&self, request: &ChatRequest) -> Result<ChatResponse, GatewayError> {
        self.0.fetch_add(1, Ordering::SeqCst);
        MockPerfect.complete(request)
    }
}

#[test]
fn interrupted_run_resumes_without_requerying() {
    let samples = generate_tomi_corpus(21, 3);
    let full_dir = tempfile::tempdir().unwrap();
    let config = RunConfig::new("c", Method::Simtom, "m", full_dir.path());
    run_experiment(&samples, &config, &MockPerfect).unwrap();
    let full = std::fs::read_to_string(full_dir.path().join(RESULTS_FILE)).unwrap();

    // Eleven finished lines and a twelfth cut off mid-write.
    let lines: Vec<&str> = full.lines().collect();
    let mut partial: String = lines[..11].iter().map(|l| format!("{l}\n")).collect();
    partial.push_str(&lines[11][..lines[11].len() / 2]);
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join(RESULTS_FILE), partial).unwrap();

    let mut config = RunConfig::new("c", Method::Simtom, "m", dir.path());
    config.resume = true;
    let counting = Counting::default();
    let summary = run_experiment(&samples, &config, &counting).unwrap();
    assert_eq!(summary.attempted, samples.len() - 11);
    assert_eq!(counting.0.load(Ordering::SeqCst), 2 * (samples.len() - 11));
    assert_eq!(std::fs::read_to_string(dir.path().join(RESULTS_FILE)).unwrap(), full);

    let again = Counting::default();
    run_experiment(&samples, &config, &again).unwrap();
    assert_eq!(again.0.load(Ordering::SeqCst), 0);
}

struct FlakyOnce(AtomicUsize);

impl ChatBackend for FlakyOnce {
    fn complete(&self, request: &ChatRequest) -> Result<ChatResponse, GatewayError> {
        if request.prompt().contains("Where") && self.0.fetch_add(1, Ordering::SeqCst) == 0 {
            return Err(GatewayError::Transport { attempts: 5, message: "reset".into() });
        }
        MockPerfect.complete(request)
    }
}

#[test]
fn errored_items_are_retried_on_resume() {
    let samples = generate_tomi_corpus(4, 2);
    let dir = tempfile::tempdir().unwrap();
    let mut config = RunConfig::new("c", Method::ZeroShot, "m", dir.path());
    config.max_concurrency = 1;
    let first = run_experiment(&samples, &config, &FlakyOnce(AtomicUsize::new(0))).unwrap();
    assert_eq!(first.errored, 1);
    assert_eq!(first.results.len(), samples.len());

    config.resume = true;
    let counting = Counting::default();
    let second = run_experiment(&samples, &config, &counting).unwrap();
    assert_eq!(counting.0.load(Ordering::SeqCst), 1);
    assert_eq!(second.errored, 0);
    assert!(second.results.iter().all(|r| r.correct));
}

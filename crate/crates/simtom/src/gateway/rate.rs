use std::sync::Mutex;
use std::time::{Duration, Instant};

/// Token bucket refilled at `rpm` requests per minute, holding at most one
/// minute of burst.
#[derive(Debug)]
pub struct RateLimiter {
    rpm: f64,
    state: Mutex<(f64, Instant)>,
}

impl RateLimiter {
    pub fn new(rpm: u32) -> Self {
        let rpm = f64::from(rpm.max(1));
        RateLimiter { rpm, state: Mutex::new((rpm, Instant::now())) }
    }

    /// Blocks until a request may be sent.
    pub fn acquire(&self) {
        loop {
            let wait = {
                let mut guard = self.state.lock().expect("rate limiter poisoned");
                let (tokens, last) = &mut *guard;
                let now = Instant::now();
                *tokens = (*tokens + now.duration_since(*last).as_secs_f64() * self.rpm / 60.0).min(self.rpm);
                *last = now;
                if *tokens >= 1.0 {
                    *tokens -= 1.0;
                    return;
                }
                Duration::from_secs_f64((1.0 - *tokens) * 60.0 / self.rpm)
            };
            std::thread::sleep(wait);
        }
    }
}

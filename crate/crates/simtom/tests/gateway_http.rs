//! The live client against a scripted local HTTP server.

use std::io::{BufRead, BufReader, Read, Write};
use std::net::TcpListener;
use std::sync::{Arc, Mutex};
use std::time::Duration;

use simtom::gateway::{ChatBackend, ChatRequest, GatewayError, LiveBackend, LiveConfig, RetryPolicy};
use simtom_core::Message;

struct Seen {
    bodies: Vec<String>,
    auth: Vec<Option<String>>,
    paths: Vec<String>,
}

/// Serves one scripted `(status, body)` per connection, repeating the last.
fn serve(script: Vec<(u16, &'static str)>) -> (String, Arc<Mutex<Seen>>) {
    let listener = TcpListener::bind("127.0.0.1:0").unwrap();
    let addr = listener.local_addr().unwrap();
    let seen = Arc::new(Mutex::new(Seen { bodies: vec![], auth: vec![], paths: vec![] }));
    let log = Arc::clone(&seen);
    std::thread::spawn(move || {
        for (n, stream) in listener.incoming().enumerate() {
            let mut stream = stream.unwrap();
            let mut reader = BufReader::new(stream.try_clone().unwrap());
            let mut request_line = String::new();
            reader.read_line(&mut request_line).unwrap();
            let mut length = 0;
            let mut auth = None;
            loop {
                let mut line = String::new();
                reader.read_line(&mut line).unwrap();
                let line = line.trim_end();
                if line.is_empty() {
                    break;
                }
                let (name, value) = line.split_once(':').unwrap();
                match name.to_ascii_lowercase().as_str() {
                    "content-length" => length = value.trim().parse().unwrap(),
                    "authorization" => auth = Some(value.trim().to_string()),
                    _ => {}
                }
            }
            let mut body = vec![0; length];
            reader.read_exact(&mut body).unwrap();
            {
                let mut seen = log.lock().unwrap();
                seen.bodies.push(String::from_utf8(body).unwrap());
                seen.auth.push(auth);
                seen.paths.push(request_line.split_whitespace().nth(1).unwrap_or("").to_string());
            }
            let (status, payload) = script[n.min(script.len() - 1)];
            let response = format!(
                "HTTP/1.1 {status} X\r\ncontent-type: application/json\r\ncontent-length: {}\r\nconnection: close\r\n\r\n{payload}",
                payload.len()
            );
            stream.write_all(response.as_bytes()).unwrap();
        }
    });
    (format!("http://{addr}/v1"), seen)
}

const OK: &str = r#"{"choices":[{"message":{"role":"assistant","content":"Answer: a) box"},"finish_reason":"stop"}],"usage":{"prompt_tokens":12,"completion_tokens":5}}"#;

fn backend(url: &str) -> LiveBackend {
    let mut config = LiveConfig::new(url);
    config.api_key = Some("sk-test".into());
    config.retry =
        RetryPolicy { max_attempts: 5, base_delay: Duration::from_millis(5), max_delay: Duration::from_millis(20) };
    config.timeout = Duration::from_secs(5);
    LiveBackend::new(config).unwrap()
}

fn request() -> ChatRequest {
    ChatRequest::new("gpt-4", vec![Message::user("Where is the ball?")], Some(64))
}

#[test]
fn sends_standard_payload() {
    let (url, seen) = serve(vec![(200, OK)]);
    let resp = backend(&url).complete(&request()).unwrap();
    assert_eq!(resp.content, "Answer: a) box");
    assert_eq!(resp.finish_reason, "stop");
    let seen = seen.lock().unwrap();
    assert_eq!(seen.paths, ["/v1/chat/completions"]);
    assert_eq!(seen.auth[0].as_deref(), Some("Bearer sk-test"));
    let body: serde_json::Value = serde_json::from_str(&seen.bodies[0]).unwrap();
    assert_eq!(body["model"], "gpt-4");
    assert_eq!(body["temperature"], 0.0);
    assert_eq!(body["max_tokens"], 64);
    assert_eq!(body["messages"][0]["content"], "Where is the ball?");
}

#[test]
fn retries_transient_failures() {
    let (url, seen) = serve(vec![(429, "{}"), (503, "{}"), (200, OK)]);
    assert_eq!(backend(&url).complete(&request()).unwrap().content, "Answer: a) box");
    assert_eq!(seen.lock().unwrap().bodies.len(), 3);
}

#[test]
fn gives_up_after_max_attempts() {
    let (url, seen) = serve(vec![(500, "{}")]);
    let err = backend(&url).complete(&request()).unwrap_err();
    assert!(matches!(err, GatewayError::Transport { attempts: 5, .. }), "{err}");
    assert_eq!(seen.lock().unwrap().bodies.len(), 5);
}

#[test]
fn auth_failure_is_not_retried() {
    let (url, seen) = serve(vec![(401, r#"{"error":"bad key"}"#)]);
    assert!(matches!(backend(&url).complete(&request()), Err(GatewayError::Credential(_))));
    assert_eq!(seen.lock().unwrap().bodies.len(), 1);
}

#[test]
fn unreachable_endpoint_is_a_transport_error() {
    let port = TcpListener::bind("127.0.0.1:0").unwrap().local_addr().unwrap().port();
    let err = backend(&format!("http://127.0.0.1:{port}")).complete(&request()).unwrap_err();
    assert!(matches!(err, GatewayError::Transport { attempts: 5, .. }));
}

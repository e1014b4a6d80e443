//! Minimal fixture-backed HTTP server standing in for the remote scorer and
//! language model in tests and offline runs.

use std::io::{BufRead, BufReader, Read, Write};
use std::net::{SocketAddr, TcpListener, TcpStream};
use std::sync::atomic::{AtomicBool, AtomicUsize, Ordering};
use std::sync::Arc;
use std::thread::JoinHandle;

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

#[derive(Clone, Debug, Default, Serialize, Deserialize)]
pub struct StubFixtures {
    #[serde(default)]
    pub scores: Vec<ScoreFixture>,
    #[serde(default)]
    pub completions: Vec<CompletionFixture>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ScoreFixture {
    pub labels: Vec<String>,
    pub image_refs: Vec<String>,
    pub logits: Vec<Vec<f64>>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CompletionFixture {
    pub instruction: String,
    pub completion: String,
}

#[derive(Clone, Debug, Default)]
pub struct StubBehavior {
    /// Answer this many requests with HTTP 503 before serving fixtures.
    pub fail_first: usize,
    /// Drop the last column of every score response.
    pub truncate_scores: bool,
}

pub struct StubServer {
    addr: SocketAddr,
    requests: Arc<AtomicUsize>,
    stop: Arc<AtomicBool>,
    handle: Option<JoinHandle<()>>,
}

impl StubServer {
    pub fn start(fixtures: StubFixtures, behavior: StubBehavior) -> std::io::Result<Self> {
        let listener = TcpListener::bind("127.0.0.1:0")?;
        let addr = listener.local_addr()?;
        let requests = Arc::new(AtomicUsize::new(0));
        let stop = Arc::new(AtomicBool::new(false));
        let (req_count, stop_flag) = (requests.clone(), stop.clone());
        let handle = std::thread::spawn(move || {
            for stream in listener.incoming() {
                if stop_flag.load(Ordering::SeqCst) {
                    break;
                }
                let Ok(stream) = stream else { continue };
                let n = req_count.fetch_add(1, Ordering::SeqCst);
                let _ = serve(stream, &fixtures, &behavior, n);
            }
        });
        Ok(Self { addr, requests, stop, handle: Some(handle) })
    }

    pub fn url(&self, path: &str) -> String {
        format!("http://{}{}", self.addr, path)
    }

    /// Number of HTTP requests received so far.
    pub fn requests(&self) -> usize {
        self.requests.load(Ordering::SeqCst)
    }
}

impl Drop for StubServer {
    fn drop(&mut self) {
        self.stop.store(true, Ordering::SeqCst);
        let _ = TcpStream::connect(self.addr);
        if let Some(h) = self.handle.take() {
            let _ = h.join();
        }
    }
}

fn serve(stream: TcpStream, fixtures: &StubFixtures, behavior: &StubBehavior, n: usize) -> std::io::Result<()> {
    let mut reader = BufReader::new(stream.try_clone()?);
    let mut request_line = String::new();
    reader.read_line(&mut request_line)?;
    let path = request_line.split_whitespace().nth(1).unwrap_or("/").to_string();
    let mut content_length = 0usize;
    loop {
        let mut line = String::new();
        if reader.read_line(&mut line)? == 0 || line == "\r\n" || line == "\n" {
            break;
        }
        if let Some((k, v)) = line.split_once(':') {
            if k.trim().eq_ignore_ascii_case("content-length") {
                content_length = v.trim().parse().unwrap_or(0);
            }
        }
    }
    let mut body = vec![0; content_length];
    reader.read_exact(&mut body)?;

    let (status, payload) = if n < behavior.fail_first {
        (503, json!({"error": "warming up"}))
    } else {
        match serde_json::from_slice::<Value>(&body) {
            Ok(req) => route(&path, &req, fixtures, behavior),
            Err(e) => (400, json!({"error": e.to_string()})),
        }
    };
    let text = payload.to_string();
    let reason = match status {
        200 => "OK",
        400 => "Bad Request",
        404 => "Not Found",
        _ => "Service Unavailable",
    };
    let mut out = stream;
    write!(
        out,
        "HTTP/1.1 {status} {reason}\r\nContent-Type: application/json\r\nContent-Length: {}\r\nConnection: close\r\n\r\n{text}",
        text.len()
    )?;
    out.flush()
}

fn route(path: &str, req: &Value, fixtures: &StubFixtures, behavior: &StubBehavior) -> (u16, Value) {
    let strings = |key: &str| -> Vec<String> {
        req.get(key)
            .and_then(Value::as_array)
            .map(|a| a.iter().filter_map(|v| v.as_str().map(str::to_string)).collect())
            .unwrap_or_default()
    };
    match path {
        "/score" => {
            let (labels, refs) = (strings("labels"), strings("image_refs"));
            match fixtures.scores.iter().find(|f| f.labels == labels && f.image_refs == refs) {
                Some(f) => {
                    let mut logits = f.logits.clone();
                    if behavior.truncate_scores {
                        logits.iter_mut().for_each(|r| {
                            r.pop();
                        });
                    }
                    (200, json!({ "logits": logits }))
                }
                None => (404, json!({"error": "no score fixture for request"})),
            }
        }
        "/complete" => {
            let prompt = req.get("prompt").and_then(Value::as_str).unwrap_or("");
            // The instruction is the last block of the prompt; prefer the
            // longest fixture it contains so prefixes cannot shadow it.
            let tail = prompt.rsplit("\n\n").next().unwrap_or(prompt);
            let hit =
                fixtures.completions.iter().filter(|f| tail.contains(f.instruction.as_str())).max_by_key(|f| f.instruction.len());
            match hit {
                Some(f) => (200, json!({ "completion": f.completion })),
                None => (404, json!({"error": "no completion fixture for prompt"})),
            }
        }
        _ => (404, json!({"error": format!("unknown route {path}")})),
    }
}

//! Minimal HTTP/1.1 stand-in for the inference service.

use std::collections::VecDeque;
use std::io::{BufRead, BufReader, Read, Write};
use std::net::{TcpListener, TcpStream};
use std::sync::{Arc, Mutex};
use std::thread;

use serde_json::{json, Value};

/// A canned reply for the next `/v1/entail` request.
#[derive(Debug, Clone)]
pub enum Scripted {
    Status(u16, String),
    Scores(Vec<f64>),
    /// Close the connection without answering.
    Hangup,
}

#[derive(Debug, Clone)]
pub struct Recorded {
    pub method: String,
    pub path: String,
    pub body: Value,
}

type Scorer = dyn Fn(&str, &str) -> f64 + Send + Sync;

pub struct MockServer {
    pub url: String,
    requests: Arc<Mutex<Vec<Recorded>>>,
}

impl MockServer {
    /// Starts a server that answers scripted replies first and then scores
    /// every pair with `scorer`.
    pub fn start(model: &str, script: Vec<Scripted>, scorer: impl Fn(&str, &str) -> f64 + Send + Sync + 'static) -> Self {
        let listener = TcpListener::bind("127.0.0.1:0").unwrap();
        let url = format!("http://{}", listener.local_addr().unwrap());
        let requests = Arc::new(Mutex::new(Vec::new()));
        let script = Arc::new(Mutex::new(VecDeque::from(script)));
        let scorer: Arc<Scorer> = Arc::new(scorer);
        let model = model.to_string();
        let log = Arc::clone(&requests);
        thread::spawn(move || {
            for stream in listener.incoming().flatten() {
                let (log, script, scorer, model) = (Arc::clone(&log), Arc::clone(&script), Arc::clone(&scorer), model.clone());
                thread::spawn(move || {
                    let _ = handle(stream, &log, &script, scorer.as_ref(), &model);
                });
            }
        });
        MockServer { url, requests }
    }

    pub fn requests(&self) -> Vec<Recorded> {
        self.requests.lock().unwrap().clone()
    }

    pub fn entail_requests(&self) -> Vec<Recorded> {
        self.requests().into_iter().filter(|r| r.path == "/v1/entail").collect()
    }
}

/// An address nothing listens on.
pub fn dead_endpoint() -> String {
    let listener = TcpListener::bind("127.0.0.1:0").unwrap();
    let addr = listener.local_addr().unwrap();
    drop(listener);
    format!("http://{addr}")
}

fn handle(
    stream: TcpStream,
    log: &Mutex<Vec<Recorded>>,
    script: &Mutex<VecDeque<Scripted>>,
    scorer: &Scorer,
    model: &str,
) -> std::io::Result<()> {
    let mut reader = BufReader::new(stream.try_clone()?);
    let mut request_line = String::new();
    reader.read_line(&mut request_line)?;
    let mut parts = request_line.split_whitespace();
    let method = parts.next().unwrap_or_default().to_string();
    let path = parts.next().unwrap_or_default().to_string();

    let mut content_length = 0usize;
    loop {
        let mut line = String::new();
        if reader.read_line(&mut line)? == 0 || line == "\r\n" || line == "\n" {
            break;
        }
        if let Some((name, value)) = line.split_once(':') {
            if name.eq_ignore_ascii_case("content-length") {
                content_length = value.trim().parse().unwrap_or(0);
            }
        }
    }
    let mut body = vec![0u8; content_length];
    reader.read_exact(&mut body)?;
    let body: Value = serde_json::from_slice(&body).unwrap_or(Value::Null);
    log.lock().unwrap().push(Recorded {
        method: method.clone(),
        path: path.clone(),
        body: body.clone(),
    });

    let (status, reply) = match (method.as_str(), path.as_str()) {
        ("GET", "/v1/health") => (200, json!({"status": "ok", "model": model}).to_string()),
        ("POST", "/v1/entail") => {
            let next = script.lock().unwrap().pop_front();
            match next {
                Some(Scripted::Hangup) => return Ok(()),
                Some(Scripted::Status(code, text)) => (code, text),
                Some(Scripted::Scores(scores)) => (200, json!({ "scores": scores }).to_string()),
                None => {
                    let scores: Vec<f64> = body["pairs"]
                        .as_array()
                        .map(|pairs| {
                            pairs
                                .iter()
                                .map(|p| scorer(p["premise"].as_str().unwrap_or(""), p["hypothesis"].as_str().unwrap_or("")))
                                .collect()
                        })
                        .unwrap_or_default();
                    (200, json!({ "scores": scores }).to_string())
                }
            }
        }
        _ => (404, json!({"error": "not found"}).to_string()),
    };
    let mut stream = stream;
    write!(
        stream,
        "HTTP/1.1 {status} X\r\nContent-Type: application/json\r\nContent-Length: {}\r\nConnection: close\r\n\r\n{reply}",
        reply.len()
    )?;
    stream.flush()
}

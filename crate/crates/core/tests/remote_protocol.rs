//! Wire-protocol conformance for the remote scorer, exercised against a
//! minimal in-process HTTP server: the happy path, malformed payloads,
//! mismatched question ids, server errors, retries, and timeouts.

mod common;

use std::io::{BufRead, BufReader, Read, Write};
use std::net::{TcpListener, TcpStream};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Arc;
use std::time::Duration;

use oeq_core::augment::AugmentedQuery;
use oeq_core::error::Error;
use oeq_core::model::QuestionItem;
use oeq_core::scorer::{RemoteConfig, RemoteScorer, ScoreRequest, Scorer};

/// What the stub does with one request.
#[derive(Clone)]
enum Behavior {
    /// Echo a valid ranking (reverse option order, descending scores).
    Valid,
    /// Reply with a body that is not JSON.
    Garbage,
    /// Echo a different question id.
    WrongId,
    /// Return a ranking that drops one option.
    NotPermutation,
    /// Scores out of descending order.
    Unsorted,
    /// HTTP 500.
    ServerError,
    /// Sleep past the client timeout before answering.
    Stall(Duration),
    /// Fail with 500 for the first n requests, then behave.
    FlakyThenValid(usize),
}

struct StubServer {
    endpoint: String,
    hits: Arc<AtomicUsize>,
}

fn valid_body(request: &ScoreRequest) -> String {
    let n = request.options.len();
    let ranking: Vec<String> = request
        .options
        .iter()
        .rev()
        .enumerate()
        .map(|(i, opt)| format!(r#"{{"id":"{}","score":{}}}"#, opt.id, (n - i) as f64))
        .collect();
    format!(
        r#"{{"question_id":"{}","ranking":[{}]}}"#,
        request.question_id,
        ranking.join(",")
    )
}

fn handle(mut stream: TcpStream, behavior: &Behavior, hits: &AtomicUsize) {
    let hit = hits.fetch_add(1, Ordering::SeqCst);
    let mut reader = BufReader::new(stream.try_clone().expect("clone stream"));
    let mut content_length = 0usize;
    loop {
        let mut line = String::new();
        if reader.read_line(&mut line).is_err() || line == "\r\n" || line.is_empty() {
            break;
        }
        let lower = line.to_ascii_lowercase();
        if let Some(v) = lower.strip_prefix("content-length:") {
            content_length = v.trim().parse().unwrap_or(0);
        }
    }
    let mut body = vec![0u8; content_length];
    reader.read_exact(&mut body).expect("read body");
    let request: ScoreRequest = serde_json::from_slice(&body).expect("stub got valid request");

    let reply = |stream: &mut TcpStream, status: &str, body: &str| {
        let response = format!(
            "HTTP/1.1 {status}\r\nContent-Type: application/json\r\nContent-Length: {}\r\nConnection: close\r\n\r\n{body}",
            body.len()
        );
        let _ = stream.write_all(response.as_bytes());
    };

    match behavior {
        Behavior::Valid => reply(&mut stream, "200 OK", &valid_body(&request)),
        Behavior::Garbage => reply(&mut stream, "200 OK", "this is not json {"),
        Behavior::WrongId => {
            let mut body = valid_body(&request);
            body = body.replace(&request.question_id, "some-other-question");
            reply(&mut stream, "200 OK", &body);
        }
        Behavior::NotPermutation => {
            let n = request.options.len();
            let ranking: Vec<String> = request
                .options
                .iter()
                .skip(1)
                .enumerate()
                .map(|(i, opt)| format!(r#"{{"id":"{}","score":{}}}"#, opt.id, (n - i) as f64))
                .collect();
            let body = format!(
                r#"{{"question_id":"{}","ranking":[{}]}}"#,
                request.question_id,
                ranking.join(",")
            );
            reply(&mut stream, "200 OK", &body);
        }
        Behavior::Unsorted => {
            let ranking: Vec<String> = request
                .options
                .iter()
                .enumerate()
                .map(|(i, opt)| format!(r#"{{"id":"{}","score":{}}}"#, opt.id, i as f64))
                .collect();
            let body = format!(
                r#"{{"question_id":"{}","ranking":[{}]}}"#,
                request.question_id,
                ranking.join(",")
            );
            reply(&mut stream, "200 OK", &body);
        }
        Behavior::ServerError => reply(&mut stream, "500 Internal Server Error", "{}"),
        Behavior::Stall(delay) => {
            std::thread::sleep(*delay);
            reply(&mut stream, "200 OK", &valid_body(&request));
        }
        Behavior::FlakyThenValid(failures) => {
            if hit < *failures {
                reply(&mut stream, "500 Internal Server Error", "{}");
            } else {
                reply(&mut stream, "200 OK", &valid_body(&request));
            }
        }
    }
}

fn spawn_stub(behavior: Behavior) -> StubServer {
    let listener = TcpListener::bind("127.0.0.1:0").expect("bind stub server");
    let endpoint = format!("http://{}/score", listener.local_addr().unwrap());
    let hits = Arc::new(AtomicUsize::new(0));
    let hits_clone = Arc::clone(&hits);
    std::thread::spawn(move || {
        for stream in listener.incoming() {
            match stream {
                Ok(stream) => {
                    let behavior = behavior.clone();
                    let hits = Arc::clone(&hits_clone);
                    std::thread::spawn(move || handle(stream, &behavior, &hits));
                }
                Err(_) => break,
            }
        }
    });
    StubServer { endpoint, hits }
}

fn question() -> QuestionItem {
    let mut rng = common::rng(9);
    common::random_question(&mut rng, "q-wire", 5)
}

fn aug_of(q: &QuestionItem) -> AugmentedQuery {
    AugmentedQuery {
        question_id: q.id.clone(),
        prompt: q.prompt.clone(),
        contexts: Vec::new(),
        rendered: q.prompt.clone(),
        budget: usize::MAX,
    }
}

fn fast_config(endpoint: &str) -> RemoteConfig {
    let mut config = RemoteConfig::new(endpoint);
    config.timeout = Duration::from_millis(500);
    config.retries = 2;
    config.backoff = Duration::from_millis(10);
    config
}

#[test]
fn valid_server_yields_valid_prediction() {
    let server = spawn_stub(Behavior::Valid);
    let scorer = RemoteScorer::new(fast_config(&server.endpoint)).unwrap();
    let q = question();
    let pred = scorer.score(&q, &aug_of(&q)).unwrap();
    pred.validate_against(&q).unwrap();
    // Reverse option order by construction.
    assert_eq!(pred.top1(), Some("E"));
    assert_eq!(server.hits.load(Ordering::SeqCst), 1);
}

#[test]
fn garbage_payload_is_protocol_error_without_retry() {
    let server = spawn_stub(Behavior::Garbage);
    let scorer = RemoteScorer::new(fast_config(&server.endpoint)).unwrap();
    let q = question();
    match scorer.score(&q, &aug_of(&q)) {
        Err(Error::Protocol { question_id, detail }) => {
            assert_eq!(question_id, q.id);
            assert!(detail.contains("undecodable"), "{detail}");
        }
        other => panic!("expected protocol error, got {other:?}"),
    }
    assert_eq!(server.hits.load(Ordering::SeqCst), 1, "protocol errors must not retry");
}

#[test]
fn reordered_question_id_is_protocol_error() {
    let server = spawn_stub(Behavior::WrongId);
    let scorer = RemoteScorer::new(fast_config(&server.endpoint)).unwrap();
    let q = question();
    match scorer.score(&q, &aug_of(&q)) {
        Err(Error::Protocol { detail, .. }) => assert!(detail.contains("echoes"), "{detail}"),
        other => panic!("expected protocol error, got {other:?}"),
    }
}

#[test]
fn non_permutation_ranking_is_protocol_error() {
    let server = spawn_stub(Behavior::NotPermutation);
    let scorer = RemoteScorer::new(fast_config(&server.endpoint)).unwrap();
    let q = question();
    match scorer.score(&q, &aug_of(&q)) {
        Err(Error::Protocol { detail, .. }) => {
            assert!(detail.contains("wire contract"), "{detail}")
        }
        other => panic!("expected protocol error, got {other:?}"),
    }
}

#[test]
fn unsorted_ranking_is_protocol_error() {
    let server = spawn_stub(Behavior::Unsorted);
    let scorer = RemoteScorer::new(fast_config(&server.endpoint)).unwrap();
    let q = question();
    assert!(matches!(
        scorer.score(&q, &aug_of(&q)),
        Err(Error::Protocol { .. })
    ));
}

#[test]
fn persistent_5xx_is_transport_error_after_all_retries() {
    let server = spawn_stub(Behavior::ServerError);
    let scorer = RemoteScorer::new(fast_config(&server.endpoint)).unwrap();
    let q = question();
    match scorer.score(&q, &aug_of(&q)) {
        Err(Error::Transport { question_id, detail }) => {
            assert_eq!(question_id, q.id);
            assert!(detail.contains("gave up"), "{detail}");
        }
        other => panic!("expected transport error, got {other:?}"),
    }
    // retries = 2 means three attempts in total.
    assert_eq!(server.hits.load(Ordering::SeqCst), 3);
}

#[test]
fn transient_5xx_recovers_on_retry() {
    let server = spawn_stub(Behavior::FlakyThenValid(2));
    let scorer = RemoteScorer::new(fast_config(&server.endpoint)).unwrap();
    let q = question();
    let pred = scorer.score(&q, &aug_of(&q)).unwrap();
    pred.validate_against(&q).unwrap();
    assert_eq!(server.hits.load(Ordering::SeqCst), 3);
}

#[test]
fn stalled_server_is_transport_error() {
    let server = spawn_stub(Behavior::Stall(Duration::from_millis(300)));
    let mut config = fast_config(&server.endpoint);
    config.timeout = Duration::from_millis(50);
    config.retries = 1;
    let scorer = RemoteScorer::new(config).unwrap();
    let q = question();
    match scorer.score(&q, &aug_of(&q)) {
        Err(Error::Transport { detail, .. }) => {
            assert!(
                detail.contains("timeout") || detail.contains("timed out"),
                "{detail}"
            );
        }
        other => panic!("expected transport error, got {other:?}"),
    }
}

#[test]
fn unreachable_endpoint_is_transport_error() {
    // Port 1 on localhost: nothing listens there.
    let mut config = RemoteConfig::new("http://127.0.0.1:1/score");
    config.timeout = Duration::from_millis(200);
    config.retries = 0;
    config.backoff = Duration::from_millis(1);
    let scorer = RemoteScorer::new(config).unwrap();
    let q = question();
    assert!(matches!(
        scorer.score(&q, &aug_of(&q)),
        Err(Error::Transport { .. })
    ));
}

//! JSON-over-HTTP client for remote scorers and text generators.
//!
//! Wire contract for scoring: POST a [`ScoreRequest`]; the server answers a
//! [`ScoreResponse`] echoing the question id, with the ranking sorted by
//! descending score. Transport failures (connect, timeout, 5xx) are retried
//! with exponential backoff and surface as transport errors; contract
//! violations (bad JSON, wrong id, non-permutation ranking) surface as
//! protocol errors and are never retried.

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::augment::AugmentedQuery;
use crate::error::{Error, Result};
use crate::model::{QuestionItem, RankedOption, RankedPrediction, ResponseOption};
use crate::scorer::{RemoteConfig, Scorer};

/// Request body of the scoring protocol.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ScoreRequest {
    pub question_id: String,
    pub prompt: String,
    pub options: Vec<ResponseOption>,
    pub contexts: Vec<String>,
}

/// Response body of the scoring protocol.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ScoreResponse {
    pub question_id: String,
    pub ranking: Vec<RankedOption>,
}

enum CallFailure {
    /// Worth another attempt: connect errors, timeouts, 5xx.
    Transient(String),
    /// Not worth retrying: 4xx or a payload that does not decode.
    Protocol(String),
    Rejected(String),
}

fn post_json<Req: Serialize, Resp: DeserializeOwned>(
    agent: &ureq::Agent,
    endpoint: &str,
    request: &Req,
) -> std::result::Result<Resp, CallFailure> {
    let mut response = agent.post(endpoint).send_json(request).map_err(|e| match e {
        ureq::Error::Timeout(_) => CallFailure::Transient(format!("timeout: {e}")),
        ureq::Error::Io(_)
        | ureq::Error::ConnectionFailed
        | ureq::Error::HostNotFound => CallFailure::Transient(e.to_string()),
        other => CallFailure::Rejected(other.to_string()),
    })?;
    let status = response.status();
    if status.is_server_error() {
        return Err(CallFailure::Transient(format!("server error {status}")));
    }
    if !status.is_success() {
        return Err(CallFailure::Rejected(format!("unexpected status {status}")));
    }
    response.body_mut().read_json::<Resp>().map_err(|e| match e {
        ureq::Error::Json(err) => CallFailure::Protocol(format!("undecodable payload: {err}")),
        ureq::Error::Timeout(_) | ureq::Error::Io(_) => {
            CallFailure::Transient(format!("body read failed: {e}"))
        }
        other => CallFailure::Protocol(other.to_string()),
    })
}

fn call_with_retries<Req: Serialize, Resp: DeserializeOwned>(
    agent: &ureq::Agent,
    config: &RemoteConfig,
    request: &Req,
    question_id: &str,
) -> Result<Resp> {
    let mut backoff = config.backoff;
    let mut last_transient = String::new();
    for attempt in 0..=config.retries {
        match post_json(agent, &config.endpoint, request) {
            Ok(response) => return Ok(response),
            Err(CallFailure::Transient(detail)) => {
                last_transient = detail;
                if attempt < config.retries {
                    std::thread::sleep(backoff);
                    backoff = backoff.saturating_mul(2);
                }
            }
            Err(CallFailure::Protocol(detail)) => {
                return Err(Error::Protocol {
                    question_id: question_id.to_string(),
                    detail,
                })
            }
            Err(CallFailure::Rejected(detail)) => {
                return Err(Error::Transport {
                    question_id: question_id.to_string(),
                    detail,
                })
            }
        }
    }
    Err(Error::Transport {
        question_id: question_id.to_string(),
        detail: format!(
            "gave up after {} attempt(s): {last_transient}",
            config.retries + 1
        ),
    })
}

fn build_agent(config: &RemoteConfig) -> ureq::Agent {
    ureq::Agent::config_builder()
        .timeout_global(Some(config.timeout))
        .http_status_as_error(false)
        .build()
        .into()
}

/// Scorer backed by a remote model endpoint.
pub struct RemoteScorer {
    config: RemoteConfig,
    agent: ureq::Agent,
}

impl RemoteScorer {
    pub fn new(config: RemoteConfig) -> Result<RemoteScorer> {
        config.validate()?;
        let agent = build_agent(&config);
        Ok(RemoteScorer { config, agent })
    }
}

impl Scorer for RemoteScorer {
    fn score(&self, question: &QuestionItem, aug: &AugmentedQuery) -> Result<RankedPrediction> {
        let request = ScoreRequest {
            question_id: question.id.clone(),
            prompt: aug.prompt.clone(),
            options: question.options.clone(),
            contexts: aug.contexts.iter().map(|c| c.text.clone()).collect(),
        };
        let response: ScoreResponse =
            call_with_retries(&self.agent, &self.config, &request, &question.id)?;

        // The echoed id guards against responses applied to the wrong
        // question when calls run concurrently.
        if response.question_id != question.id {
            return Err(Error::Protocol {
                question_id: question.id.clone(),
                detail: format!(
                    "response echoes question `{}`, expected `{}`",
                    response.question_id, question.id
                ),
            });
        }
        let prediction = RankedPrediction {
            question_id: response.question_id,
            ranking: response.ranking,
        };
        prediction
            .validate_against(question)
            .map_err(|e| Error::Protocol {
                question_id: question.id.clone(),
                detail: format!("ranking violates the wire contract: {e}"),
            })?;
        Ok(prediction)
    }
}

/// Request body of the generation protocol.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GenerateRequest {
    pub prompt: String,
}

/// Response body of the generation protocol.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GenerateResponse {
    pub text: String,
}

/// Text-generation client backed by a remote endpoint; used by the
/// synthetic question generator.
pub struct RemoteGenerationClient {
    config: RemoteConfig,
    agent: ureq::Agent,
}

impl RemoteGenerationClient {
    pub fn new(config: RemoteConfig) -> Result<RemoteGenerationClient> {
        config.validate()?;
        let agent = build_agent(&config);
        Ok(RemoteGenerationClient { config, agent })
    }
}

impl super::GenerationClient for RemoteGenerationClient {
    fn generate(&self, prompt: &str) -> Result<String> {
        let request = GenerateRequest {
            prompt: prompt.to_string(),
        };
        let response: GenerateResponse =
            call_with_retries(&self.agent, &self.config, &request, "<generation>")?;
        Ok(response.text)
    }
}

/// Remote retry/backoff behavior is exercised end to end against a stub
/// server in the integration tests; see `tests/remote_protocol.rs`.
#[cfg(test)]
mod tests {
    use super::*;
    use std::time::Duration;

    #[test]
    fn empty_endpoint_rejected() {
        assert!(RemoteScorer::new(RemoteConfig::new("")).is_err());
    }

    #[test]
    fn zero_timeout_rejected() {
        let mut config = RemoteConfig::new("http://127.0.0.1:1/score");
        config.timeout = Duration::ZERO;
        assert!(RemoteScorer::new(config).is_err());
    }
}

//! HTTP-backed refiner client. The operator points VIDEOMERGE_LLM_ENDPOINT
//! at a completion service; VIDEOMERGE_LLM_KEY, when set, is sent as a
//! bearer token.
//!
//! Wire contract: one POST per completion with the JSON body
//! `{"model": <string>, "input": <request text>, "max_output_len": <int>}`.
//! The response is either a JSON document with a string field `output`, or a
//! plain-text body used verbatim.

use std::time::Duration;

use videomerge_core::refine::{ClientError, RefineSource, RefinerClient};

pub const ENDPOINT_ENV: &str = "VIDEOMERGE_LLM_ENDPOINT";
pub const KEY_ENV: &str = "VIDEOMERGE_LLM_KEY";

const DEFAULT_MODEL: &str = "default";
const MAX_OUTPUT_LEN: usize = 512;

#[derive(Debug, Clone)]
pub struct HttpRefinerClient {
    endpoint: String,
    key: Option<String>,
    timeout: Duration,
}

impl HttpRefinerClient {
    pub fn new(endpoint: String, key: Option<String>, timeout: Duration) -> Self {
        Self {
            endpoint,
            key,
            timeout,
        }
    }

    /// Build from the environment; `None` when no endpoint is configured.
    pub fn from_env() -> Option<Self> {
        let endpoint = std::env::var(ENDPOINT_ENV).ok()?;
        if endpoint.trim().is_empty() {
            return None;
        }
        let key = std::env::var(KEY_ENV).ok().filter(|k| !k.is_empty());
        Some(Self::new(endpoint, key, Duration::from_secs(30)))
    }
}

impl RefinerClient for HttpRefinerClient {
    fn complete(&self, request: &str) -> Result<String, ClientError> {
        let agent = ureq::AgentBuilder::new().timeout(self.timeout).build();
        let mut call = agent
            .post(&self.endpoint)
            .set("content-type", "application/json");
        if let Some(key) = &self.key {
            call = call.set("authorization", &format!("Bearer {key}"));
        }
        let body = serde_json::json!({
            "model": DEFAULT_MODEL,
            "input": request,
            "max_output_len": MAX_OUTPUT_LEN,
        });
        let response = call
            .send_string(&body.to_string())
            .map_err(|err| match err {
                ureq::Error::Status(code, _) => {
                    ClientError::Transport(format!("endpoint returned status {code}"))
                }
                ureq::Error::Transport(t) => ClientError::Transport(t.to_string()),
            })?;
        let text = response
            .into_string()
            .map_err(|e| ClientError::Transport(e.to_string()))?;
        let output = match serde_json::from_str::<serde_json::Value>(&text) {
            Ok(value) => value
                .get("output")
                .and_then(|v| v.as_str())
                .map(str::to_owned)
                .unwrap_or(text),
            Err(_) => text,
        };
        if output.trim().is_empty() {
            return Err(ClientError::EmptyResponse);
        }
        Ok(output)
    }

    fn source(&self) -> RefineSource {
        RefineSource::Remote
    }

    fn descriptor(&self) -> String {
        self.endpoint.clone()
    }

    fn timeout(&self) -> Duration {
        self.timeout
    }
}

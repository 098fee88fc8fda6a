//! HTTP backend for OpenAI-style chat-completions endpoints with tool calling.

use std::time::Duration;

use serde_json::{json, Value};

use super::backend::{Backend, BackendError};
use super::message::{AgentReply, Message, Part, Role, ToolCall};

pub const ENV_URL: &str = "CODRAW_LLM_URL";
pub const ENV_MODEL: &str = "CODRAW_LLM_MODEL";
pub const ENV_API_KEY: &str = "CODRAW_LLM_API_KEY";
pub const ENV_TEMPERATURE: &str = "CODRAW_LLM_TEMPERATURE";

#[derive(Debug, Clone, PartialEq)]
pub struct LiveConfig {
    /// Full URL of the chat-completions endpoint.
    pub url: String,
    pub model: String,
    pub api_key: Option<String>,
    /// Left to the endpoint's default when unset.
    pub temperature: Option<f64>,
    pub timeout: Duration,
    /// Extra attempts after a transport failure.
    pub retries: u32,
}

impl LiveConfig {
    pub fn new(url: impl Into<String>, model: impl Into<String>) -> Self {
        Self {
            url: url.into(),
            model: model.into(),
            api_key: None,
            temperature: None,
            timeout: Duration::from_secs(120),
            retries: 1,
        }
    }

    /// Reads the endpoint, model, key and temperature from the environment.
    /// `model` overrides the environment when given.
    pub fn from_env(model: Option<&str>) -> Result<Self, BackendError> {
        let url = std::env::var(ENV_URL).map_err(|_| BackendError::Config(format!("{ENV_URL} is not set")))?;
        let model = match model {
            Some(m) => m.to_string(),
            None => std::env::var(ENV_MODEL).map_err(|_| BackendError::Config(format!("{ENV_MODEL} is not set")))?,
        };
        let mut cfg = Self::new(url, model);
        cfg.api_key = std::env::var(ENV_API_KEY).ok().filter(|k| !k.is_empty());
        if let Ok(t) = std::env::var(ENV_TEMPERATURE) {
            let t = t.parse().map_err(|_| BackendError::Config(format!("{ENV_TEMPERATURE} is not a number")))?;
            cfg.temperature = Some(t);
        }
        Ok(cfg)
    }
}

pub struct LiveBackend {
    config: LiveConfig,
    client: reqwest::blocking::Client,
}

impl LiveBackend {
    pub fn new(config: LiveConfig) -> Result<Self, BackendError> {
        let client = reqwest::blocking::Client::builder()
            .timeout(config.timeout)
            .build()
            .map_err(|e| BackendError::Config(e.to_string()))?;
        Ok(Self { config, client })
    }

    fn post_once(&self, body: &Value) -> Result<Value, BackendError> {
        let mut req = self.client.post(&self.config.url).json(body);
        if let Some(key) = &self.config.api_key {
            req = req.bearer_auth(key);
        }
        let resp = req.send().map_err(classify)?;
        let status = resp.status();
        let text = resp.text().map_err(classify)?;
        if !status.is_success() {
            return Err(BackendError::Http { status: status.as_u16(), body: text });
        }
        serde_json::from_str(&text).map_err(|e| BackendError::Malformed(e.to_string()))
    }
}

fn classify(e: reqwest::Error) -> BackendError {
    if e.is_timeout() {
        BackendError::Timeout
    } else {
        BackendError::Transport(e.to_string())
    }
}

impl Backend for LiveBackend {
    fn generate(&mut self, history: &[Message], tools: &Value) -> Result<AgentReply, BackendError> {
        let body = request_body(&self.config, history, tools);
        let mut attempt = 0;
        let response = loop {
            match self.post_once(&body) {
                Err(BackendError::Transport(e)) if attempt < self.config.retries => {
                    tracing::warn!("transport error, retrying: {e}");
                    attempt += 1;
                }
                other => break other?,
            }
        };
        parse_response(&response)
    }
}

/// Builds the chat-completions request for `history` with `tools` offered
/// as functions.
pub fn request_body(config: &LiveConfig, history: &[Message], tools: &Value) -> Value {
    let messages: Vec<Value> = history.iter().flat_map(encode_message).collect();
    let functions: Vec<Value> = tools
        .as_array()
        .map(|a| a.iter().map(|d| json!({ "type": "function", "function": d })).collect())
        .unwrap_or_default();
    let mut body = json!({ "model": config.model, "messages": messages, "tools": functions });
    if let Some(t) = config.temperature {
        body["temperature"] = json!(t);
    }
    body
}

fn encode_message(m: &Message) -> Vec<Value> {
    match m.role {
        Role::System => vec![json!({ "role": "system", "content": m.joined_text() })],
        Role::User => {
            let content: Vec<Value> = m
                .parts
                .iter()
                .filter_map(|p| match p {
                    Part::Text { text } => Some(json!({ "type": "text", "text": text })),
                    Part::Image { image } => {
                        Some(json!({ "type": "image_url", "image_url": { "url": image.data_url() } }))
                    }
                    _ => None,
                })
                .collect();
            vec![json!({ "role": "user", "content": content })]
        }
        Role::Model => {
            let calls: Vec<Value> = m
                .parts
                .iter()
                .filter_map(|p| match p {
                    Part::ToolCall { call } => Some(json!({
                        "id": call.id.clone().unwrap_or_default(),
                        "type": "function",
                        "function": { "name": call.name, "arguments": call.args.to_string() }
                    })),
                    _ => None,
                })
                .collect();
            let mut msg = json!({ "role": "assistant", "content": m.joined_text() });
            if !calls.is_empty() {
                msg["tool_calls"] = Value::Array(calls);
            }
            vec![msg]
        }
        Role::Tool => m
            .parts
            .iter()
            .filter_map(|p| match p {
                Part::ToolResult { call_id, content, .. } => {
                    Some(json!({ "role": "tool", "tool_call_id": call_id, "content": content }))
                }
                _ => None,
            })
            .collect(),
    }
}

/// Extracts the reply from a chat-completions response.
pub fn parse_response(response: &Value) -> Result<AgentReply, BackendError> {
    let message = response
        .pointer("/choices/0/message")
        .ok_or_else(|| BackendError::Malformed("missing choices[0].message".into()))?;
    let text = message.get("content").and_then(Value::as_str).unwrap_or_default().to_string();
    let mut tool_calls = Vec::new();
    for call in message.get("tool_calls").and_then(Value::as_array).into_iter().flatten() {
        let name = call
            .pointer("/function/name")
            .and_then(Value::as_str)
            .ok_or_else(|| BackendError::Malformed("tool call without a function name".into()))?;
        // Arguments arrive as a JSON-encoded string; unparseable arguments are
        // kept as a string so dispatch reports them back to the model.
        let args = match call.pointer("/function/arguments") {
            Some(Value::String(s)) => serde_json::from_str(s).unwrap_or_else(|_| Value::String(s.clone())),
            Some(v) => v.clone(),
            None => Value::Object(Default::default()),
        };
        let id = call.get("id").and_then(Value::as_str).map(str::to_string);
        tool_calls.push(ToolCall { id, name: name.to_string(), args, seed: 0 });
    }
    let reply = AgentReply { text, tool_calls };
    if reply.is_empty() {
        return Err(BackendError::EmptyReply);
    }
    Ok(reply)
}

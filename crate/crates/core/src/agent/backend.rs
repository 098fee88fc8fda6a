//! The language-model boundary and its deterministic scripted implementation.

use std::path::{Path, PathBuf};
use std::time::Duration;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use super::message::{AgentReply, Message};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum BackendError {
    #[error("backend timed out")]
    Timeout,
    #[error("transport error: {0}")]
    Transport(String),
    #[error("backend returned HTTP {status}: {body}")]
    Http { status: u16, body: String },
    #[error("malformed backend response: {0}")]
    Malformed(String),
    #[error("backend returned neither text nor tool calls")]
    EmptyReply,
    #[error("scripted backend has no more replies")]
    ScriptExhausted,
    #[error("backend configuration: {0}")]
    Config(String),
}

/// Anything that can produce the model's next reply.
pub trait Backend: Send {
    fn generate(&mut self, history: &[Message], tools: &Value) -> Result<AgentReply, BackendError>;
}

/// One step of a scripted conversation: a reply or a simulated failure.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ScriptStep {
    Fail { error: ScriptedFailure },
    Reply(AgentReply),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScriptedFailure {
    Timeout,
    Transport,
}

/// Replays a stored list of replies in order, ignoring the history.
#[derive(Debug, Clone, Default)]
pub struct ScriptedBackend {
    steps: Vec<ScriptStep>,
    cursor: usize,
    latency: Duration,
}

impl ScriptedBackend {
    pub fn new(steps: Vec<ScriptStep>) -> Self {
        Self { steps, cursor: 0, latency: Duration::ZERO }
    }

    /// Sleeps for `latency` before every step, imitating a remote model.
    pub fn with_latency(mut self, latency: Duration) -> Self {
        self.latency = latency;
        self
    }

    pub fn from_replies(replies: impl IntoIterator<Item = AgentReply>) -> Self {
        Self::new(replies.into_iter().map(ScriptStep::Reply).collect())
    }

    pub fn from_json(text: &str) -> Result<Self, serde_json::Error> {
        Ok(Self::new(serde_json::from_str(text)?))
    }

    pub fn from_file(path: &Path) -> Result<Self, BackendError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| BackendError::Config(format!("{}: {e}", path.display())))?;
        Self::from_json(&text).map_err(|e| BackendError::Config(format!("{}: {e}", path.display())))
    }

    pub fn steps(&self) -> &[ScriptStep] {
        &self.steps
    }

    pub fn remaining(&self) -> usize {
        self.steps.len() - self.cursor
    }

    /// Starts the script again from the first step.
    pub fn rewind(&mut self) {
        self.cursor = 0;
    }
}

impl Backend for ScriptedBackend {
    fn generate(&mut self, _history: &[Message], _tools: &Value) -> Result<AgentReply, BackendError> {
        if !self.latency.is_zero() {
            std::thread::sleep(self.latency);
        }
        let step = self.steps.get(self.cursor).ok_or(BackendError::ScriptExhausted)?.clone();
        self.cursor += 1;
        match step {
            ScriptStep::Fail { error: ScriptedFailure::Timeout } => Err(BackendError::Timeout),
            ScriptStep::Fail { error: ScriptedFailure::Transport } => {
                Err(BackendError::Transport("scripted transport failure".into()))
            }
            ScriptStep::Reply(reply) if reply.is_empty() => Err(BackendError::EmptyReply),
            ScriptStep::Reply(reply) => Ok(reply),
        }
    }
}

impl<B: Backend + ?Sized> Backend for Box<B> {
    fn generate(&mut self, history: &[Message], tools: &Value) -> Result<AgentReply, BackendError> {
        (**self).generate(history, tools)
    }
}

/// Which backend a session or batch run talks to.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum BackendSpec {
    /// Steps given inline or read from `file`.
    Scripted {
        #[serde(default, skip_serializing_if = "Vec::is_empty")]
        steps: Vec<ScriptStep>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        file: Option<PathBuf>,
        #[serde(default)]
        latency_ms: u64,
    },
    /// The chat-completions endpoint configured in the environment.
    Live {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        model: Option<String>,
    },
}

impl BackendSpec {
    /// Parses the command-line form: `scripted:FILE` or `live`.
    pub fn parse(flag: &str) -> Result<Self, BackendError> {
        match flag.split_once(':') {
            Some(("scripted", file)) if !file.is_empty() => {
                Ok(BackendSpec::Scripted { steps: vec![], file: Some(file.into()), latency_ms: 0 })
            }
            None if flag == "live" => Ok(BackendSpec::Live { model: None }),
            _ => Err(BackendError::Config(format!("expected scripted:FILE or live, got {flag:?}"))),
        }
    }

    pub fn build(&self) -> Result<Box<dyn Backend>, BackendError> {
        match self {
            BackendSpec::Scripted { steps, file, latency_ms } => {
                let backend = match file {
                    Some(path) => ScriptedBackend::from_file(path)?,
                    None => ScriptedBackend::new(steps.clone()),
                };
                Ok(Box::new(backend.with_latency(Duration::from_millis(*latency_ms))))
            }
            BackendSpec::Live { model } => {
                let config = super::live::LiveConfig::from_env(model.as_deref())?;
                Ok(Box::new(super::live::LiveBackend::new(config)?))
            }
        }
    }
}

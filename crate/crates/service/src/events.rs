//! Messages streamed to WebSocket subscribers.

use codraw::geometry::Polyline;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SignalKind {
    /// The human wants to draw next.
    RequestTurn,
    /// Attach a fresh look at the drawing to the next turn.
    LookAtDrawing,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum EventKind {
    TurnStarted {
        turn: u64,
        revision: u64,
    },
    AgentText {
        turn: u64,
        text: String,
    },
    /// One executed or failed tool call. Failed calls carry `error` and no
    /// polylines.
    ToolCall {
        turn: u64,
        index: usize,
        name: String,
        ok: bool,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        element_id: Option<String>,
        #[serde(default)]
        polylines: Vec<Polyline>,
        revision: u64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        error: Option<String>,
    },
    TurnEnded {
        turn: u64,
        revision: u64,
        failed: bool,
    },
    Error {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        turn: Option<u64>,
        message: String,
    },
    StrokesAdded {
        element_id: String,
        revision: u64,
    },
    Signal {
        kind: SignalKind,
    },
}

/// An event with its per-session sequence number.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Event {
    pub seq: u64,
    pub session: String,
    #[serde(flatten)]
    pub kind: EventKind,
}

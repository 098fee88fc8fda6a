//! The multi-turn interaction loop and its replayable transcript.

use std::time::{SystemTime, UNIX_EPOCH};

use serde::{Deserialize, Serialize};
use serde_json::Value;

use super::backend::{Backend, BackendError};
use super::context::{assemble_context, ContextError, ContextLibrary, LibraryMode};
use super::dispatch::dispatch_tool_call;
use super::instructions::{render_system_instructions, InstructionParams};
use super::message::{AgentReply, ImageData, Message, Part, Role};
use crate::canvas::{Author, CanvasError, CanvasState, PlacementPolicy};
use crate::geometry::Polyline;
use crate::perception::render_canvas_png;
use crate::tools::derive_call_seed;
use crate::tools::schema::tool_declarations;

/// Default prompt for continuing an illustration.
pub const CONTINUE_PROMPT: &str = "What will you draw next?";
/// Alternative continuation prompt.
pub const CONTINUE_PROMPT_ALT: &str = "please continue the drawing";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SessionConfig {
    pub seed: u64,
    pub params: InstructionParams,
    pub library: ContextLibrary,
}

impl Default for SessionConfig {
    fn default() -> Self {
        Self { seed: 0, params: InstructionParams::default(), library: ContextLibrary::new(vec![], LibraryMode::None) }
    }
}

/// What the human contributes to a turn.
#[derive(Debug, Clone, PartialEq)]
pub struct HumanInput {
    pub text: Option<String>,
    /// A rectified photograph of the page. When absent and `attach_image`
    /// is set, a rendering of the simulated canvas is sent instead.
    pub image: Option<ImageData>,
    pub strokes: Vec<Polyline>,
    pub attach_image: bool,
}

impl Default for HumanInput {
    fn default() -> Self {
        Self { text: None, image: None, strokes: Vec::new(), attach_image: true }
    }
}

impl HumanInput {
    pub fn text(text: impl Into<String>) -> Self {
        Self { text: Some(text.into()), ..Default::default() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExecutedCall {
    pub index: usize,
    pub name: String,
    pub seed: u64,
    pub element_id: String,
    pub polylines: Vec<Polyline>,
    pub revision: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CallFailure {
    pub index: usize,
    pub name: String,
    pub seed: u64,
    pub error: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TurnRecord {
    pub turn: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub human_text: Option<String>,
    /// SHA-256 of the image sent with the turn.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub image_ref: Option<String>,
    /// The reply with call ids and seeds filled in.
    pub reply: AgentReply,
    pub executed: Vec<ExecutedCall>,
    pub failures: Vec<CallFailure>,
    pub revision_start: u64,
    pub revision_end: u64,
    #[serde(skip)]
    pub image: Option<ImageData>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum TranscriptEntry {
    HumanStrokes { element_id: String, strokes: Vec<Polyline>, revision: u64 },
    Turn(TurnRecord),
}

impl TranscriptEntry {
    pub fn revision_end(&self) -> u64 {
        match self {
            TranscriptEntry::HumanStrokes { revision, .. } => *revision,
            TranscriptEntry::Turn(t) => t.revision_end,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SessionTranscript {
    pub id: String,
    /// Seconds since the Unix epoch.
    pub created_at: u64,
    pub seed: u64,
    pub params: InstructionParams,
    pub library_mode: LibraryMode,
    pub entries: Vec<TranscriptEntry>,
}

impl SessionTranscript {
    pub fn new(id: impl Into<String>, seed: u64, params: InstructionParams, library_mode: LibraryMode) -> Self {
        let created_at = SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0);
        Self { id: id.into(), created_at, seed, params, library_mode, entries: Vec::new() }
    }

    pub fn turns(&self) -> impl Iterator<Item = &TurnRecord> {
        self.entries.iter().filter_map(|e| match e {
            TranscriptEntry::Turn(t) => Some(t),
            _ => None,
        })
    }

    pub fn final_revision(&self) -> u64 {
        self.entries.last().map_or(0, TranscriptEntry::revision_end)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("transcript serializes")
    }

    pub fn from_json(text: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(text)
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum TurnError {
    #[error(transparent)]
    Backend(#[from] BackendError),
    #[error("no strokes given")]
    EmptyStrokes,
    #[error(transparent)]
    Canvas(#[from] CanvasError),
}

/// Progress reported while a turn runs, in order.
#[derive(Debug, Clone, PartialEq)]
pub enum TurnProgress<'a> {
    AgentText(&'a str),
    Executed(&'a ExecutedCall),
    Failed(&'a CallFailure),
}

/// One collaborative drawing session: chat history, canvas and transcript.
#[derive(Debug, Clone)]
pub struct Session {
    seed: u64,
    tools: Value,
    history: Vec<Message>,
    canvas: CanvasState,
    transcript: SessionTranscript,
}

impl Session {
    /// Starts a session with the instructions and vocabulary already in the
    /// history and an empty canvas.
    pub fn new(id: impl Into<String>, config: &SessionConfig) -> Result<Self, ContextError> {
        let mut history = vec![Message::text(Role::System, render_system_instructions(&config.params))];
        history.extend(assemble_context(&config.library)?);
        Ok(Self {
            seed: config.seed,
            tools: tool_declarations(),
            history,
            canvas: CanvasState::new(config.params.constraints()),
            transcript: SessionTranscript::new(id, config.seed, config.params, config.library.mode),
        })
    }

    pub fn id(&self) -> &str {
        &self.transcript.id
    }

    pub fn canvas(&self) -> &CanvasState {
        &self.canvas
    }

    pub fn history(&self) -> &[Message] {
        &self.history
    }

    pub fn transcript(&self) -> &SessionTranscript {
        &self.transcript
    }

    fn next_turn_index(&self) -> u64 {
        self.transcript.turns().count() as u64
    }

    /// Adds `strokes` as one human element, clipped to the page.
    pub fn add_human_strokes(&mut self, strokes: Vec<Polyline>) -> Result<u64, TurnError> {
        if strokes.is_empty() {
            return Err(TurnError::EmptyStrokes);
        }
        let next = self.canvas.add_element(Author::Human, strokes, None, PlacementPolicy::ClipThenAccept, None)?;
        let element = next.elements.last().expect("just added");
        self.transcript.entries.push(TranscriptEntry::HumanStrokes {
            element_id: element.id.clone(),
            strokes: element.strokes().to_vec(),
            revision: next.revision,
        });
        self.canvas = next;
        Ok(self.canvas.revision)
    }

    pub fn run_turn(&mut self, input: HumanInput, backend: &mut dyn Backend) -> Result<TurnRecord, TurnError> {
        self.run_turn_with(input, backend, &mut |_| {})
    }

    /// Runs one turn: sends the human message, asks the backend for a reply
    /// and executes every tool call in order. A failing call is reported back
    /// to the model and the remaining calls still run. If the backend fails
    /// the session is left exactly as before the call.
    pub fn run_turn_with(
        &mut self,
        input: HumanInput,
        backend: &mut dyn Backend,
        progress: &mut dyn FnMut(TurnProgress<'_>),
    ) -> Result<TurnRecord, TurnError> {
        let saved = (self.history.len(), self.canvas.clone(), self.transcript.entries.len());
        let result = self.turn_inner(input, backend, progress);
        if result.is_err() {
            self.history.truncate(saved.0);
            self.canvas = saved.1;
            self.transcript.entries.truncate(saved.2);
        }
        result
    }

    fn turn_inner(
        &mut self,
        input: HumanInput,
        backend: &mut dyn Backend,
        progress: &mut dyn FnMut(TurnProgress<'_>),
    ) -> Result<TurnRecord, TurnError> {
        if !input.strokes.is_empty() {
            self.add_human_strokes(input.strokes)?;
        }
        let turn = self.next_turn_index();
        let image = match (input.attach_image, input.image) {
            (true, Some(img)) => Some(img),
            (true, None) => Some(ImageData::png(render_canvas_png(&self.canvas))),
            (false, _) => None,
        };
        let mut parts = Vec::new();
        if let Some(img) = &image {
            parts.push(Part::Image { image: img.clone() });
        }
        parts.push(Part::text(input.text.clone().unwrap_or_else(|| CONTINUE_PROMPT.to_string())));
        self.history.push(Message::new(Role::User, parts));

        let mut reply = backend.generate(&self.history, &self.tools)?;
        for (index, call) in reply.tool_calls.iter_mut().enumerate() {
            call.seed = derive_call_seed(self.seed, turn, index as u64);
            if call.id.is_none() {
                call.id = Some(format!("call-{turn}-{index}"));
            }
        }
        let mut model_parts = Vec::new();
        if !reply.text.is_empty() {
            progress(TurnProgress::AgentText(&reply.text));
            model_parts.push(Part::text(reply.text.clone()));
        }
        model_parts.extend(reply.tool_calls.iter().map(|c| Part::ToolCall { call: c.clone() }));
        self.history.push(Message::new(Role::Model, model_parts));

        let revision_start = self.canvas.revision;
        let mut executed = Vec::new();
        let mut failures = Vec::new();
        let mut results = Vec::new();
        for (index, call) in reply.tool_calls.iter().enumerate() {
            let call_id = call.id.clone().unwrap_or_default();
            match dispatch_tool_call(call, &self.canvas) {
                Ok(done) => {
                    self.canvas = done.canvas;
                    let bbox = self.canvas.element(&done.element_id).expect("dispatched element").bbox();
                    results.push(Part::ToolResult {
                        call_id,
                        name: call.name.clone(),
                        ok: true,
                        content: format!(
                            "drew element {} with bounding box [{:.0}, {:.0}, {:.0}, {:.0}]",
                            done.element_id, bbox.min_x, bbox.min_y, bbox.max_x, bbox.max_y
                        ),
                    });
                    let record = ExecutedCall {
                        index,
                        name: call.name.clone(),
                        seed: call.seed,
                        element_id: done.element_id,
                        polylines: done.polylines,
                        revision: self.canvas.revision,
                    };
                    progress(TurnProgress::Executed(&record));
                    executed.push(record);
                }
                Err(e) => {
                    let failure =
                        CallFailure { index, name: call.name.clone(), seed: call.seed, error: e.to_string() };
                    results.push(Part::ToolResult {
                        call_id,
                        name: call.name.clone(),
                        ok: false,
                        content: format!("error: {e}. Nothing was drawn for this call."),
                    });
                    progress(TurnProgress::Failed(&failure));
                    failures.push(failure);
                }
            }
        }
        if !results.is_empty() {
            self.history.push(Message::new(Role::Tool, results));
        }
        let record = TurnRecord {
            turn,
            human_text: input.text,
            image_ref: image.as_ref().map(ImageData::sha256_hex),
            reply,
            executed,
            failures,
            revision_start,
            revision_end: self.canvas.revision,
            image,
        };
        self.transcript.entries.push(TranscriptEntry::Turn(record.clone()));
        Ok(record)
    }
}

//! The agent runtime: instructions, in-context vocabulary, model backends,
//! tool dispatch and the turn loop.

mod backend;
mod context;
mod dispatch;
mod instructions;
pub mod live;
mod message;
mod replay;
mod session;
mod vocabulary;

pub use backend::{Backend, BackendError, BackendSpec, ScriptStep, ScriptedBackend, ScriptedFailure};
pub use context::{
    assemble_context, bootstrap_method_text, BootstrapError, ContextError, ContextLibrary, LibraryMode,
    VocabularyEntry, BOOTSTRAP_PROMPT, STEP_BY_STEP_PROMPT,
};
pub use dispatch::{dispatch_tool_call, DispatchError, Dispatched, DEFAULT_HATCH_ANGLE, THICKEN_OFFSET};
pub use instructions::{render_system_instructions, InstructionParams};
pub use live::{LiveBackend, LiveConfig};
pub use message::{AgentReply, ImageData, Message, Part, Role, ToolCall};
pub use replay::{replay, replay_revisions, rerun, ReplayError};
pub use session::{
    CallFailure, ExecutedCall, HumanInput, Session, SessionConfig, SessionTranscript, TranscriptEntry, TurnError,
    TurnProgress, TurnRecord, CONTINUE_PROMPT, CONTINUE_PROMPT_ALT,
};
pub use vocabulary::{demo_vocabulary, SKETCH_SIZE};

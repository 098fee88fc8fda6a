//! Live sessions and the rules for mutating them.
//!
//! Every mutation of a session (a turn, human strokes, a signal) first claims
//! the session's busy flag; a second mutation while it is held fails with
//! [`ServiceError::TurnInProgress`]. Readers only ever clone the current
//! [`View`], an immutable snapshot swapped in after each mutation.

use std::collections::HashMap;
use std::sync::atomic::{AtomicBool, AtomicU64, Ordering};
use std::sync::{Arc, Mutex, OnceLock, RwLock};

use codraw::agent::{
    demo_vocabulary, Backend, BackendSpec, ContextLibrary, HumanInput, ImageData, LibraryMode, Session,
    SessionConfig, SessionTranscript, TurnError, TurnProgress, TurnRecord, VocabularyEntry,
};
use codraw::canvas::{export_svg, CanvasState};
use codraw::geometry::Polyline;
use serde::{Deserialize, Serialize};
use tokio::sync::broadcast;

use crate::events::{Event, EventKind, SignalKind};
use crate::store::Store;
use crate::ServiceError;

const EVENT_BUFFER: usize = 1024;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TurnState {
    Idle,
    Human,
    Agent,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Vocabulary {
    /// The built-in 24-subject library.
    #[default]
    Demo,
    Empty,
}

/// Body of `POST /sessions`. Every field is optional.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CreateSession {
    pub library_mode: Option<String>,
    #[serde(default)]
    pub vocabulary: Vocabulary,
    pub seed: Option<u64>,
    pub backend: Option<BackendSpec>,
}

/// What readers see of a session between mutations.
#[derive(Debug, Clone)]
pub struct View {
    pub canvas: CanvasState,
    pub transcript: SessionTranscript,
    /// SVG of every revision so far, index = revision.
    pub snapshots: Vec<Arc<str>>,
    pub turn_state: TurnState,
    pub backend: &'static str,
}

struct Core {
    session: Session,
    backend: Box<dyn Backend>,
    pending_image: Option<ImageData>,
    look_requested: bool,
    /// Responses to stroke submissions keyed by the client's idempotency key.
    stroke_acks: HashMap<String, StrokesAck>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StrokesAck {
    pub element_id: String,
    pub revision: u64,
}

pub struct SessionSlot {
    id: String,
    store: Store,
    core: Mutex<Core>,
    view: RwLock<Arc<View>>,
    busy: AtomicBool,
    seq: AtomicU64,
    events: broadcast::Sender<Event>,
}

/// Proof that the holder owns the session's busy flag; releases it on drop.
pub struct Claim(Arc<SessionSlot>);

impl Drop for Claim {
    fn drop(&mut self) {
        self.0.busy.store(false, Ordering::Release);
    }
}

impl std::ops::Deref for Claim {
    type Target = SessionSlot;
    fn deref(&self) -> &SessionSlot {
        &self.0
    }
}

fn shared_vocabulary() -> &'static [VocabularyEntry] {
    static VOCAB: OnceLock<Vec<VocabularyEntry>> = OnceLock::new();
    VOCAB.get_or_init(demo_vocabulary)
}

fn backend_kind(spec: &BackendSpec) -> &'static str {
    match spec {
        BackendSpec::Scripted { .. } => "scripted",
        BackendSpec::Live { .. } => "live",
    }
}

impl SessionSlot {
    pub fn create(
        id: String,
        request: CreateSession,
        default_backend: &BackendSpec,
        store: Store,
    ) -> Result<Arc<Self>, ServiceError> {
        let mode = match request.library_mode.as_deref() {
            None => LibraryMode::default(),
            Some(m) => LibraryMode::parse(m).ok_or_else(|| ServiceError::BadConfig(format!("unknown library mode {m:?}")))?,
        };
        let entries = match request.vocabulary {
            Vocabulary::Demo => shared_vocabulary().to_vec(),
            Vocabulary::Empty => Vec::new(),
        };
        let config = SessionConfig {
            seed: request.seed.unwrap_or(0),
            library: ContextLibrary::new(entries, mode),
            ..Default::default()
        };
        let session = Session::new(id.clone(), &config).map_err(|e| ServiceError::BadConfig(e.to_string()))?;
        let spec = request.backend.unwrap_or_else(|| default_backend.clone());
        let backend = spec.build().map_err(|e| ServiceError::BadConfig(e.to_string()))?;
        let view = View {
            canvas: session.canvas().clone(),
            transcript: session.transcript().clone(),
            snapshots: vec![export_svg(session.canvas()).into()],
            turn_state: TurnState::Idle,
            backend: backend_kind(&spec),
        };
        store
            .save(&view.transcript, &[(0, &view.snapshots[0])], &[])
            .map_err(|e| ServiceError::Io(e.to_string()))?;
        let (events, _) = broadcast::channel(EVENT_BUFFER);
        Ok(Arc::new(Self {
            id,
            store,
            core: Mutex::new(Core {
                session,
                backend,
                pending_image: None,
                look_requested: false,
                stroke_acks: HashMap::new(),
            }),
            view: RwLock::new(Arc::new(view)),
            busy: AtomicBool::new(false),
            seq: AtomicU64::new(0),
            events,
        }))
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn view(&self) -> Arc<View> {
        self.view.read().expect("view lock").clone()
    }

    pub fn subscribe(&self) -> broadcast::Receiver<Event> {
        self.events.subscribe()
    }

    pub fn is_busy(&self) -> bool {
        self.busy.load(Ordering::Acquire)
    }

    /// Claims the busy flag or reports the mutation already running.
    pub fn claim(self: &Arc<Self>) -> Result<Claim, ServiceError> {
        self.busy
            .compare_exchange(false, true, Ordering::AcqRel, Ordering::Acquire)
            .map_err(|_| ServiceError::TurnInProgress)?;
        Ok(Claim(self.clone()))
    }

    fn emit(&self, kind: EventKind) {
        let event = Event { seq: self.seq.fetch_add(1, Ordering::AcqRel), session: self.id.clone(), kind };
        // No subscribers is not an error.
        let _ = self.events.send(event);
    }

    fn set_turn_state(&self, state: TurnState) {
        let mut view = self.view.write().expect("view lock");
        let mut next = (**view).clone();
        next.turn_state = state;
        *view = Arc::new(next);
    }

    /// Publishes the session's current state, snapshotting every revision
    /// past the last published one, and persists it.
    fn publish(&self, session: &Session, turn_state: TurnState, images: &[&ImageData]) {
        let canvas = session.canvas();
        let mut view = self.view.write().expect("view lock");
        let mut next = (**view).clone();
        let first_new = next.snapshots.len() as u64;
        for revision in first_new..=canvas.revision {
            // Each revision adds exactly one element, so the canvas at an
            // earlier revision is a prefix of the current one.
            let mut past = canvas.clone();
            past.elements.truncate(revision as usize);
            past.revision = revision;
            next.snapshots.push(export_svg(&past).into());
        }
        next.canvas = canvas.clone();
        next.transcript = session.transcript().clone();
        next.turn_state = turn_state;
        let fresh: Vec<(u64, &str)> =
            (first_new..=canvas.revision).map(|r| (r, &*next.snapshots[r as usize])).collect();
        if let Err(e) = self.store.save(&next.transcript, &fresh, images) {
            tracing::error!(session = %self.id, "could not persist session: {e}");
        }
        *view = Arc::new(next);
    }

    /// Runs one agent turn. Call from a blocking thread.
    pub fn run_turn(claim: Claim, text: Option<String>, attach_image: bool) -> Result<TurnRecord, ServiceError> {
        let slot = &*claim;
        let mut core = slot.core.lock().expect("session lock");
        let core = &mut *core;
        let turn = core.session.transcript().turns().count() as u64;
        let revision_start = core.session.canvas().revision;
        slot.set_turn_state(TurnState::Agent);
        slot.emit(EventKind::TurnStarted { turn, revision: revision_start });

        let image = core.pending_image.take();
        let look = std::mem::take(&mut core.look_requested);
        let input = HumanInput {
            text,
            image: image.clone(),
            strokes: Vec::new(),
            attach_image: attach_image || look || image.is_some(),
        };
        let mut progress = |p: TurnProgress<'_>| match p {
            TurnProgress::AgentText(text) => slot.emit(EventKind::AgentText { turn, text: text.to_string() }),
            TurnProgress::Executed(call) => slot.emit(EventKind::ToolCall {
                turn,
                index: call.index,
                name: call.name.clone(),
                ok: true,
                element_id: Some(call.element_id.clone()),
                polylines: call.polylines.clone(),
                revision: call.revision,
                error: None,
            }),
            TurnProgress::Failed(failure) => slot.emit(EventKind::ToolCall {
                turn,
                index: failure.index,
                name: failure.name.clone(),
                ok: false,
                element_id: None,
                polylines: Vec::new(),
                revision: revision_start,
                error: Some(failure.error.clone()),
            }),
        };
        let result = core.session.run_turn_with(input, &mut core.backend, &mut progress);
        match result {
            Ok(record) => {
                let images: Vec<&ImageData> = record.image.iter().collect();
                slot.publish(&core.session, TurnState::Idle, &images);
                slot.emit(EventKind::TurnEnded { turn, revision: record.revision_end, failed: false });
                Ok(record)
            }
            Err(e) => {
                core.pending_image = image;
                core.look_requested = look;
                slot.set_turn_state(TurnState::Idle);
                let message = e.to_string();
                slot.emit(EventKind::Error { turn: Some(turn), message: message.clone() });
                slot.emit(EventKind::TurnEnded { turn, revision: revision_start, failed: true });
                Err(match e {
                    TurnError::Backend(_) => ServiceError::Backend(message),
                    _ => ServiceError::BadRequest(message),
                })
            }
        }
    }

    /// Adds human strokes as one element. Repeating a request with the same
    /// idempotency key returns the first answer without drawing again.
    pub fn add_strokes(
        claim: Claim,
        strokes: Vec<Polyline>,
        idempotency_key: Option<String>,
    ) -> Result<StrokesAck, ServiceError> {
        let slot = &*claim;
        let mut core = slot.core.lock().expect("session lock");
        if let Some(ack) = idempotency_key.as_ref().and_then(|k| core.stroke_acks.get(k)) {
            return Ok(ack.clone());
        }
        let revision = core.session.add_human_strokes(strokes).map_err(|e| match e {
            TurnError::EmptyStrokes => ServiceError::EmptyStrokes,
            other => ServiceError::BadRequest(other.to_string()),
        })?;
        let element_id = core.session.canvas().elements.last().expect("just added").id.clone();
        let ack = StrokesAck { element_id: element_id.clone(), revision };
        if let Some(key) = idempotency_key {
            core.stroke_acks.insert(key, ack.clone());
        }
        let state = slot.view().turn_state;
        slot.publish(&core.session, state, &[]);
        slot.emit(EventKind::StrokesAdded { element_id, revision });
        Ok(ack)
    }

    /// Records a turn signal. `image` is a rectified view of the page to
    /// send with the next turn.
    pub fn signal(claim: Claim, kind: SignalKind, image: Option<ImageData>) {
        let slot = &*claim;
        let mut core = slot.core.lock().expect("session lock");
        match kind {
            SignalKind::RequestTurn => slot.set_turn_state(TurnState::Human),
            SignalKind::LookAtDrawing => {
                core.look_requested = true;
                if image.is_some() {
                    core.pending_image = image;
                }
            }
        }
        slot.emit(EventKind::Signal { kind });
    }
}

//! Rebuilds canvases from transcripts by re-running the recorded calls.

use super::dispatch::dispatch_tool_call;
use super::session::{SessionTranscript, TranscriptEntry};
use crate::canvas::{Author, CanvasError, CanvasState, PlacementPolicy};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ReplayError {
    #[error("turn {turn}, call {index}: {detail}")]
    Divergence { turn: u64, index: usize, detail: String },
    #[error("human strokes at revision {revision}: {source}")]
    HumanStrokes { revision: u64, source: CanvasError },
    #[error("revision mismatch: transcript says {expected}, replay reached {actual}")]
    Revision { expected: u64, actual: u64 },
}

/// Final canvas of `transcript`.
pub fn replay(transcript: &SessionTranscript) -> Result<CanvasState, ReplayError> {
    let mut last = None;
    replay_each(transcript, |c| last = Some(c.clone()))?;
    Ok(last.unwrap_or_else(|| CanvasState::new(transcript.params.constraints())))
}

/// Canvas at every revision, index = revision number.
pub fn replay_revisions(transcript: &SessionTranscript) -> Result<Vec<CanvasState>, ReplayError> {
    let mut states = Vec::new();
    replay_each(transcript, |c| states.push(c.clone()))?;
    Ok(states)
}

/// Re-executes every recorded call with its recorded seed without comparing
/// against the recorded outcome. Edited transcripts replay to whatever the
/// edited calls now draw.
pub fn rerun(transcript: &SessionTranscript) -> CanvasState {
    let mut canvas = CanvasState::new(transcript.params.constraints());
    for entry in &transcript.entries {
        match entry {
            TranscriptEntry::HumanStrokes { strokes, .. } => {
                if let Ok(next) =
                    canvas.add_element(Author::Human, strokes.clone(), None, PlacementPolicy::ClipThenAccept, None)
                {
                    canvas = next;
                }
            }
            TranscriptEntry::Turn(turn) => {
                for call in &turn.reply.tool_calls {
                    if let Ok(done) = dispatch_tool_call(call, &canvas) {
                        canvas = done.canvas;
                    }
                }
            }
        }
    }
    canvas
}

fn replay_each(transcript: &SessionTranscript, mut visit: impl FnMut(&CanvasState)) -> Result<(), ReplayError> {
    let mut canvas = CanvasState::new(transcript.params.constraints());
    visit(&canvas);
    for entry in &transcript.entries {
        match entry {
            TranscriptEntry::HumanStrokes { strokes, revision, .. } => {
                canvas = canvas
                    .add_element(Author::Human, strokes.clone(), None, PlacementPolicy::ClipThenAccept, None)
                    .map_err(|source| ReplayError::HumanStrokes { revision: *revision, source })?;
                visit(&canvas);
            }
            TranscriptEntry::Turn(turn) => {
                if canvas.revision != turn.revision_start {
                    return Err(ReplayError::Revision { expected: turn.revision_start, actual: canvas.revision });
                }
                for (index, call) in turn.reply.tool_calls.iter().enumerate() {
                    let recorded = turn.executed.iter().find(|e| e.index == index);
                    let diverge = |detail: String| ReplayError::Divergence { turn: turn.turn, index, detail };
                    match (dispatch_tool_call(call, &canvas), recorded) {
                        (Ok(done), Some(rec)) => {
                            if done.element_id != rec.element_id || done.polylines != rec.polylines {
                                return Err(diverge("drawn output differs from the recording".into()));
                            }
                            canvas = done.canvas;
                            visit(&canvas);
                        }
                        (Ok(_), None) => return Err(diverge("call succeeded but was recorded as failed".into())),
                        (Err(e), Some(_)) => return Err(diverge(format!("recorded success now fails: {e}"))),
                        (Err(_), None) => {}
                    }
                }
                if canvas.revision != turn.revision_end {
                    return Err(ReplayError::Revision { expected: turn.revision_end, actual: canvas.revision });
                }
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::agent::backend::ScriptedBackend;
    use crate::agent::message::{AgentReply, ToolCall};
    use crate::agent::session::{HumanInput, Session, SessionConfig};
    use crate::canvas::export_svg;
    use serde_json::json;

    fn scribble_session() -> Session {
        let mut s = Session::new("s", &SessionConfig { seed: 7, ..Default::default() }).unwrap();
        let mut b = ScriptedBackend::from_replies([AgentReply {
            text: "grass".into(),
            tool_calls: vec![ToolCall::new(
                "draw-scribbles",
                json!({"polygon": [[100, 600], [400, 600], [400, 700], [100, 700]], "density": 1}),
            )],
        }]);
        s.run_turn(HumanInput::text("draw grass"), &mut b).unwrap();
        s
    }

    #[test]
    fn replay_reproduces_svg() {
        let s = scribble_session();
        let replayed = replay(s.transcript()).unwrap();
        assert_eq!(export_svg(&replayed), export_svg(s.canvas()));
        assert_eq!(replay_revisions(s.transcript()).unwrap().len(), 2);
    }

    #[test]
    fn edited_seed_diverges() {
        let s = scribble_session();
        let mut t = s.transcript().clone();
        if let TranscriptEntry::Turn(turn) = &mut t.entries[0] {
            turn.reply.tool_calls[0].seed ^= 1;
        }
        assert!(matches!(replay(&t), Err(ReplayError::Divergence { .. })));
        assert_ne!(export_svg(&rerun(&t)), export_svg(s.canvas()));
        assert_eq!(export_svg(&rerun(s.transcript())), export_svg(s.canvas()));
    }

    #[test]
    fn empty_transcript_gives_empty_canvas() {
        let s = Session::new("s", &SessionConfig::default()).unwrap();
        let c = replay(s.transcript()).unwrap();
        assert!(c.is_empty());
        assert_eq!(c.revision, 0);
    }
}

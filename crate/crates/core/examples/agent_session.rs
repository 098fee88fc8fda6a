//! A two-turn session against a scripted model: the human adds a stroke,
//! the agent answers with tool calls, and the transcript is replayed.
//!
//! cargo run -p codraw --example agent_session

use codraw::agent::{
    demo_vocabulary, replay, AgentReply, ContextLibrary, HumanInput, LibraryMode, ScriptedBackend, Session,
    SessionConfig, ToolCall, TurnProgress,
};
use codraw::canvas::export_svg;
use codraw::geometry::{Point, Polyline};
use serde_json::json;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let config = SessionConfig {
        seed: 42,
        library: ContextLibrary::new(demo_vocabulary(), LibraryMode::ImagesAndMethods),
        ..Default::default()
    };
    let mut session = Session::new("demo", &config)?;
    println!("context: {} messages before the first turn", session.history().len());

    let mut backend = ScriptedBackend::from_replies([
        AgentReply {
            text: "I'll put a house next to your hill.".into(),
            tool_calls: vec![
                ToolCall::new("draw-path", json!({"keypoints": [[700, 600], [900, 600], [900, 450], [700, 450], [700, 600]], "label": "walls"})),
                ToolCall::new("draw-path", json!({"keypoints": [[690, 445], [800, 340], [910, 445]], "label": "roof", "attach_to": "e2"})),
            ],
        },
        AgentReply {
            text: "Some grass under it.".into(),
            tool_calls: vec![ToolCall::new("draw-scribbly-splines", json!({"keypoints": [[600, 700], [800, 690], [1000, 705]]}))],
        },
    ]);

    let hill = Polyline::new([(80.0, 700.0), (250.0, 560.0), (420.0, 700.0)].map(|(x, y)| Point::new(x, y)))?;
    session.add_human_strokes(vec![hill])?;

    let mut show = |p: TurnProgress<'_>| match p {
        TurnProgress::AgentText(t) => println!("  agent: {t}"),
        TurnProgress::Executed(c) => println!("  {} -> {} (revision {})", c.name, c.element_id, c.revision),
        TurnProgress::Failed(f) => println!("  {} failed: {}", f.name, f.error),
    };
    for text in [Some("Let's draw a village."), None] {
        let input = HumanInput { text: text.map(String::from), ..Default::default() };
        let record = session.run_turn_with(input, &mut backend, &mut show)?;
        println!("turn {}: revisions {}..{}", record.turn, record.revision_start, record.revision_end);
    }

    let replayed = replay(session.transcript())?;
    assert_eq!(export_svg(&replayed), export_svg(session.canvas()));
    println!("{} elements; transcript replays to the same SVG", session.canvas().elements.len());
    Ok(())
}

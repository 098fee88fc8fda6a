//! Checks geometric assertions against the three-circles scenario and a
//! deliberately wrong variant.
//!
//! cargo run -p codraw --example verify_scene

use codraw::agent::{dispatch_tool_call, ToolCall};
use codraw::batch::Scenario;
use codraw::canvas::CanvasState;
use codraw::verify::verify;
use serde_json::json;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let dir = concat!(env!("CARGO_MANIFEST_DIR"), "/../../scenarios/three_circles");
    let scenario = Scenario::load(dir.as_ref())?;
    let script = std::fs::read_to_string(scenario.assertions_path())?;
    let drawn = scenario.run()?;
    println!("scenario:\n{}", verify(drawn.session.canvas(), &script)?);

    // Same circles, but the middle one is lifted and the last one shrinks.
    let mut canvas = CanvasState::default();
    for (x, y, r) in [(200, 450, 40), (450, 300, 60), (800, 450, 50)] {
        let call = ToolCall::new("draw-circles", json!({"circles": [{"center": [x, y], "radius": r}]}));
        canvas = dispatch_tool_call(&call, &canvas)?.canvas;
    }
    let report = verify(&canvas, &script)?;
    println!("variant:\n{report}");
    println!("variant passes: {}", report.passed());
    Ok(())
}

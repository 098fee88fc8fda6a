//! Sends tool calls that break each placement rule and prints how the
//! canvas answers: clipped, accepted, or rejected with the violations.
//!
//! cargo run -p codraw --example canvas_constraints

use codraw::agent::{dispatch_tool_call, ToolCall};
use codraw::canvas::CanvasState;
use serde_json::json;

fn main() {
    let mut canvas = CanvasState::default();
    let c = &canvas.constraints;
    println!(
        "page {}x{} px, margin {}, buffer {}, max height {}, min line {:.2} px",
        c.width, c.height, c.edge_margin, c.element_buffer, c.max_element_height, c.min_line_len_px
    );

    let calls = [
        ("fits", ToolCall::new("draw-circles", json!({"circles": [{"center": [300, 300], "radius": 80}]}))),
        ("crosses the margin", ToolCall::new("draw-segments", json!({"segments": [{"start": [-50, 600], "end": [200, 600]}]}))),
        ("too close to e1", ToolCall::new("draw-circles", json!({"circles": [{"center": [480, 300], "radius": 70}]}))),
        ("attached to e1", ToolCall::new("draw-circles", json!({"circles": [{"center": [480, 300], "radius": 70}], "attach_to": "e1"}))),
        ("too tall", ToolCall::new("draw-path", json!({"keypoints": [[900, 100], [900, 600]]}))),
        ("too short", ToolCall::new("draw-segments", json!({"segments": [{"start": [900, 700], "end": [930, 700]}]}))),
        ("unknown tool", ToolCall::new("draw-stars", json!({}))),
        ("bad arguments", ToolCall::new("draw-circles", json!({"circles": [{"center": [900, 700]}]}))),
    ];
    for (what, call) in calls {
        match dispatch_tool_call(&call, &canvas) {
            Ok(done) => {
                let b = canvas_bbox(&done);
                println!("{what:<20} ok   {} bbox x {:.0}..{:.0}, y {:.0}..{:.0}", done.element_id, b.0, b.1, b.2, b.3);
                canvas = done.canvas;
            }
            Err(e) => println!("{what:<20} err  {e}"),
        }
    }
    println!("revision {}, {} elements", canvas.revision, canvas.elements.len());
}

fn canvas_bbox(done: &codraw::agent::Dispatched) -> (f64, f64, f64, f64) {
    let b = done.canvas.element(&done.element_id).expect("new element").bbox();
    (b.min_x, b.max_x, b.min_y, b.max_y)
}

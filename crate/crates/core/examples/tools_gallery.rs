//! Draws one element with each tool onto a canvas and writes it as SVG and
//! as a pen program.
//!
//! cargo run -p codraw --example tools_gallery [OUT_DIR]

use codraw::agent::{dispatch_tool_call, ToolCall};
use codraw::canvas::{export_pen_program, export_svg, CanvasState};
use serde_json::json;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let out = std::env::args().nth(1).map(Into::into).unwrap_or_else(|| std::env::temp_dir().join("codraw-gallery"));
    std::fs::create_dir_all(&out)?;

    let calls = [
        ToolCall::new("draw-segments", json!({"segments": [{"start": [60, 80], "end": [260, 80]}, {"start": [60, 140], "end": [260, 200]}]})),
        ToolCall::new("draw-circles", json!({"circles": [{"center": [420, 140], "radius": 70}], "passes": 3})),
        ToolCall::new("draw-splines", json!({"keypoints": [[600, 200], [680, 60], [760, 200], [840, 60]]})),
        ToolCall::new("draw-path", json!({"keypoints": [[920, 60], [1120, 60], [1120, 200], [920, 200], [920, 60]]})),
        ToolCall::new("draw-text", json!({"text": "PLOTTER", "origin": [60, 400], "height": 80})),
        ToolCall::new("draw-scribbles", json!({"polygon": [[640, 300], [820, 300], [840, 480], [630, 480]], "density": 2})),
        ToolCall::new("draw-hatching", json!({"polygon": [[900, 300], [1120, 320], [1080, 480], [880, 460]], "density": 8, "angle": 30, "cross": true})),
        ToolCall::new("draw-scribbly-splines", json!({"keypoints": [[80, 620], [400, 560], [700, 700], [1100, 600]]})),
    ];
    let mut canvas = CanvasState::default();
    for (i, call) in calls.iter().enumerate() {
        let mut call = call.clone();
        call.seed = i as u64;
        match dispatch_tool_call(&call, &canvas) {
            Ok(done) => {
                let points: usize = done.polylines.iter().map(|l| l.points().len()).sum();
                println!("{:<22} {} -> {} strokes, {points} points", call.name, done.element_id, done.polylines.len());
                canvas = done.canvas;
            }
            Err(e) => println!("{:<22} rejected: {e}", call.name),
        }
    }
    std::fs::write(out.join("gallery.svg"), export_svg(&canvas))?;
    std::fs::write(out.join("gallery.pen"), export_pen_program(&canvas))?;
    println!("wrote {}", out.join("gallery.svg").display());
    Ok(())
}

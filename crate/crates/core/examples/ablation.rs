//! Draws two subjects under each vocabulary mode with scripted replies and
//! writes the SVGs plus an HTML contact sheet.
//!
//! cargo run -p codraw --example ablation [OUT_DIR]

use codraw::agent::{demo_vocabulary, Backend, LibraryMode};
use codraw::batch::{ablation, BatchError, IllustrateOptions, ScriptSet};

const SCRIPTS: &str = r#"{
  "none": [
    {"text": "A lollipop shape.", "tool_calls": [
      {"name": "draw-circles", "args": {"circles": [{"center": [600, 300], "radius": 90}]}},
      {"name": "draw-segments", "args": {"segments": [{"start": [600, 395], "end": [600, 650]}], "attach_to": "e1"}}]},
    {"text": "That is complete.", "tool_calls": []}],
  "images": [
    {"text": "Following the example picture.", "tool_calls": [
      {"name": "draw-scribbles", "args": {"polygon": [[500, 200], [700, 200], [720, 400], [480, 400]], "density": 1.5}},
      {"name": "draw-path", "args": {"keypoints": [[600, 405], [600, 650]], "attach_to": "e1"}}]},
    {"text": "Complete.", "tool_calls": []}],
  "images+methods": [
    {"text": "Step by step: canopy, trunk, ground.", "tool_calls": [
      {"name": "draw-scribbly-splines", "args": {"keypoints": [[480, 380], [470, 250], [600, 180], [730, 250], [720, 380], [480, 380]]}},
      {"name": "draw-path", "args": {"keypoints": [[580, 385], [575, 600]], "attach_to": "e1"}},
      {"name": "draw-path", "args": {"keypoints": [[620, 385], [625, 600]], "attach_to": "e1"}},
      {"name": "draw-hatching", "args": {"polygon": [[400, 680], [800, 680], [800, 720], [400, 720]], "density": 6}}]},
    {"text": "The drawing is complete.", "tool_calls": []}]
}"#;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let out = std::env::args().nth(1).map(Into::into).unwrap_or_else(|| std::env::temp_dir().join("codraw-ablation"));
    let scripts = ScriptSet::from_json(SCRIPTS)?;
    let mut backend_for = |subject: &str, mode: LibraryMode| -> Result<Box<dyn Backend>, BatchError> {
        let b = scripts.backend_for(subject, mode).ok_or_else(|| BatchError::Usage(format!("no script for {mode}")))?;
        Ok(Box::new(b))
    };
    let mut base = IllustrateOptions::new("");
    base.seed = 3;
    let subjects = ["tree".to_string(), "flower".to_string()];
    for run in ablation(&subjects, &demo_vocabulary(), &base, &out, &mut backend_for)? {
        println!("{:<8} {:<15} {} elements -> {}", run.subject, run.mode.to_string(), run.elements, run.svg_file);
    }
    println!("contact sheet: {}", out.join("contact_sheet.html").display());
    Ok(())
}

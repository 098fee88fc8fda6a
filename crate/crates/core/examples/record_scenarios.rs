//! Runs every scripted scenario under `scenarios/` and records its transcript
//! and golden SVG.
//!
//! cargo run -p codraw --example record_scenarios [SCENARIO_DIR...]

use std::path::PathBuf;

use codraw::batch::Scenario;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut dirs: Vec<PathBuf> = std::env::args().skip(1).map(PathBuf::from).collect();
    if dirs.is_empty() {
        let root = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../scenarios");
        for entry in std::fs::read_dir(root)? {
            let path = entry?.path();
            if path.join("scenario.json").exists() {
                dirs.push(path);
            }
        }
        dirs.sort();
    }
    for dir in dirs {
        let scenario = Scenario::load(&dir)?;
        let result = scenario.record()?;
        println!("{}: {} turns, {} elements, completed: {}", dir.display(), result.turns.len(), result.session.canvas().elements.len(), result.completed);
        for turn in &result.turns {
            for f in &turn.failures {
                println!("  turn {} call {} ({}) failed: {}", turn.turn, f.index, f.name, f.error);
            }
        }
        for e in &result.session.canvas().elements {
            let b = e.bbox();
            println!("  {} {:?} [{:.0} {:.0} {:.0} {:.0}]", e.id, e.label.as_deref().unwrap_or(""), b.min_x, b.min_y, b.max_x, b.max_y);
        }
    }
    Ok(())
}

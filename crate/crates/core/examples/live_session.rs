//! Illustrates a prompt with a real chat-completions model.
//!
//! CODRAW_LLM_URL=https://api.example.com/v1/chat/completions \
//! CODRAW_LLM_MODEL=some-model CODRAW_LLM_API_KEY=... \
//! cargo run -p codraw --example live_session -- "a lighthouse on a cliff" [OUT_DIR]

use codraw::agent::{demo_vocabulary, ContextLibrary, LibraryMode, LiveBackend, LiveConfig};
use codraw::batch::{illustrate, write_artifacts, IllustrateOptions};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut args = std::env::args().skip(1);
    let prompt = args.next().unwrap_or_else(|| "Draw a lighthouse on a cliff.".into());
    let out = args.next().map(Into::into).unwrap_or_else(|| std::env::temp_dir().join("codraw-live"));
    let config = match LiveConfig::from_env(None) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("{e}\nset CODRAW_LLM_URL, CODRAW_LLM_MODEL and CODRAW_LLM_API_KEY to run this example");
            std::process::exit(2);
        }
    };
    let mut backend = LiveBackend::new(config)?;
    let mut opts = IllustrateOptions::new(prompt);
    opts.library = ContextLibrary::new(demo_vocabulary(), LibraryMode::ImagesAndMethods);
    let result = illustrate(&opts, &mut backend)?;
    for turn in &result.turns {
        println!("turn {}: {}", turn.turn, turn.reply.text.trim());
        for f in &turn.failures {
            println!("  {} failed: {}", f.name, f.error);
        }
    }
    write_artifacts(&result.session, &out)?;
    println!("{} elements, finished: {}, artifacts in {}", result.session.canvas().elements.len(), result.completed, out.display());
    Ok(())
}

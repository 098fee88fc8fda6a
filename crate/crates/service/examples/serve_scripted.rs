//! Serves the REST and WebSocket API with the hare-and-turtle script as the
//! default backend, so a browser client can be tried without a model.
//!
//! cargo run -p codraw-service --example serve_scripted [BIND]
//!
//! curl -X POST localhost:8080/sessions
//! curl -X POST localhost:8080/sessions/s0001/message -d '{"text":"Draw the fable."}'
//! curl localhost:8080/sessions/s0001/svg

use codraw::agent::BackendSpec;
use codraw_service::{serve, ServiceConfig};

#[tokio::main]
async fn main() -> Result<(), Box<dyn std::error::Error>> {
    let script = concat!(env!("CARGO_MANIFEST_DIR"), "/../../scenarios/hare_and_turtle/script.json");
    let mut config = ServiceConfig {
        default_backend: BackendSpec::Scripted { steps: vec![], file: Some(script.into()), latency_ms: 250 },
        ..ServiceConfig::default()
    };
    if let Some(bind) = std::env::args().nth(1) {
        config.bind = bind.parse()?;
    }
    println!("serving on http://{}", config.bind);
    serve(config).await?;
    Ok(())
}

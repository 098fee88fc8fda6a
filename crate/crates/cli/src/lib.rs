//! The `codraw` command line.
//!
//! Exit status is 0 when a command succeeds (or every assertion passes), 1
//! when it runs but fails, and 2 for usage errors.

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use codraw::agent::{
    demo_vocabulary, replay, rerun, Backend, BackendSpec, ContextLibrary, LibraryMode, SessionTranscript,
    CONTINUE_PROMPT, CONTINUE_PROMPT_ALT,
};
use codraw::batch::{self, BatchError, IllustrateOptions, ScriptSet, DEFAULT_COMPLETION_PHRASE, DEFAULT_MAX_TURNS};
use codraw::canvas::{export_pen_program, export_svg, CanvasState};
use codraw::verify::verify;

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "codraw", version, about = "Collaborative drawing agent, headless")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Draw a prompt or story until the agent says it is done.
    Illustrate(IllustrateArgs),
    /// Draw each subject once per vocabulary mode and build a contact sheet.
    Ablation(AblationArgs),
    /// Check geometric assertions against a canvas or transcript.
    Verify {
        /// `canvas.json` or `transcript.json`.
        canvas: PathBuf,
        /// One assertion per line, e.g. `collinear e1..e3 tol=5`.
        assertions: PathBuf,
    },
    /// Rebuild the drawing of a transcript.
    Replay {
        transcript: PathBuf,
        /// Where to write the SVG; stdout when absent.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Compare the result byte for byte with this SVG.
        #[arg(long)]
        expect: Option<PathBuf>,
        /// Re-execute the calls without checking them against the record.
        #[arg(long)]
        rerun: bool,
    },
    /// Convert a canvas or transcript to SVG or a pen program.
    Export {
        canvas: PathBuf,
        #[arg(long, value_enum)]
        format: ExportFormat,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the HTTP/WebSocket session service.
    Serve {
        /// Overrides CODRAW_BIND.
        #[arg(long)]
        bind: Option<std::net::SocketAddr>,
        /// Overrides CODRAW_DATA_DIR.
        #[arg(long)]
        data_dir: Option<PathBuf>,
        /// Overrides CODRAW_BACKEND.
        #[arg(long)]
        backend: Option<String>,
        #[arg(long)]
        model: Option<String>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ExportFormat {
    Svg,
    Pen,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Continuation {
    /// "What will you draw next?"
    Next,
    /// "please continue the drawing"
    Continue,
}

#[derive(Debug, Args)]
pub struct RunArgs {
    /// `scripted:FILE` or `live`.
    #[arg(long)]
    pub backend: String,
    /// Model name for the live backend.
    #[arg(long)]
    pub model: Option<String>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long, default_value_t = DEFAULT_MAX_TURNS)]
    pub max_turns: usize,
    #[arg(long, value_enum, default_value_t = Continuation::Next)]
    pub continuation: Continuation,
    #[arg(long, default_value = DEFAULT_COMPLETION_PHRASE)]
    pub completion_phrase: String,
}

#[derive(Debug, Args)]
pub struct IllustrateArgs {
    /// What to draw. Give this or --story.
    #[arg(conflicts_with = "story", required_unless_present = "story")]
    pub prompt: Option<String>,
    /// A text file whose contents become the prompt.
    #[arg(long)]
    pub story: Option<PathBuf>,
    /// `none`, `images` or `images+methods`.
    #[arg(long, default_value = "images+methods", value_parser = parse_mode)]
    pub mode: LibraryMode,
    #[command(flatten)]
    pub run: RunArgs,
}

#[derive(Debug, Args)]
pub struct AblationArgs {
    /// Subjects, comma separated.
    #[arg(long, value_delimiter = ',')]
    pub subjects: Vec<String>,
    /// A file with one subject per line, added to --subjects.
    #[arg(long)]
    pub subjects_file: Option<PathBuf>,
    #[command(flatten)]
    pub run: RunArgs,
}

fn parse_mode(s: &str) -> Result<LibraryMode, String> {
    LibraryMode::parse(s).ok_or_else(|| format!("expected none, images or images+methods, got {s:?}"))
}

/// Why a command did not succeed.
#[derive(Debug)]
pub enum Failure {
    Usage(String),
    Failed(String),
}

impl Failure {
    pub fn exit_code(&self) -> i32 {
        match self {
            Failure::Usage(_) => EXIT_USAGE,
            Failure::Failed(_) => EXIT_FAILURE,
        }
    }
}

impl std::fmt::Display for Failure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Failure::Usage(m) | Failure::Failed(m) => f.write_str(m),
        }
    }
}

impl From<BatchError> for Failure {
    fn from(e: BatchError) -> Self {
        match e {
            BatchError::Usage(m) => Failure::Usage(m),
            other => Failure::Failed(other.to_string()),
        }
    }
}

fn read_input(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))
}

fn write_output(path: &Path, contents: &str) -> Result<(), Failure> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(|e| Failure::Failed(format!("{}: {e}", dir.display())))?;
    }
    std::fs::write(path, contents).map_err(|e| Failure::Failed(format!("{}: {e}", path.display())))
}

/// Loads a canvas from `canvas.json`, or replays a `transcript.json`.
pub fn load_canvas(path: &Path) -> Result<CanvasState, Failure> {
    let text = read_input(path)?;
    if let Ok(canvas) = CanvasState::from_json(&text) {
        return Ok(canvas);
    }
    let transcript = SessionTranscript::from_json(&text)
        .map_err(|e| Failure::Usage(format!("{}: neither a canvas nor a transcript: {e}", path.display())))?;
    replay(&transcript).map_err(|e| Failure::Failed(format!("{}: {e}", path.display())))
}

fn backend_spec(run: &RunArgs) -> Result<BackendSpec, Failure> {
    let mut spec = BackendSpec::parse(&run.backend).map_err(|e| Failure::Usage(e.to_string()))?;
    if let BackendSpec::Live { model } = &mut spec {
        model.clone_from(&run.model);
    }
    Ok(spec)
}

fn options(prompt: String, run: &RunArgs, library: ContextLibrary) -> IllustrateOptions {
    IllustrateOptions {
        prompt,
        seed: run.seed,
        library,
        max_turns: run.max_turns,
        continue_prompt: match run.continuation {
            Continuation::Next => CONTINUE_PROMPT,
            Continuation::Continue => CONTINUE_PROMPT_ALT,
        }
        .into(),
        completion_phrase: run.completion_phrase.clone(),
    }
}

fn illustrate(args: IllustrateArgs, out: &mut dyn Write, err: &mut dyn Write) -> Result<(), Failure> {
    let prompt = match (&args.prompt, &args.story) {
        (Some(p), _) => p.clone(),
        (None, Some(path)) => read_input(path)?.trim().to_string(),
        (None, None) => return Err(Failure::Usage("give a prompt or --story FILE".into())),
    };
    let spec = backend_spec(&args.run)?;
    let mut backend = spec.build().map_err(|e| Failure::Usage(e.to_string()))?;
    let entries = if args.mode == LibraryMode::None { Vec::new() } else { demo_vocabulary() };
    let opts = options(prompt, &args.run, ContextLibrary::new(entries, args.mode));
    let result = batch::illustrate(&opts, &mut backend)?;
    batch::write_artifacts(&result.session, &args.run.out)?;
    let failures: usize = result.turns.iter().map(|t| t.failures.len()).sum();
    let _ = writeln!(
        out,
        "{} turns, {} elements, {} failed calls, artifacts in {}",
        result.turns.len(),
        result.session.canvas().elements.len(),
        failures,
        args.run.out.display()
    );
    if result.cap_reached() {
        let _ = writeln!(err, "warning: stopped after {} turns without the agent finishing", args.run.max_turns);
    }
    Ok(())
}

fn ablation(args: AblationArgs, out: &mut dyn Write) -> Result<(), Failure> {
    let mut subjects: Vec<String> = args.subjects.iter().map(|s| s.trim().to_string()).filter(|s| !s.is_empty()).collect();
    if let Some(path) = &args.subjects_file {
        subjects.extend(read_input(path)?.lines().map(str::trim).filter(|l| !l.is_empty()).map(String::from));
    }
    if subjects.is_empty() {
        return Err(Failure::Usage("ablation needs at least one subject (--subjects or --subjects-file)".into()));
    }
    let spec = backend_spec(&args.run)?;
    let scripts = match &spec {
        BackendSpec::Scripted { file: Some(path), .. } => Some(
            ScriptSet::from_json(&read_input(path)?).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?,
        ),
        _ => None,
    };
    let mut backend_for = |subject: &str, mode: LibraryMode| -> Result<Box<dyn Backend>, BatchError> {
        match &scripts {
            Some(set) => set
                .backend_for(subject, mode)
                .map(|b| Box::new(b) as Box<dyn Backend>)
                .ok_or_else(|| BatchError::Usage(format!("no script for {subject} in mode {mode}"))),
            None => spec.build().map_err(|e| BatchError::Usage(e.to_string())),
        }
    };
    let run = &args.run;
    let base = options(String::new(), run, ContextLibrary::default());
    let runs = batch::ablation(&subjects, &demo_vocabulary(), &base, &run.out, &mut backend_for)?;
    for r in &runs {
        let _ = writeln!(out, "{:<20} {:<15} {:>3} elements  {}", r.subject, r.mode.to_string(), r.elements, r.svg_file);
    }
    let _ = writeln!(out, "contact sheet: {}", run.out.join("contact_sheet.html").display());
    Ok(())
}

fn verify_cmd(canvas: &Path, assertions: &Path, out: &mut dyn Write) -> Result<(), Failure> {
    let canvas = load_canvas(canvas)?;
    let script = read_input(assertions)?;
    let report = verify(&canvas, &script).map_err(|e| Failure::Usage(format!("{}: {e}", assertions.display())))?;
    let _ = write!(out, "{report}");
    if report.passed() {
        Ok(())
    } else {
        Err(Failure::Failed(format!(
            "{} of {} assertions failed",
            report.results.iter().filter(|r| !r.passed).count(),
            report.results.len()
        )))
    }
}

fn replay_cmd(
    path: &Path,
    out_path: Option<&Path>,
    expect: Option<&Path>,
    rerun_only: bool,
    out: &mut dyn Write,
) -> Result<(), Failure> {
    let transcript = SessionTranscript::from_json(&read_input(path)?)
        .map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?;
    let canvas = if rerun_only {
        rerun(&transcript)
    } else {
        replay(&transcript).map_err(|e| Failure::Failed(format!("{}: {e}", path.display())))?
    };
    let svg = export_svg(&canvas);
    match out_path {
        Some(p) => write_output(p, &svg)?,
        None if expect.is_none() => {
            let _ = out.write_all(svg.as_bytes());
        }
        None => {}
    }
    if let Some(expected) = expect {
        if read_input(expected)? != svg {
            return Err(Failure::Failed(format!("replayed SVG differs from {}", expected.display())));
        }
        let _ = writeln!(out, "{} revisions, matches {}", canvas.revision, expected.display());
    }
    Ok(())
}

fn export_cmd(path: &Path, format: ExportFormat, out_path: Option<&Path>, out: &mut dyn Write) -> Result<(), Failure> {
    let canvas = load_canvas(path)?;
    let text = match format {
        ExportFormat::Svg => export_svg(&canvas),
        ExportFormat::Pen => export_pen_program(&canvas) + "\n",
    };
    match out_path {
        Some(p) => write_output(p, &text),
        None => {
            let _ = out.write_all(text.as_bytes());
            Ok(())
        }
    }
}

fn serve(
    bind: Option<std::net::SocketAddr>,
    data_dir: Option<PathBuf>,
    backend: Option<String>,
    model: Option<String>,
) -> Result<(), Failure> {
    let mut config = codraw_service::ServiceConfig::from_env().map_err(Failure::Usage)?;
    if let Some(bind) = bind {
        config.bind = bind;
    }
    if data_dir.is_some() {
        config.data_dir = data_dir;
    }
    if let Some(b) = backend {
        config.default_backend = BackendSpec::parse(&b).map_err(|e| Failure::Usage(e.to_string()))?;
    }
    if let BackendSpec::Live { model: m } = &mut config.default_backend {
        if model.is_some() {
            *m = model;
        }
    }
    let _ = tracing_subscriber::fmt().with_writer(std::io::stderr).try_init();
    let runtime = tokio::runtime::Runtime::new().map_err(|e| Failure::Failed(e.to_string()))?;
    runtime.block_on(codraw_service::serve(config)).map_err(|e| Failure::Failed(e.to_string()))
}

/// Runs one parsed command.
pub fn execute(cli: Cli, out: &mut dyn Write, err: &mut dyn Write) -> Result<(), Failure> {
    match cli.command {
        Command::Illustrate(args) => illustrate(args, out, err),
        Command::Ablation(args) => ablation(args, out),
        Command::Verify { canvas, assertions } => verify_cmd(&canvas, &assertions, out),
        Command::Replay { transcript, out: out_path, expect, rerun } => {
            replay_cmd(&transcript, out_path.as_deref(), expect.as_deref(), rerun, out)
        }
        Command::Export { canvas, format, out: out_path } => export_cmd(&canvas, format, out_path.as_deref(), out),
        Command::Serve { bind, data_dir, backend, model } => serve(bind, data_dir, backend, model),
    }
}

/// Parses `args` (including the program name) and runs the command,
/// returning the exit status.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = write!(err, "{}", e.render());
            return e.exit_code();
        }
    };
    match execute(cli, out, err) {
        Ok(()) => EXIT_OK,
        Err(failure) => {
            let _ = writeln!(err, "error: {failure}");
            failure.exit_code()
        }
    }
}

//! Headless runs: illustrate a prompt until the agent is done, and compare
//! vocabulary modes side by side.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use serde::Deserialize;

use crate::agent::{
    Backend, ContextLibrary, HumanInput, LibraryMode, ScriptStep, ScriptedBackend, Session, SessionConfig,
    TurnError, TurnRecord, VocabularyEntry, CONTINUE_PROMPT,
};
use crate::canvas::{export_pen_program, export_svg};

pub const DEFAULT_MAX_TURNS: usize = 12;
pub const DEFAULT_COMPLETION_PHRASE: &str = "complete";

#[derive(Debug, thiserror::Error)]
pub enum BatchError {
    #[error(transparent)]
    Turn(#[from] TurnError),
    #[error(transparent)]
    Context(#[from] crate::agent::ContextError),
    #[error("{0}")]
    Usage(String),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
}

fn write(path: &Path, contents: impl AsRef<[u8]>) -> Result<(), BatchError> {
    std::fs::write(path, contents).map_err(|source| BatchError::Io { path: path.to_path_buf(), source })
}

fn create_dir(path: &Path) -> Result<(), BatchError> {
    std::fs::create_dir_all(path).map_err(|source| BatchError::Io { path: path.to_path_buf(), source })
}

#[derive(Debug, Clone)]
pub struct IllustrateOptions {
    pub prompt: String,
    pub seed: u64,
    pub library: ContextLibrary,
    pub max_turns: usize,
    pub continue_prompt: String,
    /// A reply without tool calls whose text contains this phrase
    /// (case-insensitive) ends the loop.
    pub completion_phrase: String,
}

impl IllustrateOptions {
    pub fn new(prompt: impl Into<String>) -> Self {
        Self {
            prompt: prompt.into(),
            seed: 0,
            library: ContextLibrary::new(vec![], LibraryMode::None),
            max_turns: DEFAULT_MAX_TURNS,
            continue_prompt: CONTINUE_PROMPT.into(),
            completion_phrase: DEFAULT_COMPLETION_PHRASE.into(),
        }
    }
}

#[derive(Debug, Clone)]
pub struct Illustration {
    pub session: Session,
    pub turns: Vec<TurnRecord>,
    /// The agent said it was done before the turn cap.
    pub completed: bool,
}

impl Illustration {
    pub fn cap_reached(&self) -> bool {
        !self.completed
    }
}

fn is_completion(record: &TurnRecord, phrase: &str) -> bool {
    record.reply.tool_calls.is_empty() && record.reply.text.to_lowercase().contains(&phrase.to_lowercase())
}

/// Sends the prompt, then the continuation prompt, until the agent signals
/// completion or `max_turns` turns have run.
pub fn illustrate(opts: &IllustrateOptions, backend: &mut dyn Backend) -> Result<Illustration, BatchError> {
    let config = SessionConfig { seed: opts.seed, library: opts.library.clone(), ..Default::default() };
    let mut session = Session::new(format!("illustrate-{}", opts.seed), &config)?;
    let mut turns = Vec::new();
    let mut completed = false;
    for i in 0..opts.max_turns {
        let text = if i == 0 { &opts.prompt } else { &opts.continue_prompt };
        let record = session.run_turn(HumanInput::text(text.clone()), backend)?;
        let done = is_completion(&record, &opts.completion_phrase);
        tracing::info!(turn = i, calls = record.reply.tool_calls.len(), "turn finished");
        turns.push(record);
        if done {
            completed = true;
            break;
        }
    }
    Ok(Illustration { session, turns, completed })
}

/// Writes `drawing.svg`, `drawing.pen`, `transcript.json` and `canvas.json`.
pub fn write_artifacts(session: &Session, out_dir: &Path) -> Result<(), BatchError> {
    create_dir(out_dir)?;
    write(&out_dir.join("drawing.svg"), export_svg(session.canvas()))?;
    write(&out_dir.join("drawing.pen"), export_pen_program(session.canvas()))?;
    write(&out_dir.join("transcript.json"), session.transcript().to_json())?;
    write(&out_dir.join("canvas.json"), session.canvas().to_json())?;
    Ok(())
}

/// Scripted replies for ablation runs: one script shared by every run, or
/// scripts keyed by `"subject/mode"`, `"subject"` or `"mode"` (most specific
/// first), with mode spelled `none`, `images` or `images+methods`.
#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum ScriptSet {
    Shared(Vec<ScriptStep>),
    Keyed(BTreeMap<String, Vec<ScriptStep>>),
}

impl ScriptSet {
    pub fn from_json(text: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(text)
    }

    pub fn backend_for(&self, subject: &str, mode: LibraryMode) -> Option<ScriptedBackend> {
        match self {
            ScriptSet::Shared(steps) => Some(ScriptedBackend::new(steps.clone())),
            ScriptSet::Keyed(map) => [format!("{subject}/{mode}"), subject.to_string(), mode.to_string()]
                .iter()
                .find_map(|k| map.get(k))
                .map(|steps| ScriptedBackend::new(steps.clone())),
        }
    }
}

#[derive(Debug, Clone)]
pub struct AblationRun {
    pub subject: String,
    pub mode: LibraryMode,
    pub svg_file: String,
    pub completed: bool,
    pub elements: usize,
}

fn file_stem(subject: &str) -> String {
    subject.chars().map(|c| if c.is_ascii_alphanumeric() { c.to_ascii_lowercase() } else { '-' }).collect()
}

fn mode_slug(mode: LibraryMode) -> &'static str {
    match mode {
        LibraryMode::None => "none",
        LibraryMode::ImagesOnly => "images",
        LibraryMode::ImagesAndMethods => "images-methods",
    }
}

/// Illustrates every subject under each vocabulary mode with the same seed,
/// writing one SVG per run and `contact_sheet.html`. Each run uses `base`
/// with the prompt and library replaced.
pub fn ablation(
    subjects: &[String],
    entries: &[VocabularyEntry],
    base: &IllustrateOptions,
    out_dir: &Path,
    backend_for: &mut dyn FnMut(&str, LibraryMode) -> Result<Box<dyn Backend>, BatchError>,
) -> Result<Vec<AblationRun>, BatchError> {
    if subjects.is_empty() {
        return Err(BatchError::Usage("ablation needs at least one subject".into()));
    }
    create_dir(out_dir)?;
    let mut runs = Vec::new();
    for subject in subjects {
        for mode in LibraryMode::ALL {
            let mut opts = base.clone();
            opts.prompt = format!("Draw a {subject}.");
            opts.library = ContextLibrary::new(entries.to_vec(), mode);
            let mut backend = backend_for(subject, mode)?;
            let result = illustrate(&opts, &mut backend)?;
            let svg_file = format!("{}-{}.svg", file_stem(subject), mode_slug(mode));
            write(&out_dir.join(&svg_file), export_svg(result.session.canvas()))?;
            runs.push(AblationRun {
                subject: subject.clone(),
                mode,
                svg_file,
                completed: result.completed,
                elements: result.session.canvas().elements.len(),
            });
        }
    }
    write(&out_dir.join("contact_sheet.html"), contact_sheet(&runs))?;
    Ok(runs)
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;")
}

/// A table with one row per subject and one column per mode.
pub fn contact_sheet(runs: &[AblationRun]) -> String {
    let mut html = String::from(
        "<!DOCTYPE html>\n<html>\n<head>\n<meta charset=\"utf-8\">\n<title>Vocabulary ablation</title>\n\
         <style>table{border-collapse:collapse}td,th{border:1px solid #ccc;padding:6px;text-align:center}\
         img{width:360px;height:270px}</style>\n</head>\n<body>\n<table>\n<tr><th>subject</th>",
    );
    for mode in LibraryMode::ALL {
        let _ = write!(html, "<th>{mode}</th>");
    }
    html.push_str("</tr>\n");
    let mut subjects: Vec<&str> = Vec::new();
    for r in runs {
        if !subjects.contains(&r.subject.as_str()) {
            subjects.push(&r.subject);
        }
    }
    for subject in subjects {
        let _ = write!(html, "<tr><td>{}</td>", escape(subject));
        for mode in LibraryMode::ALL {
            match runs.iter().find(|r| r.subject == subject && r.mode == mode) {
                Some(r) => {
                    let _ = write!(
                        html,
                        "<td><img src=\"{}\" alt=\"{} ({})\"><br>{} elements{}</td>",
                        escape(&r.svg_file),
                        escape(subject),
                        mode,
                        r.elements,
                        if r.completed { "" } else { ", turn cap reached" }
                    );
                }
                None => html.push_str("<td></td>"),
            }
        }
        html.push_str("</tr>\n");
    }
    html.push_str("</table>\n</body>\n</html>\n");
    html
}

/// `scenario.json` in a scenario directory.
#[derive(Debug, Clone, PartialEq, Deserialize)]
pub struct ScenarioManifest {
    pub prompt: String,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_max_turns")]
    pub max_turns: usize,
}

fn default_max_turns() -> usize {
    DEFAULT_MAX_TURNS
}

/// A scripted illustration shipped as a directory: `scenario.json`,
/// `script.json` and, once recorded, `transcript.json` and `drawing.svg`.
#[derive(Debug, Clone)]
pub struct Scenario {
    pub dir: PathBuf,
    pub manifest: ScenarioManifest,
    pub script: Vec<ScriptStep>,
}

fn read(path: &Path) -> Result<String, BatchError> {
    std::fs::read_to_string(path).map_err(|source| BatchError::Io { path: path.to_path_buf(), source })
}

impl Scenario {
    pub fn load(dir: &Path) -> Result<Self, BatchError> {
        let parse_err = |path: &Path, e: serde_json::Error| BatchError::Usage(format!("{}: {e}", path.display()));
        let manifest_path = dir.join("scenario.json");
        let manifest = serde_json::from_str(&read(&manifest_path)?).map_err(|e| parse_err(&manifest_path, e))?;
        let script_path = dir.join("script.json");
        let script = serde_json::from_str(&read(&script_path)?).map_err(|e| parse_err(&script_path, e))?;
        Ok(Self { dir: dir.to_path_buf(), manifest, script })
    }

    pub fn options(&self) -> IllustrateOptions {
        let mut opts = IllustrateOptions::new(self.manifest.prompt.clone());
        opts.seed = self.manifest.seed;
        opts.max_turns = self.manifest.max_turns;
        opts
    }

    pub fn run(&self) -> Result<Illustration, BatchError> {
        illustrate(&self.options(), &mut ScriptedBackend::new(self.script.clone()))
    }

    pub fn transcript_path(&self) -> PathBuf {
        self.dir.join("transcript.json")
    }

    pub fn golden_svg_path(&self) -> PathBuf {
        self.dir.join("drawing.svg")
    }

    pub fn assertions_path(&self) -> PathBuf {
        self.dir.join("assertions.txt")
    }

    /// Runs the script and stores the transcript and golden SVG.
    pub fn record(&self) -> Result<Illustration, BatchError> {
        let result = self.run()?;
        write(&self.transcript_path(), result.session.transcript().to_json())?;
        write(&self.golden_svg_path(), export_svg(result.session.canvas()))?;
        Ok(result)
    }
}

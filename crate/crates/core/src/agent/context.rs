//! In-context drawing vocabulary: example sketches, optionally paired with a
//! short method describing how to draw them.

use serde::{Deserialize, Serialize};
use serde_json::Value;

use super::backend::{Backend, BackendError};
use super::message::{ImageData, Message, Part, Role};

/// Prompt used to bootstrap a method from a reference sketch.
pub const BOOTSTRAP_PROMPT: &str =
    "Observe this drawing. Write a simple, flexible and versatile method to roughly draw it.";
/// Variant asking for plain step-by-step instructions.
pub const STEP_BY_STEP_PROMPT: &str =
    "Observe this drawing. Write a simple step-by-step method to draw it roughly. (no text formatting in the answers).";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VocabularyEntry {
    pub subject: String,
    pub image: ImageData,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub method: Option<String>,
}

/// Which parts of the vocabulary are shown to the model.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LibraryMode {
    None,
    ImagesOnly,
    #[default]
    ImagesAndMethods,
}

impl LibraryMode {
    pub const ALL: [LibraryMode; 3] = [LibraryMode::None, LibraryMode::ImagesOnly, LibraryMode::ImagesAndMethods];

    pub fn as_str(self) -> &'static str {
        match self {
            LibraryMode::None => "none",
            LibraryMode::ImagesOnly => "images",
            LibraryMode::ImagesAndMethods => "images+methods",
        }
    }

    /// Accepts the short command-line spellings as well as the serialized names.
    pub fn parse(s: &str) -> Option<LibraryMode> {
        match s {
            "none" => Some(LibraryMode::None),
            "images" | "images_only" => Some(LibraryMode::ImagesOnly),
            "images+methods" | "images_and_methods" => Some(LibraryMode::ImagesAndMethods),
            _ => None,
        }
    }
}

impl std::fmt::Display for LibraryMode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ContextLibrary {
    pub entries: Vec<VocabularyEntry>,
    pub mode: LibraryMode,
}

impl ContextLibrary {
    pub fn new(entries: Vec<VocabularyEntry>, mode: LibraryMode) -> Self {
        Self { entries, mode }
    }

    pub fn with_mode(&self, mode: LibraryMode) -> Self {
        Self { entries: self.entries.clone(), mode }
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ContextError {
    #[error("no drawing method for {}", subject.as_deref().unwrap_or("an empty library"))]
    MissingMethod { subject: Option<String> },
    #[error("empty image for {0}")]
    InvalidImage(String),
}

/// The messages that introduce the vocabulary, one per entry, in library
/// order.
pub fn assemble_context(library: &ContextLibrary) -> Result<Vec<Message>, ContextError> {
    if library.mode == LibraryMode::None {
        return Ok(Vec::new());
    }
    if library.mode == LibraryMode::ImagesAndMethods && library.entries.is_empty() {
        return Err(ContextError::MissingMethod { subject: None });
    }
    library
        .entries
        .iter()
        .map(|e| {
            if e.image.data.is_empty() {
                return Err(ContextError::InvalidImage(e.subject.clone()));
            }
            let mut parts = vec![Part::Image { image: e.image.clone() }, Part::text(format!("{} example.", e.subject))];
            if library.mode == LibraryMode::ImagesAndMethods {
                let method = e
                    .method
                    .as_deref()
                    .filter(|m| !m.trim().is_empty())
                    .ok_or_else(|| ContextError::MissingMethod { subject: Some(e.subject.clone()) })?;
                parts.push(Part::text("Method to draw it:"));
                parts.push(Part::text(method));
            }
            Ok(Message::new(Role::User, parts))
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum BootstrapError {
    #[error("image is empty")]
    InvalidImage,
    #[error(transparent)]
    Backend(#[from] BackendError),
}

/// Asks the backend to describe how to draw `image`, returning the text to
/// store as the entry's method.
pub fn bootstrap_method_text(image: &ImageData, backend: &mut dyn Backend, prompt: &str) -> Result<String, BootstrapError> {
    if image.data.is_empty() {
        return Err(BootstrapError::InvalidImage);
    }
    let history = [Message::new(Role::User, vec![Part::Image { image: image.clone() }, Part::text(prompt)])];
    let reply = backend.generate(&history, &Value::Array(Vec::new()))?;
    let text = reply.text.trim();
    if text.is_empty() {
        return Err(BackendError::EmptyReply.into());
    }
    Ok(text.to_string())
}

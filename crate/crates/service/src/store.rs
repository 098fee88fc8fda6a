//! Plain-file persistence: one directory per session holding
//! `transcript.json`, `snapshots/NNN.svg` and `images/<sha256>.png`.

use std::io;
use std::path::{Path, PathBuf};

use codraw::agent::{ImageData, SessionTranscript};

#[derive(Debug, Clone)]
pub struct Store {
    root: Option<PathBuf>,
}

pub fn snapshot_name(revision: u64) -> String {
    format!("{revision:03}.svg")
}

impl Store {
    /// Keeps everything in memory.
    pub fn memory() -> Self {
        Self { root: None }
    }

    pub fn at(root: impl Into<PathBuf>) -> Self {
        Self { root: Some(root.into()) }
    }

    pub fn root(&self) -> Option<&Path> {
        self.root.as_deref()
    }

    pub fn session_dir(&self, id: &str) -> Option<PathBuf> {
        self.root.as_ref().map(|r| r.join(id))
    }

    /// Whether a directory for `id` already exists on disk.
    pub fn exists(&self, id: &str) -> bool {
        self.session_dir(id).is_some_and(|d| d.exists())
    }

    /// Writes the transcript, the snapshots for `revisions` (paired with
    /// their SVG text) and any new images.
    pub fn save(
        &self,
        transcript: &SessionTranscript,
        snapshots: &[(u64, &str)],
        images: &[&ImageData],
    ) -> io::Result<()> {
        let Some(dir) = self.session_dir(&transcript.id) else {
            return Ok(());
        };
        std::fs::create_dir_all(dir.join("snapshots"))?;
        for (revision, svg) in snapshots {
            std::fs::write(dir.join("snapshots").join(snapshot_name(*revision)), svg)?;
        }
        if !images.is_empty() {
            std::fs::create_dir_all(dir.join("images"))?;
            for image in images {
                let path = dir.join("images").join(format!("{}.png", image.sha256_hex()));
                if !path.exists() {
                    std::fs::write(path, &image.data)?;
                }
            }
        }
        // Written last so a transcript on disk never refers to a missing snapshot.
        let tmp = dir.join("transcript.json.tmp");
        std::fs::write(&tmp, transcript.to_json())?;
        std::fs::rename(tmp, dir.join("transcript.json"))
    }
}

//! Project discovery: walk the target root, keep the Python sources that
//! are worth parsing, and record why everything else was skipped.

use crate::config::AnalyzerConfig;
use crate::glob::glob_match;
use serde::{Deserialize, Serialize};
use std::path::{Path, PathBuf};
use thiserror::Error;
use walkdir::WalkDir;

pub const SOURCE_EXTENSION: &str = "py";
pub const IGNORE_FILE: &str = ".agentlintignore";

#[derive(Debug, Error)]
pub enum IngestError {
    #[error("project root not found or not a directory: {0}")]
    RootNotFound(PathBuf),
    #[error("no analyzable source files under {0}")]
    NoSourceFiles(PathBuf),
    #[error("walking {path}: {source}")]
    Walk {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

/// Why a file was left out of the snapshot.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub enum SkipReason {
    NonSource,
    Ignored,
    TooLarge,
    Undecodable,
    Unreadable,
}

impl SkipReason {
    pub fn as_str(&self) -> &'static str {
        match self {
            SkipReason::NonSource => "non-source",
            SkipReason::Ignored => "ignored",
            SkipReason::TooLarge => "too-large",
            SkipReason::Undecodable => "undecodable",
            SkipReason::Unreadable => "unreadable",
        }
    }
}

/// One retained source file, decoded to UTF-8, with a line index for
/// byte-offset to line-number lookups.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SourceFile {
    /// Project-relative path with `/` separators.
    pub path: String,
    pub text: String,
    /// Byte offset of the start of each line; `line_starts[0] == 0`.
    line_starts: Vec<usize>,
}

impl SourceFile {
    pub fn new(path: impl Into<String>, text: impl Into<String>) -> Self {
        let text = text.into();
        let mut line_starts = vec![0];
        for (i, b) in text.bytes().enumerate() {
            if b == b'\n' {
                line_starts.push(i + 1);
            }
        }
        SourceFile {
            path: path.into(),
            text,
            line_starts,
        }
    }

    /// 1-based line number containing the byte offset.
    pub fn line_of(&self, offset: usize) -> u32 {
        match self.line_starts.binary_search(&offset) {
            Ok(i) => i as u32 + 1,
            Err(i) => i as u32,
        }
    }

    /// 1-based (line, column) of the byte offset.
    pub fn line_col(&self, offset: usize) -> (u32, u32) {
        let line = self.line_of(offset);
        let start = self.line_starts[(line - 1) as usize];
        (line, (offset - start) as u32 + 1)
    }

    pub fn line_count(&self) -> u32 {
        self.line_starts.len() as u32
    }
}

/// Immutable view of the analyzable project.
#[derive(Debug, Clone)]
pub struct ProjectSnapshot {
    pub root: PathBuf,
    /// Sorted by path, byte-lexicographic; all downstream document order
    /// derives from this.
    pub files: Vec<SourceFile>,
    pub skipped: Vec<(String, SkipReason)>,
    pub subject_language_tag: &'static str,
}

impl ProjectSnapshot {
    pub fn file(&self, path: &str) -> Option<&SourceFile> {
        self.files.iter().find(|f| f.path == path)
    }

    pub fn file_index(&self, path: &str) -> Option<usize> {
        self.files.iter().position(|f| f.path == path)
    }
}

/// Discovers the analyzable snapshot under `root`.
///
/// Retention rules: the subject-language extension, a size cap, not
/// excluded by directory defaults or ignore globs, and decodable UTF-8.
/// Symlinks are not followed.
pub fn discover_project(
    root: &Path,
    config: &AnalyzerConfig,
) -> Result<ProjectSnapshot, IngestError> {
    if !root.is_dir() {
        return Err(IngestError::RootNotFound(root.to_path_buf()));
    }

    let mut ignore_globs = config.ignore_globs.clone();
    let ignore_file = root.join(IGNORE_FILE);
    if let Ok(text) = std::fs::read_to_string(&ignore_file) {
        for line in text.lines() {
            let line = line.trim();
            if !line.is_empty() && !line.starts_with('#') {
                ignore_globs.push(line.to_string());
            }
        }
    }

    let mut files = Vec::new();
    let mut skipped = Vec::new();

    let walker = WalkDir::new(root)
        .follow_links(false)
        .sort_by_file_name()
        .into_iter()
        .filter_entry(|e| {
            if e.depth() == 0 || !e.file_type().is_dir() {
                return true;
            }
            let name = e.file_name().to_string_lossy();
            !is_excluded_dir(&name, &config.excluded_dirs)
        });

    for entry in walker {
        let entry = entry.map_err(|e| IngestError::Walk {
            path: e.path().map(Path::to_path_buf).unwrap_or_default(),
            source: e
                .into_io_error()
                .unwrap_or_else(|| std::io::Error::other("walk error")),
        })?;
        if !entry.file_type().is_file() {
            continue;
        }
        let rel = entry
            .path()
            .strip_prefix(root)
            .unwrap_or(entry.path())
            .to_string_lossy()
            .replace('\\', "/");

        if entry.path().extension().and_then(|e| e.to_str()) != Some(SOURCE_EXTENSION) {
            skipped.push((rel, SkipReason::NonSource));
            continue;
        }
        if ignore_globs.iter().any(|g| glob_match(g, &rel)) {
            skipped.push((rel, SkipReason::Ignored));
            continue;
        }
        match entry.metadata() {
            Ok(meta) if meta.len() > config.max_file_bytes => {
                skipped.push((rel, SkipReason::TooLarge));
                continue;
            }
            Ok(_) => {}
            Err(_) => {
                skipped.push((rel, SkipReason::Unreadable));
                continue;
            }
        }
        match std::fs::read(entry.path()) {
            Ok(bytes) => match String::from_utf8(bytes) {
                Ok(text) => {
                    if text.is_empty() {
                        skipped.push((rel, SkipReason::NonSource));
                    } else {
                        files.push(SourceFile::new(rel, text));
                    }
                }
                Err(_) => skipped.push((rel, SkipReason::Undecodable)),
            },
            Err(_) => skipped.push((rel, SkipReason::Unreadable)),
        }
    }

    files.sort_by(|a, b| a.path.as_bytes().cmp(b.path.as_bytes()));
    skipped.sort_by(|a, b| a.0.as_bytes().cmp(b.0.as_bytes()));

    if files.is_empty() {
        return Err(IngestError::NoSourceFiles(root.to_path_buf()));
    }

    Ok(ProjectSnapshot {
        root: root.to_path_buf(),
        files,
        skipped,
        subject_language_tag: "python",
    })
}

fn is_excluded_dir(name: &str, excluded: &[String]) -> bool {
    (name.starts_with('.') && name.len() > 1) || excluded.iter().any(|d| d == name)
}

/// Builds a snapshot directly from in-memory `(path, text)` pairs.
/// Used by tests and by callers that already hold sources.
pub fn snapshot_from_sources(
    root: impl Into<PathBuf>,
    sources: &[(&str, &str)],
) -> ProjectSnapshot {
    let mut files: Vec<SourceFile> = sources
        .iter()
        .filter(|(_, text)| !text.is_empty())
        .map(|(path, text)| SourceFile::new(*path, *text))
        .collect();
    files.sort_by(|a, b| a.path.as_bytes().cmp(b.path.as_bytes()));
    ProjectSnapshot {
        root: root.into(),
        files,
        skipped: Vec::new(),
        subject_language_tag: "python",
    }
}

//! Named datasets: the checksummed manifest, lookup in the data directories and
//! conversion of the original download formats.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::csv_io::{load_csv, CsvSchema};
use super::dataset::RichDataset;
use super::synthetic::{dog2_surrogate, generate_synthetic, SyntheticKind, SyntheticSpec};
use crate::error::{Error, Result};

/// Environment variable naming an extra data directory, searched first.
pub const DATA_DIR_ENV: &str = "EVIDAL_DATA_DIR";

/// Name of the rich-labelled dataset that falls back to a synthetic surrogate.
pub const DOG2: &str = "dog2";

const BUNDLED_MANIFEST: &str = include_str!("../../../../data/manifest.json");

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub datasets: Vec<ManifestEntry>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ManifestEntry {
    pub name: String,
    /// File name of the canonical CSV inside a data directory.
    pub file: String,
    /// SHA-256 of the canonical CSV; `None` when not pinned.
    pub sha256: Option<String>,
    pub source: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub homepage: Option<String>,
    /// Where the original file can be downloaded.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub url: Option<String>,
    /// Layout of the downloaded file.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub raw: Option<RawFormat>,
    pub rows: usize,
    pub features: usize,
    pub classes: usize,
    #[serde(default)]
    pub vendored: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Delimiter {
    Comma,
    Semicolon,
    Whitespace,
}

/// A column given by name (header required) or by position; negative positions
/// count from the end.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ColumnRef {
    Index(i64),
    Name(String),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RawFormat {
    pub delimiter: Delimiter,
    pub header: bool,
    pub label: ColumnRef,
    #[serde(default)]
    pub drop: Vec<ColumnRef>,
}

impl Manifest {
    /// The manifest shipped with the repository.
    pub fn bundled() -> Self {
        serde_json::from_str(BUNDLED_MANIFEST).expect("bundled manifest is valid")
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text =
            std::fs::read_to_string(path).map_err(|e| Error::io(path.display().to_string(), e))?;
        serde_json::from_str(&text).map_err(|e| Error::io(path.display().to_string(), e))
    }

    pub fn entry(&self, name: &str) -> Option<&ManifestEntry> {
        self.datasets.iter().find(|e| e.name == name)
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.datasets.iter().map(|e| e.name.as_str())
    }
}

/// Directory of the vendored datasets in the source tree.
pub fn bundled_data_dir() -> PathBuf {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../data");
    dir.canonicalize().unwrap_or(dir)
}

/// Search path: `$EVIDAL_DATA_DIR` (if set), then the vendored directory.
pub fn data_dirs() -> Vec<PathBuf> {
    let mut dirs = Vec::new();
    if let Some(dir) = std::env::var_os(DATA_DIR_ENV).filter(|d| !d.is_empty()) {
        dirs.push(PathBuf::from(dir));
    }
    dirs.push(bundled_data_dir());
    dirs
}

/// Directory where downloads are written: `$EVIDAL_DATA_DIR` if set, else the vendored one.
pub fn cache_dir() -> PathBuf {
    data_dirs()
        .into_iter()
        .next()
        .expect("at least one data directory")
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

pub fn sha256_file(path: &Path) -> Result<String> {
    let bytes = std::fs::read(path).map_err(|e| Error::io(path.display().to_string(), e))?;
    Ok(sha256_hex(&bytes))
}

/// Checks a file against the pinned hash of its entry (when pinned); returns the
/// actual hash.
pub fn verify(entry: &ManifestEntry, path: &Path) -> Result<String> {
    let actual = sha256_file(path)?;
    match &entry.sha256 {
        Some(expected) if !expected.eq_ignore_ascii_case(&actual) => Err(Error::Checksum {
            path: path.to_path_buf(),
            expected: expected.clone(),
            actual,
        }),
        _ => Ok(actual),
    }
}

/// First existing file of `entry` along [`data_dirs`].
pub fn locate(entry: &ManifestEntry) -> Option<PathBuf> {
    data_dirs()
        .into_iter()
        .map(|d| d.join(&entry.file))
        .find(|p| p.is_file())
}

/// Loads a dataset by name.
///
/// Manifest names resolve to verified CSV files. `dog2` falls back to its synthetic
/// surrogate when the original file is absent; the names of the synthetic
/// generators (e.g. `three_class_imprecise`) produce their default 200-point sample.
pub fn load_named(name: &str, manifest: &Manifest) -> Result<RichDataset> {
    if let Some(entry) = manifest.entry(name) {
        return match locate(entry) {
            Some(path) => {
                verify(entry, &path)?;
                Ok(load_csv(&path, &CsvSchema::default())?.with_name(name))
            }
            None if name == DOG2 => dog2_surrogate(0),
            None => Err(Error::DatasetNotFound(format!(
                "{name} (expected {} in {}; run `evidal fetch {name}`)",
                entry.file,
                data_dirs()
                    .iter()
                    .map(|d| d.display().to_string())
                    .collect::<Vec<_>>()
                    .join(" or ")
            ))),
        };
    }
    if let Ok(kind) = name.parse::<SyntheticKind>() {
        return generate_synthetic(&SyntheticSpec {
            kind,
            ..Default::default()
        });
    }
    Err(Error::DatasetNotFound(name.to_string()))
}

/// Whether `name` is backed by its real data (as opposed to a surrogate or nothing).
pub fn is_available(name: &str, manifest: &Manifest) -> bool {
    manifest.entry(name).and_then(locate).is_some()
}

/// Converts a downloaded file to the canonical CSV layout (`f0..fN,label`).
pub fn convert_raw(text: &str, format: &RawFormat) -> Result<String> {
    let syntax = |line: usize, message: String| Error::Parse {
        path: "download".into(),
        line,
        message,
    };
    let mut lines = text
        .lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty());
    let split = |line: &str| -> Vec<String> {
        match format.delimiter {
            Delimiter::Comma => line
                .split(',')
                .map(|s| s.trim().trim_matches('"').to_string())
                .collect(),
            Delimiter::Semicolon => line
                .split(';')
                .map(|s| s.trim().trim_matches('"').to_string())
                .collect(),
            Delimiter::Whitespace => line.split_whitespace().map(String::from).collect(),
        }
    };
    let header = if format.header {
        let (_, line) = lines.next().ok_or_else(|| syntax(1, "empty file".into()))?;
        Some(split(line))
    } else {
        None
    };
    let rows: Vec<(usize, Vec<String>)> = lines.map(|(i, l)| (i + 1, split(l))).collect();
    let width = rows
        .first()
        .map(|r| r.1.len())
        .ok_or_else(|| syntax(1, "no data rows".into()))?;
    let resolve = |c: &ColumnRef| -> Result<usize> {
        match c {
            ColumnRef::Index(i) if *i < 0 && i.unsigned_abs() as usize <= width => {
                Ok(width - i.unsigned_abs() as usize)
            }
            ColumnRef::Index(i) if *i >= 0 && (*i as usize) < width => Ok(*i as usize),
            ColumnRef::Name(n) => header
                .as_ref()
                .and_then(|h| h.iter().position(|x| x == n))
                .ok_or_else(|| syntax(1, format!("no column named `{n}`"))),
            ColumnRef::Index(i) => Err(syntax(1, format!("column {i} out of range"))),
        }
    };
    let label = resolve(&format.label)?;
    let dropped = format
        .drop
        .iter()
        .map(resolve)
        .collect::<Result<Vec<_>>>()?;
    let features: Vec<usize> = (0..width)
        .filter(|c| *c != label && !dropped.contains(c))
        .collect();

    let mut out = String::new();
    for (j, _) in features.iter().enumerate() {
        out.push_str(&format!("f{j},"));
    }
    out.push_str("label\n");
    for (line, row) in rows {
        if row.len() != width {
            return Err(syntax(
                line,
                format!("expected {width} fields, found {}", row.len()),
            ));
        }
        for &c in &features {
            out.push_str(&row[c]);
            out.push(',');
        }
        out.push_str(&row[label]);
        out.push('\n');
    }
    Ok(out)
}

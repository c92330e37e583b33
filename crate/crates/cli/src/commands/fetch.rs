use std::path::{Path, PathBuf};

use anyhow::{anyhow, bail, Context, Result};
use evidal_core::datasets::registry::{self, DOG2};
use evidal_core::datasets::{Manifest, ManifestEntry};

use crate::error::ValidationError;

#[derive(Clone, Debug, Default)]
pub struct FetchArgs {
    /// Datasets to fetch; all manifest entries when empty.
    pub names: Vec<String>,
    /// Target directory; defaults to the cache directory.
    pub dir: Option<PathBuf>,
    pub manifest: Option<PathBuf>,
}

/// What `fetch` did for one dataset.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum FetchOutcome {
    /// Present with a matching (or unpinned) checksum; nothing downloaded.
    Present {
        path: PathBuf,
        sha256: String,
    },
    Downloaded {
        path: PathBuf,
        sha256: String,
    },
    /// No public download; a surrogate is used instead.
    Surrogate,
}

pub fn run(args: FetchArgs) -> Result<()> {
    let manifest = match &args.manifest {
        Some(path) => Manifest::load(path)?,
        None => Manifest::bundled(),
    };
    let entries: Vec<&ManifestEntry> = if args.names.is_empty() {
        manifest.datasets.iter().collect()
    } else {
        args.names
            .iter()
            .map(|n| {
                manifest.entry(n).ok_or_else(|| {
                    let known: Vec<&str> = manifest.names().collect();
                    ValidationError(format!(
                        "unknown dataset `{n}`; known: {}",
                        known.join(", ")
                    ))
                })
            })
            .collect::<Result<_, _>>()?
    };
    let dir = args.dir.clone().unwrap_or_else(registry::cache_dir);

    let mut failures = 0;
    for entry in entries {
        match fetch_entry(entry, &dir) {
            Ok(FetchOutcome::Present { path, sha256 }) => {
                println!(
                    "{:<14} ok          {} sha256 {}{}",
                    entry.name,
                    path.display(),
                    sha256,
                    pin_note(entry)
                );
            }
            Ok(FetchOutcome::Downloaded { path, sha256 }) => {
                println!(
                    "{:<14} downloaded  {} sha256 {}{}",
                    entry.name,
                    path.display(),
                    sha256,
                    pin_note(entry)
                );
            }
            Ok(FetchOutcome::Surrogate) => {
                println!(
                    "{:<14} surrogate   no public download; the synthetic stand-in is used",
                    entry.name
                );
            }
            Err(e) => {
                failures += 1;
                println!("{:<14} FAILED      {e:#}", entry.name);
            }
        }
    }
    if failures > 0 {
        bail!("{failures} dataset(s) could not be fetched");
    }
    Ok(())
}

fn pin_note(entry: &ManifestEntry) -> &'static str {
    if entry.sha256.is_some() {
        " (verified)"
    } else {
        " (not pinned in the manifest)"
    }
}

/// Ensures `entry` exists and verifies in `dir` (or anywhere on the search path),
/// downloading it only when absent.
pub fn fetch_entry(entry: &ManifestEntry, dir: &Path) -> Result<FetchOutcome> {
    let target = dir.join(&entry.file);
    let existing = if target.is_file() {
        Some(target.clone())
    } else {
        registry::locate(entry)
    };
    if let Some(path) = existing {
        let sha256 = registry::verify(entry, &path)?;
        return Ok(FetchOutcome::Present { path, sha256 });
    }
    let Some(url) = &entry.url else {
        if entry.name == DOG2 {
            return Ok(FetchOutcome::Surrogate);
        }
        bail!("no download URL in the manifest");
    };
    let format = entry
        .raw
        .as_ref()
        .ok_or_else(|| anyhow!("manifest entry has a URL but no raw format"))?;
    let text = ureq::get(url)
        .call()
        .and_then(|mut r| r.body_mut().read_to_string())
        .with_context(|| format!("downloading {url}"))?;
    let csv = registry::convert_raw(&text, format)?;
    let sha256 = registry::sha256_hex(csv.as_bytes());
    if let Some(expected) = &entry.sha256 {
        if !expected.eq_ignore_ascii_case(&sha256) {
            bail!("checksum mismatch for {url}: expected {expected}, got {sha256}");
        }
    }
    std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    let tmp = target.with_extension("csv.part");
    std::fs::write(&tmp, &csv).with_context(|| format!("writing {}", tmp.display()))?;
    std::fs::rename(&tmp, &target).with_context(|| format!("writing {}", target.display()))?;
    Ok(FetchOutcome::Downloaded {
        path: target,
        sha256,
    })
}

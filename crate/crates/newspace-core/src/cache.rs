//! Shared cache of computed symbol spaces, in memory and on disk.
//!
//! The disk layer stores entries keyed by `(level, weight, format-version)`;
//! operators are cheap to rebuild from a space, so they are never cached.
//! Readers take a shared lock; insertion is single-writer, and disk writes go
//! through a temp file plus rename so a concurrent reader never observes a
//! torn entry. Space construction is fully deterministic, which is what makes
//! warm and cold runs byte-identical.

use std::collections::HashMap;
use std::path::{Path, PathBuf};
use std::sync::{Arc, RwLock};

use serde::{Deserialize, Serialize};

use crate::linalg::{rational_from_string, rational_to_string, QMatrix, Subspace};
use crate::modsym::ManinSpace;
use crate::Error;

/// Bump when the serialized layout changes; `cache clear` only removes
/// entries of the current version.
pub const CACHE_FORMAT_VERSION: u32 = 1;

const SPACE_SCHEMA: &str = "newspace.space/1";

#[derive(Serialize, Deserialize)]
struct MatrixData {
    rows: usize,
    cols: usize,
    entries: Vec<String>,
}

fn matrix_to_data(m: &QMatrix) -> MatrixData {
    let mut entries = Vec::with_capacity(m.rows() * m.cols());
    for r in 0..m.rows() {
        for c in 0..m.cols() {
            entries.push(rational_to_string(m.get(r, c)));
        }
    }
    MatrixData { rows: m.rows(), cols: m.cols(), entries }
}

fn matrix_from_data(d: &MatrixData) -> Result<QMatrix, Error> {
    if d.entries.len() != d.rows * d.cols {
        return Err(Error::Cache("matrix entry count mismatch".into()));
    }
    let mut m = QMatrix::zeros(d.rows, d.cols);
    for r in 0..d.rows {
        for c in 0..d.cols {
            m.set(r, c, rational_from_string(&d.entries[r * d.cols + c])?);
        }
    }
    Ok(m)
}

/// Header of a cached space: enough to certify a deterministic rebuild.
#[derive(Serialize, Deserialize)]
struct SpaceData {
    schema: String,
    version: u32,
    level: u32,
    weight: u32,
    dim: usize,
    cuspidal_dim: usize,
    cuspidal_basis: MatrixData,
}

/// Space cache: in-memory map backed by an optional directory.
pub struct SpaceCache {
    dir: Option<PathBuf>,
    map: RwLock<HashMap<(u32, u32), Arc<ManinSpace>>>,
}

impl SpaceCache {
    /// Purely in-memory cache.
    pub fn in_memory() -> Self {
        SpaceCache { dir: None, map: RwLock::new(HashMap::new()) }
    }

    /// Cache backed by `dir` (created on demand).
    pub fn with_dir(dir: impl Into<PathBuf>) -> Self {
        SpaceCache { dir: Some(dir.into()), map: RwLock::new(HashMap::new()) }
    }

    pub fn dir(&self) -> Option<&Path> {
        self.dir.as_deref()
    }

    fn entry_path(dir: &Path, level: u32, weight: u32) -> PathBuf {
        dir.join(format!("space-N{level}-w{weight}-v{CACHE_FORMAT_VERSION}.json"))
    }

    /// Fetch or build the space at `(level, weight)`.
    ///
    /// Builds are deterministic; an existing disk entry is cross-checked
    /// against the rebuilt presentation instead of being trusted blindly.
    pub fn get(&self, level: u32, weight: u32) -> Result<Arc<ManinSpace>, Error> {
        if let Some(hit) = self.map.read().expect("cache lock").get(&(level, weight)) {
            return Ok(hit.clone());
        }
        let space = Arc::new(ManinSpace::build(level, weight)?);
        if let Some(dir) = &self.dir {
            std::fs::create_dir_all(dir)?;
            let path = Self::entry_path(dir, level, weight);
            if path.exists() {
                let data: SpaceData = serde_json::from_str(&std::fs::read_to_string(&path)?)?;
                let stored = matrix_from_data(&data.cuspidal_basis)?;
                if data.dim != space.dim() || &stored != space.cuspidal().basis() {
                    return Err(Error::Cache(format!(
                        "cache entry {} disagrees with the deterministic rebuild",
                        path.display()
                    )));
                }
            } else {
                let data = SpaceData {
                    schema: SPACE_SCHEMA.into(),
                    version: CACHE_FORMAT_VERSION,
                    level,
                    weight,
                    dim: space.dim(),
                    cuspidal_dim: space.cuspidal_dim(),
                    cuspidal_basis: matrix_to_data(space.cuspidal().basis()),
                };
                write_atomically(&path, &serde_json::to_string_pretty(&data)?)?;
            }
        }
        let mut w = self.map.write().expect("cache lock");
        let entry = w.entry((level, weight)).or_insert_with(|| space.clone());
        Ok(entry.clone())
    }

    /// `(level, weight, size_bytes)` of disk entries with the current version.
    pub fn status(&self) -> Result<Vec<(u32, u32, u64)>, Error> {
        let Some(dir) = &self.dir else { return Ok(Vec::new()) };
        if !dir.exists() {
            return Ok(Vec::new());
        }
        let mut out = Vec::new();
        for entry in std::fs::read_dir(dir)? {
            let entry = entry?;
            let name = entry.file_name().to_string_lossy().into_owned();
            if let Some((level, weight)) = parse_entry_name(&name) {
                out.push((level, weight, entry.metadata()?.len()));
            }
        }
        out.sort_unstable();
        Ok(out)
    }

    /// Remove disk entries of the current format version only.
    pub fn clear(&self) -> Result<usize, Error> {
        let Some(dir) = &self.dir else { return Ok(0) };
        if !dir.exists() {
            return Ok(0);
        }
        let mut removed = 0;
        for entry in std::fs::read_dir(dir)? {
            let entry = entry?;
            let name = entry.file_name().to_string_lossy().into_owned();
            if parse_entry_name(&name).is_some() {
                std::fs::remove_file(entry.path())?;
                removed += 1;
            }
        }
        self.map.write().expect("cache lock").clear();
        Ok(removed)
    }
}

fn parse_entry_name(name: &str) -> Option<(u32, u32)> {
    let rest = name.strip_prefix("space-N")?.strip_suffix(".json")?;
    let (level, rest) = rest.split_once("-w")?;
    let (weight, version) = rest.split_once("-v")?;
    if version.parse::<u32>().ok()? != CACHE_FORMAT_VERSION {
        return None;
    }
    Some((level.parse().ok()?, weight.parse().ok()?))
}

fn write_atomically(path: &Path, content: &str) -> Result<(), Error> {
    let tmp = path.with_extension("json.tmp");
    std::fs::write(&tmp, content)?;
    std::fs::rename(&tmp, path)?;
    Ok(())
}

/// Serialize subspace basis rows as `num/den` strings, for report witnesses.
pub fn subspace_rows_to_strings(s: &Subspace) -> Vec<Vec<String>> {
    (0..s.dim())
        .map(|i| s.basis().row(i).iter().map(rational_to_string).collect())
        .collect()
}

/// Matrix entries as `[num, den]` decimal-string pairs, row major.
pub fn matrix_to_entry_pairs(m: &QMatrix) -> Vec<[String; 2]> {
    let mut out = Vec::with_capacity(m.rows() * m.cols());
    for r in 0..m.rows() {
        for c in 0..m.cols() {
            let v = m.get(r, c);
            out.push([v.numer().to_string(), v.denom().to_string()]);
        }
    }
    out
}

//! On-disk census cache and CSV export.
//!
//! One JSON file per `(group, method, code version)`; big integers are
//! stored as decimal strings. A file that fails to parse or disagrees with
//! its key is reported and recomputed.

use std::fmt::Display;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use num_bigint::BigUint;
use serde::{Deserialize, Serialize, Serializer};

use crate::census::{self, residuals, CensusOptions, CensusResult, Method};
use crate::error::{Error, Result};
use crate::group::GroupSpec;

pub const CACHE_SCHEMA: u32 = 1;
pub const CODE_VERSION: &str = env!("CARGO_PKG_VERSION");
pub const DEFAULT_CACHE_DIR: &str = ".sumset-cache";

pub fn ser_decimal<T: Display, S: Serializer>(v: &T, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&v.to_string())
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
struct CacheEntry {
    schema: u32,
    version: String,
    group: String,
    method: Method,
    n: usize,
    t: String,
    elapsed: f64,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CacheStatus {
    Hit,
    Miss,
    /// The stored file was unusable; the reason is kept for reporting.
    Rebuilt(String),
}

#[derive(Clone, Debug)]
pub struct Cache {
    dir: PathBuf,
}

impl Cache {
    pub fn new(dir: impl Into<PathBuf>) -> Self {
        Cache { dir: dir.into() }
    }

    /// Directory from `SUMSET_CACHE_DIR`, else [`DEFAULT_CACHE_DIR`].
    pub fn from_env() -> Self {
        Cache::new(std::env::var_os("SUMSET_CACHE_DIR").map_or_else(|| PathBuf::from(DEFAULT_CACHE_DIR), PathBuf::from))
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    pub fn path(&self, g: &GroupSpec, method: Method) -> PathBuf {
        self.dir.join(format!("T-{g}-{method}-v{CODE_VERSION}.json"))
    }

    /// `Ok(None)` when absent; `Err` when present but unusable.
    pub fn load(&self, g: &GroupSpec, method: Method) -> Result<Option<CensusResult>> {
        let path = self.path(g, method);
        let text = match fs::read_to_string(&path) {
            Ok(t) => t,
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Ok(None),
            Err(e) => return Err(e.into()),
        };
        let entry: CacheEntry = serde_json::from_str(&text)?;
        if entry.schema != CACHE_SCHEMA
            || entry.version != CODE_VERSION
            || entry.group != g.to_string()
            || entry.method != method
            || entry.n != g.order()
        {
            return Err(Error::Parse(format!("{} does not match its key", path.display())));
        }
        let t: BigUint = entry
            .t
            .parse()
            .map_err(|_| Error::Parse(format!("bad count {:?} in {}", entry.t, path.display())))?;
        Ok(Some(CensusResult {
            group: g.clone(),
            t,
            method,
            elapsed: entry.elapsed,
            stratified: None,
        }))
    }

    pub fn store(&self, result: &CensusResult) -> Result<PathBuf> {
        fs::create_dir_all(&self.dir)?;
        let entry = CacheEntry {
            schema: CACHE_SCHEMA,
            version: CODE_VERSION.to_string(),
            group: result.group.to_string(),
            method: result.method,
            n: result.order(),
            t: result.t.to_string(),
            elapsed: result.elapsed,
        };
        let path = self.path(&result.group, result.method);
        let tmp = path.with_extension("json.tmp");
        fs::write(&tmp, serde_json::to_string_pretty(&entry)?)?;
        fs::rename(&tmp, &path)?;
        Ok(path)
    }

    pub fn get_or_compute(
        &self,
        g: &GroupSpec,
        method: Method,
        opts: &CensusOptions,
    ) -> Result<(CensusResult, CacheStatus)> {
        let status = match self.load(g, method) {
            Ok(Some(hit)) => return Ok((hit, CacheStatus::Hit)),
            Ok(None) => CacheStatus::Miss,
            Err(e) => CacheStatus::Rebuilt(e.to_string()),
        };
        let result = census::count(g, method, opts)?;
        self.store(&result)?;
        Ok((result, status))
    }
}

/// One CSV row per result: `group, N, T, R_lb, R1, R2, elapsed`.
pub fn write_csv<W: Write>(out: W, results: &[CensusResult]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["group", "N", "T", "R_lb", "R1", "R2", "elapsed"])
        .map_err(csv_error)?;
    for r in results {
        let res = residuals(r)?;
        w.write_record([
            r.group.to_string(),
            r.order().to_string(),
            r.t.to_string(),
            res.r_lb.to_string(),
            res.r1.to_string(),
            res.r2.to_string(),
            format!("{:.6}", r.elapsed),
        ])
        .map_err(csv_error)?;
    }
    w.flush()?;
    Ok(())
}

fn csv_error(e: csv::Error) -> Error {
    Error::Io(std::io::Error::other(e))
}

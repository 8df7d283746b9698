//! Run directories and deterministic CSV/JSON writers. Floats use Rust's
//! shortest round-trip formatting; JSON goes through `serde_json`.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use chlab::dynamics::DiagnosticRecord;
use chlab::FieldState;
use serde::Serialize;

use crate::error::{CliError, Result};

pub const TRAJECTORY_HEADER: &str = "t,x,u";
pub const DIAGNOSTICS_HEADER: &str = "t,M0,E,H3,min_slope,max_abs_u";

/// Output directory of one run.
#[derive(Clone, Debug)]
pub struct RunDir {
    root: PathBuf,
}

impl RunDir {
    pub fn create(root: impl Into<PathBuf>) -> Result<Self> {
        let root = root.into();
        fs::create_dir_all(&root).map_err(|e| CliError::io(&root, e))?;
        Ok(Self { root })
    }

    pub fn path(&self) -> &Path {
        &self.root
    }

    pub fn file(&self, name: &str) -> PathBuf {
        self.root.join(name)
    }

    pub fn write_text(&self, name: &str, text: &str) -> Result<()> {
        let path = self.file(name);
        fs::write(&path, text).map_err(|e| CliError::io(path, e))
    }

    pub fn write_json<T: Serialize + ?Sized>(&self, name: &str, value: &T) -> Result<()> {
        let path = self.file(name);
        let mut text = serde_json::to_string_pretty(value).map_err(|e| CliError::Json {
            path: path.clone(),
            source: e,
        })?;
        text.push('\n');
        self.write_text(name, &text)
    }
}

fn opt(v: Option<f64>) -> String {
    v.map(|v| v.to_string()).unwrap_or_default()
}

/// Long-format `t,x,u` table.
pub fn trajectory_csv(states: &[FieldState]) -> String {
    let mut out = String::from(TRAJECTORY_HEADER);
    out.push('\n');
    for u in states {
        for (x, v) in u.grid().nodes().iter().zip(u.values()) {
            let _ = writeln!(out, "{},{},{}", u.time, x, v);
        }
    }
    out
}

/// One row per record; `H3` is empty for generalized runs.
pub fn diagnostics_csv(records: &[DiagnosticRecord]) -> String {
    let mut out = String::from(DIAGNOSTICS_HEADER);
    out.push('\n');
    for r in records {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{}",
            r.t,
            r.m0,
            r.energy,
            opt(r.h3),
            r.min_slope,
            r.max_abs_u
        );
    }
    out
}

/// Generic CSV from a header and rows of preformatted cells.
pub fn table_csv(header: &[&str], rows: &[Vec<String>]) -> String {
    let mut out = header.join(",");
    out.push('\n');
    for row in rows {
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}

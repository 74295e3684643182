//! Output files: every artifact carries the tool version, config hash and
//! seed, and is written through a temporary file in the target directory.

use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use madbound::bounds::InequalityReport;
use madbound::numeric::fmt17;
use serde::Serialize;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Meta {
    pub tool_version: String,
    pub config_hash: String,
    pub seed: u64,
}

impl Meta {
    pub fn new(config_hash: String, seed: u64) -> Self {
        Self {
            tool_version: env!("CARGO_PKG_VERSION").into(),
            config_hash,
            seed,
        }
    }

    pub fn csv_comment(&self) -> String {
        format!(
            "# tool_version={} config_hash={} seed={}\n",
            self.tool_version, self.config_hash, self.seed
        )
    }
}

#[derive(Serialize)]
struct Envelope<'a, T: Serialize> {
    meta: &'a Meta,
    report: &'a T,
}

pub struct OutDir {
    pub path: PathBuf,
    pub meta: Meta,
    pub written: Vec<PathBuf>,
}

impl OutDir {
    pub fn create(path: &Path, meta: Meta) -> Result<Self> {
        std::fs::create_dir_all(path)
            .with_context(|| format!("cannot create output directory {}", path.display()))?;
        Ok(Self {
            path: path.to_path_buf(),
            meta,
            written: Vec::new(),
        })
    }

    /// Writes `contents` to `name` via temp file + rename.
    pub fn write_raw(&mut self, name: &str, contents: &str) -> Result<()> {
        let target = self.path.join(name);
        let mut tmp = tempfile::NamedTempFile::new_in(&self.path)
            .with_context(|| format!("cannot write into {}", self.path.display()))?;
        tmp.write_all(contents.as_bytes())?;
        tmp.flush()?;
        tmp.persist(&target)
            .with_context(|| format!("cannot persist {}", target.display()))?;
        self.written.push(target);
        Ok(())
    }

    pub fn write_json<T: Serialize>(&mut self, name: &str, report: &T) -> Result<()> {
        let mut text = serde_json::to_string_pretty(&Envelope {
            meta: &self.meta,
            report,
        })?;
        text.push('\n');
        self.write_raw(name, &text)
    }

    /// `header` and `rows` exclude the leading metadata comment.
    pub fn write_csv(&mut self, name: &str, header: &str, rows: &[String]) -> Result<()> {
        let mut text = self.meta.csv_comment();
        text.push_str(header);
        text.push('\n');
        for row in rows {
            text.push_str(row);
            text.push('\n');
        }
        self.write_raw(name, &text)
    }
}

pub fn bool_cell(b: bool) -> &'static str {
    if b {
        "true"
    } else {
        "false"
    }
}

pub const REPORT_CSV_HEADER: &str = "name,lhs,rhs,slack,holds";

pub fn report_csv_row(r: &InequalityReport) -> String {
    format!(
        "{},{},{},{},{}",
        r.name,
        fmt17(r.lhs),
        fmt17(r.rhs),
        fmt17(r.slack),
        bool_cell(r.holds)
    )
}

/// Fixed-width table with columns name, lhs, rhs, slack, holds.
pub fn render_table(reports: &[&InequalityReport]) -> String {
    let width = reports.iter().map(|r| r.name.len()).max().unwrap_or(4).max(4);
    let mut s = format!(
        "{:<width$}  {:>13}  {:>13}  {:>13}  holds\n",
        "name", "lhs", "rhs", "slack"
    );
    for r in reports {
        s.push_str(&format!(
            "{:<width$}  {:>13.6e}  {:>13.6e}  {:>13.6e}  {}\n",
            r.name,
            r.lhs,
            r.rhs,
            r.slack,
            bool_cell(r.holds)
        ));
    }
    s
}

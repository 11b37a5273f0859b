//! Rendering and writing. Files are staged next to their destination and
//! moved into place only once everything has been rendered, so a failed run
//! leaves nothing behind.

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::ValueEnum;
use tempfile::NamedTempFile;

use crate::error::{CliError, Result};
use crate::report::{render_csv, render_text_table, RunReport};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Table,
    Json,
    Csv,
}

/// Either one document or one CSV file per table.
#[derive(Debug, Clone, PartialEq)]
pub enum Rendered {
    Single(String),
    PerTable(Vec<(String, String)>),
}

impl Rendered {
    /// Everything concatenated, for standard output.
    pub fn joined(&self) -> String {
        match self {
            Rendered::Single(s) => s.clone(),
            Rendered::PerTable(files) => {
                files.iter().map(|(_, body)| body.as_str()).collect::<Vec<_>>().join("\n")
            }
        }
    }
}

/// `table` restricts the output to one result table.
pub fn render(report: &RunReport, format: Format, table: Option<&str>) -> Result<Rendered> {
    if let Some(name) = table {
        let all = report.all_tables();
        let t = all.iter().find(|t| t.name == name).ok_or_else(|| {
            let names: Vec<&str> = all.iter().map(|t| t.name.as_str()).collect();
            CliError::Output(format!("no table `{name}` (available: {})", names.join(", ")))
        })?;
        return Ok(Rendered::Single(match format {
            Format::Table => render_text_table(t),
            Format::Json => serde_json::to_string_pretty(t).expect("table serializes") + "\n",
            Format::Csv => render_csv(t)?,
        }));
    }
    Ok(match format {
        Format::Table => Rendered::Single(report.to_text()),
        Format::Json => Rendered::Single(report.to_json()),
        Format::Csv => Rendered::PerTable(report.to_csv()?),
    })
}

fn write_err(path: &Path) -> impl Fn(std::io::Error) -> CliError + '_ {
    move |source| CliError::Write { path: path.to_path_buf(), source }
}

fn stage(dir: &Path, body: &str) -> Result<NamedTempFile> {
    let mut tmp = NamedTempFile::new_in(dir).map_err(write_err(dir))?;
    tmp.write_all(body.as_bytes()).map_err(write_err(dir))?;
    tmp.as_file().sync_all().map_err(write_err(dir))?;
    Ok(tmp)
}

/// A single document goes to `out`; per-table CSV goes to
/// `out/<table>.csv`, creating the directory if needed.
pub fn write(rendered: &Rendered, out: &Path) -> Result<Vec<PathBuf>> {
    match rendered {
        Rendered::Single(body) => {
            let dir = parent_dir(out);
            let tmp = stage(&dir, body)?;
            tmp.persist(out).map_err(|e| CliError::Write { path: out.to_path_buf(), source: e.error })?;
            Ok(vec![out.to_path_buf()])
        }
        Rendered::PerTable(files) => {
            std::fs::create_dir_all(out).map_err(write_err(out))?;
            let staged = files
                .iter()
                .map(|(name, body)| Ok((out.join(format!("{name}.csv")), stage(out, body)?)))
                .collect::<Result<Vec<_>>>()?;
            let mut written = Vec::new();
            for (dest, tmp) in staged {
                tmp.persist(&dest).map_err(|e| CliError::Write { path: dest.clone(), source: e.error })?;
                written.push(dest);
            }
            Ok(written)
        }
    }
}

fn parent_dir(path: &Path) -> PathBuf {
    match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p.to_path_buf(),
        _ => PathBuf::from("."),
    }
}

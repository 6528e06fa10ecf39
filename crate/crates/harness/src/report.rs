use std::fmt;
use std::fs::File;
use std::io::Write;
use std::path::{Path, PathBuf};

use crate::config::Experiment;
use crate::error::{HarnessError, Result};

/// A CSV file written row by row, remembering how many data rows it holds.
pub struct CsvOut {
    path: PathBuf,
    writer: csv::Writer<File>,
    rows: usize,
}

impl CsvOut {
    pub fn create(dir: &Path, name: &str, header: &[&str]) -> Result<Self> {
        let path = dir.join(name);
        let file = File::create(&path).map_err(|e| HarnessError::io(&path, e))?;
        let mut writer = csv::Writer::from_writer(file);
        writer.write_record(header)?;
        Ok(Self {
            path,
            writer,
            rows: 0,
        })
    }

    pub fn row<I, S>(&mut self, fields: I) -> Result<()>
    where
        I: IntoIterator<Item = S>,
        S: AsRef<[u8]>,
    {
        self.writer.write_record(fields)?;
        self.rows += 1;
        Ok(())
    }

    pub fn finish(mut self) -> Result<(PathBuf, usize)> {
        self.writer
            .flush()
            .map_err(|e| HarnessError::io(&self.path, e))?;
        Ok((self.path, self.rows))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct OutputFile {
    pub path: PathBuf,
    pub rows: usize,
    /// Whether re-running the same configuration reproduces it byte for byte.
    pub deterministic: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Report {
    pub experiment: Experiment,
    pub lines: Vec<String>,
    pub files: Vec<OutputFile>,
}

impl Report {
    pub fn new(experiment: Experiment) -> Self {
        Self {
            experiment,
            lines: Vec::new(),
            files: Vec::new(),
        }
    }

    pub fn line(&mut self, s: impl Into<String>) {
        self.lines.push(s.into());
    }

    pub fn file(&mut self, (path, rows): (PathBuf, usize), deterministic: bool) {
        self.files.push(OutputFile {
            path,
            rows,
            deterministic,
        });
    }

    /// Total data rows across every CSV written.
    pub fn total_rows(&self) -> usize {
        self.files.iter().map(|f| f.rows).sum()
    }

    /// Writes `summary.txt` next to the CSV files.
    pub fn write_summary(&self, dir: &Path) -> Result<PathBuf> {
        let path = dir.join("summary.txt");
        let mut f = File::create(&path).map_err(|e| HarnessError::io(&path, e))?;
        write!(f, "{self}").map_err(|e| HarnessError::io(&path, e))?;
        Ok(path)
    }
}

impl fmt::Display for Report {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "experiment: {}", self.experiment)?;
        for l in &self.lines {
            writeln!(f, "{l}")?;
        }
        for o in &self.files {
            let name = o.path.file_name().map(|n| n.to_string_lossy()).unwrap_or_default();
            let tag = if o.deterministic { "" } else { " (wall-clock)" };
            writeln!(f, "rows {name}: {}{tag}", o.rows)?;
        }
        writeln!(f, "rows total: {}", self.total_rows())
    }
}

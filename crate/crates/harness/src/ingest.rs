use std::fs::File;
use std::io::{BufRead, BufReader};
use std::path::Path;

use betting_ope::{control_variate, Config, LogSample};
use serde::Deserialize;

use crate::error::{HarnessError, Result};

#[derive(Debug, Deserialize)]
struct Record {
    w: f64,
    r: f64,
    c: Option<f64>,
    q_taken: Option<f64>,
    q_bar: Option<f64>,
}

/// Reads one JSON object per line with fields `w`, `r` and optionally either
/// `c` or the pair `q_taken`, `q_bar`. Blank lines are skipped; errors carry
/// the 1-based line number.
pub fn ingest_jsonl(path: &Path, cfg: &Config) -> Result<Vec<LogSample>> {
    let file = File::open(path).map_err(|e| HarnessError::io(path, e))?;
    let mut out = Vec::new();
    for (i, line) in BufReader::new(file).lines().enumerate() {
        let line = line.map_err(|e| HarnessError::io(path, e))?;
        if line.trim().is_empty() {
            continue;
        }
        let bad = |msg: String| HarnessError::Input {
            path: path.to_path_buf(),
            line: i + 1,
            msg,
        };
        let rec: Record = serde_json::from_str(&line).map_err(|e| bad(e.to_string()))?;
        let c = match (rec.c, rec.q_taken, rec.q_bar) {
            (None, None, None) => None,
            (Some(c), None, None) => Some(c),
            (None, Some(qt), Some(qb)) => {
                Some(control_variate(rec.w, qt, qb).map_err(|e| bad(e.to_string()))?)
            }
            (Some(_), _, _) => return Err(bad("give either c or (q_taken, q_bar), not both".into())),
            _ => return Err(bad("q_taken and q_bar must be given together".into())),
        };
        let s = LogSample { w: rec.w, r: rec.r, c };
        s.validate(cfg).map_err(|e| bad(e.to_string()))?;
        out.push(s);
    }
    Ok(out)
}

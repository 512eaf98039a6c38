//! Deterministic artifact emission: provenance headers, round-trip-safe CSV
//! numbers, and complex-matrix dumps in row-major re/im pairs.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use ndarray::Array2;
use serde_json::{json, Value};
use telegraph_exchange::C64;

use crate::config::Resolved;

pub const TOOL: &str = concat!(env!("CARGO_PKG_NAME"), " v", env!("CARGO_PKG_VERSION"));

/// One leading digit plus 16 fractional digits: 17 significant digits,
/// enough to round-trip any `f64`.
pub fn sig17(v: f64) -> String {
    format!("{v:.16e}")
}

/// Where the primary artifact goes: a file when `--out` was given, stdout
/// otherwise.
pub struct Sink {
    target: Option<PathBuf>,
}

impl Sink {
    pub fn new(target: Option<&Path>) -> Self {
        Self {
            target: target.map(Path::to_path_buf),
        }
    }

    fn writer(&self) -> Result<Box<dyn Write>> {
        Ok(match &self.target {
            Some(p) => Box::new(
                File::create(p).with_context(|| format!("out: cannot create {}", p.display()))?,
            ),
            None => Box::new(io::stdout().lock()),
        })
    }

    /// Stream for human-readable summaries: stdout when the artifact goes
    /// to a file, stderr when the artifact itself occupies stdout.
    pub fn diag(&self) -> Box<dyn Write> {
        if self.target.is_some() {
            Box::new(io::stdout().lock())
        } else {
            Box::new(io::stderr().lock())
        }
    }
}

fn provenance(resolved: &Resolved) -> String {
    // single-line JSON so the resolved config survives inside CSV comments
    let cfg = serde_json::to_string(resolved).expect("resolved config serializes");
    format!(
        "# tool: {TOOL}\n# config: {cfg}\n# seed: {}\n",
        resolved.seed
    )
}

pub fn write_csv(
    sink: &Sink,
    resolved: &Resolved,
    extra_comments: &[String],
    columns: &[&str],
    rows: &[Vec<String>],
) -> Result<()> {
    let mut w = BufWriter::new(sink.writer()?);
    w.write_all(provenance(resolved).as_bytes())?;
    for line in extra_comments {
        writeln!(w, "# {line}")?;
    }
    writeln!(w, "{}", columns.join(","))?;
    for row in rows {
        writeln!(w, "{}", row.join(","))?;
    }
    w.flush()?;
    Ok(())
}

/// JSON artifact with the same provenance triple at the top level. Keys are
/// emitted sorted, so identical runs produce identical bytes.
pub fn write_json(sink: &Sink, resolved: &Resolved, result: Value) -> Result<()> {
    let doc = json!({
        "tool": TOOL,
        "seed": resolved.seed,
        "config": resolved,
        "result": result,
    });
    let mut w = BufWriter::new(sink.writer()?);
    serde_json::to_writer_pretty(&mut w, &doc)?;
    writeln!(w)?;
    w.flush()?;
    Ok(())
}

/// 16x16 complex matrix as nested JSON arrays of `[re, im]` pairs.
pub fn matrix_json(m: &Array2<C64>) -> Value {
    Value::Array(
        m.rows()
            .into_iter()
            .map(|row| Value::Array(row.iter().map(|c| json!([c.re, c.im])).collect()))
            .collect(),
    )
}

/// Header `re_i_j,im_i_j` for a flattened row-major superoperator dump.
pub fn superop_columns(dim: usize) -> Vec<String> {
    let mut cols = Vec::with_capacity(2 * dim * dim);
    for i in 0..dim {
        for j in 0..dim {
            cols.push(format!("re_{i}_{j}"));
            cols.push(format!("im_{i}_{j}"));
        }
    }
    cols
}

/// One CSV row holding the whole matrix in the order of [`superop_columns`].
pub fn superop_row(m: &Array2<C64>) -> Vec<String> {
    let mut row = Vec::with_capacity(2 * m.len());
    for c in m.iter() {
        row.push(sig17(c.re));
        row.push(sig17(c.im));
    }
    row
}

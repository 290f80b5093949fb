//! Matrix Market coordinate files and one-value-per-line vector files.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use crate::error::{Error, Result};
use crate::linalg::sparse::{SparseOperator, Symmetry};

pub fn read_matrix_market(path: &Path) -> Result<SparseOperator> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_matrix_market(&text, path)
}

/// Parse `%%MatrixMarket matrix coordinate real general|symmetric` text.
/// `origin` is only used in error messages.
pub fn parse_matrix_market(text: &str, origin: &Path) -> Result<SparseOperator> {
    let err = |line: usize, message: String| Error::Parse {
        path: origin.to_path_buf(),
        line,
        message,
    };
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l));

    let (_, header) = lines
        .next()
        .ok_or_else(|| err(1, "empty file, expected %%MatrixMarket header".into()))?;
    let tokens: Vec<String> = header
        .split_whitespace()
        .map(|t| t.to_ascii_lowercase())
        .collect();
    if tokens.len() != 5 || tokens[0] != "%%matrixmarket" || tokens[1] != "matrix" {
        return Err(err(1, format!("bad header `{header}`")));
    }
    if tokens[2] != "coordinate" {
        return Err(err(1, format!("unsupported format `{}`", tokens[2])));
    }
    if tokens[3] != "real" && tokens[3] != "integer" {
        return Err(err(1, format!("unsupported field `{}`", tokens[3])));
    }
    let symmetry = match tokens[4].as_str() {
        "general" => Symmetry::General,
        "symmetric" => Symmetry::Symmetric,
        other => return Err(err(1, format!("unsupported symmetry `{other}`"))),
    };

    let mut data = lines.filter(|(_, l)| {
        let t = l.trim();
        !t.is_empty() && !t.starts_with('%')
    });
    let (size_line, size) = data
        .next()
        .ok_or_else(|| err(2, "missing size line".into()))?;
    let dims: Vec<usize> = size
        .split_whitespace()
        .map(str::parse)
        .collect::<std::result::Result<_, _>>()
        .map_err(|e| err(size_line, format!("bad size line: {e}")))?;
    let [nrows, ncols, nnz] = dims[..] else {
        return Err(err(size_line, "size line needs `rows cols entries`".into()));
    };
    if symmetry == Symmetry::Symmetric && nrows != ncols {
        return Err(err(size_line, "symmetric matrix must be square".into()));
    }

    let mut triplets = Vec::with_capacity(nnz);
    let mut count = 0;
    for (line, l) in data {
        let parts: Vec<&str> = l.split_whitespace().collect();
        if parts.len() != 3 {
            return Err(err(line, format!("expected `row col value`, got `{l}`")));
        }
        let r: usize = parts[0]
            .parse()
            .map_err(|e| err(line, format!("bad row index: {e}")))?;
        let c: usize = parts[1]
            .parse()
            .map_err(|e| err(line, format!("bad column index: {e}")))?;
        let v: f64 = parts[2]
            .parse()
            .map_err(|e| err(line, format!("bad value: {e}")))?;
        if r == 0 || c == 0 || r > nrows || c > ncols {
            return Err(err(
                line,
                format!("index ({r}, {c}) outside {nrows}x{ncols}"),
            ));
        }
        if !v.is_finite() {
            return Err(err(line, "non-finite value".into()));
        }
        let (r, c) = (r - 1, c - 1);
        if symmetry == Symmetry::Symmetric {
            if c > r {
                return Err(err(
                    line,
                    "symmetric files store the lower triangle only".into(),
                ));
            }
            if r != c {
                triplets.push((c, r, v));
            }
        }
        triplets.push((r, c, v));
        count += 1;
    }
    if count != nnz {
        return Err(err(
            text.lines().count(),
            format!("expected {nnz} entries, found {count}"),
        ));
    }
    SparseOperator::from_triplets(nrows, ncols, &triplets, symmetry)
}

/// Matrix Market text; symmetric operators store their lower triangle.
pub fn format_matrix_market(op: &SparseOperator) -> String {
    let symmetric = op.is_symmetric();
    let entries: Vec<(usize, usize, f64)> = op
        .iter()
        .filter(|&(r, c, _)| !symmetric || c <= r)
        .collect();
    let mut out = format!(
        "%%MatrixMarket matrix coordinate real {}\n{} {} {}\n",
        if symmetric { "symmetric" } else { "general" },
        op.nrows(),
        op.ncols(),
        entries.len()
    );
    for (r, c, v) in entries {
        let _ = writeln!(out, "{} {} {}", r + 1, c + 1, v);
    }
    out
}

pub fn write_matrix_market(path: &Path, op: &SparseOperator) -> Result<()> {
    fs::write(path, format_matrix_market(op)).map_err(|e| Error::io(path, e))
}

pub fn parse_vector(text: &str, origin: &Path) -> Result<Vec<f64>> {
    let mut v = Vec::new();
    for (i, l) in text.lines().enumerate() {
        let t = l.trim();
        if t.is_empty() || t.starts_with('%') || t.starts_with('#') {
            continue;
        }
        let x: f64 = t.parse().map_err(|e| Error::Parse {
            path: origin.to_path_buf(),
            line: i + 1,
            message: format!("bad value `{t}`: {e}"),
        })?;
        if !x.is_finite() {
            return Err(Error::Parse {
                path: origin.to_path_buf(),
                line: i + 1,
                message: "non-finite value".into(),
            });
        }
        v.push(x);
    }
    Ok(v)
}

pub fn read_vector(path: &Path) -> Result<Vec<f64>> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_vector(&text, path)
}

/// One value per line, shortest round-trip representation.
pub fn format_vector(v: &[f64]) -> String {
    let mut out = String::with_capacity(v.len() * 24);
    for x in v {
        let _ = writeln!(out, "{x}");
    }
    out
}

pub fn write_vector(path: &Path, v: &[f64]) -> Result<()> {
    fs::write(path, format_vector(v)).map_err(|e| Error::io(path, e))
}

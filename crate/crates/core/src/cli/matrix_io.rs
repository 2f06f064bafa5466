use std::fs;
use std::io::Write;
use std::path::Path;

use nalgebra::DMatrix;

use crate::error::{Error, Result};

/// `dim 2n` followed by `2n` rows of `2n` whitespace-separated numbers.
pub fn parse_matrix(text: &str) -> Result<DMatrix<f64>> {
    let mut lines = text.lines().map(str::trim).filter(|l| !l.is_empty());
    let header = lines.next().ok_or_else(|| Error::Parse("empty matrix file".into()))?;
    let dim = match header.split_whitespace().collect::<Vec<_>>().as_slice() {
        ["dim", d] => d.parse::<usize>().map_err(|e| Error::Parse(format!("bad dimension {d:?}: {e}")))?,
        _ => return Err(Error::Parse(format!("expected header \"dim <2n>\", found {header:?}"))),
    };
    if dim == 0 || dim % 2 != 0 {
        return Err(Error::Parse(format!("dimension must be even and positive, got {dim}")));
    }
    let mut m = DMatrix::zeros(dim, dim);
    for i in 0..dim {
        let line = lines.next().ok_or_else(|| Error::Parse(format!("expected {dim} rows, found {i}")))?;
        let row: Vec<&str> = line.split_whitespace().collect();
        if row.len() != dim {
            return Err(Error::Parse(format!("row {} has {} entries, expected {dim}", i + 1, row.len())));
        }
        for (j, tok) in row.iter().enumerate() {
            let v: f64 = tok.parse().map_err(|e| Error::Parse(format!("row {} entry {}: {tok:?}: {e}", i + 1, j + 1)))?;
            if !v.is_finite() {
                return Err(Error::Parse(format!("row {} entry {} is not finite", i + 1, j + 1)));
            }
            m[(i, j)] = v;
        }
    }
    if let Some(extra) = lines.next() {
        return Err(Error::Parse(format!("unexpected trailing content {extra:?}")));
    }
    Ok(m)
}

/// Inverse of [`parse_matrix`]; entries carry 17 significant digits.
pub fn format_matrix(m: &DMatrix<f64>) -> String {
    let mut out = format!("dim {}\n", m.nrows());
    for i in 0..m.nrows() {
        let row: Vec<String> = m.row(i).iter().map(|v| format!("{v:.16e}")).collect();
        out.push_str(&row.join(" "));
        out.push('\n');
    }
    out
}

pub fn read_matrix_file(path: &Path) -> Result<DMatrix<f64>> {
    let text = fs::read_to_string(path).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
    parse_matrix(&text)
}

/// Writes through a temporary file in the target directory, then renames.
pub fn write_atomic(path: &Path, contents: &[u8]) -> Result<()> {
    let io = |e: std::io::Error| Error::Io(format!("{}: {e}", path.display()));
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    fs::create_dir_all(dir).map_err(io)?;
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(io)?;
    tmp.write_all(contents).map_err(io)?;
    tmp.as_file().sync_all().map_err(io)?;
    tmp.persist(path).map_err(|e| io(e.error))?;
    Ok(())
}

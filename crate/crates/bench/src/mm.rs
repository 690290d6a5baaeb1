//! Matrix Market (array and coordinate, real or integer, general, symmetric
//! or skew-symmetric) reading and writing, with a plain whitespace-separated
//! dense fallback.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use nalgebra::DMatrix;

use crate::error::{BenchError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Layout {
    Array,
    Coordinate,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Symmetry {
    General,
    Symmetric,
    Skew,
}

pub fn read_matrix(path: &Path) -> Result<DMatrix<f64>> {
    let text = fs::read_to_string(path).map_err(|e| BenchError::io(path, e))?;
    parse_matrix(&text, path)
}

/// Parse Matrix Market text, or dense rows of numbers when there is no
/// `%%MatrixMarket` banner.
pub fn parse_matrix(text: &str, path: &Path) -> Result<DMatrix<f64>> {
    match text.lines().next() {
        Some(first) if first.trim_start().starts_with("%%MatrixMarket") => parse_mm(text, path),
        _ => parse_dense(text, path),
    }
}

fn parse_mm(text: &str, path: &Path) -> Result<DMatrix<f64>> {
    let mut lines = text.lines().enumerate();
    let (_, banner) = lines.next().expect("banner checked by caller");
    let words: Vec<String> = banner
        .split_whitespace()
        .map(str::to_ascii_lowercase)
        .collect();
    if words.len() < 5 || words[1] != "matrix" {
        return Err(BenchError::parse(
            path,
            1,
            "expected `%%MatrixMarket matrix <layout> <field> <symmetry>`",
        ));
    }
    let layout = match words[2].as_str() {
        "array" => Layout::Array,
        "coordinate" => Layout::Coordinate,
        other => {
            return Err(BenchError::parse(
                path,
                1,
                format!("unsupported layout `{other}`"),
            ))
        }
    };
    if !matches!(words[3].as_str(), "real" | "integer" | "double") {
        return Err(BenchError::parse(
            path,
            1,
            format!("unsupported field `{}`", words[3]),
        ));
    }
    let sym = match words[4].as_str() {
        "general" => Symmetry::General,
        "symmetric" => Symmetry::Symmetric,
        "skew-symmetric" => Symmetry::Skew,
        other => {
            return Err(BenchError::parse(
                path,
                1,
                format!("unsupported symmetry `{other}`"),
            ))
        }
    };

    let mut data = lines.filter(|(_, l)| {
        let t = l.trim();
        !t.is_empty() && !t.starts_with('%')
    });
    let (size_line, size) = data
        .next()
        .ok_or_else(|| BenchError::parse(path, 1, "missing size line"))?;
    let dims = parse_numbers::<usize>(size, path, size_line + 1)?;
    let (rows, cols) = match (layout, dims.as_slice()) {
        (Layout::Array, [r, c]) => (*r, *c),
        (Layout::Coordinate, [r, c, _]) => (*r, *c),
        _ => {
            return Err(BenchError::parse(
                path,
                size_line + 1,
                "malformed size line",
            ))
        }
    };
    if sym != Symmetry::General && rows != cols {
        return Err(BenchError::parse(
            path,
            size_line + 1,
            "symmetric storage requires a square matrix",
        ));
    }
    let mut m = DMatrix::zeros(rows, cols);
    let mirror = |m: &mut DMatrix<f64>, i: usize, j: usize, v: f64| {
        m[(i, j)] = v;
        if i != j {
            match sym {
                Symmetry::General => {}
                Symmetry::Symmetric => m[(j, i)] = v,
                Symmetry::Skew => m[(j, i)] = -v,
            }
        }
    };

    match layout {
        Layout::Array => {
            // Column-major; symmetric storage holds the lower triangle only.
            let mut slots = (0..cols).flat_map(|j| {
                let start = match sym {
                    Symmetry::General => 0,
                    Symmetry::Symmetric => j,
                    Symmetry::Skew => j + 1,
                };
                (start..rows).map(move |i| (i, j))
            });
            for (ln, line) in data {
                for v in parse_numbers::<f64>(line, path, ln + 1)? {
                    let (i, j) = slots
                        .next()
                        .ok_or_else(|| BenchError::parse(path, ln + 1, "too many entries"))?;
                    mirror(&mut m, i, j, v);
                }
            }
            if slots.next().is_some() {
                return Err(BenchError::parse(
                    path,
                    text.lines().count(),
                    "too few entries",
                ));
            }
        }
        Layout::Coordinate => {
            let nnz = dims[2];
            let mut seen = 0;
            for (ln, line) in data {
                let mut it = line.split_whitespace();
                let (i, j, v) = match (it.next(), it.next(), it.next()) {
                    (Some(i), Some(j), Some(v)) => (i, j, v),
                    _ => return Err(BenchError::parse(path, ln + 1, "expected `row col value`")),
                };
                let i: usize = i
                    .parse()
                    .map_err(|_| BenchError::parse(path, ln + 1, "bad row index"))?;
                let j: usize = j
                    .parse()
                    .map_err(|_| BenchError::parse(path, ln + 1, "bad column index"))?;
                let v = parse_f64(v).ok_or_else(|| BenchError::parse(path, ln + 1, "bad value"))?;
                if i == 0 || j == 0 || i > rows || j > cols {
                    return Err(BenchError::parse(path, ln + 1, "index out of range"));
                }
                mirror(&mut m, i - 1, j - 1, v);
                seen += 1;
            }
            if seen != nnz {
                return Err(BenchError::parse(
                    path,
                    0,
                    format!("expected {nnz} entries, found {seen}"),
                ));
            }
        }
    }
    Ok(m)
}

fn parse_dense(text: &str, path: &Path) -> Result<DMatrix<f64>> {
    let mut rows: Vec<Vec<f64>> = Vec::new();
    for (ln, line) in text.lines().enumerate() {
        let t = line.trim();
        if t.is_empty() || t.starts_with('#') || t.starts_with('%') {
            continue;
        }
        let row = parse_numbers::<f64>(&t.replace(',', " "), path, ln + 1)?;
        if let Some(first) = rows.first() {
            if first.len() != row.len() {
                return Err(BenchError::parse(path, ln + 1, "ragged rows"));
            }
        }
        rows.push(row);
    }
    if rows.is_empty() {
        return Err(BenchError::parse(path, 0, "no numeric data"));
    }
    let cols = rows[0].len();
    Ok(DMatrix::from_row_iterator(
        rows.len(),
        cols,
        rows.into_iter().flatten(),
    ))
}

fn parse_f64(s: &str) -> Option<f64> {
    // Fortran-style exponents appear in some exported data.
    s.replace(['D', 'd'], "e").parse().ok()
}

fn parse_numbers<T: std::str::FromStr>(line: &str, path: &Path, ln: usize) -> Result<Vec<T>> {
    line.split_whitespace()
        .map(|w| {
            w.replace(['D', 'd'], "e")
                .parse::<T>()
                .map_err(|_| BenchError::parse(path, ln, format!("not a number: `{w}`")))
        })
        .collect()
}

/// Array-format general Matrix Market text, 17 significant digits.
pub fn format_matrix(m: &DMatrix<f64>) -> String {
    let mut s = String::from("%%MatrixMarket matrix array real general\n");
    writeln!(s, "{} {}", m.nrows(), m.ncols()).unwrap();
    for v in m.iter() {
        writeln!(s, "{v:.16e}").unwrap();
    }
    s
}

pub fn write_matrix(path: &Path, m: &DMatrix<f64>) -> Result<()> {
    fs::write(path, format_matrix(m)).map_err(|e| BenchError::io(path, e))
}

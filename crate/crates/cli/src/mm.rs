// Copyright 2026 Daepl Contributors
// SPDX-License-Identifier: Apache-2.0

//! Matrix Market ingestion: dense `array` and sparse `coordinate`
//! layouts, real values, general or (skew-)symmetric storage. Errors
//! carry the file path and line number.

use std::fs;
use std::path::Path;

use nalgebra::{DMatrix, DVector};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Layout {
    Array,
    Coordinate,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Symmetry {
    General,
    Symmetric,
    SkewSymmetric,
}

struct Diag<'a> {
    path: &'a Path,
}

impl<'a> Diag<'a> {
    fn at(&self, line: usize, message: impl AsRef<str>) -> String {
        format!("{}:{line}: {}", self.path.display(), message.as_ref())
    }
}

/// Reads a real matrix in Matrix Market form.
pub fn read_matrix(path: &Path) -> Result<DMatrix<f64>, String> {
    let text = fs::read_to_string(path)
        .map_err(|e| format!("{}: cannot read file: {e}", path.display()))?;
    let diag = Diag { path };

    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l));
    let (header_no, header) = lines
        .next()
        .ok_or_else(|| diag.at(1, "empty file, expected a MatrixMarket header"))?;

    let fields: Vec<&str> = header.split_whitespace().collect();
    if fields.len() != 5 || !fields[0].eq_ignore_ascii_case("%%MatrixMarket") {
        return Err(diag.at(
            header_no,
            "header must read '%%MatrixMarket matrix <layout> <type> <symmetry>'",
        ));
    }
    if !fields[1].eq_ignore_ascii_case("matrix") {
        return Err(diag.at(header_no, format!("unsupported object '{}'", fields[1])));
    }
    let layout = match fields[2].to_ascii_lowercase().as_str() {
        "array" => Layout::Array,
        "coordinate" => Layout::Coordinate,
        other => return Err(diag.at(header_no, format!("unsupported layout '{other}'"))),
    };
    if !fields[3].eq_ignore_ascii_case("real") {
        return Err(diag.at(
            header_no,
            format!("unsupported value type '{}', only 'real' is accepted", fields[3]),
        ));
    }
    let symmetry = match fields[4].to_ascii_lowercase().as_str() {
        "general" => Symmetry::General,
        "symmetric" => Symmetry::Symmetric,
        "skew-symmetric" => Symmetry::SkewSymmetric,
        other => return Err(diag.at(header_no, format!("unsupported symmetry '{other}'"))),
    };

    // Skip comments and blanks up to the size line.
    let mut data = lines.filter(|(_, l)| !l.trim_start().starts_with('%') && !l.trim().is_empty());
    let (size_no, size_line) = data
        .next()
        .ok_or_else(|| diag.at(1, "missing size line"))?;

    match layout {
        Layout::Array => read_array(&diag, size_no, size_line, data, symmetry),
        Layout::Coordinate => read_coordinate(&diag, size_no, size_line, data, symmetry),
    }
}

fn parse_usize(diag: &Diag, line: usize, tok: &str, what: &str) -> Result<usize, String> {
    tok.parse()
        .map_err(|_| diag.at(line, format!("invalid {what} '{tok}'")))
}

fn parse_value(diag: &Diag, line: usize, tok: &str) -> Result<f64, String> {
    // Fortran-style exponents (1.0D+00) appear in the wild.
    let normalized = tok.replace(['D', 'd'], "e");
    normalized
        .parse()
        .map_err(|_| diag.at(line, format!("invalid value '{tok}'")))
}

fn read_array<'l>(
    diag: &Diag,
    size_no: usize,
    size_line: &str,
    data: impl Iterator<Item = (usize, &'l str)>,
    symmetry: Symmetry,
) -> Result<DMatrix<f64>, String> {
    let toks: Vec<&str> = size_line.split_whitespace().collect();
    if toks.len() != 2 {
        return Err(diag.at(size_no, "array size line must be '<rows> <cols>'"));
    }
    let rows = parse_usize(diag, size_no, toks[0], "row count")?;
    let cols = parse_usize(diag, size_no, toks[1], "column count")?;
    if rows == 0 || cols == 0 {
        return Err(diag.at(size_no, "matrix dimensions must be positive"));
    }
    if symmetry != Symmetry::General && rows != cols {
        return Err(diag.at(size_no, "symmetric storage needs a square matrix"));
    }

    // Column-major scan; symmetric variants store the lower triangle only.
    let expected = match symmetry {
        Symmetry::General => rows * cols,
        Symmetry::Symmetric => rows * (rows + 1) / 2,
        Symmetry::SkewSymmetric => rows * (rows - 1) / 2,
    };
    let mut m = DMatrix::<f64>::zeros(rows, cols);
    let mut col = 0usize;
    let mut row = match symmetry {
        Symmetry::SkewSymmetric => 1,
        _ => 0,
    };
    let mut seen = 0usize;
    let mut last_line = size_no;
    for (no, line) in data {
        last_line = no;
        for tok in line.split_whitespace() {
            if seen == expected {
                return Err(diag.at(no, "more values than the size line announces"));
            }
            let v = parse_value(diag, no, tok)?;
            m[(row, col)] = v;
            match symmetry {
                Symmetry::Symmetric => m[(col, row)] = v,
                Symmetry::SkewSymmetric => m[(col, row)] = -v,
                Symmetry::General => {}
            }
            seen += 1;
            row += 1;
            if row == rows {
                col += 1;
                row = match symmetry {
                    Symmetry::General => 0,
                    Symmetry::Symmetric => col,
                    Symmetry::SkewSymmetric => col + 1,
                };
            }
        }
    }
    if seen != expected {
        return Err(diag.at(
            last_line,
            format!("expected {expected} values, found {seen}"),
        ));
    }
    Ok(m)
}

fn read_coordinate<'l>(
    diag: &Diag,
    size_no: usize,
    size_line: &str,
    data: impl Iterator<Item = (usize, &'l str)>,
    symmetry: Symmetry,
) -> Result<DMatrix<f64>, String> {
    let toks: Vec<&str> = size_line.split_whitespace().collect();
    if toks.len() != 3 {
        return Err(diag.at(size_no, "coordinate size line must be '<rows> <cols> <nnz>'"));
    }
    let rows = parse_usize(diag, size_no, toks[0], "row count")?;
    let cols = parse_usize(diag, size_no, toks[1], "column count")?;
    let nnz = parse_usize(diag, size_no, toks[2], "entry count")?;
    if rows == 0 || cols == 0 {
        return Err(diag.at(size_no, "matrix dimensions must be positive"));
    }
    if symmetry != Symmetry::General && rows != cols {
        return Err(diag.at(size_no, "symmetric storage needs a square matrix"));
    }

    let mut m = DMatrix::<f64>::zeros(rows, cols);
    let mut seen = 0usize;
    let mut last_line = size_no;
    for (no, line) in data {
        last_line = no;
        let toks: Vec<&str> = line.split_whitespace().collect();
        if toks.len() != 3 {
            return Err(diag.at(no, format!("expected 'i j value', found {} fields", toks.len())));
        }
        if seen == nnz {
            return Err(diag.at(no, "more entries than the size line announces"));
        }
        let i = parse_usize(diag, no, toks[0], "row index")?;
        let j = parse_usize(diag, no, toks[1], "column index")?;
        let v = parse_value(diag, no, toks[2])?;
        if i == 0 || i > rows || j == 0 || j > cols {
            return Err(diag.at(
                no,
                format!("index ({i}, {j}) outside {rows} x {cols} (indices are 1-based)"),
            ));
        }
        let (i, j) = (i - 1, j - 1);
        m[(i, j)] += v;
        match symmetry {
            Symmetry::Symmetric if i != j => m[(j, i)] += v,
            Symmetry::SkewSymmetric => {
                if i == j {
                    return Err(diag.at(no, "skew-symmetric storage forbids diagonal entries"));
                }
                m[(j, i)] -= v;
            }
            _ => {}
        }
        seen += 1;
    }
    if seen != nnz {
        return Err(diag.at(
            last_line,
            format!("expected {nnz} entries, found {seen}"),
        ));
    }
    Ok(m)
}

/// Reads a vector: a Matrix Market matrix with exactly one column.
pub fn read_vector(path: &Path) -> Result<DVector<f64>, String> {
    let m = read_matrix(path)?;
    if m.ncols() != 1 {
        return Err(format!(
            "{}: expected a single-column vector, found {} columns",
            path.display(),
            m.ncols()
        ));
    }
    Ok(DVector::from_column_slice(m.column(0).as_slice()))
}

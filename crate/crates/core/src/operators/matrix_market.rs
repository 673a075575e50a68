use std::fs;
use std::path::Path;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::eigensolve::{HermitianMatrix, SymmetricMatrix};
use crate::error::{Error, Result};

/// Matrix read from a MatrixMarket coordinate file.
#[derive(Debug, Clone, PartialEq)]
pub enum MatrixMarket {
    Real(SymmetricMatrix),
    Complex(HermitianMatrix),
}

impl MatrixMarket {
    pub fn dim(&self) -> usize {
        match self {
            MatrixMarket::Real(m) => m.dim(),
            MatrixMarket::Complex(m) => m.dim(),
        }
    }
}

/// Reads `coordinate real symmetric` or `coordinate complex hermitian` files
/// with 1-based indices. Entries may be given in either triangle.
pub fn read_matrix_market(path: &Path) -> Result<MatrixMarket> {
    let text = fs::read_to_string(path)?;
    parse_matrix_market(&text).map_err(|(line, msg)| Error::MatrixFile {
        path: path.to_path_buf(),
        line,
        msg,
    })
}

fn parse_matrix_market(text: &str) -> std::result::Result<MatrixMarket, (usize, String)> {
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l.trim()));
    let (_, header) = lines.next().ok_or((1, "empty file".to_string()))?;
    let fields: Vec<String> = header.split_whitespace().map(str::to_ascii_lowercase).collect();
    if fields.len() != 5 || fields[0] != "%%matrixmarket" || fields[1] != "matrix" || fields[2] != "coordinate" {
        return Err((1, format!("unsupported header `{header}`")));
    }
    let complex = match (fields[3].as_str(), fields[4].as_str()) {
        ("real", "symmetric") => false,
        ("complex", "hermitian") => true,
        (field, sym) => return Err((1, format!("unsupported storage `{field} {sym}`"))),
    };

    let mut body = lines.filter(|(_, l)| !l.is_empty() && !l.starts_with('%'));
    let (size_line, size) = body.next().ok_or((1, "missing size line".to_string()))?;
    let dims: Vec<usize> = size
        .split_whitespace()
        .map(|t| t.parse().map_err(|_| (size_line, format!("bad size token `{t}`"))))
        .collect::<std::result::Result<_, _>>()?;
    if dims.len() != 3 || dims[0] != dims[1] || dims[0] == 0 {
        return Err((size_line, "size line must read `n n nnz` with n >= 1".into()));
    }
    let (n, nnz) = (dims[0], dims[2]);
    let mut m = DMatrix::<Complex64>::zeros(n, n);
    let mut count = 0;
    for (lineno, line) in body {
        let toks: Vec<&str> = line.split_whitespace().collect();
        let want = if complex { 4 } else { 3 };
        if toks.len() != want {
            return Err((lineno, format!("expected {want} fields, got {}", toks.len())));
        }
        let index = |t: &str| -> std::result::Result<usize, (usize, String)> {
            match t.parse::<usize>() {
                Ok(i) if (1..=n).contains(&i) => Ok(i - 1),
                _ => Err((lineno, format!("index `{t}` outside 1..={n}"))),
            }
        };
        let num = |t: &str| -> std::result::Result<f64, (usize, String)> {
            t.parse::<f64>().map_err(|_| (lineno, format!("bad number `{t}`")))
        };
        let (i, j) = (index(toks[0])?, index(toks[1])?);
        let z = if complex {
            Complex64::new(num(toks[2])?, num(toks[3])?)
        } else {
            Complex64::new(num(toks[2])?, 0.0)
        };
        if i == j && z.im != 0.0 {
            return Err((lineno, "diagonal of a Hermitian matrix must be real".into()));
        }
        m[(i, j)] = z;
        m[(j, i)] = z.conj();
        count += 1;
    }
    if count != nnz {
        return Err((size_line, format!("declared {nnz} entries, found {count}")));
    }
    if complex {
        Ok(MatrixMarket::Complex(HermitianMatrix::new(m).map_err(|e| (1, e.to_string()))?))
    } else {
        Ok(MatrixMarket::Real(
            SymmetricMatrix::new(m.map(|z| z.re)).map_err(|e| (1, e.to_string()))?,
        ))
    }
}

//! Matrix serialization and number formatting.
//!
//! Two matrix formats are supported:
//!
//! - JSON `{"n": n, "rows": [[[re, im], …], …]}` with one array per row;
//! - plain-text coordinate triplets with a `%%MatrixMarket` header,
//!   one-based indices and only nonzero entries, meant for debugging.
//!
//! CSV numbers use 15 significant digits in scientific notation.

use std::fmt::Write as _;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{HypoError, Result};
use crate::linalg::CMatrix;

/// Formats a number with 15 significant digits.
pub fn fmt_sig(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.14e}")
    } else {
        format!("{x}")
    }
}

/// JSON representation of a complex square matrix.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MatrixJson {
    /// Dimension.
    pub n: usize,
    /// Rows of `[re, im]` pairs.
    pub rows: Vec<Vec<[f64; 2]>>,
}

impl From<&CMatrix> for MatrixJson {
    fn from(m: &CMatrix) -> Self {
        Self {
            n: m.nrows(),
            rows: (0..m.nrows())
                .map(|i| (0..m.ncols()).map(|j| [m[(i, j)].re, m[(i, j)].im]).collect())
                .collect(),
        }
    }
}

impl MatrixJson {
    /// Converts back to a matrix, checking the shape.
    pub fn to_matrix(&self) -> Result<CMatrix> {
        if self.rows.len() != self.n || self.rows.iter().any(|r| r.len() != self.n) {
            return Err(HypoError::Format(format!(
                "expected {0}×{0} entries in the matrix JSON",
                self.n
            )));
        }
        Ok(CMatrix::from_fn(self.n, self.n, |i, j| {
            let [re, im] = self.rows[i][j];
            Complex64::new(re, im)
        }))
    }
}

/// Serializes a matrix to the JSON format.
pub fn matrix_to_json(m: &CMatrix) -> Result<String> {
    if !m.is_square() {
        return Err(HypoError::Format("only square matrices are supported".into()));
    }
    serde_json::to_string(&MatrixJson::from(m)).map_err(|e| HypoError::Format(e.to_string()))
}

/// Parses a matrix from the JSON format.
pub fn matrix_from_json(text: &str) -> Result<CMatrix> {
    let parsed: MatrixJson = serde_json::from_str(text).map_err(|e| HypoError::Format(e.to_string()))?;
    parsed.to_matrix()
}

const TRIPLET_HEADER: &str = "%%MatrixMarket matrix coordinate complex general";

/// Writes nonzero entries as `i j re im` lines (one-based) after a header
/// and a `rows cols nnz` size line.
pub fn matrix_to_triplets(m: &CMatrix) -> String {
    let entries: Vec<(usize, usize, Complex64)> = (0..m.nrows())
        .flat_map(|i| (0..m.ncols()).map(move |j| (i, j)))
        .filter_map(|(i, j)| {
            let z = m[(i, j)];
            (z != Complex64::new(0.0, 0.0)).then_some((i, j, z))
        })
        .collect();
    let mut out = format!("{TRIPLET_HEADER}\n{} {} {}\n", m.nrows(), m.ncols(), entries.len());
    for (i, j, z) in entries {
        let _ = writeln!(out, "{} {} {:e} {:e}", i + 1, j + 1, z.re, z.im);
    }
    out
}

/// Parses the triplet format written by [`matrix_to_triplets`].
pub fn matrix_from_triplets(text: &str) -> Result<CMatrix> {
    let mut lines = text.lines().map(str::trim).filter(|l| !l.is_empty() && !l.starts_with('%'));
    let bad = |msg: &str| HypoError::Format(msg.to_string());
    let size: Vec<usize> = lines
        .next()
        .ok_or_else(|| bad("missing size line"))?
        .split_whitespace()
        .map(|t| t.parse().map_err(|_| bad("invalid size line")))
        .collect::<Result<_>>()?;
    let [rows, cols, nnz] = size[..] else {
        return Err(bad("size line must hold rows, cols and nnz"));
    };
    let mut m = CMatrix::zeros(rows, cols);
    let mut count = 0;
    for line in lines {
        let parts: Vec<&str> = line.split_whitespace().collect();
        if parts.len() != 4 {
            return Err(bad("entry lines must hold i j re im"));
        }
        let i: usize = parts[0].parse().map_err(|_| bad("invalid row index"))?;
        let j: usize = parts[1].parse().map_err(|_| bad("invalid column index"))?;
        let re: f64 = parts[2].parse().map_err(|_| bad("invalid real part"))?;
        let im: f64 = parts[3].parse().map_err(|_| bad("invalid imaginary part"))?;
        if i == 0 || j == 0 || i > rows || j > cols {
            return Err(bad("entry index out of range"));
        }
        m[(i - 1, j - 1)] = Complex64::new(re, im);
        count += 1;
    }
    if count != nnz {
        return Err(bad("entry count does not match the size line"));
    }
    Ok(m)
}

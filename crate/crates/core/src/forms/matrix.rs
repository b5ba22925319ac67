use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};

/// A point X of the cube `[−1/2, 1/2]^{mn}`, stored column-wise: `n`
/// columns of length `m`. The linear forms are `q·x^{(j)}` for the columns
/// `x^{(j)}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MatrixPoint {
    m: usize,
    n: usize,
    entries: Vec<f64>,
}

impl MatrixPoint {
    /// Builds a point from column-major entries (`entries[j*m + i] = x_ij`).
    pub fn new(m: usize, n: usize, entries: Vec<f64>) -> Result<Self> {
        if m == 0 || n == 0 {
            return Err(invalid!("matrix dimensions must be positive, got {m}x{n}"));
        }
        if entries.len() != m * n {
            return Err(invalid!("expected {} entries for a {m}x{n} point, got {}", m * n, entries.len()));
        }
        if let Some(bad) = entries.iter().find(|x| !(x.abs() <= 0.5)) {
            return Err(invalid!("entry {bad} lies outside [-1/2, 1/2]"));
        }
        Ok(MatrixPoint { m, n, entries })
    }

    pub fn from_columns(columns: &[Vec<f64>]) -> Result<Self> {
        let n = columns.len();
        let m = columns.first().map_or(0, Vec::len);
        if columns.iter().any(|c| c.len() != m) {
            return Err(invalid!("columns have unequal lengths"));
        }
        MatrixPoint::new(m, n, columns.concat())
    }

    pub fn zeros(m: usize, n: usize) -> Result<Self> {
        MatrixPoint::new(m, n, vec![0.0; m * n])
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn entries(&self) -> &[f64] {
        &self.entries
    }

    pub fn column(&self, j: usize) -> &[f64] {
        &self.entries[j * self.m..(j + 1) * self.m]
    }

    pub fn columns(&self) -> impl Iterator<Item = &[f64]> {
        self.entries.chunks_exact(self.m)
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.entries[j * self.m + i]
    }

    /// Sub-matrix made of the given columns.
    pub fn select_columns(&self, cols: &[usize]) -> MatrixPoint {
        let entries = cols.iter().flat_map(|&j| self.column(j).iter().copied()).collect();
        MatrixPoint { m: self.m, n: cols.len(), entries }
    }

    pub(crate) fn to_nalgebra(&self) -> nalgebra::DMatrix<f64> {
        nalgebra::DMatrix::from_column_slice(self.m, self.n, &self.entries)
    }
}

/// An integer vector q ≠ 0 with its height `|q|∞` and form value `|qX|∞`
/// against a specific point.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Witness {
    pub q: Vec<i64>,
    pub height: u64,
    pub value: f64,
}

impl Witness {
    pub fn new(q: Vec<i64>, x: &MatrixPoint) -> Result<Self> {
        let value = super::form_value(&q, x)?;
        let height = height(&q);
        Ok(Witness { q, height, value })
    }

    /// Recomputes height and value against `x`; both must match exactly.
    pub fn verify(&self, x: &MatrixPoint) -> bool {
        match super::form_value(&self.q, x) {
            Ok(v) => v == self.value && height(&self.q) == self.height,
            Err(_) => false,
        }
    }
}

/// `|q|∞`.
pub fn height(q: &[i64]) -> u64 {
    q.iter().map(|v| v.unsigned_abs()).max().unwrap_or(0)
}

/// Euclidean norm `|q|₂`.
pub fn euclidean_norm(q: &[i64]) -> f64 {
    q.iter().map(|&v| (v as f64) * (v as f64)).sum::<f64>().sqrt()
}

/// The representative of `{q, −q}` whose leading nonzero coordinate is positive.
pub fn canonical(mut q: Vec<i64>) -> Vec<i64> {
    if q.iter().find(|&&v| v != 0).is_some_and(|&v| v < 0) {
        q.iter_mut().for_each(|v| *v = -*v);
    }
    q
}

pub fn is_canonical(q: &[i64]) -> bool {
    q.iter().find(|&&v| v != 0).is_some_and(|&v| v > 0)
}

//! Exact linear algebra over Gaussian rationals: small dense matrices and a
//! sparse elimination solver.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::scalar::Scalar;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Matrix {
    pub rows: usize,
    pub cols: usize,
    data: Vec<Scalar>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix { rows, cols, data: vec![Scalar::zero(); rows * cols] }
    }

    pub fn identity(k: usize) -> Self {
        let mut m = Matrix::zeros(k, k);
        for i in 0..k {
            m[(i, i)] = Scalar::one();
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, f: impl Fn(usize, usize) -> Scalar) -> Self {
        let mut m = Matrix::zeros(rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                m[(i, j)] = f(i, j);
            }
        }
        m
    }

    pub fn transpose(&self) -> Self {
        Matrix::from_fn(self.cols, self.rows, |i, j| self[(j, i)].clone())
    }

    pub fn mul(&self, o: &Matrix) -> Matrix {
        assert_eq!(self.cols, o.rows);
        let mut out = Matrix::zeros(self.rows, o.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..o.cols {
                    let b = &o[(k, j)];
                    if !b.is_zero() {
                        out[(i, j)] += a * b;
                    }
                }
            }
        }
        out
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Scalar::is_zero)
    }

    /// Gauss-Jordan inverse; `None` if singular.
    pub fn inverse(&self) -> Option<Matrix> {
        assert_eq!(self.rows, self.cols);
        let k = self.rows;
        let mut a = self.clone();
        let mut inv = Matrix::identity(k);
        for col in 0..k {
            let pivot = (col..k).find(|&r| !a[(r, col)].is_zero())?;
            a.swap_rows(col, pivot);
            inv.swap_rows(col, pivot);
            let p = a[(col, col)].inv().ok()?;
            a.scale_row(col, &p);
            inv.scale_row(col, &p);
            for r in 0..k {
                if r != col && !a[(r, col)].is_zero() {
                    let f = a[(r, col)].clone();
                    a.axpy_row(r, col, &f);
                    inv.axpy_row(r, col, &f);
                }
            }
        }
        Some(inv)
    }

    pub fn det(&self) -> Scalar {
        assert_eq!(self.rows, self.cols);
        let k = self.rows;
        let mut a = self.clone();
        let mut det = Scalar::one();
        for col in 0..k {
            let Some(pivot) = (col..k).find(|&r| !a[(r, col)].is_zero()) else {
                return Scalar::zero();
            };
            if pivot != col {
                a.swap_rows(col, pivot);
                det = -det;
            }
            let p = a[(col, col)].clone();
            det = &det * &p;
            let pinv = p.inv().expect("nonzero pivot");
            for r in col + 1..k {
                if !a[(r, col)].is_zero() {
                    let f = &a[(r, col)] * &pinv;
                    a.axpy_row(r, col, &f);
                }
            }
        }
        det
    }

    fn swap_rows(&mut self, i: usize, j: usize) {
        if i != j {
            for c in 0..self.cols {
                self.data.swap(i * self.cols + c, j * self.cols + c);
            }
        }
    }

    fn scale_row(&mut self, i: usize, s: &Scalar) {
        for c in 0..self.cols {
            let v = &self[(i, c)] * s;
            self[(i, c)] = v;
        }
    }

    /// row_i -= f · row_j
    fn axpy_row(&mut self, i: usize, j: usize, f: &Scalar) {
        for c in 0..self.cols {
            if !self[(j, c)].is_zero() {
                let v = f * &self[(j, c)];
                self[(i, c)] -= &v;
            }
        }
    }
}

impl std::ops::Index<(usize, usize)> for Matrix {
    type Output = Scalar;
    fn index(&self, (i, j): (usize, usize)) -> &Scalar {
        &self.data[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for Matrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Scalar {
        &mut self.data[i * self.cols + j]
    }
}

/// One sparse linear equation `Σ coeffs[v]·x_v = rhs`.
#[derive(Clone, Debug, Default)]
pub struct SparseRow {
    pub coeffs: BTreeMap<usize, Scalar>,
    pub rhs: Scalar,
}

impl SparseRow {
    pub fn add_term(&mut self, var: usize, c: &Scalar) {
        if c.is_zero() {
            return;
        }
        let e = self.coeffs.entry(var).or_default();
        *e += c;
        if e.is_zero() {
            self.coeffs.remove(&var);
        }
    }
}

/// Solves a sparse system whose solution must be unique. Inconsistent or
/// under-determined systems are reported as errors.
pub fn solve_sparse_unique(num_vars: usize, rows: Vec<SparseRow>) -> Result<Vec<Scalar>> {
    let mut pivots: BTreeMap<usize, SparseRow> = BTreeMap::new();
    for mut row in rows {
        // Reduce against existing pivots.
        loop {
            let hit = row.coeffs.keys().find(|v| pivots.contains_key(v)).copied();
            let Some(v) = hit else { break };
            let f = row.coeffs[&v].clone();
            let p = &pivots[&v];
            for (w, c) in &p.coeffs {
                row.add_term(*w, &-(&f * c));
            }
            row.rhs -= &(&f * &p.rhs);
        }
        let Some((&lead, c)) = row.coeffs.iter().next() else {
            if !row.rhs.is_zero() {
                return Err(Error::InconsistentStructureEquation(
                    "linear system is inconsistent".into(),
                ));
            }
            continue;
        };
        let inv = c.inv()?;
        for c in row.coeffs.values_mut() {
            *c = &*c * &inv;
        }
        row.rhs = &row.rhs * &inv;
        // Eliminate the new pivot from the old ones.
        for p in pivots.values_mut() {
            if let Some(f) = p.coeffs.get(&lead).cloned() {
                for (w, c) in &row.coeffs {
                    p.add_term(*w, &-(&f * c));
                }
                p.rhs -= &(&f * &row.rhs);
            }
        }
        pivots.insert(lead, row);
    }
    if pivots.len() < num_vars {
        return Err(Error::InconsistentStructureEquation(format!(
            "solution not unique: rank {} of {} unknowns",
            pivots.len(),
            num_vars
        )));
    }
    let mut x = vec![Scalar::zero(); num_vars];
    for (v, p) in pivots {
        debug_assert_eq!(p.coeffs.len(), 1);
        x[v] = p.rhs;
    }
    Ok(x)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn inverse_times_matrix_is_identity() {
        let m = Matrix::from_fn(3, 3, |i, j| {
            let re = if i == j { 3 } else { (i + 2 * j) as i64 - 2 };
            Scalar::from_int(re) + Scalar::i().scale(&crate::scalar::rat(i as i64, 2))
        });
        let inv = m.inverse().unwrap();
        assert_eq!(m.mul(&inv), Matrix::identity(3));
        assert!(!m.det().is_zero());
    }

    #[test]
    fn singular_matrix_has_no_inverse() {
        let m = Matrix::from_fn(2, 2, |_, _| Scalar::one());
        assert!(m.inverse().is_none());
        assert!(m.det().is_zero());
    }

    #[test]
    fn sparse_solver_detects_rank_deficiency() {
        let mut r = SparseRow::default();
        r.add_term(0, &Scalar::one());
        r.add_term(1, &Scalar::one());
        r.rhs = Scalar::from_int(2);
        assert!(solve_sparse_unique(2, vec![r.clone()]).is_err());
        let mut s = SparseRow::default();
        s.add_term(0, &Scalar::one());
        s.add_term(1, &-Scalar::one());
        let x = solve_sparse_unique(2, vec![r, s]).unwrap();
        assert_eq!(x, vec![Scalar::one(), Scalar::one()]);
    }
}

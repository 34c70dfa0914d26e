//! Dense matrices over any supported field, with exact rank, kernel,
//! determinant, and solving by plain Gaussian elimination. All instances in
//! this crate are small and dense, so no sparsity or fraction-free tricks.

use super::{El, Field};

#[derive(Clone, PartialEq, Eq)]
pub struct Matrix {
    field: Field,
    rows: usize,
    cols: usize,
    entries: Vec<El>,
}

impl std::fmt::Debug for Matrix {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        writeln!(f, "Matrix {}x{} over {:?} [", self.rows, self.cols, self.field)?;
        for r in 0..self.rows {
            write!(f, "  [")?;
            for c in 0..self.cols {
                if c > 0 {
                    write!(f, ", ")?;
                }
                write!(f, "{:?}", self.get(r, c))?;
            }
            writeln!(f, "]")?;
        }
        write!(f, "]")
    }
}

impl Matrix {
    pub fn zero(field: &Field, rows: usize, cols: usize) -> Matrix {
        Matrix {
            field: field.clone(),
            rows,
            cols,
            entries: vec![field.zero(); rows * cols],
        }
    }

    pub fn identity(field: &Field, n: usize) -> Matrix {
        let mut m = Matrix::zero(field, n, n);
        for i in 0..n {
            m.set(i, i, field.one());
        }
        m
    }

    pub fn from_fn(
        field: &Field,
        rows: usize,
        cols: usize,
        mut f: impl FnMut(usize, usize) -> El,
    ) -> Matrix {
        let mut entries = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            for c in 0..cols {
                entries.push(f(r, c));
            }
        }
        Matrix {
            field: field.clone(),
            rows,
            cols,
            entries,
        }
    }

    pub fn from_rows(field: &Field, rows: Vec<Vec<El>>) -> Matrix {
        let nrows = rows.len();
        let ncols = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|r| r.len() == ncols), "ragged rows");
        Matrix {
            field: field.clone(),
            rows: nrows,
            cols: ncols,
            entries: rows.into_iter().flatten().collect(),
        }
    }

    /// Convenience constructor from integer entries (reduced into the field).
    pub fn from_ints(field: &Field, rows: &[&[i64]]) -> Matrix {
        Matrix::from_rows(
            field,
            rows.iter()
                .map(|r| r.iter().map(|&v| field.from_int(v)).collect())
                .collect(),
        )
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> &El {
        &self.entries[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: El) {
        self.entries[r * self.cols + c] = v;
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(|e| self.field.is_zero(e))
    }

    pub fn transpose(&self) -> Matrix {
        Matrix::from_fn(&self.field, self.cols, self.rows, |r, c| {
            self.get(c, r).clone()
        })
    }

    pub fn add(&self, other: &Matrix) -> Matrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        Matrix::from_fn(&self.field, self.rows, self.cols, |r, c| {
            self.field.add(self.get(r, c), other.get(r, c))
        })
    }

    pub fn sub(&self, other: &Matrix) -> Matrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        Matrix::from_fn(&self.field, self.rows, self.cols, |r, c| {
            self.field.sub(self.get(r, c), other.get(r, c))
        })
    }

    pub fn scale(&self, s: &El) -> Matrix {
        Matrix::from_fn(&self.field, self.rows, self.cols, |r, c| {
            self.field.mul(self.get(r, c), s)
        })
    }

    pub fn mul(&self, other: &Matrix) -> Matrix {
        assert_eq!(self.cols, other.rows, "dimension mismatch in matrix product");
        let f = &self.field;
        Matrix::from_fn(f, self.rows, other.cols, |r, c| {
            let mut acc = f.zero();
            for k in 0..self.cols {
                acc = f.add(&acc, &f.mul(self.get(r, k), other.get(k, c)));
            }
            acc
        })
    }

    pub fn mul_vec(&self, v: &[El]) -> Vec<El> {
        assert_eq!(self.cols, v.len());
        let f = &self.field;
        (0..self.rows)
            .map(|r| {
                let mut acc = f.zero();
                for (k, x) in v.iter().enumerate() {
                    acc = f.add(&acc, &f.mul(self.get(r, k), x));
                }
                acc
            })
            .collect()
    }

    pub fn hstack(&self, other: &Matrix) -> Matrix {
        assert_eq!(self.rows, other.rows);
        Matrix::from_fn(&self.field, self.rows, self.cols + other.cols, |r, c| {
            if c < self.cols {
                self.get(r, c).clone()
            } else {
                other.get(r, c - self.cols).clone()
            }
        })
    }

    pub fn vstack(&self, other: &Matrix) -> Matrix {
        assert_eq!(self.cols, other.cols);
        Matrix::from_fn(&self.field, self.rows + other.rows, self.cols, |r, c| {
            if r < self.rows {
                self.get(r, c).clone()
            } else {
                other.get(r - self.rows, c).clone()
            }
        })
    }

    pub fn hstack_all(field: &Field, parts: &[Matrix]) -> Matrix {
        assert!(!parts.is_empty());
        let mut acc = parts[0].clone();
        for part in &parts[1..] {
            acc = acc.hstack(part);
        }
        let _ = field;
        acc
    }

    pub fn vstack_all(field: &Field, parts: &[Matrix]) -> Matrix {
        assert!(!parts.is_empty());
        let mut acc = parts[0].clone();
        for part in &parts[1..] {
            acc = acc.vstack(part);
        }
        let _ = field;
        acc
    }

    pub fn column(&self, c: usize) -> Vec<El> {
        (0..self.rows).map(|r| self.get(r, c).clone()).collect()
    }

    pub fn from_columns(field: &Field, rows: usize, cols: Vec<Vec<El>>) -> Matrix {
        let n = cols.len();
        Matrix::from_fn(field, rows, n, |r, c| cols[c][r].clone())
    }

    pub fn submatrix(&self, row_idx: &[usize], col_idx: &[usize]) -> Matrix {
        Matrix::from_fn(&self.field, row_idx.len(), col_idx.len(), |r, c| {
            self.get(row_idx[r], col_idx[c]).clone()
        })
    }

    /// In-place reduction to reduced row echelon form. Returns the pivot
    /// column indices.
    pub fn rref_in_place(&mut self) -> Vec<usize> {
        let f = self.field.clone();
        let mut pivots = vec![];
        let mut row = 0;
        for col in 0..self.cols {
            if row == self.rows {
                break;
            }
            let Some(pr) = (row..self.rows).find(|&r| !f.is_zero(self.get(r, col))) else {
                continue;
            };
            if pr != row {
                for c in 0..self.cols {
                    let a = self.get(row, c).clone();
                    let b = self.get(pr, c).clone();
                    self.set(row, c, b);
                    self.set(pr, c, a);
                }
            }
            let inv = f.inv(self.get(row, col)).expect("pivot nonzero");
            for c in 0..self.cols {
                let v = f.mul(self.get(row, c), &inv);
                self.set(row, c, v);
            }
            for r in 0..self.rows {
                if r == row || f.is_zero(self.get(r, col)) {
                    continue;
                }
                let factor = self.get(r, col).clone();
                for c in 0..self.cols {
                    let v = f.sub(self.get(r, c), &f.mul(&factor, self.get(row, c)));
                    self.set(r, c, v);
                }
            }
            pivots.push(col);
            row += 1;
        }
        pivots
    }

    pub fn rref(&self) -> (Matrix, Vec<usize>) {
        let mut m = self.clone();
        let pivots = m.rref_in_place();
        (m, pivots)
    }

    pub fn rank(&self) -> usize {
        self.rref().1.len()
    }

    /// Basis of the right kernel, returned as the columns of a matrix with
    /// `cols() - rank()` columns.
    pub fn right_kernel(&self) -> Matrix {
        let f = &self.field;
        let (r, pivots) = self.rref();
        let free: Vec<usize> = (0..self.cols).filter(|c| !pivots.contains(c)).collect();
        let mut cols = vec![];
        for &fc in &free {
            let mut v = vec![f.zero(); self.cols];
            v[fc] = f.one();
            for (pi, &pc) in pivots.iter().enumerate() {
                v[pc] = f.neg(r.get(pi, fc));
            }
            cols.push(v);
        }
        Matrix::from_columns(f, self.cols, cols)
    }

    pub fn det(&self) -> El {
        assert_eq!(self.rows, self.cols, "determinant of a non-square matrix");
        let f = self.field.clone();
        let mut m = self.clone();
        let mut det = f.one();
        for col in 0..m.cols {
            let Some(pr) = (col..m.rows).find(|&r| !f.is_zero(m.get(r, col))) else {
                return f.zero();
            };
            if pr != col {
                det = f.neg(&det);
                for c in 0..m.cols {
                    let a = m.get(col, c).clone();
                    let b = m.get(pr, c).clone();
                    m.set(col, c, b);
                    m.set(pr, c, a);
                }
            }
            let pivot = m.get(col, col).clone();
            det = f.mul(&det, &pivot);
            let inv = f.inv(&pivot).unwrap();
            for r in col + 1..m.rows {
                if f.is_zero(m.get(r, col)) {
                    continue;
                }
                let factor = f.mul(m.get(r, col), &inv);
                for c in col..m.cols {
                    let v = f.sub(m.get(r, c), &f.mul(&factor, m.get(col, c)));
                    m.set(r, c, v);
                }
            }
        }
        det
    }

    /// One solution of `self * x = b` (each column of `b` solved
    /// independently), or `None` if inconsistent.
    pub fn solve(&self, b: &Matrix) -> Option<Matrix> {
        assert_eq!(self.rows, b.rows);
        let f = &self.field;
        let (r, pivots) = self.hstack(b).rref();
        // Inconsistent iff a pivot falls in the appended block.
        if pivots.iter().any(|&c| c >= self.cols) {
            return None;
        }
        let mut x = Matrix::zero(f, self.cols, b.cols);
        for (pi, &pc) in pivots.iter().enumerate() {
            for bc in 0..b.cols {
                x.set(pc, bc, r.get(pi, self.cols + bc).clone());
            }
        }
        Some(x)
    }

    pub fn inverse(&self) -> Option<Matrix> {
        assert_eq!(self.rows, self.cols);
        let sol = self.solve(&Matrix::identity(&self.field, self.rows))?;
        if self.rank() < self.rows {
            return None;
        }
        Some(sol)
    }

    /// Columns of `self` that form a basis of the column space.
    pub fn column_space_basis(&self) -> Matrix {
        let pivots = self.rref().1;
        self.submatrix(&(0..self.rows).collect::<Vec<_>>(), &pivots)
    }
}

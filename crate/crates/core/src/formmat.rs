//! Matrices whose entries are homogeneous forms.

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::field::Field;
use crate::matrix::Matrix;
use crate::poly::HomForm;

#[derive(Clone, Debug, PartialEq)]
pub struct FormMatrix<F: Field> {
    nvars: usize,
    rows: usize,
    cols: usize,
    entries: Vec<HomForm<F>>,
}

/// A `k × k` minor together with the rows and columns it was taken from.
#[derive(Clone, Debug, PartialEq)]
pub struct Minor<F: Field> {
    pub rows: Vec<usize>,
    pub cols: Vec<usize>,
    pub det: HomForm<F>,
}

impl<F: Field> FormMatrix<F> {
    pub fn zeros(nvars: usize, rows: usize, cols: usize) -> Self {
        FormMatrix {
            nvars,
            rows,
            cols,
            entries: vec![HomForm::zero(nvars, 0); rows * cols],
        }
    }

    pub fn from_rows(nvars: usize, rows: Vec<Vec<HomForm<F>>>) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|row| row.len() != c) {
            return Err(Error::InvalidInput("ragged form matrix".into()));
        }
        if rows.iter().flatten().any(|f| f.nvars() != nvars) {
            return Err(Error::InvalidInput("entries in different rings".into()));
        }
        Ok(FormMatrix {
            nvars,
            rows: r,
            cols: c,
            entries: rows.into_iter().flatten().collect(),
        })
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &HomForm<F> {
        &self.entries[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, f: HomForm<F>) {
        assert_eq!(f.nvars(), self.nvars);
        self.entries[i * self.cols + j] = f;
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(HomForm::is_zero)
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.nvars, self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.set(j, i, self.get(i, j).clone());
            }
        }
        t
    }

    /// Apply `f` to every entry; the results live in `nvars` variables.
    pub fn map_entries(
        &self,
        nvars: usize,
        f: impl Fn(&HomForm<F>) -> Result<HomForm<F>>,
    ) -> Result<Self> {
        let entries = self.entries.iter().map(f).collect::<Result<Vec<_>>>()?;
        if entries.iter().any(|e| e.nvars() != nvars) {
            return Err(Error::InvalidInput("mapped entry in the wrong ring".into()));
        }
        Ok(FormMatrix {
            nvars,
            rows: self.rows,
            cols: self.cols,
            entries,
        })
    }

    pub fn evaluate(&self, point: &[F]) -> Matrix<F> {
        Matrix::from_fn(self.rows, self.cols, |i, j| self.get(i, j).evaluate(point))
    }

    pub fn submatrix(&self, rows: &[usize], cols: &[usize]) -> Self {
        let mut s = Self::zeros(self.nvars, rows.len(), cols.len());
        for (a, &i) in rows.iter().enumerate() {
            for (b, &j) in cols.iter().enumerate() {
                s.set(a, b, self.get(i, j).clone());
            }
        }
        s
    }

    /// Product with a column vector of forms.
    pub fn mul_vec(&self, v: &[HomForm<F>]) -> Vec<HomForm<F>> {
        assert_eq!(v.len(), self.cols);
        (0..self.rows)
            .map(|i| {
                (0..self.cols).fold(HomForm::zero(self.nvars, 0), |acc, j| {
                    &acc + &(self.get(i, j) * &v[j])
                })
            })
            .collect()
    }

    pub fn det(&self) -> HomForm<F> {
        assert_eq!(self.rows, self.cols, "determinant of a non-square matrix");
        let rows: Vec<usize> = (0..self.rows).collect();
        let table = self.minors_on_rows(&rows);
        let all = (1u64 << self.cols) - 1;
        table.get(&all).cloned().unwrap_or_else(|| HomForm::one(self.nvars))
    }

    /// Adjugate of a square matrix: `A · adj(A) = det(A) · Id`.
    pub fn adjugate(&self) -> Self {
        assert_eq!(self.rows, self.cols);
        let n = self.rows;
        let mut adj = Self::zeros(self.nvars, n, n);
        if n == 1 {
            adj.set(0, 0, HomForm::one(self.nvars));
            return adj;
        }
        for i in 0..n {
            for j in 0..n {
                let rows: Vec<usize> = (0..n).filter(|&r| r != j).collect();
                let cols: Vec<usize> = (0..n).filter(|&c| c != i).collect();
                let cof = self.submatrix(&rows, &cols).det();
                adj.set(i, j, if (i + j) % 2 == 0 { cof } else { -&cof });
            }
        }
        adj
    }

    /// Determinants of the minors on `rows` for every column subset of size
    /// `rows.len()`, keyed by column bitmask. Laplace expansion along the last
    /// row, computed level by level so each smaller minor is formed once.
    fn minors_on_rows(&self, rows: &[usize]) -> HashMap<u64, HomForm<F>> {
        assert!(self.cols <= 63, "too many columns for minor enumeration");
        let mut level: HashMap<u64, HomForm<F>> = HashMap::new();
        level.insert(0, HomForm::one(self.nvars));
        for (depth, &r) in rows.iter().enumerate() {
            let mut next: HashMap<u64, HomForm<F>> = HashMap::new();
            for (&mask, sub) in &level {
                for j in 0..self.cols {
                    if mask & (1 << j) != 0 {
                        continue;
                    }
                    let new_mask = mask | (1 << j);
                    // position of column j inside the new subset
                    let pos = (new_mask & ((1u64 << j) - 1)).count_ones() as usize;
                    let term = self.get(r, j) * sub;
                    let term = if (depth + pos).is_multiple_of(2) { term } else { -&term };
                    let slot = next
                        .entry(new_mask)
                        .or_insert_with(|| HomForm::zero(self.nvars, 0));
                    *slot = &*slot + &term;
                }
            }
            level = next;
        }
        level
    }

    /// All `k × k` minors, rows and columns in lexicographic order.
    pub fn minors(&self, k: usize) -> Vec<Minor<F>> {
        if k > self.rows || k > self.cols {
            return Vec::new();
        }
        let mut out = Vec::new();
        for rows in subsets(self.rows, k) {
            let table = self.minors_on_rows(&rows);
            let mut keyed: Vec<(Vec<usize>, HomForm<F>)> = table
                .into_iter()
                .map(|(mask, det)| ((0..self.cols).filter(|j| mask & (1 << j) != 0).collect(), det))
                .collect();
            keyed.sort_by(|a, b| a.0.cmp(&b.0));
            out.extend(keyed.into_iter().map(|(cols, det)| Minor {
                rows: rows.clone(),
                cols,
                det,
            }));
        }
        out
    }
}

/// `k`-subsets of `0..n` in lexicographic order.
pub fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            if n - i < k - cur.len() {
                break;
            }
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    if k <= n {
        rec(0, n, k, &mut Vec::with_capacity(k), &mut out);
    }
    out
}

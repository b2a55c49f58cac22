//! Dense matrices over F_q with exact row reduction.

use crate::gf::{Fe, FieldCtx};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<Fe>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix {
            rows,
            cols,
            data: vec![Fe::ZERO; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Matrix::zeros(n, n);
        for i in 0..n {
            m.set(i, i, Fe::ONE);
        }
        m
    }

    pub fn from_rows(cols: usize, rows: Vec<Vec<Fe>>) -> Self {
        let r = rows.len();
        let mut data = Vec::with_capacity(r * cols);
        for row in rows {
            assert_eq!(row.len(), cols, "ragged matrix");
            data.extend(row);
        }
        Matrix { rows: r, cols, data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> Fe {
        self.data[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: Fe) {
        self.data[r * self.cols + c] = v;
    }

    pub fn row(&self, r: usize) -> &[Fe] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn row_vecs(&self) -> Vec<Vec<Fe>> {
        (0..self.rows).map(|r| self.row(r).to_vec()).collect()
    }

    pub fn push_row(&mut self, row: &[Fe]) {
        assert_eq!(row.len(), self.cols);
        self.data.extend_from_slice(row);
        self.rows += 1;
    }

    pub fn transpose(&self) -> Matrix {
        let mut t = Matrix::zeros(self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                t.set(c, r, self.get(r, c));
            }
        }
        t
    }

    /// Scales column `c` by `x[c]`.
    pub fn scale_columns(&self, ctx: &FieldCtx, x: &[Fe]) -> Matrix {
        assert_eq!(x.len(), self.cols);
        let mut out = self.clone();
        for r in 0..self.rows {
            for (c, &xc) in x.iter().enumerate() {
                out.set(r, c, ctx.mul(self.get(r, c), xc));
            }
        }
        out
    }

    /// Reduced row-echelon form in place; returns pivot columns. Zero rows are
    /// dropped.
    pub fn rref(&mut self, ctx: &FieldCtx) -> Vec<usize> {
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..self.cols {
            if r == self.rows {
                break;
            }
            let Some(pr) = (r..self.rows).find(|&i| !self.get(i, c).is_zero()) else {
                continue;
            };
            self.swap_rows(r, pr);
            let inv = ctx.inv(self.get(r, c)).expect("pivot is nonzero");
            for j in c..self.cols {
                let v = ctx.mul(self.get(r, j), inv);
                self.set(r, j, v);
            }
            for i in 0..self.rows {
                if i == r {
                    continue;
                }
                let f = self.get(i, c);
                if f.is_zero() {
                    continue;
                }
                for j in c..self.cols {
                    let v = ctx.sub(self.get(i, j), ctx.mul(f, self.get(r, j)));
                    self.set(i, j, v);
                }
            }
            pivots.push(c);
            r += 1;
        }
        self.data.truncate(r * self.cols);
        self.rows = r;
        pivots
    }

    pub fn rank(&self, ctx: &FieldCtx) -> usize {
        self.clone().rref(ctx).len()
    }

    /// Basis (as matrix rows) of the right null space {v : A v = 0}, in
    /// reduced echelon form.
    pub fn null_space(&self, ctx: &FieldCtx) -> Matrix {
        let mut m = self.clone();
        let pivots = m.rref(ctx);
        let free: Vec<usize> = (0..self.cols).filter(|c| !pivots.contains(c)).collect();
        let mut basis = Matrix::zeros(0, self.cols);
        for &f in &free {
            let mut v = vec![Fe::ZERO; self.cols];
            v[f] = Fe::ONE;
            for (i, &pc) in pivots.iter().enumerate() {
                v[pc] = ctx.neg(m.get(i, f));
            }
            basis.push_row(&v);
        }
        basis.rref(ctx);
        basis
    }

    /// `self · v`.
    pub fn mul_vec(&self, ctx: &FieldCtx, v: &[Fe]) -> Vec<Fe> {
        (0..self.rows)
            .map(|r| dot(ctx, self.row(r), v))
            .collect()
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for c in 0..self.cols {
            self.data.swap(a * self.cols + c, b * self.cols + c);
        }
    }
}

pub fn dot(ctx: &FieldCtx, a: &[Fe], b: &[Fe]) -> Fe {
    a.iter()
        .zip(b)
        .fold(Fe::ZERO, |acc, (&x, &y)| ctx.add(acc, ctx.mul(x, y)))
}

/// Canonical reduced echelon form of the row space.
pub fn row_space(ctx: &FieldCtx, m: &Matrix) -> Matrix {
    let mut c = m.clone();
    c.rref(ctx);
    c
}

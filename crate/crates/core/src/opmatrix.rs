//! Matrices whose entries are operators on a model space.
//!
//! An `r × c` operator matrix flattens to an `(r·M) × (c·M)` scalar matrix
//! with the auxiliary index slow and the model index fast, so relations like
//! `L¹ W² = R W² L¹` are evaluated with the ordinary leg machinery on
//! `aux ⊗ aux ⊗ model`.

use crate::error::{Error, Result};
use crate::matrix::RingMatrix;
use crate::scalar::{Backend, Scalar};

#[derive(Clone, Debug, PartialEq)]
pub struct OpMatrix<S> {
    rows: usize,
    cols: usize,
    model_dim: usize,
    entries: Vec<RingMatrix<S>>,
}

impl<S: Scalar> OpMatrix<S> {
    pub fn new(rows: usize, cols: usize, entries: Vec<RingMatrix<S>>) -> Result<Self> {
        if entries.len() != rows * cols || entries.is_empty() {
            return Err(Error::Shape(format!("{rows}x{cols} operator matrix needs {} entries", rows * cols)));
        }
        let m = entries[0].rows();
        if entries.iter().any(|e| e.rows() != m || e.cols() != m) {
            return Err(Error::Shape("operator entries must share one square model dimension".into()));
        }
        Ok(OpMatrix { rows, cols, model_dim: m, entries })
    }

    pub fn zeros(rows: usize, cols: usize, model_dim: usize) -> Self {
        OpMatrix { rows, cols, model_dim, entries: vec![RingMatrix::zeros(model_dim, model_dim); rows * cols] }
    }

    /// Identity operator on the diagonal.
    pub fn identity(n: usize, model_dim: usize) -> Self {
        let mut m = Self::zeros(n, n, model_dim);
        for i in 0..n {
            m.entries[i * n + i] = RingMatrix::identity(model_dim);
        }
        m
    }

    /// `A ⊗ 1` for a scalar matrix `A`.
    pub fn from_scalars(a: &RingMatrix<S>, model_dim: usize) -> Self {
        let id = RingMatrix::identity(model_dim);
        let entries = a.data().iter().map(|x| id.scale(x)).collect();
        OpMatrix { rows: a.rows(), cols: a.cols(), model_dim, entries }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn model_dim(&self) -> usize {
        self.model_dim
    }

    pub fn get(&self, i: usize, j: usize) -> &RingMatrix<S> {
        &self.entries[i * self.cols + j]
    }

    pub fn get_mut(&mut self, i: usize, j: usize) -> &mut RingMatrix<S> {
        &mut self.entries[i * self.cols + j]
    }

    pub fn entries(&self) -> &[RingMatrix<S>] {
        &self.entries
    }

    /// Auxiliary-space transpose; entries are not transposed.
    pub fn aux_transpose(&self) -> Self {
        let mut entries = Vec::with_capacity(self.entries.len());
        for i in 0..self.cols {
            for j in 0..self.rows {
                entries.push(self.get(j, i).clone());
            }
        }
        OpMatrix { rows: self.cols, cols: self.rows, model_dim: self.model_dim, entries }
    }

    pub fn select_rows(&self, idx: &[usize]) -> Self {
        let entries = idx
            .iter()
            .flat_map(|&i| (0..self.cols).map(move |j| (i, j)))
            .map(|(i, j)| self.get(i, j).clone())
            .collect();
        OpMatrix { rows: idx.len(), cols: self.cols, model_dim: self.model_dim, entries }
    }

    pub fn select_cols(&self, idx: &[usize]) -> Self {
        self.aux_transpose().select_rows(idx).aux_transpose()
    }

    /// Operator-matrix product `(AB)_ij = Σ_k A_ik ∘ B_kj`.
    pub fn compose(&self, rhs: &Self) -> Result<Self> {
        if self.cols != rhs.rows || self.model_dim != rhs.model_dim {
            return Err(Error::Shape("operator matrices do not compose".into()));
        }
        let mut out = Self::zeros(self.rows, rhs.cols, self.model_dim);
        for i in 0..self.rows {
            for j in 0..rhs.cols {
                let mut acc = RingMatrix::zeros(self.model_dim, self.model_dim);
                for k in 0..self.cols {
                    let a = self.get(i, k);
                    let b = rhs.get(k, j);
                    if a.is_zero() || b.is_zero() {
                        continue;
                    }
                    acc = &acc + &(a * b);
                }
                out.entries[i * rhs.cols + j] = acc;
            }
        }
        Ok(out)
    }

    /// `A · self` for a scalar matrix `A` acting on the auxiliary index.
    pub fn scalar_left(&self, a: &RingMatrix<S>) -> Result<Self> {
        Self::from_scalars(a, self.model_dim).compose(self)
    }

    /// `self · A` for a scalar matrix `A`.
    pub fn scalar_right(&self, a: &RingMatrix<S>) -> Result<Self> {
        self.compose(&Self::from_scalars(a, self.model_dim))
    }

    /// Apply a model-space operator to every entry from the right.
    pub fn map_entries(&self, f: impl Fn(&RingMatrix<S>) -> RingMatrix<S>) -> Self {
        OpMatrix {
            rows: self.rows,
            cols: self.cols,
            model_dim: self.model_dim,
            entries: self.entries.iter().map(f).collect(),
        }
    }

    /// `(r·M) × (c·M)` scalar matrix, auxiliary index slow.
    pub fn flatten(&self) -> RingMatrix<S> {
        let m = self.model_dim;
        let mut out = RingMatrix::zeros(self.rows * m, self.cols * m);
        for i in 0..self.rows {
            for j in 0..self.cols {
                let e = self.get(i, j);
                for a in 0..m {
                    for b in 0..m {
                        let x = e.get(a, b);
                        if !x.is_zero() {
                            out.set(i * m + a, j * m + b, x.clone());
                        }
                    }
                }
            }
        }
        out
    }

    /// Inverse of [`flatten`](Self::flatten).
    pub fn unflatten(flat: &RingMatrix<S>, rows: usize, cols: usize) -> Result<Self> {
        if rows == 0 || !flat.rows().is_multiple_of(rows) || flat.cols() != cols * (flat.rows() / rows) {
            return Err(Error::Shape("flattened operator matrix has the wrong shape".into()));
        }
        let m = flat.rows() / rows;
        let mut entries = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                entries.push(RingMatrix::from_fn(m, m, |a, b| flat.get(i * m + a, j * m + b).clone()));
            }
        }
        Ok(OpMatrix { rows, cols, model_dim: m, entries })
    }

    /// Place this operator matrix on auxiliary leg `slot` of a product with
    /// auxiliary dims `row_aux -> col_aux`, the model leg last.
    pub fn embed(&self, slot: usize, row_aux: &[usize], col_aux: &[usize]) -> Result<RingMatrix<S>> {
        if row_aux.get(slot) != Some(&self.rows) || col_aux.get(slot) != Some(&self.cols) {
            return Err(Error::Legs(format!(
                "{}x{} operator matrix does not fit slot {slot} of {row_aux:?}->{col_aux:?}",
                self.rows, self.cols
            )));
        }
        let mut rd = row_aux.to_vec();
        rd.push(self.model_dim);
        let mut cd = col_aux.to_vec();
        cd.push(self.model_dim);
        self.flatten().embed_rect(&[slot, row_aux.len()], &rd, &cd)
    }

    /// Largest entry residual of `self - rhs` restricted to model columns `cols`.
    pub fn restricted_residual<B: Backend<Elem = S>>(&self, rhs: &Self, cols: &[usize], ctx: &B) -> Result<f64> {
        if self.rows != rhs.rows || self.cols != rhs.cols {
            return Err(Error::Shape("operator matrices differ in shape".into()));
        }
        let mut worst: f64 = 0.0;
        for (a, b) in self.entries.iter().zip(&rhs.entries) {
            worst = worst.max(restricted(&a.try_sub(b)?, cols, ctx));
        }
        Ok(worst)
    }
}

/// Largest magnitude among the given model columns of a flattened
/// `aux ⊗ model` matrix (the column pattern repeats for every aux index).
pub fn flat_restricted<B: Backend>(m: &RingMatrix<B::Elem>, model_dim: usize, cols: &[usize], ctx: &B) -> f64 {
    let blocks = m.cols() / model_dim;
    let mut worst: f64 = 0.0;
    for r in 0..m.rows() {
        for blk in 0..blocks {
            for &c in cols {
                worst = worst.max(ctx.magnitude(m.get(r, blk * model_dim + c)));
            }
        }
    }
    worst
}

/// Largest magnitude among the given columns of a square model matrix.
pub fn restricted<B: Backend>(m: &RingMatrix<B::Elem>, cols: &[usize], ctx: &B) -> f64 {
    let mut worst: f64 = 0.0;
    for r in 0..m.rows() {
        for &c in cols {
            worst = worst.max(ctx.magnitude(m.get(r, c)));
        }
    }
    worst
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Laurent;

    fn op(v: i64) -> RingMatrix<Laurent> {
        RingMatrix::identity(2).scale(&Laurent::from_int(v))
    }

    #[test]
    fn flatten_round_trip() {
        let m = OpMatrix::new(2, 2, vec![op(1), op(2), op(3), op(4)]).unwrap();
        let f = m.flatten();
        assert_eq!(f.rows(), 4);
        assert_eq!(f.get(1, 3), &Laurent::from_int(2));
        assert_eq!(OpMatrix::unflatten(&f, 2, 2).unwrap(), m);
    }

    #[test]
    fn compose_matches_flat_product() {
        let a = OpMatrix::new(1, 2, vec![op(1), op(2)]).unwrap();
        let b = OpMatrix::new(2, 1, vec![op(3), op(4)]).unwrap();
        let c = a.compose(&b).unwrap();
        assert_eq!(c.flatten(), &a.flatten() * &b.flatten());
    }
}

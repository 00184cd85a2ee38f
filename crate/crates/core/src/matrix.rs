//! Dense matrices over a [`Scalar`] with tensor-leg bookkeeping.
//!
//! Leg convention: the leftmost tensor factor is the slowest-varying index, so
//! `kron(A, B)[(i,a),(j,b)] = A[i,j] B[a,b]` with flat index `i*dim(B) + a`.
//! Leg positions in this API are 0-based.

use std::ops::{Add, Mul, Neg, Sub};

use nalgebra::DMatrix;
use num_complex::Complex64;
use num_rational::Rational64;
use serde_json::json;

use crate::error::{Error, Result};
use crate::scalar::{Backend, Entries, Laurent, Scalar};

#[derive(Clone, Debug, PartialEq)]
pub struct RingMatrix<S> {
    rows: usize,
    cols: usize,
    data: Vec<S>,
    legs: Vec<usize>,
}

fn digits(mut idx: usize, dims: &[usize], out: &mut [usize]) {
    for k in (0..dims.len()).rev() {
        out[k] = idx % dims[k];
        idx /= dims[k];
    }
}

fn merged_legs(a: &[usize], b: &[usize], rows: usize, cols: usize) -> Vec<usize> {
    let fits = |l: &[usize]| !l.is_empty() && rows == cols && l.iter().product::<usize>() == rows;
    match (fits(a), fits(b)) {
        (true, true) if a == b => a.to_vec(),
        (true, false) => a.to_vec(),
        (false, true) => b.to_vec(),
        _ => Vec::new(),
    }
}

fn compose(digits: impl Iterator<Item = (usize, usize)>) -> usize {
    digits.fold(0, |acc, (d, dim)| acc * dim + d)
}

impl<S: Scalar> RingMatrix<S> {
    pub fn new(rows: usize, cols: usize, data: Vec<S>) -> Result<Self> {
        if rows * cols != data.len() {
            return Err(Error::Shape(format!(
                "{rows}x{cols} matrix needs {} entries, got {}",
                rows * cols,
                data.len()
            )));
        }
        Ok(RingMatrix { rows, cols, data, legs: Vec::new() })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        RingMatrix { rows, cols, data: vec![S::zero(); rows * cols], legs: Vec::new() }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = S::one();
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> S) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        RingMatrix { rows, cols, data, legs: Vec::new() }
    }

    pub fn diag(entries: Vec<S>) -> Self {
        let n = entries.len();
        let mut m = Self::zeros(n, n);
        for (i, x) in entries.into_iter().enumerate() {
            m.data[i * n + i] = x;
        }
        m
    }

    /// Unit matrix `E_ij` (0-based).
    pub fn unit(rows: usize, cols: usize, i: usize, j: usize) -> Self {
        let mut m = Self::zeros(rows, cols);
        m.set(i, j, S::one());
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn data(&self) -> &[S] {
        &self.data
    }

    pub fn get(&self, i: usize, j: usize) -> &S {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: S) {
        self.data[i * self.cols + j] = v;
    }

    pub fn entry_mut(&mut self, i: usize, j: usize) -> &mut S {
        &mut self.data[i * self.cols + j]
    }

    /// Leg dimensions, or `None` when no tensor structure is recorded.
    pub fn legs(&self) -> Option<&[usize]> {
        if self.legs.is_empty() {
            None
        } else {
            Some(&self.legs)
        }
    }

    pub fn with_legs(mut self, legs: &[usize]) -> Result<Self> {
        let p: usize = legs.iter().product();
        if !self.is_square() || p != self.rows {
            return Err(Error::Legs(format!("legs {legs:?} do not factor a {}x{} matrix", self.rows, self.cols)));
        }
        self.legs = legs.to_vec();
        Ok(self)
    }

    fn leg_dims(&self) -> Vec<usize> {
        if self.legs.is_empty() {
            vec![self.rows]
        } else {
            self.legs.clone()
        }
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|x| x.is_zero())
    }

    pub fn nnz(&self) -> usize {
        self.data.iter().filter(|x| !x.is_zero()).count()
    }

    pub fn map<T: Scalar>(&self, f: impl Fn(&S) -> T) -> RingMatrix<T> {
        RingMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(f).collect(),
            legs: self.legs.clone(),
        }
    }

    pub fn scale(&self, c: &S) -> Self {
        let mut m = self.clone();
        for x in &mut m.data {
            if !x.is_zero() {
                *x = x.mul_ref(c);
            }
        }
        m
    }

    pub fn transpose(&self) -> Self {
        let mut m = Self::from_fn(self.cols, self.rows, |i, j| self.get(j, i).clone());
        m.legs = self.legs.clone();
        m
    }

    pub fn trace(&self) -> S {
        let mut t = S::zero();
        for i in 0..self.rows.min(self.cols) {
            t += self.get(i, i);
        }
        t
    }

    /// Checked product.
    pub fn matmul(&self, rhs: &Self) -> Result<Self> {
        if self.cols != rhs.rows {
            return Err(Error::Shape(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, rhs.rows, rhs.cols
            )));
        }
        let n = rhs.cols;
        let nz: Vec<Vec<usize>> =
            (0..rhs.rows).map(|k| (0..n).filter(|&j| !rhs.data[k * n + j].is_zero()).collect()).collect();
        let mut out = Self::zeros(self.rows, n);
        for i in 0..self.rows {
            for (k, nzk) in nz.iter().enumerate() {
                let a = &self.data[i * self.cols + k];
                if a.is_zero() || nzk.is_empty() {
                    continue;
                }
                for &j in nzk {
                    let p = a.mul_ref(&rhs.data[k * n + j]);
                    out.data[i * n + j] += &p;
                }
            }
        }
        out.legs = merged_legs(&self.legs, &rhs.legs, out.rows, out.cols);
        Ok(out)
    }

    fn zip(&self, rhs: &Self, sub: bool) -> Result<Self> {
        if self.rows != rhs.rows || self.cols != rhs.cols {
            return Err(Error::Shape(format!("{}x{} vs {}x{}", self.rows, self.cols, rhs.rows, rhs.cols)));
        }
        let mut out = self.clone();
        for (x, y) in out.data.iter_mut().zip(&rhs.data) {
            if sub {
                *x -= y;
            } else {
                *x += y;
            }
        }
        out.legs = merged_legs(&self.legs, &rhs.legs, out.rows, out.cols);
        Ok(out)
    }

    pub fn try_add(&self, rhs: &Self) -> Result<Self> {
        self.zip(rhs, false)
    }

    pub fn try_sub(&self, rhs: &Self) -> Result<Self> {
        self.zip(rhs, true)
    }

    /// Kronecker product; leg lists concatenate.
    pub fn kron(&self, rhs: &Self) -> Self {
        let (r, c) = (self.rows * rhs.rows, self.cols * rhs.cols);
        let mut out = Self::zeros(r, c);
        for i in 0..self.rows {
            for j in 0..self.cols {
                let a = self.get(i, j);
                if a.is_zero() {
                    continue;
                }
                for k in 0..rhs.rows {
                    for l in 0..rhs.cols {
                        let b = rhs.get(k, l);
                        if !b.is_zero() {
                            out.set(i * rhs.rows + k, j * rhs.cols + l, a.mul_ref(b));
                        }
                    }
                }
            }
        }
        if self.is_square() && rhs.is_square() {
            out.legs = self.leg_dims();
            out.legs.extend(rhs.leg_dims());
        }
        out
    }

    /// Act with `self` on legs `slots` of a tensor product with leg dimensions
    /// `dims`, identity on the remaining legs. `self`'s own legs map to the
    /// slots in the order given.
    pub fn embed(&self, slots: &[usize], dims: &[usize]) -> Result<Self> {
        let mut m = self.embed_rect(slots, dims, dims)?;
        m.legs = dims.to_vec();
        Ok(m)
    }

    /// Rectangular variant of [`embed`](Self::embed): the slot legs may have
    /// different row and column dimensions; other legs must agree.
    pub fn embed_rect(&self, slots: &[usize], row_dims: &[usize], col_dims: &[usize]) -> Result<Self> {
        let nl = row_dims.len();
        if col_dims.len() != nl || slots.iter().any(|&s| s >= nl) {
            return Err(Error::Legs(format!("slots {slots:?} outside {nl} legs")));
        }
        let mut seen = vec![false; nl];
        for &s in slots {
            if std::mem::replace(&mut seen[s], true) {
                return Err(Error::Legs(format!("repeated slot {s}")));
            }
        }
        for k in 0..nl {
            if !seen[k] && row_dims[k] != col_dims[k] {
                return Err(Error::Legs(format!("identity leg {k} is not square")));
            }
        }
        let ar: usize = slots.iter().map(|&s| row_dims[s]).product();
        let ac: usize = slots.iter().map(|&s| col_dims[s]).product();
        if ar != self.rows || ac != self.cols {
            return Err(Error::Legs(format!(
                "{}x{} matrix does not fit slots {slots:?} of {row_dims:?}->{col_dims:?}",
                self.rows, self.cols
            )));
        }
        let rows: usize = row_dims.iter().product();
        let cols: usize = col_dims.iter().product();
        let slot_cdims: Vec<usize> = slots.iter().map(|&s| col_dims[s]).collect();
        let mut out = Self::zeros(rows, cols);
        let mut rd = vec![0; nl];
        let mut cd = vec![0; nl];
        let mut sd = vec![0; slots.len()];
        let nz: Vec<Vec<usize>> =
            (0..self.rows).map(|i| (0..self.cols).filter(|&j| !self.get(i, j).is_zero()).collect()).collect();
        for r in 0..rows {
            digits(r, row_dims, &mut rd);
            let a_row = compose(slots.iter().map(|&s| (rd[s], row_dims[s])));
            for &a_col in &nz[a_row] {
                digits(a_col, &slot_cdims, &mut sd);
                cd.copy_from_slice(&rd);
                for (t, &s) in slots.iter().enumerate() {
                    cd[s] = sd[t];
                }
                let c = compose(cd.iter().copied().zip(col_dims.iter().copied()));
                out.set(r, c, self.get(a_row, a_col).clone());
            }
        }
        Ok(out)
    }

    /// Transpose the indices of one leg only.
    pub fn partial_transpose(&self, leg: usize) -> Result<Self> {
        let dims = self.legs().ok_or_else(|| Error::Legs("partial transpose needs a leg structure".into()))?.to_vec();
        if leg >= dims.len() {
            return Err(Error::Legs(format!("leg {leg} outside {dims:?}")));
        }
        let n = self.rows;
        let mut out = Self::zeros(n, n);
        out.legs = dims.clone();
        let mut rd = vec![0; dims.len()];
        let mut cd = vec![0; dims.len()];
        for r in 0..n {
            digits(r, &dims, &mut rd);
            for c in 0..n {
                let x = self.get(r, c);
                if x.is_zero() {
                    continue;
                }
                digits(c, &dims, &mut cd);
                std::mem::swap(&mut rd[leg], &mut cd[leg]);
                let r2 = compose(rd.iter().copied().zip(dims.iter().copied()));
                let c2 = compose(cd.iter().copied().zip(dims.iter().copied()));
                std::mem::swap(&mut rd[leg], &mut cd[leg]);
                out.set(r2, c2, x.clone());
            }
        }
        Ok(out)
    }

    /// Reorder legs: leg `k` of the result is leg `perm[k]` of `self`.
    pub fn permute_legs(&self, perm: &[usize]) -> Result<Self> {
        let dims = self.legs().ok_or_else(|| Error::Legs("leg permutation needs a leg structure".into()))?.to_vec();
        let mut check = perm.to_vec();
        check.sort_unstable();
        if check != (0..dims.len()).collect::<Vec<_>>() {
            return Err(Error::Legs(format!("{perm:?} is not a permutation of {} legs", dims.len())));
        }
        let new_dims: Vec<usize> = perm.iter().map(|&p| dims[p]).collect();
        let n = self.rows;
        let mut out = Self::zeros(n, n);
        out.legs = new_dims.clone();
        let mut rd = vec![0; dims.len()];
        let mut cd = vec![0; dims.len()];
        for r in 0..n {
            digits(r, &dims, &mut rd);
            let r2 = compose(perm.iter().map(|&p| (rd[p], dims[p])));
            for c in 0..n {
                let x = self.get(r, c);
                if x.is_zero() {
                    continue;
                }
                digits(c, &dims, &mut cd);
                let c2 = compose(perm.iter().map(|&p| (cd[p], dims[p])));
                out.set(r2, c2, x.clone());
            }
        }
        Ok(out)
    }

    /// Permutation `P: V_a ⊗ V_b -> V_b ⊗ V_a`.
    pub fn swap(a: usize, b: usize) -> Self {
        Self::from_fn(a * b, a * b, |r, c| if r == (c % b) * a + c / b { S::one() } else { S::zero() })
    }

    /// Swap the two legs of a two-leg matrix (`P M P`).
    pub fn flip(&self) -> Result<Self> {
        self.permute_legs(&[1, 0])
    }

    pub fn select_rows(&self, idx: &[usize]) -> Self {
        Self::from_fn(idx.len(), self.cols, |i, j| self.get(idx[i], j).clone())
    }

    pub fn select_cols(&self, idx: &[usize]) -> Self {
        Self::from_fn(self.rows, idx.len(), |i, j| self.get(i, idx[j]).clone())
    }

    pub fn column(&self, j: usize) -> Vec<S> {
        (0..self.rows).map(|i| self.get(i, j).clone()).collect()
    }

    pub fn apply(&self, v: &[S]) -> Vec<S> {
        (0..self.rows)
            .map(|i| {
                let mut acc = S::zero();
                for (j, x) in v.iter().enumerate() {
                    let a = self.get(i, j);
                    if !a.is_zero() && !x.is_zero() {
                        acc += &a.mul_ref(x);
                    }
                }
                acc
            })
            .collect()
    }

    /// Inverse by Gauss-Jordan elimination.
    ///
    /// Pivots must be invertible in the ring: numerically the largest entry
    /// in the column is chosen, exactly the first monomial. Triangular
    /// matrices with monomial diagonals therefore always invert exactly.
    pub fn inverse(&self) -> Result<Self> {
        if !self.is_square() {
            return Err(Error::Shape(format!("{}x{} is not square", self.rows, self.cols)));
        }
        let n = self.rows;
        let mut a = self.clone();
        let mut inv = Self::identity(n);
        for col in 0..n {
            let pivot = if S::exact() {
                (col..n).find(|&r| a.get(r, col).inverse().is_some())
            } else {
                (col..n).filter(|&r| !a.get(r, col).is_zero()).max_by(|&x, &y| {
                    let nx = a.get(x, col).eval(1.0).norm();
                    let ny = a.get(y, col).eval(1.0).norm();
                    nx.total_cmp(&ny)
                })
            };
            let p = pivot.ok_or(Error::Singular)?;
            if p != col {
                a.swap_rows(p, col);
                inv.swap_rows(p, col);
            }
            let pinv = a.get(col, col).inverse().ok_or(Error::Singular)?;
            a.scale_row(col, &pinv);
            inv.scale_row(col, &pinv);
            let a_nz: Vec<usize> = (0..n).filter(|&j| !a.get(col, j).is_zero()).collect();
            let i_nz: Vec<usize> = (0..n).filter(|&j| !inv.get(col, j).is_zero()).collect();
            for r in 0..n {
                if r == col || a.get(r, col).is_zero() {
                    continue;
                }
                let f = a.get(r, col).clone();
                for &j in &a_nz {
                    let d = f.mul_ref(a.get(col, j));
                    *a.entry_mut(r, j) -= &d;
                }
                for &j in &i_nz {
                    let d = f.mul_ref(inv.get(col, j));
                    *inv.entry_mut(r, j) -= &d;
                }
            }
        }
        inv.legs = self.legs.clone();
        Ok(inv)
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    fn scale_row(&mut self, r: usize, c: &S) {
        for j in 0..self.cols {
            let x = &mut self.data[r * self.cols + j];
            if !x.is_zero() {
                *x = x.mul_ref(c);
            }
        }
    }

    /// Lift every entry into a backend with the same element type.
    pub fn to_json(&self, backend: &str) -> serde_json::Value {
        json!({
            "rows": self.rows,
            "cols": self.cols,
            "legs": self.legs,
            "backend": backend,
            "entries": serde_json::to_value(Entries(&self.data)).expect("entries serialize"),
        })
    }
}

impl RingMatrix<Laurent> {
    /// Evaluate an exact matrix in any backend.
    pub fn lift<B: Backend>(&self, ctx: &B) -> RingMatrix<B::Elem> {
        RingMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|x| ctx.lift(x)).collect(),
            legs: self.legs.clone(),
        }
    }
}

impl<S: Scalar> Mul for &RingMatrix<S> {
    type Output = RingMatrix<S>;
    fn mul(self, rhs: &RingMatrix<S>) -> RingMatrix<S> {
        self.matmul(rhs).expect("matrix product shape")
    }
}

impl<S: Scalar> Add for &RingMatrix<S> {
    type Output = RingMatrix<S>;
    fn add(self, rhs: &RingMatrix<S>) -> RingMatrix<S> {
        self.try_add(rhs).expect("matrix sum shape")
    }
}

impl<S: Scalar> Sub for &RingMatrix<S> {
    type Output = RingMatrix<S>;
    fn sub(self, rhs: &RingMatrix<S>) -> RingMatrix<S> {
        self.try_sub(rhs).expect("matrix difference shape")
    }
}

impl<S: Scalar> Neg for &RingMatrix<S> {
    type Output = RingMatrix<S>;
    fn neg(self) -> RingMatrix<S> {
        let mut m = self.clone();
        for x in &mut m.data {
            if !x.is_zero() {
                *x = -x.clone();
            }
        }
        m
    }
}

/// Largest entry magnitude (exact nonzero entries never report 0).
pub fn max_norm<B: Backend>(m: &RingMatrix<B::Elem>, ctx: &B) -> f64 {
    m.data().iter().map(|x| ctx.magnitude(x)).fold(0.0, f64::max)
}

/// `max |A - B|` entrywise.
pub fn residual_norm<B: Backend>(a: &RingMatrix<B::Elem>, b: &RingMatrix<B::Elem>, ctx: &B) -> Result<f64> {
    Ok(max_norm(&a.try_sub(b)?, ctx))
}

/// `(P+, P-)`.
pub type ProjectorPair<S> = (Projector<S>, Projector<S>);

/// A projector stored as `numer / denom`. Exact projectors need the
/// denominator because `1/[2]` is not a Laurent polynomial.
#[derive(Clone, Debug, PartialEq)]
pub struct Projector<S> {
    pub numer: RingMatrix<S>,
    pub denom: S,
}

impl<S: Scalar> Projector<S> {
    pub fn from_matrix(m: RingMatrix<S>) -> Self {
        Projector { numer: m, denom: S::one() }
    }

    pub fn dim(&self) -> usize {
        self.numer.rows()
    }

    /// The projector itself when the denominator is invertible.
    pub fn matrix(&self) -> Option<RingMatrix<S>> {
        self.denom.inverse().map(|d| self.numer.scale(&d))
    }

    /// `numer^2 - denom * numer`, zero iff the projector is idempotent.
    pub fn idempotence_defect(&self) -> RingMatrix<S> {
        &(&self.numer * &self.numer) - &self.numer.scale(&self.denom)
    }

    /// `I - P`.
    pub fn complement(&self) -> Self {
        let n = self.numer.rows();
        let mut numer = &RingMatrix::identity(n).scale(&self.denom) - &self.numer;
        numer.legs = self.numer.legs.clone();
        Projector { numer, denom: self.denom.clone() }
    }

    /// Rank via `trace(numer) = rank * denom`, checked exactly.
    pub fn rank<B: Backend<Elem = S>>(&self, ctx: &B) -> Result<usize> {
        let tr = self.numer.trace();
        let approx = tr.eval(ctx.q()) / self.denom.eval(ctx.q());
        let k = approx.re.round();
        if k < 0.0 || (approx.re - k).abs() > 1e-6 || approx.im.abs() > 1e-6 {
            return Err(Error::NotIdempotent((approx.re - k).abs()));
        }
        let scaled = self.denom.mul_ref(&S::from_i64(k as i64));
        let defect = tr - scaled;
        if ctx.magnitude(&defect) > 1e-9 * ctx.magnitude(&self.denom).max(1.0) {
            return Err(Error::NotIdempotent(ctx.magnitude(&defect)));
        }
        Ok(k as usize)
    }
}

/// q-symmetrizer and q-antisymmetrizer of the fundamental sl(n) R-matrix,
/// `P- = (q I - q^(1/n) Rhat) / [2]`, `P+ = I - P-`.
pub fn hecke_projectors<B: Backend>(rhat: &RingMatrix<B::Elem>, n: usize, ctx: &B) -> Result<ProjectorPair<B::Elem>> {
    let d = rhat.rows();
    if !rhat.is_square() || d != n * n {
        return Err(Error::Shape(format!("Rhat must be {0}x{0}", n * n)));
    }
    let t = ctx.q_pow(Rational64::new(1, n as i64))?;
    let q = ctx.q_int(1);
    let qinv = ctx.q_int(-1);
    let id = RingMatrix::identity(d);
    let x = rhat.scale(&t);
    // (x - q)(x + q^-1) = 0
    let hecke = &(&x - &id.scale(&q)) * &(&x + &id.scale(&qinv));
    let defect = max_norm(&hecke, ctx);
    if defect > 1e-9 {
        return Err(Error::HeckeRelation(defect));
    }
    let two = ctx.lift(&Laurent::qnum(2));
    let mut numer = &id.scale(&q) - &x;
    numer.legs = vec![n, n];
    let mut minus = Projector { numer, denom: two };
    if !B::Elem::exact() {
        minus = Projector::from_matrix(minus.matrix().ok_or(Error::Singular)?.with_legs(&[n, n])?);
    }
    let plus = minus.complement();
    Ok((plus, minus))
}

/// Dense nalgebra copy of a numeric matrix.
pub fn to_dense(m: &RingMatrix<Complex64>) -> DMatrix<Complex64> {
    DMatrix::from_row_slice(m.rows(), m.cols(), m.data())
}

pub fn from_dense(m: &DMatrix<Complex64>) -> RingMatrix<Complex64> {
    RingMatrix::from_fn(m.nrows(), m.ncols(), |i, j| m[(i, j)])
}

/// Right null space of `a` (columns) and all singular values, ascending.
fn null_space(a: &DMatrix<Complex64>, cutoff: f64) -> (DMatrix<Complex64>, Vec<f64>) {
    let n = a.ncols();
    // pad to square so that v_t has a full set of right vectors
    let mut sq = DMatrix::zeros(n.max(a.nrows()), n);
    sq.view_mut((0, 0), (a.nrows(), n)).copy_from(a);
    let svd = sq.svd(false, true);
    let v_t = svd.v_t.expect("right singular vectors requested");
    let mut sv: Vec<(f64, usize)> = svd.singular_values.iter().copied().zip(0..).collect();
    sv.sort_by(|x, y| x.0.total_cmp(&y.0));
    let kernel: Vec<usize> = sv.iter().filter(|(s, _)| *s < cutoff).map(|&(_, i)| i).collect();
    let mut basis = DMatrix::zeros(n, kernel.len());
    for (c, &i) in kernel.iter().enumerate() {
        for r in 0..n {
            basis[(r, c)] = v_t[(i, r)].conj();
        }
    }
    (basis, sv.into_iter().map(|(s, _)| s).collect())
}

/// Numeric null space of a matrix as columns.
pub fn kernel(m: &RingMatrix<Complex64>, cutoff: f64) -> RingMatrix<Complex64> {
    from_dense(&null_space(&to_dense(m), cutoff).0)
}

/// Projector onto the `eigenvalue` eigenspace of a diagonalizable matrix,
/// along the other eigenspaces.
pub fn spectral_projector(m: &RingMatrix<Complex64>, eigenvalue: Complex64, tol: f64) -> Result<RingMatrix<Complex64>> {
    if !m.is_square() {
        return Err(Error::Shape("spectral projector needs a square matrix".into()));
    }
    let n = m.rows();
    let scale = m.data().iter().map(|x| x.norm()).fold(1.0, f64::max);
    let a = to_dense(m) - DMatrix::identity(n, n) * eigenvalue;
    let cutoff = tol * scale;
    let (right, sv) = null_space(&a, cutoff);
    if right.ncols() == 0 {
        return Err(Error::EigenvalueNotFound(sv.first().copied().unwrap_or(f64::INFINITY)));
    }
    if let Some(&s) = sv.iter().find(|&&s| s >= cutoff && s < 100.0 * cutoff) {
        return Err(Error::ClusterUnresolved(s));
    }
    let (left, _) = null_space(&a.adjoint(), cutoff);
    if left.ncols() != right.ncols() {
        return Err(Error::ClusterUnresolved(0.0));
    }
    let gram = left.adjoint() * &right;
    let gi = gram.try_inverse().ok_or(Error::Singular)?;
    let p = &right * gi * left.adjoint();
    let mut out = from_dense(&p);
    out.legs = m.legs.clone();
    Ok(out)
}

/// Basis of the image of a projector together with its dual (`dual * basis = I`,
/// `basis * dual = P`).
#[derive(Clone, Debug, PartialEq)]
pub struct ImageBasis {
    pub basis: RingMatrix<Complex64>,
    pub dual: RingMatrix<Complex64>,
}

impl ImageBasis {
    pub fn rank(&self) -> usize {
        self.basis.cols()
    }

    /// Gram-Schmidt over the columns of `p` taken in decreasing weight
    /// order; each vector is phased so its first nonzero entry is positive.
    /// When `p` preserves weights the result is a weight basis.
    pub fn weight_adapted(p: &RingMatrix<Complex64>, weights: &[Rational64]) -> Result<Self> {
        let n = p.rows();
        if weights.len() != n || !p.is_square() {
            return Err(Error::Shape("weights must label every row of the projector".into()));
        }
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| weights[b].cmp(&weights[a]).then(a.cmp(&b)));
        let mut vecs: Vec<Vec<Complex64>> = Vec::new();
        for &j in &order {
            let mut v = p.column(j);
            for u in &vecs {
                let dot: Complex64 = u.iter().zip(&v).map(|(a, b)| a.conj() * b).sum();
                for (x, y) in v.iter_mut().zip(u) {
                    *x -= dot * y;
                }
            }
            let norm = v.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
            if norm < 1e-9 {
                continue;
            }
            let lead = v.iter().find(|x| x.norm() > 1e-12 * norm).copied().unwrap_or(Complex64::new(1.0, 0.0));
            let phase = lead.conj() / lead.norm();
            for x in &mut v {
                *x *= phase / norm;
            }
            vecs.push(v);
        }
        let k = vecs.len();
        let basis = RingMatrix::from_fn(n, k, |i, j| vecs[j][i]);
        Self::with_projector(basis, p)
    }

    /// Use a given image basis; the dual is `B^+ P`.
    pub fn with_projector(basis: RingMatrix<Complex64>, p: &RingMatrix<Complex64>) -> Result<Self> {
        let b = to_dense(&basis);
        let g = (b.adjoint() * &b).try_inverse().ok_or(Error::Singular)?;
        let dual = from_dense(&(g * b.adjoint() * to_dense(p)));
        Ok(ImageBasis { basis, dual })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{Exact, Numeric};

    fn ints(r: usize, c: usize, v: &[i64]) -> RingMatrix<Laurent> {
        RingMatrix::new(r, c, v.iter().map(|&x| Laurent::from_int(x)).collect()).unwrap()
    }

    #[test]
    fn kron_unit_example() {
        let e12 = RingMatrix::<Laurent>::unit(2, 2, 0, 1);
        let e21 = RingMatrix::<Laurent>::unit(2, 2, 1, 0);
        let k = e12.kron(&e21);
        assert_eq!(k.nnz(), 1);
        assert_eq!(k.get(1, 2), &Laurent::from_int(1));
        assert_eq!(k.legs(), Some(&[2, 2][..]));
        let i2 = RingMatrix::<Laurent>::identity(2);
        assert_eq!(i2.kron(&i2).data(), RingMatrix::<Laurent>::identity(4).data());
    }

    #[test]
    fn embed_matches_kron() {
        let m = ints(2, 2, &[1, 2, 3, 4]);
        let i2 = RingMatrix::identity(2);
        assert_eq!(m.embed(&[0], &[2, 2]).unwrap(), m.kron(&i2));
        assert_eq!(m.embed(&[1], &[2, 2]).unwrap(), i2.kron(&m));
        let r = ints(4, 4, &(1..=16).collect::<Vec<_>>()).with_legs(&[2, 2]).unwrap();
        let r13 = r.embed(&[0, 2], &[2, 2, 2]).unwrap();
        let direct = r.kron(&i2).permute_legs(&[0, 2, 1]).unwrap();
        assert_eq!(r13, direct);
    }

    #[test]
    fn partial_transpose_factorized() {
        let a = ints(2, 2, &[1, 2, 3, 4]);
        let b = ints(2, 2, &[5, 6, 7, 8]);
        let k = a.kron(&b);
        assert_eq!(k.partial_transpose(0).unwrap(), a.transpose().kron(&b));
        let t = k.partial_transpose(0).unwrap().partial_transpose(1).unwrap();
        assert_eq!(t, k.transpose());
    }

    #[test]
    fn exact_inverse_of_triangular() {
        let q = Laurent::q_int(1);
        let m = RingMatrix::new(2, 2, vec![q.clone(), Laurent::qnum(3), Laurent::zero(), q.clone()]).unwrap();
        let inv = m.inverse().unwrap();
        assert_eq!(&m * &inv, RingMatrix::identity(2));
        let ctx = Exact::new();
        assert_eq!(residual_norm(&(&inv * &m), &RingMatrix::identity(2), &ctx).unwrap(), 0.0);
    }

    #[test]
    fn spectral_projector_diagonal() {
        let c = |x: f64| Complex64::new(x, 0.0);
        let m = RingMatrix::diag(vec![c(2.0), c(2.0), c(5.0)]);
        let p = spectral_projector(&m, c(5.0), 1e-10).unwrap();
        let want = RingMatrix::diag(vec![c(0.0), c(0.0), c(1.0)]);
        let ctx = Numeric::default();
        assert!(residual_norm(&p, &want, &ctx).unwrap() < 1e-12);
        assert!(matches!(spectral_projector(&m, c(3.0), 1e-10), Err(Error::EigenvalueNotFound(_))));
    }

    #[test]
    fn residual_reports_single_entry() {
        let ctx = Numeric::default();
        let i = RingMatrix::<Complex64>::identity(3);
        let mut j = i.clone();
        *j.entry_mut(0, 0) += &Complex64::new(1e-9, 0.0);
        let r = residual_norm(&i, &j, &ctx).unwrap();
        assert!((r - 1e-9).abs() < 1e-15);
    }
}

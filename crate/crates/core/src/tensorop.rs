//! Generating matrices of covariant and contravariant q-tensor operators.
//!
//! A generating matrix is an auxiliary-space matrix whose entries are
//! operators on the model space. Covariant matrices `U` satisfy
//! `L¹ U² = U² R L¹`, contravariant ones `W` satisfy `L¹ W² = R^(-1) W² L¹`.
//! Entries raise the degree by at most `margin`, so every relation is tested
//! on model columns of degree `<= D - margin`.

use std::fmt;

use num_complex::Complex64;
use num_rational::Rational64;
use num_traits::{One, Zero};
use serde::Serialize;
use serde_json::json;

use crate::error::{Error, Result};
use crate::matrix::{max_norm, ImageBasis, Projector, RingMatrix};
use crate::opmatrix::{flat_restricted, restricted, OpMatrix};
use crate::rep::{ModelSpace, Normalizer, RepLabel, Representation, Spin};
use crate::report::Residual;
use crate::rmatrix::{LOperator, RMatrix};
use crate::scalar::{Backend, Numeric, Scalar};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Kind {
    Covariant,
    Contravariant,
}

impl Kind {
    pub fn flipped(self) -> Self {
        match self {
            Kind::Covariant => Kind::Contravariant,
            Kind::Contravariant => Kind::Covariant,
        }
    }
}

impl fmt::Display for Kind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Kind::Covariant => "covariant",
            Kind::Contravariant => "contravariant",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GeneratingMatrix<S> {
    pub kind: Kind,
    pub label: RepLabel,
    pub ops: OpMatrix<S>,
    /// Largest net degree raise of any entry.
    pub margin: usize,
    pub gamma: Rational64,
    pub normalizer: Normalizer,
    pub provenance: String,
}

impl<S: Scalar> GeneratingMatrix<S> {
    pub fn rows(&self) -> usize {
        self.ops.rows()
    }

    pub fn cols(&self) -> usize {
        self.ops.cols()
    }

    pub fn get(&self, i: usize, j: usize) -> &RingMatrix<S> {
        self.ops.get(i, j)
    }

    fn derived(&self, kind: Kind, ops: OpMatrix<S>, provenance: String) -> Self {
        GeneratingMatrix {
            kind,
            label: self.label.clone(),
            ops,
            margin: self.margin,
            gamma: self.gamma,
            normalizer: self.normalizer,
            provenance,
        }
    }

    /// Keep only the given rows; a single row of a covariant matrix is
    /// still a tensor operator.
    pub fn select_rows(&self, idx: &[usize]) -> Self {
        self.derived(self.kind, self.ops.select_rows(idx), format!("rows {idx:?} of {}", self.provenance))
    }

    pub fn select_cols(&self, idx: &[usize]) -> Self {
        self.derived(self.kind, self.ops.select_cols(idx), format!("columns {idx:?} of {}", self.provenance))
    }

    /// `A · G` with a scalar matrix on the auxiliary side (e.g. row combinations).
    pub fn combine_rows(&self, a: &RingMatrix<S>) -> Result<Self> {
        Ok(self.derived(self.kind, self.ops.scalar_left(a)?, format!("row combination of {}", self.provenance)))
    }

    pub fn combine_cols(&self, a: &RingMatrix<S>) -> Result<Self> {
        Ok(self.derived(self.kind, self.ops.scalar_right(a)?, format!("column combination of {}", self.provenance)))
    }

    /// Replace one model-space entry by `entry + delta·E_(a,b)`.
    pub fn perturbed(&self, i: usize, j: usize, a: usize, b: usize, delta: &S) -> Self {
        let mut out = self.clone();
        *out.ops.get_mut(i, j).entry_mut(a, b) += delta;
        out.provenance = format!("perturbed {}", self.provenance);
        out
    }

    pub fn to_json(&self, backend: &str) -> serde_json::Value {
        let entries: Vec<Vec<_>> =
            (0..self.rows()).map(|i| (0..self.cols()).map(|j| self.get(i, j).to_json(backend)).collect()).collect();
        json!({
            "kind": self.kind,
            "label": self.label.to_string(),
            "gamma": self.gamma.to_string(),
            "normalizer": self.normalizer,
            "margin": self.margin,
            "provenance": self.provenance,
            "model_dimension": self.ops.model_dim(),
            "entries": entries,
        })
    }
}

/// The four operator skeletons times `c_ij = sign_ij q^(e_ij)`, `sign = (+, -, +, +)`.
fn w_half<B: Backend>(
    model: &ModelSpace<B>,
    normalizer: Normalizer,
    exps: [(i64, i64); 4],
    provenance: &str,
) -> Result<GeneratingMatrix<B::Elem>> {
    let ctx = model.ctx();
    let g = model.gamma();
    let half = Rational64::new(1, 2);
    let f = model.normalizer(normalizer)?;
    let up = model.q_spin(g)?;
    let down = model.q_spin(-g)?;
    let d2 = model.dilation_z2(half)?;
    let d1 = model.dilation_z1(-half)?;
    let skeleton = [
        &(&(&model.lower_z1() * &down) * &d2) * &f,
        &(&(&model.mul_z2() * &up) * &d1) * &f,
        &(&(&model.lower_z2() * &down) * &d1) * &f,
        &(&(&model.mul_z1() * &up) * &d2) * &f,
    ];
    let mut entries = Vec::with_capacity(4);
    for (k, e) in skeleton.iter().enumerate() {
        let mut c = ctx.q_pow(Rational64::new(exps[k].0, exps[k].1))?;
        if k == 1 {
            c = -c;
        }
        entries.push(e.scale(&c));
    }
    Ok(GeneratingMatrix {
        kind: Kind::Contravariant,
        label: RepLabel::Spin(Spin::HALF),
        ops: OpMatrix::new(2, 2, entries)?,
        margin: 1,
        gamma: g,
        normalizer,
        provenance: provenance.into(),
    })
}

/// The spin-½ contravariant generating matrix on the model space:
///
/// ```text
/// W = [[ z1^(-1)[z1∂1] q^(-γp) q^( z2∂2/2),  -q^(-1/2) z2 q^(γp) q^(-z1∂1/2) ],
///      [ z2^(-1)[z2∂2] q^(-γp) q^(-z1∂1/2),   q^(1/2)  z1 q^(γp) q^( z2∂2/2) ]] · f(p)
/// ```
///
/// Relative to the commonly quoted form the rows carry an extra
/// `q^(∓1/2)`; with it the contravariant relation holds for the R-matrices
/// used here. [`build_w_half_printed`] gives the other normalization.
pub fn build_w_half<B: Backend>(model: &ModelSpace<B>, normalizer: Normalizer) -> Result<GeneratingMatrix<B::Elem>> {
    w_half(model, normalizer, [(0, 1), (-1, 2), (0, 1), (1, 2)], "spin-1/2 model-space realization")
}

/// Row prefactors `q^(1/2), q^(-1/2)` on the `(1,1)`, `(2,1)` entries and none
/// on the others. Does not satisfy the contravariant relation; kept for comparison.
pub fn build_w_half_printed<B: Backend>(
    model: &ModelSpace<B>,
    normalizer: Normalizer,
) -> Result<GeneratingMatrix<B::Elem>> {
    w_half(model, normalizer, [(1, 2), (0, 1), (-1, 2), (0, 1)], "spin-1/2 realization, alternative row normalization")
}

/// Default normalizer per backend: identity when exact, `1/sqrt([p])` numerically.
pub fn default_normalizer<B: Backend>() -> Normalizer {
    if B::Elem::exact() {
        Normalizer::Identity
    } else {
        Normalizer::InverseSqrtQnum
    }
}

/// Matrix form of the q-Weyl element.
///
/// Spin s (1-based `m, k`): `W_mk = (-1)^k q^(s+1-m) δ(m, 2s+2-k)`.
/// Fundamental sl(n): `W_mk = (-1)^k q^(k-(n+1)/2) δ(m, n-k+1)`.
pub fn weyl_matrix<B: Backend>(label: &RepLabel, ctx: &B) -> Result<RingMatrix<B::Elem>> {
    let sign = |k: usize| if k.is_multiple_of(2) { 1 } else { -1 };
    match label {
        RepLabel::Spin(s) => {
            let n = s.dim();
            let mut w = RingMatrix::zeros(n, n);
            for k in 1..=n {
                let m = n + 1 - k;
                let e = s.value() + Rational64::from_integer(1 - m as i64);
                w.set(m - 1, k - 1, ctx.q_pow(e)?.mul_ref(&ctx.int(sign(k))));
            }
            Ok(w)
        }
        RepLabel::Fundamental(n) => {
            let n = *n;
            let mut w = RingMatrix::zeros(n, n);
            for k in 1..=n {
                let e = Rational64::new(2 * k as i64 - (n as i64 + 1), 2);
                w.set(n - k, k - 1, ctx.q_pow(e)?.mul_ref(&ctx.int(sign(k))));
            }
            Ok(w)
        }
        other => Err(Error::RepMismatch(format!("no Weyl matrix for {other}"))),
    }
}

/// Antidiagonal `χ_mk = δ(m, N+1-k)`.
pub fn chi_matrix<S: Scalar>(n: usize) -> RingMatrix<S> {
    RingMatrix::from_fn(n, n, |i, j| if i + j + 1 == n { S::one() } else { S::zero() })
}

/// `W E_ij W^(-1) - q^(i-j) (-1)^(i+j) E_(n-i+1, n-j+1)` over all `i, j`.
pub fn verify_wew<B: Backend>(n: usize, ctx: &B) -> Result<f64> {
    let w = weyl_matrix(&RepLabel::Fundamental(n), ctx)?;
    let wi = w.inverse()?;
    let mut worst: f64 = 0.0;
    for i in 0..n {
        for j in 0..n {
            let lhs = &(&w * &RingMatrix::unit(n, n, i, j)) * &wi;
            let sign = if (i + j) % 2 == 0 { 1 } else { -1 };
            let c = ctx.q_int(i as i64 - j as i64).mul_ref(&ctx.int(sign));
            let rhs = RingMatrix::unit(n, n, n - 1 - i, n - 1 - j).scale(&c);
            worst = worst.max(crate::matrix::residual_norm(&lhs, &rhs, ctx)?);
        }
    }
    Ok(worst)
}

/// `Ũ = W^t 𝒲`: a covariant matrix from a contravariant one.
pub fn convert_contra_to_co<S: Scalar>(w: &GeneratingMatrix<S>, weyl: &RingMatrix<S>) -> Result<GeneratingMatrix<S>> {
    if w.kind != Kind::Contravariant {
        return Err(Error::Invalid("expected a contravariant generating matrix".into()));
    }
    let ops = w.ops.aux_transpose().scalar_right(weyl)?;
    Ok(w.derived(Kind::Covariant, ops, format!("transpose-Weyl of {}", w.provenance)))
}

/// `W̃ = 𝒲 U^t`: a contravariant matrix from a covariant one.
pub fn convert_co_to_contra<S: Scalar>(u: &GeneratingMatrix<S>, weyl: &RingMatrix<S>) -> Result<GeneratingMatrix<S>> {
    if u.kind != Kind::Covariant {
        return Err(Error::Invalid("expected a covariant generating matrix".into()));
    }
    let ops = u.ops.aux_transpose().scalar_left(weyl)?;
    Ok(u.derived(Kind::Contravariant, ops, format!("Weyl-transpose of {}", u.provenance)))
}

/// `Û = χ U^t` or `Ŵ = W^t χ`; the kind is kept.
pub fn chi_transform<S: Scalar>(g: &GeneratingMatrix<S>) -> Result<GeneratingMatrix<S>> {
    let n = match &g.label {
        RepLabel::Fundamental(n) => *n,
        RepLabel::Spin(s) if *s == Spin::HALF => 2,
        other => {
            return Err(Error::RepMismatch(format!("χ transform is defined for the fundamental rep, got {other}")))
        }
    };
    let chi = chi_matrix::<S>(n);
    let t = g.ops.aux_transpose();
    let ops = match g.kind {
        Kind::Covariant => t.scalar_left(&chi)?,
        Kind::Contravariant => t.scalar_right(&chi)?,
    };
    Ok(g.derived(g.kind, ops, format!("χ transform of {}", g.provenance)))
}

struct Relation<'a, S> {
    l: &'a LOperator<S>,
    r: &'a RMatrix<S>,
}

/// `L¹ G² - (R-side) G² L¹` as a flattened matrix on `aux ⊗ aux ⊗ model`.
fn relation_defect<S: Scalar>(g: &GeneratingMatrix<S>, rel: &Relation<'_, S>, hat: bool) -> Result<RingMatrix<S>> {
    let a = rel.l.aux_dim();
    let m = g.ops.model_dim();
    if rel.l.ops.model_dim() != m {
        return Err(Error::RepMismatch("L-operator and generating matrix live on different model spaces".into()));
    }
    let (r_rows, r_cols) = (g.rows(), g.cols());
    let (ra, rb) = rel.r.dims();
    let row_aux = [a, r_rows];
    let col_aux = [a, r_cols];
    let l_left = rel.l.ops.embed(0, &row_aux, &row_aux)?;
    let l_right = rel.l.ops.embed(0, &col_aux, &col_aux)?;
    let g2 = g.ops.embed(1, &row_aux, &col_aux)?;
    let big =
        |x: &RingMatrix<S>, dims: [usize; 2]| x.embed_rect(&[0, 1], &[dims[0], dims[1], m], &[dims[0], dims[1], m]);
    let lhs = &l_left * &g2;
    let rhs = match (g.kind, hat) {
        // L U = U R L
        (Kind::Covariant, false) => {
            check_r(ra, rb, a, r_cols)?;
            &(&g2 * &big(&rel.r.matrix, col_aux)?) * &l_right
        }
        // L W = R^(-1) W L
        (Kind::Contravariant, false) => {
            check_r(ra, rb, a, r_rows)?;
            &(&big(&rel.r.matrix.inverse()?, row_aux)? * &g2) * &l_right
        }
        // L Û = R Û L
        (Kind::Covariant, true) => {
            check_r(ra, rb, a, r_rows)?;
            &(&big(&rel.r.matrix, row_aux)? * &g2) * &l_right
        }
        // L Ŵ = Ŵ R^(-1) L
        (Kind::Contravariant, true) => {
            check_r(ra, rb, a, r_cols)?;
            &(&g2 * &big(&rel.r.matrix.inverse()?, col_aux)?) * &l_right
        }
    };
    lhs.try_sub(&rhs)
}

fn check_r(ra: usize, rb: usize, a: usize, b: usize) -> Result<()> {
    if (ra, rb) != (a, b) {
        return Err(Error::RepMismatch(format!("R-matrix legs ({ra},{rb}) do not match ({a},{b})")));
    }
    Ok(())
}

fn verify_relation<B: Backend>(
    g: &GeneratingMatrix<B::Elem>,
    lp: &LOperator<B::Elem>,
    lm: &LOperator<B::Elem>,
    rp: &RMatrix<B::Elem>,
    rm: &RMatrix<B::Elem>,
    model: &ModelSpace<B>,
    hat: bool,
) -> Result<Residual> {
    let cols = model.margin_indices(g.margin)?;
    let ctx = model.ctx();
    let mut parts = Vec::new();
    for (name, l, r) in [("plus", lp, rp), ("minus", lm, rm)] {
        let d = relation_defect(g, &Relation { l, r }, hat)?;
        parts.push((name.to_string(), flat_restricted(&d, model.dim(), &cols, ctx)));
    }
    let name = match (g.kind, hat) {
        (Kind::Covariant, false) => "L1 U2 = U2 R L1",
        (Kind::Contravariant, false) => "L1 W2 = R^-1 W2 L1",
        (Kind::Covariant, true) => "L1 U2 = R U2 L1",
        (Kind::Contravariant, true) => "L1 W2 = W2 R^-1 L1",
    };
    Ok(Residual::worst(name, parts))
}

/// Covariant relation `L¹± U² = U² R± L¹±` on the margin subspace.
pub fn verify_covariant<B: Backend>(
    u: &GeneratingMatrix<B::Elem>,
    lp: &LOperator<B::Elem>,
    lm: &LOperator<B::Elem>,
    rp: &RMatrix<B::Elem>,
    rm: &RMatrix<B::Elem>,
    model: &ModelSpace<B>,
) -> Result<Residual> {
    if u.kind != Kind::Covariant {
        return Err(Error::Invalid("verify_covariant needs a covariant matrix".into()));
    }
    verify_relation(u, lp, lm, rp, rm, model, false)
}

/// Contravariant relation `L¹± W² = (R±)^(-1) W² L¹±` on the margin subspace.
pub fn verify_contravariant<B: Backend>(
    w: &GeneratingMatrix<B::Elem>,
    lp: &LOperator<B::Elem>,
    lm: &LOperator<B::Elem>,
    rp: &RMatrix<B::Elem>,
    rm: &RMatrix<B::Elem>,
    model: &ModelSpace<B>,
) -> Result<Residual> {
    if w.kind != Kind::Contravariant {
        return Err(Error::Invalid("verify_contravariant needs a contravariant matrix".into()));
    }
    verify_relation(w, lp, lm, rp, rm, model, false)
}

/// Relations for χ-transformed matrices: `L¹ Û² = R Û² L¹`, `L¹ Ŵ² = Ŵ² R^(-1) L¹`.
pub fn verify_hat<B: Backend>(
    g: &GeneratingMatrix<B::Elem>,
    lp: &LOperator<B::Elem>,
    lm: &LOperator<B::Elem>,
    rp: &RMatrix<B::Elem>,
    rm: &RMatrix<B::Elem>,
    model: &ModelSpace<B>,
) -> Result<Residual> {
    verify_relation(g, lp, lm, rp, rm, model, true)
}

/// Componentwise form of the defining relations for an sl(2) generating
/// matrix transforming by `rep`:
///
/// covariant, each row:   `q^H U q^(-H) = U q^(ρ(H))`,
///                        `X± U q^H - q^(∓1) q^H U X± = U ρ(X±)`;
/// contravariant, each column: `q^H W q^(-H) = q^(-ρ(H)) W`,
///                        `X± W q^H - q^(∓1) q^H W X± = -q^(∓1) ρ(X±) W`.
pub fn component_residual<B: Backend>(
    g: &GeneratingMatrix<B::Elem>,
    rep: &Representation<B::Elem>,
    model: &ModelSpace<B>,
) -> Result<Residual> {
    let ctx = model.ctx();
    let n = match g.kind {
        Kind::Covariant => g.cols(),
        Kind::Contravariant => g.rows(),
    };
    if rep.dim != n || rep.rank() != 1 {
        return Err(Error::RepMismatch(format!("{} does not act on a {n}-dimensional index", rep.label)));
    }
    let cols = model.margin_indices(g.margin)?;
    let one = Rational64::one();
    let k = model.q_h(one)?;
    let kinv = model.q_h(-one)?;
    let rho_k = rep.q_h(0, one, ctx)?;
    let rho_kinv = rep.q_h(0, -one, ctx)?;
    let ops = &g.ops;
    let (h_part, xs) = match g.kind {
        Kind::Covariant => {
            let lhs = ops.map_entries(|e| &(&k * e) * &kinv);
            let h = lhs.restricted_residual(&ops.scalar_right(&rho_k)?, &cols, ctx)?;
            let mut xs = Vec::new();
            for (x, rx, s) in [(model.x_plus(), &rep.raising[0], -1), (model.x_minus(), &rep.lowering[0], 1)] {
                let qs = ctx.q_int(s);
                let lhs = ops.map_entries(|e| &(&(&x * e) * &k) - &(&(&k * e) * &x).scale(&qs));
                xs.push(lhs.restricted_residual(&ops.scalar_right(rx)?, &cols, ctx)?);
            }
            (h, xs)
        }
        Kind::Contravariant => {
            let lhs = ops.map_entries(|e| &(&k * e) * &kinv);
            let h = lhs.restricted_residual(&ops.scalar_left(&rho_kinv)?, &cols, ctx)?;
            let mut xs = Vec::new();
            for (x, rx, s) in [(model.x_plus(), &rep.raising[0], -1), (model.x_minus(), &rep.lowering[0], 1)] {
                let qs = ctx.q_int(s);
                let lhs = ops.map_entries(|e| &(&(&x * e) * &k) - &(&(&k * e) * &x).scale(&qs));
                let rhs = ops.scalar_left(&rx.scale(&-qs.clone()))?;
                xs.push(lhs.restricted_residual(&rhs, &cols, ctx)?);
            }
            (h, xs)
        }
    };
    Ok(Residual::worst(
        format!("{} component relations", g.kind),
        vec![("qH".into(), h_part), ("X+".into(), xs[0]), ("X-".into(), xs[1])],
    ))
}

/// Largest commutator of the given operators with `q^H` and `X±` on the
/// columns of degree `<= D - margin`.
pub fn invariance_residual<B: Backend>(
    entries: &[RingMatrix<B::Elem>],
    model: &ModelSpace<B>,
    margin: usize,
) -> Result<Residual> {
    let ctx = model.ctx();
    let cols = model.margin_indices(margin)?;
    let gens = [("qH", model.q_h(Rational64::one())?), ("X+", model.x_plus()), ("X-", model.x_minus())];
    let mut parts = Vec::new();
    for (name, x) in &gens {
        let mut worst: f64 = 0.0;
        for e in entries {
            let c = &(x * e) - &(e * x);
            worst = worst.max(restricted(&c, &cols, ctx));
        }
        parts.push((name.to_string(), worst));
    }
    Ok(Residual::worst("entries commute with q^H, X+, X-", parts))
}

/// `Z = U W`: each entry is a scalar under the adjoint action.
pub fn scalars<B: Backend>(
    u: &GeneratingMatrix<B::Elem>,
    w: &GeneratingMatrix<B::Elem>,
    model: &ModelSpace<B>,
) -> Result<(OpMatrix<B::Elem>, Residual)> {
    if u.kind != Kind::Covariant || w.kind != Kind::Contravariant {
        return Err(Error::Invalid("scalars pair a covariant matrix with a contravariant one".into()));
    }
    let z = u.ops.compose(&w.ops)?;
    let res = invariance_residual(z.entries(), model, u.margin + w.margin)?;
    Ok((z, res))
}

/// `(L¹ Z² - Z² L¹)` for an operator matrix whose entries should be scalars.
pub fn verify_scalar_matrix<B: Backend>(
    z: &OpMatrix<B::Elem>,
    l: &LOperator<B::Elem>,
    margin: usize,
    model: &ModelSpace<B>,
) -> Result<f64> {
    let a = l.aux_dim();
    let row_aux = [a, z.rows()];
    let col_aux = [a, z.cols()];
    let lhs = &l.ops.embed(0, &row_aux, &row_aux)? * &z.embed(1, &row_aux, &col_aux)?;
    let rhs = &z.embed(1, &row_aux, &col_aux)? * &l.ops.embed(0, &col_aux, &col_aux)?;
    let cols = model.margin_indices(margin)?;
    Ok(flat_restricted(&lhs.try_sub(&rhs)?, model.dim(), &cols, model.ctx()))
}

/// Put an operator matrix on auxiliary leg `slot` of a product.
fn on_leg<S: Scalar>(g: &OpMatrix<S>, slot: usize, row_aux: &[usize], col_aux: &[usize]) -> Result<OpMatrix<S>> {
    let flat = g.embed(slot, row_aux, col_aux)?;
    OpMatrix::unflatten(&flat, row_aux.iter().product(), col_aux.iter().product())
}

/// Check that a model-space operator commutes with `q^H` and `X±`.
pub fn check_central<B: Backend>(f: &RingMatrix<B::Elem>, model: &ModelSpace<B>) -> Result<()> {
    let all: Vec<usize> = (0..model.dim()).collect();
    let ctx = model.ctx();
    let gens = [model.q_h(Rational64::one())?, model.x_plus(), model.x_minus()];
    let mut worst: f64 = 0.0;
    for x in &gens {
        worst = worst.max(restricted(&(&(x * f) - &(f * x)), &all, ctx));
    }
    let scale = max_norm(f, ctx).max(1.0);
    if worst > 1e-12 * scale {
        return Err(Error::NotCentral(worst));
    }
    Ok(())
}

/// Product `G_A ⊗ G_B` in fusion order: `U² U¹` for covariant, `W¹ W²` for contravariant.
fn pair_product<S: Scalar>(ga: &GeneratingMatrix<S>, gb: &GeneratingMatrix<S>) -> Result<OpMatrix<S>> {
    if ga.kind != gb.kind {
        return Err(Error::Invalid("fusion needs two generating matrices of the same kind".into()));
    }
    let rows = [ga.rows(), gb.rows()];
    let cols = [ga.cols(), gb.cols()];
    match ga.kind {
        Kind::Covariant => {
            // U² maps (r_A, c_B) -> (r_A, r_B) after U¹ maps (c_A, c_B) -> (r_A, c_B)
            let u1 = on_leg(&ga.ops, 0, &[rows[0], cols[1]], &cols)?;
            let u2 = on_leg(&gb.ops, 1, &rows, &[rows[0], cols[1]])?;
            u2.compose(&u1)
        }
        Kind::Contravariant => {
            let w1 = on_leg(&ga.ops, 0, &rows, &[cols[0], rows[1]])?;
            let w2 = on_leg(&gb.ops, 1, &[cols[0], rows[1]], &cols)?;
            w1.compose(&w2)
        }
    }
}

/// Fused generating matrix compressed to the image of `P`:
/// `F U² U¹ P` (covariant) or `P W¹ W² F` (contravariant), with `F = 1 ⊗ f`
/// for a central model-space operator `f`.
pub fn fuse_generating(
    ga: &GeneratingMatrix<Complex64>,
    gb: &GeneratingMatrix<Complex64>,
    p: &Projector<Complex64>,
    image: &ImageBasis,
    f: &RingMatrix<Complex64>,
    label: RepLabel,
    model: &ModelSpace<Numeric>,
) -> Result<GeneratingMatrix<Complex64>> {
    check_central(f, model)?;
    let pm = p.matrix().ok_or(Error::Singular)?;
    let defect = (&(&pm * &pm) - &pm).data().iter().map(|x| x.norm()).fold(0.0, f64::max);
    if defect > 1e-9 {
        return Err(Error::NotIdempotent(defect));
    }
    let prod = pair_product(ga, gb)?;
    if prod.rows() != pm.rows() || prod.cols() != pm.rows() {
        return Err(Error::Shape("projector does not match the fused auxiliary space".into()));
    }
    let fused = prod.map_entries(|e| match ga.kind {
        Kind::Covariant => f * e,
        Kind::Contravariant => e * f,
    });
    let ops = fused.scalar_left(&image.dual)?.scalar_right(&image.basis)?;
    Ok(GeneratingMatrix {
        kind: ga.kind,
        label,
        ops,
        margin: ga.margin + gb.margin,
        gamma: ga.gamma,
        normalizer: ga.normalizer,
        provenance: format!("fusion of ({}) and ({})", ga.provenance, gb.provenance),
    })
}

/// Quantum-determinant element from two fundamental sl(2) generating
/// matrices: `U⁰ = F U² U¹ P-` or `W⁰ = P- W¹ W² F`. Returns the 4×4
/// operator matrix and the residual of its entries' commutators with
/// `q^H, X±` on the margin subspace.
pub fn invariant_qdet<B: Backend>(
    ga: &GeneratingMatrix<B::Elem>,
    gb: &GeneratingMatrix<B::Elem>,
    f: &RingMatrix<B::Elem>,
    p_minus: &Projector<B::Elem>,
    model: &ModelSpace<B>,
) -> Result<(OpMatrix<B::Elem>, Residual)> {
    check_central(f, model)?;
    let prod = pair_product(ga, gb)?;
    // the denominator of an exact projector only rescales the element
    let p = &p_minus.numer;
    let x = match ga.kind {
        Kind::Covariant => prod.map_entries(|e| f * e).scalar_right(p)?,
        Kind::Contravariant => prod.map_entries(|e| e * f).scalar_left(p)?,
    };
    let mut res = invariance_residual(x.entries(), model, ga.margin + gb.margin)?;
    res.relation = "quantum determinant commutes with q^H, X+, X-".into();
    Ok((x, res))
}

/// `f = q^(c p)`, a central normalization factor for fusion.
pub fn q_spin_factor<B: Backend>(model: &ModelSpace<B>, c: Rational64) -> Result<RingMatrix<B::Elem>> {
    model.q_spin(c)
}

/// Render a spin-1/2 exact generating matrix entry on a monomial, mostly for tests.
/// Exponents `(a, b)` of `z1^a z2^b`.
pub type Monomial = (usize, usize);

pub fn apply_entry<B: Backend>(
    g: &GeneratingMatrix<B::Elem>,
    i: usize,
    j: usize,
    model: &ModelSpace<B>,
    monomial: (usize, usize),
) -> Result<Vec<(Monomial, B::Elem)>> {
    let col = model
        .index_of(monomial.0, monomial.1)
        .ok_or_else(|| Error::Invalid(format!("monomial {monomial:?} outside the model space")))?;
    let v = g.get(i, j).column(col);
    Ok(v.into_iter().enumerate().filter(|(_, x)| !x.is_zero()).map(|(r, x)| (model.basis()[r], x)).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rep::fundamental_rep;
    use crate::rmatrix::{build_l, fundamental_r, Variant};
    use crate::scalar::{Exact, Laurent};

    type Fixture<B> = (
        ModelSpace<B>,
        LOperator<<B as Backend>::Elem>,
        LOperator<<B as Backend>::Elem>,
        RMatrix<<B as Backend>::Elem>,
        RMatrix<<B as Backend>::Elem>,
    );

    fn setup<B: Backend>(d: usize, gamma: Rational64, ctx: &B) -> Fixture<B> {
        let m = ModelSpace::new(d, gamma, ctx).unwrap();
        let lp = build_l(&m, Variant::Plus).unwrap();
        let lm = build_l(&m, Variant::Minus).unwrap();
        let rp = fundamental_r(2, Variant::Plus, ctx).unwrap();
        let rm = fundamental_r(2, Variant::Minus, ctx).unwrap();
        (m, lp, lm, rp, rm)
    }

    #[test]
    fn w_half_entry_examples() {
        let ctx = Exact::new();
        let m = ModelSpace::new(4, Rational64::zero(), &ctx).unwrap();
        let w = build_w_half(&m, Normalizer::Identity).unwrap();
        let out = apply_entry(&w, 1, 1, &m, (0, 0)).unwrap();
        assert_eq!(out, vec![((1, 0), Laurent::q_pow(Rational64::new(1, 2)))]);
        let out = apply_entry(&w, 0, 0, &m, (1, 0)).unwrap();
        assert_eq!(out, vec![((0, 0), Laurent::from_int(1))]);
        let out = apply_entry(&w, 0, 1, &m, (1, 0)).unwrap();
        assert_eq!(out, vec![((1, 1), -Laurent::q_int(-1))]);
    }

    #[test]
    fn contravariant_exact_small() {
        let ctx = Exact::new();
        let (m, lp, lm, rp, rm) = setup(5, Rational64::zero(), &ctx);
        let w = build_w_half(&m, Normalizer::Identity).unwrap();
        let res = verify_contravariant(&w, &lp, &lm, &rp, &rm, &m).unwrap();
        assert_eq!(res.value, 0.0, "{res:?}");
        let printed = build_w_half_printed(&m, Normalizer::Identity).unwrap();
        assert!(verify_contravariant(&printed, &lp, &lm, &rp, &rm, &m).unwrap().value > 1e-3);
    }

    #[test]
    fn components_numeric() {
        let ctx = Numeric::default();
        let (m, _, _, _, _) = setup(6, Rational64::new(1, 2), &ctx);
        let w = build_w_half(&m, Normalizer::InverseSqrtQnum).unwrap();
        let rep = fundamental_rep(2, &ctx).unwrap();
        let res = component_residual(&w, &rep, &m).unwrap();
        assert!(res.value < 1e-12, "{res:?}");
        let weyl = weyl_matrix(&RepLabel::Spin(Spin::HALF), &ctx).unwrap();
        let u = convert_contra_to_co(&w, &weyl).unwrap();
        let res = component_residual(&u, &rep, &m).unwrap();
        assert!(res.value < 1e-12, "{res:?}");
    }

    #[test]
    fn weyl_matrices_agree_at_n2() {
        let ctx = Exact::new();
        let a = weyl_matrix(&RepLabel::Spin(Spin::HALF), &ctx).unwrap();
        let b = weyl_matrix(&RepLabel::Fundamental(2), &ctx).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.get(0, 1), &Laurent::q_pow(Rational64::new(1, 2)));
        assert_eq!(a.get(1, 0), &-Laurent::q_pow(Rational64::new(-1, 2)));
        assert_eq!(verify_wew(3, &Exact::for_rank(3)).unwrap(), 0.0);
    }

    #[test]
    fn covariant_after_conversion() {
        let ctx = Numeric::default();
        let (m, lp, lm, rp, rm) = setup(6, Rational64::zero(), &ctx);
        let w = build_w_half(&m, Normalizer::InverseSqrtQnum).unwrap();
        let weyl = weyl_matrix(&RepLabel::Spin(Spin::HALF), &ctx).unwrap();
        let u = convert_contra_to_co(&w, &weyl).unwrap();
        assert!(verify_covariant(&u, &lp, &lm, &rp, &rm, &m).unwrap().value < 1e-12);
        let row = u.select_rows(&[1]);
        assert!(verify_covariant(&row, &lp, &lm, &rp, &rm, &m).unwrap().value < 1e-12);
        let (_, res) = scalars(&u, &w, &m).unwrap();
        assert!(res.value < 1e-12, "{res:?}");
    }

    #[test]
    fn chi_twice_is_conjugation() {
        let ctx = Exact::new();
        let m = ModelSpace::new(3, Rational64::zero(), &ctx).unwrap();
        let w = build_w_half(&m, Normalizer::Identity).unwrap();
        // (W^t χ)^t χ = χ W χ
        let twice = chi_transform(&chi_transform(&w).unwrap()).unwrap();
        let chi = chi_matrix::<Laurent>(2);
        assert_eq!(twice.ops, w.ops.scalar_left(&chi).unwrap().scalar_right(&chi).unwrap());
    }
}

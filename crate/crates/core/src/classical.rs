//! The q -> 1 limit: classical r-matrix, l-operators and the undeformed
//! spin-1/2 generating matrix on the polynomial space.
//!
//! Everything here is q-free. With the exact backend the entries are plain
//! rationals, so the classical relations are checked with zero residual.
//! The numeric backend is used only to connect quantum objects to their
//! limits through `q_derivative_limit`.

use num_complex::Complex64;
use num_rational::Rational64;
use num_traits::{One, Zero};
use serde_json::json;

use crate::error::{Error, Result};
use crate::matrix::{residual_norm, RingMatrix};
use crate::opmatrix::{flat_restricted, OpMatrix};
use crate::rep::{ModelSpace, Normalizer, RepLabel, Spin};
use crate::report::Residual;
use crate::rmatrix::{LOperator, Variant};
use crate::scalar::{Backend, Numeric, Scalar};
use crate::tensorop::{build_w_half, convert_contra_to_co, GeneratingMatrix, Kind};

/// `H`, `X+`, `X-` of the undeformed spin-`s` rep in the integral basis.
#[derive(Debug, Clone, PartialEq)]
pub struct ClassicalRep<S> {
    pub spin: Spin,
    pub h: RingMatrix<S>,
    pub x_plus: RingMatrix<S>,
    pub x_minus: RingMatrix<S>,
}

pub fn classical_rep<B: Backend>(s: Spin, ctx: &B) -> ClassicalRep<B::Elem> {
    let n = s.dim();
    let d = s.twice() as i64;
    let h = RingMatrix::diag((0..n).map(|k| ctx.rational(s.m(k))).collect());
    let x_plus = RingMatrix::from_fn(n, n, |i, j| if i + 1 == j { ctx.int(j as i64) } else { B::Elem::zero() });
    let x_minus = RingMatrix::from_fn(n, n, |i, j| if i == j + 1 { ctx.int(d - j as i64) } else { B::Elem::zero() });
    ClassicalRep { spin: s, h, x_plus, x_minus }
}

/// `r+ = 2(H⊗H + X+⊗X-)` and `r- = -2(H⊗H + X-⊗X+)` (minus the flipped `r+`).
#[derive(Debug, Clone, PartialEq)]
pub struct ClassicalRMatrix<S> {
    pub matrix: RingMatrix<S>,
    pub spins: (Spin, Spin),
    pub variant: Variant,
}

impl<S: Scalar> ClassicalRMatrix<S> {
    pub fn dims(&self) -> (usize, usize) {
        (self.spins.0.dim(), self.spins.1.dim())
    }

    pub fn to_json(&self, backend: &str) -> serde_json::Value {
        json!({
            "algebra": "classical",
            "labels": [self.spins.0.to_string(), self.spins.1.to_string()],
            "variant": self.variant.to_string(),
            "matrix": self.matrix.to_json(backend),
        })
    }
}

pub fn classical_r_sl2<B: Backend>(s1: Spin, s2: Spin, variant: Variant, ctx: &B) -> ClassicalRMatrix<B::Elem> {
    let a = classical_rep(s1, ctx);
    let b = classical_rep(s2, ctx);
    let two = ctx.int(2);
    let sum = match variant {
        Variant::Plus => &a.h.kron(&b.h) + &a.x_plus.kron(&b.x_minus),
        Variant::Minus => &a.h.kron(&b.h) + &a.x_minus.kron(&b.x_plus),
    };
    let sign = if variant == Variant::Plus { two } else { -two };
    ClassicalRMatrix { matrix: sum.scale(&sign), spins: (s1, s2), variant }
}

/// `[r12,r13] + [r12,r23] + [r13,r23]` for one r-matrix on three equal legs.
pub fn verify_cybe<B: Backend>(r: &ClassicalRMatrix<B::Elem>, ctx: &B) -> Result<f64> {
    let (a, b) = r.dims();
    if a != b {
        return Err(Error::RepMismatch("CYBE check needs equal legs".into()));
    }
    let dims = [a, a, a];
    let r12 = r.matrix.embed(&[0, 1], &dims)?;
    let r13 = r.matrix.embed(&[0, 2], &dims)?;
    let r23 = r.matrix.embed(&[1, 2], &dims)?;
    let comm = |x: &RingMatrix<B::Elem>, y: &RingMatrix<B::Elem>| &(x * y) - &(y * x);
    let total = &(&comm(&r12, &r13) + &comm(&r12, &r23)) + &comm(&r13, &r23);
    residual_norm(&total, &RingMatrix::zeros(total.rows(), total.cols()), ctx)
}

/// Crossing at first order. The chi form `χ¹ r χ¹ = r^{t1}` is reported
/// as is; the Weyl form `-𝒲¹ r (𝒲¹)^(-1) = r^{t1}` is the one that holds.
/// The first leg should be spin 1/2: for higher spin the integral basis is
/// not one in which transposition matches Weyl conjugation.
pub fn classical_crossing<B: Backend>(r: &ClassicalRMatrix<B::Elem>, weyl: bool, ctx: &B) -> Result<Residual> {
    let (a, b) = r.dims();
    let dims = [a, b];
    let m = if weyl { classical_weyl_spin(r.spins.0, ctx) } else { crate::tensorop::chi_matrix(a) };
    let c1 = m.embed(&[0], &dims)?;
    let c1i = m.inverse()?.embed(&[0], &dims)?;
    let mut lhs = &(&c1 * &r.matrix) * &c1i;
    if weyl {
        lhs = lhs.scale(&-B::Elem::one());
    }
    let rhs = r.matrix.partial_transpose(0)?;
    let name = if weyl { "classical weyl crossing" } else { "classical chi crossing" };
    Ok(Residual::single(name, residual_norm(&lhs, &rhs, ctx)?))
}

/// q -> 1 limit of the spin-`s` Weyl matrix: `(-1)^k` on the antidiagonal.
pub fn classical_weyl_spin<B: Backend>(s: Spin, ctx: &B) -> RingMatrix<B::Elem> {
    let n = s.dim();
    RingMatrix::from_fn(n, n, |i, j| {
        if i + j + 1 == n {
            ctx.int(if (j + 1) % 2 == 0 { 1 } else { -1 })
        } else {
            B::Elem::zero()
        }
    })
}

/// The spin-1/2 Weyl matrix at q = 1, `[[0, 1], [-1, 0]]`.
pub fn classical_weyl<B: Backend>(ctx: &B) -> RingMatrix<B::Elem> {
    classical_weyl_spin(Spin::HALF, ctx)
}

/// Undeformed operators on the polynomial space of degree `<= D`.
#[derive(Debug, Clone, PartialEq)]
pub struct ClassicalOps<S> {
    pub d1: RingMatrix<S>,
    pub d2: RingMatrix<S>,
    pub z1: RingMatrix<S>,
    pub z2: RingMatrix<S>,
    /// `z1 ∂2`
    pub x_plus: RingMatrix<S>,
    /// `z2 ∂1`
    pub x_minus: RingMatrix<S>,
    /// `(z1 ∂1 - z2 ∂2) / 2`
    pub h: RingMatrix<S>,
}

fn poly_op<B: Backend>(
    model: &ModelSpace<B>,
    f: impl Fn(usize, usize) -> Option<(i64, usize, usize)>,
) -> RingMatrix<B::Elem> {
    let n = model.dim();
    let ctx = model.ctx();
    let mut m = RingMatrix::zeros(n, n);
    for (col, &(a, b)) in model.basis().iter().enumerate() {
        if let Some((c, a2, b2)) = f(a, b) {
            if c != 0 {
                if let Some(row) = model.index_of(a2, b2) {
                    m.set(row, col, ctx.int(c));
                }
            }
        }
    }
    m
}

pub fn classical_ops<B: Backend>(model: &ModelSpace<B>) -> ClassicalOps<B::Elem> {
    let d1 = poly_op(model, |a, b| (a > 0).then(|| (a as i64, a - 1, b)));
    let d2 = poly_op(model, |a, b| (b > 0).then(|| (b as i64, a, b - 1)));
    let z1 = poly_op(model, |a, b| Some((1, a + 1, b)));
    let z2 = poly_op(model, |a, b| Some((1, a, b + 1)));
    let x_plus = &z1 * &d2;
    let x_minus = &z2 * &d1;
    let half = model.ctx().rational(Rational64::new(1, 2));
    let h = (&(&z1 * &d1) - &(&z2 * &d2)).scale(&half);
    ClassicalOps { d1, d2, z1, z2, x_plus, x_minus, h }
}

/// `[X+, X-] - 2H` and `[H, X±] ∓ X±`; zero on the whole space.
pub fn realization_defect<B: Backend>(ops: &ClassicalOps<B::Elem>, ctx: &B) -> Result<f64> {
    let comm = |x: &RingMatrix<B::Elem>, y: &RingMatrix<B::Elem>| &(x * y) - &(y * x);
    let two = ctx.int(2);
    let a = residual_norm(&comm(&ops.x_plus, &ops.x_minus), &ops.h.scale(&two), ctx)?;
    let b = residual_norm(&comm(&ops.h, &ops.x_plus), &ops.x_plus, ctx)?;
    let c = residual_norm(&comm(&ops.h, &ops.x_minus), &ops.x_minus.scale(&-B::Elem::one()), ctx)?;
    Ok(a.max(b).max(c))
}

/// `f(p)` with the plain integer `p = a + b + 1`.
pub fn classical_normalizer<B: Backend>(model: &ModelSpace<B>, f: Normalizer) -> Result<RingMatrix<B::Elem>> {
    let ctx = model.ctx();
    let mut d = Vec::with_capacity(model.dim());
    for &(a, b) in model.basis() {
        let p = (a + b + 1) as i64;
        d.push(match f {
            Normalizer::Identity => B::Elem::one(),
            Normalizer::InverseQnum => ctx.rational(Rational64::new(1, p)),
            Normalizer::InverseSqrtQnum => ctx.sqrt(&ctx.rational(Rational64::new(1, p)))?,
        });
    }
    Ok(RingMatrix::diag(d))
}

/// `l+ = 2(ρ(H)⊗H + ρ(X+)⊗X-)`, `l- = -2(ρ(H)⊗H + ρ(X-)⊗X+)` on the polynomial space.
pub fn classical_l<B: Backend>(model: &ModelSpace<B>, aux: Spin, variant: Variant) -> Result<LOperator<B::Elem>> {
    let ctx = model.ctx();
    let ops = classical_ops(model);
    let rho = classical_rep(aux, ctx);
    let (x_aux, x_model, sign) = match variant {
        Variant::Plus => (&rho.x_plus, &ops.x_minus, 2),
        Variant::Minus => (&rho.x_minus, &ops.x_plus, -2),
    };
    let n = aux.dim();
    let c = ctx.int(sign);
    let mut entries = Vec::with_capacity(n * n);
    for i in 0..n {
        for j in 0..n {
            let t = &ops.h.scale(rho.h.get(i, j)) + &x_model.scale(x_aux.get(i, j));
            entries.push(t.scale(&c));
        }
    }
    Ok(LOperator { variant, ops: OpMatrix::new(n, n, entries)? })
}

/// `[[∂1, -z2], [∂2, z1]] · f(p)`, margin 1.
pub fn build_classical_w_half<B: Backend>(
    model: &ModelSpace<B>,
    normalizer: Normalizer,
) -> Result<GeneratingMatrix<B::Elem>> {
    let ops = classical_ops(model);
    let f = classical_normalizer(model, normalizer)?;
    let entries = vec![&ops.d1 * &f, (&ops.z2 * &f).scale(&-B::Elem::one()), &ops.d2 * &f, &ops.z1 * &f];
    Ok(GeneratingMatrix {
        kind: Kind::Contravariant,
        label: RepLabel::Spin(Spin::HALF),
        ops: OpMatrix::new(2, 2, entries)?,
        margin: 1,
        gamma: Rational64::zero(),
        normalizer,
        provenance: "undeformed spin-1/2 realization".into(),
    })
}

/// `Ũ = W^t 𝒲` with the q = 1 Weyl matrix.
pub fn classical_covariant<B: Backend>(w: &GeneratingMatrix<B::Elem>, ctx: &B) -> Result<GeneratingMatrix<B::Elem>> {
    convert_contra_to_co(w, &classical_weyl(ctx))
}

fn classical_defect<S: Scalar>(g: &GeneratingMatrix<S>, l: &LOperator<S>, r: &RingMatrix<S>) -> Result<RingMatrix<S>> {
    let a = l.aux_dim();
    let m = g.ops.model_dim();
    let row_aux = [a, g.rows()];
    let col_aux = [a, g.cols()];
    let l_left = l.ops.embed(0, &row_aux, &row_aux)?;
    let l_right = l.ops.embed(0, &col_aux, &col_aux)?;
    let g2 = g.ops.embed(1, &row_aux, &col_aux)?;
    let big = |dims: [usize; 2]| {
        if r.rows() != dims[0] * dims[1] {
            return Err(Error::RepMismatch("r-matrix legs do not match the generating matrix".into()));
        }
        r.embed_rect(&[0, 1], &[dims[0], dims[1], m], &[dims[0], dims[1], m])
    };
    let comm = &(&l_left * &g2) - &(&g2 * &l_right);
    Ok(match g.kind {
        // [l, U] - U r = 0
        Kind::Covariant => &comm - &(&g2 * &big(col_aux)?),
        // [l, W] + r W = 0
        Kind::Contravariant => &comm + &(&big(row_aux)? * &g2),
    })
}

/// The classical co- or contravariant relation for both `l±`, restricted to the margin subspace.
pub fn verify_classical_generating<B: Backend>(
    g: &GeneratingMatrix<B::Elem>,
    lp: &LOperator<B::Elem>,
    lm: &LOperator<B::Elem>,
    rp: &ClassicalRMatrix<B::Elem>,
    rm: &ClassicalRMatrix<B::Elem>,
    model: &ModelSpace<B>,
) -> Result<Residual> {
    let cols = model.margin_indices(g.margin)?;
    let mut parts = Vec::new();
    for (name, l, r) in [("plus", lp, rp), ("minus", lm, rm)] {
        let d = classical_defect(g, l, &r.matrix)?;
        parts.push((name.to_string(), flat_restricted(&d, model.dim(), &cols, model.ctx())));
    }
    let name = match g.kind {
        Kind::Covariant => "[l1, U2] = U2 r",
        Kind::Contravariant => "[l1, W2] = -r W2",
    };
    Ok(Residual::worst(name, parts))
}

/// Tensor-Casimir form: `[l+ - l-, W] + (r+ - r-) W = 0`.
pub fn verify_classical_casimir<B: Backend>(
    w: &GeneratingMatrix<B::Elem>,
    lp: &LOperator<B::Elem>,
    lm: &LOperator<B::Elem>,
    rp: &ClassicalRMatrix<B::Elem>,
    rm: &ClassicalRMatrix<B::Elem>,
    model: &ModelSpace<B>,
) -> Result<Residual> {
    let cols = model.margin_indices(w.margin)?;
    let diff = OpMatrix::new(
        lp.aux_dim(),
        lp.aux_dim(),
        lp.ops.entries().iter().zip(lm.ops.entries()).map(|(a, b)| a - b).collect(),
    )?;
    let l = LOperator { variant: Variant::Plus, ops: diff };
    let d = classical_defect(w, &l, &(&rp.matrix - &rm.matrix))?;
    Ok(Residual::single("[l+ - l-, W] = -c W", flat_restricted(&d, model.dim(), &cols, model.ctx())))
}

/// Entrywise form on the margin subspace: `[ξ, U] = U ρ(ξ)` (covariant) or
/// `[ξ, W] = -ρ(ξ) W` (contravariant), for `ξ ∈ {H, X+, X-}`.
pub fn classical_component_residual<B: Backend>(
    g: &GeneratingMatrix<B::Elem>,
    model: &ModelSpace<B>,
) -> Result<Residual> {
    let ctx = model.ctx();
    let spin = crate::wigner::label_spin(&g.label).or_else(|_| match g.rows() {
        2 => Ok(Spin::HALF),
        _ => Err(Error::RepMismatch("classical component check needs a spin label".into())),
    })?;
    let ops = classical_ops(model);
    let rho = classical_rep(spin, ctx);
    let cols = model.margin_indices(g.margin)?;
    let mut parts = Vec::new();
    for (name, xi, r) in [("H", &ops.h, &rho.h), ("X+", &ops.x_plus, &rho.x_plus), ("X-", &ops.x_minus, &rho.x_minus)] {
        let lhs = g.ops.map_entries(|e| &(xi * e) - &(e * xi));
        let rhs = match g.kind {
            Kind::Covariant => g.ops.scalar_right(r)?,
            Kind::Contravariant => g.ops.scalar_left(&r.scale(&-B::Elem::one()))?,
        };
        parts.push((name.to_string(), lhs.restricted_residual(&rhs, &cols, ctx)?));
    }
    Ok(Residual::worst("[ξ, G] = ρ(ξ) action", parts))
}

/// First-order coefficient of `R(q)` at `q = 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct DerivativeLimit {
    /// `(R(1+ε) - 1) / ε`
    pub plain: RingMatrix<Complex64>,
    /// `2 D(ε/2) - D(ε)`
    pub richardson: RingMatrix<Complex64>,
}

pub fn q_derivative_limit(
    builder: impl Fn(&Numeric) -> Result<RingMatrix<Complex64>>,
    eps: f64,
) -> Result<DerivativeLimit> {
    if !(1e-7..=1e-4).contains(&eps) {
        return Err(Error::Invalid(format!("ε = {eps} outside [1e-7, 1e-4]")));
    }
    let d = |e: f64| -> Result<RingMatrix<Complex64>> {
        let r = builder(&Numeric::new(1.0 + e)?)?;
        let id = RingMatrix::identity(r.rows());
        Ok((&r - &id).scale(&Complex64::new(1.0 / e, 0.0)))
    };
    let plain = d(eps)?;
    let half = d(eps / 2.0)?;
    let richardson = &half.scale(&Complex64::new(2.0, 0.0)) - &plain;
    Ok(DerivativeLimit { plain, richardson })
}

/// Largest `|W_q - W_cl|` over entries at `q = 1 + ε`, relative to the
/// largest classical entry, with `γ = 0` and the identity normalizer.
pub fn w_half_limit_deviation(degree: usize, eps: f64) -> Result<f64> {
    let ctx = Numeric::new(1.0 + eps)?;
    let model = ModelSpace::new(degree, Rational64::zero(), &ctx)?;
    let wq = build_w_half(&model, Normalizer::Identity)?;
    let wc = build_classical_w_half(&model, Normalizer::Identity)?;
    let mut diff: f64 = 0.0;
    let mut scale: f64 = 0.0;
    for (a, b) in wq.ops.entries().iter().zip(wc.ops.entries()) {
        diff = diff.max(residual_norm(a, b, &ctx)?);
        scale = scale.max(b.data().iter().map(|x| x.norm()).fold(0.0, f64::max));
    }
    Ok(diff / scale.max(1.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rmatrix::fundamental_r;
    use crate::scalar::{Exact, Laurent};

    fn setup(d: usize) -> (Exact, ModelSpace<Exact>) {
        let ctx = Exact::new();
        let m = ModelSpace::new(d, Rational64::zero(), &ctx).unwrap();
        (ctx, m)
    }

    #[test]
    fn r_half_half_entries() {
        let ctx = Exact::new();
        let r = classical_r_sl2(Spin::HALF, Spin::HALF, Variant::Plus, &ctx);
        let h = Laurent::constant(num_rational::BigRational::new(1.into(), 2.into()));
        assert_eq!(r.matrix.get(0, 0), &h);
        assert_eq!(r.matrix.get(1, 1), &-h.clone());
        assert_eq!(r.matrix.get(1, 2), &Laurent::from_int(2));
        assert!(r.matrix.get(2, 1).is_zero());
        assert!(r.matrix.trace().is_zero());
        assert_eq!(verify_cybe(&r, &ctx).unwrap(), 0.0);
    }

    #[test]
    fn derivative_matches_r() {
        let ctx = Numeric::default();
        for v in [Variant::Plus, Variant::Minus] {
            let lim = q_derivative_limit(|c| Ok(fundamental_r(2, v, c)?.matrix), 1e-6).unwrap();
            let r = classical_r_sl2(Spin::HALF, Spin::HALF, v, &ctx);
            assert!(residual_norm(&lim.plain, &r.matrix, &ctx).unwrap() < 1e-5);
            assert!(residual_norm(&lim.richardson, &r.matrix, &ctx).unwrap() < 1e-9);
        }
        let zero = q_derivative_limit(|_| Ok(RingMatrix::identity(3)), 1e-6).unwrap();
        assert!(zero.richardson.is_zero());
        assert!(q_derivative_limit(|_| Ok(RingMatrix::identity(1)), 1e-2).is_err());
    }

    #[test]
    fn w_entries() {
        let (ctx, m) = setup(3);
        let w = build_classical_w_half(&m, Normalizer::Identity).unwrap();
        let v = w.get(0, 0).apply(&{
            let mut e = vec![Laurent::zero(); m.dim()];
            e[m.index_of(2, 0).unwrap()] = ctx.int(1);
            e
        });
        assert_eq!(v[m.index_of(1, 0).unwrap()], Laurent::from_int(2));
    }

    #[test]
    fn relations_exact() {
        let (ctx, m) = setup(6);
        assert_eq!(realization_defect(&classical_ops(&m), &ctx).unwrap(), 0.0);
        let lp = classical_l(&m, Spin::HALF, Variant::Plus).unwrap();
        let lm = classical_l(&m, Spin::HALF, Variant::Minus).unwrap();
        let rp = classical_r_sl2(Spin::HALF, Spin::HALF, Variant::Plus, &ctx);
        let rm = classical_r_sl2(Spin::HALF, Spin::HALF, Variant::Minus, &ctx);
        let w = build_classical_w_half(&m, Normalizer::Identity).unwrap();
        assert_eq!(verify_classical_generating(&w, &lp, &lm, &rp, &rm, &m).unwrap().value, 0.0);
        assert_eq!(verify_classical_casimir(&w, &lp, &lm, &rp, &rm, &m).unwrap().value, 0.0);
        assert_eq!(classical_component_residual(&w, &m).unwrap().value, 0.0);
        let u = classical_covariant(&w, &ctx).unwrap();
        assert_eq!(verify_classical_generating(&u, &lp, &lm, &rp, &rm, &m).unwrap().value, 0.0);
        assert_eq!(classical_component_residual(&u, &m).unwrap().value, 0.0);
        // a flipped sign is detected
        let bad = w.perturbed(0, 1, 0, 0, &Laurent::from_int(1));
        assert!(verify_classical_generating(&bad, &lp, &lm, &rp, &rm, &m).unwrap().value > 0.0);
    }

    #[test]
    fn crossing_forms() {
        let ctx = Exact::new();
        for s in [Spin::HALF, Spin::ONE] {
            let r = classical_r_sl2(Spin::HALF, s, Variant::Plus, &ctx);
            assert_eq!(classical_crossing(&r, true, &ctx).unwrap().value, 0.0);
            assert!(classical_crossing(&r, false, &ctx).unwrap().value > 0.0);
        }
    }

    #[test]
    fn quantum_w_limit() {
        assert!(w_half_limit_deviation(4, 1e-6).unwrap() < 1e-5);
    }
}

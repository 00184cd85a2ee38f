//! R-matrices, L-operators and the identities they satisfy.
//!
//! R-matrices are built three independent ways (closed form for the sl(n)
//! defining representation, the sl(2) L-operator with generators substituted
//! by a spin-s representation, and the sl(2) universal series) so that each
//! route can be checked against the others.

use std::fmt;

use num_complex::Complex64;
use num_rational::Rational64;
use num_traits::One;
use serde::Serialize;
use serde_json::json;

use crate::error::{Error, Result};
use crate::matrix::{max_norm, residual_norm, ImageBasis, Projector, RingMatrix};
use crate::opmatrix::OpMatrix;
use crate::rep::{coproduct_rep, spin_rep, Basis, ModelSpace, RepLabel, Representation, Spin};
use crate::report::Residual;
use crate::scalar::{Backend, Laurent, Scalar};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Variant {
    Plus,
    Minus,
}

impl Variant {
    pub fn sign(self) -> i64 {
        match self {
            Variant::Plus => 1,
            Variant::Minus => -1,
        }
    }
}

impl std::str::FromStr for Variant {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "plus" | "+" => Ok(Variant::Plus),
            "minus" | "-" => Ok(Variant::Minus),
            _ => Err(Error::Invalid(format!("unknown variant '{s}'"))),
        }
    }
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Variant::Plus => "plus",
            Variant::Minus => "minus",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Normalization {
    /// `q^(∓1/2)` prefactor of the sl(2) fundamental matrix.
    Sl2Standard,
    /// `q^(∓1/n)` prefactor of the sl(n) fundamental matrix.
    SlnStandard,
    FusedUnnormalized,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Route {
    Fundamental,
    LOperator,
    UniversalSeries,
    Fusion,
}

/// An R-matrix on `V^I ⊗ V^J` with two-leg structure.
#[derive(Debug, Clone, PartialEq)]
pub struct RMatrix<S> {
    pub matrix: RingMatrix<S>,
    pub labels: (RepLabel, RepLabel),
    pub variant: Variant,
    pub normalization: Normalization,
    pub route: Route,
    /// Factor that was divided out when normalizing a fused matrix.
    pub raw_scale: Option<S>,
}

impl<S: Scalar> RMatrix<S> {
    pub fn dims(&self) -> (usize, usize) {
        let l = self.matrix.legs().expect("R-matrices carry two legs");
        (l[0], l[1])
    }

    /// Rescale so that the first nonzero entry of `reference` (row-major)
    /// is matched; returns the scale that was applied.
    pub fn normalized_against<B: Backend<Elem = S>>(&self, reference: &RingMatrix<S>, ctx: &B) -> Result<(Self, S)> {
        let floor = 1e-12 * max_norm(reference, ctx).max(1.0);
        let idx = reference
            .data()
            .iter()
            .position(|x| ctx.magnitude(x) > floor)
            .ok_or_else(|| Error::Invalid("reference matrix is zero".into()))?;
        let mine = &self.matrix.data()[idx];
        let scale = reference.data()[idx].mul_ref(&mine.inverse().ok_or(Error::Singular)?);
        let mut out = self.clone();
        out.matrix = self.matrix.scale(&scale);
        out.raw_scale = Some(scale.clone());
        Ok((out, scale))
    }

    pub fn to_json(&self, backend: &str) -> serde_json::Value {
        json!({
            "labels": [self.labels.0.to_string(), self.labels.1.to_string()],
            "variant": self.variant,
            "normalization": self.normalization,
            "route": self.route,
            "matrix": self.matrix.to_json(backend),
        })
    }
}

fn two_leg<S: Scalar>(m: RingMatrix<S>, a: usize, b: usize) -> Result<RingMatrix<S>> {
    m.with_legs(&[a, b])
}

/// Fundamental R-matrices of U_q(sl(n)):
///
/// ```text
/// R± = q^(∓1/n) ( q^(±1) Σ E_ii⊗E_ii + Σ_{i≠j} E_ii⊗E_jj ± ω Σ_{±(j-i)>0} E_ij⊗E_ji )
/// ```
pub fn fundamental_r<B: Backend>(n: usize, variant: Variant, ctx: &B) -> Result<RMatrix<B::Elem>> {
    if n < 2 {
        return Err(Error::Invalid(format!("sl({n}) needs n >= 2")));
    }
    let s = variant.sign();
    let pre = ctx.q_pow(Rational64::new(-s, n as i64))?;
    let diag = ctx.q_int(s).mul_ref(&pre);
    let off = ctx.omega().mul_ref(&pre).mul_ref(&ctx.int(s));
    let d = n * n;
    let mut m = RingMatrix::zeros(d, d);
    for i in 0..n {
        for j in 0..n {
            let r = i * n + j;
            m.set(r, r, if i == j { diag.clone() } else { pre.clone() });
            let upper = (j as i64 - i as i64) * s > 0;
            if upper {
                // E_ij ⊗ E_ji: row (i,j), column (j,i)
                m.set(r, j * n + i, off.clone());
            }
        }
    }
    Ok(RMatrix {
        matrix: two_leg(m, n, n)?,
        labels: (RepLabel::Fundamental(n), RepLabel::Fundamental(n)),
        variant,
        normalization: if n == 2 { Normalization::Sl2Standard } else { Normalization::SlnStandard },
        route: Route::Fundamental,
        raw_scale: None,
    })
}

/// `R±^{1/2, s}` from the fundamental L-operators with the spin-s matrices substituted:
///
/// ```text
/// R+ = [[q^H, ω q^(-1/2) X-], [0, q^(-H)]],   R- = [[q^(-H), 0], [-ω q^(1/2) X+, q^H]]
/// ```
pub fn lop_substituted_r<B: Backend>(s: Spin, variant: Variant, basis: Basis, ctx: &B) -> Result<RMatrix<B::Elem>> {
    let rep = spin_rep(s, basis, ctx)?;
    lop_substituted_from(&rep, variant, ctx)
}

/// Same as [`lop_substituted_r`] for an already built sl(2) representation.
pub fn lop_substituted_from<B: Backend>(
    rep: &Representation<B::Elem>,
    variant: Variant,
    ctx: &B,
) -> Result<RMatrix<B::Elem>> {
    if rep.rank() != 1 {
        return Err(Error::RepMismatch("L-operator substitution needs an sl(2) representation".into()));
    }
    let one = Rational64::one();
    let k = rep.q_h(0, one, ctx)?;
    let kinv = rep.q_h(0, -one, ctx)?;
    let d = rep.dim;
    let zero = RingMatrix::zeros(d, d);
    let blocks = match variant {
        Variant::Plus => {
            let c = ctx.omega().mul_ref(&ctx.q_pow(Rational64::new(-1, 2))?);
            [k, rep.lowering[0].scale(&c), zero, kinv]
        }
        Variant::Minus => {
            let c = -ctx.omega().mul_ref(&ctx.q_pow(Rational64::new(1, 2))?);
            [kinv, zero, rep.raising[0].scale(&c), k]
        }
    };
    let flat = OpMatrix::new(2, 2, blocks.to_vec())?.flatten();
    Ok(RMatrix {
        matrix: two_leg(flat, 2, d)?,
        labels: (RepLabel::Spin(Spin::HALF), rep.label.clone()),
        variant,
        normalization: Normalization::Sl2Standard,
        route: Route::LOperator,
        raw_scale: None,
    })
}

fn power<S: Scalar>(m: &RingMatrix<S>, k: usize) -> RingMatrix<S> {
    (0..k).fold(RingMatrix::identity(m.rows()), |acc, _| &acc * m)
}

/// Sum the universal series with a per-term hook on the first factor; the
/// antipode check reuses it with `S` applied to the first tensor factor.
fn universal_terms<B: Backend>(
    r1: &Representation<B::Elem>,
    r2: &Representation<B::Elem>,
    antipode: bool,
    ctx: &B,
) -> Result<RingMatrix<B::Elem>> {
    if r1.rank() != 1 || r2.rank() != 1 {
        return Err(Error::RepMismatch("the universal series is implemented for sl(2)".into()));
    }
    let (d1, d2) = (r1.dim, r2.dim);
    let sgn = if antipode { -1 } else { 1 };
    let cartan = RingMatrix::diag(
        r1.half_weights[0]
            .iter()
            .flat_map(|a| r2.half_weights[0].iter().map(move |b| *a * *b * 2 * sgn))
            .map(|e| ctx.q_pow(e))
            .collect::<Result<Vec<_>>>()?,
    )
    .with_legs(&[d1, d2])?;
    let top = (d1 - 1).min(d2 - 1);
    let mut total = RingMatrix::zeros(d1 * d2, d1 * d2);
    for n in 0..=top {
        let ni = n as i64;
        let e_plus = power(&r1.raising[0], n);
        let e_minus = power(&r2.lowering[0], n);
        if e_plus.is_zero() || e_minus.is_zero() {
            break;
        }
        let first = if antipode {
            // S(q^(nH) X+^n) = S(X+)^n q^(-nH) = (-q)^n X+^n q^(-nH)
            let k = r1.q_h(0, Rational64::from_integer(-ni), ctx)?;
            (&e_plus * &k).scale(&ctx.lift(&(Laurent::from_int(-1) * Laurent::q_int(1))).pow_n(n))
        } else {
            &r1.q_h(0, Rational64::from_integer(ni), ctx)? * &e_plus
        };
        let second = &r2.q_h(0, Rational64::from_integer(-ni), ctx)? * &e_minus;
        let coeff = Laurent::omega().pow_n(n) * Laurent::q_pow(Rational64::new(-ni * (ni + 1), 2));
        let fact = Laurent::qfactorial(n as u32);
        let term = if antipode {
            // (S ⊗ id) of q^(2H⊗H) (a ⊗ b) is (S(a) ⊗ 1) q^(-2H⊗H) (1 ⊗ b)
            let a = first.kron(&RingMatrix::identity(d2));
            let b = RingMatrix::identity(d1).kron(&second);
            &(&a * &cartan) * &b
        } else {
            &cartan * &first.kron(&second)
        };
        let scaled = divide_entries(&term.scale(&ctx.lift(&coeff)), &fact, ctx)?;
        total = &total + &scaled;
    }
    total.with_legs(&[d1, d2])
}

trait PowN {
    fn pow_n(&self, n: usize) -> Self;
}

impl<S: Scalar> PowN for S {
    fn pow_n(&self, n: usize) -> S {
        (0..n).fold(S::one(), |acc, _| acc.mul_ref(self))
    }
}

fn divide_entries<B: Backend>(m: &RingMatrix<B::Elem>, d: &Laurent, ctx: &B) -> Result<RingMatrix<B::Elem>> {
    let data = m.data().iter().map(|x| ctx.divide(x, d)).collect::<Result<Vec<_>>>()?;
    RingMatrix::new(m.rows(), m.cols(), data)
}

/// `(ρ1 ⊗ ρ2) R` from the sl(2) universal series
/// `q^(2H⊗H) Σ_n ω^n q^(-n(n+1)/2)/[n]! (q^(nH) X+^n) ⊗ (q^(-nH) X-^n)`.
pub fn universal_r_sl2<B: Backend>(
    r1: &Representation<B::Elem>,
    r2: &Representation<B::Elem>,
    ctx: &B,
) -> Result<RMatrix<B::Elem>> {
    let m = universal_terms(r1, r2, false, ctx)?;
    Ok(RMatrix {
        matrix: m,
        labels: (r1.label.clone(), r2.label.clone()),
        variant: Variant::Plus,
        normalization: Normalization::Sl2Standard,
        route: Route::UniversalSeries,
        raw_scale: None,
    })
}

/// Residual of `R · (S ⊗ id)R = 1` in the representation `ρ1 ⊗ ρ2`.
pub fn antipode_defect<B: Backend>(r1: &Representation<B::Elem>, r2: &Representation<B::Elem>, ctx: &B) -> Result<f64> {
    let r = universal_terms(r1, r2, false, ctx)?;
    let s = universal_terms(r1, r2, true, ctx)?;
    residual_norm(&(&r * &s), &RingMatrix::identity(r.rows()), ctx)
}

/// Residual of `R Δ(ξ) = Δ^op(ξ) R` for `ξ ∈ {q^H, X±_i}`.
pub fn verify_quasitriangular<B: Backend>(
    r: &RMatrix<B::Elem>,
    r1: &Representation<B::Elem>,
    r2: &Representation<B::Elem>,
    ctx: &B,
) -> Result<Residual> {
    let delta = coproduct_rep(r1, r2, ctx)?;
    let one = Rational64::one();
    let mut parts = Vec::new();
    for i in 0..r1.rank() {
        let k1 = r1.q_h(i, one, ctx)?;
        let k2inv = r2.q_h(i, -one, ctx)?;
        // Δ^op(X) = X ⊗ q^(-H) + q^H ⊗ X
        let op = |a: &RingMatrix<B::Elem>, b: &RingMatrix<B::Elem>| &a.kron(&k2inv) + &k1.kron(b);
        let pairs = [
            ("X+", &delta.raising[i], op(&r1.raising[i], &r2.raising[i])),
            ("X-", &delta.lowering[i], op(&r1.lowering[i], &r2.lowering[i])),
        ];
        for (name, d, dop) in pairs {
            let lhs = &r.matrix * d;
            let rhs = &dop * &r.matrix;
            parts.push((format!("{name}_{}", i + 1), residual_norm(&lhs, &rhs, ctx)?));
        }
        let kk = delta.q_h(i, one, ctx)?;
        parts.push((format!("qH_{}", i + 1), residual_norm(&(&r.matrix * &kk), &(&kk * &r.matrix), ctx)?));
    }
    Ok(Residual::worst("R Δ(ξ) = Δ'(ξ) R", parts))
}

/// Residual of `R+ = P (R-)^(-1) P` for handles on `(I,J)` and `(J,I)`.
pub fn verify_plus_minus<B: Backend>(rp: &RMatrix<B::Elem>, rm_flipped: &RMatrix<B::Elem>, ctx: &B) -> Result<f64> {
    let rhs = rm_flipped.matrix.inverse()?.flip()?;
    residual_norm(&rp.matrix, &rhs, ctx)
}

fn check_legs(r: &RMatrix<impl Scalar>) -> Result<(usize, usize)> {
    r.matrix
        .legs()
        .filter(|l| l.len() == 2)
        .map(|l| (l[0], l[1]))
        .ok_or_else(|| Error::Legs("R-matrix needs a two-leg structure".into()))
}

/// `R12 R13 R23 - R23 R13 R12` for one R-matrix with equal legs.
pub fn verify_ybe<B: Backend>(r: &RMatrix<B::Elem>, ctx: &B) -> Result<f64> {
    let (a, b) = check_legs(r)?;
    if a != b {
        return Err(Error::Legs(format!("Yang-Baxter on one handle needs equal legs, got ({a},{b})")));
    }
    verify_ybe_mixed(&r.matrix, &r.matrix, &r.matrix, ctx)
}

/// Mixed Yang-Baxter residual for `R^{IJ}, R^{IK}, R^{JK}`.
pub fn verify_ybe_mixed<B: Backend>(
    r_ij: &RingMatrix<B::Elem>,
    r_ik: &RingMatrix<B::Elem>,
    r_jk: &RingMatrix<B::Elem>,
    ctx: &B,
) -> Result<f64> {
    let l = |m: &RingMatrix<B::Elem>| -> Result<Vec<usize>> {
        m.legs().map(|x| x.to_vec()).ok_or_else(|| Error::Legs("R-matrix needs legs".into()))
    };
    let (lij, lik, ljk) = (l(r_ij)?, l(r_ik)?, l(r_jk)?);
    if lij[0] != lik[0] || lij[1] != ljk[0] || lik[1] != ljk[1] {
        return Err(Error::Legs("R-matrix legs do not chain".into()));
    }
    let dims = [lij[0], lij[1], lik[1]];
    let r12 = r_ij.embed(&[0, 1], &dims)?;
    let r13 = r_ik.embed(&[0, 2], &dims)?;
    let r23 = r_jk.embed(&[1, 2], &dims)?;
    residual_norm(&(&(&r12 * &r13) * &r23), &(&(&r23 * &r13) * &r12), ctx)
}

/// Operator-valued L matrix on the model space.
#[derive(Debug, Clone, PartialEq)]
pub struct LOperator<S> {
    pub variant: Variant,
    pub ops: OpMatrix<S>,
}

impl<S: Scalar> LOperator<S> {
    pub fn aux_dim(&self) -> usize {
        self.ops.rows()
    }

    pub fn to_json(&self, backend: &str) -> serde_json::Value {
        let n = self.ops.rows();
        let entries: Vec<Vec<_>> =
            (0..n).map(|i| (0..n).map(|j| self.ops.get(i, j).to_json(backend)).collect()).collect();
        json!({"variant": self.variant, "aux_dim": n, "entries": entries})
    }
}

/// Fundamental L-operators realized on the model space.
pub fn build_l<B: Backend>(model: &ModelSpace<B>, variant: Variant) -> Result<LOperator<B::Elem>> {
    let ctx = model.ctx();
    let one = Rational64::one();
    let k = model.q_h(one)?;
    let kinv = model.q_h(-one)?;
    let zero = RingMatrix::zeros(model.dim(), model.dim());
    let entries = match variant {
        Variant::Plus => {
            let c = ctx.omega().mul_ref(&ctx.q_pow(Rational64::new(-1, 2))?);
            vec![k, model.x_minus().scale(&c), zero, kinv]
        }
        Variant::Minus => {
            let c = -ctx.omega().mul_ref(&ctx.q_pow(Rational64::new(1, 2))?);
            vec![kinv, zero, model.x_plus().scale(&c), k]
        }
    };
    Ok(LOperator { variant, ops: OpMatrix::new(2, 2, entries)? })
}

/// `R L¹ L² - L² L¹ R` on `aux ⊗ aux ⊗ model`.
pub fn verify_rll<B: Backend>(
    r: &RMatrix<B::Elem>,
    l1: &LOperator<B::Elem>,
    l2: &LOperator<B::Elem>,
    ctx: &B,
) -> Result<f64> {
    let (a, b) = check_legs(r)?;
    if l1.aux_dim() != a || l2.aux_dim() != b {
        return Err(Error::Legs("L-operator aux dims do not match R".into()));
    }
    if l1.ops.model_dim() != l2.ops.model_dim() {
        return Err(Error::RepMismatch("L-operators live on different model spaces".into()));
    }
    let m = l1.ops.model_dim();
    let aux = [a, b];
    let big_r = r.matrix.embed_rect(&[0, 1], &[a, b, m], &[a, b, m])?;
    let x1 = l1.ops.embed(0, &aux, &aux)?;
    let x2 = l2.ops.embed(1, &aux, &aux)?;
    residual_norm(&(&(&big_r * &x1) * &x2), &(&(&x2 * &x1) * &big_r), ctx)
}

/// The three RLL relations: `(R+; L+, L+)`, `(R-; L-, L-)`, `(R+; L+, L-)`.
pub fn verify_rll_all<B: Backend>(
    rp: &RMatrix<B::Elem>,
    rm: &RMatrix<B::Elem>,
    lp: &LOperator<B::Elem>,
    lm: &LOperator<B::Elem>,
    ctx: &B,
) -> Result<Residual> {
    Ok(Residual::worst(
        "R L1 L2 = L2 L1 R",
        vec![
            ("plus-plus".into(), verify_rll(rp, lp, lp, ctx)?),
            ("minus-minus".into(), verify_rll(rm, lm, lm, ctx)?),
            ("plus-mixed".into(), verify_rll(rp, lp, lm, ctx)?),
        ],
    ))
}

/// `L = L+ L-^(-1)` as an operator matrix.
pub fn reflection_l<B: Backend>(lp: &LOperator<B::Elem>, lm: &LOperator<B::Elem>) -> Result<OpMatrix<B::Elem>> {
    let n = lp.aux_dim();
    let flat = &lp.ops.flatten() * &lm.ops.flatten().inverse()?;
    OpMatrix::unflatten(&flat, n, n)
}

/// `L¹ (R-)^(-1) L² R- - (R+)^(-1) L² R+ L¹` with `L = L+ L-^(-1)`.
pub fn verify_reflection<B: Backend>(
    lp: &LOperator<B::Elem>,
    lm: &LOperator<B::Elem>,
    rp: &RMatrix<B::Elem>,
    rm: &RMatrix<B::Elem>,
    ctx: &B,
) -> Result<f64> {
    let l = reflection_l::<B>(lp, lm)?;
    verify_reflection_with(&l, rp, rm, ctx)
}

/// Reflection residual for a given `L`, e.g. a perturbed one.
pub fn verify_reflection_with<B: Backend>(
    l: &OpMatrix<B::Elem>,
    rp: &RMatrix<B::Elem>,
    rm: &RMatrix<B::Elem>,
    ctx: &B,
) -> Result<f64> {
    let n = l.rows();
    let m = l.model_dim();
    let aux = [n, n];
    let dims = [n, n, m];
    let l1 = l.embed(0, &aux, &aux)?;
    let l2 = l.embed(1, &aux, &aux)?;
    let emb = |x: &RingMatrix<B::Elem>| x.embed_rect(&[0, 1], &dims, &dims);
    let rp_ = emb(&rp.matrix)?;
    let rm_ = emb(&rm.matrix)?;
    let rpi = emb(&rp.matrix.inverse()?)?;
    let rmi = emb(&rm.matrix.inverse()?)?;
    let lhs = &(&(&l1 * &rmi) * &l2) * &rm_;
    let rhs = &(&(&rpi * &l2) * &rp_) * &l1;
    residual_norm(&lhs, &rhs, ctx)
}

/// `P23 R13 R12 - R13 R12 P23` on `V^L ⊗ V^I ⊗ V^J`.
pub fn verify_fusion_commutation<B: Backend>(
    p: &Projector<B::Elem>,
    r_lj: &RMatrix<B::Elem>,
    r_li: &RMatrix<B::Elem>,
    ctx: &B,
) -> Result<f64> {
    let (l, j) = check_legs(r_lj)?;
    let (l2, i) = check_legs(r_li)?;
    if l != l2 || p.dim() != i * j {
        return Err(Error::Shape("projector and R-matrix legs are incompatible".into()));
    }
    let dims = [l, i, j];
    let x = &r_lj.matrix.embed(&[0, 2], &dims)? * &r_li.matrix.embed(&[0, 1], &dims)?;
    let pp = p.numer.embed_rect(&[1, 2], &dims, &dims)?;
    residual_norm(&(&pp * &x), &(&x * &pp), ctx)
}

/// Fused R-matrix `P23 R13 R12 P23` compressed to the image of `P`.
pub fn fuse_r(
    r_lj: &RMatrix<Complex64>,
    r_li: &RMatrix<Complex64>,
    p: &Projector<Complex64>,
    image: &ImageBasis,
    label: RepLabel,
) -> Result<RMatrix<Complex64>> {
    let (l, j) = check_legs(r_lj)?;
    let (l2, i) = check_legs(r_li)?;
    if l != l2 || p.dim() != i * j || image.basis.rows() != i * j {
        return Err(Error::Shape("fusion legs are incompatible".into()));
    }
    let pm = p.matrix().ok_or(Error::Singular)?;
    let defect = (&(&pm * &pm) - &pm).data().iter().map(|x| x.norm()).fold(0.0, f64::max);
    if defect > 1e-9 {
        return Err(Error::NotIdempotent(defect));
    }
    let dims = [l, i, j];
    let x = &r_lj.matrix.embed(&[0, 2], &dims)? * &r_li.matrix.embed(&[0, 1], &dims)?;
    let id = RingMatrix::identity(l);
    let fused = &(&id.kron(&image.dual) * &x) * &id.kron(&image.basis);
    Ok(RMatrix {
        matrix: fused.with_legs(&[l, image.rank()])?,
        labels: (r_lj.labels.0.clone(), label),
        variant: r_lj.variant,
        normalization: Normalization::FusedUnnormalized,
        route: Route::Fusion,
        raw_scale: None,
    })
}

/// Which crossing relation to test.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Crossing {
    /// `χ¹ R (χ¹)^(-1) = R^{t1}` and `χ² R (χ²)^(-1) = R^{t2}`.
    Chi,
    /// `W¹ R^(-1) (W¹)^(-1) = R^{t1}` and `W² R (W²)^(-1) = (R^(-1))^{t2}`.
    Weyl,
}

/// Crossing residual with matrices `m1`, `m2` acting on the two legs.
pub fn verify_crossing<B: Backend>(
    r: &RMatrix<B::Elem>,
    m1: &RingMatrix<B::Elem>,
    m2: &RingMatrix<B::Elem>,
    kind: Crossing,
    ctx: &B,
) -> Result<Residual> {
    let (a, b) = check_legs(r)?;
    if m1.rows() != a || m2.rows() != b {
        return Err(Error::Shape("crossing matrices do not match the R-matrix legs".into()));
    }
    let dims = [a, b];
    let c1 = m1.embed(&[0], &dims)?;
    let c1i = m1.inverse()?.embed(&[0], &dims)?;
    let c2 = m2.embed(&[1], &dims)?;
    let c2i = m2.inverse()?.embed(&[1], &dims)?;
    let rm = &r.matrix;
    let rinv = rm.inverse()?;
    let (lhs1, rhs1, lhs2, rhs2) = match kind {
        Crossing::Chi => (&(&c1 * rm) * &c1i, rm.partial_transpose(0)?, &(&c2 * rm) * &c2i, rm.partial_transpose(1)?),
        Crossing::Weyl => {
            (&(&c1 * &rinv) * &c1i, rm.partial_transpose(0)?, &(&c2 * rm) * &c2i, rinv.partial_transpose(1)?)
        }
    };
    let name = match kind {
        Crossing::Chi => "chi crossing",
        Crossing::Weyl => "weyl crossing",
    };
    Ok(Residual::worst(
        name,
        vec![("leg1".into(), residual_norm(&lhs1, &rhs1, ctx)?), ("leg2".into(), residual_norm(&lhs2, &rhs2, ctx)?)],
    ))
}

/// The crossing relation read with the transpose of `R^(-1)` on the first
/// leg: `W¹ R (W¹)^(-1) = (R^(-1))^{t1}`, `(W²)^(-1) R^(-1) W² = R^{t2}`.
/// Reported for comparison; the consistent form is [`Crossing::Weyl`].
pub fn verify_crossing_literal<B: Backend>(
    r: &RMatrix<B::Elem>,
    w1: &RingMatrix<B::Elem>,
    w2: &RingMatrix<B::Elem>,
    ctx: &B,
) -> Result<Residual> {
    let (a, b) = check_legs(r)?;
    let dims = [a, b];
    let c1 = w1.embed(&[0], &dims)?;
    let c1i = w1.inverse()?.embed(&[0], &dims)?;
    let c2 = w2.embed(&[1], &dims)?;
    let c2i = w2.inverse()?.embed(&[1], &dims)?;
    let rinv = r.matrix.inverse()?;
    let first = residual_norm(&(&(&c1 * &r.matrix) * &c1i), &rinv.partial_transpose(0)?, ctx)?;
    let second = residual_norm(&(&(&c2i * &rinv) * &c2), &r.matrix.partial_transpose(1)?, ctx)?;
    Ok(Residual::worst("weyl crossing, literal reading", vec![("leg1".into(), first), ("leg2".into(), second)]))
}

/// `(M⊗M) R (M⊗M)^(-1) = R^t`. Holds for both `χ` and the q-Weyl matrix at
/// every rank, where the one-leg forms need a self-dual representation.
pub fn verify_both_legs<B: Backend>(r: &RMatrix<B::Elem>, m: &RingMatrix<B::Elem>, ctx: &B) -> Result<f64> {
    let cc = m.kron(m);
    let lhs = &(&cc * &r.matrix) * &cc.inverse()?;
    residual_norm(&lhs, &r.matrix.transpose(), ctx)
}

/// Helper for tests and negative controls: add `delta` to one entry.
pub fn perturbed<S: Scalar>(m: &RingMatrix<S>, i: usize, j: usize, delta: &S) -> RingMatrix<S> {
    let mut out = m.clone();
    *out.entry_mut(i, j) += delta;
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{Exact, Numeric};

    fn q(n: i64, d: i64) -> Laurent {
        Laurent::q_pow(Rational64::new(n, d))
    }

    #[test]
    fn sl2_fundamental_entries() {
        let ctx = Exact::new();
        let r = fundamental_r(2, Variant::Plus, &ctx).unwrap();
        let m = &r.matrix;
        assert_eq!(m.get(0, 0), &q(1, 2));
        assert_eq!(m.get(1, 1), &q(-1, 2));
        assert_eq!(m.get(1, 2), &(Laurent::omega() * q(-1, 2)));
        assert_eq!(m.get(2, 1), &Laurent::zero());
        let rm = fundamental_r(2, Variant::Minus, &ctx).unwrap();
        assert_eq!(rm.matrix.get(2, 1), &-(Laurent::omega() * q(1, 2)));
        assert_eq!(rm.matrix.get(0, 0), &q(-1, 2));
    }

    #[test]
    fn routes_agree_at_spin_half() {
        let ctx = Exact::new();
        let f = fundamental_r(2, Variant::Plus, &ctx).unwrap();
        let l = lop_substituted_r(Spin::HALF, Variant::Plus, Basis::Integral, &ctx).unwrap();
        let h = spin_rep(Spin::HALF, Basis::Integral, &ctx).unwrap();
        let u = universal_r_sl2(&h, &h, &ctx).unwrap();
        assert_eq!(f.matrix, l.matrix);
        assert_eq!(f.matrix, u.matrix);
        let fm = fundamental_r(2, Variant::Minus, &ctx).unwrap();
        let lm = lop_substituted_r(Spin::HALF, Variant::Minus, Basis::Integral, &ctx).unwrap();
        assert_eq!(fm.matrix, lm.matrix);
    }

    #[test]
    fn ybe_exact_for_sl3() {
        let ctx = Exact::for_rank(3);
        for v in [Variant::Plus, Variant::Minus] {
            let r = fundamental_r(3, v, &ctx).unwrap();
            assert_eq!(verify_ybe(&r, &ctx).unwrap(), 0.0);
        }
    }

    #[test]
    fn universal_matches_lop_at_spin_one() {
        let ctx = Exact::new();
        let h = spin_rep(Spin::HALF, Basis::Integral, &ctx).unwrap();
        let one = spin_rep(Spin::ONE, Basis::Integral, &ctx).unwrap();
        let u = universal_r_sl2(&h, &one, &ctx).unwrap();
        let l = lop_substituted_r(Spin::ONE, Variant::Plus, Basis::Integral, &ctx).unwrap();
        assert_eq!(u.matrix, l.matrix);
    }

    #[test]
    fn antipode_inverts_r() {
        let ctx = Exact::new();
        let h = spin_rep(Spin::HALF, Basis::Integral, &ctx).unwrap();
        let one = spin_rep(Spin::ONE, Basis::Integral, &ctx).unwrap();
        assert_eq!(antipode_defect(&h, &one, &ctx).unwrap(), 0.0);
        let n = Numeric::default();
        let a = spin_rep(Spin(3), Basis::Unitary, &n).unwrap();
        let b = spin_rep(Spin::ONE, Basis::Unitary, &n).unwrap();
        assert!(antipode_defect(&a, &b, &n).unwrap() < 1e-12);
    }

    #[test]
    fn weyl_free_crossing_rejects_identity() {
        let ctx = Exact::new();
        let r = fundamental_r(2, Variant::Plus, &ctx).unwrap();
        let id = RingMatrix::identity(2);
        let res = verify_crossing(&r, &id, &id, Crossing::Chi, &ctx).unwrap();
        assert!(res.value > 0.0);
    }
}

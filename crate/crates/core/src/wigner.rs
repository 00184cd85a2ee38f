//! Clebsch-Gordan maps for U_q(sl(2)) and Wigner-Eckart extraction.
//!
//! CG maps live in the unitary basis (numeric backend). The highest-weight
//! vector of each channel spans the kernel of `Δ(X+)` at weight `j` and is
//! phased so that its first nonzero coefficient, in lexicographic tensor
//! order, is positive. Lower vectors follow from `Δ(X-)` divided by the
//! matching unitary `ρ(X-)` entry, and `C = C'^†`.

use num_complex::Complex64;
use num_rational::Rational64;
use num_traits::{One, Zero};
use serde::Serialize;
use serde_json::json;

use crate::error::{Error, Result};
use crate::matrix::{kernel, residual_norm, ImageBasis, RingMatrix};
use crate::opmatrix::OpMatrix;
use crate::rep::{coproduct_rep, spin_rep, Basis, ModelSpace, Normalizer, RepLabel, Representation, Spin};
use crate::report::Residual;
use crate::rmatrix::{lop_substituted_r, LOperator, RMatrix, Variant};
use crate::scalar::{Backend, Numeric};
use crate::tensorop::{build_w_half, convert_contra_to_co, fuse_generating, weyl_matrix, GeneratingMatrix, Kind};

/// `C: V^{j1} ⊗ V^{j2} -> V^j` and its right inverse `C'`.
#[derive(Debug, Clone, PartialEq)]
pub struct CgMap {
    pub j1: Spin,
    pub j2: Spin,
    pub j: Spin,
    pub c: RingMatrix<Complex64>,
    pub c_prime: RingMatrix<Complex64>,
}

impl CgMap {
    /// Coefficient `<j1 m1; j2 m2 | j m>` by weight indices (`m = s - k`).
    pub fn coefficient(&self, k1: usize, k2: usize, k: usize) -> Complex64 {
        *self.c.get(k, k1 * self.j2.dim() + k2)
    }

    /// Image basis of the channel projector `C' C`, with dual `C`.
    pub fn image_basis(&self) -> ImageBasis {
        ImageBasis { basis: self.c_prime.clone(), dual: self.c.clone() }
    }

    pub fn to_json(&self) -> serde_json::Value {
        let mut rows = Vec::new();
        for k in 0..self.j.dim() {
            for k1 in 0..self.j1.dim() {
                for k2 in 0..self.j2.dim() {
                    let v = self.coefficient(k1, k2, k);
                    if v.norm() > 1e-14 {
                        rows.push(json!({
                            "m1": self.j1.m(k1).to_string(),
                            "m2": self.j2.m(k2).to_string(),
                            "m": self.j.m(k).to_string(),
                            "value": v.re,
                        }));
                    }
                }
            }
        }
        json!({
            "j1": self.j1.to_string(),
            "j2": self.j2.to_string(),
            "j": self.j.to_string(),
            "shape": [self.c.rows(), self.c.cols()],
            "matrix": self.c.to_json("numeric"),
            "coefficients": rows,
        })
    }
}

fn unitary(s: Spin, ctx: &Numeric) -> Result<Representation<Complex64>> {
    spin_rep(s, Basis::Unitary, ctx)
}

/// Clebsch-Gordan map for the channel `j` of `j1 ⊗ j2`.
pub fn build_cg(j1: Spin, j2: Spin, j: Spin, ctx: &Numeric) -> Result<CgMap> {
    if !Spin::channels(j1, j2).contains(&j) {
        return Err(Error::Invalid(format!("{j} is not in {j1} ⊗ {j2}")));
    }
    let r1 = unitary(j1, ctx)?;
    let r2 = unitary(j2, ctx)?;
    let rk = unitary(j, ctx)?;
    let delta = coproduct_rep(&r1, &r2, ctx)?;
    let d = delta.dim;
    let sel: Vec<usize> = (0..d).filter(|&i| delta.half_weights[0][i] == j.value()).collect();
    let sub = delta.raising[0].select_cols(&sel);
    let k = kernel(&sub, 1e-10);
    if k.cols() != 1 {
        return Err(Error::DegenerateKernel(k.cols()));
    }
    let mut top = vec![Complex64::zero(); d];
    for (r, &i) in sel.iter().enumerate() {
        top[i] = *k.get(r, 0);
    }
    let norm = top.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
    let lead = top.iter().find(|x| x.norm() > 1e-12).copied().ok_or(Error::DegenerateKernel(0))?;
    let phase = lead.conj() / lead.norm() / norm;
    for x in &mut top {
        *x *= phase;
    }
    let mut vecs = vec![top];
    for step in 0..j.twice() as usize {
        let next = delta.lowering[0].apply(vecs.last().expect("nonempty"));
        let denom = *rk.lowering[0].get(step + 1, step);
        vecs.push(next.into_iter().map(|x| x / denom).collect());
    }
    let n = vecs.len();
    let c_prime = RingMatrix::from_fn(d, n, |r, c| vecs[c][r]);
    let c = RingMatrix::from_fn(n, d, |r, c| vecs[r][c].conj());
    Ok(CgMap { j1, j2, j, c, c_prime })
}

/// Intertwining residual `C Δ(ξ) - ρ^j(ξ) C` for `ξ ∈ {q^H, X+, X-}`.
pub fn verify_intertwiner(cg: &CgMap, ctx: &Numeric) -> Result<Residual> {
    let r1 = unitary(cg.j1, ctx)?;
    let r2 = unitary(cg.j2, ctx)?;
    let rk = unitary(cg.j, ctx)?;
    let delta = coproduct_rep(&r1, &r2, ctx)?;
    let one = Rational64::one();
    let pairs = [
        ("qH", delta.q_h(0, one, ctx)?, rk.q_h(0, one, ctx)?),
        ("X+", delta.raising[0].clone(), rk.raising[0].clone()),
        ("X-", delta.lowering[0].clone(), rk.lowering[0].clone()),
    ];
    let mut parts = Vec::new();
    for (name, d, r) in pairs {
        parts.push((name.to_string(), residual_norm(&(&cg.c * &d), &(&r * &cg.c), ctx)?));
    }
    Ok(Residual::worst("C Δ(ξ) = ρ(ξ) C", parts))
}

/// Completeness `Σ_K C'_K C_K = 1` and orthogonality `C_K C'_L = δ_KL`.
pub fn verify_completeness(j1: Spin, j2: Spin, ctx: &Numeric) -> Result<Residual> {
    let maps = Spin::channels(j1, j2).into_iter().map(|j| build_cg(j1, j2, j, ctx)).collect::<Result<Vec<_>>>()?;
    let d = j1.dim() * j2.dim();
    let mut sum = RingMatrix::zeros(d, d);
    for m in &maps {
        sum = &sum + &(&m.c_prime * &m.c);
    }
    let complete = residual_norm(&sum, &RingMatrix::identity(d), ctx)?;
    let mut ortho: f64 = 0.0;
    for a in &maps {
        for b in &maps {
            let prod = &a.c * &b.c_prime;
            let want =
                if a.j == b.j { RingMatrix::identity(a.j.dim()) } else { RingMatrix::zeros(a.j.dim(), b.j.dim()) };
            ortho = ortho.max(residual_norm(&prod, &want, ctx)?);
        }
    }
    Ok(Residual::worst(
        "sum C'C = 1, C C' = δ",
        vec![("completeness".into(), complete), ("orthogonality".into(), ortho)],
    ))
}

/// Fusion through a CG map: `R13 R12 C'23 = C'23 R^{LK}` and
/// `C23 R13 R12 = R^{LK} C23` on `V^L ⊗ V^{j1} ⊗ V^{j2}`.
pub fn verify_cg_fusion(
    cg: &CgMap,
    r_lj: &RMatrix<Complex64>,
    r_li: &RMatrix<Complex64>,
    r_lk: &RMatrix<Complex64>,
    ctx: &Numeric,
) -> Result<Residual> {
    let (l, j) = r_lj.dims();
    let (l2, i) = r_li.dims();
    let (l3, k) = r_lk.dims();
    if l != l2 || l != l3 || i != cg.j1.dim() || j != cg.j2.dim() || k != cg.j.dim() {
        return Err(Error::Shape("R-matrix legs do not match the CG map".into()));
    }
    let dims = [l, i, j];
    let x = &r_lj.matrix.embed(&[0, 2], &dims)? * &r_li.matrix.embed(&[0, 1], &dims)?;
    let id = RingMatrix::identity(l);
    let cp = id.kron(&cg.c_prime);
    let c = id.kron(&cg.c);
    let right = residual_norm(&(&x * &cp), &(&cp * &r_lk.matrix), ctx)?;
    let left = residual_norm(&(&c * &x), &(&r_lk.matrix * &c), ctx)?;
    Ok(Residual::worst("R13 R12 C' = C' R", vec![("C' side".into(), right), ("C side".into(), left)]))
}

/// CG fusion check with every R-matrix built by L-operator substitution.
pub fn verify_cg_fusion_lop(cg: &CgMap, variant: Variant, ctx: &Numeric) -> Result<Residual> {
    let r = |s: Spin| lop_substituted_r(s, variant, Basis::Unitary, ctx);
    verify_cg_fusion(cg, &r(cg.j2)?, &r(cg.j1)?, &r(cg.j)?, ctx)
}

/// Columns spanning the spin-`k` block of the model space: raw monomials in
/// the integral basis, `|k,m>` in the unitary one.
pub fn block_vectors<B: Backend>(model: &ModelSpace<B>, k: Spin, basis: Basis) -> Result<RingMatrix<B::Elem>> {
    let n = k.dim();
    let mut cols = Vec::with_capacity(n);
    for idx in 0..n {
        cols.push(match basis {
            Basis::Integral => {
                let (a, b) = model.monomial_of(k, idx)?;
                let mut v = vec![B::Elem::zero(); model.dim()];
                v[model.index_of(a, b).expect("checked degree")] = B::Elem::one();
                v
            }
            Basis::Unitary => model.vector(k, idx)?,
        });
    }
    Ok(RingMatrix::from_fn(model.dim(), n, |r, c| cols[c][r].clone()))
}

/// `L¹ v^t - v^t R^{½,K}` for the row `v` of spin-`K` basis vectors.
pub fn basis_action_check<B: Backend>(
    model: &ModelSpace<B>,
    l: &LOperator<B::Elem>,
    r: &RMatrix<B::Elem>,
    k: Spin,
    basis: Basis,
) -> Result<f64> {
    let (a, kd) = r.dims();
    if kd != k.dim() || a != l.aux_dim() {
        return Err(Error::Shape("R-matrix legs do not match the block".into()));
    }
    let v = block_vectors(model, k, basis)?;
    let iv = RingMatrix::identity(a).kron(&v);
    let lhs = &l.ops.flatten() * &iv;
    let rhs = &iv * &r.matrix;
    residual_norm(&lhs, &rhs, model.ctx())
}

/// Outcome of factoring one `j_in -> j_out` block.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WeBlock {
    pub j_in: String,
    pub j_out: String,
    /// Common ratio `<j_out||T||j_in>`; `None` when the block vanishes.
    pub reduced: Option<[f64; 2]>,
    /// Largest relative deviation of the entrywise ratios from `reduced`.
    pub deviation: f64,
    pub structurally_zero: bool,
    pub max_element: f64,
}

/// Tensor-operator components of a generating matrix: row `index` of a
/// covariant matrix, or column `index` of a contravariant one mapped to
/// covariant components through the Weyl matrix.
pub fn components(g: &GeneratingMatrix<Complex64>, index: usize, ctx: &Numeric) -> Result<Vec<RingMatrix<Complex64>>> {
    match g.kind {
        Kind::Covariant => {
            if index >= g.rows() {
                return Err(Error::Invalid(format!("row {index} out of range")));
            }
            Ok((0..g.cols()).map(|k| g.get(index, k).clone()).collect())
        }
        Kind::Contravariant => {
            if index >= g.cols() {
                return Err(Error::Invalid(format!("column {index} out of range")));
            }
            let w = weyl_matrix(&g.label, ctx)?;
            let n = g.rows();
            Ok((0..n)
                .map(|j| {
                    let mut acc = RingMatrix::zeros(g.ops.model_dim(), g.ops.model_dim());
                    for k in 0..n {
                        let c = w.get(k, j);
                        if !c.is_zero() {
                            acc = &acc + &g.get(k, index).scale(c);
                        }
                    }
                    acc
                })
                .collect())
        }
    }
}

/// Spin carried by a generating matrix's rep label.
pub fn label_spin(label: &RepLabel) -> Result<Spin> {
    match label {
        RepLabel::Spin(s) | RepLabel::Fused(s) => Ok(*s),
        RepLabel::Fundamental(2) => Ok(Spin::HALF),
        other => Err(Error::RepMismatch(format!("{other} is not an sl(2) spin"))),
    }
}

/// Matrix elements `<j_out m''| T_k |j_in m'>` in the orthonormal `|j,m>` basis.
pub fn block_elements(
    comps: &[RingMatrix<Complex64>],
    j_in: Spin,
    j_out: Spin,
    model: &ModelSpace<Numeric>,
) -> Result<Vec<Vec<Vec<Complex64>>>> {
    let mut out = Vec::with_capacity(j_out.dim());
    for ko in 0..j_out.dim() {
        let mut row = Vec::with_capacity(j_in.dim());
        for ki in 0..j_in.dim() {
            let v = model.vector(j_in, ki)?;
            let mut per = Vec::with_capacity(comps.len());
            for t in comps {
                per.push(model.component(&t.apply(&v), j_out, ko)?);
            }
            row.push(per);
        }
        out.push(row);
    }
    Ok(out)
}

/// Factor one block as reduced element × CGC. A block outside the selection
/// rule must vanish; a nonzero element where the CGC vanishes is an error.
pub fn reduced_matrix_elements(
    comps: &[RingMatrix<Complex64>],
    op_spin: Spin,
    j_in: Spin,
    j_out: Spin,
    model: &ModelSpace<Numeric>,
) -> Result<WeBlock> {
    if comps.len() != op_spin.dim() {
        return Err(Error::Shape("component count does not match the operator spin".into()));
    }
    let elems = block_elements(comps, j_in, j_out, model)?;
    let max_element = elems.iter().flatten().flatten().map(|x| x.norm()).fold(0.0, f64::max);
    let allowed = Spin::channels(j_in, op_spin).contains(&j_out);
    let mut block = WeBlock {
        j_in: j_in.to_string(),
        j_out: j_out.to_string(),
        reduced: None,
        deviation: 0.0,
        structurally_zero: false,
        max_element,
    };
    if !allowed {
        if max_element > 1e-9 {
            return Err(Error::SelectionRule(max_element));
        }
        block.structurally_zero = true;
        return Ok(block);
    }
    let cg = build_cg(j_in, op_spin, j_out, model.ctx())?;
    let mut pairs = Vec::new();
    for (ko, row) in elems.iter().enumerate() {
        for (ki, per) in row.iter().enumerate() {
            for (k, me) in per.iter().enumerate() {
                let c = cg.coefficient(ki, k, ko);
                if c.norm() > 1e-12 {
                    pairs.push((*me, c));
                } else if me.norm() > 1e-9 * max_element.max(1.0) {
                    return Err(Error::SelectionRule(me.norm()));
                }
            }
        }
    }
    if max_element <= 1e-12 {
        block.structurally_zero = true;
        return Ok(block);
    }
    let (me0, c0) =
        pairs.iter().max_by(|a, b| a.1.norm().total_cmp(&b.1.norm())).copied().expect("allowed block has CGCs");
    let reduced = me0 / c0;
    let scale = reduced.norm().max(1e-300);
    block.deviation = pairs.iter().map(|(me, c)| (me / c - reduced).norm() / scale).fold(0.0, f64::max);
    block.reduced = Some([reduced.re, reduced.im]);
    Ok(block)
}

/// Every block `j_in -> j_in ± 1/2` (and the forbidden ones) for `j_in <= max_j`.
pub fn wigner_eckart_scan(
    comps: &[RingMatrix<Complex64>],
    op_spin: Spin,
    max_j: Spin,
    model: &ModelSpace<Numeric>,
) -> Result<Vec<WeBlock>> {
    let mut out = Vec::new();
    for tj in 0..=max_j.twice() {
        let j_in = Spin(tj);
        let top = tj + 2 * op_spin.twice() + 2;
        for to in 0..=top {
            if !(to + tj + op_spin.twice()).is_multiple_of(2) || to as usize > model.degree() {
                continue;
            }
            if (tj + op_spin.twice()) as usize > model.degree() {
                continue;
            }
            out.push(reduced_matrix_elements(comps, op_spin, j_in, Spin(to), model)?);
        }
    }
    Ok(out)
}

/// Covariant spin-`s` generating matrix built from spin-1/2 pieces by
/// repeated CG fusion; rows are tensor operators of spin `s`.
pub fn iterated_covariant(s: Spin, model: &ModelSpace<Numeric>) -> Result<GeneratingMatrix<Complex64>> {
    if s.twice() == 0 {
        return Err(Error::Invalid("spin 0 has no generating matrix here".into()));
    }
    let ctx = model.ctx();
    let w = build_w_half(model, Normalizer::InverseSqrtQnum)?;
    let weyl = weyl_matrix(&RepLabel::Spin(Spin::HALF), ctx)?;
    let half = convert_contra_to_co(&w, &weyl)?;
    let f = RingMatrix::identity(model.dim());
    let mut acc = half.clone();
    for t in 2..=s.twice() {
        let prev = Spin(t - 1);
        let cg = build_cg(prev, Spin::HALF, Spin(t), ctx)?;
        let p = crate::matrix::Projector::from_matrix(&cg.c_prime * &cg.c);
        acc = fuse_generating(&acc, &half, &p, &cg.image_basis(), &f, RepLabel::Fused(Spin(t)), model)?;
    }
    Ok(acc)
}

/// One `(m1, m2, m)` row of a CGC table.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CgcEntry {
    pub j: String,
    pub m1: String,
    pub m2: String,
    pub m: String,
    pub direct: f64,
    /// From matrix elements of a spin-`j2` tensor operator, divided by its reduced element.
    pub extracted: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CgcChannel {
    pub j: String,
    pub entries: Vec<CgcEntry>,
    /// `max |direct - extracted|`, `None` when no operator row reaches this channel.
    pub agreement: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CgcTable {
    pub j1: String,
    pub j2: String,
    pub channels: Vec<CgcChannel>,
}

/// CGC table for `j1 ⊗ j2` with Wigner-Eckart cross-check. The model space
/// is enlarged to degree `2(j1 + j2)` when needed.
pub fn cgc_table(j1: Spin, j2: Spin, degree: usize, ctx: &Numeric) -> Result<CgcTable> {
    if j1.twice() > 8 || j2.twice() > 8 {
        return Err(Error::Invalid("CGC tables are limited to spins <= 4".into()));
    }
    let need = (j1.twice() + j2.twice()) as usize;
    let model = ModelSpace::new(degree.max(need).max(1), Rational64::zero(), ctx)?;
    let op = if j2.twice() > 0 { Some(iterated_covariant(j2, &model)?) } else { None };
    let mut channels = Vec::new();
    for j in Spin::channels(j1, j2) {
        let cg = build_cg(j1, j2, j, ctx)?;
        let mut extracted: Option<Vec<Vec<Vec<Complex64>>>> = None;
        if let Some(u) = &op {
            for row in 0..u.rows() {
                let comps = components(u, row, ctx)?;
                let block = reduced_matrix_elements(&comps, j2, j1, j, &model)?;
                if let Some([re, im]) = block.reduced {
                    let red = Complex64::new(re, im);
                    let elems = block_elements(&comps, j1, j, &model)?;
                    extracted = Some(
                        elems
                            .into_iter()
                            .map(|r| r.into_iter().map(|p| p.into_iter().map(|x| x / red).collect()).collect())
                            .collect(),
                    );
                    break;
                }
            }
        }
        let mut entries = Vec::new();
        let mut agreement: Option<f64> = extracted.as_ref().map(|_| 0.0);
        for k in 0..j.dim() {
            for k1 in 0..j1.dim() {
                for k2 in 0..j2.dim() {
                    if j1.m(k1) + j2.m(k2) != j.m(k) {
                        continue;
                    }
                    let direct = cg.coefficient(k1, k2, k).re;
                    let ex = extracted.as_ref().map(|e| e[k][k1][k2].re);
                    if let (Some(a), Some(x)) = (agreement.as_mut(), ex) {
                        *a = a.max((x - direct).abs());
                    }
                    entries.push(CgcEntry {
                        j: j.to_string(),
                        m1: j1.m(k1).to_string(),
                        m2: j2.m(k2).to_string(),
                        m: j.m(k).to_string(),
                        direct,
                        extracted: ex,
                    });
                }
            }
        }
        channels.push(CgcChannel { j: j.to_string(), entries, agreement });
    }
    Ok(CgcTable { j1: j1.to_string(), j2: j2.to_string(), channels })
}

impl CgcTable {
    pub fn worst_agreement(&self) -> Option<f64> {
        self.channels.iter().filter_map(|c| c.agreement).reduce(f64::max)
    }

    pub fn to_text(&self) -> String {
        let mut out = format!("CGC table {} x {}\n", self.j1, self.j2);
        for ch in &self.channels {
            out.push_str(&format!("channel j = {}", ch.j));
            match ch.agreement {
                Some(a) => out.push_str(&format!("  (agreement {a:.3e})\n")),
                None => out.push_str("  (no operator row reaches this channel)\n"),
            }
            out.push_str(&format!("{:>6} {:>6} {:>6} {:>22} {:>22}\n", "m1", "m2", "m", "direct", "extracted"));
            for e in &ch.entries {
                let ex = e.extracted.map(|x| format!("{x:>22.15e}")).unwrap_or_else(|| format!("{:>22}", "-"));
                out.push_str(&format!("{:>6} {:>6} {:>6} {:>22.15e} {}\n", e.m1, e.m2, e.m, e.direct, ex));
            }
        }
        out
    }
}

/// `OpMatrix` of one tensor-operator row, for callers that want to run the
/// covariant relation on a single row.
pub fn row_operator(g: &GeneratingMatrix<Complex64>, row: usize) -> Result<OpMatrix<Complex64>> {
    OpMatrix::new(1, g.cols(), (0..g.cols()).map(|k| g.get(row, k).clone()).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rmatrix::build_l;
    use crate::scalar::Exact;

    #[test]
    fn half_half_channels() {
        let ctx = Numeric::default();
        let top = build_cg(Spin::HALF, Spin::HALF, Spin::ONE, &ctx).unwrap();
        assert!((top.coefficient(0, 0, 0) - Complex64::new(1.0, 0.0)).norm() < 1e-14);
        let singlet = build_cg(Spin::HALF, Spin::HALF, Spin::ZERO, &ctx).unwrap();
        assert_eq!(singlet.c.cols(), 4);
        assert!(singlet.coefficient(0, 0, 0).norm() < 1e-14);
        assert!(singlet.coefficient(1, 1, 0).norm() < 1e-14);
        let a = singlet.coefficient(0, 1, 0);
        let b = singlet.coefficient(1, 0, 0);
        assert!(a.re > 0.0);
        // ratio is -q^(±1)
        let ratio = (b / a).re;
        assert!((ratio + 1.2).abs() < 1e-12 || (ratio + 1.0 / 1.2).abs() < 1e-12, "{ratio}");
    }

    #[test]
    fn intertwiner_and_completeness() {
        let ctx = Numeric::default();
        for (a, b) in [(1, 1), (1, 2), (2, 3), (4, 4)] {
            let (a, b) = (Spin(a), Spin(b));
            for j in Spin::channels(a, b) {
                let cg = build_cg(a, b, j, &ctx).unwrap();
                assert!(verify_intertwiner(&cg, &ctx).unwrap().value < 1e-11);
            }
            assert!(verify_completeness(a, b, &ctx).unwrap().value < 1e-11);
        }
        assert!(build_cg(Spin::HALF, Spin::HALF, Spin(4), &ctx).is_err());
    }

    #[test]
    fn fusion_through_cg() {
        let ctx = Numeric::default();
        for j in [Spin::ONE, Spin::ZERO] {
            let cg = build_cg(Spin::HALF, Spin::HALF, j, &ctx).unwrap();
            for v in [Variant::Plus, Variant::Minus] {
                assert!(verify_cg_fusion_lop(&cg, v, &ctx).unwrap().value < 1e-12);
            }
        }
    }

    #[test]
    fn basis_action_exact() {
        let ctx = Exact::new();
        let m = ModelSpace::new(6, Rational64::zero(), &ctx).unwrap();
        for v in [Variant::Plus, Variant::Minus] {
            let l = build_l(&m, v).unwrap();
            for k in [Spin::ZERO, Spin::HALF, Spin(4)] {
                let r = lop_substituted_r(k, v, Basis::Integral, &ctx).unwrap();
                assert_eq!(basis_action_check(&m, &l, &r, k, Basis::Integral).unwrap(), 0.0);
            }
        }
    }

    #[test]
    fn wigner_eckart_half() {
        let ctx = Numeric::default();
        let m = ModelSpace::new(8, Rational64::zero(), &ctx).unwrap();
        let w = build_w_half(&m, Normalizer::InverseSqrtQnum).unwrap();
        for col in 0..2 {
            let comps = components(&w, col, &ctx).unwrap();
            for b in wigner_eckart_scan(&comps, Spin::HALF, Spin(4), &m).unwrap() {
                assert!(b.deviation < 1e-9, "{b:?}");
            }
        }
    }

    #[test]
    fn cgc_table_agrees() {
        let ctx = Numeric::default();
        let t = cgc_table(Spin::HALF, Spin::HALF, 4, &ctx).unwrap();
        assert_eq!(t.channels.len(), 2);
        assert!(t.worst_agreement().unwrap() < 1e-8, "{}", t.to_text());
        let t = cgc_table(Spin::HALF, Spin::ONE, 4, &ctx).unwrap();
        let js: Vec<_> = t.channels.iter().map(|c| c.j.clone()).collect();
        assert_eq!(js, vec!["1/2", "3/2"]);
        assert!(t.worst_agreement().unwrap() < 1e-8, "{}", t.to_text());
    }
}

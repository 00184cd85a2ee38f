//! Representations of U_q(sl(n)) and the polynomial model space of U_q(sl(2)).
//!
//! Cartan elements are stored in the "half" normalization used by sl(2):
//! `q^H = diag(q^(s+1-m))` on spin `s`, and `H = H_i/2` for the sl(n)
//! generators `H_i = E_ii - E_{i+1,i+1}`. With that normalization every rank
//! shares the coproduct
//!
//! ```text
//! Δ(X_i) = X_i ⊗ q^H + q^(-H) ⊗ X_i,    Δ(H) = H ⊗ 1 + 1 ⊗ H,
//! ```
//!
//! which is the orientation the fundamental R-matrix intertwines, and the
//! antipode `S(X±) = -q^(±1) X±`.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use num_rational::Rational64;
use num_traits::{One, Zero};
use serde::Serialize;
use serde_json::json;

use crate::error::{Error, Result};
use crate::matrix::RingMatrix;
use crate::scalar::{Backend, Laurent, Scalar};

/// A spin stored doubled: `Spin(1)` is spin 1/2, `Spin(2)` spin 1.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Spin(pub u32);

impl Spin {
    pub const ZERO: Spin = Spin(0);
    pub const HALF: Spin = Spin(1);
    pub const ONE: Spin = Spin(2);

    pub fn twice(self) -> u32 {
        self.0
    }

    pub fn dim(self) -> usize {
        self.0 as usize + 1
    }

    pub fn value(self) -> Rational64 {
        Rational64::new(self.0 as i64, 2)
    }

    /// Weight `m` of basis index `k` (0-based, highest first).
    pub fn m(self, k: usize) -> Rational64 {
        Rational64::new(self.0 as i64 - 2 * k as i64, 2)
    }

    /// Channels `|j1-j2|, ..., j1+j2`.
    pub fn channels(a: Spin, b: Spin) -> Vec<Spin> {
        let lo = a.0.abs_diff(b.0);
        (lo..=a.0 + b.0).step_by(2).map(Spin).collect()
    }
}

impl fmt::Display for Spin {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_multiple_of(2) {
            write!(f, "{}", self.0 / 2)
        } else {
            write!(f, "{}/2", self.0)
        }
    }
}

impl FromStr for Spin {
    type Err = Error;
    fn from_str(s: &str) -> Result<Spin> {
        let bad = || Error::Invalid(format!("'{s}' is not a spin"));
        let r: Rational64 = match s.split_once('/') {
            Some((n, d)) => Rational64::new(n.trim().parse().map_err(|_| bad())?, d.trim().parse().map_err(|_| bad())?),
            None => Rational64::from_integer(s.trim().parse().map_err(|_| bad())?),
        };
        let two = r * 2;
        if !two.is_integer() || two < Rational64::zero() {
            return Err(bad());
        }
        Ok(Spin(two.to_integer() as u32))
    }
}

/// Which representation a matrix set realizes.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub enum RepLabel {
    Trivial,
    Spin(Spin),
    Fundamental(usize),
    Coproduct(Box<RepLabel>, Box<RepLabel>),
    /// Image of a fusion projector, labelled by its spin when known.
    Fused(Spin),
}

impl fmt::Display for RepLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RepLabel::Trivial => write!(f, "trivial"),
            RepLabel::Spin(s) => write!(f, "spin-{s}"),
            RepLabel::Fundamental(n) => write!(f, "fundamental-{n}"),
            RepLabel::Coproduct(a, b) => write!(f, "({a})x({b})"),
            RepLabel::Fused(s) => write!(f, "fused-{s}"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Basis {
    /// Orthonormal basis with square roots of q-numbers; numeric only.
    Unitary,
    /// Diagonally similar basis with Laurent entries.
    Integral,
}

/// Which normalization of `H` a representation reports.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum HNorm {
    /// sl(2) style: `q^H` has exponents `s+1-m`.
    Half,
    /// sl(n) style: `H_i = E_ii - E_{i+1,i+1}`.
    Cartan,
}

/// Structure data of sl(n).
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AlgebraSpec {
    pub n: usize,
    pub cartan: Vec<Vec<i64>>,
    /// Diagram involution on simple roots (0-based), `θ(i) = n-2-i`.
    pub theta: Vec<usize>,
}

impl AlgebraSpec {
    pub fn sl(n: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::Invalid(format!("sl({n}) needs n >= 2")));
        }
        let r = n - 1;
        let cartan = (0..r)
            .map(|i| {
                (0..r)
                    .map(|j| match i.abs_diff(j) {
                        0 => 2,
                        1 => -1,
                        _ => 0,
                    })
                    .collect()
            })
            .collect();
        let theta = (0..r).map(|i| r - 1 - i).collect();
        Ok(AlgebraSpec { n, cartan, theta })
    }

    pub fn rank(&self) -> usize {
        self.n - 1
    }

    pub fn generator_labels(&self) -> Vec<String> {
        (1..=self.rank()).flat_map(|i| [format!("H_{i}"), format!("X+_{i}"), format!("X-_{i}")]).collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Representation<S> {
    pub label: RepLabel,
    pub basis: Basis,
    pub h_norm: HNorm,
    pub dim: usize,
    /// `half_weights[i][k]`: eigenvalue of the half-normalized `H_i` on basis vector `k`.
    pub half_weights: Vec<Vec<Rational64>>,
    pub raising: Vec<RingMatrix<S>>,
    pub lowering: Vec<RingMatrix<S>>,
}

impl<S: Scalar> Representation<S> {
    pub fn rank(&self) -> usize {
        self.raising.len()
    }

    /// Eigenvalues of `H_i` in this representation's own normalization.
    pub fn weights(&self, i: usize) -> Vec<Rational64> {
        let f = match self.h_norm {
            HNorm::Half => Rational64::one(),
            HNorm::Cartan => Rational64::from_integer(2),
        };
        self.half_weights[i].iter().map(|w| *w * f).collect()
    }

    /// Total half-weight (sum over Cartan generators), used to order bases.
    pub fn total_weights(&self) -> Vec<Rational64> {
        (0..self.dim).map(|k| self.half_weights.iter().map(|w| w[k]).sum()).collect()
    }

    /// `q^(c H_i)` with `H_i` half-normalized.
    pub fn q_h<B: Backend<Elem = S>>(&self, i: usize, c: Rational64, ctx: &B) -> Result<RingMatrix<S>> {
        let d = self.half_weights[i].iter().map(|w| ctx.q_pow(*w * c)).collect::<Result<Vec<_>>>()?;
        Ok(RingMatrix::diag(d))
    }

    pub fn x_plus(&self, i: usize) -> &RingMatrix<S> {
        &self.raising[i]
    }

    pub fn x_minus(&self, i: usize) -> &RingMatrix<S> {
        &self.lowering[i]
    }

    /// Antipode images `S(X±_i) = -q^(±1) X±_i`.
    pub fn antipode_x<B: Backend<Elem = S>>(&self, i: usize, raising: bool, ctx: &B) -> RingMatrix<S> {
        let (m, k) = if raising { (&self.raising[i], 1) } else { (&self.lowering[i], -1) };
        m.scale(&-ctx.q_int(k))
    }

    /// Residual of `[X+, X-] = (q^(2H) - q^(-2H))/ω` and `q^H X± q^(-H) = q^(±1) X±`.
    pub fn relation_defect<B: Backend<Elem = S>>(&self, ctx: &B) -> Result<f64> {
        let mut worst: f64 = 0.0;
        for i in 0..self.rank() {
            let xp = &self.raising[i];
            let xm = &self.lowering[i];
            let comm = &(xp * xm) - &(xm * xp);
            // (q^(2H) - q^(-2H))/ω is the Laurent q-number [2H] entrywise
            let rhs = RingMatrix::diag(
                self.half_weights[i]
                    .iter()
                    .map(|w| {
                        let two = *w * 2;
                        if !two.is_integer() {
                            return Err(Error::Invalid(format!("weight {w} is not half-integral")));
                        }
                        Ok(ctx.lift(&Laurent::qnum(two.to_integer())))
                    })
                    .collect::<Result<Vec<_>>>()?,
            );
            worst = worst.max(crate::matrix::residual_norm(&comm, &rhs, ctx)?);
            let k = self.q_h(i, Rational64::one(), ctx)?;
            let kinv = self.q_h(i, -Rational64::one(), ctx)?;
            let q = ctx.q_int(1);
            let qi = ctx.q_int(-1);
            worst = worst.max(crate::matrix::residual_norm(&(&(&k * xp) * &kinv), &xp.scale(&q), ctx)?);
            worst = worst.max(crate::matrix::residual_norm(&(&(&k * xm) * &kinv), &xm.scale(&qi), ctx)?);
        }
        Ok(worst)
    }

    pub fn to_json(&self, backend: &str) -> serde_json::Value {
        let mut gens = serde_json::Map::new();
        for i in 0..self.rank() {
            gens.insert(format!("X+_{}", i + 1), self.raising[i].to_json(backend));
            gens.insert(format!("X-_{}", i + 1), self.lowering[i].to_json(backend));
            let w: Vec<String> = self.weights(i).iter().map(|x| x.to_string()).collect();
            gens.insert(format!("H_{}", i + 1), json!(w));
        }
        json!({
            "label": self.label.to_string(),
            "basis": self.basis,
            "h_normalization": self.h_norm,
            "dimension": self.dim,
            "generators": gens,
        })
    }
}

/// Spin-`s` representation of U_q(sl(2)); basis index `k = 0..2s` has weight `m = s - k`.
pub fn spin_rep<B: Backend>(s: Spin, basis: Basis, ctx: &B) -> Result<Representation<B::Elem>> {
    let n = s.dim();
    let ts = s.twice() as i64;
    let mut xp = RingMatrix::zeros(n, n);
    let mut xm = RingMatrix::zeros(n, n);
    for k in 0..n.saturating_sub(1) {
        let a = Laurent::qnum(k as i64 + 1);
        let b = Laurent::qnum(ts - k as i64);
        match basis {
            Basis::Integral => {
                xp.set(k, k + 1, ctx.lift(&a));
                xm.set(k + 1, k, ctx.lift(&b));
            }
            Basis::Unitary => {
                let v = ctx.sqrt(&ctx.lift(&(a * b))).map_err(|_| Error::NumericOnly("the unitary spin basis"))?;
                xp.set(k, k + 1, v.clone());
                xm.set(k + 1, k, v);
            }
        }
    }
    Ok(Representation {
        label: RepLabel::Spin(s),
        basis,
        h_norm: HNorm::Half,
        dim: n,
        half_weights: vec![(0..n).map(|k| s.m(k)).collect()],
        raising: vec![xp],
        lowering: vec![xm],
    })
}

/// Diagonal `d` with `ρ_unitary = diag(d) ρ_integral diag(d)^(-1)`.
pub fn unitary_similarity<B: Backend>(s: Spin, ctx: &B) -> Result<Vec<B::Elem>> {
    let ts = s.twice() as i64;
    let mut d = vec![B::Elem::one()];
    for k in 0..s.twice() as i64 {
        let num = ctx.lift(&Laurent::qnum(k + 1));
        let den = ctx.lift(&Laurent::qnum(ts - k)).inverse().ok_or(Error::Singular)?;
        let r = ctx.sqrt(&num.mul_ref(&den))?;
        let last = d.last().expect("nonempty").mul_ref(&r);
        d.push(last);
    }
    Ok(d)
}

/// Defining representation of U_q(sl(n)).
pub fn fundamental_rep<B: Backend>(n: usize, _ctx: &B) -> Result<Representation<B::Elem>> {
    if n < 2 {
        return Err(Error::Invalid(format!("fundamental rep needs n >= 2, got {n}")));
    }
    let half = Rational64::new(1, 2);
    let half_weights = (0..n - 1)
        .map(|i| {
            (0..n)
                .map(|k| {
                    if k == i {
                        half
                    } else if k == i + 1 {
                        -half
                    } else {
                        Rational64::zero()
                    }
                })
                .collect()
        })
        .collect();
    Ok(Representation {
        label: RepLabel::Fundamental(n),
        basis: Basis::Integral,
        h_norm: HNorm::Cartan,
        dim: n,
        half_weights,
        raising: (0..n - 1).map(|i| RingMatrix::unit(n, n, i, i + 1)).collect(),
        lowering: (0..n - 1).map(|i| RingMatrix::unit(n, n, i + 1, i)).collect(),
    })
}

/// Representation on `V1 ⊗ V2` through the coproduct.
pub fn coproduct_rep<B: Backend>(
    r1: &Representation<B::Elem>,
    r2: &Representation<B::Elem>,
    ctx: &B,
) -> Result<Representation<B::Elem>> {
    if r1.rank() != r2.rank() {
        return Err(Error::RepMismatch(format!("{} vs {}", r1.label, r2.label)));
    }
    let one = Rational64::one();
    let mut raising = Vec::new();
    let mut lowering = Vec::new();
    let mut half_weights = Vec::new();
    for i in 0..r1.rank() {
        let k2 = r2.q_h(i, one, ctx)?;
        let k1inv = r1.q_h(i, -one, ctx)?;
        raising.push(&r1.raising[i].kron(&k2) + &k1inv.kron(&r2.raising[i]));
        lowering.push(&r1.lowering[i].kron(&k2) + &k1inv.kron(&r2.lowering[i]));
        let mut w = Vec::with_capacity(r1.dim * r2.dim);
        for a in &r1.half_weights[i] {
            for b in &r2.half_weights[i] {
                w.push(*a + *b);
            }
        }
        half_weights.push(w);
    }
    Ok(Representation {
        label: RepLabel::Coproduct(Box::new(r1.label.clone()), Box::new(r2.label.clone())),
        basis: if r1.basis == r2.basis { r1.basis } else { Basis::Integral },
        h_norm: r1.h_norm,
        dim: r1.dim * r2.dim,
        half_weights,
        raising,
        lowering,
    })
}

/// Diagonal normalizer `f(p)` applied to the spin operator `p = a + b + 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Normalizer {
    Identity,
    InverseQnum,
    InverseSqrtQnum,
}

impl FromStr for Normalizer {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "identity" => Ok(Normalizer::Identity),
            "inverse-qnum" => Ok(Normalizer::InverseQnum),
            "inverse-sqrt-qnum" => Ok(Normalizer::InverseSqrtQnum),
            _ => Err(Error::Invalid(format!("unknown normalizer '{s}'"))),
        }
    }
}

/// Polynomials in `z1, z2` of total degree at most `D`, realizing every
/// spin `j ≤ D/2` once: `z1^a z2^b` spans spin `(a+b)/2`, weight `(a-b)/2`.
///
/// Basis order: by total degree, then `a` descending (highest weight first).
#[derive(Debug, Clone)]
pub struct ModelSpace<B: Backend> {
    degree: usize,
    gamma: Rational64,
    ctx: B,
    basis: Vec<(usize, usize)>,
    index: HashMap<(usize, usize), usize>,
}

impl<B: Backend> ModelSpace<B> {
    pub fn new(degree: usize, gamma: Rational64, ctx: &B) -> Result<Self> {
        if degree < 1 {
            return Err(Error::Invalid("model space needs degree >= 1".into()));
        }
        let mut basis = Vec::new();
        for d in 0..=degree {
            for a in (0..=d).rev() {
                basis.push((a, d - a));
            }
        }
        let index = basis.iter().enumerate().map(|(i, &ab)| (ab, i)).collect();
        Ok(ModelSpace { degree, gamma, ctx: ctx.clone(), basis, index })
    }

    pub fn ctx(&self) -> &B {
        &self.ctx
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn gamma(&self) -> Rational64 {
        self.gamma
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[(usize, usize)] {
        &self.basis
    }

    pub fn index_of(&self, a: usize, b: usize) -> Option<usize> {
        self.index.get(&(a, b)).copied()
    }

    pub fn degree_of(&self, idx: usize) -> usize {
        let (a, b) = self.basis[idx];
        a + b
    }

    /// Basis indices of degree at most `D - margin`.
    pub fn margin_indices(&self, margin: usize) -> Result<Vec<usize>> {
        if margin > self.degree {
            return Err(Error::MarginExhausted { margin, degree: self.degree });
        }
        let top = self.degree - margin;
        Ok((0..self.dim()).filter(|&i| self.degree_of(i) <= top).collect())
    }

    fn diagonal(&self, f: impl Fn(usize, usize) -> Result<B::Elem>) -> Result<RingMatrix<B::Elem>> {
        Ok(RingMatrix::diag(self.basis.iter().map(|&(a, b)| f(a, b)).collect::<Result<Vec<_>>>()?))
    }

    /// Matrix of a monomial map `(a,b) -> c(a,b) (a',b')`, dropped when the
    /// target leaves the truncated space.
    fn shift(&self, f: impl Fn(usize, usize) -> Option<((usize, usize), Laurent)>) -> RingMatrix<B::Elem> {
        let n = self.dim();
        let mut m = RingMatrix::zeros(n, n);
        for (col, &(a, b)) in self.basis.iter().enumerate() {
            if let Some((target, c)) = f(a, b) {
                if let Some(row) = self.index_of(target.0, target.1) {
                    if !c.is_zero() {
                        m.set(row, col, self.ctx.lift(&c));
                    }
                }
            }
        }
        m
    }

    /// `X+ = z1 z2^(-1)[z2 ∂2]`: `z1^a z2^b -> [b] z1^(a+1) z2^(b-1)`.
    pub fn x_plus(&self) -> RingMatrix<B::Elem> {
        self.shift(|a, b| (b > 0).then(|| ((a + 1, b - 1), Laurent::qnum(b as i64))))
    }

    /// `X- = z2 z1^(-1)[z1 ∂1]`: `z1^a z2^b -> [a] z1^(a-1) z2^(b+1)`.
    pub fn x_minus(&self) -> RingMatrix<B::Elem> {
        self.shift(|a, b| (a > 0).then(|| ((a - 1, b + 1), Laurent::qnum(a as i64))))
    }

    /// `q^(cH)` with `H = (z1∂1 - z2∂2)/2`.
    pub fn q_h(&self, c: Rational64) -> Result<RingMatrix<B::Elem>> {
        self.diagonal(|a, b| self.ctx.q_pow(Rational64::new(a as i64 - b as i64, 2) * c))
    }

    pub fn mul_z1(&self) -> RingMatrix<B::Elem> {
        self.shift(|a, b| Some(((a + 1, b), Laurent::from_int(1))))
    }

    pub fn mul_z2(&self) -> RingMatrix<B::Elem> {
        self.shift(|a, b| Some(((a, b + 1), Laurent::from_int(1))))
    }

    /// `z1^(-1)[z1 ∂1]`: `z1^a z2^b -> [a] z1^(a-1) z2^b`.
    pub fn lower_z1(&self) -> RingMatrix<B::Elem> {
        self.shift(|a, b| (a > 0).then(|| ((a - 1, b), Laurent::qnum(a as i64))))
    }

    /// `z2^(-1)[z2 ∂2]`.
    pub fn lower_z2(&self) -> RingMatrix<B::Elem> {
        self.shift(|a, b| (b > 0).then(|| ((a, b - 1), Laurent::qnum(b as i64))))
    }

    /// `q^(c z1∂1)`.
    pub fn dilation_z1(&self, c: Rational64) -> Result<RingMatrix<B::Elem>> {
        self.diagonal(|a, _| self.ctx.q_pow(c * a as i64))
    }

    /// `q^(c z2∂2)`.
    pub fn dilation_z2(&self, c: Rational64) -> Result<RingMatrix<B::Elem>> {
        self.diagonal(|_, b| self.ctx.q_pow(c * b as i64))
    }

    /// The spin operator `p = z1∂1 + z2∂2 + 1`.
    pub fn spin_op(&self) -> RingMatrix<B::Elem> {
        self.diagonal(|a, b| Ok(self.ctx.int((a + b + 1) as i64))).expect("integer diagonal")
    }

    /// `q^(c p)`.
    pub fn q_spin(&self, c: Rational64) -> Result<RingMatrix<B::Elem>> {
        self.diagonal(|a, b| self.ctx.q_pow(c * (a + b + 1) as i64))
    }

    pub fn normalizer(&self, f: Normalizer) -> Result<RingMatrix<B::Elem>> {
        self.diagonal(|a, b| {
            let p = (a + b + 1) as i64;
            let qp = self.ctx.lift(&Laurent::qnum(p));
            match f {
                Normalizer::Identity => Ok(B::Elem::one()),
                Normalizer::InverseQnum => qp.inverse().ok_or_else(|| Error::NotRepresentable(format!("1/[{p}]"))),
                Normalizer::InverseSqrtQnum => {
                    let s = self.ctx.sqrt(&qp).map_err(|_| Error::NumericOnly("the 1/sqrt([p]) normalizer"))?;
                    s.inverse().ok_or(Error::Singular)
                }
            }
        })
    }

    /// Coefficients of `|j,m> = z1^(j+m) z2^(j-m) / sqrt([j+m]! [j-m]!)`.
    pub fn vector(&self, j: Spin, k: usize) -> Result<Vec<B::Elem>> {
        let (a, b) = self.monomial_of(j, k)?;
        let norm = self.ctx.lift(&(Laurent::qfactorial(a as u32) * Laurent::qfactorial(b as u32)));
        let c = self.ctx.sqrt(&norm)?.inverse().ok_or(Error::Singular)?;
        let mut v = vec![B::Elem::zero(); self.dim()];
        v[self.index_of(a, b).expect("checked degree")] = c;
        Ok(v)
    }

    /// `(a, b)` exponents of weight index `k` (0-based, `m = j - k`) in spin `j`.
    pub fn monomial_of(&self, j: Spin, k: usize) -> Result<(usize, usize)> {
        let d = j.twice() as usize;
        if d > self.degree {
            return Err(Error::Invalid(format!("spin {j} needs degree {d} > {}", self.degree)));
        }
        if k > d {
            return Err(Error::Invalid(format!("weight index {k} outside spin {j}")));
        }
        Ok((d - k, k))
    }

    /// `<j,m|v>` for the q-factorial inner product in which `|j,m>` are orthonormal.
    pub fn component(&self, v: &[B::Elem], j: Spin, k: usize) -> Result<B::Elem> {
        let (a, b) = self.monomial_of(j, k)?;
        let norm = self.ctx.lift(&(Laurent::qfactorial(a as u32) * Laurent::qfactorial(b as u32)));
        let s = self.ctx.sqrt(&norm)?;
        Ok(v[self.index_of(a, b).expect("checked degree")].mul_ref(&s))
    }

    pub fn to_json(&self) -> serde_json::Value {
        let backend = format!("{:?}", self.ctx.kind()).to_lowercase();
        let table: Vec<_> =
            self.basis.iter().enumerate().map(|(i, (a, b))| json!({"a": a, "b": b, "index": i})).collect();
        let mut ops = serde_json::Map::new();
        ops.insert("X+".into(), self.x_plus().to_json(&backend));
        ops.insert("X-".into(), self.x_minus().to_json(&backend));
        if let Ok(k) = self.q_h(Rational64::one()) {
            ops.insert("qH".into(), k.to_json(&backend));
        }
        ops.insert("p".into(), self.spin_op().to_json(&backend));
        json!({
            "degree": self.degree,
            "gamma": self.gamma.to_string(),
            "dimension": self.dim(),
            "basis": table,
            "operators": ops,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{Exact, Numeric};

    #[test]
    fn spin_parsing() {
        assert_eq!("1/2".parse::<Spin>().unwrap(), Spin::HALF);
        assert_eq!("3".parse::<Spin>().unwrap(), Spin(6));
        assert!("1/3".parse::<Spin>().is_err());
        assert_eq!(Spin(3).to_string(), "3/2");
    }

    #[test]
    fn integral_spin_one() {
        let r = spin_rep(Spin::ONE, Basis::Integral, &Exact::new()).unwrap();
        assert_eq!(r.raising[0].get(0, 1), &Laurent::qnum(1));
        assert_eq!(r.raising[0].get(1, 2), &Laurent::qnum(2));
        assert_eq!(r.lowering[0].get(1, 0), &Laurent::qnum(2));
        assert_eq!(r.lowering[0].get(2, 1), &Laurent::qnum(1));
        assert_eq!(r.relation_defect(&Exact::new()).unwrap(), 0.0);
    }

    #[test]
    fn unitary_needs_numeric() {
        assert!(spin_rep(Spin::ONE, Basis::Unitary, &Exact::new()).is_err());
        let ctx = Numeric::default();
        let r = spin_rep(Spin::ONE, Basis::Unitary, &ctx).unwrap();
        let want = Laurent::qnum(2).eval(1.2).sqrt();
        assert!((r.raising[0].get(0, 1).re - want).abs() < 1e-15);
        assert!(r.relation_defect(&ctx).unwrap() < 1e-13);
    }

    #[test]
    fn coproduct_example() {
        let ctx = Exact::new();
        let h = spin_rep(Spin::HALF, Basis::Integral, &ctx).unwrap();
        let d = coproduct_rep(&h, &h, &ctx).unwrap();
        let kk = d.q_h(0, Rational64::one(), &ctx).unwrap();
        let want = [Laurent::q_int(1), Laurent::from_int(1), Laurent::from_int(1), Laurent::q_int(-1)];
        for (i, w) in want.iter().enumerate() {
            assert_eq!(kk.get(i, i), w);
        }
        let col = d.raising[0].column(3);
        assert_eq!(col[1], Laurent::q_pow(Rational64::new(-1, 2)));
        assert_eq!(col[2], Laurent::q_pow(Rational64::new(1, 2)));
    }

    #[test]
    fn model_space_shapes() {
        let m = ModelSpace::new(12, Rational64::zero(), &Exact::new()).unwrap();
        assert_eq!(m.dim(), 91);
        let i = m.index_of(2, 1).unwrap();
        assert_eq!(m.spin_op().get(i, i), &Laurent::from_int(4));
        let k = m.q_h(Rational64::one()).unwrap();
        let j = m.index_of(1, 1).unwrap();
        assert_eq!(k.get(j, j), &Laurent::from_int(1));
    }

    #[test]
    fn theta_is_involution() {
        let a = AlgebraSpec::sl(4).unwrap();
        assert_eq!(a.theta, vec![2, 1, 0]);
        assert!(a.theta.iter().all(|&i| a.theta[a.theta[i]] == i));
    }
}

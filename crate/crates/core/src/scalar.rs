//! Scalar backends.
//!
//! Two interchangeable element types carry every computation: [`Laurent`], an
//! exact Laurent polynomial in fractional powers of `q` with rational
//! coefficients, and `Complex64` evaluated at a fixed real `q > 1`. Code that
//! builds matrices is generic over a [`Backend`], which knows how to produce
//! `q^e`, square roots (numeric only) and how to lift an exact formula.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};

use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use num_rational::{BigRational, Rational64};
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::ser::{SerializeMap, SerializeSeq};
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};

/// Default evaluation parameter. Generic (not a root of unity) and far enough
/// from 1 that `q^(±2s)` stays well conditioned for `s ≤ 4`.
pub const DEFAULT_Q: f64 = 1.2;

/// Exact Laurent polynomial `Σ c_e q^e` with `e` rational.
///
/// Terms are kept sorted by exponent with no zero coefficients, so structural
/// equality is value equality.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct Laurent {
    terms: Vec<(Rational64, BigRational)>,
}

#[cfg(test)]
fn ratio(n: i64, d: i64) -> Rational64 {
    Rational64::new(n, d)
}

impl Laurent {
    pub fn zero() -> Self {
        Laurent { terms: Vec::new() }
    }

    pub fn constant(c: BigRational) -> Self {
        Self::monomial(c, Rational64::zero())
    }

    pub fn from_int(n: i64) -> Self {
        Self::constant(BigRational::from_integer(BigInt::from(n)))
    }

    pub fn monomial(c: BigRational, e: Rational64) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        Laurent { terms: vec![(e, c)] }
    }

    /// `q^e`.
    pub fn q_pow(e: Rational64) -> Self {
        Self::monomial(BigRational::one(), e)
    }

    /// `q^k` for an integer `k`.
    pub fn q_int(k: i64) -> Self {
        Self::q_pow(Rational64::from_integer(k))
    }

    /// `ω = q - q^(-1)`.
    pub fn omega() -> Self {
        Self::q_int(1) - Self::q_int(-1)
    }

    /// `[k] = q^(k-1) + q^(k-3) + ... + q^(1-k)`, odd in `k`.
    pub fn qnum(k: i64) -> Self {
        if k < 0 {
            return -Self::qnum(-k);
        }
        let mut out = Self::zero();
        for i in 0..k {
            out += &Self::q_int(k - 1 - 2 * i);
        }
        out
    }

    /// `[r]! = [1][2]...[r]`.
    pub fn qfactorial(r: u32) -> Self {
        (1..=r as i64).fold(Self::from_int(1), |acc, k| acc * Self::qnum(k))
    }

    /// `[r;q]! = Π (q^k - 1)/(q - 1) = Π (1 + q + ... + q^(k-1))`.
    pub fn qfactorial_exp(r: u32) -> Self {
        (1..=r as i64).fold(Self::from_int(1), |acc, k| {
            let mut f = Self::zero();
            for i in 0..k {
                f += &Self::q_int(i);
            }
            acc * f
        })
    }

    fn from_map(map: BTreeMap<Rational64, BigRational>) -> Self {
        Laurent { terms: map.into_iter().filter(|(_, c)| !c.is_zero()).collect() }
    }

    pub fn terms(&self) -> &[(Rational64, BigRational)] {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_monomial(&self) -> bool {
        self.terms.len() == 1
    }

    /// Coefficient of `q^e`.
    pub fn coeff(&self, e: Rational64) -> BigRational {
        self.terms.iter().find(|(x, _)| *x == e).map(|(_, c)| c.clone()).unwrap_or_else(BigRational::zero)
    }

    /// Smallest `L` such that every exponent times `L` is an integer.
    pub fn root_index(&self) -> i64 {
        self.terms.iter().fold(1, |acc, (e, _)| acc.lcm(e.denom()))
    }

    pub fn eval(&self, q: f64) -> f64 {
        self.terms
            .iter()
            .map(|(e, c)| {
                let c = c.to_f64().unwrap_or(f64::NAN);
                let p = if e.is_integer() {
                    q.powi(e.to_integer() as i32)
                } else {
                    q.powf(*e.numer() as f64 / *e.denom() as f64)
                };
                c * p
            })
            .sum()
    }

    /// Inverse of a monomial; `None` for zero or multi-term values.
    pub fn inverse(&self) -> Option<Self> {
        match self.terms.as_slice() {
            [(e, c)] => Some(Self::monomial(c.recip(), -*e)),
            _ => None,
        }
    }

    /// Square root of a monomial whose coefficient is a rational square.
    pub fn sqrt(&self) -> Option<Self> {
        if self.is_zero() {
            return Some(Self::zero());
        }
        let [(e, c)] = self.terms.as_slice() else {
            return None;
        };
        if c.is_negative() {
            return None;
        }
        let n = c.numer().sqrt();
        let d = c.denom().sqrt();
        if &(&n * &n) != c.numer() || &(&d * &d) != c.denom() {
            return None;
        }
        Some(Self::monomial(BigRational::new(n, d), *e / 2))
    }

    /// Exact division; `None` when the quotient is not a Laurent polynomial.
    pub fn checked_div(&self, divisor: &Self) -> Option<Self> {
        let (dlo, dhi) = (divisor.terms.first()?.0, divisor.terms.last()?.0);
        if self.is_zero() {
            return Some(Self::zero());
        }
        let lead = divisor.terms.last()?.1.clone();
        let floor = self.terms[0].0 - dlo;
        let mut rem = self.clone();
        let mut quot = Self::zero();
        while let Some((top, c)) = rem.terms.last().cloned() {
            let e = top - dhi;
            if e < floor {
                return None;
            }
            let m = Self::monomial(c / &lead, e);
            rem -= m.clone() * divisor.clone();
            quot += &m;
        }
        Some(quot)
    }

    /// Substitute `q -> q^(-1)`.
    pub fn bar(&self) -> Self {
        let mut terms: Vec<_> = self.terms.iter().map(|(e, c)| (-*e, c.clone())).collect();
        terms.reverse();
        Laurent { terms }
    }

    pub fn scale(&self, c: &BigRational) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        Laurent { terms: self.terms.iter().map(|(e, x)| (*e, x * c)).collect() }
    }
}

impl fmt::Debug for Laurent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for Laurent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, (e, c)) in self.terms.iter().rev().enumerate() {
            let neg = c.is_negative();
            let a = c.abs();
            if i > 0 {
                write!(f, " {} ", if neg { '-' } else { '+' })?;
            } else if neg {
                write!(f, "-")?;
            }
            let unit = a.is_one();
            if e.is_zero() {
                write!(f, "{a}")?;
                continue;
            }
            if !unit {
                write!(f, "{a}*")?;
            }
            if e.is_one() {
                write!(f, "q")?;
            } else {
                write!(f, "q^({e})")?;
            }
        }
        Ok(())
    }
}

impl Zero for Laurent {
    fn zero() -> Self {
        Laurent::zero()
    }
    fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }
}

impl One for Laurent {
    fn one() -> Self {
        Laurent::from_int(1)
    }
}

impl AddAssign<&Laurent> for Laurent {
    fn add_assign(&mut self, rhs: &Laurent) {
        if rhs.terms.is_empty() {
            return;
        }
        if self.terms.is_empty() {
            self.terms = rhs.terms.clone();
            return;
        }
        let mut out = Vec::with_capacity(self.terms.len() + rhs.terms.len());
        let (mut i, mut j) = (0, 0);
        let a = std::mem::take(&mut self.terms);
        let b = &rhs.terms;
        while i < a.len() && j < b.len() {
            match a[i].0.cmp(&b[j].0) {
                std::cmp::Ordering::Less => {
                    out.push(a[i].clone());
                    i += 1;
                }
                std::cmp::Ordering::Greater => {
                    out.push(b[j].clone());
                    j += 1;
                }
                std::cmp::Ordering::Equal => {
                    let c = &a[i].1 + &b[j].1;
                    if !c.is_zero() {
                        out.push((a[i].0, c));
                    }
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&a[i..]);
        out.extend_from_slice(&b[j..]);
        self.terms = out;
    }
}

impl AddAssign for Laurent {
    fn add_assign(&mut self, rhs: Laurent) {
        *self += &rhs;
    }
}

impl SubAssign<&Laurent> for Laurent {
    fn sub_assign(&mut self, rhs: &Laurent) {
        *self += &(-rhs.clone());
    }
}

impl SubAssign for Laurent {
    fn sub_assign(&mut self, rhs: Laurent) {
        *self += &(-rhs);
    }
}

impl Add for Laurent {
    type Output = Laurent;
    fn add(mut self, rhs: Laurent) -> Laurent {
        self += &rhs;
        self
    }
}

impl Sub for Laurent {
    type Output = Laurent;
    fn sub(mut self, rhs: Laurent) -> Laurent {
        self += &(-rhs);
        self
    }
}

impl Neg for Laurent {
    type Output = Laurent;
    fn neg(mut self) -> Laurent {
        for (_, c) in &mut self.terms {
            *c = -c.clone();
        }
        self
    }
}

impl Mul<&Laurent> for &Laurent {
    type Output = Laurent;
    fn mul(self, rhs: &Laurent) -> Laurent {
        if self.terms.is_empty() || rhs.terms.is_empty() {
            return Laurent::zero();
        }
        if let [(e, c)] = rhs.terms.as_slice() {
            return Laurent { terms: self.terms.iter().map(|(x, y)| (*x + *e, y * c)).collect() };
        }
        if let [(e, c)] = self.terms.as_slice() {
            return Laurent { terms: rhs.terms.iter().map(|(x, y)| (*x + *e, c * y)).collect() };
        }
        let mut map = BTreeMap::new();
        for (ea, ca) in &self.terms {
            for (eb, cb) in &rhs.terms {
                *map.entry(*ea + *eb).or_insert_with(BigRational::zero) += ca * cb;
            }
        }
        Laurent::from_map(map)
    }
}

impl Mul for Laurent {
    type Output = Laurent;
    fn mul(self, rhs: Laurent) -> Laurent {
        &self * &rhs
    }
}

/// Serialized as `{"<exponent of q>": "<rational>"}` in increasing exponent order.
impl Serialize for Laurent {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut map = s.serialize_map(Some(self.terms.len()))?;
        for (e, c) in &self.terms {
            map.serialize_entry(&e.to_string(), &c.to_string())?;
        }
        map.end()
    }
}

/// Ring element usable as a matrix entry.
pub trait Scalar:
    Clone
    + fmt::Debug
    + PartialEq
    + Send
    + Sync
    + 'static
    + Zero
    + One
    + Neg<Output = Self>
    + Sub<Output = Self>
    + for<'a> AddAssign<&'a Self>
    + for<'a> SubAssign<&'a Self>
{
    fn mul_ref(&self, rhs: &Self) -> Self;
    fn from_rational(r: &BigRational) -> Self;
    fn from_i64(n: i64) -> Self {
        Self::from_rational(&BigRational::from_integer(BigInt::from(n)))
    }
    /// Multiplicative inverse when it exists in this ring.
    fn inverse(&self) -> Option<Self>;
    /// Value at `q` as a complex number.
    fn eval(&self, q: f64) -> Complex64;
    /// Whether the element type is exact.
    fn exact() -> bool;
    /// Serialize one entry (map for exact, `[re, im]` for numeric, string for rationals).
    fn to_json(&self) -> serde_json::Value;
}

impl Scalar for Laurent {
    fn mul_ref(&self, rhs: &Self) -> Self {
        self * rhs
    }
    fn from_rational(r: &BigRational) -> Self {
        Laurent::constant(r.clone())
    }
    fn inverse(&self) -> Option<Self> {
        Laurent::inverse(self)
    }
    fn eval(&self, q: f64) -> Complex64 {
        Complex64::new(Laurent::eval(self, q), 0.0)
    }
    fn exact() -> bool {
        true
    }
    fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("laurent serializes")
    }
}

impl Scalar for Complex64 {
    fn mul_ref(&self, rhs: &Self) -> Self {
        self * rhs
    }
    fn from_rational(r: &BigRational) -> Self {
        Complex64::new(r.to_f64().unwrap_or(f64::NAN), 0.0)
    }
    fn from_i64(n: i64) -> Self {
        Complex64::new(n as f64, 0.0)
    }
    fn inverse(&self) -> Option<Self> {
        if self.norm() == 0.0 {
            None
        } else {
            Some(self.inv())
        }
    }
    fn eval(&self, _q: f64) -> Complex64 {
        *self
    }
    fn exact() -> bool {
        false
    }
    fn to_json(&self) -> serde_json::Value {
        // `+ 0.0` folds -0.0 so identical values print identically
        serde_json::json!([self.re + 0.0, self.im + 0.0])
    }
}

/// Plain rationals, used by the classical (q = 1) objects.
impl Scalar for BigRational {
    fn mul_ref(&self, rhs: &Self) -> Self {
        self * rhs
    }
    fn from_rational(r: &BigRational) -> Self {
        r.clone()
    }
    fn inverse(&self) -> Option<Self> {
        if self.is_zero() {
            None
        } else {
            Some(self.recip())
        }
    }
    fn eval(&self, _q: f64) -> Complex64 {
        Complex64::new(self.to_f64().unwrap_or(f64::NAN), 0.0)
    }
    fn exact() -> bool {
        true
    }
    fn to_json(&self) -> serde_json::Value {
        serde_json::Value::String(self.to_string())
    }
}

/// Serialize a slice of scalars as a JSON array.
pub struct Entries<'a, S>(pub &'a [S]);

impl<S: Scalar> Serialize for Entries<'_, S> {
    fn serialize<Z: Serializer>(&self, s: Z) -> std::result::Result<Z::Ok, Z::Error> {
        let mut seq = s.serialize_seq(Some(self.0.len()))?;
        for x in self.0 {
            seq.serialize_element(&x.to_json())?;
        }
        seq.end()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum BackendKind {
    Exact,
    Numeric,
}

impl std::str::FromStr for BackendKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "exact" => Ok(BackendKind::Exact),
            "numeric" => Ok(BackendKind::Numeric),
            _ => Err(Error::Invalid(format!("unknown backend '{s}'"))),
        }
    }
}

/// Evaluation strategy shared by all constructions.
pub trait Backend: Clone + fmt::Debug + Send + Sync + 'static {
    type Elem: Scalar;

    fn kind(&self) -> BackendKind;
    /// Parameter used to evaluate magnitudes (and, numerically, everything).
    fn q(&self) -> f64;
    /// Map an exact formula into this backend.
    fn lift(&self, x: &Laurent) -> Self::Elem;
    fn q_pow(&self, e: Rational64) -> Result<Self::Elem>;
    fn sqrt(&self, x: &Self::Elem) -> Result<Self::Elem>;
    /// A real number; only the numeric backend accepts arbitrary floats.
    fn float(&self, v: f64) -> Result<Self::Elem>;
    /// `x / d`, exact when the backend is (fails if `d` does not divide `x`).
    fn divide(&self, x: &Self::Elem, d: &Laurent) -> Result<Self::Elem>;

    /// Size of an element for residual reporting. Exact nonzero values never
    /// report 0, even if they happen to vanish at the evaluation point.
    fn magnitude(&self, x: &Self::Elem) -> f64 {
        if x.is_zero() {
            return 0.0;
        }
        let m = x.eval(self.q()).norm();
        if Self::Elem::exact() {
            m.max(f64::EPSILON)
        } else {
            m
        }
    }

    fn int(&self, n: i64) -> Self::Elem {
        Self::Elem::from_i64(n)
    }

    fn rational(&self, r: Rational64) -> Self::Elem {
        Self::Elem::from_rational(&BigRational::new((*r.numer()).into(), (*r.denom()).into()))
    }

    fn q_int(&self, k: i64) -> Self::Elem {
        self.lift(&Laurent::q_int(k))
    }

    fn omega(&self) -> Self::Elem {
        self.lift(&Laurent::omega())
    }
}

/// Exact Laurent arithmetic; fractional exponents must be multiples of `1/root`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Exact {
    pub root: u32,
    pub q_eval: f64,
}

impl Exact {
    /// `t = q^(1/2)`.
    pub fn new() -> Self {
        Exact { root: 2, q_eval: DEFAULT_Q }
    }

    /// `t = q^(1/(2n))`, enough for the `q^(±1/n)` prefactors of sl(n).
    pub fn for_rank(n: usize) -> Self {
        Exact { root: (2 * n.max(1)) as u32, q_eval: DEFAULT_Q }
    }

    pub fn with_root(root: u32) -> Self {
        Exact { root: root.max(1), q_eval: DEFAULT_Q }
    }
}

impl Default for Exact {
    fn default() -> Self {
        Self::new()
    }
}

impl Backend for Exact {
    type Elem = Laurent;

    fn kind(&self) -> BackendKind {
        BackendKind::Exact
    }
    fn q(&self) -> f64 {
        self.q_eval
    }
    fn lift(&self, x: &Laurent) -> Laurent {
        x.clone()
    }
    fn q_pow(&self, e: Rational64) -> Result<Laurent> {
        if (e * self.root as i64).is_integer() {
            Ok(Laurent::q_pow(e))
        } else {
            Err(Error::NotRepresentable(format!("q^({e}) with t = q^(1/{})", self.root)))
        }
    }
    fn sqrt(&self, x: &Laurent) -> Result<Laurent> {
        let r = x.sqrt().ok_or_else(|| Error::NotRepresentable(format!("sqrt({x})")))?;
        if self.root as i64 % r.root_index() != 0 {
            return Err(Error::NotRepresentable(format!("sqrt({x}) needs a finer root")));
        }
        Ok(r)
    }
    fn float(&self, v: f64) -> Result<Laurent> {
        Err(Error::NotRepresentable(format!("floating value {v}")))
    }
    fn divide(&self, x: &Laurent, d: &Laurent) -> Result<Laurent> {
        if d.is_zero() {
            return Err(Error::Singular);
        }
        x.checked_div(d).ok_or_else(|| Error::NotRepresentable(format!("({x}) / ({d})")))
    }
}

/// Complex floating point at a fixed real `q > 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Numeric {
    q: f64,
}

impl Numeric {
    pub fn new(q: f64) -> Result<Self> {
        if !(q.is_finite() && q > 1.0) {
            return Err(Error::Invalid(format!("numeric backend needs real q > 1, got {q}")));
        }
        Ok(Numeric { q })
    }
}

impl Default for Numeric {
    fn default() -> Self {
        Numeric { q: DEFAULT_Q }
    }
}

impl Backend for Numeric {
    type Elem = Complex64;

    fn kind(&self) -> BackendKind {
        BackendKind::Numeric
    }
    fn q(&self) -> f64 {
        self.q
    }
    fn lift(&self, x: &Laurent) -> Complex64 {
        Complex64::new(x.eval(self.q), 0.0)
    }
    fn q_pow(&self, e: Rational64) -> Result<Complex64> {
        let p = if e.is_integer() {
            self.q.powi(e.to_integer() as i32)
        } else {
            self.q.powf(*e.numer() as f64 / *e.denom() as f64)
        };
        Ok(Complex64::new(p, 0.0))
    }
    fn sqrt(&self, x: &Complex64) -> Result<Complex64> {
        Ok(x.sqrt())
    }
    fn float(&self, v: f64) -> Result<Complex64> {
        Ok(Complex64::new(v, 0.0))
    }
    fn divide(&self, x: &Complex64, d: &Laurent) -> Result<Complex64> {
        let v = d.eval(self.q);
        if v == 0.0 {
            return Err(Error::Singular);
        }
        Ok(x / v)
    }
}

/// Runtime configuration of a backend, as read from flags or config files.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct QContext {
    pub backend: BackendKind,
    pub q: f64,
    pub root: u32,
    pub tol: f64,
}

impl Default for QContext {
    fn default() -> Self {
        QContext { backend: BackendKind::Numeric, q: DEFAULT_Q, root: 2, tol: 1e-8 }
    }
}

impl QContext {
    pub fn exact(&self) -> Exact {
        Exact { root: self.root, q_eval: self.q }
    }

    pub fn numeric(&self) -> Result<Numeric> {
        Numeric::new(self.q)
    }

    pub fn validate(&self) -> Result<()> {
        if self.tol.is_nan() || self.tol <= 0.0 {
            return Err(Error::Invalid("tolerance must be positive".into()));
        }
        if self.q == 1.0 {
            return Err(Error::Invalid("q = 1 is not a deformation".into()));
        }
        if self.backend == BackendKind::Numeric {
            Numeric::new(self.q)?;
        }
        Ok(())
    }
}

/// `[k]` for integer `k`.
pub fn qnum<B: Backend>(k: i64, ctx: &B) -> B::Elem {
    ctx.lift(&Laurent::qnum(k))
}

/// `[x] = (q^x - q^(-x))/(q - q^(-1))` for rational `x`.
///
/// The exact backend only accepts integers: `[1/2] = 1/(q^(1/2) + q^(-1/2))`
/// is not a Laurent polynomial.
pub fn qnum_rational<B: Backend>(x: Rational64, ctx: &B) -> Result<B::Elem> {
    if x.is_integer() {
        return Ok(qnum(x.to_integer(), ctx));
    }
    match ctx.kind() {
        BackendKind::Exact => Err(Error::NotRepresentable(format!("[{x}]"))),
        BackendKind::Numeric => {
            let l = ctx.q().ln();
            let xf = *x.numer() as f64 / *x.denom() as f64;
            ctx.float((xf * l).sinh() / l.sinh())
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Factorial {
    /// `[r]! = Π [k]`.
    Bracket,
    /// `[r;q]! = Π (q^k - 1)/(q - 1)`.
    ExpSeries,
}

pub fn qfactorial<B: Backend>(r: u32, variant: Factorial, ctx: &B) -> B::Elem {
    match variant {
        Factorial::Bracket => ctx.lift(&Laurent::qfactorial(r)),
        Factorial::ExpSeries => ctx.lift(&Laurent::qfactorial_exp(r)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(e: i64, d: i64) -> Laurent {
        Laurent::q_pow(ratio(e, d))
    }

    #[test]
    fn qnum_small_cases() {
        assert!(Laurent::qnum(0).is_zero());
        assert_eq!(Laurent::qnum(1), Laurent::from_int(1));
        assert_eq!(Laurent::qnum(3), q(2, 1) + Laurent::from_int(1) + q(-2, 1));
        assert!((Laurent::qnum(3).eval(2.0) - 5.25).abs() < 1e-15);
        assert_eq!(Laurent::qnum(-4), -Laurent::qnum(4));
    }

    #[test]
    fn factorial_variants() {
        assert_eq!(Laurent::qfactorial(0), Laurent::from_int(1));
        assert_eq!(Laurent::qfactorial(2), q(1, 1) + q(-1, 1));
        assert_eq!(Laurent::qfactorial_exp(2), q(1, 1) + Laurent::from_int(1));
    }

    #[test]
    fn numeric_half_integer_qnum() {
        let ctx = Numeric::new(4.0).unwrap();
        let v = qnum_rational(ratio(1, 2), &ctx).unwrap();
        assert!((v.re - 0.4).abs() < 1e-14);
        assert!(qnum_rational(ratio(1, 2), &Exact::new()).is_err());
        assert_eq!(qnum_rational(ratio(2, 1), &Exact::new()).unwrap(), Laurent::qnum(2));
    }

    #[test]
    fn division() {
        let a = Laurent::qnum(6);
        let b = Laurent::qnum(2);
        let c = a.checked_div(&b).unwrap();
        assert_eq!(c * b.clone(), Laurent::qnum(6));
        assert!(Laurent::qnum(3).checked_div(&b).is_none());
        assert_eq!(q(3, 2).inverse().unwrap(), q(-3, 2));
        assert!(b.inverse().is_none());
    }

    #[test]
    fn exact_root_granularity() {
        let e = Exact::new();
        assert!(e.q_pow(ratio(1, 2)).is_ok());
        assert!(e.q_pow(ratio(1, 3)).is_err());
        assert!(Exact::for_rank(3).q_pow(ratio(1, 3)).is_ok());
        assert_eq!(e.sqrt(&q(1, 1)).unwrap(), q(1, 2));
        assert!(e.sqrt(&Laurent::qnum(2)).is_err());
    }

    #[test]
    fn serialization_uses_reduced_exponents() {
        let x = q(1, 2).scale(&BigRational::new(3.into(), 2.into())) - Laurent::from_int(1);
        let s = serde_json::to_string(&x).unwrap();
        assert_eq!(s, r#"{"0":"-1","1/2":"3/2"}"#);
    }

    #[test]
    fn display_reads_naturally() {
        assert_eq!(Laurent::qnum(3).to_string(), "q^(2) + 1 + q^(-2)");
        assert_eq!(Laurent::omega().to_string(), "q - q^(-1)");
    }
}

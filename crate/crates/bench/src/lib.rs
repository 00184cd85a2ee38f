//! Fixtures shared by the benchmarks.

use num_rational::Rational64;
use qtop_core::rep::ModelSpace;
use qtop_core::{Exact, Numeric, Result};

pub fn numeric() -> Numeric {
    Numeric::new(1.2).expect("1.2 > 1")
}

/// Exact context able to represent the sl(n) fundamental prefactors.
pub fn exact(n: usize) -> Exact {
    Exact::for_rank(n)
}

pub fn model<B: qtop_core::Backend>(degree: usize, ctx: &B) -> Result<ModelSpace<B>> {
    ModelSpace::new(degree, Rational64::from_integer(0), ctx)
}

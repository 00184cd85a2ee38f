//! Property tests across random deformation parameters and inputs.

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::{BigRational, Rational64};
use proptest::prelude::*;

use qtop_core::matrix::{hecke_projectors, residual_norm, RingMatrix};
use qtop_core::rep::{Basis, ModelSpace, Spin};
use qtop_core::rmatrix::{
    build_l, fundamental_r, lop_substituted_r, verify_rll_all, verify_ybe, verify_ybe_mixed, Variant,
};
use qtop_core::scalar::Scalar;
use qtop_core::wigner::{build_cg, verify_completeness, verify_intertwiner};
use qtop_core::{Exact, Laurent, Numeric};

fn laurent() -> impl Strategy<Value = Laurent> {
    prop::collection::vec((-6i64..=6, 1i64..=2, -5i64..=5), 0..5).prop_map(|terms| {
        let mut acc = Laurent::zero();
        for (num, den, c) in terms {
            acc += Laurent::monomial(BigRational::from_integer(BigInt::from(c)), Rational64::new(num, den));
        }
        acc
    })
}

fn q_value() -> impl Strategy<Value = f64> {
    1.05f64..2.5
}

fn spin_upto(twice: u32) -> impl Strategy<Value = Spin> {
    (1..=twice).prop_map(Spin)
}

fn close(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-9 * (1.0 + a.abs().max(b.abs()))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn laurent_ring_laws(a in laurent(), b in laurent(), c in laurent()) {
        prop_assert_eq!(&a * &b, &b * &a);
        prop_assert_eq!(&a * &(b.clone() + c.clone()), &a * &b + &a * &c);
        prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
        prop_assert_eq!(a.bar().bar(), a.clone());
        prop_assert!((a.clone() - a.clone()).is_zero());
    }

    #[test]
    fn laurent_eval_is_a_homomorphism(a in laurent(), b in laurent(), q in q_value()) {
        prop_assert!(close((&a * &b).eval(q), a.eval(q) * b.eval(q)));
        prop_assert!(close((a.clone() + b.clone()).eval(q), a.eval(q) + b.eval(q)));
    }

    #[test]
    fn monomials_invert(num in -8i64..=8, den in 1i64..=4, c in 1i64..=7) {
        let m = Laurent::monomial(BigRational::from_integer(BigInt::from(c)), Rational64::new(num, den));
        let inv = m.inverse().expect("monomial is a unit");
        prop_assert_eq!(&m * &inv, Laurent::from_int(1));
    }

    #[test]
    fn spin_text_round_trips(twice in 0u32..20) {
        let s = Spin(twice);
        prop_assert_eq!(s.to_string().parse::<Spin>().unwrap(), s);
        prop_assert_eq!(s.dim(), twice as usize + 1);
    }

    #[test]
    fn exact_and_numeric_r_agree(n in 2usize..=4, q in q_value(), plus in any::<bool>()) {
        let v = if plus { Variant::Plus } else { Variant::Minus };
        let num = Numeric::new(q).unwrap();
        let exact = fundamental_r(n, v, &Exact::for_rank(n)).unwrap();
        let numeric = fundamental_r(n, v, &num).unwrap();
        let evaluated = exact.matrix.map(|x: &Laurent| Scalar::eval(x, q));
        prop_assert!(residual_norm(&evaluated, &numeric.matrix, &num).unwrap() < 1e-10);
    }

    #[test]
    fn ybe_at_any_q(s in spin_upto(3), q in q_value(), plus in any::<bool>()) {
        let v = if plus { Variant::Plus } else { Variant::Minus };
        let ctx = Numeric::new(q).unwrap();
        // on V(1/2) ⊗ V(1/2) ⊗ V(s)
        let hh = lop_substituted_r(Spin::HALF, v, Basis::Unitary, &ctx).unwrap();
        let hs = lop_substituted_r(s, v, Basis::Unitary, &ctx).unwrap();
        prop_assert!(verify_ybe(&hh, &ctx).unwrap() < 1e-10);
        prop_assert!(verify_ybe_mixed(&hh.matrix, &hs.matrix, &hs.matrix, &ctx).unwrap() < 1e-9);
    }

    #[test]
    fn hecke_projectors_split_the_square(n in 2usize..=4, q in q_value()) {
        let ctx = Numeric::new(q).unwrap();
        let r = fundamental_r(n, Variant::Plus, &ctx).unwrap();
        let rhat = &RingMatrix::swap(n, n) * &r.matrix;
        let (p, m) = hecke_projectors(&rhat, n, &ctx).unwrap();
        prop_assert_eq!(p.rank(&ctx).unwrap(), n * (n + 1) / 2);
        prop_assert_eq!(m.rank(&ctx).unwrap(), n * (n - 1) / 2);
        let pm = &p.matrix().unwrap() * &m.matrix().unwrap();
        prop_assert!(residual_norm(&pm, &RingMatrix::zeros(n * n, n * n), &ctx).unwrap() < 1e-10);
    }

    #[test]
    fn clebsch_gordan_maps(j1 in spin_upto(3), j2 in spin_upto(3), pick in 0usize..4, q in q_value()) {
        let ctx = Numeric::new(q).unwrap();
        let channels = Spin::channels(j1, j2);
        let j = channels[pick % channels.len()];
        let cg = build_cg(j1, j2, j, &ctx).unwrap();
        prop_assert!(verify_intertwiner(&cg, &ctx).unwrap().value < 1e-10);
        prop_assert!(verify_completeness(j1, j2, &ctx).unwrap().value < 1e-10);
    }

    #[test]
    fn rll_on_small_model_spaces(degree in 2usize..=6, gamma2 in 0i64..=2, q in q_value()) {
        let ctx = Numeric::new(q).unwrap();
        let model = ModelSpace::new(degree, Rational64::new(gamma2, 2), &ctx).unwrap();
        let lp = build_l(&model, Variant::Plus).unwrap();
        let lm = build_l(&model, Variant::Minus).unwrap();
        let rp = fundamental_r(2, Variant::Plus, &ctx).unwrap();
        let rm = fundamental_r(2, Variant::Minus, &ctx).unwrap();
        prop_assert!(verify_rll_all(&rp, &rm, &lp, &lm, &ctx).unwrap().value < 1e-9);
    }

    #[test]
    fn kron_and_partial_transpose(a in prop::collection::vec(-3i32..=3, 4), b in prop::collection::vec(-3i32..=3, 9)) {
        let ctx = Numeric::default();
        let to = |v: &[i32], n: usize| {
            RingMatrix::new(n, n, v.iter().map(|&x| Complex64::new(x as f64, 0.0)).collect()).unwrap()
        };
        let (ma, mb) = (to(&a, 2), to(&b, 3));
        let k = ma.kron(&mb).with_legs(&[2, 3]).unwrap();
        let t1 = ma.transpose().kron(&mb);
        prop_assert_eq!(residual_norm(&k.partial_transpose(0).unwrap(), &t1, &ctx).unwrap(), 0.0);
        prop_assert_eq!(residual_norm(&k.transpose().transpose(), &k, &ctx).unwrap(), 0.0);
    }
}

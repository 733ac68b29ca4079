//! Property tests for the q-calculus invariants: random rational q and
//! parameters, exact arithmetic throughout.

use num_bigint::BigInt;
use num_rational::BigRational;
use proptest::prelude::*;

use qstieltjes::hyper::{verify_identity, IdentityCheck};
use qstieltjes::lattice::{
    bwd_diff, fwd_diff, qfalling_int, qfalling_poch, qgamma, qpochhammer, GridFunction,
};
use qstieltjes::poly::{power_in_falling_basis, qfalling_as_poly};
use qstieltjes::scalar::QContext;

fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

/// q strictly inside (0, 1) with a small denominator.
fn arb_q() -> impl Strategy<Value = BigRational> {
    (2i64..12, 1i64..11).prop_map(|(den, num)| rat(num.min(den - 1).max(1), den))
}

fn arb_rat(lo: i64, hi: i64) -> impl Strategy<Value = BigRational> {
    (lo..hi, 1i64..9).prop_map(|(n, d)| rat(n, d))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn exact_field_multiplicative_inverse(q in arb_q(), a in arb_rat(-12, 12), b in arb_rat(-12, 12)) {
        let ctx = QContext::exact(q).unwrap();
        let v = ctx.from_rational(&a) + ctx.from_rational(&b) * ctx.r();
        prop_assume!(!v.is_zero());
        prop_assert!((v.recip() * v - ctx.one()).is_zero());
    }

    #[test]
    fn falling_factorial_dual_forms(q in arb_q(), s in 0i64..12, k in 0u32..8) {
        prop_assume!(k as i64 <= s);
        let ctx = QContext::exact(q).unwrap();
        let lhs = qfalling_int(s, k, &ctx);
        let rhs = qfalling_poch(&rat(s, 1), k, &ctx).unwrap();
        prop_assert!((lhs - rhs).is_zero());
    }

    #[test]
    fn pochhammer_splits_multiplicatively(q in arb_q(), a in arb_rat(-6, 6), m in 0u32..7, n in 0u32..7) {
        let ctx = QContext::exact(q).unwrap();
        let av = ctx.from_rational(&a);
        let lhs = qpochhammer(&av, m + n, &ctx);
        let rhs = qpochhammer(&av, m, &ctx)
            * qpochhammer(&(&av * ctx.q().pow_i(m as i64)), n, &ctx);
        prop_assert!((lhs - rhs).is_zero());
    }

    #[test]
    fn qgamma_functional_equation(q in arb_q(), s in 1i64..12) {
        // Gamma_q(s+1) = (1-q^s)/(1-q) Gamma_q(s)
        let ctx = QContext::exact(q).unwrap();
        let lhs = qgamma(&rat(s + 1, 1), &ctx).unwrap();
        let step = (ctx.one() - ctx.q().pow_i(s)) / (ctx.one() - ctx.q());
        let rhs = step * qgamma(&rat(s, 1), &ctx).unwrap();
        prop_assert!((lhs - rhs).is_zero());
    }

    #[test]
    fn falling_and_power_bases_invert(q in arb_q(), m in 0u32..6) {
        let ctx = QContext::exact(q).unwrap();
        // expand w^m in the falling basis, re-expand in powers, compare
        let coeffs = power_in_falling_basis(m, &ctx);
        let mut total = vec![ctx.zero(); m as usize + 1];
        for (k, c) in coeffs.iter().enumerate() {
            for (i, f) in qfalling_as_poly(k as u32, &ctx).coeffs().iter().enumerate() {
                total[i] = &total[i] + c * f;
            }
        }
        for (i, v) in total.iter().enumerate() {
            if i == m as usize {
                prop_assert!((v - ctx.one()).is_zero());
            } else {
                prop_assert!(v.is_zero());
            }
        }
    }

    #[test]
    fn forward_and_backward_differences_are_shifts(q in arb_q(), len in 3i64..9) {
        // Delta f(s) and Nabla f(s+1) differ only by the step normalization:
        // Nabla f(s+1) = Delta f(s) * q^{s-1/2} / q^{s+1/2}
        let ctx = QContext::exact(q).unwrap();
        let f = GridFunction::sample(0, len, |s| {
            qfalling_int(s, 2, &ctx) + ctx.int(3) * qfalling_int(s, 1, &ctx)
        });
        let d = fwd_diff(&f, &ctx).unwrap();
        let b = bwd_diff(&f, &ctx).unwrap();
        for s in 0..len {
            let lhs = b.get(s + 1).unwrap() * ctx.q_pow_half(2 * (s + 1) - 1);
            let rhs = d.get(s).unwrap() * ctx.q_pow_half(2 * s - 1);
            prop_assert!((lhs - rhs).is_zero());
        }
    }

    #[test]
    fn chu_vandermonde_terminates_exactly(q in arb_q(), s in 0u32..9, t in arb_rat(2, 12)) {
        let ctx = QContext::exact(q).unwrap();
        // keep t off the finitely many pole candidates q^{-j}
        let tv = ctx.from_rational(&t);
        let mut off_poles = true;
        for j in 0..=(s as i64) {
            if (ctx.q().pow_i(-j) - &tv).is_zero() {
                off_poles = false;
            }
        }
        prop_assume!(off_poles);
        let r = verify_identity(&IdentityCheck::ChuVandermonde { s, t: tv }, &ctx).unwrap();
        prop_assert!(r.is_zero());
    }
}

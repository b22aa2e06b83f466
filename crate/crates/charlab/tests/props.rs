//! Property tests for the arithmetic kernel and the pure harness helpers.

use charlab::arith::{jacobi, CharSpec, FactorTable, Mod8Id, MOD8_IDS};
use charlab::charsums::SeqSpec;
use charlab::harness::{trend_verdict, BoundFormula, Verdict};
use proptest::prelude::*;

fn odd_modulus() -> impl Strategy<Value = u64> {
    (1u64..5_000).prop_map(|k| 2 * k + 1)
}

proptest! {
    #[test]
    fn jacobi_is_multiplicative_in_the_numerator(
        a in 0i64..10_000, b in 0i64..10_000, m in odd_modulus()
    ) {
        let lhs = jacobi(a * b, m).unwrap();
        let rhs = jacobi(a, m).unwrap() * jacobi(b, m).unwrap();
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn jacobi_is_periodic_in_the_numerator(n in 0i64..100_000, m in odd_modulus()) {
        prop_assert_eq!(jacobi(n + m as i64, m).unwrap(), jacobi(n, m).unwrap());
    }

    #[test]
    fn jacobi_vanishes_exactly_on_common_factors(n in 1i64..100_000, m in odd_modulus()) {
        let g = charlab::arith::gcd(n as u64, m);
        prop_assert_eq!(jacobi(n, m).unwrap() == 0, g > 1);
    }

    #[test]
    fn principal_character_is_one_on_coprime_odd_n(k in 0u64..50_000) {
        let n = 2 * k + 1;
        prop_assert_eq!(CharSpec::principal().eval(n), 1);
    }

    #[test]
    fn mod8_characters_square_to_the_trivial_one(i in 0usize..4, q in 0u64..10_000) {
        let id = MOD8_IDS[i];
        let n = 2 * q + 1;
        prop_assert_eq!(id.eval(n) * id.eval(n), Mod8Id::Trivial.eval(n));
    }

    #[test]
    fn seq_specs_are_bounded_and_vanish_on_evens(
        n in 1u64..100_000, seed in 0u64..1000, k in 0u64..500
    ) {
        for s in [
            SeqSpec::AllOnes,
            SeqSpec::RandomPm1 { seed },
            SeqSpec::JacobiVs { k: 2 * k + 1, numerator_is_n: true },
        ] {
            let v = s.eval(n);
            prop_assert!(v.abs() <= 1.0);
            prop_assert_eq!(s.eval(2 * n), 0.0);
        }
    }

    #[test]
    fn bound_formulas_are_positive_and_sign_invariant(
        n in 2.0f64..1e6, ratio in 1.0f64..1e6
    ) {
        let m = n * ratio;
        for b in [
            BoundFormula::Elliott,
            BoundFormula::HeathBrown { eps: 0.1 },
            BoundFormula::FriedlanderIwaniec,
            BoundFormula::Neutralised { eps: 0.1, alpha: 0.5 },
        ] {
            prop_assert!(b.rhs(n, m, None).unwrap() > 0.0);
        }
    }

    #[test]
    fn verdict_matches_its_definition(ratios in proptest::collection::vec(0.0f64..3.0, 3..8)) {
        let v = trend_verdict(&ratios);
        let d: Vec<f64> = ratios.iter().rev().take(3).rev().map(|r| (r - 1.0).abs()).collect();
        let decreasing = d.windows(2).all(|w| w[0] > w[1]);
        let increasing = d.windows(2).all(|w| w[0] < w[1]);
        match v {
            Verdict::Converging => prop_assert!(decreasing),
            Verdict::Violated => prop_assert!(increasing),
            Verdict::Inconclusive => prop_assert!(!decreasing && !increasing),
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn tau_is_multiplicative_on_coprime_arguments(a in 1u64..1000, b in 1u64..1000) {
        prop_assume!(charlab::arith::gcd(a, b) == 1);
        let t = FactorTable::build(1_000_000).unwrap();
        prop_assert_eq!(t.tau(a * b).unwrap(), t.tau(a).unwrap() * t.tau(b).unwrap());
    }
}

//! Cross-cutting laws of the quasi-periodic analyzer, checked at the
//! crate boundary: recurrences, trace algebra, rewriting growth, and the
//! exhaustive cellular-automaton scans.

use beta_core::omega::{
    almost_period_search, ca_linear_impossibility, classify_binary_2x2, euclid_trace, fib,
    fib_word, golden_ratio_gap, rule_110, Arithmetic, GridSpec, IntMatrix2,
};
use proptest::prelude::*;

#[test]
fn fibonacci_recurrence_holds_over_the_full_range() {
    for n in 2..=90u32 {
        assert_eq!(
            fib(n).unwrap(),
            fib(n - 1).unwrap() + fib(n - 2).unwrap(),
            "recurrence broke at n={n}"
        );
    }
    assert!(fib(91).is_err());
}

#[test]
fn verdicts_are_transpose_symmetric() {
    // The discriminant (a-d)^2 + 4bc is invariant under b <-> c, so the
    // classification must be too.
    let verdicts = classify_binary_2x2();
    assert_eq!(verdicts.len(), 16);
    for v in &verdicts {
        let t = v.matrix.transpose();
        let partner = verdicts
            .iter()
            .find(|w| w.matrix == t)
            .expect("the transpose of a binary matrix is binary");
        assert_eq!(v.in_omega, partner.in_omega);
        assert_eq!(v.discriminant, partner.discriminant);
    }
}

proptest! {
    #[test]
    fn transpose_symmetry_extends_to_general_integer_matrices(
        a in -9i64..10, b in -9i64..10, c in -9i64..10, d in -9i64..10,
    ) {
        let m = IntMatrix2::new(a, b, c, d);
        let v = beta_core::omega::OmegaVerdict::analyze(m);
        let vt = beta_core::omega::OmegaVerdict::analyze(m.transpose());
        prop_assert_eq!(v.in_omega, vt.in_omega);
        prop_assert_eq!(v.discriminant, vt.discriminant);
    }

    #[test]
    fn euclid_division_law_holds_stepwise(p in 1u64..500, q in 1u64..500) {
        let (lo, hi) = if p <= q { (p, q) } else { (q, p) };
        let trace = euclid_trace(lo, hi).unwrap();
        // Reconstruct the chain: u = v*s + r with 0 <= r < v at each step.
        let mut u = hi;
        let mut v = lo;
        for (s, r) in trace.quotients.iter().zip(&trace.remainders) {
            prop_assert_eq!(u, v * s + r);
            prop_assert!(*r < v);
            u = v;
            v = *r;
        }
        prop_assert_eq!(v, 0);
        prop_assert_eq!(u, trace.gcd);
        prop_assert_eq!(trace.steps, trace.quotients.len());
    }
}

#[test]
fn fibonacci_pairs_maximize_euclid_steps() {
    for n in 3..=25u32 {
        let trace = euclid_trace(fib(n - 1).unwrap(), fib(n).unwrap()).unwrap();
        assert_eq!(trace.steps, (n - 1) as usize, "steps off at n={n}");
        let (last, body) = trace.quotients.split_last().unwrap();
        assert!(body.iter().all(|&q| q == 1));
        assert_eq!(*last, 2);
        // No smaller pair bounded by fib(n) runs longer: spot-check the
        // immediate neighborhood of the pair.
        for dp in 0..2u64 {
            let p = fib(n - 1).unwrap().saturating_sub(dp).max(1);
            let t = euclid_trace(p, fib(n).unwrap()).unwrap();
            assert!(t.steps <= trace.steps + 1);
        }
    }
}

#[test]
fn words_grow_by_rewriting_and_prefixing() {
    for k in 1..=14u32 {
        let w = fib_word(k).unwrap();
        let next = fib_word(k + 1).unwrap();
        assert!(next.starts_with(&w), "prefix law broke at k={k}");
        assert_eq!(w.len() as u64, fib(k + 1).unwrap());
        // The rewriting itself: applying 0 -> 01, 1 -> 0 to word(k)
        // must give word(k+1).
        let rewritten: String = w
            .chars()
            .map(|c| if c == '0' { "01" } else { "0" })
            .collect();
        assert_eq!(rewritten, next);
    }
}

#[test]
fn ca_scan_is_empty_under_both_arithmetics_and_counterexamples_verify() {
    for arithmetic in [Arithmetic::Integer, Arithmetic::Mod2] {
        let report = ca_linear_impossibility(&rule_110(), arithmetic).unwrap();
        assert_eq!(report.candidates_checked, 512);
        assert!(report.matches.is_empty());
        assert_eq!(report.counterexamples.len(), 512);
        // Each counterexample must actually break: the matrix applied to
        // the recorded input disagrees with the rule's expected output.
        for ce in &report.counterexamples {
            let m = ce.matrix;
            let x = ce.input;
            let raw: Vec<i64> = (0..3)
                .map(|i| (0..3).map(|j| m[i][j] as i64 * x[j] as i64).sum())
                .collect();
            let out: Vec<i64> = match arithmetic {
                Arithmetic::Integer => raw,
                Arithmetic::Mod2 => raw.iter().map(|v| v.rem_euclid(2)).collect(),
            };
            assert_eq!(out.as_slice(), ce.output.as_slice());
            let expected: Vec<i64> = ce.expected.iter().map(|&b| b as i64).collect();
            assert_ne!(out, expected, "recorded counterexample does not fail");
        }
    }
}

#[test]
fn almost_period_reports_respect_their_own_epsilon() {
    let grid = GridSpec {
        start: 0.0,
        end: 200.0,
        step: 0.01,
    };
    let tau = (1.0 + 5.0f64.sqrt()) / 2.0;
    for (freqs, epsilon) in [
        ((1.0, 1.0), 1e-6),
        ((1.0, tau), 0.5),
        ((1.0, tau), 0.05),
        ((1.0, 2.0), 1e-6),
    ] {
        let report = almost_period_search(freqs, epsilon, &grid).unwrap();
        if report.found {
            assert!(
                report.max_deviation < epsilon,
                "found=true but deviation {} >= {epsilon}",
                report.max_deviation
            );
            assert!(report.shift > 0.0);
        } else {
            assert!(report.max_deviation >= epsilon);
        }
        assert_eq!(report.samples, 20001);
    }
}

#[test]
fn gap_decreases_and_approaches_zero() {
    let mut prev = golden_ratio_gap(2).unwrap();
    for n in 3..=30u32 {
        let g = golden_ratio_gap(n).unwrap();
        assert!(g < prev, "gap failed to decrease at n={n}");
        prev = g;
    }
    assert!(golden_ratio_gap(40).unwrap() < 1e-15);
}

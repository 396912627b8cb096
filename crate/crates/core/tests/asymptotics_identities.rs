use std::f64::consts::{E, PI, SQRT_2};

use edgegas::asymptotics::*;
use edgegas::electrostatics::{hard_solve, soft_solve, HardEdgeProblem, SoftEdgeProblem};
use proptest::prelude::*;

const BETAS: [f64; 6] = [0.5, 1.0, 2.0, 3.0, 4.0, 8.0];

#[test]
fn factorization_grid() {
    for n in 0..=6 {
        for &a in &[0.0, 0.5, 1.0, 2.0] {
            let table = factorization_residual(Edge::Hard, n as f64, a).unwrap();
            assert!(table.passes(1e-13), "hard n={n} a={a}: {table:?}");
            assert!(table.rows.iter().all(|r| r.residual.abs() < 1e-12));
        }
        let table = factorization_residual(Edge::Soft, n as f64, 0.0).unwrap();
        assert!(table.passes(1e-13), "soft n={n}: {table:?}");
    }
    assert!(factorization_residual(Edge::Bulk, 0.0, 0.0).is_err());
}

#[test]
fn factorization_hand_values() {
    // hard, n = 0, a = 1: n² + na + a²/2 = 1/2 per unit log t^{1/2}
    let e = hard_expansion(2.0, 0.0, 1.0).unwrap();
    assert!((2.0 * e.coefficient(BasisTerm::log()) + 0.5).abs() < 1e-15);
    let pair = &hard_expansion(1.0, 0.0, 0.0).unwrap() + &hard_expansion(1.0, 1.0, 0.0).unwrap();
    assert!((2.0 * pair.coefficient(BasisTerm::log()) + 0.5).abs() < 1e-15);
    // soft, n = 2: -(3/4)(n² + 1/6)
    let e = soft_expansion(2.0, 2.0).unwrap();
    assert!((e.coefficient(BasisTerm::log()) + 0.75 * (4.0 + 1.0 / 6.0)).abs() < 1e-14);
    let pair = &soft_expansion(1.0, 2.0).unwrap() + &soft_expansion(1.0, 3.0).unwrap();
    assert!((pair.coefficient(BasisTerm::log()) - e.coefficient(BasisTerm::log())).abs() < 1e-14);
    assert_eq!(
        hard_expansion(2.0, 3.0, 0.5).unwrap().coefficient(BasisTerm::power(1, 1)),
        -0.25
    );
}

#[test]
fn duality_grid() {
    for &beta in &BETAS {
        for n in 0..=6 {
            for &a in &[0.0, 0.5, 1.0, 2.0] {
                match hard_duality_residual(beta, n as f64, a) {
                    Ok(c) => assert!(c.table.passes(1e-13), "hard β={beta} n={n} a={a}: {:?}", c.table),
                    Err(AsymError::InfeasibleDual { dual_n }) => assert!(dual_n < 0.0),
                    Err(e) => panic!("{e}"),
                }
            }
            match soft_duality_residual(beta, n as f64) {
                Ok(c) => assert!(c.table.passes(1e-13), "soft β={beta} n={n}: {:?}", c.table),
                Err(AsymError::InfeasibleDual { dual_n }) => assert!(dual_n < 0.0),
                Err(e) => panic!("{e}"),
            }
        }
    }
}

#[test]
fn duality_examples() {
    let c = hard_duality_residual(2.0, 3.0, 0.5).unwrap();
    assert_eq!((c.dual_beta, c.dual_n, c.dual_a), (2.0, 3.0, Some(0.5)));
    assert!(c.table.rows.iter().all(|r| r.residual == 0.0));

    let c = hard_duality_residual(4.0, 1.0, 1.0).unwrap();
    assert_eq!((c.dual_beta, c.dual_n, c.dual_a), (1.0, 3.0, Some(0.0)));
    assert!(c.table.passes(1e-13));
    let c = hard_duality_residual(1.0, 3.0, 2.0).unwrap();
    assert_eq!((c.dual_beta, c.dual_n, c.dual_a), (4.0, 1.0, Some(2.0)));
    assert!(c.table.passes(1e-13));
    let s = c.scales;
    assert!((s.s_dual * (c.beta / 2.0).powi(2) - s.s_beta).abs() < 1e-15);

    let c = soft_duality_residual(4.0, 0.0).unwrap();
    assert_eq!((c.dual_beta, c.dual_n), (1.0, 1.0));
    assert!(c.table.passes(1e-13));
    let c = soft_duality_residual(1.0, 4.0).unwrap();
    assert_eq!((c.dual_beta, c.dual_n), (4.0, 1.5));
    assert!(c.table.passes(1e-13));
    let s = c.scales;
    assert!(((c.beta / 2.0).powf(2.0 / 3.0) * s.s_beta - s.s_dual).abs() < 1e-15);

    assert!(matches!(hard_duality_residual(0.5, 0.0, 0.0), Err(AsymError::InfeasibleDual { .. })));
    assert!(matches!(soft_duality_residual(1.0, 0.0), Err(AsymError::InfeasibleDual { .. })));
    let c = soft_duality_residual(2.0, 3.0).unwrap();
    assert!(c.table.rows.iter().all(|r| r.residual == 0.0));
}

#[test]
fn known_beta_two_coefficients() {
    let e = soft_expansion(2.0, 0.0).unwrap();
    assert_eq!(e.coefficient(BasisTerm::power(3, 1)), -1.0 / 12.0);
    assert_eq!(e.coefficient(BasisTerm::power(3, 2)), 0.0);
    assert_eq!(e.coefficient(BasisTerm::log()), -1.0 / 8.0);
    let v = e.evaluate(E).unwrap();
    assert!((v - (-E.powi(3) / 12.0 - 0.125)).abs() < 1e-14);
    for n in 0..5 {
        let n = n as f64;
        let e = soft_expansion(2.0, n).unwrap();
        assert!((e.coefficient(BasisTerm::power(3, 2)) - SQRT_2 / 3.0 * 2.0 * n).abs() < 1e-15);
        // β = 2: log coefficient -(3/4)(n² + 1/6)
        assert!((e.coefficient(BasisTerm::log()) + 0.75 * (n * n + 1.0 / 6.0)).abs() < 1e-14);
    }

    for rho in [0.5, 1.0, 3.0] {
        let b = bulk_expansion(2.0, 0.0, rho).unwrap();
        assert_eq!(b.coefficient(BasisTerm::log()), -0.25);
        assert_eq!(b.coefficient(BasisTerm::power(1, 1)), 0.0);
        assert!((b.coefficient(BasisTerm::power(2, 1)) + (PI * rho).powi(2) / 8.0).abs() < 1e-15);
    }
    for &beta in &BETAS {
        let rho = 1.3;
        let b0 = bulk_expansion(beta, 0.0, rho).unwrap();
        assert!((b0.coefficient(BasisTerm::power(1, 1)) - (beta / 2.0 - 1.0) * PI * rho / 2.0).abs() < 1e-15);
        assert!((b0.coefficient(BasisTerm::log()) - 0.25 * (beta / 2.0 + 2.0 / beta - 3.0)).abs() < 1e-15);
        let b2 = bulk_expansion(beta, 2.0, rho).unwrap();
        assert!((b2.coefficient(BasisTerm::power(1, 1)) - (2.0 * beta + beta / 2.0 - 1.0) * PI * rho / 2.0).abs() < 1e-14);
    }
    assert!(bulk_expansion(2.0, 0.0, 0.0).is_err());
}

#[test]
fn hard_expansion_shape() {
    for &beta in &BETAS {
        let e = hard_expansion(beta, 0.0, 0.0).unwrap();
        assert_eq!(e.nonzero_terms(), vec![(BasisTerm::power(1, 1), -beta / 8.0)]);
        assert!((e.evaluate(8.0).unwrap() + beta).abs() < 1e-15);
    }
    // β = 2 log coefficient in the log t basis is -(n²/2 + na/2 + a²/4),
    // i.e. -(n² + na + a²/2) per unit log t^{1/2}.
    for &(n, a) in &[(1.0, 0.0), (2.0, 1.0), (3.0, 2.5)] {
        let e = hard_expansion(2.0, n, a).unwrap();
        let per_half_log = 2.0 * e.coefficient(BasisTerm::log());
        assert!((per_half_log + (n * n + n * a + a * a / 2.0)).abs() < 1e-14);
    }
    // dropping a(a-1)/4 + a/(2β) leaves -β(t/8 - √t(n + a/2) + (n²/2 + na/2) log √t)
    let (beta, n, a) = (3.0, 2.0, 1.5);
    let full = hard_expansion(beta, n, a).unwrap();
    let dropped = -beta / 2.0 * (a * (a - 1.0) / 4.0 + a / (2.0 * beta));
    let truncated = full.coefficient(BasisTerm::log()) - dropped;
    assert!((truncated + beta / 2.0 * (n * n / 2.0 + n * a / 2.0)).abs() < 1e-14);
    assert!((full.coefficient(BasisTerm::power(1, 2)) - beta * (n + a / 2.0)).abs() < 1e-15);
}

#[test]
fn evaluate_rejects_nonpositive_t() {
    let e = hard_expansion(2.0, 1.0, 0.0).unwrap();
    assert!(e.evaluate(0.0).is_err());
    assert!(e.evaluate(-1.0).is_err());
    let empty = Expansion::new(Edge::Hard, ExpansionParams { beta: 2.0, n: 0.0, a: None, rho: None });
    assert_eq!(empty.evaluate(3.0).unwrap(), 0.0);
}

/// Gap between the electrostatic log E and the expansion. At the hard edge
/// the `a(a-1)/4 + a/(2β)` part of the log coefficient does not come out of
/// the electrostatics, so it is removed before comparing; what is left should
/// settle to a constant.
#[test]
fn electrostatics_tracks_expansions() {
    let ts = [1e3, 1e4, 1e5, 1e6];
    for &(beta, n, a) in &[(2.0, 0.0, 0.0), (2.0, 1.0, 0.0), (1.0, 2.0, 1.0), (4.0, 1.0, 0.5)] {
        let e = hard_expansion(beta, n, a).unwrap();
        let diffs: Vec<f64> = ts
            .iter()
            .map(|&t| {
                let s = hard_solve(&HardEdgeProblem::new(t, n, a, beta).unwrap()).unwrap();
                let extra = -beta / 2.0 * (a * (a - 1.0) / 4.0 + a / (2.0 * beta));
                s.log_e - (e.evaluate(t).unwrap() - extra * t.ln())
            })
            .collect();
        let bound = 5.0 * beta * (1.0 + n * n + a * a);
        assert!(diffs.iter().all(|d| d.abs() < bound), "hard {beta} {n} {a}: {diffs:?}");
        assert!((diffs[3] - diffs[2]).abs() <= (diffs[1] - diffs[0]).abs() + 1e-6, "hard drift {diffs:?}");
    }
    for &(beta, n) in &[(2.0, 0.0), (2.0, 1.0), (1.0, 2.0), (4.0, 1.0)] {
        let e = soft_expansion(beta, n).unwrap();
        let diffs: Vec<f64> = ts
            .iter()
            .map(|&t| {
                let s = soft_solve(&SoftEdgeProblem::new(t, n, beta).unwrap()).unwrap();
                (s.log_e - e.evaluate(t).unwrap()) / t.powi(3)
            })
            .collect();
        // Relative to the leading order the mismatch dies off.
        assert!(diffs.windows(2).all(|w| w[1].abs() <= w[0].abs()), "soft {beta} {n}: {diffs:?}");
    }
}

proptest! {
    #[test]
    fn evaluate_is_linear(c1 in -5.0f64..5.0, c2 in -5.0f64..5.0, s in -3.0f64..3.0, t in 0.01f64..1e4) {
        let p = ExpansionParams { beta: 1.0, n: 0.0, a: None, rho: None };
        let e1 = Expansion::new(Edge::Soft, p).with_term(BasisTerm::power(3, 2), c1).with_term(BasisTerm::log(), c2);
        let e2 = Expansion::new(Edge::Soft, p).with_term(BasisTerm::power(1, 1), c2).with_term(BasisTerm::constant(), c1);
        let sum = (&e1 + &e2.scaled(s)).evaluate(t).unwrap();
        let parts = e1.evaluate(t).unwrap() + s * e2.evaluate(t).unwrap();
        prop_assert!((sum - parts).abs() <= 1e-12 * (1.0 + sum.abs().max(parts.abs())));
    }

    #[test]
    fn rescaling_commutes_with_evaluation(beta in 0.3f64..8.0, n in 0.0f64..5.0, s in 0.1f64..10.0, t in 1.0f64..1e3) {
        let e = soft_expansion(beta, n).unwrap();
        let direct = e.evaluate(s * t).unwrap();
        let moved = e.rescaled(s).unwrap().evaluate(t).unwrap();
        prop_assert!((direct - moved).abs() <= 1e-11 * (1.0 + direct.abs()));
    }

    #[test]
    fn factorization_real_counts(n in 0.0f64..20.0, a in -0.5f64..4.0) {
        prop_assert!(factorization_residual(Edge::Hard, n, a).unwrap().passes(1e-13));
        prop_assert!(factorization_residual(Edge::Soft, n, 0.0).unwrap().passes(1e-13));
    }

    #[test]
    fn duality_real_parameters(beta in 0.2f64..10.0, n in 0.0f64..10.0, a in 0.0f64..3.0) {
        if let Ok(c) = hard_duality_residual(beta, n, a) {
            prop_assert!(c.table.passes(1e-12));
        }
        if let Ok(c) = soft_duality_residual(beta, n) {
            prop_assert!(c.table.passes(1e-12));
        }
    }
}

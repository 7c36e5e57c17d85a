//! Regression tests for cases where the stated hypotheses do not imply the
//! stated bound.

use cohbound::bounds::{chain_audit, evaluate, BoundParams, Variant};
use cohbound::coherence::{c_l1_pure, coherence_profile};
use cohbound::harness::{audit_state, Verdict};
use cohbound::qmatrix::{pure_to_density, StateVector};
use num_complex::Complex64;

/// `|+> ⊗ |psi> ⊗ |psi>` with `C(psi) = 0.05`.
fn weak_tail_state() -> StateVector {
    // 2ab = 0.05, a^2 + b^2 = 1
    let b = ((1.0 - (1.0 - 0.05f64 * 0.05).sqrt()) / 2.0).sqrt();
    let a = (1.0 - b * b).sqrt();
    let psi = StateVector::new(vec![Complex64::new(a, 0.0), Complex64::new(b, 0.0)]).unwrap();
    assert!((c_l1_pure(&psi) - 0.05).abs() < 1e-15);
    let plus = StateVector::normalized(vec![Complex64::new(1.0, 0.0); 2]).unwrap();
    plus.tensor(&psi).unwrap().tensor(&psi).unwrap()
}

#[test]
fn tail_hypothesis_is_too_weak_for_the_tiered_bound() {
    let rho = pure_to_density(&weak_tail_state());
    let profile = coherence_profile(&rho, &[0, 1, 2]).unwrap();
    // C = (1, 0.05, 0.05), T = (1.05^2 - 1, 0.05), full = 2 * 1.05^2 - 1
    let t1 = 1.05f64 * 1.05 - 1.0;
    assert!((profile.tails[0] - t1).abs() < 1e-12);
    assert!((profile.full - 1.205).abs() < 1e-12);

    let x = t1;
    let params = BoundParams::from_x(2.0, 1.0, x, 1).unwrap();
    let claimed = evaluate(Variant::Thm1, &profile, &params).unwrap().value;
    // q = ((1 + x)^2 - 1) / x^2, claimed = 1 + q^2 * 0.05^2 + q * 0.05^2
    let q = ((1.0 + x).powi(2) - 1.0) / (x * x);
    let oracle = 1.0 + q * q * 0.0025 + q * 0.0025;
    assert!((claimed - oracle).abs() < 1e-10);
    assert!((claimed - 2.1031558596).abs() < 1e-9, "{claimed}");
    let actual = 1.205f64 * 1.205;
    assert!(claimed > actual + 0.6);

    let consistent = evaluate(Variant::Thm2ProofConsistent, &profile, &params)
        .unwrap()
        .value;
    assert!(consistent <= actual);

    // the failing link is the tail step, T_1^2 >= q C_2^2 + T_2^2
    let steps = chain_audit(&rho, &[0, 1, 2], &params).unwrap();
    assert_eq!(steps.len(), 2);
    assert!(steps[0].residual >= 0.0);
    assert!(steps[1].residual < -0.05);
    let total: f64 = steps.iter().map(|s| s.residual).sum();
    assert!((total - (actual - claimed)).abs() < 1e-12);
}

#[test]
fn audit_reports_the_weak_tail_case() {
    let rho = pure_to_density(&weak_tail_state());
    let k = 1.05f64 * 1.05 - 1.0;
    let audit = audit_state("weak-tail", &rho, &[0, 1, 2], 2.0, 1.0, k, 1.0, None).unwrap();
    let verdict = |v: Variant| {
        audit
            .records
            .iter()
            .find(|r| r.variant == v)
            .unwrap()
            .verdict
    };
    assert_eq!(verdict(Variant::Thm1), Verdict::Violated);
    assert_eq!(verdict(Variant::Eq5), Verdict::Violated);
    assert_eq!(verdict(Variant::Thm2ProofConsistent), Verdict::Holds);
    assert_eq!(verdict(Variant::PlainSuperadditivity), Verdict::Holds);
}

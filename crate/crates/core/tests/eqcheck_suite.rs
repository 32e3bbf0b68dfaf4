//! Equivalence checking on mutated and rewritten corpus circuits.

mod common;

use std::time::Instant;

use common::*;
use evdd::eqcheck::{check, check_pauli, Algorithm, PauliOptions};
use evdd::{Complex64, Manager};
use evdd_oracle::dense_equiv;

fn verdict(c: &EqCase, alg: Algorithm) -> evdd::eqcheck::Verdict {
    let mut m = manager(c.u.num_qubits);
    check(&mut m, &c.u, &c.v, alg).unwrap_or_else(|e| panic!("{}: {e}", c.label))
}

#[test]
fn mutation_suite_verdicts() {
    let start = Instant::now();
    let suite = mutation_suite(8);
    assert!(suite.len() > 500, "{}", suite.len());
    for case in &suite {
        let alt = verdict(case, Algorithm::Alternating);
        let pauli = verdict(case, Algorithm::Pauli);
        assert_eq!(alt.equivalent, case.expect_equivalent, "alternating: {}", case.label);
        assert_eq!(pauli.equivalent, case.expect_equivalent, "pauli: {}", case.label);
        if alt.equivalent {
            assert!((alt.factor.unwrap().norm() - 1.0).abs() < 1e-9, "{}", case.label);
        } else {
            assert!(alt.witness.is_some() && pauli.witness.is_some());
        }
        if case.u.num_qubits <= 6 {
            let d = dense_equiv(&case.u, &case.v).unwrap();
            assert_eq!(d.equivalent, alt.equivalent, "dense: {}", case.label);
        }
    }
    eprintln!("{} pairs in {:.1?}", suite.len(), start.elapsed());
}

#[test]
fn factors_agree_between_algorithms() {
    let u = circuit("qreg q[2]; rz(0.8) q[0]; cx q[0],q[1]; h q[1];");
    let v = circuit("qreg q[2]; u1(0.8) q[0]; cx q[0],q[1]; h q[1];");
    let case = EqCase { label: "rz/u1".into(), u, v, expect_equivalent: true };
    let want = Complex64::from_polar(1.0, -0.4);
    for alg in [Algorithm::Alternating, Algorithm::Pauli] {
        let f = verdict(&case, alg).factor.unwrap();
        assert!((f - want).norm() < 1e-9, "{alg}: {f}");
    }
    let d = dense_equiv(&case.u, &case.v).unwrap();
    assert!((d.factor.unwrap() - want).norm() < 1e-9);
}

#[test]
fn flipped_ghz_is_caught_with_a_witness() {
    let u = circuit("qreg q[3]; h q[0]; cx q[0],q[1]; cx q[1],q[2];");
    let v = circuit("qreg q[3]; h q[0]; cx q[1],q[0]; cx q[1],q[2];");
    assert!(!dense_equiv(&u, &v).unwrap().equivalent);
    let m = manager(3);
    let r = check_pauli(&m, &u, &v, &PauliOptions::default()).unwrap();
    assert!(!r.equivalent);
    assert!(r.witness.unwrap().starts_with("Pauli check "));
}

#[test]
fn pauli_options_do_not_change_verdicts() {
    let suite = mutation_suite(5);
    for case in suite.iter().step_by(7) {
        let m = Manager::new(case.u.num_qubits, config(evdd::NormStrategy::Max, 2));
        let base = check_pauli(&m, &case.u, &case.v, &PauliOptions::default()).unwrap();
        for opts in [
            PauliOptions { parallel: true, interleave: false },
            PauliOptions { parallel: false, interleave: true },
            PauliOptions { parallel: true, interleave: true },
        ] {
            let r = check_pauli(&m, &case.u, &case.v, &opts).unwrap();
            assert_eq!(r.equivalent, base.equivalent, "{} {opts:?}", case.label);
        }
    }
}

#[test]
fn mutations_cover_both_kinds() {
    let c = circuit("qreg q[3]; h q[0]; cx q[0],q[1]; ccx q[0],q[1],q[2]; cz q[0],q[2]; id q[1];");
    let labels: Vec<String> = mutations(&c).into_iter().map(|(l, _)| l).collect();
    assert_eq!(labels.iter().filter(|l| l.starts_with("missing")).count(), 4);
    assert_eq!(labels.iter().filter(|l| l.starts_with("flipped")).count(), 2);
}

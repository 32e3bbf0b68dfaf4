//! Results do not depend on the number of workers.

mod common;

use common::*;
use evdd::eqcheck::{check, check_pauli, Algorithm, PauliOptions};
use evdd::sim::simulate;
use evdd::{Config, Manager, NormStrategy};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;

const REPRESENTATIVE: [&str; 8] = [
    "ghz_10", "w_8", "qft_8", "dj_7", "graph_10", "random_dense_8", "clifford_9", "qaoa_8",
];

fn pool(n: usize, workers: usize) -> Manager {
    // a low cutoff so that even small registers fork
    Manager::new(n, Config { workers, par_cutoff: 1, ..config(NormStrategy::Max, workers) })
}

#[test]
fn amplitudes_agree_across_worker_counts() {
    let all = corpus();
    for name in REPRESENTATIVE {
        let c = &all.iter().find(|(n, _)| n == name).unwrap().1;
        let n = c.num_qubits;
        let mut rng = ChaCha20Rng::seed_from_u64(17);
        let probes: Vec<String> = (0..64)
            .map(|_| (0..n).map(|_| if rng.random::<bool>() { '1' } else { '0' }).collect())
            .collect();
        let mut reference = None;
        for workers in [1, 2, 4, 8] {
            let mut m = pool(n, workers);
            let s = simulate(&mut m, c).unwrap().state;
            let amps: Vec<_> = probes.iter().map(|b| m.evaluate(s, b).unwrap()).collect();
            match &reference {
                None => reference = Some(amps),
                Some(r) => assert!(max_dev(r, &amps) < 1e-9, "{name} with {workers} workers"),
            }
        }
    }
}

#[test]
fn verdicts_agree_across_worker_counts() {
    let suite = mutation_suite(8);
    for case in suite.iter().step_by(23) {
        let n = case.u.num_qubits;
        let mut seen = Vec::new();
        for workers in [1, 2, 4, 8] {
            let mut m = pool(n, workers);
            let a = check(&mut m, &case.u, &case.v, Algorithm::Alternating).unwrap();
            let m = pool(n, workers);
            let opts = PauliOptions { parallel: workers > 1, interleave: false };
            let p = check_pauli(&m, &case.u, &case.v, &opts).unwrap();
            seen.push((a.equivalent, p.equivalent, a.witness, p.witness));
        }
        assert!(seen.windows(2).all(|w| w[0] == w[1]), "{}: {seen:?}", case.label);
        assert_eq!(seen[0].0, case.expect_equivalent, "{}", case.label);
    }
}

#[test]
fn cancellation_stops_a_running_simulation() {
    let c = corpus().into_iter().find(|(n, _)| n == "random_dense_8").unwrap().1;
    let mut m = pool(8, 2);
    m.cancel_flag().store(true, std::sync::atomic::Ordering::Relaxed);
    assert_eq!(simulate(&mut m, &c).unwrap_err(), evdd::DdError::Cancelled);
    m.reset_cancel();
    assert!(simulate(&mut m, &c).is_ok());
}

//! DD results against the dense reference implementation.

mod common;

use common::*;
use evdd::gates::{gate_matrix, u3_matrix};
use evdd::sim::simulate;
use evdd::{Complex64, Config, Manager, NormStrategy};
use evdd_oracle::{compare_up_to_factor, dense_gate, dense_simulate, DenseMatrix};
use evdd_qasm::{parse_with, GateKind, GateSpec, ParseOptions};

#[test]
fn corpus_matches_dense_statevectors() {
    for (name, c) in corpus() {
        if c.num_qubits > 10 {
            continue;
        }
        let dense = dense_simulate(&c).unwrap();
        let mut m = Manager::new(c.num_qubits, Config::small());
        let r = simulate(&mut m, &c).unwrap();
        let dev = max_dev(&m.amplitudes(r.state), &dense.amplitudes);
        assert!(dev < 1e-9, "{name}: deviation {dev:e}");
    }
}

#[test]
fn disabling_the_cache_changes_no_edge() {
    for (name, c) in corpus() {
        if c.num_qubits > 8 {
            continue;
        }
        let mut on = Manager::new(c.num_qubits, Config::small());
        let mut off = Manager::new(c.num_qubits, Config { op_cache: false, ..Config::small() });
        let a = simulate(&mut on, &c).unwrap();
        let b = simulate(&mut off, &c).unwrap();
        assert_eq!(a.state, b.state, "{name}");
        assert_eq!(on.values().get(a.state.weight), off.values().get(b.state.weight), "{name}");
    }
}

#[test]
fn gc_preserves_results() {
    let c = corpus().into_iter().find(|(n, _)| n == "random_dense_6").unwrap().1;
    let mut plain = Manager::new(6, Config::small());
    let st = simulate(&mut plain, &c).unwrap().state;
    let want = plain.amplitudes(st);
    let mut m = Manager::new(6, Config { gc: true, node_table_log2: 9, ..Config::small() });
    let r = simulate(&mut m, &c).unwrap();
    assert!(max_dev(&m.amplitudes(r.state), &want) < 1e-12);
    let (live, peak) = m.nodes().lookup_stats();
    assert!(live < peak, "collection never ran: {live} / {peak}");
}

fn dense_of(m: &Manager, e: evdd::Edge) -> DenseMatrix {
    DenseMatrix {
        dim: 1 << m.num_qubits(),
        data: m.to_matrix(e),
    }
}

fn sample_gates(n: usize) -> Vec<GateSpec> {
    let params = [0.37, -1.21, 2.45];
    let mut out = Vec::new();
    for kind in GateKind::ALL {
        let k = kind.num_qubits();
        if k > n {
            continue;
        }
        let p = params[..kind.num_params()].to_vec();
        // qubits spread over the register in both orders
        let spread: Vec<usize> = (0..k).map(|i| i * (n - 1) / (k.max(2) - 1)).collect();
        let mut rev = spread.clone();
        rev.reverse();
        for qs in [spread, rev] {
            let mut uniq = qs.clone();
            uniq.sort();
            uniq.dedup();
            if uniq.len() == k {
                out.push(GateSpec::new(kind, p.clone(), &qs).unwrap());
            }
        }
    }
    out
}

#[test]
fn gate_dds_match_kronecker_matrices() {
    for n in 1..=6 {
        let m = Manager::new(n, Config::small());
        for g in sample_gates(n) {
            let e = m.build_gate_dd(&g).unwrap();
            let dev = max_dev(&m.to_matrix(e), &dense_gate(n, &g).data);
            assert!(dev < 1e-12, "{g} on {n}: {dev:e}");
        }
    }
}

#[test]
fn gates_are_unitary() {
    for s in NormStrategy::ALL {
        let m = Manager::new(4, config(s, 1));
        for g in sample_gates(4) {
            let e = m.build_gate_dd(&g).unwrap();
            let p = m.mat_mat(e, m.dagger(e).unwrap()).unwrap();
            let c = m.equiv_up_to_factor(p, m.identity_dd().unwrap());
            let c = c.unwrap_or_else(|| panic!("{g} under {s}: G G† not ∝ I"));
            assert!((c.norm() - 1.0).abs() < 1e-9, "{g}: {c}");
        }
    }
}

#[test]
fn cx_size_grows_with_distance() {
    // three nodes per level for I + P1 ⊗ (X - I), one terminal, and three more
    // for every level strictly between control and target
    for n in 2..=12 {
        let m = Manager::new(n, Config::small());
        for c in 0..n {
            for t in (0..n).filter(|&t| t != c) {
                let g = GateSpec::new(GateKind::Cx, vec![], &[c, t]).unwrap();
                let size = m.node_count(&[m.build_gate_dd(&g).unwrap()]);
                let d = c.abs_diff(t);
                assert_eq!(size, 3 * n + 1 + 3 * (d - 1), "{g} on {n}");
                assert!(size <= 6 * n);
            }
        }
        if n >= 3 {
            let g = GateSpec::new(GateKind::Ccx, vec![], &[0, 1, 2]).unwrap();
            let size = m.node_count(&[m.build_gate_dd(&g).unwrap()]);
            assert!(size <= 4 * n, "ccx on {n}: {size}");
        }
    }
}

#[test]
fn adjacent_controls_meet_the_4n_bound() {
    for n in 3..=12 {
        let m = Manager::new(n, Config::small());
        for t in 1..n {
            let g = GateSpec::new(GateKind::Cu3, vec![0.1, 0.2, 0.3], &[t - 1, t]).unwrap();
            let size = m.node_count(&[m.build_gate_dd(&g).unwrap()]);
            assert!(size <= 4 * n, "{g} on {n}: {size}");
        }
    }
}

#[test]
fn products_and_adjoints_match_dense() {
    let n = 3;
    let m = Manager::new(n, Config::small());
    let gates = sample_gates(n);
    for pair in gates.windows(2) {
        let (a, b) = (m.build_gate_dd(&pair[0]).unwrap(), m.build_gate_dd(&pair[1]).unwrap());
        let (da, db) = (dense_gate(n, &pair[0]), dense_gate(n, &pair[1]));
        let ab = m.mat_mat(a, b).unwrap();
        assert!(max_dev(&m.to_matrix(ab), &da.matmul(&db).data) < 1e-12);
        let ad = m.dagger(a).unwrap();
        assert!(max_dev(&m.to_matrix(ad), &da.adjoint().data) < 1e-12);
        let sum = m.plus_mat(a, b).unwrap();
        let want: Vec<_> = da.data.iter().zip(&db.data).map(|(x, y)| x + y).collect();
        assert!(max_dev(&m.to_matrix(sum), &want) < 1e-12);
    }
}

#[test]
fn adjoint_of_s_conjugates_its_phase() {
    let m = manager(1);
    let s = m.build_gate_dd(&GateSpec::new(GateKind::S, vec![], &[0]).unwrap()).unwrap();
    let sd = m.dagger(s).unwrap();
    assert_eq!(m.matrix_entry(sd, 1, 1), Complex64::new(0.0, -1.0));
    assert_eq!(m.dagger(sd).unwrap(), s);
    let id = m.identity_dd().unwrap();
    assert_eq!(m.dagger(id).unwrap(), id);
}

#[test]
fn small_examples() {
    let m = manager(1);
    let h = m.build_gate_dd(&GateSpec::new(GateKind::H, vec![], &[0]).unwrap()).unwrap();
    let plus = m.mat_vec(h, m.zero_state().unwrap()).unwrap();
    for a in m.amplitudes(plus) {
        assert!((a - Complex64::new(0.5f64.sqrt(), 0.0)).norm() < 1e-15);
    }
    let x = m.pauli_dd(evdd::gates::Pauli::X, 0).unwrap();
    assert_eq!(m.mat_mat(x, x).unwrap(), m.identity_dd().unwrap());
    assert_eq!(m.to_matrix(x), dense_gate(1, &GateSpec::new(GateKind::X, vec![], &[0]).unwrap()).data);
}

#[test]
fn library_expansions_match_native_gates() {
    // every composite gate of the embedded library, expanded to u3/cx,
    // against the closed-form DD of the native gate
    let mut checked = 0;
    for kind in GateKind::ALL {
        if matches!(kind, GateKind::U3 | GateKind::Cx) {
            continue;
        }
        let k = kind.num_qubits();
        let p = [0.37, -1.21, 2.45][..kind.num_params()]
            .iter()
            .map(|v| v.to_string())
            .collect::<Vec<_>>()
            .join(",");
        let args = (0..k).map(|i| format!("q[{i}]")).collect::<Vec<_>>().join(",");
        let call = if p.is_empty() { format!("{} {args};", kind.name()) } else { format!("{}({p}) {args};", kind.name()) };
        let src = format!("OPENQASM 2.0; include \"qelib1.inc\"; qreg q[{k}]; {call}");
        let expanded = parse_with(&src, ParseOptions { expand_library: true }).unwrap();
        let native = parse_with(&src, ParseOptions { expand_library: false }).unwrap();
        assert_eq!(native.ops.len(), 1);
        assert!(expanded.ops.iter().all(|g| matches!(g.kind, GateKind::U3 | GateKind::Cx)), "{kind}");
        let m = manager(k);
        let mut u = m.identity_dd().unwrap();
        for g in &expanded.ops {
            u = m.mat_mat(m.build_gate_dd(g).unwrap(), u).unwrap();
        }
        let want = m.build_gate_dd(&native.ops[0]).unwrap();
        let (dev, c) = max_dev_up_to_factor(&m.to_matrix(u), &m.to_matrix(want));
        assert!(dev < 1e-10, "{kind}: {dev:e}");
        assert!((c.norm() - 1.0).abs() < 1e-10, "{kind}: factor {c}");
        checked += 1;
    }
    assert_eq!(checked, GateKind::ALL.len() - 2);
}

#[test]
fn phase_conventions_only_change_the_factor() {
    let m = manager(1);
    for theta in [0.1, 1.0, -2.5, 3.0] {
        let rz = m.build_gate_dd(&GateSpec::new(GateKind::Rz, vec![theta], &[0]).unwrap()).unwrap();
        let u1 = m.build_gate_dd(&GateSpec::new(GateKind::U1, vec![theta], &[0]).unwrap()).unwrap();
        let c = m.equiv_up_to_factor(rz, u1).unwrap();
        assert!((c - Complex64::from_polar(1.0, -theta / 2.0)).norm() < 1e-12);
    }
    let a = u3_matrix(0.0, 0.0, 0.8);
    let b = gate_matrix(GateKind::U1, &[0.8]);
    assert!((a[1][1] - b[1][1]).norm() < 1e-15);
}

#[test]
fn oracle_unitaries_agree_with_dd_products() {
    for (name, c) in corpus() {
        if c.num_qubits > 5 {
            continue;
        }
        let m = Manager::new(c.num_qubits, Config::small());
        let mut u = m.identity_dd().unwrap();
        for g in &c.ops {
            u = m.mat_mat(m.build_gate_dd(g).unwrap(), u).unwrap();
        }
        let dense = evdd_oracle::dense_unitary(&c).unwrap();
        let v = compare_up_to_factor(&dense_of(&m, u), &dense, 1e-9);
        assert!(v.equivalent && (v.factor.unwrap() - 1.0).norm() < 1e-9, "{name}");
    }
}

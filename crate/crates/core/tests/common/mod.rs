#![allow(dead_code)]

use std::path::PathBuf;

use evdd::{Complex64, Config, Manager, NormStrategy};
use evdd_qasm::{parse, Circuit, GateKind, GateSpec};

pub fn corpus_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/corpus")
}

/// Every bundled circuit, sorted by name.
pub fn corpus() -> Vec<(String, Circuit)> {
    let mut out: Vec<_> = std::fs::read_dir(corpus_dir())
        .expect("corpus directory")
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|x| x == "qasm"))
        .map(|p| {
            let name = p.file_stem().unwrap().to_string_lossy().into_owned();
            let src = std::fs::read_to_string(&p).unwrap();
            let c = parse(&src).unwrap_or_else(|e| panic!("{name}: {e}"));
            (name, c)
        })
        .collect();
    out.sort_by(|a, b| a.0.cmp(&b.0));
    out
}

pub fn circuit(body: &str) -> Circuit {
    parse(&format!("OPENQASM 2.0; include \"qelib1.inc\"; {body}")).unwrap()
}

pub fn config(strategy: NormStrategy, workers: usize) -> Config {
    Config {
        norm_strategy: strategy,
        workers,
        ..Config::small()
    }
}

pub fn manager(n: usize) -> Manager {
    Manager::new(n, Config::small())
}

pub fn max_dev(a: &[Complex64], b: &[Complex64]) -> f64 {
    assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

/// Largest `|a - c·b|` with `c` fitted on the largest entry of `b`.
pub fn max_dev_up_to_factor(a: &[Complex64], b: &[Complex64]) -> (f64, Complex64) {
    let (i, _) = b
        .iter()
        .enumerate()
        .max_by(|x, y| x.1.norm().total_cmp(&y.1.norm()))
        .unwrap();
    let c = a[i] / b[i];
    let dev = a.iter().zip(b).map(|(x, y)| (x - c * y).norm()).fold(0.0, f64::max);
    (dev, c)
}

/// Single "1 gate missing" and "flipped control/target" variants of `c`.
pub fn mutations(c: &Circuit) -> Vec<(String, Circuit)> {
    let mut out = Vec::new();
    for i in 0..c.ops.len() {
        if is_global_phase(&c.ops[i]) {
            continue;
        }
        let mut m = c.clone();
        let g = m.ops.remove(i);
        out.push((format!("missing #{i} ({g})"), m));
    }
    for (i, g) in c.ops.iter().enumerate() {
        if let Some(f) = flipped(g) {
            let mut m = c.clone();
            m.ops[i] = f;
            out.push((format!("flipped #{i} ({g})"), m));
        }
    }
    out
}

/// Single-qubit gates equal to `c·I`, whose removal changes nothing.
pub fn is_global_phase(g: &GateSpec) -> bool {
    if !g.controls.is_empty() || g.kind.num_qubits() != 1 {
        return false;
    }
    let m = evdd_oracle::single_qubit_matrix(g.kind, &g.params);
    m[0][1].norm() < 1e-12 && m[1][0].norm() < 1e-12 && (m[0][0] - m[1][1]).norm() < 1e-12
}

/// The gate with its last control and its target exchanged, for gates where
/// that changes the operator.
pub fn flipped(g: &GateSpec) -> Option<GateSpec> {
    use GateKind::*;
    match g.kind {
        Cx | Cy | Ch | Csx | Crx | Cry | Crz | Cu3 | Ccx => {
            let mut f = g.clone();
            let last = f.controls.len() - 1;
            std::mem::swap(&mut f.controls[last], &mut f.targets[0]);
            Some(f)
        }
        _ => None,
    }
}

/// `c` with gates replaced by known equivalent sequences: `z = s s`,
/// `x = h z h`, `rz(θ) ~ u1(θ)`, `u1(θ) ~ rz(θ)`, `cx a,b = h b; cz a,b; h b`.
pub fn rewritten(c: &Circuit) -> Circuit {
    let mut out = Circuit::new(c.num_qubits);
    for g in &c.ops {
        let q = |i: usize| g.qubits().nth(i).unwrap();
        let mut add = |k: GateKind, p: Vec<f64>, qs: &[usize]| {
            out.push(GateSpec::new(k, p, qs).unwrap()).unwrap();
        };
        match g.kind {
            GateKind::Z => {
                add(GateKind::S, vec![], &[q(0)]);
                add(GateKind::S, vec![], &[q(0)]);
            }
            GateKind::X => {
                add(GateKind::H, vec![], &[q(0)]);
                add(GateKind::Z, vec![], &[q(0)]);
                add(GateKind::H, vec![], &[q(0)]);
            }
            GateKind::Rz => add(GateKind::U1, g.params.clone(), &[q(0)]),
            GateKind::U1 => add(GateKind::Rz, g.params.clone(), &[q(0)]),
            GateKind::Cx => {
                add(GateKind::H, vec![], &[q(1)]);
                add(GateKind::Cz, vec![], &[q(0), q(1)]);
                add(GateKind::H, vec![], &[q(1)]);
            }
            _ => {
                out.push(g.clone()).unwrap();
            }
        }
    }
    out
}

/// Random gates on `n` qubits over the whole native gate set.
pub fn arb_gate(n: usize) -> impl proptest::strategy::Strategy<Value = GateSpec> {
    use proptest::prelude::*;
    let kinds: Vec<GateKind> = GateKind::ALL.iter().copied().filter(|k| k.num_qubits() <= n).collect();
    proptest::sample::select(kinds).prop_flat_map(move |kind| {
        let qs = proptest::sample::subsequence((0..n).collect::<Vec<_>>(), kind.num_qubits()).prop_shuffle();
        let ps = proptest::collection::vec(-3.2f64..3.2, kind.num_params());
        (qs, ps).prop_map(move |(qs, ps)| GateSpec::new(kind, ps, &qs).unwrap())
    })
}

pub fn arb_circuit(
    qubits: std::ops::RangeInclusive<usize>,
    max_gates: usize,
) -> impl proptest::strategy::Strategy<Value = Circuit> {
    use proptest::prelude::*;
    qubits.prop_flat_map(move |n| {
        proptest::collection::vec(arb_gate(n), 0..=max_gates).prop_map(move |gs| {
            let mut c = Circuit::new(n);
            for g in gs {
                c.push(g).unwrap();
            }
            c
        })
    })
}

pub struct EqCase {
    pub label: String,
    pub u: Circuit,
    pub v: Circuit,
    pub expect_equivalent: bool,
}

/// Self pairs, rewritten pairs and every single mutation of each corpus
/// circuit with at most `max_n` qubits.
pub fn mutation_suite(max_n: usize) -> Vec<EqCase> {
    let mut out = Vec::new();
    for (name, c) in corpus().into_iter().filter(|(_, c)| c.num_qubits <= max_n) {
        out.push(EqCase { label: format!("{name} self"), u: c.clone(), v: c.clone(), expect_equivalent: true });
        out.push(EqCase { label: format!("{name} rewritten"), u: c.clone(), v: rewritten(&c), expect_equivalent: true });
        for (what, m) in mutations(&c) {
            out.push(EqCase { label: format!("{name} {what}"), u: c.clone(), v: m, expect_equivalent: false });
        }
    }
    out
}

//! Statevector simulation.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::time::{Duration, Instant};

use evdd_qasm::{Circuit, GateSpec};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;

use crate::error::{DdError, Result};
use crate::manager::Manager;
use crate::node_store::Edge;

/// DD size regime of a final state.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, PartialOrd, Ord)]
pub enum SharingClass {
    /// Fewer than `n·log2(n)` nodes.
    High,
    Some,
    /// At least `0.9·2^n` nodes.
    None,
}

impl SharingClass {
    pub fn classify(num_qubits: usize, nodes: usize) -> Self {
        let n = num_qubits as f64;
        if (nodes as f64) < n * n.log2() {
            SharingClass::High
        } else if nodes as f64 >= 0.9 * 2f64.powi(num_qubits as i32) {
            SharingClass::None
        } else {
            SharingClass::Some
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            SharingClass::High => "high-sharing",
            SharingClass::Some => "some-sharing",
            SharingClass::None => "no-sharing",
        }
    }

    pub fn from_name(s: &str) -> Option<Self> {
        [SharingClass::High, SharingClass::Some, SharingClass::None]
            .into_iter()
            .find(|c| c.name() == s)
    }
}

impl fmt::Display for SharingClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone)]
pub struct SimResult {
    pub state: Edge,
    /// Sum of squared amplitude moduli; 1 for an exact simulation.
    pub l2_norm: f64,
    pub final_nodes: usize,
    /// Largest state DD seen after any gate.
    pub peak_nodes: usize,
    pub gates: usize,
    pub wall_time: Duration,
    pub sharing_class: SharingClass,
}

fn apply(mgr: &Manager, g: &GateSpec, state: Edge) -> Result<Edge> {
    mgr.mat_vec(mgr.build_gate_dd(g)?, state)
}

/// Apply the gates of `circuit` in order to `|0...0>`.
///
/// With garbage collection enabled the node table is compacted between gates
/// once it is half full, and once more if a single gate fills it; the
/// returned state is valid in the compacted table.
pub fn simulate(mgr: &mut Manager, circuit: &Circuit) -> Result<SimResult> {
    let n = mgr.num_qubits();
    if circuit.num_qubits != n {
        return Err(DdError::QubitCountMismatch(circuit.num_qubits, n));
    }
    let start = Instant::now();
    let mut state = mgr.zero_state()?;
    let mut peak = mgr.node_count(&[state]);
    for g in &circuit.ops {
        state = match apply(mgr, g, state) {
            Err(DdError::TableFull { .. }) if mgr.config().gc => {
                let mut roots = [state];
                mgr.collect_garbage(&mut roots);
                apply(mgr, g, roots[0])?
            }
            r => r?,
        };
        peak = peak.max(mgr.node_count(&[state]));
        if mgr.wants_gc() {
            let mut roots = [state];
            mgr.collect_garbage(&mut roots);
            state = roots[0];
        }
    }
    let wall_time = start.elapsed();
    let final_nodes = mgr.node_count(&[state]);
    Ok(SimResult {
        state,
        l2_norm: mgr.l2_norm_squared(state),
        final_nodes,
        peak_nodes: peak,
        gates: circuit.ops.len(),
        wall_time,
        sharing_class: SharingClass::classify(n, final_nodes),
    })
}

/// Draw `shots` basis states with probability `|ψ(s)|² / ‖ψ‖²`.
///
/// Sampling walks the DD top-down, choosing each branch with probability
/// proportional to its squared subtree norm; skipped variables are fair
/// coins. The generator is ChaCha20 seeded from `seed`, so a histogram
/// depends only on the state and the seed.
pub fn sample(mgr: &Manager, state: Edge, shots: usize, seed: u64) -> Result<BTreeMap<String, usize>> {
    if mgr.l2_norm_squared(state) == 0.0 {
        return Err(DdError::ZeroState);
    }
    let n = mgr.num_qubits() as u32;
    let mut memo = HashMap::new();
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let mut hist = BTreeMap::new();
    let mut bits = vec![b'0'; n as usize];
    for _ in 0..shots {
        let mut e = state;
        let mut level = 0;
        loop {
            let var = mgr.var(e, n);
            for b in &mut bits[level as usize..var as usize] {
                *b = if rng.random::<bool>() { b'1' } else { b'0' };
            }
            if e.is_terminal() {
                break;
            }
            let node = mgr.node(e.target);
            let mass = |c: Edge, memo: &mut HashMap<_, _>| {
                if c.is_zero() {
                    0.0
                } else {
                    mgr.weight(c).norm_sqr() * mgr.skip_factor(c, var + 1) * mgr.subtree_norm(c.target, memo)
                }
            };
            let p0 = mass(node.low, &mut memo);
            let p1 = mass(node.high, &mut memo);
            let one = rng.random::<f64>() * (p0 + p1) >= p0;
            bits[var as usize] = if one { b'1' } else { b'0' };
            e = if one { node.high } else { node.low };
            level = var + 1;
        }
        *hist
            .entry(String::from_utf8(bits.clone()).expect("ascii"))
            .or_insert(0) += 1;
    }
    Ok(hist)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::manager::Config;

    #[test]
    fn classes() {
        assert_eq!(SharingClass::classify(8, 10), SharingClass::High);
        assert_eq!(SharingClass::classify(8, 24), SharingClass::Some);
        assert_eq!(SharingClass::classify(8, 231), SharingClass::None);
        for c in [SharingClass::High, SharingClass::Some, SharingClass::None] {
            assert_eq!(SharingClass::from_name(c.name()), Some(c));
        }
    }

    #[test]
    fn empty_circuit() {
        let mut m = Manager::new(3, Config::small());
        let r = simulate(&mut m, &Circuit::new(3)).unwrap();
        assert_eq!(r.state, m.zero_state().unwrap());
        assert_eq!(r.l2_norm, 1.0);
        assert_eq!((r.final_nodes, r.gates), (3, 0));
        assert!(matches!(simulate(&mut m, &Circuit::new(2)), Err(DdError::QubitCountMismatch(2, 3))));
    }

    #[test]
    fn deterministic_state_samples() {
        let m = Manager::new(2, Config::small());
        let s = m.basis_state(0b01).unwrap();
        let h = sample(&m, s, 100, 7).unwrap();
        assert_eq!(h.len(), 1);
        assert_eq!(h["01"], 100);
        assert_eq!(sample(&m, Edge::ZERO, 1, 0), Err(DdError::ZeroState));
    }
}

//! Deciding `U = c·V` for two circuits.

use std::fmt;
use std::str::FromStr;
use std::time::{Duration, Instant};

use evdd_qasm::Circuit;
use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{DdError, Result};
use crate::gates::Pauli;
use crate::manager::Manager;
use crate::node_store::Edge;

/// Largest `|c - 1|` accepted from a Pauli conjugation comparison.
pub const PAULI_FACTOR_TOLERANCE: f64 = 1e-6;

/// Relative Frobenius distance under which two DDs on distinct nodes still
/// count as equal.
pub const NUMERIC_TOLERANCE: f64 = 1e-9;

#[derive(Clone, Copy, PartialEq, Eq, Debug, Default)]
pub enum Algorithm {
    #[default]
    Alternating,
    Pauli,
}

impl FromStr for Algorithm {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s.to_ascii_lowercase().as_str() {
            "alternating" => Ok(Algorithm::Alternating),
            "pauli" => Ok(Algorithm::Pauli),
            _ => Err(format!("unknown algorithm `{s}` (alternating, pauli)")),
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Algorithm::Alternating => "alternating",
            Algorithm::Pauli => "pauli",
        })
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct EqStats {
    /// Largest intermediate DD.
    pub peak_nodes: usize,
    /// Matrix products performed.
    pub steps: usize,
    pub wall_time: Duration,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Verdict {
    pub equivalent: bool,
    /// `c` with `U = c·V`, present iff equivalent.
    pub factor: Option<Complex64>,
    /// First discrepancy found, present iff not equivalent.
    pub witness: Option<String>,
    pub stats: EqStats,
}

impl Verdict {
    fn equal(factor: Complex64, stats: EqStats) -> Self {
        Verdict {
            equivalent: true,
            factor: Some(factor),
            witness: None,
            stats,
        }
    }

    fn differ(witness: String, stats: EqStats) -> Self {
        Verdict {
            equivalent: false,
            factor: None,
            witness: Some(witness),
            stats,
        }
    }
}

fn check_sizes(mgr: &Manager, u: &Circuit, v: &Circuit) -> Result<()> {
    if u.num_qubits != v.num_qubits {
        return Err(DdError::QubitCountMismatch(u.num_qubits, v.num_qubits));
    }
    if u.num_qubits != mgr.num_qubits() {
        return Err(DdError::QubitCountMismatch(u.num_qubits, mgr.num_qubits()));
    }
    Ok(())
}

pub fn check(mgr: &mut Manager, u: &Circuit, v: &Circuit, algorithm: Algorithm) -> Result<Verdict> {
    match algorithm {
        Algorithm::Alternating => check_alternating(mgr, u, v),
        Algorithm::Pauli => check_pauli(mgr, u, v, &PauliOptions::default()),
    }
}

/// How many gates of the longer circuit go with each gate of the shorter
/// one: `long / short` each, plus one more for the first `long % short`.
pub fn alternating_schedule(long: usize, short: usize) -> Vec<usize> {
    if short == 0 {
        return Vec::new();
    }
    (0..short)
        .map(|i| long / short + usize::from(i < long % short))
        .collect()
}

/// Build `U·V†` from the inside out, starting at the identity, and compare
/// the result with the identity.
///
/// Left multiplications by gates of `U` and right multiplications by
/// adjoints of gates of `V` are interleaved in proportion to the two gate
/// counts, so that equal circuits keep the product at the identity.
pub fn check_alternating(mgr: &mut Manager, u: &Circuit, v: &Circuit) -> Result<Verdict> {
    check_sizes(mgr, u, v)?;
    let start = Instant::now();
    let id = mgr.identity_dd()?;
    let mut acc = id;
    let mut stats = EqStats::default();
    let (m, l) = (u.ops.len(), v.ops.len());
    // (from U?, gate index) in application order
    let mut order = Vec::with_capacity(m + l);
    if m >= l {
        let mut ui = 0;
        for (vi, k) in alternating_schedule(m, l).into_iter().enumerate() {
            order.extend((ui..ui + k).map(|i| (true, i)));
            ui += k;
            order.push((false, vi));
        }
        order.extend((ui..m).map(|i| (true, i)));
    } else {
        let mut vi = 0;
        for (ui, k) in alternating_schedule(l, m).into_iter().enumerate() {
            order.push((true, ui));
            order.extend((vi..vi + k).map(|i| (false, i)));
            vi += k;
        }
    }
    for (from_u, i) in order {
        acc = if from_u {
            let g = mgr.build_gate_dd(&u.ops[i])?;
            mgr.mat_mat(g, acc)?
        } else {
            let g = mgr.build_gate_dd(&v.ops[i])?;
            let gd = mgr.dagger(g)?;
            mgr.mat_mat(acc, gd)?
        };
        stats.steps += 1;
        stats.peak_nodes = stats.peak_nodes.max(mgr.node_count(&[acc]));
        if mgr.wants_gc() {
            let mut roots = [acc];
            mgr.collect_garbage(&mut roots);
            acc = roots[0];
        }
    }
    let id = mgr.identity_dd()?;
    stats.wall_time = start.elapsed();
    Ok(match mgr.approx_factor(acc, id, true, NUMERIC_TOLERANCE)? {
        Some(c) if c.norm() > 0.0 => Verdict::equal(c, stats),
        _ => Verdict::differ("final product not ∝ I".into(), stats),
    })
}

#[derive(Debug, Clone, Default)]
pub struct PauliOptions {
    /// Run the `2n` conjugation checks as parallel tasks.
    pub parallel: bool,
    /// Check `X_0, Z_0, X_1, ...` instead of all `X_j` before all `Z_j`.
    pub interleave: bool,
}

fn conjugate(mgr: &Manager, c: &Circuit, p: Pauli, j: usize, stats: &mut EqStats) -> Result<Edge> {
    let mut m = mgr.pauli_dd(p, j)?;
    for g in &c.ops {
        let gd = mgr.build_gate_dd(g)?;
        m = mgr.mat_mat(mgr.mat_mat(gd, m)?, mgr.dagger(gd)?)?;
        stats.steps += 2;
        stats.peak_nodes = stats.peak_nodes.max(mgr.node_count(&[m]));
    }
    Ok(m)
}

fn pauli_pair(mgr: &Manager, u: &Circuit, v: &Circuit, p: Pauli, j: usize) -> Result<(bool, EqStats)> {
    let mut stats = EqStats::default();
    let a = conjugate(mgr, u, p, j, &mut stats)?;
    let b = conjugate(mgr, v, p, j, &mut stats)?;
    let c = mgr.approx_factor(a, b, true, NUMERIC_TOLERANCE)?;
    let ok = matches!(c, Some(c) if (c - 1.0).norm() < PAULI_FACTOR_TOLERANCE);
    Ok((ok, stats))
}

/// Compare `U P_j U†` with `V P_j V†` for `P ∈ {X, Z}` and every qubit `j`.
///
/// Conjugation cancels any global factor, so each pair must agree with
/// factor 1. When all pairs agree, the factor between `U` and `V` is read off
/// `U|0...0> = c·V|0...0>`.
pub fn check_pauli(mgr: &Manager, u: &Circuit, v: &Circuit, opts: &PauliOptions) -> Result<Verdict> {
    check_sizes(mgr, u, v)?;
    let start = Instant::now();
    let n = mgr.num_qubits();
    let checks: Vec<(Pauli, usize)> = if opts.interleave {
        (0..n).flat_map(|j| [(Pauli::X, j), (Pauli::Z, j)]).collect()
    } else {
        [Pauli::X, Pauli::Z]
            .into_iter()
            .flat_map(|p| (0..n).map(move |j| (p, j)))
            .collect()
    };
    let mut stats = EqStats::default();
    let merge = |stats: &mut EqStats, s: &EqStats| {
        stats.steps += s.steps;
        stats.peak_nodes = stats.peak_nodes.max(s.peak_nodes);
    };
    let mismatch = |p: Pauli, j: usize| format!("Pauli check {p:?}_{j} mismatch");
    if opts.parallel {
        let results: Vec<Result<(bool, EqStats)>> = mgr.run(|| {
            checks
                .par_iter()
                .map(|&(p, j)| pauli_pair(mgr, u, v, p, j))
                .collect()
        });
        for (&(p, j), r) in checks.iter().zip(results) {
            let (ok, s) = r?;
            merge(&mut stats, &s);
            if !ok {
                stats.wall_time = start.elapsed();
                return Ok(Verdict::differ(mismatch(p, j), stats));
            }
        }
    } else {
        for &(p, j) in &checks {
            let (ok, s) = pauli_pair(mgr, u, v, p, j)?;
            merge(&mut stats, &s);
            if !ok {
                stats.wall_time = start.elapsed();
                return Ok(Verdict::differ(mismatch(p, j), stats));
            }
        }
    }
    let su = run_on_zero(mgr, u)?;
    let sv = run_on_zero(mgr, v)?;
    stats.wall_time = start.elapsed();
    Ok(match mgr.approx_factor(su, sv, false, NUMERIC_TOLERANCE)? {
        Some(c) if c.norm() > 0.0 => Verdict::equal(c, stats),
        _ => Verdict::differ("states from |0...0> differ".into(), stats),
    })
}

fn run_on_zero(mgr: &Manager, c: &Circuit) -> Result<Edge> {
    let mut s = mgr.zero_state()?;
    for g in &c.ops {
        s = mgr.mat_vec(mgr.build_gate_dd(g)?, s)?;
    }
    Ok(s)
}

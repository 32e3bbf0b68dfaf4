//! Matrix DDs for gates.
//!
//! A gate with controls `C` and a single-qubit operator `U` on target `t` is
//! `I + P1(C) ⊗ (U - I)(t)`, where `P1 = |1><1|`. Each term is a Kronecker
//! product of `2x2` blocks and is built bottom-up in one pass; the terms are
//! then summed.

use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2};

use evdd_qasm::{GateKind, GateSpec, GateSpecError, TargetOp};
use num_complex::Complex64;

use crate::error::{DdError, Result};
use crate::manager::Manager;
use crate::node_store::Edge;

pub type Mat2 = [[Complex64; 2]; 2];

const O: Complex64 = Complex64::new(0.0, 0.0);
const L: Complex64 = Complex64::new(1.0, 0.0);
const I: Complex64 = Complex64::new(0.0, 1.0);

pub const IDENTITY: Mat2 = [[L, O], [O, L]];
const P1: Mat2 = [[O, O], [O, L]];

fn e(theta: f64) -> Complex64 {
    Complex64::from_polar(1.0, theta)
}

/// `U3(θ, φ, λ)`
///
/// ```
/// use evdd::gates::u3_matrix;
/// use std::f64::consts::PI;
///
/// let x = u3_matrix(PI, 0.0, PI);
/// assert!((x[0][1].re - 1.0).abs() < 1e-15 && x[0][0].norm() < 1e-15);
/// ```
pub fn u3_matrix(theta: f64, phi: f64, lam: f64) -> Mat2 {
    let (s, c) = (theta / 2.0).sin_cos();
    [
        [Complex64::new(c, 0.0), -e(lam) * s],
        [e(phi) * s, e(phi + lam) * c],
    ]
}

/// The `2x2` operator a gate applies to its (single) target.
pub fn gate_matrix(kind: GateKind, params: &[f64]) -> Mat2 {
    use GateKind::*;
    let h = Complex64::new(FRAC_1_SQRT_2, 0.0);
    let half = |a: f64, b: f64| Complex64::new(a, b);
    match kind {
        U3 | Cu3 => u3_matrix(params[0], params[1], params[2]),
        U2 => u3_matrix(FRAC_PI_2, params[0], params[1]),
        U1 | P | Cu1 | Cp => [[L, O], [O, e(params[0])]],
        Id => IDENTITY,
        X | Cx | Ccx => [[O, L], [L, O]],
        Y | Cy => [[O, -I], [I, O]],
        Z | Cz => [[L, O], [O, -L]],
        H | Ch => [[h, h], [h, -h]],
        S => [[L, O], [O, I]],
        Sdg => [[L, O], [O, -I]],
        T => [[L, O], [O, e(std::f64::consts::FRAC_PI_4)]],
        Tdg => [[L, O], [O, e(-std::f64::consts::FRAC_PI_4)]],
        Sx | Csx => [[half(0.5, 0.5), half(0.5, -0.5)], [half(0.5, -0.5), half(0.5, 0.5)]],
        Sxdg => [[half(0.5, -0.5), half(0.5, 0.5)], [half(0.5, 0.5), half(0.5, -0.5)]],
        Rx | Crx => {
            let (s, c) = (params[0] / 2.0).sin_cos();
            [[half(c, 0.0), half(0.0, -s)], [half(0.0, -s), half(c, 0.0)]]
        }
        Ry | Cry => {
            let (s, c) = (params[0] / 2.0).sin_cos();
            [[half(c, 0.0), half(-s, 0.0)], [half(s, 0.0), half(c, 0.0)]]
        }
        Rz | Crz => [[e(-params[0] / 2.0), O], [O, e(params[0] / 2.0)]],
        Swap | Cswap => panic!("`{kind}` acts on two targets"),
    }
}

/// Pauli operator used by the conjugation equivalence check.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Pauli {
    X,
    Z,
}

fn outer(a: usize, b: usize) -> Mat2 {
    let mut m = [[O; 2]; 2];
    m[a][b] = L;
    m
}

fn spec_error(e: GateSpecError, n: usize) -> DdError {
    match e {
        GateSpecError::QubitOutOfRange { qubit, .. } => DdError::QubitOutOfRange { qubit, n },
        other => DdError::ArityMismatch(other.to_string()),
    }
}

impl Manager {
    /// Kronecker product of one block per qubit; `None` is the identity.
    pub fn product_dd(&self, blocks: &[Option<Mat2>]) -> Result<Edge> {
        let n = self.num_qubits();
        if blocks.len() != n {
            return Err(DdError::LengthMismatch {
                expected: n,
                found: blocks.len(),
            });
        }
        let mut acc = Edge::ONE;
        for q in (0..n).rev() {
            let b = blocks[q].unwrap_or(IDENTITY);
            let mut rows = [Edge::ZERO; 2];
            for (r, slot) in rows.iter_mut().enumerate() {
                let lo = self.scale_by(acc, b[r][0])?;
                let hi = self.scale_by(acc, b[r][1])?;
                *slot = self.make_node(2 * q as u32 + 1, lo, hi)?;
            }
            acc = self.make_node(2 * q as u32, rows[0], rows[1])?;
        }
        Ok(acc)
    }

    /// The identity on all qubits, built once per manager.
    pub fn identity_dd(&self) -> Result<Edge> {
        if let Some(&id) = self.identity.get() {
            return Ok(id);
        }
        let id = self.product_dd(&vec![None; self.num_qubits()])?;
        Ok(*self.identity.get_or_init(|| id))
    }

    /// Whether `m` is a nonzero multiple of the identity. One edge comparison.
    pub fn is_identity(&self, m: Edge) -> Result<bool> {
        Ok(!m.is_zero() && m.target == self.identity_dd()?.target)
    }

    /// `I ⊗ ... ⊗ P ⊗ ... ⊗ I` with `P` on qubit `j`.
    pub fn pauli_dd(&self, which: Pauli, j: usize) -> Result<Edge> {
        let kind = match which {
            Pauli::X => GateKind::X,
            Pauli::Z => GateKind::Z,
        };
        let g = GateSpec::new(kind, vec![], &[j]).map_err(|e| spec_error(e, self.num_qubits()))?;
        self.build_gate_dd(&g)
    }

    /// Matrix DD of a gate on this manager's register. Memoized per gate.
    pub fn build_gate_dd(&self, g: &GateSpec) -> Result<Edge> {
        let n = self.num_qubits();
        g.validate(n).map_err(|e| spec_error(e, n))?;
        let key = (
            g.kind,
            g.params.iter().map(|p| p.to_bits()).collect(),
            g.controls.clone(),
            g.targets.clone(),
        );
        if let Some(&e) = self.memo().get(&key) {
            return Ok(e);
        }
        let built = self.run(|| self.gate_terms(g))?;
        Ok(*self.memo().entry(key).or_insert(built))
    }

    fn memo(&self) -> std::sync::MutexGuard<'_, std::collections::HashMap<crate::manager::GateKey, Edge>> {
        self.gate_memo.lock().unwrap_or_else(|e| e.into_inner())
    }

    fn gate_terms(&self, g: &GateSpec) -> Result<Edge> {
        let n = self.num_qubits();
        let mut base = vec![None; n];
        for &c in &g.controls {
            base[c] = Some(P1);
        }
        let controlled = !g.controls.is_empty();
        let mut terms: Vec<(Complex64, Vec<Option<Mat2>>)> = Vec::new();
        match g.kind.target_op() {
            TargetOp::Single(_) => {
                let u = gate_matrix(g.kind, &g.params);
                let mut blocks = base.clone();
                if controlled {
                    let mut d = u;
                    d[0][0] -= L;
                    d[1][1] -= L;
                    blocks[g.targets[0]] = Some(d);
                    terms.push((L, blocks));
                } else {
                    blocks[g.targets[0]] = Some(u);
                    return self.product_dd(&blocks);
                }
            }
            TargetOp::Swap => {
                let (t1, t2) = (g.targets[0], g.targets[1]);
                for a in 0..2 {
                    for b in 0..2 {
                        let mut blocks = base.clone();
                        blocks[t1] = Some(outer(a, b));
                        blocks[t2] = Some(outer(b, a));
                        terms.push((L, blocks));
                    }
                }
                if controlled {
                    terms.push((-L, base.clone()));
                } else {
                    let mut acc = Edge::ZERO;
                    for (_, blocks) in terms {
                        acc = self.plus_mat(acc, self.product_dd(&blocks)?)?;
                    }
                    return Ok(acc);
                }
            }
        }
        let mut acc = self.identity_dd()?;
        for (coef, blocks) in terms {
            let t = self.scale_by(self.product_dd(&blocks)?, coef)?;
            acc = self.plus_mat(acc, t)?;
        }
        Ok(acc)
    }
}

//! Dense reference implementation of circuit semantics.
//!
//! Everything here is deliberately naive: gates become explicit
//! `2^n x 2^n` matrices assembled from Kronecker products of `2x2` blocks,
//! and states are plain amplitude vectors. Nothing in this crate touches
//! decision diagrams, so agreement between the two is meaningful.
//!
//! Qubit 0 is the most significant bit of a basis index.

use std::f64::consts::FRAC_1_SQRT_2;

use evdd_qasm::{Circuit, GateKind, GateSpec, TargetOp};
use num_complex::Complex64;

pub type C = Complex64;

/// Largest register [`dense_simulate`] accepts.
pub const MAX_SIM_QUBITS: usize = 10;
/// Largest register [`dense_equiv`] accepts.
pub const MAX_EQUIV_QUBITS: usize = 6;
/// Per-entry tolerance of [`dense_equiv`].
pub const EQUIV_TOLERANCE: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum OracleError {
    #[error("TooManyQubits: {found} qubits exceeds the dense limit of {limit}")]
    TooManyQubits { found: usize, limit: usize },
}

type Mat2 = [[C; 2]; 2];

const ZERO: C = C::new(0.0, 0.0);
const ONE: C = C::new(1.0, 0.0);
const I: C = C::new(0.0, 1.0);

fn c(re: f64, im: f64) -> C {
    C::new(re, im)
}

fn phase(theta: f64) -> C {
    C::from_polar(1.0, theta)
}

/// The `2x2` matrix an uncontrolled gate kind applies.
pub fn single_qubit_matrix(kind: GateKind, p: &[f64]) -> Mat2 {
    use GateKind::*;
    let h = FRAC_1_SQRT_2;
    match kind {
        U3 => {
            let (t, ph, l) = (p[0], p[1], p[2]);
            let (s, co) = ((t / 2.0).sin(), (t / 2.0).cos());
            [
                [c(co, 0.0), -phase(l) * s],
                [phase(ph) * s, phase(ph + l) * co],
            ]
        }
        U2 => single_qubit_matrix(U3, &[std::f64::consts::FRAC_PI_2, p[0], p[1]]),
        U1 | P => [[ONE, ZERO], [ZERO, phase(p[0])]],
        Id => [[ONE, ZERO], [ZERO, ONE]],
        X => [[ZERO, ONE], [ONE, ZERO]],
        Y => [[ZERO, -I], [I, ZERO]],
        Z => [[ONE, ZERO], [ZERO, -ONE]],
        H => [[c(h, 0.0), c(h, 0.0)], [c(h, 0.0), c(-h, 0.0)]],
        S => [[ONE, ZERO], [ZERO, I]],
        Sdg => [[ONE, ZERO], [ZERO, -I]],
        T => [[ONE, ZERO], [ZERO, c(h, h)]],
        Tdg => [[ONE, ZERO], [ZERO, c(h, -h)]],
        Sx => [[c(0.5, 0.5), c(0.5, -0.5)], [c(0.5, -0.5), c(0.5, 0.5)]],
        Sxdg => [[c(0.5, -0.5), c(0.5, 0.5)], [c(0.5, 0.5), c(0.5, -0.5)]],
        Rx => {
            let (s, co) = ((p[0] / 2.0).sin(), (p[0] / 2.0).cos());
            [[c(co, 0.0), c(0.0, -s)], [c(0.0, -s), c(co, 0.0)]]
        }
        Ry => {
            let (s, co) = ((p[0] / 2.0).sin(), (p[0] / 2.0).cos());
            [[c(co, 0.0), c(-s, 0.0)], [c(s, 0.0), c(co, 0.0)]]
        }
        Rz => [[phase(-p[0] / 2.0), ZERO], [ZERO, phase(p[0] / 2.0)]],
        other => match other.target_op() {
            TargetOp::Single(base) if base != other => single_qubit_matrix(base, p),
            _ => panic!("`{other}` has no single-qubit matrix"),
        },
    }
}

/// Dense complex matrix, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseMatrix {
    pub dim: usize,
    pub data: Vec<C>,
}

impl DenseMatrix {
    pub fn identity(dim: usize) -> Self {
        let mut data = vec![ZERO; dim * dim];
        for i in 0..dim {
            data[i * dim + i] = ONE;
        }
        DenseMatrix { dim, data }
    }

    pub fn get(&self, row: usize, col: usize) -> C {
        self.data[row * self.dim + col]
    }

    pub fn matmul(&self, rhs: &DenseMatrix) -> DenseMatrix {
        let d = self.dim;
        let mut data = vec![ZERO; d * d];
        for i in 0..d {
            for k in 0..d {
                let a = self.data[i * d + k];
                if a == ZERO {
                    continue;
                }
                for j in 0..d {
                    data[i * d + j] += a * rhs.data[k * d + j];
                }
            }
        }
        DenseMatrix { dim: d, data }
    }

    pub fn apply(&self, v: &[C]) -> Vec<C> {
        let d = self.dim;
        (0..d)
            .map(|i| (0..d).map(|k| self.data[i * d + k] * v[k]).sum())
            .collect()
    }

    pub fn adjoint(&self) -> DenseMatrix {
        let d = self.dim;
        let mut data = vec![ZERO; d * d];
        for i in 0..d {
            for j in 0..d {
                data[j * d + i] = self.data[i * d + j].conj();
            }
        }
        DenseMatrix { dim: d, data }
    }

    fn add_scaled(&mut self, coef: C, other: &DenseMatrix) {
        for (a, b) in self.data.iter_mut().zip(&other.data) {
            *a += coef * b;
        }
    }
}

/// Kronecker product `blocks[0] ⊗ blocks[1] ⊗ ...`.
pub fn kron(blocks: &[Mat2]) -> DenseMatrix {
    let mut acc = DenseMatrix {
        dim: 1,
        data: vec![ONE],
    };
    for b in blocks {
        let d = acc.dim;
        let nd = 2 * d;
        let mut data = vec![ZERO; nd * nd];
        for i in 0..d {
            for j in 0..d {
                let a = acc.data[i * d + j];
                if a == ZERO {
                    continue;
                }
                for (r, row) in b.iter().enumerate() {
                    for (s, e) in row.iter().enumerate() {
                        data[(i * 2 + r) * nd + (j * 2 + s)] = a * e;
                    }
                }
            }
        }
        acc = DenseMatrix { dim: nd, data };
    }
    acc
}

fn projector(bit: usize) -> Mat2 {
    let mut m = [[ZERO; 2]; 2];
    m[bit][bit] = ONE;
    m
}

fn outer(a: usize, b: usize) -> Mat2 {
    let mut m = [[ZERO; 2]; 2];
    m[a][b] = ONE;
    m
}

fn minus_identity(m: Mat2) -> Mat2 {
    [[m[0][0] - ONE, m[0][1]], [m[1][0], m[1][1] - ONE]]
}

/// The full `2^n x 2^n` matrix of one gate:
/// `I + P1(controls) ⊗ (G - I)(targets)`.
pub fn dense_gate(n: usize, gate: &GateSpec) -> DenseMatrix {
    let eye = [[ONE, ZERO], [ZERO, ONE]];
    let mut base = vec![eye; n];
    for &q in &gate.controls {
        base[q] = projector(1);
    }
    // (G - I) on the targets, as a sum of Kronecker terms.
    let mut terms: Vec<(C, Vec<Mat2>)> = Vec::new();
    match gate.kind.target_op() {
        TargetOp::Single(kind) => {
            let mut blocks = base.clone();
            blocks[gate.targets[0]] = minus_identity(single_qubit_matrix(kind, &gate.params));
            terms.push((ONE, blocks));
        }
        TargetOp::Swap => {
            let (t1, t2) = (gate.targets[0], gate.targets[1]);
            for a in 0..2 {
                for b in 0..2 {
                    let mut swap = base.clone();
                    swap[t1] = outer(a, b);
                    swap[t2] = outer(b, a);
                    terms.push((ONE, swap));
                    let mut id = base.clone();
                    id[t1] = outer(a, a);
                    id[t2] = outer(b, b);
                    terms.push((-ONE, id));
                }
            }
        }
    }
    let mut m = DenseMatrix::identity(1 << n);
    for (coef, blocks) in terms {
        m.add_scaled(coef, &kron(&blocks));
    }
    m
}

/// A dense state vector.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseState {
    pub amplitudes: Vec<C>,
}

impl DenseState {
    pub fn zero_state(n: usize) -> Self {
        let mut amplitudes = vec![ZERO; 1 << n];
        amplitudes[0] = ONE;
        DenseState { amplitudes }
    }

    pub fn num_qubits(&self) -> usize {
        self.amplitudes.len().trailing_zeros() as usize
    }

    pub fn norm_squared(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum()
    }
}

/// Apply every gate of `circuit` to `|0...0>` by dense matrix-vector products.
pub fn dense_simulate(circuit: &Circuit) -> Result<DenseState, OracleError> {
    let n = circuit.num_qubits;
    if n > MAX_SIM_QUBITS {
        return Err(OracleError::TooManyQubits {
            found: n,
            limit: MAX_SIM_QUBITS,
        });
    }
    let mut state = DenseState::zero_state(n);
    for gate in &circuit.ops {
        state.amplitudes = dense_gate(n, gate).apply(&state.amplitudes);
    }
    Ok(state)
}

/// The product of all gate matrices, last gate leftmost.
pub fn dense_unitary(circuit: &Circuit) -> Result<DenseMatrix, OracleError> {
    let n = circuit.num_qubits;
    if n > MAX_SIM_QUBITS {
        return Err(OracleError::TooManyQubits {
            found: n,
            limit: MAX_SIM_QUBITS,
        });
    }
    let mut u = DenseMatrix::identity(1 << n);
    for gate in &circuit.ops {
        u = dense_gate(n, gate).matmul(&u);
    }
    Ok(u)
}

/// Outcome of [`dense_equiv`].
#[derive(Debug, Clone, PartialEq)]
pub struct DenseVerdict {
    pub equivalent: bool,
    /// `c` with `U ≈ c V`, when one could be estimated.
    pub factor: Option<C>,
    pub max_deviation: f64,
}

/// Decide whether `U = c V` for some `c` by building both unitaries.
///
/// `c` is estimated from the largest-modulus entry of `V`.
pub fn dense_equiv(u: &Circuit, v: &Circuit) -> Result<DenseVerdict, OracleError> {
    for c in [u, v] {
        if c.num_qubits > MAX_EQUIV_QUBITS {
            return Err(OracleError::TooManyQubits {
                found: c.num_qubits,
                limit: MAX_EQUIV_QUBITS,
            });
        }
    }
    if u.num_qubits != v.num_qubits {
        return Ok(DenseVerdict {
            equivalent: false,
            factor: None,
            max_deviation: f64::INFINITY,
        });
    }
    let mu = dense_unitary(u)?;
    let mv = dense_unitary(v)?;
    Ok(compare_up_to_factor(&mu, &mv, EQUIV_TOLERANCE))
}

/// `∃c: a ≈ c·b` with max per-entry deviation below `tol`.
pub fn compare_up_to_factor(a: &DenseMatrix, b: &DenseMatrix, tol: f64) -> DenseVerdict {
    let (idx, pivot) = b
        .data
        .iter()
        .enumerate()
        .max_by(|x, y| x.1.norm().total_cmp(&y.1.norm()))
        .map(|(i, v)| (i, *v))
        .unwrap_or((0, ZERO));
    if pivot.norm() == 0.0 {
        let dev = a.data.iter().map(|x| x.norm()).fold(0.0, f64::max);
        return DenseVerdict {
            equivalent: dev < tol,
            factor: None,
            max_deviation: dev,
        };
    }
    let factor = a.data[idx] / pivot;
    let dev = a
        .data
        .iter()
        .zip(&b.data)
        .map(|(x, y)| (x - factor * y).norm())
        .fold(0.0, f64::max);
    DenseVerdict {
        equivalent: dev < tol && factor.norm() > 0.0,
        factor: Some(factor),
        max_deviation: dev,
    }
}

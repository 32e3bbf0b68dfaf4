//! Circuit representation produced by the parser.

use std::fmt;
use std::fmt::Write as _;

/// The primitive gates understood natively by the simulator.
///
/// Every other gate is expanded through its definition (in `qelib1.inc` or
/// in the source program) until only these remain.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum GateKind {
    U3,
    U2,
    U1,
    P,
    Id,
    X,
    Y,
    Z,
    H,
    S,
    Sdg,
    T,
    Tdg,
    Sx,
    Sxdg,
    Rx,
    Ry,
    Rz,
    Cx,
    Cy,
    Cz,
    Ch,
    Csx,
    Crx,
    Cry,
    Crz,
    Cu1,
    Cp,
    Cu3,
    Ccx,
    Swap,
    Cswap,
}

/// What a gate does to its target qubits once all controls are 1.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TargetOp {
    /// A single-qubit gate, identified by the uncontrolled kind that carries
    /// its matrix (e.g. `Crz` acts as `Rz` on its target).
    Single(GateKind),
    /// Exchange of two target qubits.
    Swap,
}

impl GateKind {
    pub const ALL: [GateKind; 32] = [
        GateKind::U3,
        GateKind::U2,
        GateKind::U1,
        GateKind::P,
        GateKind::Id,
        GateKind::X,
        GateKind::Y,
        GateKind::Z,
        GateKind::H,
        GateKind::S,
        GateKind::Sdg,
        GateKind::T,
        GateKind::Tdg,
        GateKind::Sx,
        GateKind::Sxdg,
        GateKind::Rx,
        GateKind::Ry,
        GateKind::Rz,
        GateKind::Cx,
        GateKind::Cy,
        GateKind::Cz,
        GateKind::Ch,
        GateKind::Csx,
        GateKind::Crx,
        GateKind::Cry,
        GateKind::Crz,
        GateKind::Cu1,
        GateKind::Cp,
        GateKind::Cu3,
        GateKind::Ccx,
        GateKind::Swap,
        GateKind::Cswap,
    ];

    /// The `qelib1.inc` name of the gate.
    pub fn name(self) -> &'static str {
        use GateKind::*;
        match self {
            U3 => "u3",
            U2 => "u2",
            U1 => "u1",
            P => "p",
            Id => "id",
            X => "x",
            Y => "y",
            Z => "z",
            H => "h",
            S => "s",
            Sdg => "sdg",
            T => "t",
            Tdg => "tdg",
            Sx => "sx",
            Sxdg => "sxdg",
            Rx => "rx",
            Ry => "ry",
            Rz => "rz",
            Cx => "cx",
            Cy => "cy",
            Cz => "cz",
            Ch => "ch",
            Csx => "csx",
            Crx => "crx",
            Cry => "cry",
            Crz => "crz",
            Cu1 => "cu1",
            Cp => "cp",
            Cu3 => "cu3",
            Ccx => "ccx",
            Swap => "swap",
            Cswap => "cswap",
        }
    }

    pub fn from_name(name: &str) -> Option<GateKind> {
        GateKind::ALL.into_iter().find(|k| k.name() == name)
    }

    /// Number of real parameters.
    pub fn num_params(self) -> usize {
        use GateKind::*;
        match self {
            U3 | Cu3 => 3,
            U2 => 2,
            U1 | P | Rx | Ry | Rz | Crx | Cry | Crz | Cu1 | Cp => 1,
            _ => 0,
        }
    }

    pub fn num_controls(self) -> usize {
        use GateKind::*;
        match self {
            Cx | Cy | Cz | Ch | Csx | Crx | Cry | Crz | Cu1 | Cp | Cu3 | Cswap => 1,
            Ccx => 2,
            _ => 0,
        }
    }

    pub fn num_targets(self) -> usize {
        match self {
            GateKind::Swap | GateKind::Cswap => 2,
            _ => 1,
        }
    }

    pub fn num_qubits(self) -> usize {
        self.num_controls() + self.num_targets()
    }

    /// The operation applied to the targets when every control is set.
    pub fn target_op(self) -> TargetOp {
        use GateKind::*;
        match self {
            Cx | Ccx => TargetOp::Single(X),
            Cy => TargetOp::Single(Y),
            Cz => TargetOp::Single(Z),
            Ch => TargetOp::Single(H),
            Csx => TargetOp::Single(Sx),
            Crx => TargetOp::Single(Rx),
            Cry => TargetOp::Single(Ry),
            Crz => TargetOp::Single(Rz),
            Cu1 => TargetOp::Single(U1),
            Cp => TargetOp::Single(P),
            Cu3 => TargetOp::Single(U3),
            Swap | Cswap => TargetOp::Swap,
            k => TargetOp::Single(k),
        }
    }
}

impl fmt::Display for GateKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// One gate application: kind, angles (radians), and the qubits it acts on.
#[derive(Debug, Clone, PartialEq)]
pub struct GateSpec {
    pub kind: GateKind,
    pub params: Vec<f64>,
    pub controls: Vec<usize>,
    pub targets: Vec<usize>,
}

/// Violations of the [`GateSpec`] invariants.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum GateSpecError {
    #[error("gate `{kind}` expects {expected} parameter(s), got {found}")]
    ParamArity {
        kind: GateKind,
        expected: usize,
        found: usize,
    },
    #[error("gate `{kind}` expects {expected} qubit(s), got {found}")]
    QubitArity {
        kind: GateKind,
        expected: usize,
        found: usize,
    },
    #[error("qubit {qubit} out of range for {num_qubits} qubit(s)")]
    QubitOutOfRange { qubit: usize, num_qubits: usize },
    #[error("qubit {0} used more than once in one gate")]
    DuplicateQubit(usize),
}

impl GateSpec {
    /// Build a gate from its kind and the qubit operands in `qelib1` order
    /// (controls first, then targets).
    pub fn new(kind: GateKind, params: Vec<f64>, qubits: &[usize]) -> Result<Self, GateSpecError> {
        if params.len() != kind.num_params() {
            return Err(GateSpecError::ParamArity {
                kind,
                expected: kind.num_params(),
                found: params.len(),
            });
        }
        if qubits.len() != kind.num_qubits() {
            return Err(GateSpecError::QubitArity {
                kind,
                expected: kind.num_qubits(),
                found: qubits.len(),
            });
        }
        for (i, q) in qubits.iter().enumerate() {
            if qubits[..i].contains(q) {
                return Err(GateSpecError::DuplicateQubit(*q));
            }
        }
        let (controls, targets) = qubits.split_at(kind.num_controls());
        Ok(GateSpec {
            kind,
            params,
            controls: controls.to_vec(),
            targets: targets.to_vec(),
        })
    }

    /// Operands in `qelib1` order.
    pub fn qubits(&self) -> impl Iterator<Item = usize> + '_ {
        self.controls.iter().chain(&self.targets).copied()
    }

    /// Check all invariants against a register of `num_qubits` qubits.
    pub fn validate(&self, num_qubits: usize) -> Result<(), GateSpecError> {
        let qubits: Vec<usize> = self.qubits().collect();
        if self.params.len() != self.kind.num_params() {
            return Err(GateSpecError::ParamArity {
                kind: self.kind,
                expected: self.kind.num_params(),
                found: self.params.len(),
            });
        }
        if self.targets.len() != self.kind.num_targets() || qubits.len() != self.kind.num_qubits()
        {
            return Err(GateSpecError::QubitArity {
                kind: self.kind,
                expected: self.kind.num_qubits(),
                found: qubits.len(),
            });
        }
        for (i, &q) in qubits.iter().enumerate() {
            if q >= num_qubits {
                return Err(GateSpecError::QubitOutOfRange { qubit: q, num_qubits });
            }
            if qubits[..i].contains(&q) {
                return Err(GateSpecError::DuplicateQubit(q));
            }
        }
        Ok(())
    }
}

impl fmt::Display for GateSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.kind.name())?;
        if !self.params.is_empty() {
            f.write_char('(')?;
            for (i, p) in self.params.iter().enumerate() {
                if i > 0 {
                    f.write_char(',')?;
                }
                // `{:?}` is the shortest representation that round-trips.
                write!(f, "{p:?}")?;
            }
            f.write_char(')')?;
        }
        for (i, q) in self.qubits().enumerate() {
            let sep = if i == 0 { " " } else { "," };
            write!(f, "{sep}q[{q}]")?;
        }
        Ok(())
    }
}

/// A parsed program: a flat register of `num_qubits` qubits and the gates
/// applied to it, in order.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Circuit {
    pub num_qubits: usize,
    pub num_clbits: usize,
    pub ops: Vec<GateSpec>,
    /// `(qubit, classical bit)` pairs, recorded but never executed.
    pub measurements: Vec<(usize, usize)>,
    pub source_name: String,
}

impl Circuit {
    pub fn new(num_qubits: usize) -> Self {
        Circuit {
            num_qubits,
            ..Default::default()
        }
    }

    /// Append a gate, checking it against the register size.
    pub fn push(&mut self, gate: GateSpec) -> Result<&mut Self, GateSpecError> {
        gate.validate(self.num_qubits)?;
        self.ops.push(gate);
        Ok(self)
    }

    /// Convenience wrapper around [`GateSpec::new`] + [`Circuit::push`].
    pub fn add(
        &mut self,
        kind: GateKind,
        params: &[f64],
        qubits: &[usize],
    ) -> Result<&mut Self, GateSpecError> {
        let gate = GateSpec::new(kind, params.to_vec(), qubits)?;
        self.push(gate)
    }

    pub fn len(&self) -> usize {
        self.ops.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ops.is_empty()
    }

    /// Render as Open QASM 2.0 with a single register `q` (and `c`).
    pub fn to_qasm(&self) -> String {
        let mut out = String::from("OPENQASM 2.0;\ninclude \"qelib1.inc\";\n");
        writeln!(out, "qreg q[{}];", self.num_qubits).unwrap();
        if self.num_clbits > 0 {
            writeln!(out, "creg c[{}];", self.num_clbits).unwrap();
        }
        for op in &self.ops {
            writeln!(out, "{op};").unwrap();
        }
        for (q, c) in &self.measurements {
            writeln!(out, "measure q[{q}] -> c[{c}];").unwrap();
        }
        out
    }
}

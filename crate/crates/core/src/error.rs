use std::fmt;

/// Which fixed-capacity table ran out of room.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Table {
    Value,
    Node,
}

impl fmt::Display for Table {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Table::Value => "value table",
            Table::Node => "node table",
        })
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum DdError {
    #[error("TableFull: the {table} is full (capacity {capacity}); increase its size")]
    TableFull { table: Table, capacity: usize },
    #[error("operation cancelled")]
    Cancelled,
    #[error("OrderViolation: variable {var} is not above child variable {child}")]
    OrderViolation { var: u32, child: u32 },
    #[error("DegenerateNode: both edge values are zero")]
    DegenerateNode,
    #[error("InvalidIndex: value slot {0} was never written")]
    InvalidIndex(u32),
    #[error("NonFinite: {0} is not a finite complex value")]
    NonFinite(num_complex::Complex64),
    #[error("LengthMismatch: expected {expected} entries, found {found}")]
    LengthMismatch { expected: usize, found: usize },
    #[error("invalid basis string `{0}`")]
    InvalidBasis(String),
    #[error("QubitCountMismatch: {0} vs {1} qubits")]
    QubitCountMismatch(usize, usize),
    #[error("QubitOutOfRange: qubit {qubit} on a {n}-qubit register")]
    QubitOutOfRange { qubit: usize, n: usize },
    #[error("ArityMismatch: {0}")]
    ArityMismatch(String),
    #[error("ZeroState: cannot sample from the zero vector")]
    ZeroState,
}

pub type Result<T, E = DdError> = std::result::Result<T, E>;

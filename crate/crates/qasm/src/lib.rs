//! Open QASM 2.0 front end.
//!
//! [`parse`] turns program text into a flat [`Circuit`]: every register is
//! laid out on one qubit line in declaration order, register broadcasts are
//! unrolled, and user-defined gates are expanded until only the native
//! [`GateKind`]s remain. `include "qelib1.inc"` resolves to an embedded copy
//! of the standard library.
//!
//! ```
//! use evdd_qasm::{parse, GateKind};
//!
//! let c = parse(r#"
//!     OPENQASM 2.0;
//!     include "qelib1.inc";
//!     qreg q[2];
//!     gate bell a, b { h a; cx a, b; }
//!     bell q[0], q[1];
//! "#).unwrap();
//! assert_eq!(c.num_qubits, 2);
//! assert_eq!(c.ops[0].kind, GateKind::H);
//! assert_eq!(c.ops[1].kind, GateKind::Cx);
//! ```

mod circuit;
mod error;
mod expr;
mod lexer;
mod parser;

pub use circuit::{Circuit, GateKind, GateSpec, GateSpecError, TargetOp};
pub use error::{ParseError, Pos};
pub use expr::{eval_param, BinOp, EvalError, Func, ParamExpr};
pub use parser::{parse, parse_with, ParseOptions, MAX_EXPANSION_DEPTH};

/// Parse a bare parameter expression such as `-pi/4`.
pub fn parse_expr(text: &str) -> Result<ParamExpr, ParseError> {
    parser::parse_expr(text)
}

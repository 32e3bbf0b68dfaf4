//! Parallel edge-valued decision diagrams (EVDDs) for quantum circuits.
//!
//! An EVDD stores a vector of `2^n` complex amplitudes as a DAG of binary
//! decision nodes whose edges carry complex weights; an amplitude is the
//! product of the weights along its path. Matrices use the same nodes over
//! interleaved row/column variables.
//!
//! A [`Manager`] owns the value table, the unique node table and the
//! operation cache for one register size. All DD operations take `&self`
//! and may be called from several threads; with more than one worker they
//! also fork internally.
//!
//! ```
//! use evdd::{sim, Config, Manager};
//!
//! let circuit = evdd_qasm::parse(r#"
//!     OPENQASM 2.0;
//!     include "qelib1.inc";
//!     qreg q[3];
//!     h q[0]; cx q[0], q[1]; cx q[1], q[2];
//! "#).unwrap();
//! let mut mgr = Manager::new(3, Config::small());
//! let res = sim::simulate(&mut mgr, &circuit).unwrap();
//! let a = mgr.evaluate(res.state, "111").unwrap();
//! assert!((a.re - 0.5f64.sqrt()).abs() < 1e-12);
//! assert!((res.l2_norm - 1.0).abs() < 1e-12);
//! ```

mod cache;
pub mod eqcheck;
mod error;
pub mod gates;
mod manager;
pub mod node_store;
mod ops;
pub mod sim;
pub mod value_store;

pub use error::{DdError, Result, Table};
pub use manager::{Config, Manager};
pub use node_store::{normalize, Edge, Node, NodeRef, NormStrategy};
pub use num_complex::Complex64;
pub use value_store::{values_close, ComplexValue, ValueIndex, ValueStore, DEFAULT_TOLERANCE};

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/simulation.md")]
    mod simulation {}
    #[doc = include_str!("../../../book/src/diagrams.md")]
    mod diagrams {}
    #[doc = include_str!("../../../book/src/equivalence.md")]
    mod equivalence {}
    #[doc = include_str!("../../../book/src/runtime.md")]
    mod runtime {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}

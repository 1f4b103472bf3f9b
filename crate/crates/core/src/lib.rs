//! Cut tracing for XOR-AND graph optimization.
//!
//! Cut-based MC and MD passes record every replacement they consider into a
//! shared e-graph; an HE-cost-aware extractor then picks the final circuit.

pub mod bench;
pub mod cost;
pub mod cuts;
pub mod egraph;
pub mod error;
pub mod esop;
pub mod extract;
pub mod gen;
pub mod mcdb;
pub mod netlist;
pub mod npn;
pub mod passes;
pub mod sim;
pub mod xag;

pub use error::{Error, Result};
pub use xag::{GateKind, NetworkStats, NodeId, Signal, XagNetwork};

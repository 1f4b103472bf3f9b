use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    /// A signal refers to a node that does not exist in the network.
    #[error("invalid signal: node {0} does not exist")]
    InvalidSignal(u32),

    /// Two networks (or a network and a pattern block) disagree on their interface.
    #[error("interface mismatch: {0}")]
    Interface(String),

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("line {line}: unsupported feature: {feature}")]
    Unsupported { line: usize, feature: String },

    #[error("cut size {0} out of range (2..=6)")]
    CutSize(usize),

    #[error("malformed cut rooted at node {root}: cone reaches node {node} outside the leaves")]
    MalformedCut { root: u32, node: u32 },

    #[error("arity {0} not supported (max 4)")]
    Arity(usize),

    #[error("database: {0}")]
    Database(String),

    /// A traced union joined two classes whose simulation signatures differ.
    #[error("trace soundness violated: {0}")]
    TraceSoundness(String),

    #[error("extraction infeasible: {0}")]
    Infeasible(String),
}

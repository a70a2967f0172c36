use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("matrix is not unitary (deviation {deviation:.3e} exceeds {tolerance:.1e})")]
    NonUnitaryInput { deviation: f64, tolerance: f64 },

    #[error("non-finite matrix entry")]
    NonFinite,

    #[error("malformed circuit: {0}")]
    MalformedCircuit(String),

    #[error("infeasible: {0}")]
    Infeasible(String),

    /// A synthesis target lies outside the region the requested
    /// construction covers. `constraint` names the violated inequality.
    #[error("target outside region: {constraint} violated")]
    OutOfRegion { constraint: String },

    #[error("unsupported base gate: {0}")]
    UnsupportedBase(String),

    #[error("domain error: {0}")]
    DomainError(String),

    #[error("index {index} out of range for a circuit of {n} applications")]
    IndexOutOfRange { index: usize, n: usize },

    /// The circuit produced by a construction does not land on the target
    /// class. Indicates a numerical breakdown rather than bad input.
    #[error("construction mismatch: coordinates differ by {0:.3e}")]
    ConstructionMismatch(f64),
}

use thiserror::Error;

/// Errors raised by the simulator.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum QdacError {
    /// A dense representation would exceed the configured qubit limit.
    #[error("capacity exceeded: {what} needs {qubits} qubits, limit is {limit}")]
    Capacity {
        what: &'static str,
        qubits: usize,
        limit: usize,
    },
    /// An argument lies outside its mathematical domain.
    #[error("domain error: {0}")]
    Domain(String),
    /// Qubit indices or register sizes do not fit the state.
    #[error("layout error: {0}")]
    Layout(String),
    /// A state or channel failed one of its defining invariants.
    #[error("invariant violation: {0}")]
    InvariantViolation(String),
    /// The structured backend cannot represent the requested operation.
    #[error("backend capability: {0}")]
    BackendCapability(String),
    /// A state does not have the shape an operation expects.
    #[error("form error: {0}")]
    Form(String),
    /// A measurement description is not a complete orthogonal set.
    #[error("measurement error: {0}")]
    Measurement(String),
    #[error("partial trace with an empty keep set is a scalar trace; use trace()")]
    ScalarTrace,
    /// Malformed input file.
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

pub type Result<T, E = QdacError> = std::result::Result<T, E>;

impl QdacError {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        QdacError::Domain(msg.into())
    }

    pub(crate) fn layout(msg: impl Into<String>) -> Self {
        QdacError::Layout(msg.into())
    }

    pub(crate) fn parse(line: usize, msg: impl Into<String>) -> Self {
        QdacError::Parse { line, msg: msg.into() }
    }
}

//! Crate-wide error type.

use crate::hilbert::QubitId;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("duplicate qubit {0} in register")]
    DuplicateQubit(QubitId),
    #[error("qubit {0} is not in the register")]
    UnknownQubit(QubitId),
    #[error("gate targets must be distinct qubits")]
    CoincidentTargets,
    #[error("operands are defined over different registers")]
    RegisterMismatch,
    #[error("register of {0} qubits exceeds the supported maximum of {max}", max = crate::hilbert::MAX_QUBITS)]
    RegisterTooLarge(usize),
    #[error("amplitude vector has length {got}, expected {expected}")]
    BadAmplitudeCount { got: usize, expected: usize },
    #[error("state is not normalized (squared norm {0})")]
    NotNormalized(f64),
    #[error("non-finite value in input")]
    NonFinite,
    #[error("matrix is not unitary")]
    NotUnitary,
    #[error("matrix amplifies some input (spectral norm {0} > 1)")]
    NotContractive(f64),
    #[error("forced measurement branch has zero probability")]
    ZeroProbabilityBranch,
    #[error("partition must be a nonempty proper subset of the register")]
    PartitionNotProper,
    #[error("got {got} items where {expected} were expected")]
    LengthMismatch { got: usize, expected: usize },
    #[error("degenerate cavity parameters: reflection denominator vanishes")]
    DegenerateParams,
    #[error("invalid parameter: {0}")]
    InvalidParams(String),
    #[error("pulse length {0} is not a power of two")]
    PulseLengthNotPowerOfTwo(usize),
    #[error("protocol size {0} exceeds the supported maximum of {max}", max = crate::teleport::MAX_PROTOCOL_QUBITS)]
    ProtocolTooLarge(usize),
    #[error("exhaustive search is limited to {max} qubits, got {0}", max = crate::teleport::MAX_SEARCH_QUBITS)]
    SearchTooLarge(usize),
    #[error("no Pauli correction maps the conditional state back to the input")]
    NoCorrectionFound,
    #[error("no built-in correction table for {0} qubits")]
    UnsupportedTableSize(usize),
    #[error("sweep grid is empty")]
    EmptyGrid,
    #[error("success probability underflows to zero")]
    ZeroSuccessProbability,
}

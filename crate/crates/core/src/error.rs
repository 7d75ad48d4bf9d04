use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("composite dimension {0} exceeds the maximum of {max}", max = crate::quantum::MAX_DIM)]
    DimensionOverflow(usize),

    #[error("state is not normalized (norm² = {0})")]
    NotNormalized(f64),

    #[error("invalid state: {0}")]
    InvalidState(String),

    #[error("invalid partition: {0}")]
    InvalidPartition(String),

    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),

    #[error("angle {0} rad is outside (0, π/2]")]
    AngleOutOfRange(f64),

    #[error("cycle count must be at least 1")]
    ZeroCycles,

    #[error("cycle index {n} exceeds cycle count {total}")]
    CycleIndexOutOfRange { n: u32, total: u32 },

    #[error("invalid detector pair {0}: expected an electron detector (D1|D2) and a photon detector (D3..D6)")]
    InvalidClicks(String),

    #[error("target throughput {0} bits/qubit is unattainable (must lie in (0, 2))")]
    UnattainableTarget(f64),

    #[error("no cycle count up to {limit} reaches {target} bits/qubit")]
    SearchExhausted { target: f64, limit: u64 },

    #[error("invalid cycle range {min}..={max}")]
    InvalidRange { min: u32, max: u32 },

    #[error("failed to parse {kind} from {input:?}")]
    Parse { kind: &'static str, input: String },
}

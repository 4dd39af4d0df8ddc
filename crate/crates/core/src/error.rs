use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("block count must be at least 1")]
    ZeroBlocks,
    #[error("worker count must be at least 1")]
    ZeroWorkers,
    #[error("index {index} is past the end of a sequence of length {len}")]
    IndexOutOfRange { index: usize, len: usize },
    #[error("output has length {actual}, expected {expected}")]
    LengthMismatch { expected: usize, actual: usize },
    #[error("plan was built for inputs of length ({plan_n}, {plan_m}), got ({n}, {m})")]
    PlanMismatch {
        plan_n: usize,
        plan_m: usize,
        n: usize,
        m: usize,
    },
    #[error("invalid plan: {0}")]
    InvalidPlan(String),
    #[error("failed to start worker pool: {0}")]
    ThreadPool(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

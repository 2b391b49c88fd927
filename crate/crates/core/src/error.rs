use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("input error: {0}")]
    Input(String),

    #[error(
        "covariance factorization failed after jitter escalation to {max_jitter:e} \
         (N = {n}, diagonal range [{min_diag:e}, {max_diag:e}], condition estimate {condition:e})"
    )]
    Factorization {
        n: usize,
        max_jitter: f64,
        min_diag: f64,
        max_diag: f64,
        condition: f64,
    },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("Assumption 1 violated: initial sample {index} at theta = {theta:?} measured y_s = {y_s} <= 0")]
    UnsafeInitialSet {
        index: usize,
        theta: Vec<f64>,
        y_s: f64,
    },

    #[error("internal invariant violated: {0}")]
    Invariant(String),
}

pub type Result<T> = std::result::Result<T, Error>;

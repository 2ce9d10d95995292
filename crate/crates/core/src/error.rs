use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum So3Error {
    #[error("matrix is not skew-symmetric (||M + M^T||_F = {asymmetry:e})")]
    NotSkew { asymmetry: f64 },
    #[error("matrix is not a rotation (||O^T O - I||_F = {defect:e}, det = {det})")]
    NotOrthonormal { defect: f64, det: f64 },
    #[error("matrix cannot be projected onto SO(3) (smallest singular value {smallest_singular_value:e})")]
    Degenerate { smallest_singular_value: f64 },
    #[error("Euler 3-2-1 decomposition at gimbal lock (pitch = {pitch} rad)")]
    GimbalLock { pitch: f64 },
    #[error("matrix has non-finite entries")]
    NotFinite,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum RlsError {
    #[error("innovation block is numerically singular (condition number {condition:e})")]
    SingularInnovation { condition: f64 },
    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: usize, got: usize },
    #[error("invalid configuration: {0}")]
    Config(String),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SensorError {
    #[error("accelerometer and magnetometer directions are degenerate: {0}")]
    DegenerateGeometry(String),
    #[error(transparent)]
    So3(#[from] So3Error),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EstimatorError {
    #[error(transparent)]
    Rls(#[from] RlsError),
    #[error(transparent)]
    So3(#[from] So3Error),
    #[error("measurement innovation is numerically singular (condition number {condition:e})")]
    SingularInnovation { condition: f64 },
    #[error("invalid measurement: {0}")]
    InvalidMeasurement(String),
}

/// Errors surfaced by the experiment harness and CLI.
#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("malformed record at row {row}: {reason}")]
    MalformedRecord { row: usize, reason: String },
    #[error("every estimator failed: {0}")]
    AllEstimatorsFailed(String),
    #[error("i/o error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl HarnessError {
    /// Process exit code for the CLI: 1 configuration, 2 input data,
    /// 3 numerical failure of every estimator.
    pub fn exit_code(&self) -> i32 {
        match self {
            HarnessError::Config(_) => 1,
            HarnessError::MalformedRecord { .. } | HarnessError::Io { .. } | HarnessError::Csv(_) => 2,
            HarnessError::AllEstimatorsFailed(_) => 3,
        }
    }
}

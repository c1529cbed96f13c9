use thiserror::Error;

/// Errors raised by the laboratory.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("negative time t = {0}")]
    NegativeTime(f64),

    #[error("index {index} out of range (max {max})")]
    IndexOutOfRange { index: usize, max: usize },

    #[error("quadrature tail estimate {estimate:.3e} exceeds tolerance {tolerance:.3e}")]
    QuadratureTail { estimate: f64, tolerance: f64 },

    #[error("k-grid too coarse for derivative order {order}: {detail}")]
    GridResolution { order: usize, detail: String },

    #[error("input has nonzero mean {mean:.3e} (norm {norm:.3e})")]
    NonzeroMean { mean: f64, norm: f64 },

    #[error("wavenumber k = {k} outside the admissible region: {detail}")]
    OutsideRegion { k: f64, detail: String },

    #[error("wavenumber k = {0} is at the double eigenvalue; split undefined")]
    Degenerate(f64),

    #[error("missing coefficient a_{0}")]
    MissingIndex(usize),

    #[error("step size underflow at t = {t} (h = {h:.3e})")]
    StepUnderflow { t: f64, h: f64 },

    #[error("step-halving did not converge: {0}")]
    StepConvergence(String),

    #[error("fit failed: {0}")]
    Fit(String),

    #[error("derivative cross-check mismatch at order {order}: analytic {analytic:.6e}, finite difference {finite:.6e}")]
    DerivativeMismatch { order: usize, analytic: f64, finite: f64 },

    #[error("imaginary residue {0:.3e} in real field")]
    ImaginaryResidue(f64),

    #[error("wait time not reached: t = {t} < {required}")]
    WaitTime { t: f64, required: f64 },

    #[error("oracle disagreement {0:.3e}; refusing to emit results")]
    OracleDisagreement(f64),

    #[error("config error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

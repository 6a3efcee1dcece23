use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("{what} = {value} is outside the supported range [{min}, {max}]")]
    SizeGuard {
        what: &'static str,
        value: u64,
        min: u64,
        max: u64,
    },

    #[error("length mismatch: expected {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },

    #[error("partitions of different ground sets ({left} vs {right})")]
    GroundSetMismatch { left: usize, right: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("support condition violated: Σσ = {total} > {bound}")]
    SupportViolation { total: f64, bound: f64 },

    #[error("modulus must be odd and positive, got {0}")]
    EvenModulus(i64),

    #[error("cost guard: {0}")]
    CostGuard(String),

    #[error("quadrature did not reach tolerance {tol:e}: best estimate {value} ± {error:e}")]
    Tolerance { value: f64, error: f64, tol: f64 },

    #[error("truncation bound unattainable: tail bound {achieved:e} exceeds target {target:e}")]
    Truncation { achieved: f64, target: f64 },
}

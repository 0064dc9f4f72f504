use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("integrand evaluated to a non-finite value at x = {x}")]
    NonFiniteSample { x: f64 },

    #[error("cumulative integral grid must start at a = {a}, found x_min = {x_min}")]
    CumQuadOrigin { a: f64, x_min: f64 },

    #[error("bump pair rejected: |int (h3')^3| = {value:.3e} below asymmetry threshold {threshold:.3e}")]
    DegenerateBumpPair { value: f64, threshold: f64 },

    #[error("field does not settle to a constant at the grid ends (tail deviation {tail:.3e})")]
    NonConstantTail { tail: f64 },

    #[error("solution left the sphere before projection at t = {t}, x = {x} (deviation {deviation:.3e})")]
    BlowUp { t: f64, x: f64, deviation: f64 },

    #[error("support of f - e1 leaks outside [-C, C] (deviation {deviation:.3e} at x = {x})")]
    SupportLeak { x: f64, deviation: f64 },

    #[error("traveling-wave description residual {residual:.3e} exceeds tolerance {tol:.3e}; strips have not stabilised")]
    ProfileResidual { residual: f64, tol: f64 },

    #[error("lower-bound window [{lo:.3e}, {hi:.3e}] is degenerate; T = {t} is too small")]
    DegenerateWindow { lo: f64, hi: f64, t: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;

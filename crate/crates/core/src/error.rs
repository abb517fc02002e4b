use thiserror::Error;

/// Failures raised by the numerical layers.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid grid: {0}")]
    Grid(String),
    #[error("invalid input: {0}")]
    Input(String),
    #[error("singular matrix: pivot {pivot:e} at row {row}")]
    Singular { row: usize, pivot: f64 },
    #[error("time {t} outside [0, {horizon}]")]
    TimeOutOfRange { t: f64, horizon: f64 },
    #[error("{0} requires a strictly positive regularization ε")]
    ZeroEpsilon(&'static str),
    #[error("nonlinearity bundle rejected: {0}")]
    Bundle(String),
    #[error("box constraint has lower > upper at frame {frame}, node {node}")]
    BoxOrder { frame: usize, node: usize },
    #[error("invalid parameters: {0}")]
    Params(String),
    #[error("newton ({stage}) did not converge at step {step}: residual {residual:e} after {iterations} iterations")]
    Newton {
        step: usize,
        stage: &'static str,
        residual: f64,
        iterations: usize,
    },
    #[error("step size τ = {tau} is not below τ₁ = {tau1}")]
    StepTooLarge { tau: f64, tau1: f64 },
    #[error("invalid septuplet: {0}")]
    Septuplet(String),
    #[error("line search failed at iteration {iteration} after {halvings} halvings (gradient norm {gradient_norm:e})")]
    LineSearch {
        iteration: usize,
        halvings: usize,
        gradient_norm: f64,
    },
    #[error("oracle size bound exceeded: {0}")]
    OracleSize(String),
}

pub type Result<T> = std::result::Result<T, Error>;

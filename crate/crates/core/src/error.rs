use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("gamma function pole at {0}")]
    Pole(f64),
    #[error("overflow evaluating {what} at {at}")]
    Overflow { what: &'static str, at: f64 },
    #[error("argument out of domain: {0}")]
    Domain(String),
    #[error("integral diverges: {0}")]
    Divergence(String),
    #[error("value {value} outside the range of the transform ({lo}, {hi})")]
    Range { value: f64, lo: f64, hi: f64 },
    #[error("quadrature failed to converge: {0}")]
    NoConvergence(String),
    #[error("nu = {0} is one of the excluded values 1/2, 1/3, 1/4, 1/5")]
    SingularNu(f64),
    #[error("nu = {nu} puts Gamma({arg}) on a pole")]
    ExtendedSingularity { nu: f64, arg: f64 },
    #[error("coefficient C2 = {0} is not positive")]
    NonPositiveC2(f64),
    #[error("point lies on or too close to the support boundary")]
    Boundary,
    #[error("residual stencil leaves the support cone: {0}")]
    DomainViolation(String),
    #[error("degenerate test: {0}")]
    Degenerate(String),
    #[error("parse error: {0}")]
    Parse(String),
}

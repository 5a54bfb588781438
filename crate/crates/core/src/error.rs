use thiserror::Error;

/// Errors raised by the numerical routines of this crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("unsupported order {0} (|nu| must not exceed {max})", max = crate::specfun::MAX_ORDER)]
    UnsupportedOrder(f64),

    #[error("max_steps exceeded after {0} steps")]
    MaxStepsExceeded(usize),

    #[error("blow-up detected at t = {0}")]
    BlowUp(f64),

    #[error("singular path: {0}")]
    SingularPath(String),

    #[error("singular point at zeta = 0")]
    SingularPoint,

    #[error("radius too small for this a (a/(2 r) = {0} exceeds the dynamic-range guard)")]
    RadiusTooSmall(f64),

    #[error("pole of solution near tau = {0}")]
    PoleOfSolution(f64),

    #[error("moving singularity reached near tau = {0}")]
    MovingSingularity(f64),

    #[error("sample too close to singularity: {0}")]
    SampleTooClose(String),

    #[error("no real omega: b2*b3 = {0} is not negative")]
    NoRealOmega(f64),

    #[error("no real symmetric gauge: b2 = {b2}, b3 = {b3}")]
    NoSymmetricGauge { b2: f64, b3: f64 },

    #[error("Y vanishes at seed a0 = {0}; use pure-Y combination")]
    PureYCombination(f64),

    #[error("double zero, specialization invalid at t = {0}")]
    DoubleZero(f64),

    #[error("no adjacency in range ({0}, {1})")]
    NoAdjacency(f64, f64),

    #[error("{0} did not converge")]
    NoConvergence(&'static str),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<()> {
    if cond {
        Ok(())
    } else {
        Err(Error::InvalidInput(msg()))
    }
}

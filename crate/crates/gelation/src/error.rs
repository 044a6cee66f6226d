//! Error type shared by the core modules.

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("size list must be nonempty")]
    EmptySizes,

    #[error("component sizes must be positive")]
    ZeroSize,

    #[error("parameter `{name}` out of range: {value}")]
    InvalidParam { name: &'static str, value: f64 },

    #[error("weights must be nonnegative and finite (found {value} at k = {k})")]
    BadWeight { k: u64, value: f64 },

    #[error("atoms must lie in (0, 1] (found {0})")]
    BadAtom(f64),

    #[error("total mass {0} exceeds 1")]
    MassExceedsOne(f64),

    #[error("mesoscopic cutoffs need R < eps*N (R = {r}, eps = {eps}, N = {n})")]
    BadCutoffs { r: u64, eps: f64, n: u64 },

    #[error("ODE step size underflow at t = {0}")]
    StepUnderflow(f64),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn param(name: &'static str, value: f64) -> Self {
        Error::InvalidParam { name, value }
    }
}

//! Exact finite-`N` distribution of the component sizes of `G(N, p)` and the
//! numerical machinery around it.
//!
//! The joint law of the size counts `ℓ = (ℓ_k)` is
//!
//! ```text
//! P(A_N(ℓ)) = N! Π_k  μ_k(p)^{ℓ_k} (1−p)^{k(N−k)ℓ_k/2} / (k!^{ℓ_k} ℓ_k!),
//! ```
//!
//! where `μ_k(p)` is the probability that `G(k, p)` is connected.  Three
//! modules implement this:
//!
//! * [`connectivity`] — `μ_k(p)` through the first-component recursion in
//!   multiprecision arithmetic (MPFR), with the classical spanning-tree and
//!   complement bounds as cross-checks;
//! * [`exactdist`] — the log-probability of a configuration, streaming
//!   integer-partition enumeration of the state space, a brute-force
//!   all-graphs oracle for tiny `N`, and the global normalization check;
//! * [`ldpverify`] — recovery sequences approaching a target pair `(Λ, α)`
//!   and the convergence of `−(1/N) log P` to the rate function.

pub mod connectivity;
pub mod exactdist;
pub mod ldpverify;

pub use connectivity::{mu_exact, mu_table, MuTable, PrecisionConfig};
pub use exactdist::{
    enumerate_histograms, exhaustive_oracle, log_prob_config, partition_count,
    verify_normalization,
};
pub use ldpverify::{meso_displacement_gap, rate_convergence, recovery_sequence, RecoveryTarget};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Core(#[from] gelation::Error),

    #[error("parameter `{name}` out of range: {value}")]
    InvalidParam { name: &'static str, value: f64 },

    #[error("state space guard: {0}")]
    TooLarge(String),

    #[error("working precision exceeded {0} bits without reaching the target accuracy")]
    PrecisionExhausted(u32),

    #[error("N = {n} too small for the recovery target (l_1 = {l1})")]
    NTooSmall { n: u64, l1: i64 },

    #[error("rate of the target is not finite (total mass {0} exceeds 1)")]
    InfiniteRate(f64),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn param(name: &'static str, value: f64) -> Self {
        Error::InvalidParam { name, value }
    }
}

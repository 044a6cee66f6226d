//! Component-size statistics of the sparse Erdős–Rényi graph `G(N, t/N)` and
//! of the equivalent Marcus–Lushnikov coagulation process with multiplicative
//! kernel.
//!
//! The crate is organised around the three size scales of a configuration of
//! connected components:
//!
//! * **microscopic** — sizes of order one, described by a weight sequence
//!   `Λ = (λ_k)` with `λ_k ≈ (#components of size k)/N`;
//! * **macroscopic** — sizes of order `N`, described by a finite list of
//!   atoms `α = (α_j)` with `α_j ≈ S_j/N`;
//! * **mesoscopic** — everything in between, tracked only through the total
//!   fraction of vertices it contains.
//!
//! [`measures`] holds the domain types and the cut-off metrics, [`ratefn`]
//! the large-deviations rate functions on speed `N` together with their
//! closed-form minimizers (Borel distributions) and the gelation threshold
//! `β_t`, [`simulate`] exact Monte Carlo samplers for both the graph and the
//! coagulation dynamics, and [`smol`] a truncated Smoluchowski ODE solver for
//! the hydrodynamic limit.
//!
//! Everything here is plain `f64` numerics and is `wasm`-friendly; the exact
//! finite-`N` distribution (which needs multiprecision arithmetic) lives in
//! the companion `gelation-exact` crate.

pub mod error;
pub mod measures;
pub mod ratefn;
pub mod simulate;
pub mod smol;

pub use error::{Error, Result};
pub use measures::{MacroMeasure, MesoCutoffs, MicroMeasure, SizeHistogram};

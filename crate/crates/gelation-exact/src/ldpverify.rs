//! Recovery sequences and numerical witnesses of the large-deviations
//! asymptotics `P(A_N(ℓ^{(N)})) ≈ e^{−N·I(Λ,α;t)}`.
//!
//! Given a target pair `(Λ, α)` with `c_Λ + c_α ≤ 1`, the recovery
//! configuration on `N` vertices is
//!
//! ```text
//! ℓ_k = ⌊λ_k N⌋                       for 2 ≤ k < R_N,
//! ℓ_{R_N} = ⌊(1 − c_Λ − c_α) N / R_N⌋,
//! ℓ_k = α((k−1)/N, k/N]               for k > R_N,
//! ℓ_1 = N − Σ_{j≥2} j ℓ_j,
//! ```
//!
//! with `R_N = ⌈N^{1/3}⌉` by default: the leftover mass is parked in
//! components of a single slowly diverging size and rounding falls on the
//! singletons.  Evaluating the exact log-probability along `N` then shows
//! `−(1/N) log P` drifting down toward `I(Λ, α; t)`.

use gelation::measures::{MacroMeasure, MicroMeasure, SizeHistogram};
use gelation::ratefn::{golden_section_min, macro_atom_rate, rate_joint, rate_meso};
use std::collections::BTreeMap;

use crate::connectivity::PrecisionConfig;
use crate::exactdist::log_prob_config;
use crate::{Error, Result};

/// Default mesoscopic parking size `R_N = ⌈N^{1/3}⌉`.
pub fn cube_root_rule(n: u64) -> u64 {
    ((n as f64).cbrt() - 1e-9).ceil().max(2.0) as u64
}

/// A micro/macro pair targeted by a recovery sequence.
#[derive(Debug, Clone)]
pub struct RecoveryTarget {
    pub lambda: MicroMeasure,
    pub alpha: MacroMeasure,
    pub r_rule: fn(u64) -> u64,
}

impl RecoveryTarget {
    pub fn new(lambda: MicroMeasure, alpha: MacroMeasure) -> Result<Self> {
        let mass = lambda.total_mass() + alpha.total_mass();
        if mass > 1.0 + 1e-9 {
            return Err(Error::InfiniteRate(mass));
        }
        Ok(Self { lambda, alpha, r_rule: cube_root_rule })
    }

    pub fn with_r_rule(mut self, r_rule: fn(u64) -> u64) -> Self {
        self.r_rule = r_rule;
        self
    }

    /// Joint rate `I(Λ, α; t)` of the target.
    pub fn rate(&self, t: f64) -> Result<f64> {
        Ok(rate_joint(&self.lambda, &self.alpha, t)?)
    }
}

/// Builds the recovery configuration `ℓ^{(N)}`.
pub fn recovery_sequence(target: &RecoveryTarget, n: u64) -> Result<SizeHistogram> {
    if n == 0 {
        return Err(Error::param("n", 0.0));
    }
    let r_n = (target.r_rule)(n);
    let n_f = n as f64;
    let mut counts: BTreeMap<u64, u64> = BTreeMap::new();
    for k in 2..r_n {
        let c = (target.lambda.weight(k) * n_f).floor() as u64;
        if c > 0 {
            counts.insert(k, c);
        }
    }
    let leftover = (1.0 - target.lambda.total_mass() - target.alpha.total_mass()).max(0.0);
    let park = (leftover * n_f / r_n as f64).floor() as u64;
    if park > 0 {
        *counts.entry(r_n).or_insert(0) += park;
    }
    for &atom in target.alpha.atoms() {
        // cell ((k−1)/N, k/N] containing the atom
        let k = ((atom * n_f - 1e-9).ceil() as u64).min(n);
        if k > r_n {
            *counts.entry(k).or_insert(0) += 1;
        }
    }
    let heavy: u64 = counts.iter().map(|(&k, &c)| k * c).sum();
    if heavy > n {
        return Err(Error::NTooSmall { n, l1: n as i64 - heavy as i64 });
    }
    let singles = n - heavy;
    if singles > 0 {
        counts.insert(1, singles);
    }
    Ok(SizeHistogram::from_counts(counts)?)
}

/// One row of a rate-convergence table.
#[derive(Debug, Clone, Copy)]
pub struct RatePoint {
    pub n: u64,
    /// `−(1/N) log P(A_N(ℓ^{(N)}))` at `p = t/N`.
    pub empirical_rate: f64,
    /// `I(Λ, α; t)` of the target.
    pub rate: f64,
    pub gap: f64,
}

/// Evaluates `−(1/N) log P(A_N(ℓ^{(N)}))` along `n_list` and pairs it with
/// the target's rate for gap reporting.
pub fn rate_convergence(
    target: &RecoveryTarget,
    t: f64,
    n_list: &[u64],
    prec: &PrecisionConfig,
) -> Result<Vec<RatePoint>> {
    let rate = target.rate(t)?;
    if !rate.is_finite() {
        return Err(Error::InfiniteRate(
            target.lambda.total_mass() + target.alpha.total_mass(),
        ));
    }
    let mut out = Vec::with_capacity(n_list.len());
    for &n in n_list {
        if n == 0 || n > 1000 {
            return Err(Error::TooLarge(format!("rate convergence needs 1 ≤ N ≤ 1000, got {n}")));
        }
        let hist = recovery_sequence(target, n)?;
        let lp = log_prob_config(&hist, t / n as f64, prec)?;
        let empirical_rate = -lp / n as f64;
        out.push(RatePoint { n, empirical_rate, rate, gap: (empirical_rate - rate).abs() });
    }
    Ok(out)
}

/// Result of minimizing the constrained-displacement functional for the
/// mesoscopic mass.
#[derive(Debug, Clone, Copy)]
pub struct MesoDisplacement {
    /// Minimizing microscopic mass `x*`.
    pub x_star: f64,
    /// Minimum value of the functional.
    pub minimum: f64,
    /// `|minimum − J_me(c; t)|`.
    pub gap: f64,
}

/// Minimizes, over the microscopic mass `x ∈ [0, 1−c]`, the joint rate of
/// configurations with mesoscopic mass `c` (micro mass `x`, one macro atom
/// of mass `1−c−x`), and compares with the closed-form `J_me(c; t)`:
///
/// ```text
/// f(x) = [x log(tx) − tx²/2 + 1/(2t)]·1{x < 1/t}
///        + (c+x)(t/2 − log t) − 1/(2t) + I_ma(δ_{1−c−x}; t).
/// ```
pub fn meso_displacement_gap(c: f64, t: f64) -> Result<MesoDisplacement> {
    if !(0.0..=1.0).contains(&c) {
        return Err(Error::param("c", c));
    }
    if !(t > 0.0) || !t.is_finite() {
        return Err(Error::param("t", t));
    }
    let f = |x: f64| {
        let micro = if x < 1.0 / t {
            (if x > 0.0 { x * (t * x).ln() } else { 0.0 }) - 0.5 * t * x * x + 0.5 / t
        } else {
            0.0
        };
        micro + (c + x) * (0.5 * t - t.ln()) - 0.5 / t + macro_atom_rate(1.0 - c - x, t)
    };
    let hi = 1.0 - c;
    let grid = 4000;
    let mut best = (0.0, f(0.0));
    for i in 1..=grid {
        let x = hi * i as f64 / grid as f64;
        let v = f(x);
        if v < best.1 {
            best = (x, v);
        }
    }
    let step = hi / grid as f64;
    let (x_star, minimum) =
        golden_section_min(f, (best.0 - step).max(0.0), (best.0 + step).min(hi), 120);
    let closed = rate_meso(c, t)?;
    Ok(MesoDisplacement { x_star, minimum, gap: (minimum - closed).abs() })
}

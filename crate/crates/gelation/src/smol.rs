//! Truncated Smoluchowski coagulation equation for the multiplicative kernel
//! `K(m, m̃) = m·m̃` with monodisperse start,
//!
//! ```text
//! d/dt l_k = ½ Σ_{m+m̃=k} m·m̃ l_m l_m̃ − k l_k Σ_m m l_m ,   l_k(0) = 1{k=1}.
//! ```
//!
//! Truncation closes the infinite system at `K_max`: gain terms only pair
//! sizes with `m + m̃ ≤ K_max`, and mass crossing the boundary is accounted
//! as gel, `gel = 1 − Σ_{k≤K_max} k l_k`.
//!
//! The loss sum is where the truncated system must pick a post-gelation
//! convention, controlled by [`GelRule`]:
//!
//! * [`GelRule::Stockmayer`] sums only over the retained sizes (the equation
//!   exactly as displayed).  As `K_max → ∞` this converges to the classical
//!   sol-only solution, whose sol mass is `1` up to `t = 1` and `1/t`
//!   afterwards — the gel is inert.
//! * [`GelRule::Flory`] lets the lost mass keep coagulating, i.e. the loss
//!   coefficient is the constant total mass 1.  This closes the retained
//!   equations exactly (no truncation error for `k ≤ K_max`) and reproduces
//!   the Marcus–Lushnikov hydrodynamic limit: `l_k(t) = λ*_k(1; t)` for all
//!   `t`, with sol mass `β_t` after gelation.
//!
//! Pre-gelation the two rules agree up to the (reported) truncation tail.

use crate::error::{Error, Result};

/// Post-gelation closure of the truncated loss term.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum GelRule {
    /// Loss against the retained sol mass only; gel is inert.
    Stockmayer,
    /// Loss against the constant total mass 1; gel keeps eating sol.
    #[default]
    Flory,
}

/// Concentrations `l_1..l_{K_max}` at a given time.
#[derive(Debug, Clone, PartialEq)]
pub struct SmolState {
    l: Vec<f64>,
    time: f64,
}

impl SmolState {
    /// Monodisperse initial state `l = (1, 0, …)`.
    pub fn monodisperse(k_max: usize) -> Self {
        let mut l = vec![0.0; k_max];
        l[0] = 1.0;
        Self { l, time: 0.0 }
    }

    pub fn from_concentrations(l: Vec<f64>, time: f64) -> Result<Self> {
        if l.is_empty() {
            return Err(Error::param("k_max", 0.0));
        }
        Ok(Self { l, time })
    }

    pub fn k_max(&self) -> usize {
        self.l.len()
    }

    pub fn time(&self) -> f64 {
        self.time
    }

    /// `l_k` for 1-based `k`.
    pub fn concentration(&self, k: usize) -> f64 {
        self.l[k - 1]
    }

    pub fn concentrations(&self) -> &[f64] {
        &self.l
    }

    /// Retained first moment `Σ k l_k`.
    pub fn sol_mass(&self) -> f64 {
        self.l.iter().enumerate().map(|(i, &v)| (i + 1) as f64 * v).sum()
    }

    /// Mass lost past the truncation: `1 − Σ k l_k`.
    pub fn gel_mass(&self) -> f64 {
        1.0 - self.sol_mass()
    }
}

/// Right-hand side of the truncated system at `state`.
pub fn smol_rhs(state: &SmolState, rule: GelRule) -> Vec<f64> {
    let l = &state.l;
    let k_max = l.len();
    let loss_mass = match rule {
        GelRule::Stockmayer => state.sol_mass(),
        GelRule::Flory => 1.0,
    };
    let mut rhs = vec![0.0; k_max];
    for k in 2..=k_max {
        let mut gain = 0.0;
        for m in 1..k {
            gain += (m * (k - m)) as f64 * l[m - 1] * l[k - m - 1];
        }
        rhs[k - 1] = 0.5 * gain;
    }
    for k in 1..=k_max {
        rhs[k - 1] -= l[k - 1] * k as f64 * loss_mass;
    }
    rhs
}

/// Rate at which mass currently crosses the truncation boundary.
///
/// For [`GelRule::Stockmayer`] this is the coagulation flux into sizes
/// `> K_max`; for [`GelRule::Flory`] it additionally counts sol mass eaten
/// directly by the gel.  Either way it equals `−Σ k·rhs_k`, so the retained
/// mass balance is exact.
pub fn mass_flux_past_truncation(state: &SmolState, rule: GelRule) -> f64 {
    let l = &state.l;
    let k_max = l.len();
    let mut flux = 0.0;
    for m in 1..=k_max {
        if l[m - 1] == 0.0 {
            continue;
        }
        for mt in (k_max + 1 - m).max(m)..=k_max {
            let pair = (m * mt) as f64 * l[m - 1] * l[mt - 1] * (m + mt) as f64;
            flux += if mt == m { 0.5 * pair } else { pair };
        }
    }
    if rule == GelRule::Flory {
        let second_moment: f64 = l
            .iter()
            .enumerate()
            .map(|(i, &v)| ((i + 1) * (i + 1)) as f64 * v)
            .sum();
        flux += second_moment * state.gel_mass();
    }
    flux
}

/// A time-sampled trajectory of the truncated system.
#[derive(Debug, Clone)]
pub struct Trajectory {
    pub states: Vec<SmolState>,
}

impl Trajectory {
    pub fn final_state(&self) -> &SmolState {
        self.states.last().expect("trajectory has at least the initial state")
    }
}

const RK_SAFETY: f64 = 0.9;
const RK_MIN_FACTOR: f64 = 0.2;
const RK_MAX_FACTOR: f64 = 5.0;
const ABS_TOL: f64 = 1e-16;

/// Integrates the truncated system from the monodisperse state to `t_end`
/// with a Dormand–Prince 5(4) embedded pair at relative tolerance `tol`,
/// recording the state at `n_outputs` evenly spaced times (plus `t = 0`).
///
/// Negativity is handled by step rejection; a step underflow is an error.
pub fn integrate(
    k_max: usize,
    t_end: f64,
    tol: f64,
    rule: GelRule,
    n_outputs: usize,
) -> Result<Trajectory> {
    if k_max < 2 {
        return Err(Error::param("k_max", k_max as f64));
    }
    if !(t_end >= 0.0) || !t_end.is_finite() {
        return Err(Error::param("t_end", t_end));
    }
    if !(tol > 0.0 && tol < 1.0) {
        return Err(Error::param("tol", tol));
    }
    let mut state = SmolState::monodisperse(k_max);
    let mut out_times: Vec<f64> = (1..=n_outputs.max(1))
        .map(|i| t_end * i as f64 / n_outputs.max(1) as f64)
        .collect();
    if t_end == 0.0 {
        out_times.clear();
    }
    let mut trajectory = Trajectory { states: vec![state.clone()] };

    let mut h = (tol.powf(0.2) * 0.1).min(0.01).max(1e-8);
    let mut out_idx = 0;
    while out_idx < out_times.len() {
        let target = out_times[out_idx];
        while state.time < target {
            let mut step = h.min(target - state.time);
            loop {
                match dopri5_step(&state, step, rule, tol) {
                    StepResult::Accept { next, err_ratio } => {
                        state = next;
                        let grow = RK_SAFETY * err_ratio.powf(-0.2);
                        h = (step * grow.clamp(RK_MIN_FACTOR, RK_MAX_FACTOR)).min(0.25);
                        break;
                    }
                    StepResult::Reject { err_ratio } => {
                        let shrink = RK_SAFETY * err_ratio.powf(-0.2);
                        step *= shrink.clamp(RK_MIN_FACTOR, 0.9);
                        if step < 1e-14 {
                            return Err(Error::StepUnderflow(state.time));
                        }
                    }
                }
            }
        }
        state.time = target; // snap accumulated roundoff
        trajectory.states.push(state.clone());
        out_idx += 1;
    }
    Ok(trajectory)
}

enum StepResult {
    Accept { next: SmolState, err_ratio: f64 },
    Reject { err_ratio: f64 },
}

/// One Dormand–Prince 5(4) attempt of size `h` from `state`.
fn dopri5_step(state: &SmolState, h: f64, rule: GelRule, rtol: f64) -> StepResult {
    const A21: f64 = 1.0 / 5.0;
    const A31: f64 = 3.0 / 40.0;
    const A32: f64 = 9.0 / 40.0;
    const A41: f64 = 44.0 / 45.0;
    const A42: f64 = -56.0 / 15.0;
    const A43: f64 = 32.0 / 9.0;
    const A51: f64 = 19372.0 / 6561.0;
    const A52: f64 = -25360.0 / 2187.0;
    const A53: f64 = 64448.0 / 6561.0;
    const A54: f64 = -212.0 / 729.0;
    const A61: f64 = 9017.0 / 3168.0;
    const A62: f64 = -355.0 / 33.0;
    const A63: f64 = 46732.0 / 5247.0;
    const A64: f64 = 49.0 / 176.0;
    const A65: f64 = -5103.0 / 18656.0;
    const B1: f64 = 35.0 / 384.0;
    const B3: f64 = 500.0 / 1113.0;
    const B4: f64 = 125.0 / 192.0;
    const B5: f64 = -2187.0 / 6784.0;
    const B6: f64 = 11.0 / 84.0;
    // fifth-minus-fourth order error weights
    const E1: f64 = 71.0 / 57600.0;
    const E3: f64 = -71.0 / 16695.0;
    const E4: f64 = 71.0 / 1920.0;
    const E5: f64 = -17253.0 / 339200.0;
    const E6: f64 = 22.0 / 525.0;
    const E7: f64 = -1.0 / 40.0;

    let n = state.l.len();
    let y = &state.l;
    let stage = |coeffs: &[(f64, &Vec<f64>)]| -> SmolState {
        let mut l = y.clone();
        for (c, k) in coeffs {
            for i in 0..n {
                l[i] += h * c * k[i];
            }
        }
        SmolState { l, time: state.time }
    };

    let k1 = smol_rhs(state, rule);
    let k2 = smol_rhs(&stage(&[(A21, &k1)]), rule);
    let k3 = smol_rhs(&stage(&[(A31, &k1), (A32, &k2)]), rule);
    let k4 = smol_rhs(&stage(&[(A41, &k1), (A42, &k2), (A43, &k3)]), rule);
    let k5 = smol_rhs(&stage(&[(A51, &k1), (A52, &k2), (A53, &k3), (A54, &k4)]), rule);
    let k6 = smol_rhs(
        &stage(&[(A61, &k1), (A62, &k2), (A63, &k3), (A64, &k4), (A65, &k5)]),
        rule,
    );
    let mut y5 = y.clone();
    for i in 0..n {
        y5[i] += h * (B1 * k1[i] + B3 * k3[i] + B4 * k4[i] + B5 * k5[i] + B6 * k6[i]);
    }
    let next = SmolState { l: y5, time: state.time + h };
    let k7 = smol_rhs(&next, rule);

    let mut err_ratio: f64 = 0.0;
    for i in 0..n {
        let e = h
            * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] + E6 * k6[i] + E7 * k7[i]);
        let scale = ABS_TOL + rtol * state.l[i].abs().max(next.l[i].abs());
        err_ratio = err_ratio.max((e / scale).abs());
    }
    let negative = next.l.iter().any(|&v| v < -ABS_TOL);
    if err_ratio <= 1.0 && !negative {
        let mut next = next;
        for v in &mut next.l {
            if *v < 0.0 {
                *v = 0.0;
            }
        }
        StepResult::Accept { next, err_ratio: err_ratio.max(1e-8) }
    } else {
        StepResult::Reject { err_ratio: err_ratio.max(2.0) }
    }
}

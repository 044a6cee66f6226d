//! The probability `μ_k(p)` that `G(k, p)` is connected, computed exactly
//! (up to the requested precision) together with classical bounds and the
//! macroscopic asymptotics.
//!
//! The computation uses the first-component decomposition
//!
//! ```text
//! μ_k = 1 − Σ_{j=1}^{k−1} C(k−1, j−1) μ_j (1−p)^{j(k−j)},
//! ```
//!
//! summing over the size `j` of the component containing vertex 1.  When
//! `μ_k` is tiny the subtraction cancels catastrophically — for `p = t/N`
//! and `k ≈ N` the true value can sit hundreds of bits below the sum — so
//! the whole memo table is computed in multiprecision with a working
//! precision that escalates until every entry carries at least the requested
//! number of significant bits.  Binomial coefficients are exact integers.
//!
//! Bound helpers return natural logarithms (`f64`), which never underflow;
//! `μ_k` itself is kept in linear space as an MPFR value.

use rug::ops::Pow;
use rug::{Float, Integer};

use crate::{Error, Result};

/// Binary mantissa precision for the multiprecision paths.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PrecisionConfig {
    pub bits: u32,
}

impl Default for PrecisionConfig {
    fn default() -> Self {
        Self { bits: 256 }
    }
}

impl PrecisionConfig {
    pub fn new(bits: u32) -> Result<Self> {
        if bits < 53 {
            return Err(Error::param("bits", bits as f64));
        }
        Ok(Self { bits })
    }
}

/// Hard ceiling on the escalated working precision.
const MAX_WORK_BITS: u32 = 1 << 21;

/// Extra significant bits demanded beyond the requested precision.
const SIG_MARGIN: u32 = 8;

/// Memoized table of `μ_1(p), …, μ_kmax(p)`.
#[derive(Debug, Clone)]
pub struct MuTable {
    p: f64,
    bits: u32,
    work_bits: u32,
    mu: Vec<Float>,
}

impl MuTable {
    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn k_max(&self) -> usize {
        self.mu.len()
    }

    /// Requested precision: every entry carries at least this many
    /// significant bits (plus margin).
    pub fn requested_bits(&self) -> u32 {
        self.bits
    }

    /// Working precision the escalation loop settled on.
    pub fn work_bits(&self) -> u32 {
        self.work_bits
    }

    /// `μ_k(p)` as a multiprecision value, `1 ≤ k ≤ k_max`.
    pub fn mu(&self, k: usize) -> &Float {
        &self.mu[k - 1]
    }

    pub fn mu_f64(&self, k: usize) -> f64 {
        self.mu[k - 1].to_f64()
    }

    /// `log μ_k(p)` (natural log, f64-accurate, exponent-safe).
    pub fn ln_mu(&self, k: usize) -> f64 {
        let v = &self.mu[k - 1];
        if v.is_zero() {
            return f64::NEG_INFINITY;
        }
        Float::with_val(64, v.ln_ref()).to_f64()
    }
}

/// `ln(1 − p)`, stable for small `p`.
#[inline]
fn ln_q(p: f64) -> f64 {
    (-p).ln_1p()
}

/// Natural log of the spanning-tree lower bound
/// `k^{k−2} p^{k−1} (1−p)^{(k−1)(k−2)/2}` — a floor used to size the working
/// precision before anything is computed.
fn ln_lower_bound(k: u64, p: f64) -> f64 {
    if k == 1 {
        return 0.0;
    }
    let kf = k as f64;
    (kf - 2.0) * kf.ln() + (kf - 1.0) * p.ln() + (kf - 1.0) * (kf - 2.0) / 2.0 * ln_q(p)
}

/// Conservative exponent of the absolute noise floor of `μ_k` computed at
/// `work` bits: every term in the sum carries a handful of roundings, and
/// the chained error of earlier entries is absorbed into the `k²` factor.
fn noise_exp(k: usize, work: u32) -> i64 {
    let logk = (usize::BITS - k.leading_zeros()) as i64;
    -(work as i64) + 6 + 2 * logk
}

/// Computes the memo table `μ_1..μ_kmax` at precision `bits`, escalating the
/// working precision until every entry is significant to `bits` bits.
pub fn mu_table(k_max: usize, p: f64, prec: &PrecisionConfig) -> Result<MuTable> {
    if k_max == 0 {
        return Err(Error::param("k_max", 0.0));
    }
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::param("p", p));
    }
    let bits = PrecisionConfig::new(prec.bits)?.bits;
    let mut work = bits + 64;
    if p == 0.0 || p == 1.0 {
        // the recursion is exact at the endpoints (μ_k ∈ {0, 1})
        let mu = mu_pass(k_max, p, work);
        return Ok(MuTable { p, bits, work_bits: work, mu });
    }
    loop {
        let mu = mu_pass(k_max, p, work);
        let mut deficit: u32 = 0;
        for (i, v) in mu.iter().enumerate() {
            let k = i + 1;
            let need = bits as i64 + SIG_MARGIN as i64;
            let sig = match v.get_exp() {
                Some(e) if v.is_sign_positive() && !v.is_zero() => e as i64 - noise_exp(k, work),
                _ => i64::MIN,
            };
            if sig >= need {
                continue;
            }
            let d = if sig > i64::MIN {
                (need - sig) as u32
            } else {
                // value drowned in noise; size the retry from the
                // spanning-tree lower bound on μ_k
                let lb_bits = (-ln_lower_bound(k as u64, p) / std::f64::consts::LN_2).max(0.0);
                (lb_bits as i64 + need - (noise_exp(k, work) + work as i64)).max(64) as u32
            };
            deficit = deficit.max(d);
        }
        if deficit == 0 {
            return Ok(MuTable { p, bits, work_bits: work, mu });
        }
        work = work
            .checked_add(deficit.max(64).next_multiple_of(64))
            .ok_or(Error::PrecisionExhausted(MAX_WORK_BITS))?;
        if work > MAX_WORK_BITS {
            return Err(Error::PrecisionExhausted(MAX_WORK_BITS));
        }
    }
}

/// One straight evaluation of the recursion at fixed working precision.
fn mu_pass(k_max: usize, p: f64, work: u32) -> Vec<Float> {
    let q = Float::with_val(work, 1.0) - Float::with_val(work, p);
    let mut mu: Vec<Float> = Vec::with_capacity(k_max);
    mu.push(Float::with_val(work, 1));
    // binom[j] = C(k−1, j) for the current k, maintained as a Pascal row
    let mut binom: Vec<Integer> = vec![Integer::from(1)];
    for k in 2..=k_max {
        binom.push(Integer::from(1));
        for j in (1..binom.len() - 1).rev() {
            let lower = binom[j - 1].clone();
            binom[j] += lower;
        }
        let mut sum = Float::with_val(work, 0);
        for j in 1..k {
            let exponent = (j * (k - j)) as u32;
            let mut term = Float::with_val(work, &binom[j - 1]);
            term *= &mu[j - 1];
            term *= q.clone().pow(exponent);
            sum += term;
        }
        mu.push(Float::with_val(work, 1) - sum);
    }
    mu
}

/// Convenience wrapper: `μ_k(p)` as `f64` (the memo table is built up to
/// `k`).
pub fn mu_exact(k: usize, p: f64, prec: &PrecisionConfig) -> Result<f64> {
    Ok(mu_table(k, p, prec)?.mu_f64(k))
}

/// Spanning-tree bounds on `μ_k(p)` in natural-log space:
/// `log lower = log(k^{k−2} p^{k−1} (1−p)^{(k−1)(k−2)/2})`,
/// `log upper = log(k^{k−2} p^{k−1})`.
pub fn mu_bounds_tree(k: u64, p: f64) -> (f64, f64) {
    if k == 1 {
        return (0.0, 0.0);
    }
    let kf = k as f64;
    let upper = (kf - 2.0) * kf.ln() + (kf - 1.0) * p.ln();
    let lower = upper + (kf - 1.0) * (kf - 2.0) / 2.0 * ln_q(p);
    (lower, upper)
}

/// Complement upper bound `log μ_k ≤ (k−1) log(1 − (1−p)^k)`.
pub fn mu_upper_macro(k: u64, p: f64) -> f64 {
    if k == 1 {
        return 0.0;
    }
    let kq = k as f64 * ln_q(p);
    (k as f64 - 1.0) * (-f64::exp_m1(kq)).ln()
}

/// Log of the macroscopic connectivity asymptotics for a component of
/// `⌊xN⌋` vertices at `p = t/N`:
///
/// `log[(1 − xt/(e^{xt} − 1)) (1 − e^{−tx})^{xN}]`.
pub fn mu_macro_asymptotic(x: f64, t: f64, n: u64) -> Result<f64> {
    if !(x > 0.0 && x < 1.0) {
        return Err(Error::param("x", x));
    }
    if !(t > 0.0) || !t.is_finite() {
        return Err(Error::param("t", t));
    }
    let xt = x * t;
    let prefactor = 1.0 - xt / f64::exp_m1(xt);
    Ok(prefactor.ln() + x * n as f64 * (-f64::exp_m1(-xt)).ln())
}

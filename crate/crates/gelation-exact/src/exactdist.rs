//! The exact joint law of all component sizes of `G(N, p)`, the integer
//! partitions that index it, and brute-force oracles.
//!
//! For a configuration `ℓ` with `Σ k ℓ_k = N`,
//!
//! ```text
//! log P(A_N(ℓ)) = log N! + Σ_k [ ℓ_k log μ_k(p)
//!                              + ½ k(N−k) ℓ_k log(1−p)
//!                              − ℓ_k log k! − log ℓ_k! ].
//! ```
//!
//! Everything is accumulated in log space (the probabilities span hundreds
//! of orders of magnitude by `N = 40`); `μ_k` and the factorials come from
//! multiprecision values rounded once to `f64` logs.  Partition enumeration
//! streams in reverse-lexicographic part order, so the `p(N)`-sized state
//! space is never materialized.

use std::collections::BTreeMap;

use gelation::SizeHistogram;
use rug::{Float, Integer, Rational};

use crate::connectivity::{mu_table, MuTable, PrecisionConfig};
use crate::{Error, Result};

/// Largest `N` accepted by [`verify_normalization`] (`p(60) ≈ 10^6`).
pub const MAX_NORMALIZATION_N: u64 = 60;

/// Largest `N` accepted by [`exhaustive_oracle`] (at most `2^21` graphs).
pub const MAX_ORACLE_N: u64 = 7;

/// Natural logs of `0!..=n!`, accumulated in multiprecision and rounded
/// once.
fn ln_factorials(n: usize, work: u32) -> Vec<f64> {
    let mut out = Vec::with_capacity(n + 1);
    let mut acc = Float::with_val(work.max(64), 0);
    out.push(0.0);
    for i in 1..=n {
        acc += Float::with_val(work.max(64), i as f64).ln();
        out.push(acc.to_f64());
    }
    out
}

/// Per-size coefficients of the log-probability, reusable across many
/// configurations at the same `(N, p)`.
pub struct LogProbContext {
    n: u64,
    ln_fac: Vec<f64>,
    /// `coef[k] = log μ_k − log k! + ½ k(N−k) log(1−p)` (1-based).
    coef: Vec<f64>,
}

impl LogProbContext {
    /// Builds the coefficient table for configurations on `n` vertices with
    /// sizes up to `k_max`.
    pub fn new(n: u64, k_max: usize, p: f64, prec: &PrecisionConfig) -> Result<Self> {
        if !(0.0..1.0).contains(&p) {
            return Err(Error::param("p", p));
        }
        let table: MuTable = mu_table(k_max, p, prec)?;
        let work = table.work_bits();
        let ln_fac = ln_factorials((k_max as u64).max(n) as usize, work);
        let ln_q = (Float::with_val(work, 1.0) - Float::with_val(work, p))
            .ln()
            .to_f64();
        let coef = (1..=k_max)
            .map(|k| {
                table.ln_mu(k) - ln_fac[k] + 0.5 * (k as u64 * (n - k as u64)) as f64 * ln_q
            })
            .collect();
        Ok(Self { n, ln_fac, coef })
    }

    /// Log-probability of the configuration given as `(size, count)` runs.
    pub fn log_prob_runs(&self, runs: impl Iterator<Item = (u64, u64)>) -> f64 {
        let mut sum = self.ln_fac[self.n as usize];
        for (k, count) in runs {
            sum += count as f64 * self.coef[k as usize - 1] - self.ln_fac[count as usize];
        }
        sum
    }
}

/// `log P(A_N(ℓ))` for a single configuration.
///
/// `p = 1` is handled separately: the only configuration with positive mass
/// is the single component of size `N` (log-probability 0); every other one
/// gets `−∞`.
pub fn log_prob_config(hist: &SizeHistogram, p: f64, prec: &PrecisionConfig) -> Result<f64> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::param("p", p));
    }
    let n = hist.n_vertices();
    if p == 1.0 {
        let connected = hist.count(n) == 1;
        return Ok(if connected { 0.0 } else { f64::NEG_INFINITY });
    }
    let ctx = LogProbContext::new(n, hist.largest_size() as usize, p, prec)?;
    Ok(ctx.log_prob_runs(hist.iter()))
}

/// Streaming iterator over all integer partitions of `n`, in
/// reverse-lexicographic part order: `(n), (n−1,1), (n−2,2), (n−2,1,1), …,
/// (1,…,1)`.  Parts are descending within each partition.
pub struct PartitionIter {
    x: Vec<u64>,
    m: usize,
    h: usize,
    started: bool,
    done: bool,
}

impl PartitionIter {
    pub fn new(n: u64) -> Self {
        let mut x = vec![1u64; n.max(1) as usize];
        x[0] = n;
        Self { x, m: 1, h: 1, started: false, done: n == 0 }
    }

    /// Current partition as descending parts.
    fn current(&self) -> Vec<u64> {
        self.x[..self.m].to_vec()
    }
}

impl Iterator for PartitionIter {
    type Item = Vec<u64>;

    fn next(&mut self) -> Option<Self::Item> {
        if self.done {
            return None;
        }
        if !self.started {
            self.started = true;
            if self.x[0] == 1 {
                self.done = true;
            }
            return Some(self.current());
        }
        if self.x[0] == 1 {
            self.done = true;
            return None;
        }
        // ZS1 step (indices 1-based in the classical formulation)
        if self.x[self.h - 1] == 2 {
            self.m += 1;
            self.x[self.h - 1] = 1;
            self.h -= 1;
        } else {
            let r = self.x[self.h - 1] - 1;
            let mut t = (self.m - self.h + 1) as u64;
            self.x[self.h - 1] = r;
            while t >= r {
                self.h += 1;
                self.x[self.h - 1] = r;
                t -= r;
            }
            if t == 0 {
                self.m = self.h;
            } else {
                self.m = self.h + 1;
                if t > 1 {
                    self.h += 1;
                    self.x[self.h - 1] = t;
                }
            }
        }
        if self.x[0] == 1 {
            self.done = true;
        }
        Some(self.current())
    }
}

/// All size histograms on `n` vertices (one per integer partition of `n`).
pub fn enumerate_histograms(n: u64) -> impl Iterator<Item = SizeHistogram> {
    PartitionIter::new(n).map(|parts| {
        SizeHistogram::from_sizes(&parts).expect("partition parts are positive")
    })
}

/// Partition function `p(n)` by the pentagonal-number recurrence —
/// the counting oracle for the enumerator.
pub fn partition_count(n: u64) -> u64 {
    let n = n as usize;
    let mut p = vec![0u64; n + 1];
    p[0] = 1;
    for m in 1..=n {
        let mut total: i128 = 0;
        let mut k = 1i64;
        loop {
            let g1 = (k * (3 * k - 1) / 2) as usize;
            let g2 = (k * (3 * k + 1) / 2) as usize;
            if g1 > m && g2 > m {
                break;
            }
            let sign = if k % 2 == 0 { -1i128 } else { 1i128 };
            if g1 <= m {
                total += sign * p[m - g1] as i128;
            }
            if g2 <= m {
                total += sign * p[m - g2] as i128;
            }
            k += 1;
        }
        p[m] = total as u64;
    }
    p[n]
}

/// Converts runs of equal descending parts to `(size, count)` pairs.
fn runs_of(parts: &[u64]) -> impl Iterator<Item = (u64, u64)> + '_ {
    let mut idx = 0;
    std::iter::from_fn(move || {
        if idx >= parts.len() {
            return None;
        }
        let k = parts[idx];
        let mut count = 0;
        while idx < parts.len() && parts[idx] == k {
            idx += 1;
            count += 1;
        }
        Some((k, count))
    })
}

/// Brute force over all `2^{N(N−1)/2}` graphs: the exact distribution of the
/// size histogram, as exact rationals in `p` evaluated to `f64`.
///
/// The `f64` argument is converted to a rational exactly, so the masses sum
/// to exactly 1 before the final rounding.
pub fn exhaustive_oracle(n: u64, p: f64) -> Result<BTreeMap<SizeHistogram, f64>> {
    if n == 0 || n > MAX_ORACLE_N {
        return Err(Error::TooLarge(format!("oracle needs 1 ≤ N ≤ {MAX_ORACLE_N}, got {n}")));
    }
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::param("p", p));
    }
    let nv = n as usize;
    let edges: Vec<(u32, u32)> = (0..nv as u32)
        .flat_map(|i| ((i + 1)..nv as u32).map(move |j| (i, j)))
        .collect();
    let m = edges.len();

    // #graphs with a given histogram and edge count
    let mut counts: BTreeMap<Vec<u64>, Vec<u64>> = BTreeMap::new();
    for mask in 0u64..(1u64 << m) {
        let mut parent: [u32; 8] = [0, 1, 2, 3, 4, 5, 6, 7];
        fn find(parent: &mut [u32; 8], mut x: u32) -> u32 {
            while parent[x as usize] != x {
                parent[x as usize] = parent[parent[x as usize] as usize];
                x = parent[x as usize];
            }
            x
        }
        for (b, &(i, j)) in edges.iter().enumerate() {
            if mask >> b & 1 == 1 {
                let (ri, rj) = (find(&mut parent, i), find(&mut parent, j));
                if ri != rj {
                    parent[ri as usize] = rj;
                }
            }
        }
        let mut sizes = [0u64; 8];
        for v in 0..nv as u32 {
            sizes[find(&mut parent, v) as usize] += 1;
        }
        let mut key: Vec<u64> = sizes.iter().copied().filter(|&s| s > 0).collect();
        key.sort_unstable_by(|a, b| b.cmp(a));
        counts.entry(key).or_insert_with(|| vec![0; m + 1])[mask.count_ones() as usize] += 1;
    }

    let p_rat = Rational::from_f64(p).ok_or(Error::param("p", p))?;
    let q_rat = Rational::from(1) - &p_rat;
    let mut pow_p = vec![Rational::from(1)];
    let mut pow_q = vec![Rational::from(1)];
    for i in 1..=m {
        pow_p.push(Rational::from(&pow_p[i - 1] * &p_rat));
        pow_q.push(Rational::from(&pow_q[i - 1] * &q_rat));
    }

    let mut out = BTreeMap::new();
    let mut total = Rational::from(0);
    for (key, by_edges) in counts {
        let mut mass = Rational::from(0);
        for (e, &cnt) in by_edges.iter().enumerate() {
            if cnt > 0 {
                mass += Rational::from(&pow_p[e] * &pow_q[m - e]) * Integer::from(cnt);
            }
        }
        total += &mass;
        out.insert(SizeHistogram::from_sizes(&key)?, mass.to_f64());
    }
    debug_assert_eq!(total, 1);
    Ok(out)
}

/// `|logsumexp_ℓ log P(A_N(ℓ))|` over every partition of `n` — the distance
/// of the total mass from 1, evaluated stably in log space.
pub fn verify_normalization(n: u64, p: f64, prec: &PrecisionConfig) -> Result<f64> {
    if n == 0 || n > MAX_NORMALIZATION_N {
        return Err(Error::TooLarge(format!(
            "normalization sum needs 1 ≤ N ≤ {MAX_NORMALIZATION_N}, got {n}"
        )));
    }
    let ctx = LogProbContext::new(n, n as usize, p, prec)?;
    // streaming logsumexp with a running maximum
    let mut max = f64::NEG_INFINITY;
    let mut acc = 0.0f64;
    for parts in PartitionIter::new(n) {
        let lp = ctx.log_prob_runs(runs_of(&parts));
        if lp <= max {
            acc += (lp - max).exp();
        } else {
            acc = acc * (max - lp).exp() + 1.0;
            max = lp;
        }
    }
    Ok((max + acc.ln()).abs())
}

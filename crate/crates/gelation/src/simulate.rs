//! Exact Monte Carlo samplers for component sizes: the Erdős–Rényi graph
//! `G(N, p)` via union-find, and the Marcus–Lushnikov multiplicative
//! coalescent via an exact event-driven simulation.
//!
//! With `p = 1 − e^{−t/N}` the two models produce identically distributed
//! size vectors at time `t`, which the summary statistics here let you check
//! empirically.
//!
//! Reproducibility: sample `i` of a run draws from its own
//! `ChaCha12Rng { seed, stream = i }`, so results are bit-identical for a
//! fixed seed regardless of the worker count, and reductions happen in
//! sample order.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;
use rand_distr::{Binomial, Distribution};
use std::collections::HashSet;

use crate::error::{Error, Result};
use crate::measures::{MesoCutoffs, SizeHistogram};

/// Union-find over `0..n` with union by size and path halving.
#[derive(Debug, Clone)]
pub struct DisjointSet {
    parent: Vec<u32>,
    size: Vec<u32>,
    components: usize,
}

impl DisjointSet {
    pub fn new(n: usize) -> Self {
        Self {
            parent: (0..n as u32).collect(),
            size: vec![1; n],
            components: n,
        }
    }

    pub fn find(&mut self, mut x: u32) -> u32 {
        while self.parent[x as usize] != x {
            self.parent[x as usize] = self.parent[self.parent[x as usize] as usize];
            x = self.parent[x as usize];
        }
        x
    }

    /// Merges the sets of `a` and `b`; returns false if already joined.
    pub fn union(&mut self, a: u32, b: u32) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        let (big, small) = if self.size[ra as usize] >= self.size[rb as usize] {
            (ra, rb)
        } else {
            (rb, ra)
        };
        self.parent[small as usize] = big;
        self.size[big as usize] += self.size[small as usize];
        self.components -= 1;
        true
    }

    pub fn component_size(&mut self, x: u32) -> u32 {
        let r = self.find(x);
        self.size[r as usize]
    }

    pub fn num_components(&self) -> usize {
        self.components
    }

    /// Collapses the structure into a size histogram.
    pub fn into_histogram(mut self) -> SizeHistogram {
        let n = self.parent.len();
        let mut sizes = Vec::with_capacity(self.components);
        for x in 0..n as u32 {
            if self.find(x) == x {
                sizes.push(self.size[x as usize] as u64);
            }
        }
        SizeHistogram::from_sizes(&sizes).expect("nonempty by construction")
    }
}

/// Draws the component sizes of one `G(N, p)` sample.
///
/// The edge count is drawn as `Binomial(N(N−1)/2, p)` and that many distinct
/// unordered pairs are then placed by rejection, which reproduces the
/// Bernoulli edge law exactly in expected time `O(#edges)`.
pub fn sample_er_components(n: u64, p: f64, rng: &mut impl Rng) -> Result<SizeHistogram> {
    if n == 0 {
        return Err(Error::param("n", 0.0));
    }
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::param("p", p));
    }
    if n == 1 {
        return SizeHistogram::from_sizes(&[1]);
    }
    let pairs = n * (n - 1) / 2;
    let m = Binomial::new(pairs, p).map_err(|_| Error::param("p", p))?.sample(rng);
    let mut ds = DisjointSet::new(n as usize);
    let mut chosen = HashSet::with_capacity(m as usize * 2);
    let mut placed = 0u64;
    while placed < m {
        let a = rng.random_range(0..n as u32);
        let b = rng.random_range(0..n as u32);
        if a == b {
            continue;
        }
        let key = (a.min(b) as u64) * n + a.max(b) as u64;
        if chosen.insert(key) {
            ds.union(a, b);
            placed += 1;
        }
    }
    Ok(ds.into_histogram())
}

/// Simulates the Marcus–Lushnikov coalescent with kernel
/// `K_N(m, m̃) = m·m̃/N` from the monodisperse state up to time `t_end`.
///
/// Event times are exponential with the exact total rate
/// `(N² − Σ m_i²)/(2N)`; the merging pair is selected by drawing two uniform
/// vertex labels and accepting when they lie in distinct clusters, which
/// picks cluster pairs with probability proportional to `m_i·m_j`.
pub fn simulate_ml(n: u64, t_end: f64, rng: &mut impl Rng) -> Result<SizeHistogram> {
    if n == 0 {
        return Err(Error::param("n", 0.0));
    }
    if !(t_end >= 0.0) || !t_end.is_finite() {
        return Err(Error::param("t_end", t_end));
    }
    let mut ds = DisjointSet::new(n as usize);
    let mut sum_sq = n as f64; // Σ m_i² with all masses 1
    let n_f = n as f64;
    let mut time = 0.0;
    while ds.num_components() > 1 {
        let total_rate = (n_f * n_f - sum_sq) / (2.0 * n_f);
        if total_rate <= 0.0 {
            break;
        }
        let u: f64 = rng.random();
        time += -u.max(f64::MIN_POSITIVE).ln() / total_rate;
        if time > t_end {
            break;
        }
        loop {
            let a = rng.random_range(0..n as u32);
            let b = rng.random_range(0..n as u32);
            let (ra, rb) = (ds.find(a), ds.find(b));
            if ra != rb {
                let (ma, mb) = (ds.size[ra as usize] as f64, ds.size[rb as usize] as f64);
                sum_sq += 2.0 * ma * mb;
                ds.union(ra, rb);
                break;
            }
        }
    }
    Ok(ds.into_histogram())
}

/// Which sampler a Monte Carlo run drives.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Model {
    /// `G(N, p)` with `p = t_N / N`.
    ErdosRenyi,
    /// Marcus–Lushnikov at time `t_N` (distributionally `G(N, 1 − e^{−t/N})`).
    MarcusLushnikov,
}

/// Parameters of a Monte Carlo run.
#[derive(Debug, Clone)]
pub struct SimConfig {
    pub n_vertices: u64,
    /// Coupling parameter `t`.
    pub t: f64,
    /// Per-`N` offset `δ_N`: samplers use `t_N = t + t_offset`.  Default 0.
    pub t_offset: f64,
    pub samples: u64,
    pub seed: u64,
    pub workers: usize,
}

impl SimConfig {
    pub fn new(n_vertices: u64, t: f64, samples: u64, seed: u64) -> Result<Self> {
        if n_vertices == 0 {
            return Err(Error::param("n_vertices", 0.0));
        }
        if !(t > 0.0) || !t.is_finite() {
            return Err(Error::param("t", t));
        }
        if samples == 0 {
            return Err(Error::param("samples", 0.0));
        }
        Ok(Self { n_vertices, t, t_offset: 0.0, samples, seed, workers: 1 })
    }

    pub fn with_workers(mut self, workers: usize) -> Self {
        self.workers = workers.max(1);
        self
    }

    pub fn t_n(&self) -> f64 {
        self.t + self.t_offset
    }

    /// The RNG for sample `i`: fixed key, per-sample stream.
    pub fn rng_for_sample(&self, i: u64) -> ChaCha12Rng {
        let mut rng = ChaCha12Rng::seed_from_u64(self.seed);
        rng.set_stream(i);
        rng
    }
}

/// Per-statistic mean and standard error over independent samples.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeanSe {
    pub mean: f64,
    pub se: f64,
}

fn mean_se(values: &[f64]) -> MeanSe {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    if values.len() < 2 {
        return MeanSe { mean, se: 0.0 };
    }
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1.0);
    MeanSe { mean, se: (var / n).sqrt() }
}

/// Aggregated statistics of a Monte Carlo run.
#[derive(Debug, Clone)]
pub struct SampleSummary {
    pub n_samples: u64,
    /// Largest component fraction `S_1/N`.
    pub largest: MeanSe,
    /// Microscopic weights `λ̂_k = ℓ_k/N` for `k = 1..=r` (index 0 is k = 1).
    pub lambda: Vec<MeanSe>,
    /// Mesoscopic vertex fraction for the configured cutoffs.
    pub meso: MeanSe,
    /// Raw per-sample largest fractions, in sample order.
    pub largest_samples: Vec<f64>,
}

fn summarize(per_sample: Vec<(f64, Vec<f64>, f64)>, r: usize) -> SampleSummary {
    let n_samples = per_sample.len() as u64;
    let largest_samples: Vec<f64> = per_sample.iter().map(|s| s.0).collect();
    let lambda = (0..r)
        .map(|i| mean_se(&per_sample.iter().map(|s| s.1[i]).collect::<Vec<_>>()))
        .collect();
    let meso = mean_se(&per_sample.iter().map(|s| s.2).collect::<Vec<_>>());
    SampleSummary {
        n_samples,
        largest: mean_se(&largest_samples),
        lambda,
        meso,
        largest_samples,
    }
}

fn one_sample(cfg: &SimConfig, cut: &MesoCutoffs, model: Model, i: u64) -> Result<(f64, Vec<f64>, f64)> {
    let mut rng = cfg.rng_for_sample(i);
    let n = cfg.n_vertices;
    let hist = match model {
        Model::ErdosRenyi => sample_er_components(n, cfg.t_n() / n as f64, &mut rng)?,
        Model::MarcusLushnikov => simulate_ml(n, cfg.t_n(), &mut rng)?,
    };
    let largest = hist.largest_size() as f64 / n as f64;
    let lambda = hist.micro_measure(cut.r).weights().to_vec();
    let meso = hist.meso_mass(cut)?;
    Ok((largest, lambda, meso))
}

/// Runs `cfg.samples` independent samples and aggregates them.
///
/// Deterministic for fixed `(seed, samples)` independent of `workers`.
pub fn mc_summary(cfg: &SimConfig, cut: &MesoCutoffs, model: Model) -> Result<SampleSummary> {
    let per_sample = run_samples(cfg, |i| one_sample(cfg, cut, model, i))?;
    Ok(summarize(per_sample, cut.r as usize))
}

/// Estimate of `−(1/N) log P(event)` from Monte Carlo hits.
#[derive(Debug, Clone, Copy)]
pub struct EventEstimate {
    pub hits: u64,
    pub samples: u64,
    /// `−(1/N) log(hits/samples)`; `None` when there were no hits.
    pub rate_estimate: Option<f64>,
    /// Delta-method standard error of the rate estimate.
    pub stderr: Option<f64>,
}

/// Estimates the exponential decay rate of an event's probability.
pub fn mc_event_logprob<F>(cfg: &SimConfig, model: Model, event: F) -> Result<EventEstimate>
where
    F: Fn(&SizeHistogram) -> bool + Sync,
{
    let hits_vec = run_samples(cfg, |i| {
        let mut rng = cfg.rng_for_sample(i);
        let n = cfg.n_vertices;
        let hist = match model {
            Model::ErdosRenyi => sample_er_components(n, cfg.t_n() / n as f64, &mut rng)?,
            Model::MarcusLushnikov => simulate_ml(n, cfg.t_n(), &mut rng)?,
        };
        Ok(u64::from(event(&hist)))
    })?;
    let hits: u64 = hits_vec.iter().sum();
    let samples = cfg.samples;
    let n = cfg.n_vertices as f64;
    if hits == 0 {
        return Ok(EventEstimate { hits, samples, rate_estimate: None, stderr: None });
    }
    let p_hat = hits as f64 / samples as f64;
    let rate = -p_hat.ln() / n;
    let se = ((1.0 - p_hat) / (p_hat * samples as f64)).sqrt() / n;
    Ok(EventEstimate { hits, samples, rate_estimate: Some(rate), stderr: Some(se) })
}

/// Maps sample indices `0..cfg.samples` through `f`, optionally in parallel,
/// returning results in sample order.
fn run_samples<T, F>(cfg: &SimConfig, f: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(u64) -> Result<T> + Sync,
{
    #[cfg(feature = "parallel")]
    {
        if cfg.workers > 1 {
            use rayon::prelude::*;
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(cfg.workers)
                .build()
                .map_err(|_| Error::param("workers", cfg.workers as f64))?;
            return pool.install(|| (0..cfg.samples).into_par_iter().map(&f).collect());
        }
    }
    (0..cfg.samples).map(f).collect()
}

/// Two-sample Kolmogorov–Smirnov statistic `sup_x |F_a(x) − F_b(x)|`.
pub fn ks_statistic(a: &[f64], b: &[f64]) -> f64 {
    let mut xa = a.to_vec();
    let mut xb = b.to_vec();
    xa.sort_by(|u, v| u.partial_cmp(v).unwrap());
    xb.sort_by(|u, v| u.partial_cmp(v).unwrap());
    let (na, nb) = (xa.len() as f64, xb.len() as f64);
    let (mut i, mut j) = (0usize, 0usize);
    let mut d: f64 = 0.0;
    while i < xa.len() && j < xb.len() {
        let x = xa[i].min(xb[j]);
        while i < xa.len() && xa[i] <= x {
            i += 1;
        }
        while j < xb.len() && xb[j] <= x {
            j += 1;
        }
        d = d.max((i as f64 / na - j as f64 / nb).abs());
    }
    d
}

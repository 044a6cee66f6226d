//! Domain types for component-size configurations and their micro/macro/meso
//! empirical measures.
//!
//! A configuration of component sizes `S_1 ≥ S_2 ≥ … ≥ 1` with `Σ S_i = N`
//! is stored as a [`SizeHistogram`]: the map `k ↦ ℓ_k` counting components of
//! size `k`, so that `Σ_k k·ℓ_k = N`.  The empirical measures derived from it
//! are
//!
//! ```text
//! micro:  λ_k = ℓ_k / N          for k ≤ R,
//! macro:  one atom S_i/N         for every component with S_i ≥ εN,
//! meso:   (1/N) Σ_{R<k<εN} k·ℓ_k (a single number, the vertex fraction).
//! ```
//!
//! Boundary convention: a component of size exactly `R` counts as
//! microscopic, a component of size `≥ ⌈εN⌉` as macroscopic, and the open
//! band in between as mesoscopic, so the three masses always partition 1
//! exactly.
//!
//! All types are immutable after construction and all operations are pure.

use std::collections::BTreeMap;

use crate::error::{Error, Result};

/// Mass-sum slack tolerated on construction of [`MicroMeasure`] and
/// [`MacroMeasure`], absorbing floating-point dust in inputs.
pub const MASS_TOL: f64 = 1e-12;

/// Counts of connected components by size: `counts[k] = ℓ_k`, with the
/// invariant `Σ_k k·ℓ_k = n_vertices` and no zero counts stored.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SizeHistogram {
    counts: BTreeMap<u64, u64>,
    n_vertices: u64,
}

impl SizeHistogram {
    /// Builds the histogram of a list of component sizes.
    ///
    /// `N` is the sum of the sizes; the empty list is rejected.
    pub fn from_sizes(sizes: &[u64]) -> Result<Self> {
        if sizes.is_empty() {
            return Err(Error::EmptySizes);
        }
        let mut counts = BTreeMap::new();
        let mut n = 0u64;
        for &s in sizes {
            if s == 0 {
                return Err(Error::ZeroSize);
            }
            *counts.entry(s).or_insert(0) += 1;
            n += s;
        }
        Ok(Self { counts, n_vertices: n })
    }

    /// Builds a histogram directly from `k ↦ ℓ_k` counts; zero counts are
    /// dropped, `N` is computed as `Σ k·ℓ_k`.
    pub fn from_counts(counts: BTreeMap<u64, u64>) -> Result<Self> {
        let counts: BTreeMap<u64, u64> =
            counts.into_iter().filter(|&(_, c)| c > 0).collect();
        if counts.is_empty() {
            return Err(Error::EmptySizes);
        }
        if counts.contains_key(&0) {
            return Err(Error::ZeroSize);
        }
        let n = counts.iter().map(|(&k, &c)| k * c).sum();
        Ok(Self { counts, n_vertices: n })
    }

    pub fn n_vertices(&self) -> u64 {
        self.n_vertices
    }

    /// Number of components of size `k` (zero if absent).
    pub fn count(&self, k: u64) -> u64 {
        self.counts.get(&k).copied().unwrap_or(0)
    }

    /// Iterates over `(k, ℓ_k)` pairs in increasing size order.
    pub fn iter(&self) -> impl Iterator<Item = (u64, u64)> + '_ {
        self.counts.iter().map(|(&k, &c)| (k, c))
    }

    pub fn num_components(&self) -> u64 {
        self.counts.values().sum()
    }

    pub fn largest_size(&self) -> u64 {
        self.counts.keys().next_back().copied().unwrap_or(0)
    }

    /// Expands the histogram back into a descending list of sizes.
    pub fn sizes_descending(&self) -> Vec<u64> {
        let mut out = Vec::with_capacity(self.num_components() as usize);
        for (&k, &c) in self.counts.iter().rev() {
            out.extend(std::iter::repeat(k).take(c as usize));
        }
        out
    }

    /// Microscopic empirical measure truncated at `R`: `λ_k = ℓ_k/N` for
    /// `k ≤ R`.
    pub fn micro_measure(&self, r: u64) -> MicroMeasure {
        let n = self.n_vertices as f64;
        let weights = (1..=r).map(|k| self.count(k) as f64 / n).collect();
        // mass ≤ 1 by construction
        MicroMeasure { weights }
    }

    /// Smallest integer size that counts as macroscopic for threshold `εN`.
    ///
    /// The threshold is snapped to an integer with a 1e-9 guard so that
    /// binary products like `0.1 * 100 = 10.000000000000002` classify size 10
    /// as macroscopic.
    pub fn macro_cut(&self, eps: f64) -> u64 {
        (eps * self.n_vertices as f64 - 1e-9).ceil().max(1.0) as u64
    }

    /// Macroscopic empirical measure: one atom `S_i/N` per component with
    /// `S_i ≥ εN`, sorted descending.
    pub fn macro_measure(&self, eps: f64) -> Result<MacroMeasure> {
        if !(eps > 0.0 && eps < 1.0) {
            return Err(Error::param("eps", eps));
        }
        let cut = self.macro_cut(eps);
        let n = self.n_vertices as f64;
        let mut atoms = Vec::new();
        for (&k, &c) in self.counts.range(cut..).rev() {
            atoms.extend(std::iter::repeat(k as f64 / n).take(c as usize));
        }
        MacroMeasure::new(atoms)
    }

    /// Fraction of vertices in components of size strictly between `R` and
    /// `εN`.
    pub fn meso_mass(&self, cut: &MesoCutoffs) -> Result<f64> {
        if (cut.r as f64) >= cut.eps * self.n_vertices as f64 {
            return Err(Error::BadCutoffs { r: cut.r, eps: cut.eps, n: self.n_vertices });
        }
        let upper = self.macro_cut(cut.eps);
        if cut.r + 1 >= upper {
            return Ok(0.0);
        }
        let mass: u64 = self
            .counts
            .range(cut.r + 1..upper)
            .map(|(&k, &c)| k * c)
            .sum();
        Ok(mass as f64 / self.n_vertices as f64)
    }
}

/// Truncated microscopic weight sequence `λ_1, …, λ_K` with
/// `Σ k·λ_k ≤ 1` (up to [`MASS_TOL`]).
#[derive(Debug, Clone, PartialEq)]
pub struct MicroMeasure {
    weights: Vec<f64>,
}

impl MicroMeasure {
    pub fn new(weights: Vec<f64>) -> Result<Self> {
        let mut mass = 0.0;
        for (i, &w) in weights.iter().enumerate() {
            if !(w >= 0.0) || !w.is_finite() {
                return Err(Error::BadWeight { k: i as u64 + 1, value: w });
            }
            mass += (i + 1) as f64 * w;
        }
        if mass > 1.0 + MASS_TOL {
            return Err(Error::MassExceedsOne(mass));
        }
        Ok(Self { weights })
    }

    /// The zero measure with truncation `k`.
    pub fn zero(k: usize) -> Self {
        Self { weights: vec![0.0; k] }
    }

    pub fn truncation(&self) -> usize {
        self.weights.len()
    }

    /// `λ_k` for 1-based `k`; zero beyond the truncation.
    pub fn weight(&self, k: u64) -> f64 {
        if k == 0 {
            return 0.0;
        }
        self.weights.get(k as usize - 1).copied().unwrap_or(0.0)
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Total mass `c_Λ = Σ k·λ_k`.
    pub fn total_mass(&self) -> f64 {
        self.weights
            .iter()
            .enumerate()
            .map(|(i, &w)| (i + 1) as f64 * w)
            .sum()
    }

    /// Cut-off metric `d_R(Λ, Λ̃) = Σ_{k≤R} 2^{-k} |λ_k − λ̃_k|`.
    pub fn distance(&self, other: &Self, r: u64) -> f64 {
        (1..=r)
            .map(|k| 0.5f64.powi(k.min(1100) as i32) * (self.weight(k) - other.weight(k)).abs())
            .sum()
    }
}

/// Finite list of macroscopic atoms in `(0, 1]`, sorted descending, with
/// total `Σ α_j ≤ 1` (up to [`MASS_TOL`]).  Equal atoms are kept with
/// multiplicity.
#[derive(Debug, Clone, PartialEq)]
pub struct MacroMeasure {
    atoms: Vec<f64>,
}

impl MacroMeasure {
    pub fn new(mut atoms: Vec<f64>) -> Result<Self> {
        let mut mass = 0.0;
        for &a in &atoms {
            if !(a > 0.0 && a <= 1.0) {
                return Err(Error::BadAtom(a));
            }
            mass += a;
        }
        if mass > 1.0 + MASS_TOL {
            return Err(Error::MassExceedsOne(mass));
        }
        atoms.sort_by(|a, b| b.partial_cmp(a).unwrap());
        Ok(Self { atoms })
    }

    pub fn empty() -> Self {
        Self { atoms: Vec::new() }
    }

    pub fn atoms(&self) -> &[f64] {
        &self.atoms
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    /// Largest atom, or 0 for the empty measure.
    pub fn largest(&self) -> f64 {
        self.atoms.first().copied().unwrap_or(0.0)
    }

    /// Total mass `c_α = Σ α_j`.
    pub fn total_mass(&self) -> f64 {
        self.atoms.iter().sum()
    }

    /// Cut-off metric `D_ε(α, α̃) = Σ_i 2^{-i} |α_i − α̃_i| 1{α_i ∨ α̃_i ≥ ε}`,
    /// comparing descending atom lists padded with zeros.
    pub fn distance(&self, other: &Self, eps: f64) -> f64 {
        let n = self.atoms.len().max(other.atoms.len());
        let mut d = 0.0;
        for i in 0..n {
            let a = self.atoms.get(i).copied().unwrap_or(0.0);
            let b = other.atoms.get(i).copied().unwrap_or(0.0);
            if a.max(b) >= eps {
                d += 0.5f64.powi(i.min(1100) as i32 + 1) * (a - b).abs();
            }
        }
        d
    }
}

/// Cut parameters for the mesoscopic band `R < k < εN`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MesoCutoffs {
    pub r: u64,
    pub eps: f64,
}

impl MesoCutoffs {
    pub fn new(r: u64, eps: f64) -> Result<Self> {
        if r == 0 {
            return Err(Error::param("R", r as f64));
        }
        if !(eps > 0.0 && eps < 1.0) {
            return Err(Error::param("eps", eps));
        }
        Ok(Self { r, eps })
    }

    /// Cube-root defaults `R = ⌈N^{1/3}⌉`, `ε = N^{-1/3}`, satisfying
    /// `1 ≪ R < εN ≪ N`.
    pub fn cube_root(n: u64) -> Self {
        let r = (n as f64).cbrt().ceil() as u64;
        let eps = (n as f64).powf(-1.0 / 3.0);
        Self { r, eps }
    }
}

//! Validated Schmidt-coefficient vectors and single-copy quantities:
//! Ky-Fan norms, majorization, the star conversion distance, and the
//! pure-state monotones `E_(k)`.

use crate::math::{fuzzy_ge, KahanSum, TOL};
use crate::{Error, Result};

/// Entries at or below this threshold count as true zeros when
/// determining the Schmidt rank.
pub const ZERO_THRESHOLD: f64 = 1e-15;

/// Largest tolerated deviation of the entry sum from 1.
pub const NORM_TOL: f64 = 1e-9;

/// A probability vector in non-increasing order, holding the Schmidt
/// coefficients of a pure bipartite state. Zero entries are allowed and
/// participate in padding conventions.
#[derive(Debug, Clone, PartialEq)]
pub struct ProbVec {
    entries: Vec<f64>,
    schmidt_rank: usize,
}

impl ProbVec {
    /// Validates, clamps, and sorts `values` into a `ProbVec`.
    ///
    /// Input order is irrelevant. Entries in `[-1e-12, 0)` are clamped to
    /// zero; anything more negative is rejected, as is a sum farther than
    /// `1e-9` from 1.
    pub fn new(values: &[f64]) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::InvalidInput("empty probability vector".into()));
        }
        let mut entries = Vec::with_capacity(values.len());
        for &v in values {
            if !v.is_finite() {
                return Err(Error::InvalidInput(format!("non-finite entry {v}")));
            }
            if v < -1e-12 {
                return Err(Error::InvalidInput(format!("negative entry {v}")));
            }
            entries.push(v.clamp(0.0, 1.0));
        }
        let mut sum = KahanSum::new();
        for &v in values {
            sum.add(v);
        }
        if (sum.value() - 1.0).abs() > NORM_TOL {
            return Err(Error::InvalidInput(format!(
                "entries sum to {}, expected 1 within {NORM_TOL}",
                sum.value()
            )));
        }
        entries.sort_unstable_by(|a, b| b.total_cmp(a));
        let schmidt_rank = entries.iter().filter(|&&v| v > ZERO_THRESHOLD).count();
        Ok(Self {
            entries,
            schmidt_rank,
        })
    }

    pub fn entries(&self) -> &[f64] {
        &self.entries
    }

    /// Number of entries, zeros included.
    pub fn dim(&self) -> usize {
        self.entries.len()
    }

    /// Number of entries strictly above [`ZERO_THRESHOLD`].
    pub fn schmidt_rank(&self) -> usize {
        self.schmidt_rank
    }

    /// Ky-Fan norm `‖p‖_(k)`: sum of the `k` largest entries.
    pub fn ky_fan(&self, k: usize) -> Result<f64> {
        if k > self.dim() {
            return Err(Error::OutOfRange(format!(
                "k = {k} exceeds dimension {}",
                self.dim()
            )));
        }
        let mut sum = KahanSum::new();
        for &v in &self.entries[..k] {
            sum.add(v);
        }
        Ok(sum.value())
    }

    /// Ky-Fan norm with zero padding beyond the dimension.
    pub(crate) fn ky_fan_padded(&self, k: usize) -> f64 {
        self.ky_fan(k.min(self.dim())).expect("clamped index")
    }

    /// `E_(k) = 1 − ‖p‖_(k)`, the pure-state conversion monotone.
    pub fn e_k(&self, k: usize) -> Result<f64> {
        if k == 0 || k > self.dim() {
            return Err(Error::OutOfRange(format!(
                "k = {k} outside [1, {}]",
                self.dim()
            )));
        }
        Ok((1.0 - self.ky_fan(k)?).max(0.0))
    }

    /// Squared purified conversion distance from the maximally entangled
    /// state of dimension `m` to the pure state with this spectrum:
    /// `P²(Φ_m → ψ) = E_(min(m, dim))`.
    pub fn p2_cost_pure(&self, m: usize) -> Result<f64> {
        if m == 0 {
            return Err(Error::OutOfRange("m must be positive".into()));
        }
        self.e_k(m.min(self.dim()))
    }
}

/// `p ≻ q`: every Ky-Fan norm of `p` dominates that of `q`, shorter
/// vector zero-padded.
pub fn majorizes(p: &ProbVec, q: &ProbVec) -> bool {
    let dim = p.dim().max(q.dim());
    let mut cum_p = KahanSum::new();
    let mut cum_q = KahanSum::new();
    for k in 0..dim {
        if k < p.dim() {
            cum_p.add(p.entries[k]);
        }
        if k < q.dim() {
            cum_q.add(q.entries[k]);
        }
        if !fuzzy_ge(cum_p.value(), cum_q.value()) {
            return false;
        }
    }
    true
}

/// Star conversion distance for pure-state LOCC conversion with spectra
/// `p → q`: `max_{k ∈ [sr(p)]} (‖p‖_(k) − ‖q‖_(k))`, clamped at zero.
///
/// Vectors of different lengths follow the separable-ancilla padding
/// convention (zeros appended to the shorter one).
pub fn t_star(p: &ProbVec, q: &ProbVec) -> f64 {
    t_star_with_argmax(p, q).0
}

/// As [`t_star`], also returning the smallest maximizing `k`.
pub fn t_star_with_argmax(p: &ProbVec, q: &ProbVec) -> (f64, usize) {
    let mut cum_p = KahanSum::new();
    let mut cum_q = KahanSum::new();
    let mut best = f64::NEG_INFINITY;
    let mut best_k = 1;
    for k in 1..=p.schmidt_rank() {
        cum_p.add(p.entries[k - 1]);
        if k <= q.dim() {
            cum_q.add(q.entries[k - 1]);
        }
        let gap = cum_p.value() - cum_q.value();
        if gap > best + TOL {
            best = gap;
            best_k = k;
        }
    }
    (best.clamp(0.0, 1.0), best_k)
}

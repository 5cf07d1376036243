//! Compressed spectrum of `p^⊗n` and polynomial-time Ky-Fan/threshold
//! queries on it.
//!
//! The n-fold product distribution of a `d`-entry vector has `d^n`
//! entries but only `C(n+d−1, d−1)` distinct values, one per composition
//! `n₁+…+n_d = n`; the value `Π pᵢ^{nᵢ}` repeats `n!/(n₁!…n_d!)` times.
//! Grouping entries by value gives blocks `(sᵢ, vᵢ)` with `s₁ > s₂ > …`,
//! cumulative counts `Nᵢ = Σ_{j≤i} vⱼ` and cumulative masses
//! `Pᵢ = Σ_{j≤i} vⱼ·sⱼ`. Every Ky-Fan prefix sum then interpolates
//! linearly inside a block:
//!
//! ```text
//! ‖p^⊗n‖_(k) = s_{j} · (k − N_{j−1}) + P_{j−1}   for N_{j−1} ≤ k ≤ N_j
//! ```
//!
//! Multiplicities are exact big integers (multinomials overflow u64 near
//! n ≈ 60). Values are carried in log space so that masses `vᵢ·sᵢ`
//! survive copy counts where `sᵢ` itself underflows to zero; cumulative
//! masses use compensated summation.

use num_bigint::{BigInt, BigUint};
use num_traits::{One, Zero};

use crate::math::{
    biguint_pow, ceil_to_bigint, clamp_to_range, exp_to_biguint, floor_to_bigint, fuzzy_ge,
    fuzzy_gt, ln_big, KahanSum, IDX_TOL, TOL,
};
use crate::probvec::ProbVec;
use crate::{Error, Result};

/// Hard cap on the number of distinct blocks a spectrum may hold.
pub const MAX_BLOCKS: u128 = 100_000_000;

/// Relative merge tolerance for log-values of compositions.
const MERGE_TOL: f64 = 1e-12;

/// One group of equal entries of `p^⊗n`.
#[derive(Debug, Clone)]
pub struct Block {
    /// Common entry value `sᵢ` (may underflow to zero at large n).
    pub value: f64,
    /// Natural log of the entry value, always finite.
    pub log_value: f64,
    /// Exact number of entries sharing this value.
    pub count: BigUint,
    /// Exact cumulative count `Nᵢ`.
    pub cum_count: BigUint,
    /// Cumulative mass `Pᵢ` (compensated summation).
    pub cum_mass: f64,
}

/// How block lookups locate the target interval.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SearchStrategy {
    /// Walk blocks front to back.
    Scan,
    /// Binary search over the stored cumulative fields.
    Bisect,
}

/// Compressed, immutable representation of the sorted spectrum of `p^⊗n`.
#[derive(Debug, Clone)]
pub struct TensorPowerSpectrum {
    base: ProbVec,
    copies: u32,
    blocks: Vec<Block>,
    /// `sr(p)^n`: number of nonzero entries of the product distribution.
    total_count: BigUint,
    /// `dim(p)^n`: number of entries including zero padding.
    ambient_count: BigUint,
}

impl TensorPowerSpectrum {
    /// Enumerates the compositions of `n` over the nonzero entries of
    /// `p`, merges equal values, and populates cumulative fields.
    pub fn build(p: &ProbVec, n: u32) -> Result<Self> {
        if n == 0 {
            return Err(Error::OutOfRange("copies must be positive".into()));
        }
        let nonzero: Vec<f64> = p
            .entries()
            .iter()
            .copied()
            .filter(|&v| v > crate::probvec::ZERO_THRESHOLD)
            .collect();
        let d = nonzero.len();
        guard_block_count(d, n)?;

        let ln_p: Vec<f64> = nonzero.iter().map(|&v| v.ln()).collect();
        let mut terms: Vec<(f64, BigUint)> = Vec::new();
        enumerate_compositions(&ln_p, 0, u64::from(n), 0.0, BigUint::one(), &mut terms);

        // sort by value descending, merge float-coincident log-values
        terms.sort_unstable_by(|a, b| b.0.total_cmp(&a.0));
        let mut blocks: Vec<Block> = Vec::with_capacity(terms.len());
        let mut cum_count = BigUint::zero();
        let mut cum_mass = KahanSum::new();
        {
            let mut flush = |rep_log: f64, count: BigUint| {
                cum_count += &count;
                cum_mass.add((ln_big(&count) + rep_log).exp());
                blocks.push(Block {
                    value: rep_log.exp(),
                    log_value: rep_log,
                    count,
                    cum_count: cum_count.clone(),
                    cum_mass: cum_mass.value(),
                });
            };
            let mut pending: Option<(f64, BigUint, f64)> = None; // (rep, count, last log)
            for (lv, c) in terms {
                match pending.take() {
                    None => pending = Some((lv, c, lv)),
                    Some((rep, mut count, last)) => {
                        if last - lv <= MERGE_TOL * last.abs().max(1.0) {
                            count += c;
                            pending = Some((rep, count, lv));
                        } else {
                            flush(rep, count);
                            pending = Some((lv, c, lv));
                        }
                    }
                }
            }
            if let Some((rep, count, _)) = pending {
                flush(rep, count);
            }
        }

        Ok(Self {
            base: p.clone(),
            copies: n,
            total_count: cum_count,
            ambient_count: biguint_pow(p.dim() as u64, n),
            blocks,
        })
    }

    pub fn base(&self) -> &ProbVec {
        &self.base
    }

    pub fn copies(&self) -> u32 {
        self.copies
    }

    pub fn blocks(&self) -> &[Block] {
        &self.blocks
    }

    /// `sr(p)^n`, the size of the support.
    pub fn total_count(&self) -> &BigUint {
        &self.total_count
    }

    /// `dim(p)^n`, the ambient dimension including zero entries.
    pub fn ambient_count(&self) -> &BigUint {
        &self.ambient_count
    }

    fn prev_count(&self, j: usize) -> BigUint {
        if j == 0 {
            BigUint::zero()
        } else {
            self.blocks[j - 1].cum_count.clone()
        }
    }

    fn prev_mass(&self, j: usize) -> f64 {
        if j == 0 {
            0.0
        } else {
            self.blocks[j - 1].cum_mass
        }
    }

    /// Index of the block containing the 1-based entry `idx`
    /// (smallest `j` with `N_j ≥ idx`). Caller guarantees
    /// `1 ≤ idx ≤ total_count`.
    pub(crate) fn block_of(&self, idx: &BigUint) -> usize {
        debug_assert!(!idx.is_zero() && *idx <= self.total_count);
        self.blocks.partition_point(|b| b.cum_count < *idx)
    }

    fn block_of_scan(&self, idx: &BigUint) -> usize {
        let mut j = 0;
        while self.blocks[j].cum_count < *idx {
            j += 1;
        }
        j
    }

    /// Log-value of the 1-based `idx`-th largest entry; `-inf` beyond
    /// the support.
    pub(crate) fn log_entry_at(&self, idx: &BigUint) -> f64 {
        if *idx > self.total_count {
            return f64::NEG_INFINITY;
        }
        self.blocks[self.block_of(idx)].log_value
    }

    /// Ky-Fan norm `‖p^⊗n‖_(k)`.
    ///
    /// `k` may range over the ambient dimension `dim^n`; indices beyond
    /// the support return 1 (only zeros remain).
    pub fn ky_fan(&self, k: &BigUint, strategy: SearchStrategy) -> Result<f64> {
        if *k > self.ambient_count {
            return Err(Error::OutOfRange(format!(
                "k = {k} exceeds ambient dimension {}",
                self.ambient_count
            )));
        }
        Ok(self.ky_fan_unchecked(k, strategy))
    }

    pub(crate) fn ky_fan_unchecked(&self, k: &BigUint, strategy: SearchStrategy) -> f64 {
        if k.is_zero() {
            return 0.0;
        }
        if *k >= self.total_count {
            return self.blocks.last().expect("nonempty").cum_mass;
        }
        let j = match strategy {
            SearchStrategy::Scan => self.block_of_scan(k),
            SearchStrategy::Bisect => self.block_of(k),
        };
        let offset = k - self.prev_count(j);
        // offset·s computed in log space: the factors may individually
        // overflow/underflow while the product stays in [0, 1].
        self.prev_mass(j) + (ln_big(&offset) + self.blocks[j].log_value).exp()
    }

    /// Smallest `m` with `‖p^⊗n‖_(m) > eps` (strict) or `≥ eps`
    /// (non-strict), as an exact big integer.
    ///
    /// Comparisons treat gaps within `1e-12` as ties, so float images of
    /// analytically exact boundaries resolve the way the exact values
    /// would. If no block reaches `eps` (possible only through float
    /// shortfall at `eps` near 1), the full support size is returned.
    pub fn threshold(&self, eps: f64, strict: bool, strategy: SearchStrategy) -> Result<BigUint> {
        if !(0.0..=1.0).contains(&eps) {
            return Err(Error::OutOfRange(format!("eps = {eps} outside [0, 1]")));
        }
        let accept = |mass: f64| {
            if strict {
                fuzzy_gt(mass, eps)
            } else {
                fuzzy_ge(mass, eps)
            }
        };
        let j = match strategy {
            SearchStrategy::Scan => {
                let mut j = 0;
                while j < self.blocks.len() && !accept(self.blocks[j].cum_mass) {
                    j += 1;
                }
                j
            }
            SearchStrategy::Bisect => self.blocks.partition_point(|b| !accept(b.cum_mass)),
        };
        if j == self.blocks.len() {
            return Ok(self.total_count.clone());
        }

        let block = &self.blocks[j];
        let lo = self.prev_count(j) + BigUint::one();
        let hi = block.cum_count.clone();
        // in-block offset below the block end: (P_j − eps)/s_j ∈ [0, v_j)
        let mag = (block.cum_mass - eps) / block.value;
        let m = if mag.is_finite() {
            // the index fuzz keeps float images of analytically exact
            // in-block boundaries on the accepted side
            if strict {
                BigInt::from(block.cum_count.clone()) - ceil_to_bigint(mag - IDX_TOL)
                    + BigInt::one()
            } else {
                BigInt::from(block.cum_count.clone()) - floor_to_bigint(mag + IDX_TOL)
            }
        } else {
            // s_j underflowed (or the quotient overflowed): resolve the
            // offset from logs, like the masses themselves
            let ln_mag = (block.cum_mass - eps).max(0.0).ln() - block.log_value;
            let mag_big = BigInt::from(exp_to_biguint(ln_mag));
            let base = BigInt::from(block.cum_count.clone()) - mag_big;
            if strict {
                base + BigInt::one()
            } else {
                base
            }
        };
        Ok(clamp_to_range(m, &lo, &hi))
    }

    /// True when `x` sits within the comparison tolerance of some
    /// cumulative block mass, i.e. when strict and non-strict threshold
    /// queries at `x` may legitimately differ.
    pub fn near_mass_boundary(&self, x: f64) -> bool {
        let j = self.blocks.partition_point(|b| b.cum_mass < x - TOL);
        j < self.blocks.len() && (self.blocks[j].cum_mass - x).abs() <= TOL
    }
}

/// Reject block counts beyond [`MAX_BLOCKS`] before enumerating.
fn guard_block_count(d: usize, n: u32) -> Result<()> {
    if d == 0 {
        return Err(Error::InvalidInput("no nonzero entries".into()));
    }
    // r = C(n+d-1, d-1), evaluated with a saturating u128 product
    let mut r: u128 = 1;
    for i in 1..d as u128 {
        r = r.saturating_mul(u128::from(n) + i) / i;
        if r > MAX_BLOCKS {
            return Err(Error::ResourceLimit(format!(
                "p^⊗{n} over {d} nonzero entries exceeds {MAX_BLOCKS} distinct blocks"
            )));
        }
    }
    Ok(())
}

/// Depth-first walk over compositions `n₁+…+n_d = n`, carrying the
/// partial log-value and the exact partial multinomial coefficient.
/// Binomials along each axis update incrementally:
/// `C(rem, k+1) = C(rem, k)·(rem−k)/(k+1)`.
///
/// The two innermost axes are unrolled into one loop whose coefficients
/// `coef·C(rem, k)` are symmetric in `k`, so the upper half is cloned
/// from the already-emitted lower half instead of recomputed.
fn enumerate_compositions(
    ln_p: &[f64],
    idx: usize,
    rem: u64,
    log_val: f64,
    coef: BigUint,
    out: &mut Vec<(f64, BigUint)>,
) {
    let d = ln_p.len();
    if idx == d - 1 {
        out.push((log_val + rem as f64 * ln_p[idx], coef));
        return;
    }
    if idx == d - 2 {
        let start = out.len();
        let mut binom = BigUint::one();
        for k in 0..=rem {
            let lv = log_val + k as f64 * ln_p[idx] + (rem - k) as f64 * ln_p[idx + 1];
            let c = if 2 * k > rem {
                out[start + (rem - k) as usize].1.clone()
            } else if binom.is_one() {
                coef.clone()
            } else {
                &coef * &binom
            };
            out.push((lv, c));
            if 2 * (k + 1) <= rem {
                binom = binom * (rem - k) / (k + 1);
            }
        }
        return;
    }
    let mut binom = BigUint::one();
    for k in 0..=rem {
        let child = if binom.is_one() {
            coef.clone()
        } else {
            &coef * &binom
        };
        enumerate_compositions(
            ln_p,
            idx + 1,
            rem - k,
            log_val + k as f64 * ln_p[idx],
            child,
            out,
        );
        if k < rem {
            binom = binom * (rem - k) / (k + 1);
        }
    }
}

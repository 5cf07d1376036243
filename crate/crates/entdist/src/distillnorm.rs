//! Fidelity of distillation and the distillation-norm variant of the
//! single-shot distillable entanglement.
//!
//! For a pure state with spectrum `p`, the best LOCC fidelity with the
//! maximally entangled state of dimension `m` is
//!
//! ```text
//! F(p^⊗n, m) = (1/m) · ( ‖(√p)^⊗n‖_(m−k*) + √(k*·(1 − ‖p^⊗n‖_(m−k*))) )²
//! k* = argmin_{1≤k≤m} (1 − ‖p^⊗n‖_(m−k)) / k
//! ```
//!
//! with `‖·‖_(0) = 0`. The argmin objective has a non-decreasing
//! discrete slope `t(k) = ‖p^⊗n‖_(m−k) + k·s↓_(m−k) − 1`, so `k*` is the
//! first sign change of `t`, found by bisection. The fidelity itself is
//! evaluated in log space: the square-root spectrum's prefix sums grow
//! like `d^{n/2}` and overflow f64 long before the fidelity does.

use num_bigint::BigUint;
use num_traits::One;

use crate::math::{fuzzy_ge, ln_big, log2_big, logsumexp};
use crate::probvec::ProbVec;
use crate::tensorpower::{SearchStrategy, TensorPowerSpectrum};
use crate::{Error, Result};

/// Result of a fidelity-of-distillation evaluation.
#[derive(Debug, Clone)]
pub struct DistillFidelity {
    /// Target maximally entangled dimension.
    pub m: BigUint,
    /// Minimising split `k* ∈ [1, m]` of the distillation norm.
    pub k_star: BigUint,
    /// Achievable fidelity, clamped into [0, 1].
    pub fidelity: f64,
}

/// Log-space cumulative prefix sums of the square-root spectrum, one per
/// block: `ln Σ_{i≤j} vᵢ·√sᵢ`. The square-root spectrum shares the block
/// structure but is not probability-normalised, so these are kept apart
/// from the mass cumulative sums.
struct SqrtCums(Vec<f64>);

fn sqrt_cums(spec: &TensorPowerSpectrum) -> SqrtCums {
    let mut cums = Vec::with_capacity(spec.blocks().len());
    let mut acc = f64::NEG_INFINITY;
    for b in spec.blocks() {
        acc = logsumexp(acc, ln_big(&b.count) + 0.5 * b.log_value);
        cums.push(acc);
    }
    SqrtCums(cums)
}

/// `ln ‖(√p)^⊗n‖_(k)`, with indices beyond the support saturating.
fn ln_sqrt_ky_fan(spec: &TensorPowerSpectrum, cums: &SqrtCums, k: &BigUint) -> f64 {
    use num_traits::Zero;
    if k.is_zero() {
        return f64::NEG_INFINITY;
    }
    if *k >= *spec.total_count() {
        return *cums.0.last().expect("nonempty spectrum");
    }
    let j = spec.block_of(k);
    let prev = if j == 0 {
        f64::NEG_INFINITY
    } else {
        cums.0[j - 1]
    };
    let prev_count = if j == 0 {
        BigUint::from(0u8)
    } else {
        spec.blocks()[j - 1].cum_count.clone()
    };
    let offset = k - prev_count;
    logsumexp(prev, ln_big(&offset) + 0.5 * spec.blocks()[j].log_value)
}

/// `t(k) = ‖p^⊗n‖_(m−k) + k·s↓_(m−k) − 1`, the discrete slope whose sign
/// change locates `k*`. Defined for `1 ≤ k ≤ m−1`.
fn t_eval(spec: &TensorPowerSpectrum, m: &BigUint, k: &BigUint) -> f64 {
    let idx = m - k; // ≥ 1
    let ky = if idx > *spec.total_count() {
        1.0
    } else {
        spec.ky_fan_unchecked(&idx, SearchStrategy::Bisect)
    };
    let entry_log = spec.log_entry_at(&idx);
    ky + (ln_big(k) + entry_log).exp() - 1.0
}

/// Relative tie band on the objective `(1 − ‖p^⊗n‖_(m−k))/k`: values
/// within this factor of the minimum count as ties. An absolute band
/// would be meaningless across the objective's dynamic range (it spans
/// many orders of magnitude over admissible `m`).
const REL_TIE: f64 = 1e-9;

/// The split `k* = argmin_{1≤k≤m} (1 − ‖p^⊗n‖_(m−k))/k`, ties broken
/// toward the smallest `k` (a tie being any value within relative
/// [`REL_TIE`] of the minimum).
pub fn k_star(spec: &TensorPowerSpectrum, m: &BigUint) -> Result<BigUint> {
    if *m < BigUint::from(2u8) {
        return Err(Error::OutOfRange("m must be at least 2".into()));
    }
    Ok(k_star_inner(spec, m))
}

/// `ln` of the objective at `k`, safe for `k` far beyond f64 range.
fn ln_objective(spec: &TensorPowerSpectrum, m: &BigUint, k: &BigUint) -> f64 {
    let idx = m - k;
    let ky = if idx > *spec.total_count() {
        1.0
    } else {
        spec.ky_fan_unchecked(&idx, SearchStrategy::Bisect)
    };
    (1.0 - ky).max(0.0).ln() - ln_big(k)
}

fn k_star_inner(spec: &TensorPowerSpectrum, m: &BigUint) -> BigUint {
    let one = BigUint::one();
    let m_minus_1 = m - &one;
    // t is non-decreasing in k, so the objective falls until the first
    // k with t(k) ≥ 0 and rises after it: locate the valley by bisection
    let valley = if t_eval(spec, m, &one) >= 0.0 {
        one.clone()
    } else if t_eval(spec, m, &m_minus_1) < 0.0 {
        m.clone()
    } else {
        let mut a = one.clone(); // t(a) < 0
        let mut b = m_minus_1; // t(b) ≥ 0
        while &b - &a > one {
            let c = (&a + &b) >> 1;
            if t_eval(spec, m, &c) >= 0.0 {
                b = c;
            } else {
                a = c;
            }
        }
        b
    };
    if valley == one {
        return valley;
    }
    // walk the tie band back to its smallest member: the objective is
    // non-increasing on [1, valley], so bisect for the first k within
    // the band
    let ln_threshold = ln_objective(spec, m, &valley) + REL_TIE.ln_1p();
    if ln_objective(spec, m, &one) <= ln_threshold {
        return one;
    }
    let mut a = one; // above the band
    let mut b = valley; // inside the band
    while &b - &a > BigUint::one() {
        let c = (&a + &b) >> 1;
        if ln_objective(spec, m, &c) <= ln_threshold {
            b = c;
        } else {
            a = c;
        }
    }
    b
}

/// Fidelity of distillation `F(p^⊗n, m)` for `m ≥ 2`.
pub fn fidelity_of_distillation(
    spec: &TensorPowerSpectrum,
    m: &BigUint,
) -> Result<DistillFidelity> {
    if *m < BigUint::from(2u8) {
        return Err(Error::OutOfRange("m must be at least 2".into()));
    }
    let cums = sqrt_cums(spec);
    let ks = k_star_inner(spec, m);
    let fidelity = fidelity_inner(spec, &cums, m, &ks);
    Ok(DistillFidelity {
        m: m.clone(),
        k_star: ks,
        fidelity,
    })
}

fn fidelity_inner(
    spec: &TensorPowerSpectrum,
    cums: &SqrtCums,
    m: &BigUint,
    k_star: &BigUint,
) -> f64 {
    let idx = m - k_star;
    let a_log = ln_sqrt_ky_fan(spec, cums, &idx);
    let ky = if idx > *spec.total_count() {
        1.0
    } else {
        spec.ky_fan_unchecked(&idx, SearchStrategy::Bisect)
    };
    let b_log = 0.5 * (ln_big(k_star) + (1.0 - ky).max(0.0).ln());
    let f = (2.0 * logsumexp(a_log, b_log) - ln_big(m)).exp();
    f.clamp(0.0, 1.0)
}

/// Distillation-norm variant of the single-shot distillable
/// entanglement: `log₂` of the largest `m ≥ 2` with `F(p^⊗n, m) ≥ 1−ε`,
/// or 0 when even `m = 2` falls short.
pub fn e_d_regula(p: &ProbVec, n: u32, eps: f64) -> Result<f64> {
    Ok(log2_big(&e_d_regula_dim(p, n, eps)?))
}

/// The maximising dimension inside [`e_d_regula`] (1 when `m = 2` is
/// infeasible).
pub fn e_d_regula_dim(p: &ProbVec, n: u32, eps: f64) -> Result<BigUint> {
    if !(0.0..1.0).contains(&eps) {
        return Err(Error::OutOfRange(format!("eps = {eps} outside [0, 1)")));
    }
    let spec = TensorPowerSpectrum::build(p, n)?;
    let cums = sqrt_cums(&spec);
    let one = BigUint::one();
    let two = BigUint::from(2u8);
    let target = 1.0 - eps;
    let feasible = |m: &BigUint| -> f64 {
        let ks = k_star_inner(&spec, m);
        fidelity_inner(&spec, &cums, m, &ks)
    };

    let f2 = feasible(&two);
    if !fuzzy_ge(f2, target) {
        return Ok(one);
    }
    // any m beyond dim^n/(1−eps)² is capped below 1−eps by the maximal
    // overlap law F ≤ √(dim^n/m)
    let m_max =
        crate::math::fuzzy_floor_ratio(spec.ambient_count(), target * target).max(two.clone());
    if fuzzy_ge(feasible(&m_max), target) {
        return Ok(m_max);
    }

    // F is non-increasing in m: invariant F(a) ≥ 1−eps > F(b)
    let mut a = two;
    let mut fa = f2;
    let mut b = m_max;
    while &b - &a > one {
        let c = (&a + &b) >> 1;
        let fc = feasible(&c);
        // diagnostic for the monotonicity the search relies on
        debug_assert!(
            fc <= fa + 1e-9,
            "fidelity increased along search path: F({c}) = {fc} > F({a}) = {fa}"
        );
        if fuzzy_ge(fc, target) {
            a = c;
            fa = fc;
        } else {
            b = c;
        }
    }
    Ok(a)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::ToPrimitive;

    fn pv(vals: &[f64]) -> ProbVec {
        ProbVec::new(vals).unwrap()
    }

    fn spec(vals: &[f64], n: u32) -> TensorPowerSpectrum {
        TensorPowerSpectrum::build(&pv(vals), n).unwrap()
    }

    fn big(v: u64) -> BigUint {
        BigUint::from(v)
    }

    #[test]
    fn k_star_tie_picks_smallest() {
        // (0.5, 0.5), m = 2: k = 1 and k = 2 tie; smallest wins
        let s = spec(&[0.5, 0.5], 1);
        assert_eq!(k_star(&s, &big(2)).unwrap(), big(1));
    }

    #[test]
    fn k_star_product_state() {
        let s = spec(&[1.0], 1);
        assert_eq!(k_star(&s, &big(2)).unwrap(), big(1));
    }

    #[test]
    fn k_star_matches_exhaustive_scan() {
        // oracle: argmin over k ∈ {1,2,3} of (1 − ‖p^⊗2‖_(3−k))/k
        let s = spec(&[0.9, 0.1], 2);
        assert_eq!(k_star(&s, &big(3)).unwrap(), big(2));
        assert!(k_star(&s, &big(1)).is_err());
    }

    #[test]
    fn fidelity_perfect_on_ebit() {
        let s = spec(&[0.5, 0.5], 1);
        let f = fidelity_of_distillation(&s, &big(2)).unwrap();
        assert!((f.fidelity - 1.0).abs() < 1e-12);
    }

    #[test]
    fn fidelity_product_state_half() {
        let s = spec(&[1.0], 1);
        let f = fidelity_of_distillation(&s, &big(2)).unwrap();
        assert!((f.fidelity - 0.5).abs() < 1e-12);
        assert_eq!(f.k_star, big(1));
    }

    #[test]
    fn fidelity_overlap_cap() {
        // F(p^⊗n, m) ≤ √(dim^n/m) for m beyond the ambient dimension
        let s = spec(&[0.7, 0.3], 3);
        let dim_n = 8u64;
        for m in [9u64, 16, 100, 1000] {
            let f = fidelity_of_distillation(&s, &big(m)).unwrap().fidelity;
            let cap = ((dim_n as f64) / m as f64).sqrt();
            assert!(f <= cap + 1e-12, "m={m}: {f} > {cap}");
        }
    }

    #[test]
    fn fidelity_non_increasing_in_m() {
        let s = spec(&[0.6, 0.25, 0.15], 2);
        let mut prev = 1.0 + 1e-12;
        for m in 2..=9u64 {
            let f = fidelity_of_distillation(&s, &big(m)).unwrap().fidelity;
            assert!(f <= prev + 1e-12, "F increased at m = {m}");
            prev = f;
        }
    }

    #[test]
    fn regula_perfect_ebit() {
        let r = e_d_regula(&pv(&[0.5, 0.5]), 1, 0.0).unwrap();
        assert!((r - 1.0).abs() < 1e-12);
    }

    #[test]
    fn regula_product_state_zero() {
        // F(·, 2) = 0.5 < 0.6
        assert_eq!(e_d_regula(&pv(&[1.0]), 1, 0.4).unwrap(), 0.0);
    }

    #[test]
    fn fidelity_is_tie_invariant_in_k() {
        // (0.5,0.5) at m = 2 ties k = 1 and k = 2; the maximally
        // entangled spectrum ties every k. F must not depend on which
        // tied split is used.
        let cases: [(&[f64], u32, u64); 2] = [(&[0.5, 0.5], 1, 2), (&[0.25; 4], 1, 4)];
        for (raw, n, m) in cases {
            let s = spec(raw, n);
            let mb = big(m);
            let cums = sqrt_cums(&s);
            let reference = fidelity_inner(&s, &cums, &mb, &big(1));
            for k in 2..=m {
                let f = fidelity_inner(&s, &cums, &mb, &big(k));
                assert!(
                    (f - reference).abs() < 1e-12,
                    "F differs across tied k={k}: {f} vs {reference}"
                );
            }
        }
    }

    #[test]
    fn regula_matches_exhaustive_scan() {
        // oracle: scan all m ≤ 2⁴/0.81
        let p = pv(&[0.9, 0.1]);
        let spec4 = TensorPowerSpectrum::build(&p, 4).unwrap();
        let cums = sqrt_cums(&spec4);
        let mut best = 1u64;
        for m in 2..=19u64 {
            let mb = big(m);
            let ks = k_star_inner(&spec4, &mb);
            if fuzzy_ge(fidelity_inner(&spec4, &cums, &mb, &ks), 0.9) {
                best = m;
            }
        }
        let fast = e_d_regula_dim(&p, 4, 0.1).unwrap().to_u64().unwrap();
        assert_eq!(fast, best);
    }
}

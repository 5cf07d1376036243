//! Shannon entropy, entropy variance, the standard normal CDF and its
//! inverse, and the second-order Gaussian estimates
//! `n·H(p) ∓ Φ⁻¹(ε)·√(n·V(p))` for entanglement cost and distillation.
//!
//! All entropic quantities are in bits (base-2 logs), matching the ebit
//! convention used everywhere else in the crate.

use crate::probvec::ProbVec;
use crate::{Error, Result};

const SQRT_2: f64 = std::f64::consts::SQRT_2;
const FRAC_1_SQRT_2PI: f64 = 0.398_942_280_401_432_7;

/// Shannon entropy `H(p) = −Σ pᵢ log₂ pᵢ` in bits, with `0·log 0 = 0`.
pub fn shannon_entropy(p: &ProbVec) -> f64 {
    let mut h = 0.0;
    for &v in p.entries() {
        if v > 0.0 {
            h -= v * v.log2();
        }
    }
    h
}

/// Entropy variance `V(p) = Σ pᵢ·(−log₂ pᵢ − H(p))²` in bits².
pub fn entropy_variance(p: &ProbVec) -> f64 {
    let h = shannon_entropy(p);
    let mut v = 0.0;
    for &x in p.entries() {
        if x > 0.0 {
            let dev = -x.log2() - h;
            v += x * dev * dev;
        }
    }
    v.max(0.0)
}

/// Binary Shannon entropy `h(x) = −x log₂ x − (1−x) log₂(1−x)`.
pub fn binary_entropy(x: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&x) {
        return Err(Error::OutOfRange(format!("x = {x} outside [0, 1]")));
    }
    let mut h = 0.0;
    if x > 0.0 {
        h -= x * x.log2();
    }
    if x < 1.0 {
        h -= (1.0 - x) * (1.0 - x).log2();
    }
    Ok(h)
}

/// erf(x) via its Maclaurin series; accurate for |x| ≤ 3.
fn erf_series(x: f64) -> f64 {
    let mut term = x;
    let mut sum = x;
    let x2 = x * x;
    for k in 1..200 {
        term *= -x2 / k as f64;
        let contrib = term / (2 * k + 1) as f64;
        sum += contrib;
        if contrib.abs() < 1e-18 * sum.abs().max(1e-300) {
            break;
        }
    }
    sum * 2.0 / std::f64::consts::PI.sqrt()
}

/// erfc(x) for x ≥ 3 via the classical continued fraction
/// `√π·e^{x²}·erfc(x) = 1/(x + (1/2)/(x + 1/(x + (3/2)/(x + …))))`,
/// evaluated backwards at fixed depth.
fn erfc_cf(x: f64) -> f64 {
    let mut f = x;
    for k in (1..=80).rev() {
        f = x + (k as f64 / 2.0) / f;
    }
    (-x * x).exp() / std::f64::consts::PI.sqrt() / f
}

fn erfc(x: f64) -> f64 {
    if x < 0.0 {
        2.0 - erfc(-x)
    } else if x <= 3.0 {
        1.0 - erf_series(x)
    } else {
        erfc_cf(x)
    }
}

/// Standard normal cumulative distribution function Φ(x).
pub fn std_normal_cdf(x: f64) -> f64 {
    0.5 * erfc(-x / SQRT_2)
}

/// Standard normal density φ(x).
fn std_normal_pdf(x: f64) -> f64 {
    FRAC_1_SQRT_2PI * (-0.5 * x * x).exp()
}

/// Inverse of the standard normal CDF on (0, 1), by bisection followed
/// by Newton refinement.
pub fn std_normal_cdf_inv(a: f64) -> Result<f64> {
    if !(a > 0.0 && a < 1.0) {
        return Err(Error::OutOfRange(format!("a = {a} outside (0, 1)")));
    }
    let mut lo = -40.0;
    let mut hi = 40.0;
    for _ in 0..60 {
        let mid = 0.5 * (lo + hi);
        if std_normal_cdf(mid) < a {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let mut z = 0.5 * (lo + hi);
    for _ in 0..4 {
        let err = std_normal_cdf(z) - a;
        let d = std_normal_pdf(z);
        if d <= 0.0 {
            break;
        }
        let step = err / d;
        if !step.is_finite() {
            break;
        }
        z -= step.clamp(-1.0, 1.0);
    }
    Ok(z)
}

/// Second-order estimate bundle.
#[derive(Debug, Clone)]
pub struct AsymptoticEstimate {
    /// `H(p)` in bits.
    pub entropy: f64,
    /// `V(p)` in bits².
    pub variance: f64,
    /// `Φ⁻¹(ε)`.
    pub z: f64,
    /// `n·H ∓ z·√(n·V)` depending on direction.
    pub estimate: f64,
    /// Set when `V(p) = 0` (uniform spectra), where the √n term
    /// degenerates and the estimate reduces to `n·H`.
    pub degenerate: bool,
}

/// Variances below this are treated as exactly zero (uniform spectra
/// produce O(1e-30) float residue).
const VAR_FLOOR: f64 = 1e-18;

fn second_order(p: &ProbVec, n: u32, eps: f64, sign: f64) -> Result<AsymptoticEstimate> {
    if n == 0 {
        return Err(Error::OutOfRange("n must be positive".into()));
    }
    if !(eps > 0.0 && eps < 1.0) {
        return Err(Error::OutOfRange(format!("eps = {eps} outside (0, 1)")));
    }
    let entropy = shannon_entropy(p);
    let variance = entropy_variance(p);
    let z = std_normal_cdf_inv(eps)?;
    let degenerate = variance < VAR_FLOOR;
    let estimate = if degenerate {
        n as f64 * entropy
    } else {
        n as f64 * entropy + sign * z * (n as f64 * variance).sqrt()
    };
    Ok(AsymptoticEstimate {
        entropy,
        variance,
        z,
        estimate,
        degenerate,
    })
}

/// `Cost^ε(p^⊗n) ≈ n·H(p) − Φ⁻¹(ε)·√(n·V(p))`.
pub fn second_order_cost(p: &ProbVec, n: u32, eps: f64) -> Result<AsymptoticEstimate> {
    second_order(p, n, eps, -1.0)
}

/// `Distill^ε(p^⊗n) ≈ n·H(p) + Φ⁻¹(ε)·√(n·V(p))`.
pub fn second_order_distill(p: &ProbVec, n: u32, eps: f64) -> Result<AsymptoticEstimate> {
    second_order(p, n, eps, 1.0)
}

/// Upper bound on the one-way ε-single-shot distillable entanglement in
/// terms of the coherent information of entanglement `E` (bits):
/// `E/(1−2ε) + ((1+ε)/(1−2ε))·h(ε/(1+ε))`.
pub fn one_way_distill_bound(e: f64, eps: f64) -> Result<f64> {
    if e < 0.0 {
        return Err(Error::OutOfRange(format!("E = {e} must be non-negative")));
    }
    if !(eps > 0.0 && eps < 0.5) {
        return Err(Error::OutOfRange(format!("eps = {eps} outside (0, 0.5)")));
    }
    let scale = 1.0 / (1.0 - 2.0 * eps);
    Ok(scale * e + scale * (1.0 + eps) * binary_entropy(eps / (1.0 + eps))?)
}

/// Coherent information `I(A⟩B) = H(B) − H(AB)` from the two supplied
/// spectra, in bits. For a pure bipartite state pass `spec_ab = (1)` and
/// the Schmidt spectrum as `spec_b`.
pub fn coherent_information_from_spectra(spec_ab: &ProbVec, spec_b: &ProbVec) -> f64 {
    shannon_entropy(spec_b) - shannon_entropy(spec_ab)
}

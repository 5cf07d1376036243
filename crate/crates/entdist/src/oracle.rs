//! Brute-force reference implementations over fully materialised
//! tensor-power spectra.
//!
//! Everything here evaluates the defining formulas by exhaustive loops —
//! no block compression, no bisection, no compensated summation — so the
//! fast paths can be checked against genuinely independent arithmetic.
//! Oracles are desk-scale by design (`d^n ≤ 2²⁴`).

use num_bigint::BigUint;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::probvec::ProbVec;
use crate::tensorpower::{SearchStrategy, TensorPowerSpectrum};
use crate::{distillnorm, singleshot, Error, Result};

/// Boundary-tie tolerance, matching the comparison convention of the
/// fast paths (the convention is shared; the arithmetic is not).
const TOL: f64 = 1e-12;

/// Size guard for dense expansion.
pub const MAX_DENSE: u128 = 1 << 24;

/// Fully materialised, descending-sorted spectrum of `p^⊗n`, with plain
/// (uncompensated) running prefix sums.
#[derive(Debug, Clone)]
pub struct DenseSpectrum {
    entries: Vec<f64>,
    prefix: Vec<f64>,
}

impl DenseSpectrum {
    /// Cartesian-product expansion of `p^⊗n`, sorted descending.
    pub fn build(p: &ProbVec, n: u32) -> Result<Self> {
        let d = p.dim() as u128;
        let mut size: u128 = 1;
        for _ in 0..n {
            size = size.saturating_mul(d);
            if size > MAX_DENSE {
                return Err(Error::ResourceLimit(format!(
                    "dense expansion of {d}^{n} exceeds {MAX_DENSE} entries"
                )));
            }
        }
        let mut entries = vec![1.0f64];
        for _ in 0..n {
            let mut next = Vec::with_capacity(entries.len() * p.dim());
            for &e in &entries {
                for &v in p.entries() {
                    next.push(e * v);
                }
            }
            entries = next;
        }
        entries.sort_unstable_by(|a, b| b.total_cmp(a));
        let mut prefix = Vec::with_capacity(entries.len() + 1);
        let mut run = 0.0;
        prefix.push(0.0);
        for &v in &entries {
            run += v;
            prefix.push(run);
        }
        Ok(Self { entries, prefix })
    }

    pub fn entries(&self) -> &[f64] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    fn prefix(&self, k: usize) -> f64 {
        self.prefix[k]
    }

    fn support(&self) -> usize {
        self.entries.iter().filter(|&&v| v > 0.0).count()
    }
}

/// Sum of the `k` largest entries by direct summation.
pub fn oracle_ky_fan(ds: &DenseSpectrum, k: usize) -> f64 {
    ds.prefix(k)
}

/// Smallest `m` with prefix sum `> eps` (strict) or `≥ eps`.
pub fn oracle_threshold(ds: &DenseSpectrum, eps: f64, strict: bool) -> usize {
    for m in 1..=ds.len() {
        let pref = ds.prefix(m);
        let hit = if strict {
            pref > eps + TOL
        } else {
            pref >= eps - TOL
        };
        if hit {
            return m;
        }
    }
    ds.support()
}

/// Exhaustive minimisation of `⌊k/(‖p^⊗n‖_(k) − eps)⌋` over all
/// admissible `k`.
pub fn oracle_distill(ds: &DenseSpectrum, eps: f64) -> u128 {
    let ell = oracle_threshold(ds, eps, true);
    let mut best = u128::MAX;
    for k in ell..=ds.len() {
        let f = k as f64 / (ds.prefix(k) - eps);
        let m = (f * (1.0 + 1e-12)).floor() as u128;
        best = best.min(m);
    }
    best.max(1)
}

/// Smallest `m` whose prefix reaches `1 − eps`.
pub fn oracle_cost(ds: &DenseSpectrum, eps: f64) -> usize {
    oracle_threshold(ds, 1.0 - eps, false)
}

/// Relative tie band on the distillation-norm objective; shared
/// convention with the fast path (the arithmetic is not).
const REL_TIE: f64 = 1e-9;

/// Exhaustive `argmin_{1≤k≤m} (1 − prefix(m−k))/k`, returning the
/// smallest `k` within relative [`REL_TIE`] of the minimum. A prefix
/// covering the whole support sums to exactly 1 by normalisation.
pub fn oracle_kstar(ds: &DenseSpectrum, m: usize) -> usize {
    let support = ds.support();
    let h = |k: usize| {
        let idx = (m - k).min(ds.len());
        let ky = if idx >= support { 1.0 } else { ds.prefix(idx) };
        (1.0 - ky).max(0.0) / k as f64
    };
    let mut h_min = f64::INFINITY;
    for k in 1..=m {
        h_min = h_min.min(h(k));
    }
    let threshold = h_min * (1.0 + REL_TIE);
    (1..=m).find(|&k| h(k) <= threshold).unwrap_or(1)
}

/// Fidelity of distillation by direct prefix sums over the square-root
/// spectrum.
pub fn oracle_fidelity(ds: &DenseSpectrum, m: usize) -> f64 {
    let k = oracle_kstar(ds, m);
    let idx = (m - k).min(ds.len());
    let mut sqrt_prefix = 0.0;
    for &v in &ds.entries[..idx] {
        sqrt_prefix += v.sqrt();
    }
    let ky = if idx >= ds.support() {
        1.0
    } else {
        ds.prefix(idx)
    };
    let tail = (k as f64 * (1.0 - ky).max(0.0)).sqrt();
    let s = sqrt_prefix + tail;
    (s * s / m as f64).min(1.0)
}

/// Largest `m ≥ 2` with `F(m) ≥ 1 − eps` by upward scan (1 when even
/// `m = 2` fails). The scan stops at the first infeasible `m`.
pub fn oracle_e_d_regula(ds: &DenseSpectrum, eps: f64) -> u64 {
    let target = 1.0 - eps;
    if oracle_fidelity(ds, 2) < target - TOL {
        return 1;
    }
    let mut m = 2u64;
    loop {
        let next = m + 1;
        if oracle_fidelity(ds, next as usize) >= target - TOL {
            m = next;
        } else {
            return m;
        }
    }
}

/// Star conversion distance for a two-dimensional source by grid scan
/// over the one-dimensional feasible set `r = (r₁, 1−r₁)`, `r₁ ≥ p₁`.
pub fn oracle_tstar_2d(p: &ProbVec, q: &ProbVec) -> Result<f64> {
    if p.dim() > 2 {
        return Err(Error::OutOfRange(
            "grid oracle only covers dim-2 sources".into(),
        ));
    }
    let p1 = p.entries()[0];
    let steps = 1_000_000u64;
    let mut best = f64::INFINITY;
    for i in 0..=steps {
        let r1 = p1 + (1.0 - p1) * i as f64 / steps as f64;
        let r = [r1, 1.0 - r1];
        let mut dist = 0.0;
        for (j, &rv) in r.iter().enumerate() {
            let qv = if j < q.dim() { q.entries()[j] } else { 0.0 };
            dist += (rv - qv).abs();
        }
        for &qv in q.entries().iter().skip(2) {
            dist += qv;
        }
        best = best.min(0.5 * dist);
    }
    Ok(best)
}

/// One randomized equivalence case; collects a human-readable failure
/// description on mismatch.
#[derive(Debug, Default)]
pub struct VerifyReport {
    pub cases_run: u32,
    pub failures: Vec<String>,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

fn random_probvec(rng: &mut ChaCha8Rng, d: usize) -> ProbVec {
    let raw: Vec<f64> = (0..d).map(|_| rng.gen_range(0.05..1.0)).collect();
    let s: f64 = raw.iter().sum();
    ProbVec::new(&raw.iter().map(|v| v / s).collect::<Vec<_>>()).expect("normalized")
}

/// Randomized oracle-equivalence suite: compares the compressed-spectrum
/// fast paths against the dense oracles on random states, copy counts,
/// and error levels. Deterministic for a fixed seed.
pub fn verify_suite(seed: u64, cases: u32) -> VerifyReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut report = VerifyReport::default();

    for case in 0..cases {
        let d = rng.gen_range(2..=4usize);
        let max_n = match d {
            2 => 16,
            3 => 10,
            _ => 8,
        };
        let n = rng.gen_range(1..=max_n) as u32;
        let p = random_probvec(&mut rng, d);
        let eps = rng.gen_range(0.0..0.95);

        let ds = match DenseSpectrum::build(&p, n) {
            Ok(ds) => ds,
            Err(e) => {
                report
                    .failures
                    .push(format!("case {case}: dense build failed: {e}"));
                continue;
            }
        };
        let spec = match TensorPowerSpectrum::build(&p, n) {
            Ok(s) => s,
            Err(e) => {
                report
                    .failures
                    .push(format!("case {case}: build failed: {e}"));
                continue;
            }
        };
        let total = ds.len();

        // Ky-Fan agreement at a random k, both strategies
        let k = rng.gen_range(0..=total);
        let dense_ky = oracle_ky_fan(&ds, k);
        for strat in [SearchStrategy::Scan, SearchStrategy::Bisect] {
            let fast = spec.ky_fan(&BigUint::from(k), strat).expect("in range");
            if (fast - dense_ky).abs() > 1e-9 {
                report.failures.push(format!(
                    "case {case}: ky_fan mismatch at k={k}: {fast} vs {dense_ky}"
                ));
            }
        }

        // thresholds
        for strict in [true, false] {
            let dense_t = oracle_threshold(&ds, eps, strict);
            let fast_t = spec
                .threshold(eps, strict, SearchStrategy::Bisect)
                .expect("eps in range");
            if fast_t != BigUint::from(dense_t) {
                report.failures.push(format!(
                    "case {case}: threshold(strict={strict}) mismatch at eps={eps}: {fast_t} vs {dense_t}"
                ));
            }
        }

        // distillable entanglement and cost
        let fast_d = singleshot::distill_eps(&spec, eps).expect("eps valid").m;
        let dense_d = oracle_distill(&ds, eps);
        if fast_d != BigUint::from(dense_d) {
            report.failures.push(format!(
                "case {case}: distill mismatch at eps={eps}: {fast_d} vs {dense_d}"
            ));
        }
        if eps > 0.0 {
            let fast_c = singleshot::cost_eps(&spec, eps).expect("eps valid").m;
            let dense_c = oracle_cost(&ds, eps);
            if fast_c != BigUint::from(dense_c) {
                report.failures.push(format!(
                    "case {case}: cost mismatch at eps={eps}: {fast_c} vs {dense_c}"
                ));
            }
        }

        // k* at a random m
        let m = rng.gen_range(2..=(2 * total).max(3));
        let fast_k = distillnorm::k_star(&spec, &BigUint::from(m)).expect("m >= 2");
        let dense_k = oracle_kstar(&ds, m);
        if fast_k != BigUint::from(dense_k) {
            report.failures.push(format!(
                "case {case}: k_star mismatch at m={m}: {fast_k} vs {dense_k}"
            ));
        }
        let fast_f = distillnorm::fidelity_of_distillation(&spec, &BigUint::from(m))
            .expect("m >= 2")
            .fidelity;
        let dense_f = oracle_fidelity(&ds, m);
        // the 1 − ‖p‖_(m−k*) cancellation amplifies the routes' ~1e-15
        // summation differences by up to ~1e6
        if (fast_f - dense_f).abs() > 1e-7 {
            report.failures.push(format!(
                "case {case}: fidelity mismatch at m={m}: {fast_f} vs {dense_f}"
            ));
        }

        // distillation-norm variant on deliberately small instances (the
        // oracle scan is quadratic in the answer)
        if total <= 512 {
            let reps = rng.gen_range(0.05..0.5);
            let fast_r = distillnorm::e_d_regula_dim(&p, n, reps).expect("eps valid");
            let dense_r = oracle_e_d_regula(&ds, reps);
            if fast_r != BigUint::from(dense_r) {
                report.failures.push(format!(
                    "case {case}: e_d_regula mismatch at eps={reps}: {fast_r} vs {dense_r}"
                ));
            }
        }

        report.cases_run += 1;
    }
    report
}

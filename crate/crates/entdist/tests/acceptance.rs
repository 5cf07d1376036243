//! Acceptance suite: oracle equivalence, algebraic identities, anchors,
//! convergence, and performance, with one pass line per criterion.

use std::time::Instant;

use num_bigint::BigUint;
use num_traits::ToPrimitive;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use entdist::asymptotics::{
    one_way_distill_bound, second_order_cost, second_order_distill, std_normal_cdf,
    std_normal_cdf_inv,
};
use entdist::distillnorm::{e_d_regula, fidelity_of_distillation};
use entdist::oracle::{self, DenseSpectrum};
use entdist::probvec::t_star;
use entdist::singleshot::{cost_eps, distill_eps, pruning_residual, smoothed_hmax_dim};
use entdist::{CqEnsemble, ProbVec, SearchStrategy, TensorPowerSpectrum};

fn random_probvec(rng: &mut ChaCha8Rng, d: usize) -> ProbVec {
    let raw: Vec<f64> = (0..d).map(|_| rng.gen_range(0.05..1.0)).collect();
    let s: f64 = raw.iter().sum();
    ProbVec::new(&raw.iter().map(|v| v / s).collect::<Vec<_>>()).unwrap()
}

#[test]
fn criterion_01_oracle_equivalence() {
    let start = Instant::now();
    let report = oracle::verify_suite(0x5eed_0001, 200);
    let elapsed = start.elapsed();
    assert_eq!(report.cases_run, 200);
    assert!(
        report.passed(),
        "oracle mismatches:\n{}",
        report.failures.join("\n")
    );
    assert!(
        elapsed.as_secs_f64() < 60.0,
        "oracle equivalence took {elapsed:?}, budget 60 s"
    );
    println!(
        "criterion 1 PASS: 200 random cases oracle-equivalent in {:.1} s",
        elapsed.as_secs_f64()
    );
}

#[test]
fn criterion_02_strategy_equivalence() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0002);
    for _ in 0..500 {
        let d = rng.gen_range(2..=4usize);
        let n = rng.gen_range(1..=7) as u32;
        let p = random_probvec(&mut rng, d);
        let spec = TensorPowerSpectrum::build(&p, n).unwrap();
        let total = spec.total_count().to_u64().unwrap();
        let k = BigUint::from(rng.gen_range(0..=total));
        let ky_scan = spec.ky_fan(&k, SearchStrategy::Scan).unwrap();
        let ky_bisect = spec.ky_fan(&k, SearchStrategy::Bisect).unwrap();
        assert!(
            (ky_scan - ky_bisect).abs() < 1e-12,
            "ky_fan strategies differ at k={k}: {ky_scan} vs {ky_bisect}"
        );
        let eps = rng.gen_range(0.0..0.999);
        for strict in [true, false] {
            let t_scan = spec.threshold(eps, strict, SearchStrategy::Scan).unwrap();
            let t_bisect = spec.threshold(eps, strict, SearchStrategy::Bisect).unwrap();
            assert_eq!(
                t_scan, t_bisect,
                "threshold strategies differ at eps={eps} strict={strict}"
            );
        }
    }
    println!("criterion 2 PASS: scan and bisect agree on 500 random queries");
}

#[test]
fn criterion_03_cost_equals_smoothed_hmax() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0003);
    for case in 0..100 {
        let d = rng.gen_range(2..=8usize);
        let p = random_probvec(&mut rng, d);
        let eps = if case % 10 == 0 {
            0.0
        } else {
            rng.gen_range(0.0..0.95)
        };
        let spec = TensorPowerSpectrum::build(&p, 1).unwrap();
        let m_cost = cost_eps(&spec, eps).unwrap().m;
        let m_hmax = smoothed_hmax_dim(&p, eps).unwrap();
        assert_eq!(
            m_cost,
            BigUint::from(m_hmax),
            "case {case}: cost {m_cost} vs hmax {m_hmax} at eps={eps}"
        );
    }
    println!("criterion 3 PASS: single-copy cost equals smoothed max-entropy dimension, 100 cases");
}

#[test]
fn criterion_04_pruning_identity() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0004);
    for case in 0..100 {
        let members = rng.gen_range(1..=8usize);
        let raw: Vec<f64> = (0..members).map(|_| rng.gen_range(0.05..1.0)).collect();
        let wsum: f64 = raw.iter().sum();
        let mut ens = Vec::with_capacity(members);
        let mut max_dim = 1;
        for w in raw {
            let d = rng.gen_range(1..=16usize);
            max_dim = max_dim.max(d);
            ens.push((w / wsum, random_probvec(&mut rng, d)));
        }
        let ens = CqEnsemble::new(ens).unwrap();
        for m in 1..=max_dim + 2 {
            // pruning_residual itself asserts the two routes agree within 1e-12
            let r = pruning_residual(&ens, m).unwrap();
            assert!(
                (0.0..=1.0 + 1e-12).contains(&r),
                "case {case}: residual {r} out of range at m={m}"
            );
        }
    }
    println!("criterion 4 PASS: pruning identity holds on both routes, 100 ensembles, all m");
}

#[test]
fn criterion_05_zero_error_anchors() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0005);
    // cost at eps = 0 equals sr(p)^n exactly
    for d in 1..=3usize {
        for n in 1..=10u32 {
            let p = random_probvec(&mut rng, d);
            let spec = TensorPowerSpectrum::build(&p, n).unwrap();
            let m = cost_eps(&spec, 0.0).unwrap().m;
            let expected = num_traits::pow::pow(BigUint::from(p.schmidt_rank()), n as usize);
            assert_eq!(m, expected, "cost anchor failed for d={d} n={n}");
        }
    }
    // maximally entangled states: distill = cost = n·log2(m)
    for m in 2..=4u64 {
        for n in 1..=8u32 {
            let p = ProbVec::new(&vec![1.0 / m as f64; m as usize]).unwrap();
            let spec = TensorPowerSpectrum::build(&p, n).unwrap();
            let expected = num_traits::pow::pow(BigUint::from(m), n as usize);
            let d_res = distill_eps(&spec, 0.0).unwrap();
            let c_res = cost_eps(&spec, 0.0).unwrap();
            assert_eq!(d_res.m, expected, "distill anchor failed for m={m} n={n}");
            assert_eq!(c_res.m, expected, "cost anchor failed for m={m} n={n}");
            let bits = n as f64 * (m as f64).log2();
            assert!((d_res.log2_m - bits).abs() < 1e-9);
            assert!((c_res.log2_m - bits).abs() < 1e-9);
        }
    }
    println!("criterion 5 PASS: zero-error anchors exact (sr^n and n·log2 m)");
}

#[test]
fn criterion_06_second_order_convergence() {
    let start = Instant::now();
    let p = ProbVec::new(&[0.9, 0.1]).unwrap();
    let eps = 0.1;
    let mut prev_res_cost = f64::INFINITY;
    let mut prev_res_distill = f64::INFINITY;
    let mut last_res_cost = f64::INFINITY;
    let mut last_res_distill = f64::INFINITY;
    for n in [64u32, 256, 1024, 4096] {
        let spec = TensorPowerSpectrum::build(&p, n).unwrap();
        let exact_c = cost_eps(&spec, eps).unwrap().log2_m;
        let exact_d = distill_eps(&spec, eps).unwrap().log2_m;
        let est_c = second_order_cost(&p, n, eps).unwrap().estimate;
        let est_d = second_order_distill(&p, n, eps).unwrap().estimate;
        let sqrt_n = (n as f64).sqrt();
        let res_c = (exact_c - est_c).abs() / sqrt_n;
        let res_d = (exact_d - est_d).abs() / sqrt_n;
        assert!(
            res_c < prev_res_cost,
            "cost residual/√n not strictly decreasing at n={n}: {res_c} vs {prev_res_cost}"
        );
        assert!(
            res_d < prev_res_distill,
            "distill residual/√n not strictly decreasing at n={n}: {res_d} vs {prev_res_distill}"
        );
        prev_res_cost = res_c;
        prev_res_distill = res_d;
        last_res_cost = res_c;
        last_res_distill = res_d;
    }
    assert!(
        last_res_cost < 0.2 && last_res_distill < 0.2,
        "residual/√n at n=4096 above 0.2 bits: cost {last_res_cost}, distill {last_res_distill}"
    );
    let elapsed = start.elapsed();
    assert!(
        elapsed.as_secs_f64() < 30.0,
        "convergence run took {elapsed:?}"
    );
    println!(
        "criterion 6 PASS: residual/√n strictly decreasing, {:.4}/{:.4} bits at n=4096 ({:.1} s)",
        last_res_distill,
        last_res_cost,
        elapsed.as_secs_f64()
    );
}

#[test]
fn criterion_07_performance() {
    // the dense route at these sizes would need 2^100000 entries; only
    // the compressed spectrum makes the computation feasible at all
    let p2 = ProbVec::new(&[0.9, 0.1]).unwrap();
    let start = Instant::now();
    let spec = TensorPowerSpectrum::build(&p2, 100_000).unwrap();
    let d = distill_eps(&spec, 0.1).unwrap();
    let c = cost_eps(&spec, 0.1).unwrap();
    let elapsed_large_n = start.elapsed();
    assert!(d.log2_m > 0.0 && c.log2_m >= d.log2_m);
    assert!(
        elapsed_large_n.as_secs_f64() < 5.0,
        "d=2 n=100000 took {elapsed_large_n:?}, budget 5 s"
    );
    drop(spec);

    let p4 = ProbVec::new(&[0.4, 0.3, 0.2, 0.1]).unwrap();
    let start = Instant::now();
    let spec = TensorPowerSpectrum::build(&p4, 200).unwrap();
    let d = distill_eps(&spec, 0.1).unwrap();
    let c = cost_eps(&spec, 0.1).unwrap();
    let elapsed_large_d = start.elapsed();
    assert!(d.log2_m > 0.0 && c.log2_m >= d.log2_m);
    assert!(
        elapsed_large_d.as_secs_f64() < 10.0,
        "d=4 n=200 took {elapsed_large_d:?}, budget 10 s"
    );
    println!(
        "criterion 7 PASS: d=2 n=100000 in {:.2} s (<5), d=4 n=200 in {:.2} s (<10)",
        elapsed_large_n.as_secs_f64(),
        elapsed_large_d.as_secs_f64()
    );
}

#[test]
fn criterion_08_fidelity_laws() {
    // exhaustive m on spectra with d^n ≤ 4096
    let cases = [
        (vec![0.9, 0.1], 12u32),       // 2^12 = 4096
        (vec![0.5, 0.3, 0.2], 7),      // 3^7 = 2187
        (vec![0.4, 0.3, 0.2, 0.1], 5), // 4^5 = 1024
    ];
    for (raw, n) in cases {
        let p = ProbVec::new(&raw).unwrap();
        let spec = TensorPowerSpectrum::build(&p, n).unwrap();
        let ambient = spec.ambient_count().to_u64().unwrap();
        let mut prev = 1.0 + 1e-12;
        for m in 2..=(ambient + 64) {
            let f = fidelity_of_distillation(&spec, &BigUint::from(m))
                .unwrap()
                .fidelity;
            assert!((0.0..=1.0).contains(&f), "F out of range at m={m}");
            assert!(f <= prev + 1e-12, "F increased at m={m}: {f} > {prev}");
            if m > ambient {
                let cap = (ambient as f64 / m as f64).sqrt();
                assert!(f <= cap + 1e-12, "overlap cap violated at m={m}");
            }
            prev = f;
        }
    }

    let ebit = TensorPowerSpectrum::build(&ProbVec::new(&[0.5, 0.5]).unwrap(), 1).unwrap();
    let f = fidelity_of_distillation(&ebit, &BigUint::from(2u8)).unwrap();
    assert!(
        (f.fidelity - 1.0).abs() < 1e-12,
        "F(Φ₂, 2) = {}",
        f.fidelity
    );

    let product = TensorPowerSpectrum::build(&ProbVec::new(&[1.0]).unwrap(), 1).unwrap();
    let f = fidelity_of_distillation(&product, &BigUint::from(2u8)).unwrap();
    assert!(
        (f.fidelity - 0.5).abs() < 1e-12,
        "F(product, 2) = {}",
        f.fidelity
    );

    let e = e_d_regula(&ProbVec::new(&[0.5, 0.5]).unwrap(), 1, 0.0).unwrap();
    assert!((e - 1.0).abs() < 1e-12, "E_D(Φ₂, 0) = {e}");

    println!("criterion 8 PASS: F ∈ [0,1], non-increasing, cap law, and fixed points hold");
}

#[test]
fn criterion_09_tstar_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0009);
    for case in 0..100 {
        let p = random_probvec(&mut rng, 2);
        let q_dim = rng.gen_range(1..=4usize);
        let q = random_probvec(&mut rng, q_dim);
        let fast = t_star(&p, &q);
        let grid = oracle::oracle_tstar_2d(&p, &q).unwrap();
        assert!(
            (fast - grid).abs() < 1e-5,
            "case {case}: t_star {fast} vs grid {grid}"
        );
    }
    println!("criterion 9 PASS: t_star matches the 1-D grid oracle on 100 cases");
}

#[test]
fn criterion_10_bound_and_cdf_grids() {
    for e in [0.0, 0.1, 0.5, 1.0, 2.5, 10.0] {
        for i in 1..50 {
            let eps = i as f64 / 100.0; // (0, 0.5)
            let bound = one_way_distill_bound(e, eps).unwrap();
            assert!(bound >= e, "bound {bound} below E={e} at eps={eps}");
        }
    }
    for i in 1..1000 {
        let a = i as f64 / 1000.0;
        let z = std_normal_cdf_inv(a).unwrap();
        assert!(
            (std_normal_cdf(z) - a).abs() <= 1e-9,
            "round-trip failed at a={a}"
        );
    }
    println!("criterion 10 PASS: one-way bound dominates E; Φ/Φ⁻¹ round-trip ≤ 1e-9 on grid");
}

/// The compressed route must also reproduce the dense oracle on the
/// exhaustive desk-scale grid of criterion 1's quantities for a couple
/// of fixed spectra (belt-and-braces beyond the random suite).
#[test]
fn exhaustive_small_grid_cross_check() {
    for (raw, n) in [(vec![0.9, 0.1], 6u32), (vec![0.5, 0.3, 0.2], 4)] {
        let p = ProbVec::new(&raw).unwrap();
        let spec = TensorPowerSpectrum::build(&p, n).unwrap();
        let ds = DenseSpectrum::build(&p, n).unwrap();
        let total = ds.len() as u64;
        for k in 0..=total {
            let fast = spec
                .ky_fan(&BigUint::from(k), SearchStrategy::Bisect)
                .unwrap();
            let dense = oracle::oracle_ky_fan(&ds, k as usize);
            assert!((fast - dense).abs() < 1e-9, "ky_fan at k={k}");
        }
        for i in 0..200 {
            let eps = i as f64 / 200.0 * 0.95;
            let fast_d = distill_eps(&spec, eps).unwrap().m;
            assert_eq!(fast_d, BigUint::from(oracle::oracle_distill(&ds, eps)));
            if eps > 0.0 {
                let fast_c = cost_eps(&spec, eps).unwrap().m;
                assert_eq!(fast_c, BigUint::from(oracle::oracle_cost(&ds, eps)));
            }
        }
        for m in 2..=(2 * total) {
            let fast_k = entdist::distillnorm::k_star(&spec, &BigUint::from(m)).unwrap();
            assert_eq!(
                fast_k,
                BigUint::from(oracle::oracle_kstar(&ds, m as usize)),
                "k_star at m={m}"
            );
        }
    }
}

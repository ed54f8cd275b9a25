//! Acceptance suite: every guarantee and cost claim the library makes, run
//! at full trial counts with pinned tolerances. One pass/fail line per
//! criterion (`cargo test --test acceptance -- --nocapture` to see them).

use std::time::Instant;

use rand::prelude::*;

use maxdiv::bench::scaling_run;
use maxdiv::dispersion::dispersion;
use maxdiv::distance::Kernel;
use maxdiv::intersection::{
    convergence_bound, intersection_local_search, ptas_schedule, ScheduleMode,
};
use maxdiv::local_search::{default_iterations, local_search, matroid_bound};
use maxdiv::matroid::{brualdi_bijection, IntersectionConstraint, Matroid};
use maxdiv::oracle::{brute_force_combined, brute_force_intersection, brute_force_msd};
use maxdiv::submodular::{
    combined_local_search, combined_objective, curvature, decompose, PotentialMode, SubmodularFn,
};
use maxdiv::synth::{
    random_explicit_submodular, random_kernel_instance_of_size, random_partition_matroid,
    random_points, trial_rng,
};
use maxdiv::verify::{suite_cheap_matching, suite_set_inequality, suite_swap_identity};

const TOL: f64 = 1e-9;
const SEED: u64 = 20_240_613;

fn report(number: u32, name: &str, started: Instant, detail: &str) {
    println!(
        "acceptance {number:2} {name}: PASS ({:.2} s{}{})",
        started.elapsed().as_secs_f64(),
        if detail.is_empty() { "" } else { ", " },
        detail
    );
}

#[test]
fn criterion_01_negative_type_set_inequality() {
    let started = Instant::now();
    let outcome = suite_set_inequality(10_000, SEED, None);
    assert!(
        outcome.passed(),
        "acceptance 01: {} violations, first: {:?}",
        outcome.violations,
        outcome.first_violation
    );
    report(1, "set-inequality", started, "10000 trials");
}

#[test]
fn criterion_02_cheap_matching() {
    let started = Instant::now();
    let outcome = suite_cheap_matching(10_000, SEED, None);
    assert!(
        outcome.passed(),
        "acceptance 02: {} violations, first: {:?}",
        outcome.violations,
        outcome.first_violation
    );
    report(2, "cheap-matching", started, "10000 trials");
}

#[test]
fn criterion_03_swap_identity() {
    let started = Instant::now();
    let outcome = suite_swap_identity(10_000, SEED, None);
    assert!(
        outcome.passed(),
        "acceptance 03: {} violations, first: {:?}",
        outcome.violations,
        outcome.first_violation
    );
    report(3, "swap-identity", started, "10000 trials");
}

#[test]
fn criterion_04_matroid_local_search_guarantee() {
    let started = Instant::now();
    let mut runs = 0u64;
    for k in 2..=6usize {
        for partition in [false, true] {
            for trial in 0..200u64 {
                let mut rng = trial_rng(SEED, 400 + k as u64 * 2 + partition as u64, trial);
                let n = rng.random_range((k + 1)..=12);
                let (_, d) = random_kernel_instance_of_size(&mut rng, n, 5);
                let m = if partition {
                    random_partition_matroid(&mut rng, n, k)
                } else {
                    Matroid::uniform(n, k)
                };
                let ell = default_iterations(k);
                let (found, trace) = local_search(&d, &m, ell);
                let value = dispersion(&d, &found);
                let (_, opt) = brute_force_msd(&d, &m).expect("within guard");
                assert!(
                    value <= opt * (1.0 + TOL) + TOL,
                    "local search beat the oracle: {value} > {opt}"
                );
                let bound = matroid_bound(k, ell);
                let ratio = if opt > 0.0 { value / opt } else { 1.0 };
                assert!(
                    ratio >= bound - TOL,
                    "k={k} partition={partition} n={n} trial={trial}: \
                     ratio {ratio} < bound {bound}"
                );
                if k == 6 {
                    assert!(
                        ratio >= 1.0 - 5.0 / 6.0 - TOL,
                        "k=6 trial={trial}: ratio {ratio} < 1 - 5/6"
                    );
                }
                // Cost model: per-scan distance evaluations stay within
                // c0 * n * k.
                let per_scan = trace.distance_evals as f64 / trace.scans.max(1) as f64;
                assert!(
                    per_scan <= 4.0 * (n * k) as f64,
                    "per-scan evals {per_scan} exceed 4nk"
                );
                runs += 1;
            }
        }
    }
    report(
        4,
        "matroid-guarantee",
        started,
        &format!("{runs} runs across 10 configurations"),
    );
}

#[test]
fn criterion_05_intersection_guarantee() {
    let started = Instant::now();
    let mut runs = 0u64;
    let mut bound_checked = 0u64;
    for trial in 0..100u64 {
        let mut rng = trial_rng(SEED, 500, trial);
        let n = rng.random_range(4..=10);
        let (_, d) = random_kernel_instance_of_size(&mut rng, n, 3);
        let k1 = rng.random_range(2..=5.min(n));
        let k2 = rng.random_range(2..=5.min(n));
        let m1 = random_partition_matroid(&mut rng, n, k1);
        let m2 = random_partition_matroid(&mut rng, n, k2);
        let c = IntersectionConstraint::new(m1, m2).expect("same ground set");
        let k = c.k_common();
        assert!(k >= 1);
        let p = 2usize;
        let ell = k as u64 + (60.0 * k as f64 * 6f64.ln()).ceil() as u64;

        // Feasibility and maximality are also asserted inside every
        // iteration (debug assertions are active in test builds).
        let (found, trace) = intersection_local_search(&d, &c, p, ell).unwrap();
        assert!(c.is_common_independent(&found));
        assert!(c.is_maximal(&found));
        let mut prev = trace.start_value;
        for it in &trace.iterations {
            assert!(it.value > prev, "trace not strictly increasing");
            prev = it.value;
        }

        let value = dispersion(&d, &found);
        let (_, opt) = brute_force_intersection(&d, &c).expect("within guard");
        assert!(
            value <= opt * (1.0 + TOL) + TOL,
            "intersection search beat the oracle"
        );
        if let Some(bound) = convergence_bound(p, k, ell) {
            if bound > 0.0 {
                let ratio = if opt > 0.0 { value / opt } else { 1.0 };
                assert!(
                    ratio >= bound - TOL,
                    "trial={trial}: ratio {ratio} < bound {bound}"
                );
                bound_checked += 1;
            }
        }
        runs += 1;
    }
    report(
        5,
        "intersection-guarantee",
        started,
        &format!("{runs} runs, {bound_checked} with applicable positive bound (p=2 leaves the convergence-bound precondition 8p <= k unmet at this scale)"),
    );
}

#[test]
fn criterion_06_ptas_schedule_arithmetic() {
    let started = Instant::now();
    for &eps in &[0.1f64, 0.3, 0.5] {
        for &k in &[10usize, 100, 1000] {
            let s = ptas_schedule(eps, k).unwrap();
            let p = (12.0 / eps).ceil() as usize + 1;
            assert_eq!(s.p, p, "eps={eps}: p");
            let threshold = (144.0 / eps) * p as f64;
            let expected_mode = if (k as f64) < threshold {
                ScheduleMode::Enumerate
            } else {
                ScheduleMode::Search
            };
            assert_eq!(s.mode, expected_mode, "eps={eps} k={k}: mode");
            assert!(s.ell >= k as u64);
            let ratio: f64 = 1.0 - 1.0 / (60.0 * k as f64);
            let m = (s.ell - k as u64) as i32;
            assert!(
                2.0 * ratio.powi(m) <= eps / 3.0,
                "eps={eps} k={k}: decay condition unmet"
            );
        }
    }
    report(6, "ptas-schedule", started, "9 parameter combinations");
}

#[test]
fn criterion_07_submodular_suite() {
    let started = Instant::now();
    // Curvature of linear objectives is exactly zero.
    for trial in 0..20u64 {
        let mut rng = trial_rng(SEED, 700, trial);
        let n = rng.random_range(2..=10);
        let weights: Vec<f64> = (0..n).map(|_| rng.random::<f64>() * 3.0).collect();
        let f = SubmodularFn::linear(weights).unwrap();
        assert_eq!(curvature(&f), 0.0);
    }

    let mut checked = 0u64;
    for trial in 0..60u64 {
        let mut rng = trial_rng(SEED, 701, trial);
        let n = rng.random_range(2..=10);
        let f = random_explicit_submodular(&mut rng, n);
        let c = curvature(&f);
        let dec = decompose(&f).expect("valid submodular input");
        let set_of =
            |mask: usize| -> Vec<usize> { (0..n).filter(|&x| mask & (1 << x) != 0).collect() };

        // Decomposition properties, evaluated directly over all subsets.
        let scale = f.value(&(0..n).collect::<Vec<_>>()).max(1.0);
        let tol = TOL * scale;
        assert!(dec.f_prime.value(&[]).abs() <= tol, "residual not normalized");
        for mask in 0..(1usize << n) {
            let set = set_of(mask);
            let l: f64 = dec.l_value(&set);
            let fp = dec.f_prime.value(&set);
            assert!(
                (l + fp - f.value(&set)).abs() <= tol,
                "l + f' does not reconstruct f"
            );
            assert!(fp <= c * f.value(&set) + tol, "f' exceeds c*f");
            for x in 0..n {
                if mask & (1 << x) != 0 {
                    continue;
                }
                let with_x = set_of(mask | (1 << x));
                assert!(
                    dec.f_prime.value(&with_x) >= fp - tol,
                    "residual not monotone"
                );
                for y in (x + 1)..n {
                    if mask & (1 << y) != 0 {
                        continue;
                    }
                    let with_y = set_of(mask | (1 << y));
                    let with_xy = set_of(mask | (1 << x) | (1 << y));
                    assert!(
                        dec.f_prime.value(&with_x) + dec.f_prime.value(&with_y) + tol
                            >= dec.f_prime.value(&with_xy) + fp,
                        "residual not submodular"
                    );
                }
            }
        }

        // Linear exchange identity over a Brualdi bijection.
        let k = rng.random_range(1..=n);
        let m = Matroid::uniform(n, k);
        let mut all: Vec<usize> = (0..n).collect();
        all.shuffle(&mut rng);
        let a: Vec<usize> = {
            let mut v: Vec<usize> = all.iter().copied().take(k).collect();
            v.sort_unstable();
            v
        };
        all.shuffle(&mut rng);
        let b: Vec<usize> = {
            let mut v: Vec<usize> = all.iter().copied().take(k).collect();
            v.sort_unstable();
            v
        };
        let pairs = brualdi_bijection(&m, &a, &b).unwrap();
        let la = dec.l_value(&a);
        let sum: f64 = pairs
            .iter()
            .map(|&(x, y)| {
                let swapped: Vec<usize> = a
                    .iter()
                    .copied()
                    .filter(|&z| z != x)
                    .chain(std::iter::once(y))
                    .collect();
                la - dec.l_value(&swapped)
            })
            .sum();
        assert!(
            (la - (dec.l_value(&b) + sum)).abs() <= tol,
            "linear exchange identity violated"
        );
        checked += 1;
    }
    report(
        7,
        "submodular-suite",
        started,
        &format!("{checked} explicit objectives"),
    );
}

#[test]
fn criterion_08_combined_guarantee() {
    let started = Instant::now();
    let mut runs = 0u64;
    for trial in 0..100u64 {
        let mut rng = trial_rng(SEED, 800, trial);
        let k = rng.random_range(3..=6);
        let n = rng.random_range((k + 1)..=12);
        let (_, d) = random_kernel_instance_of_size(&mut rng, n, 4);
        let m = if rng.random::<bool>() {
            Matroid::uniform(n, k)
        } else {
            random_partition_matroid(&mut rng, n, k)
        };
        let weights: Vec<f64> = (0..n).map(|_| rng.random::<f64>() * 2.0).collect();
        let f = SubmodularFn::linear(weights).unwrap();

        let (found, _) =
            combined_local_search(&d, &m, &f, PotentialMode::LinearExact, 10_000).unwrap();
        let (_, _, g) = combined_objective(&d, &f, &found);
        let opt = brute_force_combined(&d, &m, &f).expect("within guard");
        let factor = 1.0 - opt.lambda_d * 4.0 / k as f64;
        assert!(
            g >= factor * opt.g - TOL,
            "trial={trial} k={k} n={n}: g {g} < {factor} * {} ",
            opt.g
        );
        assert!(g <= opt.g * (1.0 + TOL) + TOL);
        runs += 1;
    }
    report(8, "combined-guarantee", started, &format!("{runs} runs"));
}

#[test]
fn criterion_09_cost_model_scaling() {
    let started = Instant::now();
    let rows = scaling_run(&[500, 1000, 2000, 4000], 20, Kernel::Euclidean, SEED).unwrap();
    assert_eq!(rows.len(), 4);
    let mut detail = String::new();
    for pair in rows.windows(2) {
        let ratio = pair[1].evals_per_scan() / pair[0].evals_per_scan();
        assert!(
            (1.8..=2.2).contains(&ratio),
            "doubling n from {} to {}: per-iteration eval ratio {ratio} outside [1.8, 2.2]",
            pair[0].n,
            pair[1].n
        );
        detail.push_str(&format!("{:.3} ", ratio));
    }
    report(
        9,
        "cost-model",
        started,
        &format!("doubling ratios: {}", detail.trim()),
    );
}

#[test]
fn criterion_10_deterministic_reports() {
    let started = Instant::now();
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("pts.csv");
    let mut content = String::from("id,x1,x2\n");
    let mut rng = trial_rng(SEED, 1000, 0);
    for (i, p) in random_points(&mut rng, 30, 2).iter().enumerate() {
        content.push_str(&format!("p{i},{},{}\n", p[0], p[1]));
    }
    std::fs::write(&csv, content).unwrap();

    let run = |report_path: &std::path::Path| {
        let status = std::process::Command::new(env!("CARGO_BIN_EXE_maxdiv"))
            .args([
                "run",
                "--input",
                csv.to_str().unwrap(),
                "--distance",
                "euclidean",
                "--constraint",
                "uniform",
                "--k",
                "5",
                "--algorithm",
                "local-search",
                "--seed",
                "7",
                "--compare",
                "--report",
                report_path.to_str().unwrap(),
            ])
            .stderr(std::process::Stdio::null())
            .status()
            .unwrap();
        assert!(status.success());
    };
    let r1 = dir.path().join("r1.json");
    let r2 = dir.path().join("r2.json");
    run(&r1);
    run(&r2);
    let b1 = std::fs::read(&r1).unwrap();
    let b2 = std::fs::read(&r2).unwrap();
    assert!(!b1.is_empty());
    assert_eq!(b1, b2, "reports differ between identical runs");
    report(10, "determinism", started, "byte-identical reports");
}

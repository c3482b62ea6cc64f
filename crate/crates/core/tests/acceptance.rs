//! Acceptance suite. Runs without the libtest harness so that every
//! criterion prints its verdict line; exits non-zero if any criterion fails.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use scanvar::embedding::shift;
use scanvar::hilbert::{
    build_gibbs, center, lazy, norm_sq, random_dist, random_family, random_scan, Dist, Kernel,
    KernelFamily, ObsFunction,
};
use scanvar::ordering::{
    bellman_objective, bellman_probes, bellman_value, check_peskun_ordering, gap_lower_bound,
    palindrome_check, variational_identity_check, BetaPath,
};
use scanvar::simulate::estimate_variance;
use scanvar::variance::{
    finite_m_variance_exact, joint_law_exact, summability_check, var_lambda_rand, var_lambda_strat,
    var_limit, JointScheme, SchemeSelector, VarianceMethod,
};
use scanvar::{BlockVector, EmbeddedOperator, OperatorSelector, Scheme};

type Outcome = Result<String, String>;

fn observable(n: usize, seed: u64) -> ObsFunction {
    let mut r = ChaCha8Rng::seed_from_u64(seed ^ 0xF00D);
    ObsFunction::new((0..n).map(|_| r.random_range(-3.0..3.0)).collect()).unwrap()
}

fn random_block(n: usize, k: usize, r: &mut ChaCha8Rng) -> BlockVector {
    BlockVector::from_flat(&nalgebra::DVector::from_fn(n * k, |_, _| r.random_range(-1.0..1.0)), k)
}

fn two_state() -> KernelFamily {
    let p1 = Kernel::from_rows(&[vec![0.9, 0.1], vec![0.1, 0.9]]).unwrap();
    let p2 = Kernel::from_rows(&[vec![0.6, 0.4], vec![0.4, 0.6]]).unwrap();
    KernelFamily::new(Dist::uniform(2).unwrap(), vec![p1, p2]).unwrap()
}

const SWEEP_LAMBDAS: [f64; 4] = [0.3, 0.6, 0.9, 0.99];

struct Sweep {
    min_gap: f64,
    min_gap_minus_bound: f64,
    min_bound: f64,
    cases: usize,
    elapsed: Duration,
}

fn k2_sweep() -> Sweep {
    let start = Instant::now();
    let mut s = Sweep {
        min_gap: f64::INFINITY,
        min_gap_minus_bound: f64::INFINITY,
        min_bound: f64::INFINITY,
        cases: 0,
        elapsed: Duration::ZERO,
    };
    for i in 0..50u64 {
        let n = 3 + (i as usize % 18);
        let fam = random_family(n, 2, 1000 + i).unwrap();
        let f = observable(n, i);
        for lambda in SWEEP_LAMBDAS {
            let strat = var_lambda_strat(&fam, &f, lambda, VarianceMethod::Resolvent, 0).unwrap().value;
            let gap = var_lambda_rand(&fam, &f, lambda).unwrap() - strat;
            let bound = gap_lower_bound(&fam, &f, lambda).unwrap();
            s.min_gap = s.min_gap.min(gap);
            s.min_gap_minus_bound = s.min_gap_minus_bound.min(gap - bound);
            s.min_bound = s.min_bound.min(bound);
            s.cases += 1;
        }
    }
    s.elapsed = start.elapsed();
    s
}

fn criterion_1(s: &Sweep) -> Outcome {
    let detail = format!(
        "{} cases, min(var_rand - var_strat) = {:.3e}, {:.2?}",
        s.cases, s.min_gap, s.elapsed
    );
    if s.min_gap >= -1e-10 && s.elapsed < Duration::from_secs(30) {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn criterion_2(s: &Sweep) -> Outcome {
    let detail = format!(
        "min(gap - bound) = {:.3e}, min bound = {:.3e}",
        s.min_gap_minus_bound, s.min_bound
    );
    if s.min_gap_minus_bound >= -1e-9 && s.min_bound >= -1e-12 {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn criterion_3() -> Outcome {
    let mut worst_slack = f64::INFINITY;
    for i in 0..20u64 {
        let n = 2 + (i as usize % 9);
        let k = 1 + (i as usize % 4);
        let fam = random_family(n, k, 2000 + i).unwrap();
        let f = observable(n, 2000 + i);
        for lambda in [0.3, 0.6, 0.9] {
            let r = var_lambda_strat(&fam, &f, lambda, VarianceMethod::Resolvent, 0).unwrap();
            let s = var_lambda_strat(&fam, &f, lambda, VarianceMethod::Series, 400).unwrap();
            let slack = s.truncation_bound + 1e-9 - (r.value - s.value).abs();
            worst_slack = worst_slack.min(slack);
        }
    }
    let detail = format!("20 families, min(bound + 1e-9 - |diff|) = {worst_slack:.3e}");
    if worst_slack >= 0.0 {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn criterion_4() -> Outcome {
    let fam = two_state();
    let f = ObsFunction::new(vec![1.0, -1.0]).unwrap();
    let strat = var_lambda_strat(&fam, &f, 0.5, VarianceMethod::Resolvent, 0).unwrap().value;
    let rand = var_lambda_rand(&fam, &f, 0.5).unwrap();
    let lim_s = var_limit(&fam, &f, SchemeSelector::Strat).unwrap();
    let lim_r = var_limit(&fam, &f, SchemeSelector::Rand).unwrap();
    let errs = [
        (strat - 77.0 / 48.0).abs(),
        (rand - 5.0 / 3.0).abs(),
        (rand - strat - 1.0 / 16.0).abs(),
        (lim_s - 18.0 / 7.0).abs(),
        (lim_r - 3.0).abs(),
    ];
    let worst = errs.iter().copied().fold(0.0, f64::max);
    let detail = format!(
        "strat {strat:.12}, rand {rand:.12}, limits {lim_s:.12} / {lim_r:.12}, max err {worst:.1e}"
    );
    if worst <= 1e-9 {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn criterion_5() -> Outcome {
    let start = Instant::now();
    let mut notes = Vec::new();
    let mut ok = true;
    let mut tested = 0;
    for seed in 3000u64.. {
        if tested == 3 {
            break;
        }
        let n = 4 + (seed as usize % 3);
        let fam = random_family(n, 2 + (seed as usize % 2), seed).unwrap();
        let f = observable(n, seed);
        if !summability_check(&fam, &f).unwrap().absolutely_summable {
            continue;
        }
        tested += 1;
        for selector in [SchemeSelector::Strat, SchemeSelector::Rand] {
            let limit = var_limit(&fam, &f, selector).unwrap();
            let errs: Vec<(usize, f64)> = (6..=12)
                .map(|p| {
                    let m = 1usize << p;
                    (m, (finite_m_variance_exact(&fam, &f, m, selector).unwrap() - limit).abs())
                })
                .collect();
            // the constant is read off the two coarsest horizons; the finer
            // ones must then respect it
            let c = 2.0 * errs[..2].iter().map(|(m, e)| *m as f64 * e).fold(0.0, f64::max);
            let rate_ok = errs.iter().all(|(m, e)| *e <= c / *m as f64 + 1e-12);
            ok &= rate_ok;
            notes.push(format!("{selector:?} C={c:.3e}{}", if rate_ok { "" } else { " rate violated" }));
        }
        if tested == 1 {
            for (scheme, selector) in [(Scheme::Strat, SchemeSelector::Strat), (Scheme::Rand, SchemeSelector::Rand)] {
                let m = 1 << 12;
                let exact = finite_m_variance_exact(&fam, &f, m, selector).unwrap();
                let est = estimate_variance(&fam, &f, m, 200, seed, scheme).unwrap();
                let z = est.z_score(exact);
                ok &= z.abs() <= 3.0;
                notes.push(format!("MC {scheme:?} z={z:.2}"));
            }
        }
    }
    let elapsed = start.elapsed();
    ok &= elapsed < Duration::from_secs(120);
    let detail = format!("{}; {elapsed:.2?}", notes.join(", "));
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn criterion_6() -> Outcome {
    let mut worst = 0.0f64;
    for i in 0..10u64 {
        let n = 2 + (i as usize % 4);
        let k = 1 + (i as usize % 3);
        let fam = random_family(n, k, 4000 + i).unwrap();
        for m in 0..=3 {
            let a = joint_law_exact(&fam, m, JointScheme::Strat).unwrap();
            let b = joint_law_exact(&fam, m, JointScheme::EmbeddedComponent).unwrap();
            worst = worst.max(a.max_abs_diff(&b));
        }
    }
    let detail = format!("10 families, m <= 3, max entrywise diff {worst:.3e}");
    if worst <= 1e-12 {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn criterion_7() -> Outcome {
    let betas: Vec<f64> = (0..=10).map(|i| i as f64 / 10.0).collect();
    let h = 1e-5;
    let mut min_margin = f64::INFINITY;
    let mut min_derivative = f64::INFINITY;
    let mut worst_fd = 0.0f64;
    for i in 0..20u64 {
        let n = 3 + (i as usize % 6);
        let a = random_family(n, 2, 5000 + i).unwrap();
        let mut r = ChaCha8Rng::seed_from_u64(5000 + i);
        let b = a.map_kernels(|_, k| lazy(k, r.random_range(0.1..0.7))).unwrap();
        let f = observable(n, 5000 + i);
        let report = check_peskun_ordering(&a, &b, &f, &SWEEP_LAMBDAS, 1e-10).map_err(|e| e.to_string())?;
        for row in &report.rows {
            min_margin = min_margin.min(row.var_strat_b + 1e-10 - row.var_strat_a);
        }
        let path = BetaPath::new(&a, &b).unwrap();
        for lambda in SWEEP_LAMBDAS {
            for &beta in &betas {
                let d = path.derivative(&f, lambda, beta).unwrap();
                let up = path.delta(&f, lambda, beta + h).unwrap();
                let down = path.delta(&f, lambda, beta - h).unwrap();
                let fd = (up - down) / (2.0 * h);
                worst_fd = worst_fd.max((d - fd).abs() / d.abs().max(fd.abs()));
                min_derivative = min_derivative.min(d);
            }
        }
    }
    let detail = format!(
        "20 pairs, min(var_b + 1e-10 - var_a) = {min_margin:.3e}, min derivative = {min_derivative:.3e}, worst FD rel err = {worst_fd:.1e}"
    );
    if min_margin >= 0.0 && min_derivative >= -1e-9 && worst_fd <= 1e-6 {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn criterion_8() -> Outcome {
    let mut worst = 0.0f64;
    let mut r = ChaCha8Rng::seed_from_u64(8);
    for i in 0..20u64 {
        let n = 2 + (i as usize % 6);
        let k = 1 + (i as usize % 4);
        let fam = random_family(n, k, 6000 + i).unwrap();
        let pi = fam.pi();
        let op = EmbeddedOperator::new(&fam);
        let phi = random_block(n, k, &mut r);
        let psi = random_block(n, k, &mut r);
        let t_phi = op.apply(&phi).unwrap();
        let ts_psi = op.apply_adjoint(&psi).unwrap();
        worst = worst.max((psi.inner(&t_phi, pi).unwrap() - ts_psi.inner(&phi, pi).unwrap()).abs());
        let sandwich = shift(&op.apply(&shift(&psi, -1)).unwrap(), -1);
        worst = worst.max(sandwich.sub(&ts_psi).amax());
        let shifted = psi.inner(&shift(&phi, 1), pi).unwrap() - shift(&psi, -1).inner(&phi, pi).unwrap();
        worst = worst.max(shifted.abs());
        // the dense realisations agree with the weighted transpose
        let w = op.block_weights();
        let t = op.matrix(OperatorSelector::T);
        let t_star = op.matrix(OperatorSelector::TAdjoint);
        let d = DMatrix::from_diagonal(&w);
        let d_inv = DMatrix::from_diagonal(&w.map(|x| 1.0 / x));
        worst = worst.max((d_inv * t.transpose() * d - t_star).amax());
    }
    let detail = format!("20 instances, max residual {worst:.3e}");
    if worst <= 1e-11 {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn criterion_9() -> Outcome {
    let mut worst = f64::NEG_INFINITY;
    for i in 0..10u64 {
        let n = 2 + (i as usize % 7);
        let fam = random_family(n, 2, 7000 + i).unwrap();
        let w = fam.pi().weights();
        let lambda = 0.1 + 0.088 * i as f64;
        let op = DMatrix::identity(n, n) - random_scan(&fam).matrix() * lambda;
        let f = observable(n, 7000 + i).into_vector();
        let v = bellman_value(&op, w, &f).map_err(|e| e.to_string())?;
        for g in bellman_probes(&v.argmax, 200, 7000 + i) {
            worst = worst.max(bellman_objective(&op, w, &f, &g) - v.value);
        }
        // the same supremum through a non-reversible π-invariant kernel
        let cycle = fam.kernel(0).compose(fam.kernel(1));
        let rep = variational_identity_check(&cycle, fam.pi(), &center(&observable(n, i), fam.pi()).unwrap(), lambda, 200, i)
            .map_err(|e| e.to_string())?;
        worst = worst.max(rep.max_probe_excess);
    }
    let detail = format!("10 operators x 200 probes, max excess over supremum {worst:.3e}");
    if worst <= 1e-10 {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn criterion_10() -> Outcome {
    let grids = [(2, 2), (2, 3), (3, 4), (5, 5), (6, 6)];
    let mut worst = 0.0f64;
    for (i, (n1, n2)) in grids.iter().enumerate() {
        let joint = random_dist(n1 * n2, 8000 + i as u64).unwrap();
        let g0 = build_gibbs(&joint, *n1, *n2, 0).unwrap();
        let g1 = build_gibbs(&joint, *n1, *n2, 1).unwrap();
        let fam = KernelFamily::new(joint.clone(), vec![g0, g1]).unwrap();
        let f = observable(n1 * n2, 8000 + i as u64);
        let rand = var_limit(&fam, &f, SchemeSelector::Rand).map_err(|e| e.to_string())?;
        let strat = var_limit(&fam, &f, SchemeSelector::Strat).map_err(|e| e.to_string())?;
        let norm = norm_sq(&center(&f, &joint).unwrap(), &joint).unwrap();
        worst = worst.max((rand - (2.0 * strat - norm)).abs());
    }
    let detail = format!("5 grids up to 6x6, max residual {worst:.3e}");
    if worst <= 1e-8 {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn criterion_11() -> Outcome {
    let betas: Vec<f64> = (0..=10).map(|i| i as f64 / 10.0).collect();
    let mut gap = 0.0f64;
    let mut min_d = f64::INFINITY;
    for p in [2usize, 3] {
        for s in 0..3u64 {
            let n = 3 + s as usize;
            let gens = random_family(n, p, 9000 + 10 * p as u64 + s).unwrap();
            let f = observable(n, 9000 + s);
            for lambda in SWEEP_LAMBDAS {
                let rep = palindrome_check(gens.pi(), gens.kernels(), lambda, &f, &betas, 0.4)
                    .map_err(|e| e.to_string())?;
                gap = gap.max(rep.max_component_gap());
                min_d = min_d.min(rep.min_derivative());
            }
        }
    }
    let detail = format!("p = 2, 3: max component gap {gap:.3e}, min derivative {min_d:.3e}");
    if gap < 1e-11 && min_d >= -1e-9 {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn run(name: &str, f: impl FnOnce() -> Outcome) -> bool {
    let outcome = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|e| {
        let msg = e
            .downcast_ref::<String>()
            .cloned()
            .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
            .unwrap_or_default();
        Err(format!("panicked: {msg}"))
    });
    match outcome {
        Ok(d) => {
            println!("PASS  {name}: {d}");
            true
        }
        Err(d) => {
            println!("FAIL  {name}: {d}");
            false
        }
    }
}

fn main() -> ExitCode {
    let sweep = k2_sweep();
    let results = [
        run("criterion 1 (k=2 ordering)", || criterion_1(&sweep)),
        run("criterion 2 (gap lower bound)", || criterion_2(&sweep)),
        run("criterion 3 (resolvent vs series)", criterion_3),
        run("criterion 4 (two-state closed forms)", criterion_4),
        run("criterion 5 (finite-M rate and Monte Carlo)", criterion_5),
        run("criterion 6 (embedded component law)", criterion_6),
        run("criterion 7 (Peskun-type ordering and beta derivative)", criterion_7),
        run("criterion 8 (adjoint algebra)", criterion_8),
        run("criterion 9 (Bellman supremum)", criterion_9),
        run("criterion 10 (Gibbs projection identity)", criterion_10),
        run("criterion 11 (palindromic cycles)", criterion_11),
    ];
    let passed = results.iter().filter(|r| **r).count();
    println!("acceptance: {passed}/{} criteria passed", results.len());
    if passed == results.len() {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}

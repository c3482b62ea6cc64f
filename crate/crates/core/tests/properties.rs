use nalgebra::{DMatrix, DVector};
use proptest::prelude::*;

use scanvar::embedding::shift;
use scanvar::hilbert::{
    build_gibbs, compose_cycle, lazy, random_dist, random_family, random_scan, sigma,
    validate_family, Dist, KernelFamily, ObsFunction,
};
use scanvar::ordering::{bellman_objective, bellman_probes, bellman_value, gap_lower_bound};
use scanvar::tolerance::{TAU_NUM, TAU_REV};
use scanvar::variance::{
    summability_check, var_lambda_rand, var_lambda_strat, var_limit, SchemeSelector,
    VarianceMethod,
};
use scanvar::{BlockVector, EmbeddedOperator, OperatorSelector};

fn observable(n: usize, seed: u64) -> ObsFunction {
    ObsFunction::new((0..n).map(|i| ((i as f64 + 1.0) * (seed as f64 * 0.618 + 0.3)).sin() * 2.0).collect()).unwrap()
}

fn block(n: usize, k: usize, seed: u64) -> BlockVector {
    BlockVector::from_flat(
        &DVector::from_fn(n * k, |i, _| ((i as f64 + 0.5) * (seed as f64 * 1.37 + 0.11)).cos()),
        k,
    )
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn constructors_are_stochastic_and_reversible(n in 2usize..9, k in 1usize..5, seed in any::<u64>()) {
        let fam = random_family(n, k, seed).unwrap();
        for kernel in fam.kernels() {
            for row in kernel.matrix().row_iter() {
                prop_assert!((row.sum() - 1.0).abs() < 1e-12);
            }
            let l = lazy(kernel, 0.37).unwrap();
            let rep = validate_family(fam.pi().as_slice(), &[kernel.matrix().clone(), l.matrix().clone()], TAU_REV);
            prop_assert!(rep.passed, "{}", rep);
        }
        let p = random_scan(&fam);
        let rep = validate_family(fam.pi().as_slice(), &[p.matrix().clone()], TAU_REV);
        prop_assert!(rep.passed);
    }

    #[test]
    fn cycle_composition_splits(n in 2usize..9, k in 1usize..5, seed in any::<u64>(), s in 0usize..7, t in 0usize..7) {
        let fam = random_family(n, k, seed).unwrap();
        for q in 0..k {
            let whole = compose_cycle(&fam, q, s + t).unwrap();
            let head = compose_cycle(&fam, q, s).unwrap();
            let tail = compose_cycle(&fam, sigma(q, s as i64, k).unwrap(), t).unwrap();
            prop_assert!((whole.matrix() - head.matrix() * tail.matrix()).amax() < TAU_NUM);
        }
    }

    #[test]
    fn random_scan_ignores_order(n in 2usize..7, seed in any::<u64>()) {
        let fam = random_family(n, 3, seed).unwrap();
        let mut ks = fam.kernels().to_vec();
        ks.reverse();
        ks.swap(0, 1);
        let perm = KernelFamily::new(fam.pi().clone(), ks).unwrap();
        // entrywise sums of three terms in a different order may differ in
        // the last bit only
        prop_assert!((random_scan(&fam).matrix() - random_scan(&perm).matrix()).amax() < 1e-15);
    }

    #[test]
    fn gibbs_kernels_are_projections(n1 in 1usize..5, n2 in 1usize..5, seed in any::<u64>()) {
        let joint = random_dist(n1 * n2, seed).unwrap();
        for axis in 0..2 {
            let g = build_gibbs(&joint, n1, n2, axis).unwrap();
            prop_assert!((g.matrix() * g.matrix() - g.matrix()).amax() < TAU_NUM);
        }
    }

    #[test]
    fn embedding_adjoint_and_factorisation(n in 1usize..9, k in 1usize..5, seed in any::<u64>()) {
        let fam = random_family(n.max(2), k, seed).unwrap();
        let n = fam.n();
        let op = EmbeddedOperator::new(&fam);
        let pi = fam.pi();
        let phi = block(n, k, seed);
        let psi = block(n, k, seed.wrapping_add(1));
        let lhs = psi.inner(&op.apply(&phi).unwrap(), pi).unwrap();
        let rhs = op.apply_adjoint(&psi).unwrap().inner(&phi, pi).unwrap();
        prop_assert!((lhs - rhs).abs() < 1e-11);
        prop_assert_eq!(op.apply(&phi).unwrap(), op.diag_apply(&shift(&phi, 1)).unwrap());
        prop_assert_eq!(op.apply_adjoint(&phi).unwrap(), shift(&op.diag_apply(&phi).unwrap(), -1));
        let sandwich = shift(&op.apply(&shift(&phi, -1)).unwrap(), -1);
        prop_assert!(sandwich.sub(&op.apply_adjoint(&phi).unwrap()).amax() < TAU_NUM);
        prop_assert!(
            (shift(&phi, 1).inner(&shift(&psi, 1), pi).unwrap() - phi.inner(&psi, pi).unwrap()).abs() < 1e-12
        );
        prop_assert!(phi.inner(&op.apply_skew(&phi).unwrap(), pi).unwrap().abs() < 1e-12);
    }

    #[test]
    fn resolvent_matches_neumann(n in 2usize..7, k in 1usize..5, seed in any::<u64>(), lambda in 0.0f64..0.9) {
        let fam = random_family(n, k, seed).unwrap();
        let op = EmbeddedOperator::new(&fam);
        let phi = block(n, k, seed);
        let x = op.resolvent_solve(OperatorSelector::T, lambda, &phi).unwrap();
        let mut term = phi.clone();
        let mut acc = phi.clone();
        for _ in 0..200 {
            term = op.apply(&term).unwrap().scale(lambda);
            acc = acc.add(&term);
        }
        let norm = phi.inner(&phi, fam.pi()).unwrap().sqrt();
        let bound = lambda.powi(201) / (1.0 - lambda) * norm + 1e-12;
        // sup-norm of the error is controlled by the same geometric tail
        // because every block is a sup-norm contraction
        prop_assert!(x.sub(&acc).amax() <= bound + 1e-12 + lambda.powi(201) / (1.0 - lambda) * phi.amax());
    }

    #[test]
    fn resolvent_and_series_agree(n in 2usize..11, k in 1usize..5, seed in any::<u64>(), li in 0usize..3) {
        let lambda = [0.3, 0.6, 0.9][li];
        let fam = random_family(n, k, seed).unwrap();
        let f = observable(n, seed);
        let r = var_lambda_strat(&fam, &f, lambda, VarianceMethod::Resolvent, 0).unwrap();
        let s = var_lambda_strat(&fam, &f, lambda, VarianceMethod::Series, 400).unwrap();
        prop_assert!((r.value - s.value).abs() <= s.truncation_bound + 1e-9);
    }

    #[test]
    fn two_kernel_ordering_and_bound(n in 3usize..21, seed in any::<u64>(), li in 0usize..4) {
        let lambda = [0.3, 0.6, 0.9, 0.99][li];
        let fam = random_family(n, 2, seed).unwrap();
        let f = observable(n, seed);
        let gap = var_lambda_rand(&fam, &f, lambda).unwrap()
            - var_lambda_strat(&fam, &f, lambda, VarianceMethod::Resolvent, 0).unwrap().value;
        let bound = gap_lower_bound(&fam, &f, lambda).unwrap();
        prop_assert!(bound >= -1e-12);
        prop_assert!(gap >= -1e-10);
        prop_assert!(gap >= bound - 1e-9);
    }

    #[test]
    fn bellman_supremum(n in 2usize..8, seed in any::<u64>(), lambda in 0.0f64..0.99) {
        let fam = random_family(n, 2, seed).unwrap();
        let p = random_scan(&fam);
        let op = DMatrix::identity(n, n) - p.matrix() * lambda;
        let f = observable(n, seed).into_vector();
        let v = bellman_value(&op, fam.pi().weights(), &f).unwrap();
        for g in bellman_probes(&v.argmax, 200, seed) {
            prop_assert!(bellman_objective(&op, fam.pi().weights(), &f, &g) <= v.value + 1e-10);
        }
    }
}

#[test]
fn limit_matches_extrapolated_discounted_values() {
    // Richardson extrapolation in (1 − λ) from λ ∈ {0.999, 0.9999}
    for seed in 0..5 {
        let fam = random_family(6, 3, seed).unwrap();
        let f = observable(6, seed);
        assert!(summability_check(&fam, &f).unwrap().absolutely_summable);
        let limit = var_limit(&fam, &f, SchemeSelector::Strat).unwrap();
        let v = |l: f64| var_lambda_strat(&fam, &f, l, VarianceMethod::Resolvent, 0).unwrap().value;
        let (v1, v2) = (v(0.999), v(0.9999));
        let extrapolated = v2 + (v2 - v1) * (0.0001 / (0.001 - 0.0001));
        assert!((extrapolated - limit).abs() <= 1e-4 * limit.abs().max(1e-3), "{extrapolated} vs {limit}");
        assert!(v(0.9).is_finite());

        let limit = var_limit(&fam, &f, SchemeSelector::Rand).unwrap();
        let v = |l: f64| var_lambda_rand(&fam, &f, l).unwrap();
        let (v1, v2) = (v(0.999), v(0.9999));
        let extrapolated = v2 + (v2 - v1) * (0.0001 / (0.001 - 0.0001));
        assert!((extrapolated - limit).abs() <= 1e-4 * limit.abs().max(1e-3));
    }
}

#[test]
fn identical_kernels_give_equal_schemes() {
    for seed in 0..5 {
        let base = random_family(5, 1, seed).unwrap();
        let fam = KernelFamily::new(base.pi().clone(), vec![base.kernel(0).clone(); 2]).unwrap();
        let f = observable(5, seed);
        for lambda in [0.2, 0.7, 0.95] {
            let s = var_lambda_strat(&fam, &f, lambda, VarianceMethod::Resolvent, 0).unwrap().value;
            assert!((s - var_lambda_rand(&fam, &f, lambda).unwrap()).abs() < 1e-10);
        }
    }
}

#[test]
fn uniform_target_dist() {
    let d = Dist::uniform(4).unwrap();
    assert!(d.as_slice().iter().all(|w| (*w - 0.25).abs() < 1e-16));
}

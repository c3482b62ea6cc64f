//! Checkers for the variance-ordering results.
//!
//! * Two kernels: the deterministic scan never has larger discounted variance
//!   than the random scan, and the gap is bounded below by
//!   `λ²⟨Aĝ, (I − λS)⁻¹Aĝ⟩` where `S`, `A` are the symmetric and skew parts
//!   of the embedding and `ĝ = (I − λT*)⁻¹(I − λS)(I − λT)⁻¹f̄`.
//! * Variational identities: the Bellman representation of a positive
//!   quadratic form and its non-reversible extension.
//! * Peskun-type comparison of two families along the straight path between
//!   their embeddings, with the closed-form derivative.
//! * Palindromic cycles, where the two one-sided resolvent components
//!   coincide for every cycle length.

use nalgebra::{DMatrix, DVector};
use rand::Rng;

use crate::embedding::{check_lambda, BlockVector, EmbeddedOperator, OperatorSelector};
use crate::error::{Error, Result};
use crate::hilbert::{center, check_len, lazy, Dist, Kernel, KernelFamily, ObsFunction};
use crate::linalg::{
    solve, weighted_adjoint, weighted_asymmetry, weighted_dot, weighted_eigenvalues,
};
use crate::seed::{derive_seed, rng};
use crate::tolerance::{TAU_EIG, TAU_NUM};
use crate::variance::{
    summability_check, var_lambda_rand, var_lambda_strat, var_limit, SchemeSelector,
    VarianceMethod, DEFAULT_SERIES_TERMS,
};

/// One λ of the two-kernel ordering check. `lambda = 1` marks the limit.
#[derive(Debug, Clone, PartialEq)]
pub struct OrderingReport {
    pub lambda: f64,
    pub var_rand: f64,
    pub var_strat: f64,
    pub gap: f64,
    /// Not defined at the limit.
    pub gap_lower_bound: Option<f64>,
    pub ordering_holds: bool,
    pub bound_holds: bool,
}

impl OrderingReport {
    pub fn is_limit(&self) -> bool {
        self.lambda == 1.0
    }
}

fn require_k(fam: &KernelFamily, k: usize) -> Result<()> {
    if fam.k() != k {
        return Err(Error::WrongFamilySize {
            expected: k,
            got: fam.k(),
        });
    }
    Ok(())
}

/// `(2/k) λ² ⟨Aĝ, (I − λS)⁻¹ Aĝ⟩` for a two-kernel family.
pub fn gap_lower_bound(fam: &KernelFamily, f: &ObsFunction, lambda: f64) -> Result<f64> {
    require_k(fam, 2)?;
    check_lambda(lambda)?;
    if lambda == 0.0 {
        return Ok(0.0);
    }
    let f = center(f, fam.pi())?;
    let op = EmbeddedOperator::new(fam);
    let fbar = BlockVector::replicate(&f, fam.k());
    let u = op.resolvent_solve(OperatorSelector::T, lambda, &fbar)?;
    let h = u.sub(&op.apply_symmetric(&u)?.scale(lambda));
    let g_hat = op.resolvent_solve(OperatorSelector::TAdjoint, lambda, &h)?;
    let a_g = op.apply_skew(&g_hat)?;
    let y = op.resolvent_solve(OperatorSelector::Symmetric, lambda, &a_g)?;
    Ok(2.0 / fam.k() as f64 * lambda * lambda * a_g.inner(&y, fam.pi())?)
}

/// Ordering reports on a λ grid (each λ in `[0, 1)`), followed by the limit
/// report when the full-cycle kernels contract. `tol` is the slack in both
/// verdicts.
pub fn check_two_kernel_ordering(
    fam: &KernelFamily,
    f: &ObsFunction,
    lambda_grid: &[f64],
    tol: f64,
) -> Result<Vec<OrderingReport>> {
    require_k(fam, 2)?;
    let mut out = Vec::with_capacity(lambda_grid.len() + 1);
    for &lambda in lambda_grid {
        let var_strat = var_lambda_strat(fam, f, lambda, VarianceMethod::Resolvent, 0)?.value;
        let var_rand = var_lambda_rand(fam, f, lambda)?;
        let bound = gap_lower_bound(fam, f, lambda)?;
        let gap = var_rand - var_strat;
        out.push(OrderingReport {
            lambda,
            var_rand,
            var_strat,
            gap,
            gap_lower_bound: Some(bound),
            ordering_holds: gap >= -tol,
            bound_holds: gap >= bound - tol && bound >= -tol,
        });
    }
    if summability_check(fam, f)?.absolutely_summable {
        out.push(limit_report(fam, f, tol)?);
    }
    Ok(out)
}

fn limit_report(fam: &KernelFamily, f: &ObsFunction, tol: f64) -> Result<OrderingReport> {
    let var_strat = var_limit(fam, f, SchemeSelector::Strat)?;
    let var_rand = var_limit(fam, f, SchemeSelector::Rand)?;
    let gap = var_rand - var_strat;
    Ok(OrderingReport {
        lambda: 1.0,
        var_rand,
        var_strat,
        gap,
        gap_lower_bound: None,
        ordering_holds: gap >= -tol,
        bound_holds: true,
    })
}

/// Value and maximiser of `sup_g 2⟨f, g⟩ − ⟨g, Op g⟩`.
#[derive(Debug, Clone, PartialEq)]
pub struct BellmanValue {
    pub value: f64,
    pub argmax: DVector<f64>,
}

/// `2⟨f, g⟩_w − ⟨g, Op g⟩_w`.
pub fn bellman_objective(op: &DMatrix<f64>, weights: &DVector<f64>, f: &DVector<f64>, g: &DVector<f64>) -> f64 {
    2.0 * weighted_dot(weights, f, g) - weighted_dot(weights, g, &(op * g))
}

/// `⟨f, Op⁻¹ f⟩_w` for an operator that is self-adjoint and positive definite
/// in the `w`-weighted inner product; the supremum is attained at `Op⁻¹ f`.
pub fn bellman_value(op: &DMatrix<f64>, weights: &DVector<f64>, f: &DVector<f64>) -> Result<BellmanValue> {
    check_len(weights.len(), op.nrows(), "bellman: operator rows")?;
    check_len(weights.len(), op.ncols(), "bellman: operator cols")?;
    check_len(weights.len(), f.len(), "bellman: f")?;
    let asymmetry = weighted_asymmetry(op, weights);
    if asymmetry > TAU_NUM {
        return Err(Error::NotSelfAdjoint { asymmetry });
    }
    let min_eigenvalue = weighted_eigenvalues(op, weights)[0];
    if min_eigenvalue <= 0.0 {
        return Err(Error::NotPositive { min_eigenvalue });
    }
    let argmax = solve(op, f, "bellman operator")?;
    Ok(BellmanValue {
        value: weighted_dot(weights, f, &argmax),
        argmax,
    })
}

/// Both sides of the non-reversible variational identity at the maximiser.
#[derive(Debug, Clone, PartialEq)]
pub struct VariationalReport {
    /// `⟨f, (I − λK)⁻¹ f⟩_π`.
    pub resolvent_form: f64,
    /// `2⟨f,ĝ⟩ − ⟨ĝ,(I−λS)ĝ⟩ − λ²⟨Aĝ,(I−λS)⁻¹Aĝ⟩`.
    pub variational_form: f64,
    pub residual: f64,
    /// Upper bound through the symmetric part: `⟨f,(I−λS)⁻¹f⟩ − λ²⟨Aĝ,(I−λS)⁻¹Aĝ⟩`.
    pub symmetric_part_bound: f64,
    /// Largest `J(g) − value` over random probes; nonpositive when the
    /// supremum is correct.
    pub max_probe_excess: f64,
    pub probes: usize,
    pub holds: bool,
}

/// Verifies the variational representation of `⟨f, (I − λK)⁻¹ f⟩_π` through
/// the symmetric part `S = (K + K*)/2` and skew part `A = (K − K*)/2` of a
/// π-invariant (not necessarily reversible) kernel, and probes the supremum
/// with `probes` random perturbations of the maximiser.
pub fn variational_identity_check(
    kernel: &Kernel,
    pi: &Dist,
    f: &ObsFunction,
    lambda: f64,
    probes: usize,
    seed: u64,
) -> Result<VariationalReport> {
    check_lambda(lambda)?;
    check_len(pi.len(), kernel.n(), "variational: kernel vs pi")?;
    check_len(pi.len(), f.len(), "variational: f vs pi")?;
    let w = pi.weights();
    let k = kernel.matrix();
    let invariance = (k.transpose() * w - w).amax();
    if invariance > TAU_NUM {
        return Err(Error::NotInvariant { residual: invariance });
    }
    if let Some(x) = w.iter().position(|v| *v <= 0.0) {
        return Err(Error::InvalidDist(format!("pi[{x}] = 0 (degenerate state)")));
    }
    let n = pi.len();
    let id = DMatrix::<f64>::identity(n, n);
    let k_adj = weighted_adjoint(k, w);
    let s = (k + &k_adj) * 0.5;
    let a = (k - &k_adj) * 0.5;
    let i_ls = &id - &s * lambda;
    let fv = f.values();

    let u = solve(&(&id - k * lambda), fv, "I - lambda K")?;
    let resolvent_form = weighted_dot(w, fv, &u);
    let g_hat = solve(&(&id - &k_adj * lambda), &(&i_ls * &u), "I - lambda K*")?;

    let objective = |g: &DVector<f64>| -> Result<f64> {
        let ag = &a * g;
        let y = solve(&i_ls, &ag, "I - lambda S")?;
        Ok(2.0 * weighted_dot(w, fv, g)
            - weighted_dot(w, g, &(&i_ls * g))
            - lambda * lambda * weighted_dot(w, &ag, &y))
    };
    let variational_form = objective(&g_hat)?;
    let ag = &a * &g_hat;
    let penalty = lambda * lambda * weighted_dot(w, &ag, &solve(&i_ls, &ag, "I - lambda S")?);
    let sym_form = weighted_dot(w, fv, &solve(&i_ls, fv, "I - lambda S")?);

    let mut r = rng(seed);
    let scale = g_hat.amax().max(1.0);
    let mut max_probe_excess = f64::NEG_INFINITY;
    for p in 0..probes {
        let eps = 10f64.powi(-((p % 6) as i32));
        let g = DVector::from_fn(n, |i, _| g_hat[i] + eps * scale * (2.0 * r.random::<f64>() - 1.0));
        max_probe_excess = max_probe_excess.max(objective(&g)? - variational_form);
    }
    let residual = (resolvent_form - variational_form).abs();
    Ok(VariationalReport {
        resolvent_form,
        variational_form,
        residual,
        symmetric_part_bound: sym_form - penalty,
        max_probe_excess,
        probes,
        holds: residual <= 1e-9 * resolvent_form.abs().max(1.0) && max_probe_excess <= 1e-10,
    })
}

/// Kernelwise Dirichlet-form comparison of two families on the same target.
#[derive(Debug, Clone, PartialEq)]
pub struct PeskunComparison {
    pub family_a: KernelFamily,
    pub family_b: KernelFamily,
    /// Whether `⟨g, (I − Π_b,i) g⟩ ≤ ⟨g, (I − Π_a,i) g⟩` for all `g`.
    pub dominance_per_kernel: Vec<bool>,
    /// Smallest eigenvalue of the π-symmetrised `Π_b,i − Π_a,i`, per kernel.
    pub min_eigenvalue_per_kernel: Vec<f64>,
    pub min_dirichlet_gap_eigenvalue: f64,
}

impl PeskunComparison {
    pub fn dominates(&self) -> bool {
        self.dominance_per_kernel.iter().all(|d| *d)
    }
}

fn check_same_target(a: &KernelFamily, b: &KernelFamily) -> Result<()> {
    if a.n() != b.n() {
        return Err(Error::MismatchedFamilies(format!("n = {} vs {}", a.n(), b.n())));
    }
    if a.k() != b.k() {
        return Err(Error::MismatchedFamilies(format!("k = {} vs {}", a.k(), b.k())));
    }
    let diff = (a.pi().weights() - b.pi().weights()).amax();
    if diff > TAU_NUM {
        return Err(Error::MismatchedFamilies(format!("targets differ by {diff:e}")));
    }
    Ok(())
}

/// Whether `fam_a` has kernelwise larger Dirichlet forms than `fam_b`,
/// decided by the spectrum of `D^{1/2}(Π_b,i − Π_a,i)D^{-1/2}`.
pub fn peskun_dominates(fam_a: &KernelFamily, fam_b: &KernelFamily) -> Result<PeskunComparison> {
    check_same_target(fam_a, fam_b)?;
    let w = fam_a.pi().weights();
    let mins: Vec<f64> = fam_a
        .kernels()
        .iter()
        .zip(fam_b.kernels())
        .map(|(ka, kb)| weighted_eigenvalues(&(kb.matrix() - ka.matrix()), w)[0])
        .collect();
    Ok(PeskunComparison {
        family_a: fam_a.clone(),
        family_b: fam_b.clone(),
        dominance_per_kernel: mins.iter().map(|m| *m > -TAU_EIG).collect(),
        min_dirichlet_gap_eigenvalue: mins.iter().copied().fold(f64::INFINITY, f64::min),
        min_eigenvalue_per_kernel: mins,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct PeskunRow {
    /// `1` marks the limit.
    pub lambda: f64,
    pub var_strat_a: f64,
    pub var_strat_b: f64,
    /// `var_strat_b − var_strat_a`.
    pub gap: f64,
    pub holds: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PeskunOrderingReport {
    pub comparison: PeskunComparison,
    pub rows: Vec<PeskunRow>,
    /// False when the dominance hypothesis fails; the rows are then an
    /// exploratory comparison only.
    pub hypothesis_holds: bool,
}

impl PeskunOrderingReport {
    pub fn all_hold(&self) -> bool {
        self.rows.iter().all(|r| r.holds)
    }
}

/// Compares deterministic-scan variances of a dominating family `fam_a` and
/// a dominated `fam_b` on a λ grid, plus the limit when both families are
/// summable. A failed dominance hypothesis yields
/// [`Error::PreconditionNotMet`] carrying the full comparison.
pub fn check_peskun_ordering(
    fam_a: &KernelFamily,
    fam_b: &KernelFamily,
    f: &ObsFunction,
    lambda_grid: &[f64],
    tol: f64,
) -> Result<PeskunOrderingReport> {
    require_k(fam_a, 2)?;
    let comparison = peskun_dominates(fam_a, fam_b)?;
    let mut rows = Vec::with_capacity(lambda_grid.len() + 1);
    let mut push = |lambda: f64, a: f64, b: f64| {
        rows.push(PeskunRow {
            lambda,
            var_strat_a: a,
            var_strat_b: b,
            gap: b - a,
            holds: a <= b + tol,
        })
    };
    for &lambda in lambda_grid {
        let a = var_lambda_strat(fam_a, f, lambda, VarianceMethod::Resolvent, DEFAULT_SERIES_TERMS)?;
        let b = var_lambda_strat(fam_b, f, lambda, VarianceMethod::Resolvent, DEFAULT_SERIES_TERMS)?;
        push(lambda, a.value, b.value);
    }
    if summability_check(fam_a, f)?.absolutely_summable && summability_check(fam_b, f)?.absolutely_summable {
        push(
            1.0,
            var_limit(fam_a, f, SchemeSelector::Strat)?,
            var_limit(fam_b, f, SchemeSelector::Strat)?,
        );
    }
    let report = PeskunOrderingReport {
        hypothesis_holds: comparison.dominates(),
        comparison,
        rows,
    };
    if !report.hypothesis_holds {
        let failing = report
            .comparison
            .dominance_per_kernel
            .iter()
            .enumerate()
            .filter(|(_, d)| !**d)
            .map(|(i, _)| i)
            .collect();
        return Err(Error::PreconditionNotMet {
            failing,
            min_eigenvalue: report.comparison.min_dirichlet_gap_eigenvalue,
            report: Box::new(report),
        });
    }
    Ok(report)
}

/// Straight path `Δ(β) = (1 − β)Δ_a + βΔ_b`, `T(β) = Δ(β)𝔖`, from `fam_a`
/// at `β = 0` to `fam_b` at `β = 1`.
#[derive(Debug, Clone)]
pub struct BetaPath {
    fam_a: KernelFamily,
    fam_b: KernelFamily,
}

impl BetaPath {
    pub fn new(fam_a: &KernelFamily, fam_b: &KernelFamily) -> Result<Self> {
        check_same_target(fam_a, fam_b)?;
        Ok(Self {
            fam_a: fam_a.clone(),
            fam_b: fam_b.clone(),
        })
    }

    /// Blended blocks at `β`. Any real `β` is accepted; outside `[0, 1]` the
    /// blocks are still π-self-adjoint but may leave the stochastic simplex.
    pub fn blocks(&self, beta: f64) -> Vec<DMatrix<f64>> {
        self.fam_a
            .kernels()
            .iter()
            .zip(self.fam_b.kernels())
            .map(|(a, b)| a.matrix() * (1.0 - beta) + b.matrix() * beta)
            .collect()
    }

    /// The family at `β ∈ [0, 1]`.
    pub fn family(&self, beta: f64) -> Result<KernelFamily> {
        check_beta(beta)?;
        let kernels = self
            .blocks(beta)
            .into_iter()
            .map(Kernel::from_matrix_unchecked)
            .collect();
        Ok(KernelFamily::new_unchecked(
            self.fam_a.space().clone(),
            self.fam_a.pi().clone(),
            kernels,
        ))
    }

    pub fn embedding(&self, beta: f64) -> EmbeddedOperator {
        EmbeddedOperator::from_blocks(self.fam_a.pi().clone(), self.blocks(beta))
    }

    /// `δ(β) = ⟨f̄, (I − λT(β))⁻¹ f̄⟩` with `f` centred.
    pub fn delta(&self, f: &ObsFunction, lambda: f64, beta: f64) -> Result<f64> {
        let f = center(f, self.fam_a.pi())?;
        let fbar = BlockVector::replicate(&f, self.fam_a.k());
        let x = self.embedding(beta).resolvent_solve(OperatorSelector::T, lambda, &fbar)?;
        fbar.inner(&x, self.fam_a.pi())
    }

    /// The two one-sided resolvent terms `(I − λ𝔖⁻¹Δ(β))⁻¹f̄` and
    /// `(I − λ𝔖Δ(β))⁻¹f̄`.
    pub fn resolvent_terms(&self, f: &ObsFunction, lambda: f64, beta: f64) -> Result<(BlockVector, BlockVector)> {
        let f = center(f, self.fam_a.pi())?;
        let fbar = BlockVector::replicate(&f, self.fam_a.k());
        let op = self.embedding(beta);
        let left = op.resolvent_solve(OperatorSelector::InverseShiftDiag, lambda, &fbar)?;
        let right = op.resolvent_solve(OperatorSelector::ShiftDiag, lambda, &fbar)?;
        Ok((left, right))
    }

    /// `∂δ/∂β = λ ⟨(I − λ𝔖⁻¹Δ(β))⁻¹f̄, (Δ_b − Δ_a)(I − λ𝔖Δ(β))⁻¹f̄⟩`.
    pub fn derivative(&self, f: &ObsFunction, lambda: f64, beta: f64) -> Result<f64> {
        check_lambda(lambda)?;
        if lambda == 0.0 {
            return Ok(0.0);
        }
        let (left, right) = self.resolvent_terms(f, lambda, beta)?;
        let diff = EmbeddedOperator::from_blocks(
            self.fam_a.pi().clone(),
            self.fam_a
                .kernels()
                .iter()
                .zip(self.fam_b.kernels())
                .map(|(a, b)| b.matrix() - a.matrix())
                .collect(),
        );
        Ok(lambda * left.inner(&diff.diag_apply(&right)?, self.fam_a.pi())?)
    }
}

fn check_beta(beta: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&beta) {
        return Err(Error::OutOfRange {
            name: "beta",
            value: beta,
            range: "[0, 1]",
        });
    }
    Ok(())
}

/// Closed-form derivative of `δ` along the path from `fam_a` to `fam_b`.
/// Nonnegative whenever the one-sided resolvent terms coincide and `fam_a`
/// dominates `fam_b`.
pub fn beta_derivative(
    fam_a: &KernelFamily,
    fam_b: &KernelFamily,
    f: &ObsFunction,
    lambda: f64,
    beta: f64,
) -> Result<f64> {
    check_beta(beta)?;
    BetaPath::new(fam_a, fam_b)?.derivative(f, lambda, beta)
}

/// Which palindromic arrangement of generators `Q_1..Q_p`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Palindrome {
    /// `(Q_p, …, Q_2, Q_1, Q_2, …, Q_p)`, length `2p − 1`.
    Odd,
    /// `(Q_{p−1}, …, Q_2, Q_1, Q_2, …, Q_p)`, length `2p − 2`.
    Even,
}

impl Palindrome {
    /// Cycle positions (0-based) at which the two resolvent terms coincide.
    pub fn distinguished_indices(&self, p: usize) -> Vec<usize> {
        match self {
            Palindrome::Odd => vec![p - 1],
            Palindrome::Even => vec![p - 2, 2 * p - 3],
        }
    }
}

/// Arranges generators (`generators[0]` is `Q_1`) into a palindromic cycle.
pub fn palindromic_cycle(generators: &[Kernel], shape: Palindrome) -> Vec<Kernel> {
    let p = generators.len();
    let top = match shape {
        Palindrome::Odd => p,
        Palindrome::Even => p - 1,
    };
    let mut out: Vec<Kernel> = (0..top).rev().map(|j| generators[j].clone()).collect();
    out.extend(generators[1..].iter().cloned());
    out
}

#[derive(Debug, Clone, PartialEq)]
pub struct PalindromeEntry {
    pub shape: Palindrome,
    pub cycle_length: usize,
    /// Cycle position whose kernel is perturbed.
    pub index: usize,
    pub beta: f64,
    /// `max |[(I − λ𝔖⁻¹Δ(β))⁻¹f̄]_i − [(I − λ𝔖Δ(β))⁻¹f̄]_i|`.
    pub component_gap: f64,
    /// `∂δ/∂β` from the cycle towards the perturbed cycle.
    pub derivative: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PalindromeReport {
    pub p: usize,
    pub lambda: f64,
    pub laziness: f64,
    pub entries: Vec<PalindromeEntry>,
}

impl PalindromeReport {
    pub fn max_component_gap(&self) -> f64 {
        self.entries.iter().map(|e| e.component_gap).fold(0.0, f64::max)
    }

    pub fn min_derivative(&self) -> f64 {
        self.entries.iter().map(|e| e.derivative).fold(f64::INFINITY, f64::min)
    }

    pub fn holds(&self, tol: f64) -> bool {
        self.max_component_gap() <= tol && self.min_derivative() >= -tol
    }
}

/// Builds both palindromic cycles from `generators` and, at every
/// distinguished position `i`, perturbs only kernel `i` to `lazy(Π_i,
/// laziness)`. Reports the coincidence of the two one-sided resolvent
/// components at `i` and the path derivative towards the perturbed cycle.
pub fn palindrome_check(
    pi: &Dist,
    generators: &[Kernel],
    lambda: f64,
    f: &ObsFunction,
    beta_grid: &[f64],
    laziness: f64,
) -> Result<PalindromeReport> {
    let p = generators.len();
    if p < 2 {
        return Err(Error::OutOfRange {
            name: "p",
            value: p as f64,
            range: "p >= 2",
        });
    }
    KernelFamily::new(pi.clone(), generators.to_vec())?;
    check_lambda(lambda)?;
    let mut entries = Vec::new();
    for shape in [Palindrome::Odd, Palindrome::Even] {
        let cycle = palindromic_cycle(generators, shape);
        let base = KernelFamily::new(pi.clone(), cycle)?;
        for index in shape.distinguished_indices(p) {
            let perturbed = base.map_kernels(|i, k| if i == index { lazy(k, laziness) } else { Ok(k.clone()) })?;
            let path = BetaPath::new(&base, &perturbed)?;
            for &beta in beta_grid {
                check_beta(beta)?;
                let (left, right) = path.resolvent_terms(f, lambda, beta)?;
                entries.push(PalindromeEntry {
                    shape,
                    cycle_length: base.k(),
                    index,
                    beta,
                    component_gap: (left.component(index) - right.component(index)).amax(),
                    derivative: path.derivative(f, lambda, beta)?,
                });
            }
        }
    }
    Ok(PalindromeReport {
        p,
        lambda,
        laziness,
        entries,
    })
}

/// Random perturbations of an argmax for Bellman probes: `g + ε·u` with `u`
/// uniform in `[−1, 1]^N` and `ε` cycling through `1, 0.1, …, 1e-5`.
pub fn bellman_probes(center_point: &DVector<f64>, count: usize, seed: u64) -> Vec<DVector<f64>> {
    let scale = center_point.amax().max(1.0);
    (0..count)
        .map(|p| {
            let mut r = rng(derive_seed(seed, p as u64));
            let eps = 10f64.powi(-((p % 6) as i32));
            DVector::from_fn(center_point.len(), |i, _| {
                center_point[i] + eps * scale * (2.0 * r.random::<f64>() - 1.0)
            })
        })
        .collect()
}

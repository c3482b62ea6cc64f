//! Exact variances of ergodic averages under random and deterministic scans.
//!
//! For centred `f` and discount `λ ∈ [0, 1)` the deterministic-scan quantity
//!
//! ```text
//! var_λ(f, strat) = ‖f‖² + (2/k) Σ_q Σ_{s≥1} λ^s ⟨f, Π_{σ^{0:s−1}(q)} f⟩
//!                 = (2/k) ⟨f̄, (I − λT)⁻¹ f̄⟩ − ‖f‖²
//! ```
//!
//! is evaluated either by the series (truncated, with a tail bound) or by one
//! resolvent solve of the embedding. The random-scan counterpart is the
//! homogeneous `2⟨f, (I − λP)⁻¹ f⟩ − ‖f‖²` with `P = (1/k) Σ Π_j`.
//!
//! Inputs are centred internally; callers may pass any observable.

use nalgebra::{DMatrix, DVector};

use crate::embedding::{check_lambda, BlockVector, EmbeddedOperator, OperatorSelector};
use crate::error::{Error, Result};
use crate::hilbert::{
    center, check_len, compose_cycle, inner, random_scan, sigma_unchecked, KernelFamily,
    ObsFunction,
};
use crate::linalg::{solve, solve_centered, spectral_radius, weighted_eigenvalues};
use crate::ordering;

pub const DEFAULT_SERIES_TERMS: usize = 400;

/// Which scan the variance refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SchemeSelector {
    Strat,
    Rand,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum VarianceMethod {
    Resolvent,
    Series,
}

impl VarianceMethod {
    pub fn as_str(&self) -> &'static str {
        match self {
            VarianceMethod::Resolvent => "resolvent",
            VarianceMethod::Series => "series",
        }
    }
}

/// Deterministic-scan discounted variance with the tail bound of the
/// evaluation method (zero for the resolvent).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StratVariance {
    pub value: f64,
    pub truncation_bound: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct VarianceReport {
    pub lambda: f64,
    pub var_strat: f64,
    pub var_rand: f64,
    /// `var_rand − var_strat`.
    pub gap: f64,
    /// Only defined for two-kernel families.
    pub gap_lower_bound: Option<f64>,
    pub method: VarianceMethod,
    pub truncation_bound: f64,
}

/// Discounted deterministic-scan variance.
pub fn var_lambda_strat(
    fam: &KernelFamily,
    f: &ObsFunction,
    lambda: f64,
    method: VarianceMethod,
    series_terms: usize,
) -> Result<StratVariance> {
    check_lambda(lambda)?;
    let f = center(f, fam.pi())?;
    let norm = inner(&f, &f, fam.pi())?;
    let k = fam.k();
    match method {
        VarianceMethod::Resolvent => {
            let op = EmbeddedOperator::new(fam);
            let fbar = BlockVector::replicate(&f, k);
            let x = op.resolvent_solve(OperatorSelector::T, lambda, &fbar)?;
            let quad = fbar.inner(&x, fam.pi())?;
            Ok(StratVariance {
                value: 2.0 / k as f64 * quad - norm,
                truncation_bound: 0.0,
            })
        }
        VarianceMethod::Series => {
            let sum: f64 = (0..k)
                .map(|q| discounted_cycle_series(fam, &f, q, lambda, series_terms))
                .sum();
            Ok(StratVariance {
                value: norm + 2.0 / k as f64 * sum,
                truncation_bound: 2.0 * norm * lambda.powi(series_terms as i32 + 1)
                    / (1.0 - lambda),
            })
        }
    }
}

/// `Σ_{s=1}^{terms} λ^s ⟨f, Π_{σ^{0:s−1}(q)} f⟩_π`, propagating the row
/// vector `π∘f` through the cycle.
fn discounted_cycle_series(fam: &KernelFamily, f: &ObsFunction, q: usize, lambda: f64, terms: usize) -> f64 {
    let fv = f.values();
    let mut row = fam.pi().weights().component_mul(fv).transpose();
    let mut weight = 1.0;
    let mut acc = 0.0;
    for s in 1..=terms {
        let kernel = fam.kernel(sigma_unchecked(q, s as i64 - 1, fam.k()));
        row *= kernel.matrix();
        weight *= lambda;
        acc += weight * (&row * fv)[0];
    }
    acc
}

/// Discounted random-scan variance `2⟨f, (I − λP)⁻¹ f⟩ − ‖f‖²`.
pub fn var_lambda_rand(fam: &KernelFamily, f: &ObsFunction, lambda: f64) -> Result<f64> {
    check_lambda(lambda)?;
    let f = center(f, fam.pi())?;
    let norm = inner(&f, &f, fam.pi())?;
    let p = random_scan(fam);
    let n = fam.n();
    let system = DMatrix::identity(n, n) - p.matrix() * lambda;
    let x = solve(&system, f.values(), "resolvent of the random scan")?;
    Ok(2.0 * inner(&f, &ObsFunction::from_vector(x), fam.pi())? - norm)
}

/// Both discounted variances, their gap and (for `k = 2`) the lower bound on
/// the gap.
pub fn variance_report(
    fam: &KernelFamily,
    f: &ObsFunction,
    lambda: f64,
    method: VarianceMethod,
    series_terms: usize,
) -> Result<VarianceReport> {
    let strat = var_lambda_strat(fam, f, lambda, method, series_terms)?;
    let var_rand = var_lambda_rand(fam, f, lambda)?;
    let gap_lower_bound = if fam.k() == 2 {
        Some(ordering::gap_lower_bound(fam, f, lambda)?)
    } else {
        None
    };
    Ok(VarianceReport {
        lambda,
        var_strat: strat.value,
        var_rand,
        gap: var_rand - strat.value,
        gap_lower_bound,
        method,
        truncation_bound: strat.truncation_bound,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SummabilityReport {
    pub absolutely_summable: bool,
    /// Largest spectral radius, over starting phases `q`, of the full-cycle
    /// kernel `Π_q Π_{σ(q)} ⋯ Π_{σ^{k−1}(q)}` restricted to centred functions.
    pub cycle_contraction: f64,
}

/// Geometric summability of the deterministic-scan covariance series. A
/// contraction below one makes the series absolutely summable for every
/// observable.
pub fn summability_check(fam: &KernelFamily, f: &ObsFunction) -> Result<SummabilityReport> {
    check_len(fam.n(), f.len(), "summability: observable")?;
    let pi = fam.pi().weights();
    let n = fam.n();
    let mut worst = 0.0f64;
    for q in 0..fam.k() {
        let c = compose_cycle(fam, q, fam.k())?;
        let deflated = DMatrix::from_fn(n, n, |i, j| c.matrix()[(i, j)] - pi[j]);
        worst = worst.max(spectral_radius(&deflated));
    }
    Ok(SummabilityReport {
        absolutely_summable: worst < 1.0 - 1e-12,
        cycle_contraction: worst,
    })
}

/// `λ ↑ 1` limit of the discounted variance, by exact solves on centred
/// functions.
///
/// The deterministic-scan series is regrouped by full cycles:
/// `Σ_{s≥1} Π_{σ^{0:s−1}(q)} f = (I − C_q)⁻¹ Σ_{r=1}^{k} Π_{σ^{0:r−1}(q)} f`
/// with `C_q` the full-cycle kernel from phase `q`.
pub fn var_limit(fam: &KernelFamily, f: &ObsFunction, scheme: SchemeSelector) -> Result<f64> {
    let f = center(f, fam.pi())?;
    let pi = fam.pi();
    let norm = inner(&f, &f, pi)?;
    match scheme {
        SchemeSelector::Strat => {
            let summ = summability_check(fam, &f)?;
            if !summ.absolutely_summable {
                return Err(Error::NotSummable {
                    contraction: summ.cycle_contraction,
                });
            }
            let k = fam.k();
            let mut total = 0.0;
            for q in 0..k {
                let mut partial = DVector::zeros(fam.n());
                let mut g = DMatrix::identity(fam.n(), fam.n());
                for r in 0..k {
                    g *= fam.kernel(sigma_unchecked(q, r as i64, k)).matrix();
                    partial += &g * f.values();
                }
                let x = solve_centered(&g, pi.weights(), &partial)?;
                total += inner(&f, &ObsFunction::from_vector(x), pi)?;
            }
            Ok(norm + 2.0 / k as f64 * total)
        }
        SchemeSelector::Rand => {
            let p = random_scan(fam);
            let unit = weighted_eigenvalues(p.matrix(), pi.weights())
                .iter()
                .filter(|e| (**e - 1.0).abs() < 1e-9)
                .count();
            if unit > 1 {
                return Err(Error::Reducible { multiplicity: unit });
            }
            let x = solve_centered(p.matrix(), pi.weights(), f.values())?;
            Ok(2.0 * inner(&f, &ObsFunction::from_vector(x), pi)? - norm)
        }
    }
}

/// Exact `var_π(M^{1/2} S_M(f))` for the chain started at `π`:
/// `‖f‖² + (2/M) Σ_{0≤i<j<M} ⟨f, K_{i→j} f⟩_π` with `K_{i→j}` the product of
/// the step kernels between times `i` and `j`.
///
/// Evaluated in `O(M n²)` by carrying `a_j = Σ_{i<j} (π∘f) K_{i→j}`, which
/// satisfies `a_{j+1} = (a_j + π∘f) K_{j+1}`.
pub fn finite_m_variance_exact(
    fam: &KernelFamily,
    f: &ObsFunction,
    steps: usize,
    scheme: SchemeSelector,
) -> Result<f64> {
    if steps == 0 {
        return Err(Error::OutOfRange {
            name: "M",
            value: 0.0,
            range: "M >= 1",
        });
    }
    let f = center(f, fam.pi())?;
    let norm = inner(&f, &f, fam.pi())?;
    let w = fam.pi().weights().component_mul(f.values()).transpose();
    let rand = random_scan(fam);
    let mut a = w.clone() * 0.0;
    let mut cross = 0.0;
    for j in 1..steps {
        let kernel = match scheme {
            SchemeSelector::Strat => fam.kernel((j - 1) % fam.k()),
            SchemeSelector::Rand => &rand,
        };
        a = (&a + &w) * kernel.matrix();
        cross += (&a * f.values())[0];
    }
    Ok(norm + 2.0 * cross / steps as f64)
}

/// Which process a joint law describes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum JointScheme {
    /// The inhomogeneous deterministic-scan chain.
    Strat,
    /// The component `X_i^{(σ^i(0))}` of the embedded product chain.
    EmbeddedComponent,
}

pub const JOINT_TABLE_LIMIT: usize = 1_000_000;
const PRODUCT_TABLE_LIMIT: usize = 20_000_000;

/// Probability table over `X^{m+1}`; the first coordinate varies slowest.
#[derive(Debug, Clone, PartialEq)]
pub struct JointLaw {
    pub n: usize,
    pub m: usize,
    pub probs: Vec<f64>,
}

impl JointLaw {
    pub fn prob(&self, path: &[usize]) -> f64 {
        let idx = path.iter().fold(0usize, |acc, &x| acc * self.n + x);
        self.probs[idx]
    }

    pub fn max_abs_diff(&self, other: &JointLaw) -> f64 {
        self.probs
            .iter()
            .zip(&other.probs)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}

/// Exact law of `(X_0, …, X_m)` started at `π`.
pub fn joint_law_exact(fam: &KernelFamily, m: usize, scheme: JointScheme) -> Result<JointLaw> {
    let n = fam.n();
    let size = checked_pow(n, m + 1).filter(|s| *s <= JOINT_TABLE_LIMIT).ok_or(Error::TableTooLarge {
        size: checked_pow(n, m + 1).unwrap_or(usize::MAX),
        limit: JOINT_TABLE_LIMIT,
    })?;
    let probs = match scheme {
        JointScheme::Strat => strat_joint(fam, m),
        JointScheme::EmbeddedComponent => {
            let tuples = checked_pow(n, fam.k()).unwrap_or(usize::MAX);
            let cells = tuples.saturating_mul(size);
            if cells > PRODUCT_TABLE_LIMIT {
                return Err(Error::TableTooLarge {
                    size: cells,
                    limit: PRODUCT_TABLE_LIMIT,
                });
            }
            embedded_joint(fam, m)
        }
    };
    Ok(JointLaw { n, m, probs })
}

fn checked_pow(base: usize, exp: usize) -> Option<usize> {
    (0..exp).try_fold(1usize, |acc, _| acc.checked_mul(base))
}

fn strat_joint(fam: &KernelFamily, m: usize) -> Vec<f64> {
    let n = fam.n();
    let mut probs: Vec<f64> = fam.pi().as_slice().to_vec();
    for step in 1..=m {
        let kernel = fam.kernel((step - 1) % fam.k()).matrix();
        let mut next = vec![0.0; probs.len() * n];
        for (hist, p) in probs.iter().enumerate() {
            let last = hist % n;
            for y in 0..n {
                next[hist * n + y] = p * kernel[(last, y)];
            }
        }
        probs = next;
    }
    probs
}

/// Runs the product chain on `X^k` exactly and records the diagonal
/// component. Each step draws the new component `σ(j)` from `Π_j` applied to
/// the old component `j`, independently over `j`.
fn embedded_joint(fam: &KernelFamily, m: usize) -> Vec<f64> {
    let n = fam.n();
    let k = fam.k();
    let tuples = n.pow(k as u32);
    let decode = |mut t: usize| {
        let mut out = vec![0usize; k];
        for c in (0..k).rev() {
            out[c] = t % n;
            t /= n;
        }
        out
    };
    let pi = fam.pi().as_slice();
    // dist[tuple][history]
    let mut hist_len = n;
    let mut dist = vec![0.0; tuples * hist_len];
    for t in 0..tuples {
        let xs = decode(t);
        let p: f64 = xs.iter().map(|&x| pi[x]).product();
        dist[t * hist_len + xs[0]] = p;
    }
    let trans: Vec<Vec<f64>> = (0..tuples)
        .map(|t| {
            let xs = decode(t);
            (0..tuples)
                .map(|u| {
                    let ys = decode(u);
                    (0..k)
                        .map(|j| fam.kernel(j).matrix()[(xs[j], ys[sigma_unchecked(j, 1, k)])])
                        .product()
                })
                .collect()
        })
        .collect();
    for step in 1..=m {
        let comp = step % k;
        let new_len = hist_len * n;
        let mut next = vec![0.0; tuples * new_len];
        for t in 0..tuples {
            for h in 0..hist_len {
                let p = dist[t * hist_len + h];
                if p == 0.0 {
                    continue;
                }
                for (u, q) in trans[t].iter().enumerate() {
                    if *q == 0.0 {
                        continue;
                    }
                    let y = decode(u)[comp];
                    next[u * new_len + h * n + y] += p * q;
                }
            }
        }
        dist = next;
        hist_len = new_len;
    }
    let mut out = vec![0.0; hist_len];
    for t in 0..tuples {
        for h in 0..hist_len {
            out[h] += dist[t * hist_len + h];
        }
    }
    out
}

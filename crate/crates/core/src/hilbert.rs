//! Finite-state `L²(π)`: distributions, observables, Markov kernels and
//! families of π-reversible kernels.

use std::collections::VecDeque;
use std::fmt;

use nalgebra::{DMatrix, DVector};
use rand::Rng;

use crate::error::{Error, Result};
use crate::linalg::weighted_dot;
use crate::seed::{derive_seed, rng};
use crate::tolerance::{TAU_REV, TAU_STOCH};

/// Finite state space `{0, …, n−1}` with optional display labels.
#[derive(Debug, Clone, PartialEq)]
pub struct StateSpace {
    n: usize,
    labels: Option<Vec<String>>,
}

impl StateSpace {
    pub fn new(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidDist("state space must have at least one state".into()));
        }
        Ok(Self { n, labels: None })
    }

    pub fn with_labels(labels: Vec<String>) -> Result<Self> {
        if labels.is_empty() {
            return Err(Error::InvalidDist("state space must have at least one state".into()));
        }
        for (i, l) in labels.iter().enumerate() {
            if labels[..i].contains(l) {
                return Err(Error::InvalidDist(format!("duplicate state label {l:?}")));
            }
        }
        Ok(Self {
            n: labels.len(),
            labels: Some(labels),
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn labels(&self) -> Option<&[String]> {
        self.labels.as_deref()
    }

    /// Label of state `x`, or its index when unlabelled.
    pub fn label(&self, x: usize) -> String {
        match &self.labels {
            Some(l) => l[x].clone(),
            None => x.to_string(),
        }
    }
}

/// Probability distribution on a finite state space.
#[derive(Debug, Clone, PartialEq)]
pub struct Dist(DVector<f64>);

impl Dist {
    /// Accepts nonnegative finite weights summing to one within
    /// [`TAU_STOCH`](crate::tolerance::TAU_STOCH).
    pub fn new(weights: Vec<f64>) -> Result<Self> {
        if weights.is_empty() {
            return Err(Error::InvalidDist("empty weight vector".into()));
        }
        if let Some((i, w)) = weights.iter().enumerate().find(|(_, w)| !w.is_finite() || **w < 0.0) {
            return Err(Error::InvalidDist(format!("weight {i} is {w}")));
        }
        let total: f64 = weights.iter().sum();
        if (total - 1.0).abs() > TAU_STOCH {
            return Err(Error::InvalidDist(format!(
                "weights sum to {total} (deviation {:e} > {TAU_STOCH:e})",
                (total - 1.0).abs()
            )));
        }
        Ok(Self(DVector::from_vec(weights)))
    }

    /// Normalises nonnegative weights with positive total mass.
    pub fn from_unnormalized(weights: Vec<f64>) -> Result<Self> {
        let total: f64 = weights.iter().sum();
        if !(total.is_finite() && total > 0.0) {
            return Err(Error::InvalidDist(format!("total mass {total}")));
        }
        Self::new(weights.into_iter().map(|w| w / total).collect())
    }

    pub fn uniform(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidDist("empty weight vector".into()));
        }
        Ok(Self(DVector::from_element(n, 1.0 / n as f64)))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn weights(&self) -> &DVector<f64> {
        &self.0
    }

    pub fn as_slice(&self) -> &[f64] {
        self.0.as_slice()
    }

    /// `π(f)`.
    pub fn expect(&self, f: &ObsFunction) -> Result<f64> {
        check_len(self.len(), f.len(), "observable vs distribution")?;
        Ok(self.0.dot(f.values()))
    }
}

/// Real function on the state space, an element of `L²(π)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ObsFunction(DVector<f64>);

impl ObsFunction {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if let Some((i, v)) = values.iter().enumerate().find(|(_, v)| !v.is_finite()) {
            return Err(Error::InvalidDist(format!("observable value {i} is {v}")));
        }
        Ok(Self(DVector::from_vec(values)))
    }

    pub fn constant(n: usize, c: f64) -> Self {
        Self(DVector::from_element(n, c))
    }

    pub fn from_vector(values: DVector<f64>) -> Self {
        Self(values)
    }

    pub fn values(&self) -> &DVector<f64> {
        &self.0
    }

    pub fn into_vector(self) -> DVector<f64> {
        self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Whether `π(f) = 0` within `tol`.
    pub fn is_centered(&self, pi: &Dist, tol: f64) -> Result<bool> {
        Ok(pi.expect(self)?.abs() <= tol)
    }
}

/// Row-stochastic transition matrix; rows are indexed by the source state.
#[derive(Debug, Clone, PartialEq)]
pub struct Kernel(DMatrix<f64>);

impl Kernel {
    pub fn new(matrix: DMatrix<f64>) -> Result<Self> {
        if matrix.nrows() != matrix.ncols() || matrix.nrows() == 0 {
            return Err(Error::InvalidKernel(format!(
                "matrix is {}x{}, expected square and nonempty",
                matrix.nrows(),
                matrix.ncols()
            )));
        }
        for (i, row) in matrix.row_iter().enumerate() {
            if let Some((j, v)) = row.iter().enumerate().find(|(_, v)| !v.is_finite() || **v < 0.0) {
                return Err(Error::InvalidKernel(format!("entry ({i},{j}) is {v}")));
            }
            let s: f64 = row.iter().sum();
            if (s - 1.0).abs() > TAU_STOCH {
                return Err(Error::InvalidKernel(format!(
                    "row {i} sums to {s} (deviation {:e} > {TAU_STOCH:e})",
                    (s - 1.0).abs()
                )));
            }
        }
        Ok(Self(matrix))
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let n = rows.len();
        if rows.iter().any(|r| r.len() != n) {
            return Err(Error::InvalidKernel("rows have unequal lengths".into()));
        }
        Self::new(DMatrix::from_fn(n, n, |i, j| rows[i][j]))
    }

    pub fn identity(n: usize) -> Self {
        Self(DMatrix::identity(n, n))
    }

    /// Wraps a product or blend of kernels without re-validating rows.
    pub(crate) fn from_matrix_unchecked(matrix: DMatrix<f64>) -> Self {
        Self(matrix)
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.0
    }

    pub fn n(&self) -> usize {
        self.0.nrows()
    }

    /// `(Πf)(x) = Σ_y Π(x,y) f(y)`.
    pub fn apply(&self, f: &ObsFunction) -> Result<ObsFunction> {
        check_len(self.n(), f.len(), "kernel vs observable")?;
        Ok(ObsFunction(&self.0 * f.values()))
    }

    pub fn compose(&self, other: &Kernel) -> Kernel {
        Kernel(&self.0 * &other.0)
    }
}

/// Ordered family `Π_0, …, Π_{k−1}` of kernels reversible with respect to a
/// shared target `π` with full support.
#[derive(Debug, Clone, PartialEq)]
pub struct KernelFamily {
    space: StateSpace,
    pi: Dist,
    kernels: Vec<Kernel>,
}

impl KernelFamily {
    pub fn new(pi: Dist, kernels: Vec<Kernel>) -> Result<Self> {
        let space = StateSpace::new(pi.len())?;
        Self::with_space(space, pi, kernels)
    }

    pub fn with_space(space: StateSpace, pi: Dist, kernels: Vec<Kernel>) -> Result<Self> {
        if kernels.is_empty() {
            return Err(Error::EmptyFamily);
        }
        check_len(space.n(), pi.len(), "state space vs pi")?;
        let raw: Vec<DMatrix<f64>> = kernels.iter().map(|k| k.0.clone()).collect();
        let diag = diagnose(pi.as_slice(), &raw);
        let violations = diag.violations(TAU_STOCH, TAU_REV);
        if !violations.is_empty() {
            return Err(Error::InvalidFamily(violations.join("\n")));
        }
        Ok(Self { space, pi, kernels })
    }

    /// Skips validation for blends that are reversible by construction.
    pub(crate) fn new_unchecked(space: StateSpace, pi: Dist, kernels: Vec<Kernel>) -> Self {
        Self { space, pi, kernels }
    }

    pub fn space(&self) -> &StateSpace {
        &self.space
    }

    pub fn pi(&self) -> &Dist {
        &self.pi
    }

    pub fn kernels(&self) -> &[Kernel] {
        &self.kernels
    }

    pub fn kernel(&self, i: usize) -> &Kernel {
        &self.kernels[i]
    }

    /// Number of kernels `k`.
    pub fn k(&self) -> usize {
        self.kernels.len()
    }

    /// Number of states `n`.
    pub fn n(&self) -> usize {
        self.space.n()
    }

    /// Same target, kernels mapped one by one.
    pub fn map_kernels<F>(&self, mut f: F) -> Result<Self>
    where
        F: FnMut(usize, &Kernel) -> Result<Kernel>,
    {
        let kernels = self
            .kernels
            .iter()
            .enumerate()
            .map(|(i, k)| f(i, k))
            .collect::<Result<Vec<_>>>()?;
        Self::with_space(self.space.clone(), self.pi.clone(), kernels)
    }
}

/// Per-kernel numbers gathered by [`validate_family`].
#[derive(Debug, Clone, PartialEq)]
pub struct KernelDiagnostics {
    pub index: usize,
    pub shape_ok: bool,
    pub max_row_sum_deviation: f64,
    pub worst_row: usize,
    /// Magnitude of the most negative entry, 0 when all entries are ≥ 0.
    pub max_negative_entry: f64,
    /// `max |π(x)Π(x,y) − π(y)Π(y,x)|`.
    pub max_detailed_balance_residual: f64,
    pub worst_pair: (usize, usize),
    /// Residual divided by the largest flow `π(x)Π(x,y)`.
    pub relative_detailed_balance_residual: f64,
}

/// Outcome of [`validate_family`]. Always produced, even for malformed input.
#[derive(Debug, Clone, PartialEq)]
pub struct DiagnosticsReport {
    /// Row-sum and sign tolerance.
    pub stoch_tol: f64,
    /// Relative detailed-balance tolerance.
    pub rev_tol: f64,
    pub pi_mass_deviation: f64,
    pub min_pi: f64,
    pub kernels: Vec<KernelDiagnostics>,
    /// Every violated invariant, one message each.
    pub violations: Vec<String>,
    pub passed: bool,
}

impl DiagnosticsReport {
    pub fn max_detailed_balance_residual(&self) -> f64 {
        self.kernels
            .iter()
            .map(|k| k.max_detailed_balance_residual)
            .fold(0.0, f64::max)
    }
}

impl fmt::Display for DiagnosticsReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "pi: mass deviation {:.3e}, min weight {:.3e}",
            self.pi_mass_deviation, self.min_pi
        )?;
        for k in &self.kernels {
            writeln!(
                f,
                "kernel {}: row-sum deviation {:.3e} (row {}), negative entry {:.3e}, detailed-balance residual {:.3e} at {:?} (relative {:.3e})",
                k.index,
                k.max_row_sum_deviation,
                k.worst_row,
                k.max_negative_entry,
                k.max_detailed_balance_residual,
                k.worst_pair,
                k.relative_detailed_balance_residual
            )?;
        }
        let tols = format!("row-sum tolerance {:e}, detailed-balance tolerance {:e}", self.stoch_tol, self.rev_tol);
        if self.passed {
            write!(f, "passed ({tols})")
        } else {
            for v in &self.violations {
                writeln!(f, "violation: {v}")?;
            }
            write!(f, "FAILED ({tols})")
        }
    }
}

struct RawDiagnostics {
    n: usize,
    pi_mass_deviation: f64,
    min_pi: f64,
    pi_issues: Vec<String>,
    kernels: Vec<(KernelDiagnostics, Vec<f64>)>,
}

impl RawDiagnostics {
    fn violations(&self, stoch_tol: f64, rev_tol: f64) -> Vec<String> {
        let mut out = self.pi_issues.clone();
        if self.pi_mass_deviation > stoch_tol {
            out.push(format!(
                "pi sums to {} (deviation {:e} > {stoch_tol:e})",
                1.0 + self.pi_mass_deviation,
                self.pi_mass_deviation
            ));
        }
        if self.kernels.is_empty() {
            out.push("family has no kernels".into());
        }
        for (k, row_devs) in &self.kernels {
            if !k.shape_ok {
                out.push(format!("kernel {} is not {}x{}", k.index, self.n, self.n));
                continue;
            }
            for (row, dev) in row_devs.iter().enumerate() {
                if dev.abs() > stoch_tol {
                    out.push(format!(
                        "kernel {} row {row} sums to {} (residual {:.6e} > {stoch_tol:e})",
                        k.index,
                        1.0 + dev,
                        dev.abs()
                    ));
                }
            }
            if k.max_negative_entry > stoch_tol {
                out.push(format!(
                    "kernel {} has negative entry -{:e}",
                    k.index, k.max_negative_entry
                ));
            }
            if k.relative_detailed_balance_residual.is_nan() || k.relative_detailed_balance_residual > rev_tol {
                out.push(format!(
                    "kernel {} violates detailed balance at {:?}: residual {:.6e} (relative {:.3e} > {rev_tol:e})",
                    k.index,
                    k.worst_pair,
                    k.max_detailed_balance_residual,
                    k.relative_detailed_balance_residual
                ));
            }
        }
        out
    }
}

fn diagnose(pi: &[f64], kernels: &[DMatrix<f64>]) -> RawDiagnostics {
    let n = pi.len();
    let mut pi_issues = Vec::new();
    if n == 0 {
        pi_issues.push("pi is empty".to_string());
    }
    for (x, &w) in pi.iter().enumerate() {
        if !w.is_finite() || w < 0.0 {
            pi_issues.push(format!("pi[{x}] = {w} is not a nonnegative number"));
        } else if w == 0.0 {
            pi_issues.push(format!("pi[{x}] = 0 (degenerate state)"));
        }
    }
    let pi_mass_deviation = (pi.iter().sum::<f64>() - 1.0).abs();
    let min_pi = pi.iter().copied().fold(f64::INFINITY, f64::min);
    let kernels = kernels
        .iter()
        .enumerate()
        .map(|(index, m)| {
            let shape_ok = m.nrows() == n && m.ncols() == n;
            let mut d = KernelDiagnostics {
                index,
                shape_ok,
                max_row_sum_deviation: 0.0,
                worst_row: 0,
                max_negative_entry: 0.0,
                max_detailed_balance_residual: 0.0,
                worst_pair: (0, 0),
                relative_detailed_balance_residual: 0.0,
            };
            let mut row_devs = Vec::new();
            if !shape_ok {
                d.max_row_sum_deviation = f64::INFINITY;
                d.relative_detailed_balance_residual = f64::INFINITY;
                return (d, row_devs);
            }
            let mut flow_scale = 0.0f64;
            for x in 0..n {
                let s: f64 = m.row(x).iter().sum();
                let dev = s - 1.0;
                row_devs.push(dev);
                if dev.abs() > d.max_row_sum_deviation || !dev.is_finite() {
                    d.max_row_sum_deviation = dev.abs();
                    d.worst_row = x;
                }
                for y in 0..n {
                    let v = m[(x, y)];
                    if v < 0.0 || !v.is_finite() {
                        d.max_negative_entry = d.max_negative_entry.max(-v).max(if v.is_finite() { 0.0 } else { f64::INFINITY });
                    }
                    flow_scale = flow_scale.max((pi[x] * v).abs());
                    if y > x {
                        let r = (pi[x] * v - pi[y] * m[(y, x)]).abs();
                        if r > d.max_detailed_balance_residual || !r.is_finite() {
                            d.max_detailed_balance_residual = r;
                            d.worst_pair = (x, y);
                        }
                    }
                }
            }
            d.relative_detailed_balance_residual = if flow_scale > 0.0 {
                d.max_detailed_balance_residual / flow_scale
            } else {
                d.max_detailed_balance_residual
            };
            (d, row_devs)
        })
        .collect();
    RawDiagnostics {
        n,
        pi_mass_deviation,
        min_pi,
        pi_issues,
        kernels,
    }
}

/// Checks row sums, signs and detailed balance of every kernel against `pi`.
/// Detailed-balance residuals are compared to `tol` relative to the kernel's
/// largest flow `π(x)Π(x,y)`. Never fails: malformed input is reported.
pub fn validate_family(pi: &[f64], kernels: &[DMatrix<f64>], tol: f64) -> DiagnosticsReport {
    validate_family_with(pi, kernels, tol, tol)
}

/// [`validate_family`] with separate row-sum and detailed-balance tolerances;
/// `validate_family_with(pi, ks, TAU_STOCH, TAU_REV)` passes exactly when
/// [`KernelFamily::new`] accepts the input.
pub fn validate_family_with(pi: &[f64], kernels: &[DMatrix<f64>], stoch_tol: f64, rev_tol: f64) -> DiagnosticsReport {
    let raw = diagnose(pi, kernels);
    let violations = raw.violations(stoch_tol, rev_tol);
    DiagnosticsReport {
        stoch_tol,
        rev_tol,
        pi_mass_deviation: raw.pi_mass_deviation,
        min_pi: raw.min_pi,
        passed: violations.is_empty(),
        violations,
        kernels: raw.kernels.into_iter().map(|(k, _)| k).collect(),
    }
}

/// `⟨f, g⟩_π = Σ_x π(x) f(x) g(x)`.
pub fn inner(f: &ObsFunction, g: &ObsFunction, pi: &Dist) -> Result<f64> {
    check_len(pi.len(), f.len(), "inner: f vs pi")?;
    check_len(pi.len(), g.len(), "inner: g vs pi")?;
    Ok(weighted_dot(pi.weights(), f.values(), g.values()))
}

/// `f − π(f)`.
pub fn center(f: &ObsFunction, pi: &Dist) -> Result<ObsFunction> {
    let mean = pi.expect(f)?;
    Ok(ObsFunction(f.values().map(|v| v - mean)))
}

/// `‖f‖²_π`.
pub fn norm_sq(f: &ObsFunction, pi: &Dist) -> Result<f64> {
    inner(f, f, pi)
}

/// The random-scan kernel `(1/k) Σ_j Π_j`.
pub fn random_scan(fam: &KernelFamily) -> Kernel {
    let k = fam.k() as f64;
    let sum = fam
        .kernels
        .iter()
        .skip(1)
        .fold(fam.kernels[0].0.clone(), |acc, m| acc + &m.0);
    Kernel(sum / k)
}

/// Forward circular permutation on `{0, …, k−1}` raised to `power`
/// (negative powers iterate the inverse).
pub fn sigma(j: usize, power: i64, k: usize) -> Result<usize> {
    if j >= k {
        return Err(Error::IndexOutOfRange {
            index: j,
            len: k,
            context: "sigma",
        });
    }
    Ok(sigma_unchecked(j, power, k))
}

pub(crate) fn sigma_unchecked(j: usize, power: i64, k: usize) -> usize {
    (j as i64 + power).rem_euclid(k as i64) as usize
}

/// `Π_q Π_{σ(q)} ⋯ Π_{σ^{s−1}(q)}`; the identity when `s = 0`.
pub fn compose_cycle(fam: &KernelFamily, q: usize, s: usize) -> Result<Kernel> {
    if q >= fam.k() {
        return Err(Error::IndexOutOfRange {
            index: q,
            len: fam.k(),
            context: "compose_cycle",
        });
    }
    let mut acc = DMatrix::identity(fam.n(), fam.n());
    for step in 0..s {
        let idx = sigma_unchecked(q, step as i64, fam.k());
        acc *= &fam.kernels[idx].0;
    }
    Ok(Kernel(acc))
}

/// Gibbs update of one coordinate of a joint distribution on an `n1 × n2`
/// grid. State `(a, b)` has index `a·n2 + b`; `axis = 0` resamples `a` from
/// `joint(· | b)` and `axis = 1` resamples `b` from `joint(· | a)`.
pub fn build_gibbs(joint: &Dist, n1: usize, n2: usize, axis: usize) -> Result<Kernel> {
    check_len(n1 * n2, joint.len(), "gibbs: grid vs joint")?;
    if axis > 1 {
        return Err(Error::IndexOutOfRange {
            index: axis,
            len: 2,
            context: "gibbs axis",
        });
    }
    let w = joint.weights();
    let idx = |a: usize, b: usize| a * n2 + b;
    let n = n1 * n2;
    let mut m = DMatrix::zeros(n, n);
    if axis == 0 {
        for b in 0..n2 {
            let mass: f64 = (0..n1).map(|a| w[idx(a, b)]).sum();
            if mass <= 0.0 {
                return Err(Error::DegenerateConditional { axis, slice: b });
            }
            for a in 0..n1 {
                for a2 in 0..n1 {
                    m[(idx(a, b), idx(a2, b))] = w[idx(a2, b)] / mass;
                }
            }
        }
    } else {
        for a in 0..n1 {
            let mass: f64 = (0..n2).map(|b| w[idx(a, b)]).sum();
            if mass <= 0.0 {
                return Err(Error::DegenerateConditional { axis, slice: a });
            }
            for b in 0..n2 {
                for b2 in 0..n2 {
                    m[(idx(a, b), idx(a, b2))] = w[idx(a, b2)] / mass;
                }
            }
        }
    }
    Kernel::new(m)
}

/// Metropolis–Hastings kernel for target `pi` and proposal `q`: acceptance
/// `min(1, π(y)q(y,x) / (π(x)q(x,y)))` off the diagonal, rejected mass on the
/// diagonal.
pub fn build_metropolis(pi: &Dist, proposal: &Kernel) -> Result<Kernel> {
    check_len(pi.len(), proposal.n(), "metropolis: proposal vs pi")?;
    let n = pi.len();
    let w = pi.weights();
    let q = &proposal.0;
    let mut m = DMatrix::zeros(n, n);
    for x in 0..n {
        let mut moved = 0.0;
        for y in 0..n {
            if x == y || q[(x, y)] == 0.0 {
                continue;
            }
            // Written as min(q(x,y), π(y)q(y,x)/π(x)) so both directions use
            // the same product and detailed balance holds to rounding.
            let forward = w[x] * q[(x, y)];
            let backward = w[y] * q[(y, x)];
            let flow = forward.min(backward);
            let p = if w[x] > 0.0 { flow / w[x] } else { q[(x, y)] };
            m[(x, y)] = p;
            moved += p;
        }
        m[(x, x)] = (1.0 - moved).max(0.0);
    }
    Kernel::new(m)
}

/// `(1 − a) K + a I`.
pub fn lazy(kernel: &Kernel, a: f64) -> Result<Kernel> {
    if !(0.0..=1.0).contains(&a) {
        return Err(Error::OutOfRange {
            name: "a",
            value: a,
            range: "[0, 1]",
        });
    }
    let n = kernel.n();
    Ok(Kernel(&kernel.0 * (1.0 - a) + DMatrix::identity(n, n) * a))
}

/// Whether every state reaches every other through positive entries.
pub fn is_irreducible(kernel: &Kernel) -> bool {
    let n = kernel.n();
    let reach = |forward: bool| {
        let mut seen = vec![false; n];
        let mut queue = VecDeque::from([0usize]);
        seen[0] = true;
        while let Some(x) = queue.pop_front() {
            for (y, s) in seen.iter_mut().enumerate() {
                let v = if forward { kernel.0[(x, y)] } else { kernel.0[(y, x)] };
                if v > 0.0 && !*s {
                    *s = true;
                    queue.push_back(y);
                }
            }
        }
        seen.iter().all(|s| *s)
    };
    reach(true) && reach(false)
}

const MAX_REVERSIBLE_ATTEMPTS: usize = 100;

/// Metropolised random proposal against `pi`, deterministic in `seed`.
/// Proposal rows have uniform weights with each off-diagonal entry dropped
/// with probability 0.3; up to 100 seed-derived proposals are tried until the
/// resulting kernel is irreducible.
pub fn random_reversible(pi: &Dist, seed: u64) -> Result<Kernel> {
    let n = pi.len();
    for attempt in 0..MAX_REVERSIBLE_ATTEMPTS {
        let mut r = rng(derive_seed(seed, attempt as u64));
        let mut q = DMatrix::zeros(n, n);
        for x in 0..n {
            let mut total = 0.0;
            for y in 0..n {
                let keep = x == y || r.random::<f64>() >= 0.3;
                let v = if keep { r.random::<f64>() + 1e-3 } else { 0.0 };
                q[(x, y)] = v;
                total += v;
            }
            for y in 0..n {
                q[(x, y)] /= total;
            }
        }
        let k = build_metropolis(pi, &Kernel(q))?;
        if is_irreducible(&k) {
            return Ok(k);
        }
    }
    Err(Error::NotIrreducible {
        attempts: MAX_REVERSIBLE_ATTEMPTS,
    })
}

/// Full-support distribution with weights drawn uniformly from `[0.1, 1)`
/// before normalising.
pub fn random_dist(n: usize, seed: u64) -> Result<Dist> {
    let mut r = rng(derive_seed(seed, u64::MAX));
    Dist::from_unnormalized((0..n).map(|_| 0.1 + 0.9 * r.random::<f64>()).collect())
}

/// Random target on `n` states with `k` random reversible kernels.
pub fn random_family(n: usize, k: usize, seed: u64) -> Result<KernelFamily> {
    let pi = random_dist(n, seed)?;
    let kernels = (0..k)
        .map(|i| random_reversible(&pi, derive_seed(seed, i as u64)))
        .collect::<Result<Vec<_>>>()?;
    KernelFamily::new(pi, kernels)
}

pub(crate) fn check_len(expected: usize, got: usize, context: &'static str) -> Result<()> {
    if expected != got {
        return Err(Error::DimensionMismatch {
            expected,
            got,
            context,
        });
    }
    Ok(())
}

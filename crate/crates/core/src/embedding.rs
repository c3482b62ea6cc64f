//! The homogeneous embedding of a deterministic scan.
//!
//! For a family `Π_0, …, Π_{k−1}` the embedding acts on `k`-tuples of
//! functions, `L^{2,k}(π)`, as
//!
//! ```text
//! (Tφ)_j = Π_j φ_{σ(j)},        T = Δ ∘ 𝔖,        T* = 𝔖⁻¹ ∘ Δ
//! ```
//!
//! where `𝔖` is the cyclic shift of components and `Δ` applies `Π_j` to
//! component `j`. The inner product is `⟨φ, ψ⟩ = Σ_j ⟨φ_j, ψ_j⟩_π`, in which
//! `𝔖` is unitary and `Δ` self-adjoint (every `Π_j` is π-reversible).
//!
//! Dense realisations are `nk × nk` with component `j` occupying rows
//! `j·n .. (j+1)·n`.

use std::sync::OnceLock;

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::hilbert::{check_len, sigma_unchecked, Dist, KernelFamily, ObsFunction};
use crate::linalg::{solve, weighted_dot};

/// A `k`-tuple of functions on a common state space.
#[derive(Debug, Clone, PartialEq)]
pub struct BlockVector(Vec<DVector<f64>>);

impl BlockVector {
    pub fn new(components: Vec<DVector<f64>>) -> Result<Self> {
        let n = components.first().map(|c| c.len()).ok_or(Error::EmptyFamily)?;
        for c in &components {
            check_len(n, c.len(), "block vector component")?;
        }
        Ok(Self(components))
    }

    /// `f̄ = (f, …, f)` with `k` copies.
    pub fn replicate(f: &ObsFunction, k: usize) -> Self {
        Self(vec![f.values().clone(); k])
    }

    pub fn zeros(n: usize, k: usize) -> Self {
        Self(vec![DVector::zeros(n); k])
    }

    pub fn components(&self) -> &[DVector<f64>] {
        &self.0
    }

    pub fn component(&self, j: usize) -> &DVector<f64> {
        &self.0[j]
    }

    pub fn k(&self) -> usize {
        self.0.len()
    }

    pub fn n(&self) -> usize {
        self.0[0].len()
    }

    /// `Σ_j ⟨φ_j, ψ_j⟩_π`.
    pub fn inner(&self, other: &BlockVector, pi: &Dist) -> Result<f64> {
        check_len(self.k(), other.k(), "block inner: k")?;
        check_len(pi.len(), self.n(), "block inner: n")?;
        check_len(pi.len(), other.n(), "block inner: n")?;
        Ok(self
            .0
            .iter()
            .zip(&other.0)
            .map(|(a, b)| weighted_dot(pi.weights(), a, b))
            .sum())
    }

    pub fn flatten(&self) -> DVector<f64> {
        let n = self.n();
        DVector::from_fn(n * self.k(), |i, _| self.0[i / n][i % n])
    }

    pub fn from_flat(v: &DVector<f64>, k: usize) -> Self {
        let n = v.len() / k;
        Self((0..k).map(|j| v.rows(j * n, n).into_owned()).collect())
    }

    pub fn scale(&self, c: f64) -> Self {
        Self(self.0.iter().map(|v| v * c).collect())
    }

    pub fn add(&self, other: &BlockVector) -> Self {
        Self(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    pub fn sub(&self, other: &BlockVector) -> Self {
        Self(self.0.iter().zip(&other.0).map(|(a, b)| a - b).collect())
    }

    /// Largest absolute entry.
    pub fn amax(&self) -> f64 {
        self.0.iter().map(|v| v.amax()).fold(0.0, f64::max)
    }
}

/// `(𝔖^p φ)_j = φ_{σ^p(j)}`; `p = ±1` are the forward and backward shifts.
pub fn shift(phi: &BlockVector, power: i64) -> BlockVector {
    let k = phi.k();
    BlockVector((0..k).map(|j| phi.0[sigma_unchecked(j, power, k)].clone()).collect())
}

/// Operators with a dense realisation that can be inverted by
/// [`EmbeddedOperator::resolvent_solve`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum OperatorSelector {
    /// `T = Δ𝔖`.
    T,
    /// `T* = 𝔖⁻¹Δ`.
    TAdjoint,
    /// `S = (T + T*)/2`.
    Symmetric,
    /// `𝔖Δ`.
    ShiftDiag,
    /// `𝔖⁻¹Δ`.
    InverseShiftDiag,
}

/// The embedding operator of a kernel family.
#[derive(Debug)]
pub struct EmbeddedOperator {
    pi: Dist,
    kernels: Vec<DMatrix<f64>>,
    realization: OnceLock<DMatrix<f64>>,
}

impl Clone for EmbeddedOperator {
    fn clone(&self) -> Self {
        Self {
            pi: self.pi.clone(),
            kernels: self.kernels.clone(),
            realization: OnceLock::new(),
        }
    }
}

impl EmbeddedOperator {
    pub fn new(family: &KernelFamily) -> Self {
        Self {
            pi: family.pi().clone(),
            kernels: family.kernels().iter().map(|k| k.matrix().clone()).collect(),
            realization: OnceLock::new(),
        }
    }

    /// Embedding of arbitrary (possibly non-stochastic) π-self-adjoint
    /// blocks, used along interpolation paths between two families.
    pub(crate) fn from_blocks(pi: Dist, kernels: Vec<DMatrix<f64>>) -> Self {
        Self {
            pi,
            kernels,
            realization: OnceLock::new(),
        }
    }

    pub fn k(&self) -> usize {
        self.kernels.len()
    }

    pub fn n(&self) -> usize {
        self.pi.len()
    }

    pub fn pi(&self) -> &Dist {
        &self.pi
    }

    fn check(&self, phi: &BlockVector) -> Result<()> {
        check_len(self.k(), phi.k(), "block vector k")?;
        check_len(self.n(), phi.n(), "block vector n")
    }

    /// `(Δφ)_i = Π_i φ_i`.
    pub fn diag_apply(&self, phi: &BlockVector) -> Result<BlockVector> {
        self.check(phi)?;
        Ok(BlockVector(
            self.kernels.iter().zip(&phi.0).map(|(m, v)| m * v).collect(),
        ))
    }

    /// `Tφ = Δ(𝔖φ)`, i.e. `(Tφ)_i = Π_i φ_{σ(i)}`.
    pub fn apply(&self, phi: &BlockVector) -> Result<BlockVector> {
        self.check(phi)?;
        self.diag_apply(&shift(phi, 1))
    }

    /// `T*φ = 𝔖⁻¹(Δφ)`.
    pub fn apply_adjoint(&self, phi: &BlockVector) -> Result<BlockVector> {
        Ok(shift(&self.diag_apply(phi)?, -1))
    }

    /// `Sφ = (Tφ + T*φ)/2`.
    pub fn apply_symmetric(&self, phi: &BlockVector) -> Result<BlockVector> {
        Ok(self.apply(phi)?.add(&self.apply_adjoint(phi)?).scale(0.5))
    }

    /// `Aφ = (Tφ − T*φ)/2`.
    pub fn apply_skew(&self, phi: &BlockVector) -> Result<BlockVector> {
        Ok(self.apply(phi)?.sub(&self.apply_adjoint(phi)?).scale(0.5))
    }

    /// `T^i φ`, by repeated application.
    pub fn power_apply(&self, phi: &BlockVector, i: usize) -> Result<BlockVector> {
        self.check(phi)?;
        let mut out = phi.clone();
        for _ in 0..i {
            out = self.apply(&out)?;
        }
        Ok(out)
    }

    /// Dense realisation of `T`, built on first use.
    pub fn realization(&self) -> &DMatrix<f64> {
        self.realization.get_or_init(|| self.matrix_uncached(OperatorSelector::T))
    }

    /// Dense realisation of the selected operator.
    pub fn matrix(&self, op: OperatorSelector) -> DMatrix<f64> {
        match op {
            OperatorSelector::T => self.realization().clone(),
            other => self.matrix_uncached(other),
        }
    }

    fn matrix_uncached(&self, op: OperatorSelector) -> DMatrix<f64> {
        let (n, k) = (self.n(), self.k());
        let mut m = DMatrix::zeros(n * k, n * k);
        let mut add_block = |row: usize, col: usize, kernel: usize, c: f64| {
            let mut view = m.view_mut((row * n, col * n), (n, n));
            view += &self.kernels[kernel] * c;
        };
        for j in 0..k {
            let fwd = sigma_unchecked(j, 1, k);
            let back = sigma_unchecked(j, -1, k);
            match op {
                OperatorSelector::T => add_block(j, fwd, j, 1.0),
                OperatorSelector::TAdjoint | OperatorSelector::InverseShiftDiag => {
                    add_block(j, back, back, 1.0)
                }
                OperatorSelector::Symmetric => {
                    add_block(j, fwd, j, 0.5);
                    add_block(j, back, back, 0.5);
                }
                OperatorSelector::ShiftDiag => add_block(j, fwd, fwd, 1.0),
            }
        }
        m
    }

    /// Solves `(I − λ·Op) x = rhs` by dense LU, for `λ ∈ [0, 1)`.
    pub fn resolvent_solve(
        &self,
        op: OperatorSelector,
        lambda: f64,
        rhs: &BlockVector,
    ) -> Result<BlockVector> {
        check_lambda(lambda)?;
        self.check(rhs)?;
        if lambda == 0.0 {
            return Ok(rhs.clone());
        }
        let m = self.matrix(op);
        let dim = m.nrows();
        let system = DMatrix::identity(dim, dim) - m * lambda;
        let x = solve(&system, &rhs.flatten(), "resolvent of the embedding")?;
        Ok(BlockVector::from_flat(&x, self.k()))
    }

    /// `π` repeated `k` times: the weights of the block inner product.
    pub fn block_weights(&self) -> DVector<f64> {
        let n = self.n();
        DVector::from_fn(n * self.k(), |i, _| self.pi.weights()[i % n])
    }
}

pub(crate) fn check_lambda(lambda: f64) -> Result<()> {
    if !(0.0..1.0).contains(&lambda) {
        return Err(Error::OutOfRange {
            name: "lambda",
            value: lambda,
            range: "[0, 1)",
        });
    }
    Ok(())
}

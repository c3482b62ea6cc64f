//! Exact and simulated asymptotic variances for Markov chain Monte Carlo
//! estimators that combine a family of π-reversible kernels either by random
//! scan (uniform mixture) or by deterministic scan (fixed cycle).
//!
//! The deterministic scan chain is time-inhomogeneous. Its variance is
//! computed through a homogeneous embedding on k staggered copies of the
//! cycle ([`embedding::EmbeddedOperator`]), which turns the discounted
//! variance into a single resolvent solve on `L^{2,k}(π)`.
//!
//! Modules, bottom-up:
//!
//! * [`hilbert`]: distributions, observables, kernels, kernel families and
//!   their constructors and validators.
//! * [`embedding`]: the embedding operator, its shift/diagonal factors,
//!   adjoint, symmetric and skew parts, and resolvent solves.
//! * [`variance`]: discounted and limiting variances, exact finite-horizon
//!   variances and exact joint laws.
//! * [`ordering`]: checkers for the two-kernel ordering result, the
//!   variational identities and Peskun-type comparisons.
//! * [`simulate`]: seeded simulation of all three chains and replicated
//!   variance estimation.
//!
//! State, kernel and cycle indices are 0-based throughout.

pub mod embedding;
pub mod error;
pub mod hilbert;
pub mod ordering;
pub mod simulate;
pub mod tolerance;
pub mod variance;

mod linalg;
pub mod seed;

pub use embedding::{BlockVector, EmbeddedOperator, OperatorSelector};
pub use error::{Error, Result};
pub use hilbert::{Dist, Kernel, KernelFamily, ObsFunction, StateSpace};
pub use ordering::{OrderingReport, PeskunComparison};
pub use simulate::{Path, Scheme, SimulationConfig, VarianceEstimate};
pub use variance::{SchemeSelector, VarianceMethod, VarianceReport};

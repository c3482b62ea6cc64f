//! Numerical thresholds shared by every module.

/// Maximum allowed deviation of a kernel row sum (or of a distribution's
/// total mass) from one.
pub const TAU_STOCH: f64 = 1e-12;

/// Maximum detailed-balance residual `|π(x)Π(x,y) − π(y)Π(y,x)|`, relative to
/// the largest flow `π(x)Π(x,y)` of the kernel.
pub const TAU_REV: f64 = 1e-10;

/// General numeric equality.
pub const TAU_NUM: f64 = 1e-10;

/// Eigenvalues in `(−TAU_EIG, 0)` count as zero in semidefiniteness verdicts.
pub const TAU_EIG: f64 = 1e-10;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got} ({context})")]
    DimensionMismatch {
        expected: usize,
        got: usize,
        context: &'static str,
    },

    #[error("invalid distribution: {0}")]
    InvalidDist(String),

    #[error("invalid kernel: {0}")]
    InvalidKernel(String),

    #[error("invalid kernel family:\n{0}")]
    InvalidFamily(String),

    #[error("empty kernel family")]
    EmptyFamily,

    #[error("index {index} out of range 0..{len} ({context})")]
    IndexOutOfRange {
        index: usize,
        len: usize,
        context: &'static str,
    },

    #[error("parameter {name} = {value} outside {range}")]
    OutOfRange {
        name: &'static str,
        value: f64,
        range: &'static str,
    },

    #[error("degenerate conditional: slice {slice} of axis {axis} has zero mass")]
    DegenerateConditional { axis: usize, slice: usize },

    #[error("singular linear system ({0})")]
    Singular(&'static str),

    #[error("no irreducible kernel found after {attempts} attempts")]
    NotIrreducible { attempts: usize },

    #[error(
        "summability fails: full-cycle contraction {contraction} is not below 1 on centred functions"
    )]
    NotSummable { contraction: f64 },

    #[error("chain is reducible: eigenvalue 1 has multiplicity {multiplicity}")]
    Reducible { multiplicity: usize },

    #[error("operator is not self-adjoint (asymmetry {asymmetry:e})")]
    NotSelfAdjoint { asymmetry: f64 },

    #[error("operator is not positive definite (smallest eigenvalue {min_eigenvalue:e})")]
    NotPositive { min_eigenvalue: f64 },

    #[error("distribution is not invariant for the kernel (residual {residual:e})")]
    NotInvariant { residual: f64 },

    #[error("requires k = {expected} kernels, family has k = {got}")]
    WrongFamilySize { expected: usize, got: usize },

    #[error("families differ: {0}")]
    MismatchedFamilies(String),

    #[error("table of {size} cells exceeds the limit of {limit}")]
    TableTooLarge { size: usize, limit: usize },

    #[error("invalid simulation config: {0}")]
    InvalidConfig(String),

    #[error("path was produced by scheme {got:?}, expected {expected:?}")]
    WrongScheme {
        expected: crate::simulate::Scheme,
        got: crate::simulate::Scheme,
    },

    #[error(
        "Peskun precondition not met: kernel(s) {failing:?} of the second family are not dominated (min eigenvalue {min_eigenvalue:e})"
    )]
    PreconditionNotMet {
        failing: Vec<usize>,
        min_eigenvalue: f64,
        report: Box<crate::ordering::PeskunOrderingReport>,
    },
}

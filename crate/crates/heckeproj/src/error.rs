use thiserror::Error;

/// Errors shared by all modules of the crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("matrix is not Hermitian: ||A - A*||_F = {defect:.3e} exceeds tolerance {tol:.3e}")]
    NotHermitian { defect: f64, tol: f64 },

    #[error("matrix is not idempotent: ||A^2 - A||_F = {defect:.3e} exceeds tolerance {tol:.3e}")]
    NotIdempotent { defect: f64, tol: f64 },

    #[error("bad dimension: {0}")]
    BadDimension(String),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("eigensolver did not converge within {sweeps} sweeps (off-diagonal mass {off:.3e})")]
    NoConvergence { sweeps: usize, off: f64 },

    #[error("site {site} out of range for {strands} strands")]
    SiteOutOfRange { site: usize, strands: usize },

    #[error("dimension overflow: n^strands = {dim} exceeds cap {cap}")]
    DimensionOverflow { dim: usize, cap: usize },

    #[error("rank of K_P is odd ({rank}); tolerance failure in rank determination")]
    OddRank { rank: usize },

    #[error("bad rank {r} for projections on C^{{{n}x{n}}}")]
    BadRank { n: usize, r: usize },

    #[error("trace has non-negligible imaginary part {imag:.3e}")]
    NonRealTrace { imag: f64 },

    #[error("P1 P2 = P2 P1: trace estimator for Q is undefined (t1 - t2 = {gap:.3e})")]
    CommutingProjections { gap: f64 },

    #[error("Q estimators disagree: spectral {spectral}, trace {trace} (relative gap {gap:.3e}) on a verified solution")]
    InconsistentEstimators { spectral: f64, trace: f64, gap: f64 },

    #[error("rank defect {found} does not match rn - k = {expected}")]
    DefectMismatch { found: usize, expected: usize },

    #[error("family is not orthonormal: Gram[{s}][{m}] = {value} (expected {expected})")]
    NotOrthonormal { s: usize, m: usize, value: num_complex::Complex64, expected: f64 },

    #[error("family is rank deficient: Gram matrix has rank {rank} < {r}")]
    RankDeficientFamily { rank: usize, r: usize },

    #[error("bad parameters: {0}")]
    BadParameters(String),

    #[error("degenerate parameters: {0}")]
    DegenerateParameters(String),

    #[error("weights do not satisfy the Temperley-Lieb constancy condition: {0}")]
    NotTLWeights(String),

    #[error("q + 1/q = {0} is not real")]
    NonRealQ(num_complex::Complex64),

    #[error("R matrix is singular (|det| = {0:.3e})")]
    SingularR(f64),

    #[error("matrix is singular, cannot invert")]
    Singular,

    #[error("columns are not an isometry: ||U*U - I||_F = {defect:.3e}")]
    NotIsometry { defect: f64 },

    #[error("spectral rounding changed the rank: {found} eigenvalues above 1/2, expected {expected}")]
    RankDrift { found: usize, expected: usize },

    #[error("invalid search configuration: {0}")]
    BadConfig(String),
}

pub type Result<T> = std::result::Result<T, Error>;

use thiserror::Error;

/// Failure modes of the reduction and bound computations.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch in {what}: expected {expected}, found {found}")]
    DimensionMismatch {
        what: &'static str,
        expected: usize,
        found: usize,
    },
    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },
    #[error("non-finite entries in {0}")]
    NonFinite(&'static str),
    #[error("real Schur iteration did not converge after {iterations} iterations")]
    SchurNoConvergence { iterations: usize },
    #[error("{0} did not converge")]
    NoConvergence(&'static str),
    #[error("matrix is not Hurwitz (spectral abscissa {abscissa:e})")]
    NotHurwitz { abscissa: f64 },
    #[error("Sylvester operands share an eigenvalue (|lambda_a + lambda_b| = {gap:e})")]
    CommonEigenvalue { gap: f64 },
    #[error("singular matrix in {0}")]
    Singular(&'static str),
    #[error("invalid reduced order {n}: must satisfy 1 <= n < {full}")]
    InvalidOrder { n: usize, full: usize },
    #[error(
        "Hankel singular values {n} and {next} coincide (sigma = {sigma_n:e}, {sigma_next:e}); try n = {lower} or n = {next}",
        next = n + 1,
        lower = n.saturating_sub(1)
    )]
    HsvGap {
        n: usize,
        sigma_n: f64,
        sigma_next: f64,
    },
    #[error("reduced order {n} exceeds the numerical rank {rank} of the balanced realization")]
    RankDeficient { n: usize, rank: usize },
    #[error("reduced model is not asymptotically stable (spectral abscissa {abscissa:e})")]
    UnstableReducedModel { abscissa: f64 },
    #[error("time grid with {m} points cannot resolve Fourier order {k} (need m >= 20 K)")]
    UnderResolvedGrid { k: usize, m: usize },
    #[error("invalid time grid: {0}")]
    InvalidGrid(&'static str),
    #[error("Fourier order {k} exceeds the precomputed maximum {k_max}")]
    OrderExceedsCache { k: usize, k_max: usize },
    #[error("signal horizon {found} does not match the precomputed horizon {expected}")]
    HorizonMismatch { expected: f64, found: f64 },
}

pub type Result<T, E = Error> = core::result::Result<T, E>;

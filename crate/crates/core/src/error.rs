use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum WalkError {
    #[error("coin bias theta must lie in [0, pi/2], received {0}")]
    CoinBiasOutOfRange(f64),
    #[error("harmonic phase requires p >= 1, received p = {0}")]
    PeriodNotPositive(i64),
    #[error("harmonic phase requires q >= 0, received q = {0}")]
    NegativeQ(i64),
    #[error("harmonic phase requires co-prime q and p, but gcd({q}, {p}) = {gcd}")]
    NotCoprime { q: i64, p: i64, gcd: i64 },
    #[error("line topology requires t_max >= 1, received {0}")]
    LineTooShort(usize),
    #[error("ring topology requires n_sites >= 2, received {0}")]
    RingTooSmall(usize),
    #[error("period p = {p} does not divide ring size n_sites = {n_sites}")]
    PeriodDoesNotDivide { p: i64, n_sites: usize },
    #[error("phase table has {got} entries but the topology has {expected} sites")]
    TableLength { expected: usize, got: usize },
    #[error("site {site} is outside the topology")]
    SiteOutOfRange { site: i64 },
    #[error("state is not normalized: squared norm {0}")]
    NotNormalized(f64),
    #[error("amplitude vector has length {got}, expected {expected}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("density matrix is not Hermitian (max deviation {0:e})")]
    NotHermitian(f64),
    #[error("density matrix trace is {0}, expected 1")]
    TraceNotOne(f64),
    #[error("density matrix has a negative or complex diagonal entry at index {0}")]
    BadDiagonal(usize),
    #[error("density dimension {dim} exceeds the dense-storage limit of {limit}")]
    DensityTooLarge { dim: usize, limit: usize },
    #[error("probability at index {index} is negative ({value})")]
    NegativeProbability { index: usize, value: f64 },
    #[error("probabilities sum to {0}, expected 1")]
    ProbabilitiesNotNormalized(f64),
    #[error("walker reached the edge of the line window; t_max is too small")]
    BoundaryReached,
    #[error("requested {steps} steps but the line window only supports {capacity}")]
    StepsExceedCapacity { steps: usize, capacity: usize },
    #[error("{name} must lie in [0, 1], received {value}")]
    StrengthOutOfRange { name: &'static str, value: f64 },
    #[error("n_traj must be at least 1")]
    NoTrajectories,
    #[error("operation requires a ring topology")]
    RingRequired,
    #[error("operation requires a line topology (signed positions)")]
    LineRequired,
    #[error("operation requires a harmonic or zero phase profile")]
    HarmonicRequired,
    #[error("topologies of the two distributions differ")]
    TopologyMismatch,
    #[error("closed-form eigenvalues require even p, received p = {0}")]
    OddPeriod(i64),
    #[error("root branch index {index} out of range for p = {p}")]
    InvalidBranch { index: usize, p: i64 },
    #[error("eigenvalue iteration did not converge for a {0}x{0} matrix")]
    EigenNoConvergence(usize),
    #[error("eigenvalue {index} has modulus {modulus}, not unimodular")]
    NotUnimodular { index: usize, modulus: f64 },
    #[error("series contains a non-finite value at t = {0}")]
    NonFinite(usize),
    #[error("fit needs at least 3 points, window holds {0}")]
    TooFewPoints(usize),
    #[error("value at t = {0} must be strictly positive for a log fit")]
    NonPositive(usize),
    #[error("fit window [{t_min}, {t_max}] is invalid for a series of length {len}")]
    BadWindow { t_min: usize, t_max: usize, len: usize },
    #[error("series of length {len} is too short for tau_max = {tau_max} (needs {needed})")]
    SeriesTooShort { len: usize, tau_max: usize, needed: usize },
    #[error("tau_max must be at least 2, received {0}")]
    TauMaxTooSmall(usize),
    #[error("cannot normalize an all-zero series")]
    AllZero,
    #[error("tolerance must be positive, received {0}")]
    BadTolerance(f64),
}

pub type Result<T> = std::result::Result<T, WalkError>;

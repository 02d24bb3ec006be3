use num_complex::Complex64;
use thiserror::Error;

/// Failure modes shared by every layer of the crate.
///
/// Several variants carry spectral meaning: `DirichletSpectrum` and
/// `SpectralPoint` mark λ in the spectrum of the reference resp. the
/// realization, `EssentialTube` marks λ too close to the essential spectrum
/// for the kernel reduction to be trusted.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("matrix is singular to working precision (pivot {pivot:.3e} at column {column})")]
    SingularMatrix { column: usize, pivot: f64 },
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("non-finite entry in {0}")]
    NonFinite(&'static str),
    #[error("grid functions live on different grids ({left} vs {right} points)")]
    GridMismatch { left: usize, right: usize },
    #[error("invalid grid size {0}: need an odd number of points >= 3")]
    InvalidGrid(usize),
    #[error("step size underflow at t = {t} (h = {h:.3e})")]
    StepUnderflow { t: f64, h: f64 },
    #[error("integrator exceeded {0} steps")]
    TooManySteps(usize),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("lambda = {lambda} lies in the spectrum of the Dirichlet reference")]
    DirichletSpectrum { lambda: Complex64 },
    #[error("lambda = {lambda} is a spectral point of the realization")]
    SpectralPoint { lambda: Complex64 },
    #[error("lambda = {lambda} is within {tube_eps} of the essential spectrum")]
    EssentialTube { lambda: Complex64, tube_eps: f64 },
    #[error("coefficient singularity at x = {x} for lambda = {lambda}")]
    CoefficientSingularity { lambda: Complex64, x: f64 },
    #[error("lambda = {lambda} is a Neumann eigenvalue (y1'(1) = {y1_prime})")]
    NeumannEigenvalue { lambda: Complex64, y1_prime: Complex64 },
    #[error("bracket factor vanishes at lambda = {lambda}")]
    BracketSingular { lambda: Complex64 },
    #[error("sampler failed at node {node}: {source}")]
    SamplerFailed { node: usize, source: Box<Error> },
    #[error("hypothesis violated: {0}")]
    HypothesisViolated(String),
    #[error("mu = {mu} is outside the sector |arg mu| < pi/4")]
    SectorViolation { mu: Complex64 },
    #[error("characteristic roots coincide")]
    DegenerateRoots,
    #[error("symbol pole: c + (sigma_+ + sigma_-)/2 = {denominator}")]
    SymbolPole { denominator: Complex64 },
}

pub type Result<T> = std::result::Result<T, Error>;

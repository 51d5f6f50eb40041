use thiserror::Error;

/// Errors raised by the library. Validation failures that are expected to be
/// inspected (axiom checks, d² checks) are reported through [`crate::report::Report`]
/// instead.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("matrix dimensions do not match: {0}")]
    DimensionMismatch(String),
    #[error("composite of consecutive boundary maps is nonzero")]
    CompositionNonzero,
    #[error("invalid range: upper {upper} must exceed lower {lower}")]
    InvalidRange { upper: i64, lower: i64 },
    #[error("index mismatch: {0}")]
    IndexMismatch(String),
    #[error("the basepoint has no stratum")]
    InfinityHasNoStratum,
    #[error("invalid corner complex: {0}")]
    InvalidComplex(String),
    #[error("missing moduli data for {from} -> {to}")]
    MissingModuliData { from: String, to: String },
    #[error("invalid flow category: {0}")]
    InvalidCategory(String),
    #[error("boundary does not square to zero at {0}")]
    DSquaredNonzero(String),
    #[error("unknown object `{0}`")]
    UnknownObject(String),
    #[error("shift L = {shift} is below the admissible minimum {min}")]
    ShiftTooSmall { shift: i64, min: i64 },
    #[error("differential has the wrong bidegree or shape: {0}")]
    BidegreeMismatch(String),
    #[error("supplied map does not square to zero: {0}")]
    NotADifferential(String),
    #[error("boundary raises filtration: {0}")]
    NotFiltered(String),
    #[error("map is not a chain map: {0}")]
    NotAChainMap(String),
    #[error("degenerate critical point at {location:?} (smallest |eigenvalue| {smallest:e})")]
    DegenerateCriticalPoint { location: Vec<f64>, smallest: f64 },
    #[error("trajectory exceeded {0} steps")]
    MaxStepsExceeded(usize),
    #[error("trajectory left the chart domain at {0:?}")]
    LeftChartDomain(Vec<f64>),
    #[error("could not separate connecting orbits: {0}")]
    UnresolvedBoundary(String),
    #[error("perturbation too small: {0}")]
    PerturbationTooSmall(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("i/o error: {0}")]
    Io(String),
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;

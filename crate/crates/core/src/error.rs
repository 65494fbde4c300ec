use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("empty domain")]
    EmptyDomain,

    #[error("invalid samples: {0}")]
    InvalidSamples(String),

    #[error("domain smaller than support ({domain} < {support})")]
    DomainSmallerThanSupport { domain: f64, support: f64 },

    #[error("total measures differ ({0} vs {1})")]
    MeasureMismatch(f64, f64),

    #[error("empty ball family")]
    EmptyFamily,

    #[error("ball centred at ({cx}, {cy}) with radius {r} leaves the domain")]
    BallOutsideDomain { cx: f64, cy: f64, r: f64 },

    #[error("radius {r} out of range (0, {r_max}]")]
    RadiusOutOfRange { r: f64, r_max: f64 },

    #[error("curvature at pole requires limit")]
    CurvatureAtPole,

    #[error("degenerate metric at r = {0}")]
    DegenerateMetric(f64),

    #[error("invalid metric: {0}")]
    InvalidMetric(String),

    #[error("empty radii list")]
    EmptyRadii,

    #[error("r_max {r_max} too small for the ladder (rho = {rho})")]
    LadderTooLarge { rho: f64, r_max: f64 },

    #[error("at least 3 resolutions required")]
    TooFewResolutions,

    #[error("resolutions must increase")]
    ResolutionsNotIncreasing,

    #[error("case has no exact solution")]
    NoExactSolution,

    #[error("k must exceed 10 (got {0})")]
    KTooSmall(u32),

    #[error("rho0 = {0} outside (0, 1/2)")]
    Rho0OutOfRange(f64),

    #[error("f must have zero mean (integral {0})")]
    NotMeanZero(f64),

    #[error("boundary values must vanish (max |u| on boundary {0})")]
    NonzeroBoundary(f64),

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("field does not match grid ({0})")]
    GridMismatch(String),

    #[error("invalid case: {0}")]
    InvalidCase(String),

    #[error("solver did not converge (residual {residual:.3e} after {iterations} iterations)")]
    NotConverged { residual: f64, iterations: usize },

    #[error("nothing to report")]
    NothingToReport,

    #[error("unknown format {0}")]
    UnknownFormat(String),

    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },

    #[error("{context}: {source}")]
    Json {
        context: String,
        #[source]
        source: serde_json::Error,
    },

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

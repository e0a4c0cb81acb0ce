use thiserror::Error;

/// Errors raised across the crate.
///
/// Variants split into two families: input problems (bad spec, bad grid,
/// bad arguments) and numerical failures (non-finite propagation, singular
/// solves, unitarity or anchoring violations). [`ScatterError::is_numerical`]
/// tells them apart; the CLI maps the two families to distinct exit codes.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum ScatterError {
    #[error("matrix {which} is not symmetric: entry ({row},{col}) differs from its transpose by {asymmetry:e}")]
    NonSymmetricMatrix {
        which: String,
        row: usize,
        col: usize,
        asymmetry: f64,
    },
    #[error("{what} at {position} lies outside the support [-{range}, {range}]")]
    SupportOutsideRange {
        what: String,
        position: f64,
        range: f64,
    },
    #[error("segments [{a_lo}, {a_hi}) and [{b_lo}, {b_hi}) overlap")]
    OverlappingSegments {
        a_lo: f64,
        a_hi: f64,
        b_lo: f64,
        b_hi: f64,
    },
    #[error("{what} has dimension {found}, expected {expected}")]
    DimensionMismatch {
        what: String,
        expected: usize,
        found: usize,
    },
    #[error("invalid potential: {0}")]
    InvalidPotential(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("symmetric eigensolver did not converge")]
    ConvergenceFailure,
    #[error("propagated state became non-finite or exceeded 1e150 at x = {x}")]
    NonFiniteState { x: f64 },
    #[error("core matrix D(k) is numerically singular at k = {k} (condition estimate {condition:e})")]
    SingularCore { k: f64, condition: f64 },
    #[error("strength matrix is not invertible; use the factorization path")]
    SingularStrength,
    #[error("threshold extrapolation unstable: {0}")]
    ExtrapolationUnstable(String),
    #[error("transmission matrix is singular at k = {k} (condition estimate {condition:e})")]
    SingularTransmission { k: f64, condition: f64 },
    #[error("transfer factor block {block} is singular")]
    SingularBlock { block: &'static str },
    #[error("factors carry different wavenumbers ({first} vs {other})")]
    MixedWavenumbers { first: f64, other: f64 },
    #[error("cell support of width {width} does not fit the spacing {spacing}")]
    OverlappingCells { width: f64, spacing: f64 },
    #[error("S matrix is not unitary (residual {residual:e})")]
    NonUnitaryInput { residual: f64 },
    #[error("phase grid too coarse near k = {k}: unwrap step {step}")]
    GridTooCoarse { k: f64, step: f64 },
    #[error("phase anchor not converged: |eta({k})| = {eta}")]
    AnchorNotConverged { k: f64, eta: f64 },
    #[error("non-finite value in output column {column}")]
    NonFiniteOutput { column: String },
    #[error("io: {0}")]
    Io(String),
}

impl ScatterError {
    /// Short machine-readable tag, used in CLI error lines.
    pub fn kind(&self) -> &'static str {
        match self {
            ScatterError::NonSymmetricMatrix { .. } => "NonSymmetricMatrix",
            ScatterError::SupportOutsideRange { .. } => "SupportOutsideRange",
            ScatterError::OverlappingSegments { .. } => "OverlappingSegments",
            ScatterError::DimensionMismatch { .. } => "DimensionMismatch",
            ScatterError::InvalidPotential(_) => "InvalidPotential",
            ScatterError::InvalidArgument(_) => "InvalidArgument",
            ScatterError::ConvergenceFailure => "ConvergenceFailure",
            ScatterError::NonFiniteState { .. } => "NonFiniteState",
            ScatterError::SingularCore { .. } => "SingularCore",
            ScatterError::SingularStrength => "SingularStrength",
            ScatterError::ExtrapolationUnstable(_) => "ExtrapolationUnstable",
            ScatterError::SingularTransmission { .. } => "SingularTransmission",
            ScatterError::SingularBlock { .. } => "SingularBlock",
            ScatterError::MixedWavenumbers { .. } => "MixedWavenumbers",
            ScatterError::OverlappingCells { .. } => "OverlappingCells",
            ScatterError::NonUnitaryInput { .. } => "NonUnitaryInput",
            ScatterError::GridTooCoarse { .. } => "GridTooCoarse",
            ScatterError::AnchorNotConverged { .. } => "AnchorNotConverged",
            ScatterError::NonFiniteOutput { .. } => "NonFiniteOutput",
            ScatterError::Io(_) => "Io",
        }
    }

    pub fn is_numerical(&self) -> bool {
        !matches!(
            self,
            ScatterError::NonSymmetricMatrix { .. }
                | ScatterError::SupportOutsideRange { .. }
                | ScatterError::OverlappingSegments { .. }
                | ScatterError::DimensionMismatch { .. }
                | ScatterError::InvalidPotential(_)
                | ScatterError::InvalidArgument(_)
                | ScatterError::OverlappingCells { .. }
                | ScatterError::Io(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, ScatterError>;

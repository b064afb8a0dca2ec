use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invariant mass of an empty group is undefined")]
    EmptyGroup,
    #[error("total 4-momentum is spacelike (m²c⁴/ε² = {radicand_ratio:e}); input is not physical")]
    SpacelikeTotal { radicand_ratio: f64 },
    #[error("mass energy {rest_energy:e} J exceeds total energy {total_energy:e} J")]
    MassExceedsEnergy { rest_energy: f64, total_energy: f64 },
    #[error("boost speed |β| = {beta} must be below 1")]
    SuperluminalBoost { beta: f64 },
    #[error("a massless group has no rest frame")]
    MasslessGroup,
    #[error("invalid physical input: {0}")]
    InvalidInput(String),

    #[error("invalid configuration: {0}")]
    ConfigInvalid(String),
    #[error("missing required configuration key `{0}`")]
    MissingKey(String),

    #[error(
        "quadrature did not converge: error {error:e} above tolerance {tolerance:e} \
         after {subdivisions} subdivisions"
    )]
    NonConvergence {
        error: f64,
        tolerance: f64,
        subdivisions: usize,
    },
    #[error("the first sinc² moment diverges; a cutoff x_max is required")]
    MissingCutoff,

    #[error(
        "grid too coarse: spacing {spacing:e} resolves the narrowest width {width:e} with only \
         {samples:.1} samples (need {required}); increase the point count"
    )]
    GridTooCoarse {
        spacing: f64,
        width: f64,
        samples: f64,
        required: usize,
    },
    #[error(
        "distribution not contained in the grid: edge density is {edge_ratio:e} of peak; \
         increase the grid extent"
    )]
    WidthHitsBoundary { edge_ratio: f64 },
    #[error(
        "Schmidt number not converged: {previous} → {latest} between {points} and {} points \
         (limit reached)", points * 2
    )]
    NotConverged {
        previous: f64,
        latest: f64,
        points: usize,
    },
    #[error("kernel has zero norm on its grid")]
    NonNormalizable,

    #[error("invalid sweep axis: {0}")]
    InvalidAxis(String),
    #[error("i/o error: {0}")]
    Io(String),
}

impl Error {
    /// Numerical failures, as opposed to bad input.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::NonConvergence { .. } | Error::NotConverged { .. } | Error::NonNormalizable
        )
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

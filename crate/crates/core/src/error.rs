use thiserror::Error;

/// Which edge of the propagative band a frequency fell on or beyond.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BandEdge {
    Lower,
    Upper,
}

impl std::fmt::Display for BandEdge {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            BandEdge::Lower => f.write_str("lower"),
            BandEdge::Upper => f.write_str("upper"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("frequency {omega} is outside the propagative band ({lo}, {hi}) at the {edge} edge")]
    OutOfBand {
        omega: f64,
        lo: f64,
        hi: f64,
        edge: BandEdge,
    },
    #[error("slowness {alpha} admits no stationary frequency (front slowness is {alpha_s})")]
    NoStationaryPoint { alpha: f64, alpha_s: f64 },
    #[error("slowness {alpha} is within the caustic guard of {alpha_s}; use the front formula")]
    NearCaustic { alpha: f64, alpha_s: f64 },
    #[error("invalid parameter `{field}`: {reason}")]
    InvalidParameter { field: &'static str, reason: String },
    #[error("mass at site {site} is {mass}, masses must be positive")]
    NonPositiveMass { site: i64, mass: f64 },
    #[error(
        "radius {radius} is too small, at least {required} is needed to contain the light cone"
    )]
    Causality { radius: i64, required: i64 },
    #[error("linear system is singular to working precision (pivot ratio {pivot_ratio:e})")]
    Singular { pivot_ratio: f64 },
    #[error("{0}")]
    Domain(String),
    #[error("realization {index} failed: {source}")]
    Realization {
        index: u64,
        #[source]
        source: Box<Error>,
    },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(field: &'static str, reason: impl Into<String>) -> Error {
    Error::InvalidParameter {
        field,
        reason: reason.into(),
    }
}

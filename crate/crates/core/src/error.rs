use std::path::PathBuf;

use thiserror::Error;

use crate::belief_map::CellIndex;

#[derive(Debug, Error)]
pub enum Error {
    #[error("probability {0} outside [0, 1]")]
    ProbabilityDomain(f64),

    #[error("baseline entropy must be positive, got {0}")]
    EntropyDomain(f64),

    #[error("cell ({}, {}) is outside the grid", .0.col, .0.row)]
    OutOfBounds(CellIndex),

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("invalid sensor model: {0}")]
    InvalidSensor(String),

    #[error("camera frustum grazes the horizon (upper edge {0:.6} rad below horizontal)")]
    GrazingFootprint(f64),

    #[error("degenerate geometry: {0}")]
    DegenerateGeometry(&'static str),

    #[error("trajectory is empty")]
    EmptyTrajectory,

    #[error("waypoint index {index} out of range for a plan of {len} waypoints")]
    WaypointOutOfRange { index: usize, len: usize },

    #[error("config error at `{path}`: {message}")]
    Config { path: String, message: String },

    #[error("parse error in {what} at line {line}: {message}")]
    Parse {
        what: &'static str,
        line: usize,
        message: String,
    },

    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn config(path: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Config {
            path: path.into(),
            message: message.into(),
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

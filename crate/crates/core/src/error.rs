use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("{function} is undefined at x = {argument}")]
    Domain {
        function: &'static str,
        argument: f64,
    },

    #[error("point ({x}, {y}) lies within {tolerance:e} of an interface")]
    AmbiguousPoint { x: f64, y: f64, tolerance: f64 },

    #[error("volume mesh has {nodes} interior nodes, at least {required} are needed")]
    MeshTooCoarse { nodes: usize, required: usize },

    #[error("source and target curves are {distance:e} apart")]
    SingularGeometry { distance: f64 },

    #[error(
        "system condition estimate {estimate:e} exceeds {threshold:e}; the configuration is \
         close to an interior resonance (k2^2 must not be a Neumann eigenvalue of \
         the interior problem)"
    )]
    IllConditioned { estimate: f64, threshold: f64 },

    #[error("series mode {order} is resonant (condition estimate {condition:e})")]
    ModeSystemSingular { order: i64, condition: f64 },

    #[error("invalid input: {0}")]
    InvalidInput(String),
}

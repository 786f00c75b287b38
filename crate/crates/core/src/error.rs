use thiserror::Error;

/// Errors produced by the geometry kernel, the generators and the searches.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("degenerate input: {0}")]
    DegenerateInput(String),

    #[error("bad parameter: {0}")]
    BadParameter(String),

    #[error("no convergence: {0}")]
    NoConvergence(String),

    #[error("point ({x}, {y}) is not on the polygon boundary (distance {distance:e})")]
    NotOnBoundary { x: f64, y: f64, distance: f64 },

    #[error("generation failed after {attempts} rejections")]
    GenerationFailed { attempts: usize },

    #[error("empty cohort: no body has deficit below {delta}")]
    EmptyCohort { delta: f64 },

    #[error("no feasible seed shape for R = {radius}")]
    NoFeasibleSeed { radius: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;

use num_complex::Complex64;
use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("inadmissible parameters: {0}")]
    Inadmissible(String),

    #[error("pole: F evaluated at {0}")]
    Pole(Complex64),

    #[error("root solver did not converge after {iterations} iterations on {polynomial}")]
    NonConvergence { polynomial: String, iterations: usize },

    #[error("root tracks collided at step {step} (t = {t:.6}); perturb the path radius")]
    TrackCollision { step: usize, t: f64 },

    #[error("continuation failed to close the loop: {0}")]
    LoopMismatch(String),

    #[error("winding number undefined: {0}")]
    Winding(String),

    #[error("region construction failed: {0}")]
    Construction(String),

    #[error("sampling too coarse: {0}")]
    Sampling(String),

    #[error("i/o error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },

    #[error("image encoding error on {path}: {message}")]
    Encode { path: String, message: String },
}

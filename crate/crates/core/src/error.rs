use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid spline space: {0}")]
    InvalidSpace(String),
    #[error("parameter {0} outside [0, 1]")]
    OutOfDomain(f64),
    #[error("singular parametric-to-arc-length jacobian at u = {u}")]
    SingularJacobian { u: f64 },
    #[error("singular matrix: {0}")]
    Singular(String),
    #[error("multicorrector diverged: residual grew for 3 consecutive passes (pass {pass})")]
    Diverged { pass: usize },
    #[error("power iteration did not converge in {iterations} iterations")]
    NoConvergence { iterations: usize },
    #[error("newton iteration did not converge in {iterations} iterations (residual {residual:e})")]
    NewtonFailed { iterations: usize, residual: f64 },
    #[error("step {step} (t = {time:e} s): {source}")]
    Step {
        step: usize,
        time: f64,
        #[source]
        source: Box<Error>,
    },
    #[error("non-finite state at step {step} (t = {time:e} s)")]
    NonFinite { step: usize, time: f64 },
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Toml(#[from] toml::de::Error),
    #[error(transparent)]
    TomlSer(#[from] toml::ser::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

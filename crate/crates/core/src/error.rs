use std::path::PathBuf;

/// Everything that can go wrong inside the lab.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error(
        "quadrature did not converge: estimate {estimate:e}, error {error:e} after {panels} panels"
    )]
    Quadrature {
        estimate: f64,
        error: f64,
        panels: usize,
    },
    #[error("non-finite integrand at x = {at}")]
    NonFinite { at: f64 },
    #[error("ODE integration failed at s = {at}: {reason}")]
    Ode { at: f64, reason: String },
    #[error("unknown {kind} label `{label}`")]
    UnknownLabel { kind: &'static str, label: String },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("Lax admissibility violated: {0}")]
    Lax(String),
    #[error("no cavitating solution: {0}")]
    NoCavitation(String),
    #[error("sonic degeneracy at s = {s}")]
    Sonic { s: f64 },
    #[error("profile invariant violated: {0}")]
    Invariant(String),
    #[error("extrapolation failed: {0}")]
    Extrapolation(String),
    #[error("root finding failed: {0}")]
    Root(String),
    #[error("kernel `{0}` has phi(0) = 0; the radial construction needs phi(0) > 0")]
    DegenerateKernel(String),
    #[error("config: {0}")]
    Config(String),
    #[error("missing artifact {0}")]
    MissingArtifact(PathBuf),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    TomlDe(#[from] toml::de::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("energy step {dw} does not divide the phonon energy {gamma} (ratio {ratio})")]
    MisalignedEnergyGrid { gamma: f64, dw: f64, ratio: f64 },

    #[error("invalid material parameter: {0}")]
    InvalidMaterial(String),

    #[error("invalid boundary setup: {0}")]
    InvalidBoundary(String),

    #[error("reflection is purely specular; the diffusive normalisation is undefined")]
    PurelySpecular,

    #[error("cell ({i}, {j}) has non-positive density {rho}")]
    NonPositiveDensity { i: usize, j: usize, rho: f64 },

    #[error("Poisson system is singular: {0}")]
    SingularPoisson(String),

    #[error("non-finite coefficient at spatial cell ({i}, {j}), momentum cell ({k}, {m}, {n})")]
    NonFinite {
        i: usize,
        j: usize,
        k: usize,
        m: usize,
        n: usize,
    },

    #[error("time stepping failed: {0}")]
    Step(String),

    #[error("config error at `{path}`: {message}")]
    Config { path: String, message: String },

    #[error("{context}: {source}")]
    Io {
        context: String,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub fn config(path: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Config {
            path: path.into(),
            message: message.into(),
        }
    }

    pub fn io(context: impl Into<String>, source: std::io::Error) -> Self {
        Error::Io {
            context: context.into(),
            source,
        }
    }
}

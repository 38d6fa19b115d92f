use thiserror::Error;

pub type HarnessResult<T> = std::result::Result<T, HarnessError>;

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("config error: {0}")]
    Config(String),

    #[error(transparent)]
    Core(#[from] unipers::Error),

    #[error("stage '{stage}' failed for seed {seed}: {source}")]
    Stage {
        stage: &'static str,
        seed: u64,
        #[source]
        source: Box<HarnessError>,
    },

    #[error("i/o error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

impl HarnessError {
    pub fn io(path: impl AsRef<std::path::Path>, source: std::io::Error) -> Self {
        HarnessError::Io { path: path.as_ref().display().to_string(), source }
    }

    /// 2 for configuration problems, 3 for bad data, 4 for numerical failures.
    pub fn exit_code(&self) -> i32 {
        use unipers::Error as E;
        match self {
            HarnessError::Config(_) => 2,
            HarnessError::Io { .. } => 3,
            HarnessError::Stage { source, .. } => source.exit_code(),
            HarnessError::Core(e) => match e {
                E::Parameter(_) | E::UnsupportedDegree(_) => 2,
                E::Input(_)
                | E::Parse { .. }
                | E::Degenerate(_)
                | E::Structural(_)
                | E::InfinitePairs(_)
                | E::InsufficientData(_)
                | E::Io(_) => 3,
                E::Integration { .. } | E::Domain(_) | E::NonTermination(_) => 4,
            },
        }
    }
}

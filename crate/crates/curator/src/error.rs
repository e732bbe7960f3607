use std::fmt::Display;
use std::path::Path;

/// Pipeline failure, grouped by the exit code it maps to.
#[derive(Debug, thiserror::Error)]
pub enum CuratorError {
    /// Bad plan, flags or settings.
    #[error("config error: {0}")]
    Config(String),
    /// Missing, malformed or insufficient input data.
    #[error("data error: {0}")]
    Data(String),
    /// Training produced non-finite values.
    #[error("numerical divergence: {0}")]
    Divergence(String),
}

impl CuratorError {
    pub fn config(msg: impl Display) -> Self {
        Self::Config(msg.to_string())
    }

    pub fn data(msg: impl Display) -> Self {
        Self::Data(msg.to_string())
    }

    pub fn io(path: &Path, err: impl Display) -> Self {
        Self::Data(format!("{}: {err}", path.display()))
    }

    pub fn exit_code(&self) -> u8 {
        match self {
            CuratorError::Config(_) => 1,
            CuratorError::Data(_) => 2,
            CuratorError::Divergence(_) => 3,
        }
    }
}

pub type Result<T> = std::result::Result<T, CuratorError>;

impl From<curator_core::discriminator::DiscriminatorError> for CuratorError {
    fn from(e: curator_core::discriminator::DiscriminatorError) -> Self {
        use curator_core::discriminator::DiscriminatorError as E;
        match e {
            E::NonFiniteLoss { .. } => Self::Divergence(e.to_string()),
            E::InvalidConfig(_) | E::InvalidDims(_) => Self::Config(e.to_string()),
            E::EmptyClass(_) | E::DimensionMismatch { .. } => Self::Data(e.to_string()),
        }
    }
}

impl From<curator_core::toy::ToyError> for CuratorError {
    fn from(e: curator_core::toy::ToyError) -> Self {
        use curator_core::toy::ToyError as E;
        match e {
            E::Diverged { .. } => Self::Divergence(e.to_string()),
            E::InvalidConfig(_) => Self::Config(e.to_string()),
            E::Wilss(_) | E::BadSample { .. } => Self::Data(e.to_string()),
        }
    }
}

impl From<curator_core::wilss::WilssError> for CuratorError {
    fn from(e: curator_core::wilss::WilssError) -> Self {
        Self::Data(e.to_string())
    }
}

impl From<curator_core::semfilter::WordnetError> for CuratorError {
    fn from(e: curator_core::semfilter::WordnetError) -> Self {
        use curator_core::semfilter::WordnetError as E;
        match e {
            E::InvalidConfig(_) => Self::Config(e.to_string()),
            _ => Self::Data(e.to_string()),
        }
    }
}

impl From<curator_core::lexicon::LexiconError> for CuratorError {
    fn from(e: curator_core::lexicon::LexiconError) -> Self {
        Self::Data(e.to_string())
    }
}

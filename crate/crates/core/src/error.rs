use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("unknown family `{0}`")]
    UnknownFamily(String),
    #[error("family `{0}` is documentation only and has no oracle")]
    DocumentationOnly(String),
    #[error("unknown preset `{preset}` for family `{family}`")]
    UnknownPreset { family: String, preset: String },
    #[error("budget exhausted in stage `{stage}`: {detail}")]
    BudgetExhausted { stage: String, detail: String },
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("invariant violated: {0}")]
    Invariant(String),
    #[error("duality violation: {0}")]
    Duality(String),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub fn exhausted(stage: &str, detail: impl Into<String>) -> Self {
        Error::BudgetExhausted { stage: stage.to_owned(), detail: detail.into() }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

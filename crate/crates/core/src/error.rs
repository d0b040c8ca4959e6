use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("budget exceeded: {what} (limit {limit}, requested {requested})")]
    Budget {
        what: &'static str,
        limit: usize,
        requested: usize,
    },

    #[error("class has no valid block at n = {n}")]
    EmptyClass { n: u32 },

    #[error("no class member is consistent with the history at n = {n}")]
    InconsistentHistory { n: u32 },

    #[error("gale table is missing the entry for prefix {prefix:?}")]
    IncompleteGale { prefix: String },

    #[error("contract violation: {0}")]
    Contract(String),

    #[error("parse error: {0}")]
    Parse(String),
}

impl Error {
    pub(crate) fn budget(what: &'static str, limit: usize, requested: usize) -> Self {
        Error::Budget {
            what,
            limit,
            requested,
        }
    }
}

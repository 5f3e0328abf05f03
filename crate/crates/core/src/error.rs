use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// A requested table or enumeration exceeds its configured budget.
    #[error("{what}: requested {requested} exceeds budget {budget}")]
    Capacity {
        what: &'static str,
        requested: u128,
        budget: u128,
    },

    #[error("domain error: {0}")]
    Domain(String),

    /// An instance outside the regime of the bound or inequality being checked.
    #[error("rejected instance: {0}")]
    Rejected(String),

    #[error("structural mismatch: {0}")]
    Structural(String),

    #[error("unsupported structure: {0}")]
    Unsupported(String),

    #[error("unknown variable `{0}`")]
    UnknownVariable(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("degenerate fit: {0}")]
    DegenerateFit(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub fn check_budget(what: &'static str, requested: u128, budget: u128) -> Result<()> {
    if requested > budget {
        Err(Error::Capacity {
            what,
            requested,
            budget,
        })
    } else {
        Ok(())
    }
}

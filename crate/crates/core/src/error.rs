use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("size limit exceeded: {what} = {got} (max {max})")]
    SizeLimit { what: &'static str, got: usize, max: usize },
    #[error("did not converge: {0}")]
    Convergence(String),
    #[error("schedule error: {0}")]
    Schedule(String),
    #[error("verification failed: {0}")]
    Verification(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}

pub(crate) fn precondition<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Precondition(msg.into()))
}

pub(crate) fn check_size(what: &'static str, got: usize, max: usize) -> Result<()> {
    if got > max {
        Err(Error::SizeLimit { what, got, max })
    } else {
        Ok(())
    }
}

use alloc::string::String;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    /// An argument is outside the domain where the quantity is defined.
    #[error("domain error: {0}")]
    Domain(String),

    /// A network or simulation configuration is unusable.
    #[error("invalid configuration: {0}")]
    Config(String),

    /// A quadrature or series did not reach its tolerance. `partial` is the
    /// best estimate available when the budget ran out.
    #[error("numerical failure in {context}: {reason} (partial result {partial:e})")]
    Numerical {
        context: String,
        reason: String,
        partial: f64,
    },
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn config(msg: impl Into<String>) -> Self {
        Error::Config(msg.into())
    }

    pub(crate) fn numerical(context: impl Into<String>, reason: impl Into<String>, partial: f64) -> Self {
        Error::Numerical {
            context: context.into(),
            reason: reason.into(),
            partial,
        }
    }

    /// Prefixes the context of a numerical failure, leaving other kinds alone.
    pub fn within(self, outer: &str) -> Self {
        match self {
            Error::Numerical {
                context,
                reason,
                partial,
            } => Error::Numerical {
                context: alloc::format!("{outer}: {context}"),
                reason,
                partial,
            },
            other => other,
        }
    }
}

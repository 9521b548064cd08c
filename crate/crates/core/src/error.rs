use thiserror::Error;

/// Constraint that can empty the feasible set of the full problem.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, serde::Serialize)]
pub enum Constraint {
    OneOffPd,
    CumulativePc,
    LsMax,
    RfMax,
    VariableBound,
}

impl std::fmt::Display for Constraint {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let name = match self {
            Constraint::OneOffPd => "one-off detection probability (P_d,des)",
            Constraint::CumulativePc => "cumulative detection probability (P_c,des)",
            Constraint::LsMax => "maximum search load (L_s,max)",
            Constraint::RfMax => "maximum frame time ratio (r_f,max)",
            Constraint::VariableBound => "design variable bounds",
        };
        f.write_str(name)
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("infeasible: {constraint}: {detail}")]
    Infeasible { constraint: Constraint, detail: String },

    #[error("no convergence: {what} (achieved error estimate {estimate:e})")]
    NoConvergence { what: &'static str, estimate: f64 },

    #[error("configuration error: {0}")]
    Config(String),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn infeasible(constraint: Constraint, detail: impl Into<String>) -> Self {
        Error::Infeasible {
            constraint,
            detail: detail.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;

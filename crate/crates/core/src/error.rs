use thiserror::Error;

/// Errors produced by the simulation library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument lies outside the domain of the operation.
    #[error("domain error: {what} = {value} ({expected})")]
    Domain {
        what: &'static str,
        value: f64,
        expected: &'static str,
    },

    /// A configuration is inconsistent with the requested operation.
    #[error("configuration error: {0}")]
    Config(String),

    /// The X-state parameters do not describe a positive semidefinite matrix.
    #[error("unphysical X state (c1={c1}, c2={c2}, c3={c3}): violates {inequality}")]
    Unphysical {
        c1: f64,
        c2: f64,
        c3: f64,
        inequality: &'static str,
    },

    /// A density matrix failed one of its structural invariants.
    #[error("invariant violation: {0}")]
    Invariant(String),

    #[error("quadrature did not converge: value {value}, error estimate {error_estimate} > requested {requested}")]
    QuadratureNonConvergence {
        value: f64,
        error_estimate: f64,
        requested: f64,
    },

    #[error("root finding failed: {0}")]
    RootFinding(String),

    /// The amplification rate is undefined when the initial discord vanishes.
    #[error("undefined rate: initial discord {initial} is not positive")]
    UndefinedRate { initial: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain(what: &'static str, value: f64, expected: &'static str) -> Error {
    Error::Domain {
        what,
        value,
        expected,
    }
}

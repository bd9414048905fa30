//! Dephasing, correlations, sudden-change times and speed limits for two
//! qubits in a common squeezed reservoir.

pub mod bath;
pub mod correlations;
pub mod dynamics;
pub mod error;
pub mod qsl;
pub mod quadrature;
pub mod states;

pub use error::{Error, Result};

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/bath.md")]
    mod bath {}
    #[doc = include_str!("../../../book/src/states.md")]
    mod states {}
    #[doc = include_str!("../../../book/src/correlations.md")]
    mod correlations {}
    #[doc = include_str!("../../../book/src/dynamics.md")]
    mod dynamics {}
    #[doc = include_str!("../../../book/src/qsl.md")]
    mod qsl {}
}

//! Linearized atom–cavity–mirror steady states: Gaussian covariance matrices,
//! entanglement, phase-space Mermin–Klyshko nonlocality and the Wigner
//! negativity of the mirror after Geiger detection.
//!
//! The guide in `book/` walks through each piece; its code listings run as
//! doc tests of this crate.

pub mod dynamics;
pub mod error;
pub mod gaussian;
pub mod model;
pub mod nonclassicality;
pub mod nonlocality;
pub mod quadrature;
pub mod scenario;
pub mod units;

pub use error::{Error, Result};

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/operating-point.md")]
    mod operating_point {}
    #[doc = include_str!("../../../book/src/covariance.md")]
    mod covariance {}
    #[doc = include_str!("../../../book/src/entanglement.md")]
    mod entanglement {}
    #[doc = include_str!("../../../book/src/nonlocality.md")]
    mod nonlocality {}
    #[doc = include_str!("../../../book/src/conditioning.md")]
    mod conditioning {}
    #[doc = include_str!("../../../book/src/scenarios.md")]
    mod scenarios {}
}

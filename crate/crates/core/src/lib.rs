//! Numerical laboratory for quantum SU(2), the Podles-sphere coideal cut out
//! by a twisted primitive element, and the generating functional obtained
//! from the principal-series limit.

pub mod error;
pub mod qcore;
pub mod genfun;
pub mod gnslab;
pub mod oqalg;
pub mod uqrep;

pub use error::{Error, Result};

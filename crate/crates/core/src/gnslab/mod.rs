//! GNS-type construction from the generating functional: Gram data, cocycle
//! vectors, the representation `pi_L`, growth tables and the Gaussian-part
//! rank test.

mod gaussian;
mod gram;
mod growth;

pub use gaussian::{gaussian_rank, GaussianReport};
pub use gram::{coefficient, coideal_elements, form_general, gram_matrix, BasisElement, GnsSpace, LForm};
pub use growth::{growth_table, GrowthDegree, GrowthTable};

//! `O_q(SU(2))` in the Peter-Weyl picture: products through Clebsch-Gordan
//! isometries, the star, counit, Haar state, torus character, the actions of
//! `U_q(su(2))`, and the Podles-sphere coideal basis.

pub mod element;
pub mod podles;

pub use element::{generators, random_element, AlgElement, Gen, Generators, Side, Word};
pub use podles::{coideal_membership, podles_basis, twisted_left_membership, PodlesBasisIndex};

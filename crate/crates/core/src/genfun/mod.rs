//! Askey-Wilson polynomials attached to the spherical vectors, and the
//! generating functional they produce.

pub mod askey;
pub mod functional;

pub use askey::{eval_in_algebra, omega_argument, omega_value, p_poly, q_closed_form, q_poly, q_poly_fourier, theta_grid, OmegaValue, QPolyReport, RouteVerdict};
pub use functional::{build_functional, fd_limit, sph_coefficient, DegreeData, GenFunctional, LimitMode};

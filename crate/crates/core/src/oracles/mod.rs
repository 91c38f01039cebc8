//! Independent checks on the closed form: direct numerical integration of
//! the defining expectation, and a Monte-Carlo ensemble of the multipath
//! channel it is derived from. Neither path touches [`crate::correlation`].

pub mod montecarlo;
pub mod quadrature;

pub use montecarlo::{build_ensemble, scf_montecarlo, transfer_function, MonteCarloEstimate, MultipathEnsemble};
pub use quadrature::{pdf_mass, scf_quadrature, QuadratureEstimate, QuadratureSpec};

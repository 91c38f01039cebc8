//! Spatial and temporal correlation functions for wireless channels whose
//! scatterers follow a von Mises-Fisher distribution.
//!
//! The crate evaluates the exact closed-form correlation, verifies it against
//! independent numerical oracles and applies it to antenna arrays and to
//! fluctuating radar targets.

pub mod arrays;
pub mod correlation;
pub mod error;
pub mod oracles;
pub mod radar;
pub mod special;
pub mod vmf;

pub use nalgebra;
pub use num_complex::Complex64;

pub use correlation::{
    acf, acf_multicluster, decorrelation_time, doppler_params, scf, scf_argument, scf_exact, scf_isotropic,
    scf_large_kappa, scf_multicluster, DecorrelationOptions, Displacement, DopplerParams, MotionState, ScfArgument,
};
pub use error::{Error, Result};
pub use special::csinc_sqrt;
pub use vmf::{direction_from_angles, kappa_from_angular_width, sample_vmf, vmf_pdf, Direction, VmfCluster};

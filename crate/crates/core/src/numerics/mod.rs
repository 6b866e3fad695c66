//! Special functions, quadrature, Matsubara sums and determinants shared by
//! the physics modules.

pub mod bessel;
pub mod linalg;
pub mod matsubara;
pub mod quadrature;
pub mod sum;
pub mod wigner;

pub use bessel::{
    ln_modified_spherical_bessel_i, ln_modified_spherical_bessel_k, modified_spherical_bessel_i,
    modified_spherical_bessel_k, BesselSequence,
};
pub use linalg::{log_det_one_minus_minors, log_det_one_minus};
pub use matsubara::{matsubara_sum, matsubara_sum_vec, MatsubaraGrid, MatsubaraSum};
pub use quadrature::{
    integrate_interval, integrate_interval_vec, integrate_semiinfinite, integrate_semiinfinite_vec,
    integrate_semiinfinite_with, QuadratureOptions, QuadratureResult,
};
pub use sum::{compensated_sum, CompensatedSum};

//! Special functions and numerical kernels.

pub mod bessel;
pub mod eigen;
pub mod elliptic;
pub mod quad;
pub mod structure;

pub use bessel::{bessel_j, bessel_j_all, bessel_j_int, bessel_j_symmetric};
pub use eigen::{hermitian_eig, Eigh};
pub use elliptic::{elliptic_e, elliptic_k};
pub use quad::{integrate, Quadrature};
pub use structure::{s_ph_analytic, s_ph_quadrature, s_ph_reduced, Gap, StructureFactorKind};

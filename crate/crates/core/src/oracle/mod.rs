//! Independent ground truth: direct quadrature of the loaded integrals,
//! numerical residue sums, and the classical Gauss coefficients for n = 1.

mod domains;
mod gauss;
mod quadrature;
mod residues;

pub use domains::{
    check_integrability, default_schedule, default_tolerance, integrate_loaded_domain, integrate_loaded_domain_with,
    BranchFixing, DomainSpec, Family,
    INTEGRABILITY_MARGIN,
};
pub use gauss::{gauss_reference, GaussTarget};
pub use quadrature::{integrate_cube, CubeIntegral, Node, Schedule};
pub use residues::{residue_checks, residue_sum_check, ResidueCase, ResidueCheck, POLE_SEPARATION};

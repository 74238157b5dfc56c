//! Special functions used by the closed-form results.

mod airy;
mod bessel;
mod legendre;

pub use airy::airy_ai;
pub use bessel::bessel_j;
pub use legendre::{
    legendre_conical, legendre_conical_cosh, legendre_conical_cosh_grid,
    legendre_conical_cosh_many, ln_phi_n, phi_n,
};

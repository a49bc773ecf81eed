//! Continuous-discrete Sobolev inner products, their orthonormal polynomials
//! and the banded recurrence induced by the symmetrizing polynomial.

mod band;
mod basis;
mod pi;
mod space;

pub use band::{reconstruction_residual, recurrence_coefficients, RecurrenceBand};
pub use basis::{
    compute_orthonormal_basis, compute_orthonormal_basis_with, eval_sobolev_poly,
    required_exactness, BasisOptions, SobolevBasis, SobolevPolynomial,
};
pub use pi::{build_pi_polynomial, symmetrizing_exponent, PiPolynomial};
pub use space::{sobolev_inner_product, Differentiable, InnerProduct, MassPoint, SobolevSpaceSpec};

pub(crate) use basis::dot;
pub(crate) use space::require;

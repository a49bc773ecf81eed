use serde::{Deserialize, Serialize};

use super::space::SobolevSpaceSpec;
use crate::error::Result;
use crate::poly::Poly;

/// `w_N(x) = Π_k (x - a_k)^{N*_k}` and its antiderivative `π_{N+1}` vanishing
/// at -1. Every `N*_k` is even, so `w_N >= 0` and `π_{N+1}` is nondecreasing.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PiPolynomial {
    pub exponents: Vec<usize>,
    /// `N = Σ N*_k`.
    pub total: usize,
    pub weight: Poly,
    pub pi: Poly,
}

/// `N_k + 1` for odd `N_k`, `N_k + 2` for even `N_k`.
pub fn symmetrizing_exponent(order: usize) -> usize {
    if order % 2 == 1 {
        order + 1
    } else {
        order + 2
    }
}

pub fn build_pi_polynomial(space: &SobolevSpaceSpec) -> Result<PiPolynomial> {
    space.validate()?;
    let exponents: Vec<usize> = space
        .masses
        .iter()
        .map(|m| symmetrizing_exponent(m.order))
        .collect();
    let weight = space
        .masses
        .iter()
        .zip(&exponents)
        .fold(Poly::constant(1.0), |acc, (m, &e)| {
            acc.mul(&Poly::power_of_linear(m.location, e))
        });
    let pi = weight.antiderivative(-1.0);
    Ok(PiPolynomial {
        total: exponents.iter().sum(),
        exponents,
        weight,
        pi,
    })
}

impl PiPolynomial {
    /// `N + 1`.
    pub fn degree(&self) -> usize {
        self.total + 1
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.pi.eval(x)
    }

    pub fn eval_derivative(&self, x: f64, d: usize) -> f64 {
        self.pi.eval_derivative(x, d)
    }
}

//! Dense polynomials in the monomial basis, coefficients in ascending order.

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Poly {
    coeffs: Vec<f64>,
}

impl Poly {
    pub fn new(mut coeffs: Vec<f64>) -> Self {
        while coeffs.len() > 1 && coeffs[coeffs.len() - 1] == 0.0 {
            coeffs.pop();
        }
        if coeffs.is_empty() {
            coeffs.push(0.0);
        }
        Self { coeffs }
    }

    pub fn constant(c: f64) -> Self {
        Self::new(vec![c])
    }

    /// `(x - a)^k`, expanded.
    pub fn power_of_linear(a: f64, k: usize) -> Self {
        let linear = Self::new(vec![-a, 1.0]);
        (0..k).fold(Self::constant(1.0), |acc, _| acc.mul(&linear))
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut out = vec![0.0; self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Self::new(out)
    }

    pub fn derivative(&self) -> Self {
        if self.coeffs.len() == 1 {
            return Self::constant(0.0);
        }
        Self::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, c)| k as f64 * c)
                .collect(),
        )
    }

    /// Antiderivative `P` with `P(lower) = 0`.
    pub fn antiderivative(&self, lower: f64) -> Self {
        let mut out = Vec::with_capacity(self.coeffs.len() + 1);
        out.push(0.0);
        out.extend(
            self.coeffs
                .iter()
                .enumerate()
                .map(|(k, c)| c / (k + 1) as f64),
        );
        let mut p = Self::new(out);
        let shift = p.eval(lower);
        p.coeffs[0] -= shift;
        p
    }

    /// Horner evaluation.
    pub fn eval(&self, x: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, c| acc * x + c)
    }

    /// `d`-th derivative at `x`.
    pub fn eval_derivative(&self, x: f64, d: usize) -> f64 {
        if d > self.degree() {
            return 0.0;
        }
        let mut acc = 0.0;
        for k in (d..self.coeffs.len()).rev() {
            // k! / (k-d)!
            let falling: f64 = ((k - d + 1)..=k).map(|v| v as f64).product();
            acc = acc * x + falling * self.coeffs[k];
        }
        acc
    }
}

//! Fourier-Sobolev coefficients, partial sums `S_n`, multiplier partial sums
//! `T_n(f; x; Φ) = Σ_{k<=n} φ_k c_k q̂_k(x)` and the associated kernels.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::measure::gauss_rule;
use crate::multiplier::MultiplierSequence;
use crate::report::{csv, fmt_f64};
use crate::sobolev::{dot, require, Differentiable, SobolevBasis};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExpansionCoefficients {
    pub function: String,
    /// `c_0..=c_nmax`.
    pub coeffs: Vec<f64>,
    /// Degree of `f` when it is a polynomial. Partial sums beyond it use
    /// only `c_0..=c_degree`, since the remaining coefficients vanish
    /// identically.
    pub degree: Option<usize>,
    pub quadrature_points: usize,
    pub quadrature_exactness: usize,
    /// `max_k |c_k - c_k'|` with `c'` computed on a rule with twice the
    /// nodes; zero when the integrand is a polynomial integrated exactly.
    pub error_estimate: f64,
}

impl ExpansionCoefficients {
    pub fn nmax(&self) -> usize {
        self.coeffs.len() - 1
    }

    /// Number of leading terms that enter `S_n`.
    fn terms(&self, n: usize) -> usize {
        self.degree.map_or(n, |d| n.min(d)) + 1
    }

    fn check(&self, n: usize) -> Result<()> {
        if n > self.nmax() {
            Err(Error::OutOfRange {
                index: n,
                max: self.nmax(),
            })
        } else {
            Ok(())
        }
    }

    /// `φ_k c_k` for `k <= n` (truncated at the polynomial degree).
    pub fn damped(&self, phi: &MultiplierSequence, n: usize) -> Result<Vec<f64>> {
        self.check(n)?;
        let mut out = self.coeffs[..self.terms(n)].to_vec();
        for (k, c) in out.iter_mut().enumerate() {
            *c *= phi.phi(k)?;
        }
        Ok(out)
    }

    /// CSV with columns `k, c_k, phi_k, phi_k*c_k`.
    pub fn to_csv(&self, phi: &MultiplierSequence) -> Result<String> {
        let rows = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(k, &c)| {
                let p = phi.phi(k)?;
                Ok(vec![k.to_string(), fmt_f64(c), fmt_f64(p), fmt_f64(p * c)])
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(csv(&["k", "c_k", "phi_k", "phi_k_c_k"], &rows))
    }
}

/// `c_k(f) = ∫ f q̂_k dθ + Σ_s Σ_i M_{s,i} f^{(i)}(a_s) q̂_k^{(i)}(a_s)` for
/// `k <= nmax`, on the basis' shared rule.
pub fn fourier_coefficients(
    f: &dyn Differentiable,
    basis: &SobolevBasis,
    nmax: usize,
) -> Result<ExpansionCoefficients> {
    if nmax > basis.nmax() {
        return Err(Error::OutOfRange {
            index: nmax,
            max: basis.nmax(),
        });
    }
    let space = basis.space();
    let rule = basis.rule();
    let mut discrete = vec![0.0; nmax + 1];
    for (k, mp) in space.masses.iter().enumerate() {
        for (i, &m) in mp.weights.iter().enumerate() {
            if m == 0.0 {
                continue;
            }
            let fd = require(f, mp.location, i)?;
            for (n, d) in discrete.iter_mut().enumerate() {
                *d += m * fd * basis.mass_derivative(n, k, i);
            }
        }
    }
    let weighted: Vec<f64> = rule
        .nodes
        .iter()
        .zip(&rule.weights)
        .map(|(&x, &w)| Ok(w * require(f, x, 0)?))
        .collect::<Result<_>>()?;
    let coeffs: Vec<f64> = (0..=nmax)
        .map(|n| dot(&weighted, basis.node_values(n)) + discrete[n])
        .collect();

    let degree = f.polynomial_degree();
    let exact = match degree {
        Some(d) => d + nmax <= rule.exactness_degree,
        None => false,
    };
    let tabulated = matches!(space.measure, crate::measure::MeasureSpec::Tabulated { .. });
    let error_estimate = if exact || tabulated {
        0.0
    } else {
        let fine = gauss_rule(&space.measure, 2 * rule.len())?;
        let mut alt = discrete.clone();
        for (&x, &w) in fine.nodes.iter().zip(&fine.weights) {
            let fx = w * require(f, x, 0)?;
            let q = basis.eval_all(x, 0);
            for (a, qn) in alt.iter_mut().zip(&q) {
                *a += fx * qn;
            }
        }
        coeffs
            .iter()
            .zip(&alt)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    };

    Ok(ExpansionCoefficients {
        function: f.label(),
        coeffs,
        degree: degree.filter(|&d| d <= nmax),
        quadrature_points: rule.len(),
        quadrature_exactness: rule.exactness_degree,
        error_estimate,
    })
}

/// `S_n(f; x) = Σ_{k<=n} c_k q̂_k(x)`.
pub fn partial_sum(
    coeffs: &ExpansionCoefficients,
    basis: &SobolevBasis,
    n: usize,
    x: f64,
) -> Result<f64> {
    coeffs.check(n)?;
    Ok(series_value(basis, &coeffs.coeffs[..coeffs.terms(n)], x))
}

/// `T_n(f; x; Φ) = Σ_{k<=n} φ_k c_k q̂_k(x)`.
pub fn multiplier_transform(
    coeffs: &ExpansionCoefficients,
    phi: &MultiplierSequence,
    basis: &SobolevBasis,
    x: f64,
    n: usize,
) -> Result<f64> {
    Ok(series_value(basis, &coeffs.damped(phi, n)?, x))
}

/// `Σ_k a_k q̂_k(x)` through the `p̂` coefficients and Clenshaw.
fn series_value(basis: &SobolevBasis, a: &[f64], x: f64) -> f64 {
    basis.base().clenshaw(&basis.to_base_coefficients(a), x)
}

/// A finite series `Σ_k a_k q̂_k` as a [`Differentiable`] handle. Derivatives
/// at mass points come from the basis' stored mass values.
#[derive(Debug, Clone)]
pub struct SobolevSeries<'a> {
    basis: &'a SobolevBasis,
    label: String,
    weights: Vec<f64>,
    base_coeffs: Vec<f64>,
}

impl<'a> SobolevSeries<'a> {
    pub fn new(
        basis: &'a SobolevBasis,
        label: impl Into<String>,
        weights: Vec<f64>,
    ) -> Result<Self> {
        if weights.len() > basis.nmax() + 1 {
            return Err(Error::OutOfRange {
                index: weights.len() - 1,
                max: basis.nmax(),
            });
        }
        let base_coeffs = basis.to_base_coefficients(&weights);
        Ok(Self {
            basis,
            label: label.into(),
            weights,
            base_coeffs,
        })
    }

    /// `T_n(f; ·; Φ)` as a function.
    pub fn transform(
        coeffs: &ExpansionCoefficients,
        phi: &MultiplierSequence,
        basis: &'a SobolevBasis,
        n: usize,
    ) -> Result<Self> {
        let label = format!("T_{n}({}; {})", coeffs.function, phi.name());
        Self::new(basis, label, coeffs.damped(phi, n)?)
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }
}

impl Differentiable for SobolevSeries<'_> {
    fn label(&self) -> String {
        self.label.clone()
    }

    fn derivative(&self, x: f64, order: usize) -> Option<f64> {
        if order == 0 && !self.basis.space().mass_locations().contains(&x) {
            return Some(self.basis.base().clenshaw(&self.base_coeffs, x));
        }
        let q = self.basis.eval_all(x, order);
        Some(dot(&self.weights, &q[..self.weights.len()]))
    }

    fn polynomial_degree(&self) -> Option<usize> {
        Some(self.weights.len().saturating_sub(1))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum KernelMode {
    Dirichlet,
    Fejer,
}

/// Dirichlet kernel `Σ_{k<=n} q̂_k(x) q̂_k(t)` or its Fejér average
/// `(n+1)^{-1} Σ_{j<=n} K_j(x, t) = Σ_{k<=n} (1 - k/(n+1)) q̂_k(x) q̂_k(t)`.
pub fn kernel_eval(
    basis: &SobolevBasis,
    n: usize,
    x: f64,
    t: f64,
    mode: KernelMode,
) -> Result<f64> {
    if n > basis.nmax() {
        return Err(Error::OutOfRange {
            index: n,
            max: basis.nmax(),
        });
    }
    let qx = basis.eval_all(x, 0);
    let qt = basis.eval_all(t, 0);
    let scale = (n + 1) as f64;
    Ok((0..=n)
        .map(|k| {
            let w = match mode {
                KernelMode::Dirichlet => 1.0,
                KernelMode::Fejer => 1.0 - k as f64 / scale,
            };
            w * (qx[k] * qt[k])
        })
        .sum())
}

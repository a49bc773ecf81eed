//! Banded recurrence for multiplication by `π_{N+1}`:
//!
//! ```text
//! π q̂_n = Σ_{j=0}^{N+1} d_{n+j,j} q̂_{n+j} + Σ_{j=1}^{N+1} d_{n,j} q̂_{n-j},
//! d_{n,j} = ⟨π q̂_{n-j}, q̂_n⟩.
//! ```

use serde::{Deserialize, Serialize};

use super::basis::SobolevBasis;
use super::pi::PiPolynomial;
use super::space::SobolevSpaceSpec;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RecurrenceBand {
    /// `N + 1`.
    width: usize,
    /// `values[n][j]` for `j <= width`.
    values: Vec<Vec<f64>>,
}

impl RecurrenceBand {
    /// Band with entries `f(n, j)` for `n <= nmax`, `j <= width`.
    pub fn from_fn(nmax: usize, width: usize, f: impl Fn(usize, usize) -> f64) -> Self {
        let values = (0..=nmax)
            .map(|n| (0..=width).map(|j| f(n, j)).collect())
            .collect();
        Self { width, values }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn nmax(&self) -> usize {
        self.values.len() - 1
    }

    /// `d_{n,j}`; zero for `j > width` or `n > nmax`.
    pub fn get(&self, n: usize, j: usize) -> f64 {
        self.values
            .get(n)
            .and_then(|row| row.get(j))
            .copied()
            .unwrap_or(0.0)
    }

    /// Entry `⟨π q̂_a, q̂_b⟩` of the (symmetric) operator matrix.
    pub fn operator_entry(&self, a: usize, b: usize) -> f64 {
        let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
        self.get(hi, hi - lo)
    }

    /// `[(index, coefficient)]` of the banded expansion of `π q̂_n`.
    pub fn expansion_of(&self, n: usize) -> Vec<(usize, f64)> {
        let lo = n.saturating_sub(self.width);
        let hi = n + self.width;
        (lo..=hi).map(|m| (m, self.operator_entry(n, m))).collect()
    }
}

/// `d_{n,j}` for `0 <= j <= N+1`, `j <= n <= nmax`, by quadrature plus the
/// discrete terms (Leibniz rule for the derivatives of `π q̂`).
pub fn recurrence_coefficients(
    basis: &SobolevBasis,
    pi: &PiPolynomial,
    space: &SobolevSpaceSpec,
    nmax: usize,
) -> Result<RecurrenceBand> {
    if nmax > basis.nmax() {
        return Err(Error::OutOfRange {
            index: nmax,
            max: basis.nmax(),
        });
    }
    let rule = basis.rule();
    let required = 2 * nmax + pi.degree();
    if rule.exactness_degree < required {
        return Err(Error::InsufficientExactness {
            required,
            available: rule.exactness_degree,
        });
    }
    let width = pi.degree();
    let weighted_pi: Vec<f64> = rule
        .nodes
        .iter()
        .zip(&rule.weights)
        .map(|(&x, &w)| w * pi.eval(x))
        .collect();
    // π^{(l)}(a_k) for l <= N_k
    let pi_derivs: Vec<Vec<f64>> = space
        .masses
        .iter()
        .map(|mp| {
            (0..=mp.order)
                .map(|l| pi.eval_derivative(mp.location, l))
                .collect()
        })
        .collect();

    let entry = |a: usize, b: usize| -> f64 {
        let qa = basis.node_values(a);
        let qb = basis.node_values(b);
        let mut s: f64 = weighted_pi
            .iter()
            .zip(qa.iter().zip(qb))
            .map(|(w, (x, y))| w * x * y)
            .sum();
        for (k, mp) in space.masses.iter().enumerate() {
            for (i, &m) in mp.weights.iter().enumerate() {
                if m == 0.0 {
                    continue;
                }
                let mut pq = 0.0;
                let mut binom = 1.0;
                for l in 0..=i {
                    pq += binom * pi_derivs[k][l] * basis.mass_derivative(a, k, i - l);
                    binom = binom * (i - l) as f64 / (l + 1) as f64;
                }
                s += m * pq * basis.mass_derivative(b, k, i);
            }
        }
        s
    };

    // d_{n,j} with n < j pairs q̂_n with a nonexistent index
    Ok(RecurrenceBand::from_fn(nmax, width, |n, j| {
        if j <= n {
            entry(n - j, n)
        } else {
            0.0
        }
    }))
}

/// Pointwise residual `max_x |π q̂_n(x) - banded combination(x)|` over `grid`,
/// together with `max_x |π q̂_n(x)|`.
pub fn reconstruction_residual(
    basis: &SobolevBasis,
    pi: &PiPolynomial,
    band: &RecurrenceBand,
    n: usize,
    grid: &[f64],
) -> (f64, f64) {
    let terms = band.expansion_of(n);
    let mut worst: f64 = 0.0;
    let mut scale: f64 = 0.0;
    for &x in grid {
        let q = basis.eval_all(x, 0);
        let lhs = pi.eval(x) * q[n];
        let rhs: f64 = terms.iter().map(|&(m, d)| d * q[m]).sum();
        worst = worst.max((lhs - rhs).abs());
        scale = scale.max(lhs.abs());
    }
    (worst, scale)
}

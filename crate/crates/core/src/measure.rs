//! The continuous part of the inner product: a finite positive measure on
//! [-1, 1], its Gauss rules and its orthonormal polynomial family.

use serde::{Deserialize, Serialize};
use statrs::function::gamma::ln_gamma;

use crate::error::{Error, Result};
use crate::quadrature::{gauss_from_recurrence, QuadratureRule};

/// A measure on [-1, 1].
///
/// Recurrence tables use the monic convention
/// `p_{k+1}(x) = (x - alpha_k) p_k(x) - beta_k p_{k-1}(x)`, where `beta_0`
/// is the total mass.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
pub enum MeasureSpec {
    /// `dx / 2`.
    Legendre,
    /// Normalized ultraspherical weight
    /// `Γ(2α+2) / (2^{2α+1} Γ(α+1)²) (1 - x²)^α dx`, total mass 1.
    Gegenbauer {
        alpha: f64,
    },
    Recurrence {
        coefficients: Vec<[f64; 2]>,
        /// Declares the measure absolutely continuous with continuous density.
        #[serde(default, skip_serializing_if = "std::ops::Not::not")]
        absolutely_continuous: bool,
    },
    Tabulated {
        nodes: Vec<f64>,
        weights: Vec<f64>,
    },
}

impl MeasureSpec {
    pub fn gegenbauer(alpha: f64) -> Self {
        Self::Gegenbauer { alpha }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            Self::Legendre => Ok(()),
            Self::Gegenbauer { alpha } => {
                if alpha.is_finite() && *alpha > -0.5 {
                    Ok(())
                } else {
                    Err(Error::InvalidMeasure(format!(
                        "gegenbauer alpha must exceed -1/2, got {alpha}"
                    )))
                }
            }
            Self::Recurrence { coefficients, .. } => {
                if coefficients.is_empty() {
                    return Err(Error::InvalidMeasure("empty recurrence table".into()));
                }
                for (k, [a, b]) in coefficients.iter().enumerate() {
                    if !a.is_finite() || !(b.is_finite() && *b > 0.0) {
                        return Err(Error::InvalidMeasure(format!(
                            "recurrence entry {k} = [{a}, {b}] needs finite alpha and beta > 0"
                        )));
                    }
                }
                Ok(())
            }
            Self::Tabulated { nodes, weights } => {
                if nodes.is_empty() || nodes.len() != weights.len() {
                    return Err(Error::InvalidMeasure(
                        "tabulated measure needs matching non-empty nodes and weights".into(),
                    ));
                }
                if nodes.iter().any(|x| !(-1.0..=1.0).contains(x)) {
                    return Err(Error::InvalidMeasure("node outside [-1, 1]".into()));
                }
                if weights.iter().any(|w| !(w.is_finite() && *w > 0.0)) {
                    return Err(Error::InvalidMeasure("non-positive weight".into()));
                }
                Ok(())
            }
        }
    }

    pub fn total_mass(&self) -> f64 {
        match self {
            Self::Legendre | Self::Gegenbauer { .. } => 1.0,
            Self::Recurrence { coefficients, .. } => coefficients[0][1],
            Self::Tabulated { weights, .. } => weights.iter().sum(),
        }
    }

    /// Even weight: odd moments vanish.
    pub fn is_symmetric(&self) -> bool {
        match self {
            Self::Legendre | Self::Gegenbauer { .. } => true,
            Self::Recurrence { coefficients, .. } => coefficients.iter().all(|c| c[0] == 0.0),
            Self::Tabulated { nodes, weights } => {
                let mut pairs: Vec<(f64, f64)> =
                    nodes.iter().copied().zip(weights.iter().copied()).collect();
                pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
                let n = pairs.len();
                (0..n).all(|i| {
                    let (x, w) = pairs[i];
                    let (y, v) = pairs[n - 1 - i];
                    (x + y).abs() <= 1e-14 && (w - v).abs() <= 1e-14 * w.max(v)
                })
            }
        }
    }

    /// Absolute continuity with a continuous density, as declared by the
    /// variant. Tabulated measures are discrete and never qualify.
    pub fn is_absolutely_continuous(&self) -> bool {
        match self {
            Self::Legendre | Self::Gegenbauer { .. } => true,
            Self::Recurrence {
                absolutely_continuous,
                ..
            } => *absolutely_continuous,
            Self::Tabulated { .. } => false,
        }
    }

    /// Density `ω(x)` with `dθ = ω dx`, when known in closed form.
    pub fn density(&self, x: f64) -> Option<f64> {
        match self {
            Self::Legendre => Some(0.5),
            Self::Gegenbauer { alpha } => {
                let a = *alpha;
                let log_norm = ln_gamma(2.0 * a + 2.0)
                    - (2.0 * a + 1.0) * std::f64::consts::LN_2
                    - 2.0 * ln_gamma(a + 1.0);
                Some(log_norm.exp() * (1.0 - x * x).max(0.0).powf(a))
            }
            _ => None,
        }
    }

    /// Monic recurrence coefficients `(alpha_k, beta_k)` for `k < count`.
    pub fn recurrence(&self, count: usize) -> Result<(Vec<f64>, Vec<f64>)> {
        self.validate()?;
        match self {
            Self::Legendre => Ok(gegenbauer_recurrence(0.0, count)),
            Self::Gegenbauer { alpha } => Ok(gegenbauer_recurrence(*alpha, count)),
            Self::Recurrence { coefficients, .. } => {
                if coefficients.len() < count {
                    return Err(Error::InsufficientResolution {
                        requested: count,
                        available: coefficients.len(),
                    });
                }
                Ok(coefficients[..count].iter().map(|c| (c[0], c[1])).unzip())
            }
            Self::Tabulated { nodes, weights } => {
                if nodes.len() < count {
                    return Err(Error::InsufficientResolution {
                        requested: count,
                        available: nodes.len(),
                    });
                }
                Ok(discretized_stieltjes(nodes, weights, count))
            }
        }
    }

    /// Rule integrating every polynomial of degree `<= exactness` exactly.
    /// For a tabulated measure the table itself is returned.
    pub fn integration_rule(&self, exactness: usize) -> Result<QuadratureRule> {
        if let Self::Tabulated { nodes, weights } = self {
            self.validate()?;
            return Ok(QuadratureRule {
                nodes: nodes.clone(),
                weights: weights.clone(),
                exactness_degree: usize::MAX,
            });
        }
        gauss_rule(self, exactness / 2 + 1)
    }
}

fn gegenbauer_recurrence(alpha: f64, count: usize) -> (Vec<f64>, Vec<f64>) {
    let a = vec![0.0; count];
    let b = (0..count)
        .map(|k| match k {
            0 => 1.0,
            // the general formula has a removable 0/0 at alpha = -1/2
            1 => 1.0 / (2.0 * alpha + 3.0),
            _ => {
                let k = k as f64;
                k * (k + 2.0 * alpha)
                    / ((2.0 * k + 2.0 * alpha + 1.0) * (2.0 * k + 2.0 * alpha - 1.0))
            }
        })
        .collect();
    (a, b)
}

/// Stieltjes procedure on a discrete measure, carried out with normalized
/// node vectors.
fn discretized_stieltjes(nodes: &[f64], weights: &[f64], count: usize) -> (Vec<f64>, Vec<f64>) {
    let m = nodes.len();
    let mass: f64 = weights.iter().sum();
    let mut alpha = Vec::with_capacity(count);
    let mut beta = Vec::with_capacity(count);
    let mut prev = vec![0.0; m];
    let mut cur: Vec<f64> = vec![1.0 / mass.sqrt(); m];
    beta.push(mass);
    for k in 0..count {
        let a: f64 = (0..m)
            .map(|i| weights[i] * nodes[i] * cur[i] * cur[i])
            .sum();
        alpha.push(a);
        if k + 1 == count {
            break;
        }
        let b_prev = if k == 0 { 0.0 } else { beta[k].sqrt() };
        let mut next: Vec<f64> = (0..m)
            .map(|i| (nodes[i] - a) * cur[i] - b_prev * prev[i])
            .collect();
        let norm2: f64 = (0..m).map(|i| weights[i] * next[i] * next[i]).sum();
        let norm = norm2.sqrt();
        next.iter_mut().for_each(|v| *v /= norm);
        beta.push(norm2);
        prev = cur;
        cur = next;
    }
    (alpha, beta)
}

/// `npoints`-point Gauss rule for `measure`.
pub fn gauss_rule(measure: &MeasureSpec, npoints: usize) -> Result<QuadratureRule> {
    if npoints == 0 {
        return Err(Error::InvalidParameter("npoints must be >= 1".into()));
    }
    let (alpha, beta) = measure.recurrence(npoints)?;
    gauss_from_recurrence(&alpha, &beta)
}

/// Orthonormal polynomials `p̂_0..p̂_nmax` for a measure, held as their
/// three-term recurrence `x p̂_k = b_{k+1} p̂_{k+1} + a_k p̂_k + b_k p̂_{k-1}`.
#[derive(Debug, Clone, PartialEq)]
pub struct BaseBasis {
    measure: MeasureSpec,
    alpha: Vec<f64>,
    /// `b[k] = sqrt(beta_k)`; `b[0]` is the norm of the constant 1.
    b: Vec<f64>,
}

pub fn build_base_basis(measure: &MeasureSpec, nmax: usize) -> Result<BaseBasis> {
    let (alpha, beta) = measure.recurrence(nmax + 1)?;
    Ok(BaseBasis {
        measure: measure.clone(),
        alpha,
        b: beta.iter().map(|v| v.sqrt()).collect(),
    })
}

impl BaseBasis {
    pub fn nmax(&self) -> usize {
        self.alpha.len() - 1
    }

    pub fn measure(&self) -> &MeasureSpec {
        &self.measure
    }

    pub fn alpha(&self) -> &[f64] {
        &self.alpha
    }

    /// Off-diagonal Jacobi entries `b_1..b_nmax` (index 0 holds the norm of 1).
    pub fn b(&self) -> &[f64] {
        &self.b
    }

    pub fn constant_norm(&self) -> f64 {
        self.b[0]
    }

    /// `table[i][k]` = `p̂_k^{(i)}(x)` for `i <= max_order`, `k <= nmax`,
    /// from the differentiated recurrence.
    pub fn derivative_table(&self, x: f64, max_order: usize) -> Vec<Vec<f64>> {
        let n = self.alpha.len();
        let mut table = vec![vec![0.0; n]; max_order + 1];
        table[0][0] = 1.0 / self.b[0];
        for k in 0..n - 1 {
            for i in 0..=max_order {
                let lower = if i > 0 {
                    i as f64 * table[i - 1][k]
                } else {
                    0.0
                };
                let prev = if k > 0 {
                    self.b[k] * table[i][k - 1]
                } else {
                    0.0
                };
                table[i][k + 1] =
                    ((x - self.alpha[k]) * table[i][k] + lower - prev) / self.b[k + 1];
            }
        }
        table
    }

    /// `p̂_k^{(d)}(x)` for every `k <= nmax`.
    pub fn eval_all(&self, x: f64, d: usize) -> Vec<f64> {
        self.derivative_table(x, d).pop().unwrap_or_default()
    }

    /// `d`-th derivative of `p̂_n` at `x`.
    pub fn eval(&self, n: usize, x: f64, d: usize) -> Result<f64> {
        if n > self.nmax() {
            return Err(Error::OutOfRange {
                index: n,
                max: self.nmax(),
            });
        }
        if d > n {
            return Ok(0.0);
        }
        Ok(self.eval_all(x, d)[n])
    }

    /// `Σ_k coeffs[k] p̂_k(x)` by Clenshaw's backward recurrence.
    pub fn clenshaw(&self, coeffs: &[f64], x: f64) -> f64 {
        let n = coeffs.len();
        if n == 0 {
            return 0.0;
        }
        let mut u1 = 0.0; // u_{k+1}
        let mut u2 = 0.0; // u_{k+2}
        for k in (0..n).rev() {
            let next_b = if k + 1 < self.b.len() {
                self.b[k + 1]
            } else {
                1.0
            };
            let next_next_b = if k + 2 < self.b.len() {
                self.b[k + 2]
            } else {
                1.0
            };
            let u = coeffs[k] + (x - self.alpha[k]) / next_b * u1 - next_b / next_next_b * u2;
            u2 = u1;
            u1 = u;
        }
        u1 / self.b[0]
    }
}

/// Shorthand used by the verification helpers.
pub fn eval_base(basis: &BaseBasis, n: usize, x: f64, d: usize) -> Result<f64> {
    basis.eval(n, x, d)
}

//! Gauss rules from three-term recurrence coefficients (Golub-Welsch).

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Nodes and positive weights on [-1, 1].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuadratureRule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
    /// Highest polynomial degree integrated exactly. `usize::MAX` for a rule
    /// that *is* the measure (tabulated discrete measures).
    pub exactness_degree: usize,
}

impl QuadratureRule {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn total_mass(&self) -> f64 {
        self.weights.iter().sum()
    }

    /// Weighted sum in node order.
    pub fn integrate<F: Fn(f64) -> f64>(&self, f: F) -> f64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&x, &w)| w * f(x))
            .sum()
    }

    /// Affine image of a rule on [-1, 1] onto [lo, hi]; weights scale by the
    /// interval ratio.
    pub fn mapped(&self, lo: f64, hi: f64) -> Self {
        let half = 0.5 * (hi - lo);
        let mid = 0.5 * (hi + lo);
        Self {
            nodes: self.nodes.iter().map(|&x| mid + half * x).collect(),
            weights: self.weights.iter().map(|&w| w * half).collect(),
            exactness_degree: self.exactness_degree,
        }
    }
}

/// Gauss rule for the measure whose monic recurrence is
/// `p_{k+1} = (x - alpha_k) p_k - beta_k p_{k-1}` with `beta_0` the total mass.
/// Uses the first `alpha.len()` coefficients.
pub fn gauss_from_recurrence(alpha: &[f64], beta: &[f64]) -> Result<QuadratureRule> {
    let n = alpha.len();
    if n == 0 || beta.len() < n {
        return Err(Error::InvalidParameter(
            "gauss rule needs at least one point".into(),
        ));
    }
    let mut diag = alpha.to_vec();
    let mut off: Vec<f64> = (0..n)
        .map(|k| if k + 1 < n { beta[k + 1].sqrt() } else { 0.0 })
        .collect();
    let mut z = vec![0.0; n];
    z[0] = beta[0].sqrt();
    implicit_ql(&mut diag, &mut off, &mut z)?;
    let weights = z.iter().map(|v| v * v).collect();
    Ok(QuadratureRule {
        nodes: diag,
        weights,
        exactness_degree: 2 * n - 1,
    })
}

/// Eigenvalues of a symmetric tridiagonal matrix together with the first
/// components of its normalized eigenvectors (scaled by the initial `z`).
/// `d` is the diagonal, `e[i]` couples rows `i` and `i + 1`.
/// On return `d` is sorted ascending and `z` permuted accordingly.
fn implicit_ql(d: &mut [f64], e: &mut [f64], z: &mut [f64]) -> Result<()> {
    let n = d.len();
    if n == 1 {
        return Ok(());
    }
    const MAX_ITER: usize = 60;
    let prec = f64::EPSILON;
    e[n - 1] = 0.0;
    for l in 0..n {
        let mut iter = 0;
        loop {
            let mut m = l;
            while m < n - 1 {
                if e[m].abs() <= prec * (d[m].abs() + d[m + 1].abs()) {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            if iter >= MAX_ITER {
                return Err(Error::EigenNoConvergence);
            }
            iter += 1;
            let mut p = d[l];
            let mut g = (d[l + 1] - p) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            g = d[m] - p + e[l] / (g + r.copysign(g));
            let mut s = 1.0;
            let mut c = 1.0;
            p = 0.0;
            for i in (l..m).rev() {
                let f = s * e[i];
                let b = c * e[i];
                if g.abs() <= f.abs() {
                    c = g / f;
                    r = c.hypot(1.0);
                    e[i + 1] = f * r;
                    s = 1.0 / r;
                    c *= s;
                } else {
                    s = f / g;
                    r = s.hypot(1.0);
                    e[i + 1] = g * r;
                    c = 1.0 / r;
                    s *= c;
                }
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
                let f = z[i + 1];
                z[i + 1] = s * z[i] + c * f;
                z[i] = c * z[i] - s * f;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }
    // selection sort keeps the pairing with z
    for i in 0..n - 1 {
        let mut k = i;
        for j in i + 1..n {
            if d[j] < d[k] {
                k = j;
            }
        }
        if k != i {
            d.swap(i, k);
            z.swap(i, k);
        }
    }
    Ok(())
}

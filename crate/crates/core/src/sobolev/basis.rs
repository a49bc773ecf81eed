//! Sobolev-orthonormal polynomials `q̂_n` expressed in the θ-orthonormal
//! family `p̂_j`.
//!
//! In `p̂` coordinates the Gram matrix is `G = I + Σ_r u_r u_rᵀ` with one
//! term per positive discrete weight, `(u_r)_j = √M_{k,i} p̂_j^{(i)}(a_k)`.
//! Writing `U_n` for the first `n` rows of `[u_r]` and
//! `P_n = (I + U_nᵀ U_n)^{-1}` (a small `r × r` matrix), Gram-Schmidt gives
//! the closed form
//!
//! ```text
//! y_n = P_n u_n,   s_n = sqrt(1 + u_nᵀ y_n),
//! c_{n,n} = 1 / s_n,   c_{n,j} = -(u_j · y_n) / s_n   (j < n),
//! √M_{k,i} q̂_n^{(i)}(a_k) = y_{n,r} / s_n.
//! ```
//!
//! `P_n^{-1}` is kept as an upper-triangular square root updated by Givens
//! rotations, so each row costs `O(n r + r²)`.

use serde::{Deserialize, Serialize};

use super::space::{Differentiable, SobolevSpaceSpec};
use crate::error::{Error, Result};
use crate::measure::{build_base_basis, BaseBasis};
use crate::quadrature::QuadratureRule;
use crate::sobolev::pi::symmetrizing_exponent;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BasisOptions {
    pub ortho_tol: f64,
    pub recon_tol: f64,
}

impl Default for BasisOptions {
    fn default() -> Self {
        Self {
            ortho_tol: 1e-8,
            recon_tol: 1e-8,
        }
    }
}

/// One rank-one term of the Gram perturbation.
#[derive(Debug, Clone, PartialEq)]
struct DiscreteTerm {
    mass: usize,
    order: usize,
    sqrt_weight: f64,
}

#[derive(Debug, Clone)]
pub struct SobolevBasis {
    space: SobolevSpaceSpec,
    base: BaseBasis,
    /// Row `n` holds `c_{n,0..=n}`.
    connection: Vec<Vec<f64>>,
    /// `[n][k][i]` = `q̂_n^{(i)}(a_k)`, `i <= N_k`.
    mass_values: Vec<Vec<Vec<f64>>>,
    rule: QuadratureRule,
    /// `[n][node]` = `q̂_n` at the rule's nodes.
    node_values: Vec<Vec<f64>>,
    residual: f64,
    options: BasisOptions,
}

/// Exactness needed so every inner product of the artifact, including
/// `⟨π q̂_a, q̂_b⟩` with `a, b <= nmax`, is integrated exactly.
pub fn required_exactness(space: &SobolevSpaceSpec, nmax: usize) -> usize {
    let n: usize = space
        .masses
        .iter()
        .map(|m| symmetrizing_exponent(m.order))
        .sum();
    2 * nmax + n + 3
}

pub fn compute_orthonormal_basis(space: &SobolevSpaceSpec, nmax: usize) -> Result<SobolevBasis> {
    compute_orthonormal_basis_with(space, nmax, BasisOptions::default())
}

pub fn compute_orthonormal_basis_with(
    space: &SobolevSpaceSpec,
    nmax: usize,
    options: BasisOptions,
) -> Result<SobolevBasis> {
    let basis = SobolevBasis::build(space, nmax, options)?;
    if !(basis.residual <= options.ortho_tol) {
        return Err(Error::ResidualAboveTolerance {
            achieved: basis.residual,
            tolerance: options.ortho_tol,
        });
    }
    Ok(basis)
}

impl SobolevBasis {
    /// Builds the basis without enforcing `ortho_tol`; the achieved residual
    /// is available from [`SobolevBasis::orthonormality_residual`].
    pub fn build(space: &SobolevSpaceSpec, nmax: usize, options: BasisOptions) -> Result<Self> {
        space.validate()?;
        let base = build_base_basis(&space.measure, nmax)?;
        let rule = space
            .measure
            .integration_rule(required_exactness(space, nmax))?;

        let terms: Vec<DiscreteTerm> = space
            .masses
            .iter()
            .enumerate()
            .flat_map(|(k, mp)| {
                mp.weights
                    .iter()
                    .enumerate()
                    .filter(|(_, &m)| m > 0.0)
                    .map(move |(i, &m)| DiscreteTerm {
                        mass: k,
                        order: i,
                        sqrt_weight: m.sqrt(),
                    })
            })
            .collect();
        let rank = terms.len();

        // base derivative tables at every mass point
        let mass_tables: Vec<Vec<Vec<f64>>> = space
            .masses
            .iter()
            .map(|mp| base.derivative_table(mp.location, mp.order))
            .collect();
        // u[j][r]
        let u: Vec<Vec<f64>> = (0..=nmax)
            .map(|j| {
                terms
                    .iter()
                    .map(|t| t.sqrt_weight * mass_tables[t.mass][t.order][j])
                    .collect()
            })
            .collect();

        let mut root = identity(rank);
        let mut connection = Vec::with_capacity(nmax + 1);
        let mut scaled = Vec::with_capacity(nmax + 1); // y_n / s_n
        for n in 0..=nmax {
            let y = solve_normal(&root, &u[n]);
            let pivot = 1.0 + dot(&u[n], &y);
            if !(pivot.is_finite() && pivot > 0.0) {
                return Err(Error::FactorizationFailure { row: n, pivot });
            }
            let s = pivot.sqrt();
            let mut row: Vec<f64> = u[..n].iter().map(|uj| -dot(uj, &y) / s).collect();
            row.push(1.0 / s);
            connection.push(row);
            scaled.push(y.iter().map(|v| v / s).collect::<Vec<f64>>());
            givens_append(&mut root, &u[n]);
        }

        let mass_values: Vec<Vec<Vec<f64>>> = (0..=nmax)
            .map(|n| {
                space
                    .masses
                    .iter()
                    .enumerate()
                    .map(|(k, mp)| {
                        (0..=mp.order)
                            .map(
                                |i| match terms.iter().position(|t| t.mass == k && t.order == i) {
                                    Some(r) => scaled[n][r] / terms[r].sqrt_weight,
                                    None => dot(&connection[n], &mass_tables[k][i][..=n]),
                                },
                            )
                            .collect()
                    })
                    .collect()
            })
            .collect();

        let node_values = {
            let base_at_nodes: Vec<Vec<f64>> =
                rule.nodes.iter().map(|&x| base.eval_all(x, 0)).collect();
            connection
                .iter()
                .map(|row| {
                    base_at_nodes
                        .iter()
                        .map(|p| dot(row, &p[..row.len()]))
                        .collect()
                })
                .collect()
        };

        let mut basis = Self {
            space: space.clone(),
            base,
            connection,
            mass_values,
            rule,
            node_values,
            residual: f64::NAN,
            options,
        };
        basis.residual = basis.measure_residual();
        Ok(basis)
    }

    /// `max_{i,j} |⟨q̂_i, q̂_j⟩ - δ_ij|`: continuous part from the polynomial
    /// values at the shared rule's nodes, discrete part from the mass-point
    /// derivative values.
    fn measure_residual(&self) -> f64 {
        let nmax = self.nmax();
        let direct: Vec<Vec<Vec<f64>>> = self
            .space
            .masses
            .iter()
            .map(|mp| {
                (0..=mp.order)
                    .map(|i| self.eval_all(mp.location, i))
                    .collect()
            })
            .collect();
        let mut worst: f64 = 0.0;
        for a in 0..=nmax {
            for b in 0..=a {
                let mut ip: f64 = self
                    .rule
                    .weights
                    .iter()
                    .zip(self.node_values[a].iter().zip(&self.node_values[b]))
                    .map(|(w, (x, y))| w * x * y)
                    .sum();
                for (k, mp) in self.space.masses.iter().enumerate() {
                    for (i, &m) in mp.weights.iter().enumerate() {
                        ip += m * direct[k][i][a] * direct[k][i][b];
                    }
                }
                let target = if a == b { 1.0 } else { 0.0 };
                worst = worst.max((ip - target).abs());
            }
        }
        worst
    }

    pub fn nmax(&self) -> usize {
        self.connection.len() - 1
    }

    pub fn space(&self) -> &SobolevSpaceSpec {
        &self.space
    }

    pub fn base(&self) -> &BaseBasis {
        &self.base
    }

    pub fn rule(&self) -> &QuadratureRule {
        &self.rule
    }

    pub fn options(&self) -> BasisOptions {
        self.options
    }

    pub fn orthonormality_residual(&self) -> f64 {
        self.residual
    }

    /// `c_{n,0..=n}`.
    pub fn connection_row(&self, n: usize) -> &[f64] {
        &self.connection[n]
    }

    pub fn connection(&self, n: usize, j: usize) -> f64 {
        if j > n {
            0.0
        } else {
            self.connection[n][j]
        }
    }

    /// `q̂_n^{(i)}(a_k)` from the factorization (no cancellation).
    pub fn mass_derivative(&self, n: usize, k: usize, i: usize) -> f64 {
        self.mass_values[n][k][i]
    }

    /// Values of `q̂_0..q̂_nmax` at the shared rule's nodes.
    pub fn node_values(&self, n: usize) -> &[f64] {
        &self.node_values[n]
    }

    fn check_index(&self, n: usize) -> Result<()> {
        if n > self.nmax() {
            Err(Error::OutOfRange {
                index: n,
                max: self.nmax(),
            })
        } else {
            Ok(())
        }
    }

    fn mass_index(&self, x: f64, d: usize) -> Option<usize> {
        self.space
            .masses
            .iter()
            .position(|m| m.location == x && d <= m.order)
    }

    /// `q̂_n^{(d)}(x) = Σ_j c_{n,j} p̂_j^{(d)}(x)`. At a mass point, for
    /// orders carried there, the value comes from the factorization instead
    /// of the (cancellation-prone) connection sum.
    pub fn eval(&self, n: usize, x: f64, d: usize) -> Result<f64> {
        self.check_index(n)?;
        if d > n {
            return Ok(0.0);
        }
        if let Some(k) = self.mass_index(x, d) {
            return Ok(self.mass_values[n][k][d]);
        }
        Ok(self.eval_by_connection(n, x, d))
    }

    /// The plain connection sum, regardless of `x`.
    pub fn eval_by_connection(&self, n: usize, x: f64, d: usize) -> f64 {
        let p = self.base.eval_all(x, d);
        dot(&self.connection[n], &p[..=n])
    }

    /// `q̂_n^{(d)}(x)` for all `n <= nmax`.
    pub fn eval_all(&self, x: f64, d: usize) -> Vec<f64> {
        if let Some(k) = self.mass_index(x, d) {
            return self.mass_values.iter().map(|v| v[k][d]).collect();
        }
        let p = self.base.eval_all(x, d);
        self.connection
            .iter()
            .map(|row| dot(row, &p[..row.len()]))
            .collect()
    }

    /// Coefficients in the `p̂` basis of `Σ_{k<=n} a_k q̂_k`.
    pub fn to_base_coefficients(&self, coeffs: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; coeffs.len()];
        for (k, &a) in coeffs.iter().enumerate() {
            if a != 0.0 {
                for (j, c) in self.connection[k].iter().enumerate() {
                    out[j] += a * c;
                }
            }
        }
        out
    }

    /// `q̂_n` as a [`Differentiable`] handle.
    pub fn polynomial(&self, n: usize) -> Result<SobolevPolynomial<'_>> {
        self.check_index(n)?;
        Ok(SobolevPolynomial { basis: self, n })
    }
}

pub fn eval_sobolev_poly(basis: &SobolevBasis, n: usize, x: f64, d: usize) -> Result<f64> {
    basis.eval(n, x, d)
}

#[derive(Debug, Clone, Copy)]
pub struct SobolevPolynomial<'a> {
    basis: &'a SobolevBasis,
    n: usize,
}

impl Differentiable for SobolevPolynomial<'_> {
    fn label(&self) -> String {
        format!("q{}", self.n)
    }

    fn derivative(&self, x: f64, order: usize) -> Option<f64> {
        self.basis.eval(self.n, x, order).ok()
    }

    fn polynomial_degree(&self) -> Option<usize> {
        Some(self.n)
    }
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn identity(r: usize) -> Vec<Vec<f64>> {
    (0..r)
        .map(|i| (0..r).map(|j| if i == j { 1.0 } else { 0.0 }).collect())
        .collect()
}

/// Solves `RᵀR y = v` for upper-triangular `R`.
fn solve_normal(root: &[Vec<f64>], v: &[f64]) -> Vec<f64> {
    let r = v.len();
    let mut w = v.to_vec();
    for i in 0..r {
        for k in 0..i {
            w[i] -= root[k][i] * w[k];
        }
        w[i] /= root[i][i];
    }
    for i in (0..r).rev() {
        for k in i + 1..r {
            w[i] -= root[i][k] * w[k];
        }
        w[i] /= root[i][i];
    }
    w
}

/// Replaces `R` by the triangular factor of `RᵀR + v vᵀ`.
fn givens_append(root: &mut [Vec<f64>], v: &[f64]) {
    let mut row = v.to_vec();
    let r = row.len();
    for i in 0..r {
        if row[i] == 0.0 {
            continue;
        }
        let h = root[i][i].hypot(row[i]);
        let c = root[i][i] / h;
        let s = row[i] / h;
        for j in i..r {
            let t = root[i][j];
            root[i][j] = c * t + s * row[j];
            row[j] = c * row[j] - s * t;
        }
    }
}

//! Built-in target functions with analytic derivatives.

use std::fmt;

use crate::error::{Error, Result};
use crate::measure::BaseBasis;
use crate::poly::Poly;
use crate::sobolev::Differentiable;

#[derive(Clone)]
pub enum TargetKind {
    One,
    Identity,
    Polynomial(Poly),
    /// `|x|³`; the third derivative jumps at 0.
    Abs3,
    Exp,
    /// `1 / (1 + 25 x²)`.
    Runge,
    /// `sign(x - a)`.
    Step(f64),
    /// `Σ_k coeffs[k] p̂_k(x)` in a base orthonormal family.
    BaseSeries {
        coeffs: Vec<f64>,
        base: BaseBasis,
    },
}

#[derive(Clone)]
pub struct TargetFunction {
    name: String,
    kind: TargetKind,
}

impl fmt::Debug for TargetFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("TargetFunction")
            .field("name", &self.name)
            .finish()
    }
}

impl TargetFunction {
    pub fn new(name: impl Into<String>, kind: TargetKind) -> Self {
        Self {
            name: name.into(),
            kind,
        }
    }

    /// Registry lookup: `one`, `x`, `poly:[c0,c1,...]` (ascending monomial
    /// coefficients), `abs3`, `exp`, `runge`, `step:a`.
    pub fn parse(name: &str) -> Result<Self> {
        let kind = match name {
            "one" => TargetKind::One,
            "x" => TargetKind::Identity,
            "abs3" => TargetKind::Abs3,
            "exp" => TargetKind::Exp,
            "runge" => TargetKind::Runge,
            _ => {
                if let Some(list) = name.strip_prefix("poly:") {
                    let coeffs: Vec<f64> = serde_json::from_str(list)
                        .map_err(|e| Error::UnknownFunction(format!("{name}: {e}")))?;
                    if coeffs.is_empty() || coeffs.iter().any(|c| !c.is_finite()) {
                        return Err(Error::UnknownFunction(name.into()));
                    }
                    TargetKind::Polynomial(Poly::new(coeffs))
                } else if let Some(at) = name.strip_prefix("step:") {
                    let a: f64 = at
                        .parse()
                        .map_err(|_| Error::UnknownFunction(name.into()))?;
                    if !(-1.0..=1.0).contains(&a) {
                        return Err(Error::UnknownFunction(name.into()));
                    }
                    TargetKind::Step(a)
                } else {
                    return Err(Error::UnknownFunction(name.into()));
                }
            }
        };
        Ok(Self::new(name, kind))
    }

    pub fn polynomial(coeffs: Vec<f64>) -> Self {
        let name = format!(
            "poly:[{}]",
            coeffs
                .iter()
                .map(|c| c.to_string())
                .collect::<Vec<_>>()
                .join(",")
        );
        Self::new(name, TargetKind::Polynomial(Poly::new(coeffs)))
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn kind(&self) -> &TargetKind {
        &self.kind
    }

    /// Points where `f` itself is discontinuous.
    pub fn discontinuities(&self) -> Vec<f64> {
        match self.kind {
            TargetKind::Step(a) => vec![a],
            _ => Vec::new(),
        }
    }

    pub fn is_continuous_at(&self, x: f64) -> bool {
        !self.discontinuities().contains(&x)
    }

    /// Largest `i` with `f^{(i)}` available everywhere on [-1, 1].
    pub fn max_order(&self) -> usize {
        match self.kind {
            TargetKind::Abs3 => 2,
            TargetKind::Step(_) => 0,
            _ => usize::MAX,
        }
    }

    /// Worst relative mismatch between `f^{(i)}` and a central difference of
    /// `f^{(i-1)}` (step `h`) over `points` and `1 <= i <= max_order`.
    /// Points where a needed derivative is unavailable are skipped.
    pub fn derivative_consistency(&self, points: &[f64], max_order: usize, h: f64) -> f64 {
        let mut worst: f64 = 0.0;
        for &x in points {
            for i in 1..=max_order {
                let (Some(analytic), Some(up), Some(down)) = (
                    self.derivative(x, i),
                    self.derivative(x + h, i - 1),
                    self.derivative(x - h, i - 1),
                ) else {
                    continue;
                };
                let fd = (up - down) / (2.0 * h);
                worst = worst.max((analytic - fd).abs() / analytic.abs().max(1.0));
            }
        }
        worst
    }
}

impl Differentiable for TargetFunction {
    fn label(&self) -> String {
        self.name.clone()
    }

    fn derivative(&self, x: f64, order: usize) -> Option<f64> {
        match &self.kind {
            TargetKind::One => Some(if order == 0 { 1.0 } else { 0.0 }),
            TargetKind::Identity => Some(match order {
                0 => x,
                1 => 1.0,
                _ => 0.0,
            }),
            TargetKind::Polynomial(p) => Some(p.eval_derivative(x, order)),
            TargetKind::Abs3 => match order {
                0 => Some(x.abs().powi(3)),
                1 => Some(3.0 * x * x.abs()),
                2 => Some(6.0 * x.abs()),
                _ if x == 0.0 => None,
                3 => Some(6.0 * x.signum()),
                _ => Some(0.0),
            },
            TargetKind::Exp => Some(x.exp()),
            TargetKind::Runge => Some(runge_derivative(x, order)),
            TargetKind::Step(a) => {
                if x == *a {
                    (order == 0).then_some(0.0)
                } else if order == 0 {
                    Some((x - a).signum())
                } else {
                    Some(0.0)
                }
            }
            TargetKind::BaseSeries { coeffs, base } => {
                let p = base.eval_all(x, order);
                Some(coeffs.iter().zip(&p).map(|(c, v)| c * v).sum())
            }
        }
    }

    fn polynomial_degree(&self) -> Option<usize> {
        match &self.kind {
            TargetKind::One => Some(0),
            TargetKind::Identity => Some(1),
            TargetKind::Polynomial(p) => Some(p.degree()),
            TargetKind::BaseSeries { coeffs, .. } => {
                Some(coeffs.iter().rposition(|&c| c != 0.0).unwrap_or(0))
            }
            _ => None,
        }
    }
}

/// `d^n/dx^n (1 + 25x²)^{-1}` from the Taylor series of the reciprocal of
/// `g(x + h) = g(x) + 50 x h + 25 h²`.
fn runge_derivative(x: f64, n: usize) -> f64 {
    let g0 = 1.0 + 25.0 * x * x;
    let g1 = 50.0 * x;
    let g2 = 25.0;
    let mut r = Vec::with_capacity(n + 1);
    r.push(1.0 / g0);
    for k in 1..=n {
        let mut s = g1 * r[k - 1];
        if k >= 2 {
            s += g2 * r[k - 2];
        }
        r.push(-s / g0);
    }
    let factorial: f64 = (1..=n).map(|v| v as f64).product();
    factorial * r[n]
}

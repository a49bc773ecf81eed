use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::measure::MeasureSpec;
use crate::quadrature::QuadratureRule;

/// A point `a` carrying the discrete terms `Σ_{i<=N} M_i f^{(i)}(a) g^{(i)}(a)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MassPoint {
    #[serde(rename = "a")]
    pub location: f64,
    #[serde(rename = "N")]
    pub order: usize,
    #[serde(rename = "M")]
    pub weights: Vec<f64>,
}

impl MassPoint {
    pub fn new(location: f64, weights: Vec<f64>) -> Self {
        Self {
            location,
            order: weights.len().saturating_sub(1),
            weights,
        }
    }

    fn validate(&self) -> Result<()> {
        let a = self.location;
        if !(-1.0..=1.0).contains(&a) {
            return Err(Error::InvalidSpace(format!(
                "mass point {a} outside [-1, 1]"
            )));
        }
        if self.weights.len() != self.order + 1 {
            return Err(Error::InvalidSpace(format!(
                "mass point {a}: order {} needs {} weights, got {}",
                self.order,
                self.order + 1,
                self.weights.len()
            )));
        }
        if self.weights.iter().any(|m| !(m.is_finite() && *m >= 0.0)) {
            return Err(Error::InvalidSpace(format!(
                "mass point {a}: weights must be finite and nonnegative"
            )));
        }
        if self.weights[self.order] <= 0.0 {
            return Err(Error::InvalidSpace(format!(
                "mass point {a}: top weight M_N must be positive"
            )));
        }
        Ok(())
    }
}

/// Measure plus mass points: the full continuous-discrete inner product.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SobolevSpaceSpec {
    pub measure: MeasureSpec,
    #[serde(default)]
    pub masses: Vec<MassPoint>,
}

impl SobolevSpaceSpec {
    pub fn new(measure: MeasureSpec, masses: Vec<MassPoint>) -> Result<Self> {
        let space = Self { measure, masses };
        space.validate()?;
        Ok(space)
    }

    pub fn plain(measure: MeasureSpec) -> Self {
        Self {
            measure,
            masses: Vec::new(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.measure.validate()?;
        for (k, mp) in self.masses.iter().enumerate() {
            mp.validate()?;
            if self.masses[..k].iter().any(|o| o.location == mp.location) {
                return Err(Error::InvalidSpace(format!(
                    "duplicate mass location {}",
                    mp.location
                )));
            }
        }
        if let MeasureSpec::Tabulated { nodes, .. } = &self.measure {
            if let Some(mp) = self.masses.iter().find(|mp| nodes.contains(&mp.location)) {
                return Err(Error::InvalidSpace(format!(
                    "tabulated measure has an atom at mass point {}",
                    mp.location
                )));
            }
        }
        Ok(())
    }

    /// Highest derivative order used at any mass point.
    pub fn max_order(&self) -> usize {
        self.masses.iter().map(|m| m.order).max().unwrap_or(0)
    }

    pub fn mass_locations(&self) -> Vec<f64> {
        self.masses.iter().map(|m| m.location).collect()
    }

    /// Membership in `(-1, 1) ∪ {a_k}`.
    pub fn in_admissible_set(&self, x: f64) -> bool {
        (x > -1.0 && x < 1.0) || self.masses.iter().any(|m| m.location == x)
    }

    /// Symmetric measure and masses invariant under `a -> -a` with equal weights.
    pub fn is_symmetric(&self) -> bool {
        self.measure.is_symmetric()
            && self.masses.iter().all(|m| {
                self.masses
                    .iter()
                    .any(|o| o.location == -m.location && o.weights == m.weights)
            })
    }
}

/// A real function with derivatives available up to some order.
pub trait Differentiable {
    fn label(&self) -> String;

    /// `f^{(order)}(x)`, or `None` when that derivative is not available.
    fn derivative(&self, x: f64, order: usize) -> Option<f64>;

    fn value(&self, x: f64) -> f64 {
        self.derivative(x, 0).unwrap_or(f64::NAN)
    }

    /// `Some(degree)` for polynomials.
    fn polynomial_degree(&self) -> Option<usize> {
        None
    }
}

impl Differentiable for crate::poly::Poly {
    fn label(&self) -> String {
        format!("poly{:?}", self.coeffs())
    }

    fn derivative(&self, x: f64, order: usize) -> Option<f64> {
        Some(self.eval_derivative(x, order))
    }

    fn polynomial_degree(&self) -> Option<usize> {
        Some(self.degree())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InnerProduct {
    pub value: f64,
    /// True when the continuous part is integrated exactly (polynomial
    /// integrand within the rule's exactness).
    pub exact: bool,
}

/// `∫ f g dθ + Σ_k Σ_i M_{k,i} f^{(i)}(a_k) g^{(i)}(a_k)`.
pub fn sobolev_inner_product(
    f: &dyn Differentiable,
    g: &dyn Differentiable,
    space: &SobolevSpaceSpec,
    rule: &QuadratureRule,
) -> Result<InnerProduct> {
    let continuous = rule.integrate(|x| f.value(x) * g.value(x));
    let mut discrete = 0.0;
    for mp in &space.masses {
        for (i, &m) in mp.weights.iter().enumerate() {
            let fd = require(f, mp.location, i)?;
            let gd = require(g, mp.location, i)?;
            discrete += m * fd * gd;
        }
    }
    let exact = match (f.polynomial_degree(), g.polynomial_degree()) {
        (Some(a), Some(b)) => a + b <= rule.exactness_degree,
        _ => false,
    };
    Ok(InnerProduct {
        value: continuous + discrete,
        exact,
    })
}

pub(crate) fn require(f: &dyn Differentiable, x: f64, order: usize) -> Result<f64> {
    f.derivative(x, order)
        .ok_or_else(|| Error::MissingDerivative {
            function: f.label(),
            order,
            point: x,
        })
}

//! Symmetric Gegenbauer-Sobolev spaces: the normalized Gegenbauer weight
//! plus masses `M f g + N f' g'` at both endpoints.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::measure::MeasureSpec;
use crate::report::{HypothesisReport, Verdict};
use crate::sobolev::{
    build_pi_polynomial, compute_orthonormal_basis, recurrence_coefficients, MassPoint,
    SobolevSpaceSpec,
};
use crate::verification::{
    check_absolute_continuity, check_derivative_sums, check_integrability,
    check_recurrence_summability, estimate_majorant_on_region, estimate_majorant_on_rule, Region,
    Tolerances, DEFAULT_GRID,
};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GegenbauerSobolevParams {
    pub alpha: f64,
    #[serde(rename = "M")]
    pub m: f64,
    #[serde(rename = "N")]
    pub n: f64,
}

impl GegenbauerSobolevParams {
    pub fn new(alpha: f64, m: f64, n: f64) -> Result<Self> {
        let p = Self { alpha, m, n };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.alpha.is_finite() && self.alpha > -0.5) {
            return Err(Error::InvalidParameter(format!(
                "alpha must exceed -1/2, got {}",
                self.alpha
            )));
        }
        if !(self.m.is_finite() && self.m >= 0.0 && self.n.is_finite() && self.n >= 0.0) {
            return Err(Error::InvalidParameter(format!(
                "M and N must be finite and nonnegative, got M = {}, N = {}",
                self.m, self.n
            )));
        }
        Ok(())
    }

    /// True for `-1/2 < α <= 1/2`: the weight is integrable but the value
    /// lies below the range `α > 1/2` printed with the original statement.
    pub fn outside_stated_range(&self) -> bool {
        self.alpha <= 0.5
    }

    pub fn warnings(&self) -> Vec<String> {
        if self.outside_stated_range() {
            vec![format!(
                "alpha = {} is integrable but outside the stated range alpha > 1/2",
                self.alpha
            )]
        } else {
            Vec::new()
        }
    }
}

/// Masses at `-1` and `+1` with weights `[M, N]`; `[M]` when `N = 0`; none
/// when `M = N = 0`.
pub fn make_space(params: &GegenbauerSobolevParams) -> Result<SobolevSpaceSpec> {
    params.validate()?;
    let weights = if params.n > 0.0 {
        Some(vec![params.m, params.n])
    } else if params.m > 0.0 {
        Some(vec![params.m])
    } else {
        None
    };
    let masses = weights
        .map(|w| vec![MassPoint::new(-1.0, w.clone()), MassPoint::new(1.0, w)])
        .unwrap_or_default();
    SobolevSpaceSpec::new(MeasureSpec::gegenbauer(params.alpha), masses)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComplianceBundle {
    pub params: GegenbauerSobolevParams,
    pub nmax: usize,
    pub delta: f64,
    pub warnings: Vec<String>,
    pub reports: Vec<HypothesisReport>,
}

impl ComplianceBundle {
    pub fn verdict(&self) -> Verdict {
        self.reports
            .iter()
            .fold(Verdict::Passes, |v, r| v.combine(r.verdict))
    }

    pub fn any_fails(&self) -> bool {
        self.reports.iter().any(|r| r.verdict == Verdict::Fails)
    }

    pub fn get(&self, condition: &str) -> Option<&HypothesisReport> {
        self.reports.iter().find(|r| r.condition == condition)
    }
}

/// Runs the majorant, recurrence-summability, absolute-continuity,
/// derivative-sum and integrability checks on the preset space, with
/// `δ = 0.1`, `p = q = 2` and default tolerances.
pub fn remark_compliance_suite(
    params: &GegenbauerSobolevParams,
    nmax: usize,
) -> Result<ComplianceBundle> {
    remark_compliance_suite_with(params, nmax, &Region::new(0.1)?, &Tolerances::default())
}

pub fn remark_compliance_suite_with(
    params: &GegenbauerSobolevParams,
    nmax: usize,
    region: &Region,
    tol: &Tolerances,
) -> Result<ComplianceBundle> {
    let space = make_space(params)?;
    let basis = compute_orthonormal_basis(&space, nmax)?;
    let stab = tol.stabilization_tol;

    let majorant = estimate_majorant_on_region(&basis, region, DEFAULT_GRID, nmax)?;
    let pi = build_pi_polynomial(&space)?;
    let band = recurrence_coefficients(&basis, &pi, &space, nmax)?;
    let smax = nmax
        .checked_sub(2 * band.width())
        .ok_or(Error::BandTooShort {
            required: 2 * band.width(),
            available: nmax,
        })?;
    let on_rule = estimate_majorant_on_rule(&basis, nmax)?;

    let reports = vec![
        majorant.report(stab),
        check_recurrence_summability(&band, smax, stab)?,
        check_absolute_continuity(&space),
        check_derivative_sums(&basis, nmax, stab)?,
        check_integrability(&on_rule, None, 2.0, Some(2.0), stab)?,
    ];
    Ok(ComplianceBundle {
        params: *params,
        nmax,
        delta: region.delta,
        warnings: params.warnings(),
        reports,
    })
}

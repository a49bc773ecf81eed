//! Finite-sample diagnostics for the hypotheses of the convergence theorems
//! (majorant, recurrence summability, absolute continuity, derivative sums,
//! integrability) and probes of their conclusions.
//!
//! Every asymptotic condition gets a three-valued verdict computed from a
//! trace that is stored in the report.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::expansion::{fourier_coefficients, SobolevSeries};
use crate::function::TargetFunction;
use crate::measure::{gauss_rule, MeasureSpec};
use crate::multiplier::MultiplierSequence;
use crate::quadrature::QuadratureRule;
use crate::report::{dyadic_series_verdict, HypothesisReport, Verdict};
use crate::sobolev::{require, Differentiable, RecurrenceBand, SobolevBasis, SobolevSpaceSpec};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    /// Relative growth allowed over the last dyadic block.
    pub stabilization_tol: f64,
    /// Final Cauchy increment required for a convergence verdict.
    pub cauchy_tol: f64,
    /// Relative growth of the empirical norm ratio allowed over the last
    /// dyadic step of the schedule.
    pub bound_growth_tol: f64,
    /// Tail tolerance for multiplier quasiconvexity.
    pub tail_tol: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            stabilization_tol: 0.05,
            cauchy_tol: 1e-6,
            bound_growth_tol: 0.10,
            tail_tol: crate::multiplier::DEFAULT_TAIL_TOL,
        }
    }
}

impl Tolerances {
    pub fn set(&mut self, name: &str, value: f64) -> Result<()> {
        if !(value.is_finite() && value > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "tolerance {name} must be positive"
            )));
        }
        let slot = match name {
            "stabilization_tol" => &mut self.stabilization_tol,
            "cauchy_tol" => &mut self.cauchy_tol,
            "bound_growth_tol" => &mut self.bound_growth_tol,
            "tail_tol" => &mut self.tail_tol,
            _ => return Err(Error::InvalidParameter(format!("unknown tolerance {name}"))),
        };
        *slot = value;
        Ok(())
    }
}

/// `K_δ = [-1+δ, 1-δ] ∪ {mass points}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Region {
    pub delta: f64,
}

pub const DEFAULT_GRID: usize = 201;

impl Region {
    pub fn new(delta: f64) -> Result<Self> {
        if !(delta > 0.0 && delta < 1.0) {
            return Err(Error::InvalidParameter(format!(
                "delta must lie in (0, 1), got {delta}"
            )));
        }
        Ok(Self { delta })
    }

    pub fn lo(&self) -> f64 {
        -1.0 + self.delta
    }

    pub fn hi(&self) -> f64 {
        1.0 - self.delta
    }

    pub fn contains(&self, space: &SobolevSpaceSpec, x: f64) -> bool {
        (self.lo()..=self.hi()).contains(&x) || space.mass_locations().contains(&x)
    }

    /// `size` equispaced points on `[-1+δ, 1-δ]` plus every mass point,
    /// sorted ascending.
    pub fn grid(&self, space: &SobolevSpaceSpec, size: usize) -> Vec<f64> {
        let mut pts: Vec<f64> = if size == 1 {
            vec![0.5 * (self.lo() + self.hi())]
        } else {
            let h = (self.hi() - self.lo()) / (size - 1) as f64;
            (0..size).map(|i| self.lo() + i as f64 * h).collect()
        };
        pts.extend(space.mass_locations());
        pts.sort_by(f64::total_cmp);
        pts.dedup();
        pts
    }
}

/// Integration domain for [`wp_norm`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Domain {
    Full,
    Compact(Region),
    Interval { lo: f64, hi: f64 },
}

/// `ĥ(t) = max_{k<=Kmax} |q̂_k(t)|` on a set of points. This is a lower
/// bound for any majorant `h` with `|q̂_k| <= h`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MajorantEstimate {
    pub points: Vec<f64>,
    pub values: Vec<f64>,
    /// `max_{k<=Kmax/2} |q̂_k(t)|`, for trend checks of derived integrals.
    pub half_values: Vec<f64>,
    /// Quadrature weights when the points are the nodes of a rule.
    pub weights: Option<Vec<f64>>,
    pub kmax: usize,
    /// Last index of each block `{0}, {1}, (1, 2], (2, 4], ...`.
    pub block_ends: Vec<usize>,
    /// Max over all points and over `k` in each block.
    pub block_maxima: Vec<f64>,
}

impl MajorantEstimate {
    fn from_table(
        points: Vec<f64>,
        table: &[Vec<f64>],
        kmax: usize,
        weights: Option<Vec<f64>>,
    ) -> Self {
        let mut block_ends = vec![0];
        let mut end = 1;
        while end <= kmax {
            block_ends.push(end);
            end *= 2;
        }
        if *block_ends.last().unwrap() < kmax {
            block_ends.push(kmax);
        }
        let mut block_maxima = vec![0.0; block_ends.len()];
        let mut values = Vec::with_capacity(points.len());
        let mut half_values = Vec::with_capacity(points.len());
        for row in table {
            let mut b = 0;
            for (k, v) in row[..=kmax].iter().enumerate() {
                while block_ends[b] < k {
                    b += 1;
                }
                block_maxima[b] = f64::max(block_maxima[b], v.abs());
            }
            values.push(row[..=kmax].iter().fold(0.0, |m: f64, v| m.max(v.abs())));
            half_values.push(
                row[..=kmax / 2]
                    .iter()
                    .fold(0.0, |m: f64, v| m.max(v.abs())),
            );
        }
        Self {
            points,
            values,
            half_values,
            weights,
            kmax,
            block_ends,
            block_maxima,
        }
    }

    /// A majorant given directly by its values (its own "half" values).
    pub fn from_values(points: Vec<f64>, values: Vec<f64>, weights: Option<Vec<f64>>) -> Self {
        Self {
            half_values: values.clone(),
            block_ends: vec![0],
            block_maxima: vec![values.iter().fold(0.0, |m: f64, v| m.max(v.abs()))],
            points,
            values,
            weights,
            kmax: 0,
        }
    }

    /// `B_last / B_prev - 1` for the last two blocks.
    pub fn growth(&self) -> Option<f64> {
        let n = self.block_maxima.len();
        (n >= 3).then(|| self.block_maxima[n - 1] / self.block_maxima[n - 2] - 1.0)
    }

    pub fn verdict(&self, tol: f64) -> Verdict {
        let n = self.block_maxima.len();
        if n < 4 {
            return Verdict::Inconclusive;
        }
        let last = self.block_maxima[n - 1] / self.block_maxima[n - 2] - 1.0;
        let prev = self.block_maxima[n - 2] / self.block_maxima[n - 3] - 1.0;
        if last <= tol {
            Verdict::Passes
        } else if prev > tol && last >= 0.9 * prev {
            Verdict::Fails
        } else {
            Verdict::Inconclusive
        }
    }

    pub fn report(&self, tol: f64) -> HypothesisReport {
        let verdict = self.verdict(tol);
        HypothesisReport::new(
            "eq2",
            verdict,
            format!(
                "empirical majorant over k <= {} on {} points",
                self.kmax,
                self.points.len()
            ),
        )
        .with_tolerance("stabilization_tol", tol)
        .with_value("kmax", self.kmax as f64)
        .with_value("growth_last_block", self.growth().unwrap_or(f64::NAN))
        .with_value("sup", self.values.iter().fold(0.0, |m: f64, v| m.max(*v)))
        .with_trace(
            "block_ends",
            self.block_ends.iter().map(|&e| e as f64).collect(),
        )
        .with_trace("block_maxima", self.block_maxima.clone())
        .with_trace("points", self.points.clone())
        .with_trace("h", self.values.clone())
        .with_note("h is a lower bound for any true majorant; stabilization is evidence, not proof")
    }
}

fn check_kmax(basis: &SobolevBasis, kmax: usize) -> Result<()> {
    if kmax > basis.nmax() {
        return Err(Error::OutOfRange {
            index: kmax,
            max: basis.nmax(),
        });
    }
    Ok(())
}

pub fn estimate_majorant(
    basis: &SobolevBasis,
    points: &[f64],
    kmax: usize,
) -> Result<MajorantEstimate> {
    check_kmax(basis, kmax)?;
    let table: Vec<Vec<f64>> = points.iter().map(|&t| basis.eval_all(t, 0)).collect();
    Ok(MajorantEstimate::from_table(
        points.to_vec(),
        &table,
        kmax,
        None,
    ))
}

pub fn estimate_majorant_on_region(
    basis: &SobolevBasis,
    region: &Region,
    grid_size: usize,
    kmax: usize,
) -> Result<MajorantEstimate> {
    estimate_majorant(basis, &region.grid(basis.space(), grid_size), kmax)
}

/// Majorant sampled at the nodes of the basis' shared rule, carrying the
/// rule weights for the integrability surrogates.
pub fn estimate_majorant_on_rule(basis: &SobolevBasis, kmax: usize) -> Result<MajorantEstimate> {
    check_kmax(basis, kmax)?;
    let rule = basis.rule();
    let table: Vec<Vec<f64>> = (0..rule.len())
        .map(|i| (0..=kmax).map(|n| basis.node_values(n)[i]).collect())
        .collect();
    Ok(MajorantEstimate::from_table(
        rule.nodes.clone(),
        &table,
        kmax,
        Some(rule.weights.clone()),
    ))
}

/// Partial sums over `s = 0..=smax` of
/// `Σ_{j=1}^{W} j Σ_{l=0}^{W} (|d_{s+j,j} - d_{s+j+l,j}| + |d_{s+j,l} - d_{s+j+l,l}|)`
/// with `W` the band width.
pub fn check_recurrence_summability(
    band: &RecurrenceBand,
    smax: usize,
    tol: f64,
) -> Result<HypothesisReport> {
    let w = band.width();
    if band.nmax() < smax + 2 * w {
        return Err(Error::BandTooShort {
            required: smax + 2 * w,
            available: band.nmax(),
        });
    }
    let mut terms = Vec::with_capacity(smax + 1);
    let mut partials = Vec::with_capacity(smax + 1);
    let mut total = 0.0;
    for s in 0..=smax {
        let mut term = 0.0;
        for j in 1..=w {
            let mut inner = 0.0;
            for l in 0..=w {
                inner += (band.get(s + j, j) - band.get(s + j + l, j)).abs();
                inner += (band.get(s + j, l) - band.get(s + j + l, l)).abs();
            }
            term += j as f64 * inner;
        }
        total += term;
        terms.push(term);
        partials.push(total);
    }
    let (verdict, last, prev) = dyadic_series_verdict(&partials, tol);
    Ok(HypothesisReport::new(
        "eq3",
        verdict,
        format!("recurrence-difference sums truncated at s = {smax}, band width {w}"),
    )
    .with_tolerance("stabilization_tol", tol)
    .with_value("total", total)
    .with_value("last_dyadic_increment", last)
    .with_value("previous_dyadic_increment", prev)
    .with_trace("terms", terms)
    .with_trace("partial_sums", partials))
}

/// Monotone partial sums `Σ_{j<=n} |v_j|` for each labelled sequence, with
/// a combined verdict.
pub fn derivative_sums_report(sequences: &[(String, Vec<f64>)], tol: f64) -> HypothesisReport {
    let mut verdict = Verdict::Passes;
    let mut traces = BTreeMap::new();
    let mut values = BTreeMap::new();
    for (label, seq) in sequences {
        let partials: Vec<f64> = seq
            .iter()
            .scan(0.0, |s, v| {
                *s += v.abs();
                Some(*s)
            })
            .collect();
        let (v, last, _) = dyadic_series_verdict(&partials, tol);
        verdict = verdict.combine(v);
        values.insert(format!("{label} total"), *partials.last().unwrap_or(&0.0));
        values.insert(format!("{label} last_dyadic_increment"), last);
        traces.insert(label.clone(), partials);
    }
    let mut report = HypothesisReport::new(
        "eq7",
        verdict,
        format!(
            "partial sums of |q_j^(i)(a)| for {} (point, order) pairs",
            sequences.len()
        ),
    )
    .with_tolerance("stabilization_tol", tol);
    report.traces = traces;
    report.values = values;
    if sequences.is_empty() {
        report = report.with_note("no mass points: condition holds vacuously");
    }
    report
}

pub fn check_derivative_sums(
    basis: &SobolevBasis,
    nmax: usize,
    tol: f64,
) -> Result<HypothesisReport> {
    check_kmax(basis, nmax)?;
    let mut seqs = Vec::new();
    for (k, mp) in basis.space().masses.iter().enumerate() {
        for i in 0..=mp.order {
            let seq = (0..=nmax).map(|n| basis.mass_derivative(n, k, i)).collect();
            seqs.push((format!("a={} i={i}", mp.location), seq));
        }
    }
    Ok(derivative_sums_report(&seqs, tol))
}

/// Structural check that θ is absolutely continuous with a continuous
/// density, from the measure's declared kind.
pub fn check_absolute_continuity(space: &SobolevSpaceSpec) -> HypothesisReport {
    let (verdict, why) = match &space.measure {
        MeasureSpec::Legendre | MeasureSpec::Gegenbauer { .. } => (
            Verdict::Passes,
            "named classical weight with continuous density",
        ),
        MeasureSpec::Recurrence {
            absolutely_continuous: true,
            ..
        } => (
            Verdict::Passes,
            "recurrence-given measure with declared continuous density",
        ),
        MeasureSpec::Recurrence { .. } => (
            Verdict::Fails,
            "recurrence-given measure without a declared density",
        ),
        MeasureSpec::Tabulated { .. } => (Verdict::Fails, "tabulated measures are discrete"),
    };
    HypothesisReport::new("eq6", verdict, why)
        .with_note("checked from measure metadata, not from samples")
}

/// Surrogates for `∫|f|^p h^p dθ < ∞`, `∫h^p dθ < ∞` (condition id `eq5`
/// when `f` is given) and `‖h‖_p, ‖h‖_q` (`eq8`), using the empirical
/// majorant sampled on a quadrature rule.
pub fn check_integrability(
    h: &MajorantEstimate,
    f: Option<&dyn Differentiable>,
    p: f64,
    q: Option<f64>,
    tol: f64,
) -> Result<HypothesisReport> {
    if !(p.is_finite() && p >= 1.0) {
        return Err(Error::InvalidParameter(format!(
            "p must lie in [1, inf), got {p}"
        )));
    }
    if let Some(q) = q {
        if !(p > 1.0 && ((1.0 / p + 1.0 / q) - 1.0).abs() <= 1e-12) {
            return Err(Error::NotConjugate { p, q });
        }
    }
    let w = h.weights.as_ref().ok_or_else(|| {
        Error::InvalidParameter("majorant must be sampled on quadrature nodes".into())
    })?;
    let integral =
        |vals: &[f64], e: f64| -> f64 { vals.iter().zip(w).map(|(v, wi)| wi * v.powf(e)).sum() };
    let int_h_p = integral(&h.values, p);
    let int_h_p_half = integral(&h.half_values, p);
    let mut report = HypothesisReport::new(
        if f.is_some() { "eq5" } else { "eq8" },
        Verdict::Passes,
        "",
    )
    .with_tolerance("stabilization_tol", tol)
    .with_value("p", p)
    .with_value("int_h_p", int_h_p)
    .with_value("int_h_p_half_kmax", int_h_p_half)
    .with_value("norm_h_p", int_h_p.powf(1.0 / p))
    .with_note(
        "finite-sample surrogate: a true majorant h >= h_hat only increases these integrals",
    );
    let mut finite = int_h_p.is_finite();
    if let Some(q) = q {
        let nq = integral(&h.values, q).powf(1.0 / q);
        finite &= nq.is_finite();
        report = report.with_value("q", q).with_value("norm_h_q", nq);
    }
    if let Some(f) = f {
        let fv: Vec<f64> = h
            .points
            .iter()
            .map(|&x| require(f, x, 0).map(f64::abs))
            .collect::<Result<_>>()?;
        let weighted = |vals: &[f64]| -> f64 {
            vals.iter()
                .zip(&fv)
                .zip(w)
                .map(|((v, fx), wi)| wi * (fx * v).powf(p))
                .sum()
        };
        let a = weighted(&h.values);
        let b = weighted(&h.half_values);
        finite &= a.is_finite();
        report = report
            .with_value("int_f_h_p", a)
            .with_value("int_f_h_p_half_kmax", b);
        report.summary = format!("integrability of |f| h and h in L^p, f = {}", f.label());
    } else {
        report.summary = "integrability of h in L^p and L^q".into();
    }
    let growth = if int_h_p > 0.0 {
        (int_h_p - int_h_p_half) / int_h_p
    } else {
        0.0
    };
    report = report.with_value("relative_growth_h_p", growth);
    report.verdict = if !finite {
        Verdict::Fails
    } else if growth <= tol {
        Verdict::Passes
    } else {
        Verdict::Inconclusive
    };
    Ok(report)
}

const PANELS: usize = 32;
const PANEL_POINTS: usize = 16;

/// `(∫_F |f|^p dθ + Σ_{a_k ∈ F} Σ_i M_{k,i} |f^{(i)}(a_k)|^p)^{1/p}`.
///
/// On the full interval the continuous part uses `rule`. On a subinterval
/// it uses composite Gauss-Legendre panels times the density, or, for
/// measures without a density, the nodes of `rule` that fall inside.
pub fn wp_norm(
    f: &dyn Differentiable,
    space: &SobolevSpaceSpec,
    p: f64,
    domain: Domain,
    rule: &QuadratureRule,
) -> Result<f64> {
    if !(p.is_finite() && p >= 1.0) {
        return Err(Error::InvalidParameter(format!(
            "p must lie in [1, inf), got {p}"
        )));
    }
    let (lo, hi) = match domain {
        Domain::Full => (-1.0, 1.0),
        Domain::Compact(r) => (r.lo(), r.hi()),
        Domain::Interval { lo, hi } => {
            if !(lo < hi) {
                return Err(Error::InvalidParameter(format!(
                    "empty interval [{lo}, {hi}]"
                )));
            }
            (lo, hi)
        }
    };
    let pow = |v: f64| v.abs().powf(p);
    let continuous = if domain == Domain::Full || space.measure.density(0.0).is_none() {
        let mut s = 0.0;
        for (&x, &w) in rule.nodes.iter().zip(&rule.weights) {
            if (lo..=hi).contains(&x) {
                s += w * pow(require(f, x, 0)?);
            }
        }
        s
    } else {
        let panel = gauss_rule(&MeasureSpec::Legendre, PANEL_POINTS)?;
        let h = (hi - lo) / PANELS as f64;
        let mut s = 0.0;
        for i in 0..PANELS {
            let a = lo + i as f64 * h;
            let sub = panel.mapped(a, a + h);
            for (&x, &w) in sub.nodes.iter().zip(&sub.weights) {
                let dens = space.measure.density(x).unwrap_or(0.0);
                // the Legendre rule carries mass 1 = ∫ dx / 2
                s += 2.0 * w * dens * pow(require(f, x, 0)?);
            }
        }
        s
    };
    let mut discrete = 0.0;
    for mp in &space.masses {
        let inside = match domain {
            Domain::Full | Domain::Compact(_) => true,
            Domain::Interval { lo, hi } => (lo..=hi).contains(&mp.location),
        };
        if !inside {
            continue;
        }
        for (i, &m) in mp.weights.iter().enumerate() {
            if m > 0.0 {
                discrete += m * pow(require(f, mp.location, i)?);
            }
        }
    }
    Ok((continuous + discrete).powf(1.0 / p))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceReport {
    /// `thm1i` (pointwise) or `thm1ii` (uniform on a compact).
    pub condition: String,
    pub function: String,
    pub multiplier: String,
    pub schedule: Vec<usize>,
    pub points: Vec<f64>,
    /// `[point][i]` = `T_{schedule[i]}(f; point; Φ)`.
    pub traces: Vec<Vec<f64>>,
    /// `sup_points |T_{schedule[i+1]} - T_{schedule[i]}|`.
    pub increments: Vec<f64>,
    pub cauchy_tol: f64,
    pub verdict: Verdict,
}

impl ConvergenceReport {
    pub fn to_report(&self) -> HypothesisReport {
        let mut r = HypothesisReport::new(
            self.condition.clone(),
            self.verdict,
            format!(
                "Cauchy increments of T_n({}; x; {}) over {} points",
                self.function,
                self.multiplier,
                self.points.len()
            ),
        )
        .with_tolerance("cauchy_tol", self.cauchy_tol)
        .with_trace(
            "schedule",
            self.schedule.iter().map(|&n| n as f64).collect(),
        )
        .with_trace("increments", self.increments.clone())
        .with_trace("points", self.points.clone());
        if self.points.len() <= 16 {
            for (x, t) in self.points.iter().zip(&self.traces) {
                r.traces.insert(format!("T at x={x}"), t.clone());
            }
        }
        r
    }
}

fn convergence_verdict(incs: &[f64], tol: f64) -> Verdict {
    if incs.iter().all(|&v| v == 0.0) {
        return Verdict::Passes;
    }
    let last = *incs.last().unwrap();
    let decreasing = incs.windows(2).all(|w| w[1] < w[0] || w[1] == 0.0);
    if decreasing && last <= tol {
        Verdict::Passes
    } else if incs.len() >= 2 && last > tol && last >= incs[incs.len() - 2] {
        Verdict::Fails
    } else {
        Verdict::Inconclusive
    }
}

fn check_schedule(schedule: &[usize], basis: &SobolevBasis) -> Result<()> {
    if schedule.len() < 2 || schedule.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidParameter(
            "schedule needs at least two strictly increasing entries".into(),
        ));
    }
    check_kmax(basis, *schedule.last().unwrap())
}

/// Traces of `T_n(f; x; Φ)` over `schedule` at each point of `points`,
/// with Cauchy increments between consecutive schedule entries.
pub fn convergence_probe(
    f: &TargetFunction,
    phi: &MultiplierSequence,
    basis: &SobolevBasis,
    points: &[f64],
    schedule: &[usize],
    cauchy_tol: f64,
) -> Result<ConvergenceReport> {
    let space = basis.space();
    for &x in points {
        if !space.in_admissible_set(x) {
            return Err(Error::PointOutsideRegion(x));
        }
        if !f.is_continuous_at(x) {
            return Err(Error::DiscontinuityPoint {
                function: f.name().to_string(),
                point: x,
            });
        }
    }
    probe(f, phi, basis, points, schedule, cauchy_tol, "thm1i")
}

/// Uniform variant: sup of the increments over the grid of `region`.
pub fn uniform_convergence_probe(
    f: &TargetFunction,
    phi: &MultiplierSequence,
    basis: &SobolevBasis,
    region: &Region,
    grid_size: usize,
    schedule: &[usize],
    cauchy_tol: f64,
) -> Result<ConvergenceReport> {
    let grid = region.grid(basis.space(), grid_size);
    if let Some(&x) = f
        .discontinuities()
        .iter()
        .find(|&&x| region.contains(basis.space(), x))
    {
        return Err(Error::DiscontinuityPoint {
            function: f.name().to_string(),
            point: x,
        });
    }
    probe(f, phi, basis, &grid, schedule, cauchy_tol, "thm1ii")
}

fn probe(
    f: &TargetFunction,
    phi: &MultiplierSequence,
    basis: &SobolevBasis,
    points: &[f64],
    schedule: &[usize],
    cauchy_tol: f64,
    condition: &str,
) -> Result<ConvergenceReport> {
    check_schedule(schedule, basis)?;
    let coeffs = fourier_coefficients(f, basis, *schedule.last().unwrap())?;
    let series: Vec<SobolevSeries> = schedule
        .iter()
        .map(|&n| SobolevSeries::transform(&coeffs, phi, basis, n))
        .collect::<Result<_>>()?;
    let traces: Vec<Vec<f64>> = points
        .iter()
        .map(|&x| series.iter().map(|s| s.value(x)).collect())
        .collect();
    let increments: Vec<f64> = (1..schedule.len())
        .map(|i| {
            traces
                .iter()
                .map(|t| (t[i] - t[i - 1]).abs())
                .fold(0.0, f64::max)
        })
        .collect();
    Ok(ConvergenceReport {
        condition: condition.into(),
        function: f.name().to_string(),
        multiplier: phi.name().to_string(),
        schedule: schedule.to_vec(),
        points: points.to_vec(),
        verdict: convergence_verdict(&increments, cauchy_tol),
        traces,
        increments,
        cauchy_tol,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RatioTrace {
    pub function: String,
    /// `‖f‖_{W^p([-1, 1])}`.
    pub norm: f64,
    /// `‖T_n f‖_{W^p(K_δ)} / ‖f‖_{W^p([-1, 1])}` over the schedule.
    pub ratios: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    pub p: f64,
    pub delta: f64,
    pub multiplier: String,
    pub schedule: Vec<usize>,
    pub functions: Vec<RatioTrace>,
    /// Largest observed ratio.
    pub empirical_constant: f64,
    /// Largest relative growth of `max_{n' <= n} R` over the last schedule step.
    pub growth: f64,
    pub growth_tol: f64,
    pub verdict: Verdict,
}

impl BoundReport {
    /// `max_f max_{n' <= n} R(f, n')`.
    pub fn max_ratio_up_to(&self, n: usize) -> f64 {
        let upto = self.schedule.iter().take_while(|&&m| m <= n).count();
        self.functions
            .iter()
            .flat_map(|f| f.ratios[..upto].iter().copied())
            .fold(0.0, f64::max)
    }

    pub fn to_report(&self) -> HypothesisReport {
        let mut r = HypothesisReport::new(
            "thm2",
            self.verdict,
            format!(
                "W^p norm ratios of T_n f on K_delta, p = {}, multiplier {}",
                self.p, self.multiplier
            ),
        )
        .with_tolerance("bound_growth_tol", self.growth_tol)
        .with_value("p", self.p)
        .with_value("delta", self.delta)
        .with_value("empirical_constant", self.empirical_constant)
        .with_value("growth_last_step", self.growth)
        .with_trace(
            "schedule",
            self.schedule.iter().map(|&n| n as f64).collect(),
        );
        for f in &self.functions {
            r.traces
                .insert(format!("ratio {}", f.function), f.ratios.clone());
            r.values.insert(format!("norm {}", f.function), f.norm);
        }
        r
    }
}

pub fn theorem2_ratio(
    suite: &[TargetFunction],
    phi: &MultiplierSequence,
    basis: &SobolevBasis,
    region: &Region,
    p: f64,
    schedule: &[usize],
    growth_tol: f64,
) -> Result<BoundReport> {
    if !(p > 1.0 && p.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "p must lie in (1, inf), got {p}"
        )));
    }
    check_schedule(schedule, basis)?;
    let space = basis.space();
    let nmax = *schedule.last().unwrap();
    let mut functions = Vec::with_capacity(suite.len());
    let mut growth: f64 = 0.0;
    for f in suite {
        let norm = wp_norm(f, space, p, Domain::Full, basis.rule())?;
        if norm == 0.0 {
            return Err(Error::ZeroNorm(f.name().to_string()));
        }
        let coeffs = fourier_coefficients(f, basis, nmax)?;
        let ratios: Vec<f64> = schedule
            .iter()
            .map(|&n| {
                let t = SobolevSeries::transform(&coeffs, phi, basis, n)?;
                Ok(wp_norm(&t, space, p, Domain::Compact(*region), basis.rule())? / norm)
            })
            .collect::<Result<_>>()?;
        let all = ratios.iter().copied().fold(0.0, f64::max);
        let before = ratios[..ratios.len() - 1]
            .iter()
            .copied()
            .fold(0.0, f64::max);
        growth = growth.max(all / before - 1.0);
        functions.push(RatioTrace {
            function: f.name().to_string(),
            norm,
            ratios,
        });
    }
    let empirical_constant = functions
        .iter()
        .flat_map(|f| f.ratios.iter().copied())
        .fold(0.0, f64::max);
    let verdict = if growth <= growth_tol {
        Verdict::Passes
    } else {
        Verdict::Inconclusive
    };
    Ok(BoundReport {
        p,
        delta: region.delta,
        multiplier: phi.name().to_string(),
        schedule: schedule.to_vec(),
        functions,
        empirical_constant,
        growth,
        growth_tol,
        verdict,
    })
}

/// Empirical constants of [`theorem2_ratio`] for several multipliers, and
/// their spread `max / min`.
pub fn theorem2_spread(
    suite: &[TargetFunction],
    phis: &[MultiplierSequence],
    basis: &SobolevBasis,
    region: &Region,
    p: f64,
    schedule: &[usize],
    growth_tol: f64,
) -> Result<HypothesisReport> {
    let mut verdict = Verdict::Passes;
    let mut consts = Vec::with_capacity(phis.len());
    let mut r = HypothesisReport::new("thm2", Verdict::Passes, "");
    for phi in phis {
        let b = theorem2_ratio(suite, phi, basis, region, p, schedule, growth_tol)?;
        verdict = verdict.combine(b.verdict);
        r.values
            .insert(format!("constant {}", phi.name()), b.empirical_constant);
        consts.push(b.empirical_constant);
    }
    let hi = consts.iter().copied().fold(0.0, f64::max);
    let lo = consts.iter().copied().fold(f64::INFINITY, f64::min);
    r.verdict = verdict;
    r.summary = format!(
        "spread of the empirical constant across {} multipliers",
        phis.len()
    );
    r.values.insert("spread_max_over_min".into(), hi / lo);
    r.traces.insert("constants".into(), consts);
    Ok(r.with_tolerance("bound_growth_tol", growth_tol)
        .with_note("no finite set of multipliers certifies independence from the multiplier"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::multiplier::{builtin_multiplier, BuiltinMultiplier};
    use crate::sobolev::{compute_orthonormal_basis, sobolev_inner_product, MassPoint};

    fn legendre_unit_masses() -> SobolevSpaceSpec {
        SobolevSpaceSpec::new(
            MeasureSpec::Legendre,
            vec![
                MassPoint::new(-1.0, vec![1.0]),
                MassPoint::new(1.0, vec![1.0]),
            ],
        )
        .unwrap()
    }

    #[test]
    fn region_grid_includes_masses() {
        let space = legendre_unit_masses();
        let r = Region::new(0.1).unwrap();
        let g = r.grid(&space, 201);
        assert_eq!(g.len(), 203);
        assert_eq!(g[0], -1.0);
        assert_eq!(g[202], 1.0);
        assert!((g[1] + 0.9).abs() < 1e-15);
        assert!(r.contains(&space, 1.0) && !r.contains(&space, 0.95));
        assert!(Region::new(0.0).is_err());
    }

    #[test]
    fn majorant_with_zero_kmax() {
        let basis = compute_orthonormal_basis(&legendre_unit_masses(), 8).unwrap();
        let h = estimate_majorant(&basis, &[0.3, 1.0], 0).unwrap();
        assert_eq!(h.values, vec![1.0 / 3f64.sqrt(); 2]);
        assert_eq!(h.verdict(0.05), Verdict::Inconclusive);
    }

    #[test]
    fn majorant_dominates_every_computed_value() {
        let basis = compute_orthonormal_basis(&legendre_unit_masses(), 32).unwrap();
        let pts = [-1.0, -0.5, 0.0, 0.33, 1.0];
        let h = estimate_majorant(&basis, &pts, 32).unwrap();
        for (i, &t) in pts.iter().enumerate() {
            for n in 0..=32 {
                assert!(basis.eval(n, t, 0).unwrap().abs() <= h.values[i]);
            }
        }
    }

    #[test]
    fn legendre_majorant_stabilizes_on_compact() {
        let space = SobolevSpaceSpec::plain(MeasureSpec::Legendre);
        let basis = compute_orthonormal_basis(&space, 128).unwrap();
        let h = estimate_majorant_on_region(&basis, &Region::new(0.1).unwrap(), 201, 128).unwrap();
        assert_eq!(h.verdict(0.05), Verdict::Passes);
    }

    #[test]
    fn summability_on_constant_and_alternating_bands() {
        let constant = RecurrenceBand::from_fn(60, 2, |_, j| 1.0 + j as f64);
        let r = check_recurrence_summability(&constant, 50, 0.05).unwrap();
        assert_eq!(r.values["total"], 0.0);
        assert_eq!(r.verdict, Verdict::Passes);

        let alternating = RecurrenceBand::from_fn(60, 1, |n, j| {
            if j == 1 {
                if n % 2 == 0 {
                    1.0
                } else {
                    -1.0
                }
            } else {
                0.5
            }
        });
        let r = check_recurrence_summability(&alternating, 50, 0.05).unwrap();
        assert_eq!(r.verdict, Verdict::Fails);
        assert_eq!(r.values["total"], 4.0 * 51.0);

        assert!(matches!(
            check_recurrence_summability(&constant, 57, 0.05),
            Err(Error::BandTooShort { .. })
        ));
    }

    #[test]
    fn eventually_constant_band_total_is_finite_sum() {
        // d_{n,1} = 1 for n >= 3, else 0; d_{n,0} = 0
        let band = RecurrenceBand::from_fn(40, 1, |n, j| if j == 1 && n >= 3 { 1.0 } else { 0.0 });
        let r = check_recurrence_summability(&band, 30, 0.05).unwrap();
        // term_s = 2 |d_{s+1,1} - d_{s+2,1}|: nonzero only for s = 1
        assert!((r.values["total"] - 2.0).abs() < 1e-12);
        assert_eq!(r.verdict, Verdict::Passes);
    }

    #[test]
    fn derivative_sums_artificial_and_vacuous() {
        let ones = vec![("a=1 i=0".to_string(), vec![1.0; 65])];
        let r = derivative_sums_report(&ones, 0.05);
        assert_eq!(r.verdict, Verdict::Fails);
        assert_eq!(*r.traces["a=1 i=0"].last().unwrap(), 65.0);

        let basis =
            compute_orthonormal_basis(&SobolevSpaceSpec::plain(MeasureSpec::Legendre), 16).unwrap();
        let r = check_derivative_sums(&basis, 16, 0.05).unwrap();
        assert_eq!(r.verdict, Verdict::Passes);
        assert!(r.traces.is_empty());
    }

    #[test]
    fn structural_check_by_measure_kind() {
        let plain = |m| SobolevSpaceSpec::plain(m);
        assert_eq!(
            check_absolute_continuity(&plain(MeasureSpec::Legendre)).verdict,
            Verdict::Passes
        );
        let tab = MeasureSpec::Tabulated {
            nodes: vec![-0.5, 0.5],
            weights: vec![0.5, 0.5],
        };
        assert_eq!(
            check_absolute_continuity(&plain(tab)).verdict,
            Verdict::Fails
        );
        let rec = |ac| MeasureSpec::Recurrence {
            coefficients: vec![[0.0, 1.0], [0.0, 1.0 / 3.0]],
            absolutely_continuous: ac,
        };
        assert_eq!(
            check_absolute_continuity(&plain(rec(true))).verdict,
            Verdict::Passes
        );
        assert_eq!(
            check_absolute_continuity(&plain(rec(false))).verdict,
            Verdict::Fails
        );
    }

    #[test]
    fn integrability_of_unit_majorant() {
        let rule = gauss_rule(&MeasureSpec::Legendre, 10).unwrap();
        let h = MajorantEstimate::from_values(
            rule.nodes.clone(),
            vec![1.0; 10],
            Some(rule.weights.clone()),
        );
        let one = TargetFunction::parse("one").unwrap();
        let r = check_integrability(&h, Some(&one), 2.0, Some(2.0), 0.05).unwrap();
        assert!((r.values["int_h_p"] - 1.0).abs() < 1e-14);
        assert!((r.values["int_f_h_p"] - 1.0).abs() < 1e-14);
        assert_eq!(r.verdict, Verdict::Passes);
        assert_eq!(r.condition, "eq5");
        assert!(check_integrability(&h, None, 3.0, Some(1.5), 0.05).is_ok());
        assert!(matches!(
            check_integrability(&h, None, 3.0, Some(2.0), 0.05),
            Err(Error::NotConjugate { .. })
        ));
        let no_weights = MajorantEstimate::from_values(vec![0.0], vec![1.0], None);
        assert!(check_integrability(&no_weights, None, 2.0, None, 0.05).is_err());
    }

    #[test]
    fn wp_norm_oracles() {
        let space = legendre_unit_masses();
        let basis = compute_orthonormal_basis(&space, 10).unwrap();
        let one = TargetFunction::parse("one").unwrap();
        let full = wp_norm(&one, &space, 2.0, Domain::Full, basis.rule()).unwrap();
        assert!((full - 3f64.sqrt()).abs() < 1e-14);
        let zero = TargetFunction::polynomial(vec![0.0]);
        let r = Region::new(0.1).unwrap();
        assert_eq!(
            wp_norm(&zero, &space, 2.0, Domain::Compact(r), basis.rule()).unwrap(),
            0.0
        );
        // ∫_{-0.9}^{0.9} dx/2 + two unit masses
        let k = wp_norm(&one, &space, 2.0, Domain::Compact(r), basis.rule()).unwrap();
        assert!((k * k - 2.9).abs() < 1e-13);
        // masses outside the interval contribute nothing
        let i = wp_norm(
            &one,
            &space,
            1.0,
            Domain::Interval { lo: 0.0, hi: 1.0 },
            basis.rule(),
        )
        .unwrap();
        assert!((i - 1.5).abs() < 1e-13);

        let f = TargetFunction::parse("poly:[0.5, -1, 0, 2, 0.25]").unwrap();
        let n2 = wp_norm(&f, &space, 2.0, Domain::Full, basis.rule()).unwrap();
        let ip = sobolev_inner_product(&f, &f, &space, basis.rule()).unwrap();
        assert!((n2 * n2 - ip.value).abs() <= 1e-10 * ip.value);
    }

    #[test]
    fn probe_gates_and_finite_series() {
        let space = legendre_unit_masses();
        let basis = compute_orthonormal_basis(&space, 32).unwrap();
        let log = builtin_multiplier(BuiltinMultiplier::Log).unwrap();
        let step = TargetFunction::parse("step:0").unwrap();
        assert!(matches!(
            convergence_probe(&step, &log, &basis, &[0.0], &[4, 8], 1e-6),
            Err(Error::DiscontinuityPoint { .. })
        ));
        assert!(convergence_probe(&step, &log, &basis, &[0.3], &[4, 8], 1e-6).is_ok());
        let cubic = TargetFunction::parse("poly:[1, 2, 0, -1]").unwrap();
        assert!(matches!(
            convergence_probe(&cubic, &log, &basis, &[1.5], &[4, 8], 1e-6),
            Err(Error::PointOutsideRegion(_))
        ));
        let r = convergence_probe(
            &cubic,
            &log,
            &basis,
            &[-1.0, 0.2, 1.0],
            &[4, 8, 16, 32],
            1e-6,
        )
        .unwrap();
        assert!(r.increments.iter().all(|&v| v == 0.0));
        assert_eq!(r.verdict, Verdict::Passes);
    }

    #[test]
    fn ratio_for_constant_basis_function() {
        let space = legendre_unit_masses();
        let basis = compute_orthonormal_basis(&space, 16).unwrap();
        let ones = builtin_multiplier(BuiltinMultiplier::Ones).unwrap();
        let q0 = TargetFunction::polynomial(vec![1.0 / 3f64.sqrt()]);
        let r = Region::new(0.1).unwrap();
        let b = theorem2_ratio(&[q0], &ones, &basis, &r, 2.0, &[4, 8, 16], 0.1).unwrap();
        for &v in &b.functions[0].ratios {
            assert!(v <= 1.0 && (v * v - 2.9 / 3.0).abs() < 1e-12);
        }
        let zero = TargetFunction::polynomial(vec![0.0]);
        assert!(matches!(
            theorem2_ratio(&[zero], &ones, &basis, &r, 2.0, &[4, 8], 0.1),
            Err(Error::ZeroNorm(_))
        ));
    }

    #[test]
    fn tolerance_overrides() {
        let mut t = Tolerances::default();
        t.set("cauchy_tol", 1e-3).unwrap();
        assert_eq!(t.cauchy_tol, 1e-3);
        assert!(t.set("nope", 1.0).is_err());
        assert!(t.set("tail_tol", -1.0).is_err());
    }
}

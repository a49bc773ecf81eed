//! Multiplier sequences `Φ = {φ_k}` with `φ_0 = 1`, their difference
//! calculus (`Δφ_k = φ_k - φ_{k+1}`) and quasiconvexity / decay diagnostics.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::report::{HypothesisReport, Verdict};

type TailRule = Arc<dyn Fn(usize) -> f64 + Send + Sync>;

#[derive(Clone)]
pub struct MultiplierSequence {
    name: String,
    prefix: Vec<f64>,
    tail: Option<TailRule>,
    /// Human-readable definition, emitted with reports.
    rule: String,
}

impl fmt::Debug for MultiplierSequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("MultiplierSequence")
            .field("name", &self.name)
            .field("prefix", &self.prefix)
            .field("rule", &self.rule)
            .finish()
    }
}

impl MultiplierSequence {
    /// Finite sequence `φ_0..φ_K`; indices beyond are undefined.
    pub fn from_values(name: impl Into<String>, values: Vec<f64>) -> Result<Self> {
        let seq = Self {
            name: name.into(),
            rule: "explicit values".into(),
            prefix: values,
            tail: None,
        };
        seq.validate()?;
        Ok(seq)
    }

    /// Sequence given by a closed-form rule `k ↦ φ_k`.
    pub fn from_rule(
        name: impl Into<String>,
        rule: impl Into<String>,
        f: impl Fn(usize) -> f64 + Send + Sync + 'static,
    ) -> Result<Self> {
        let seq = Self {
            name: name.into(),
            rule: rule.into(),
            prefix: Vec::new(),
            tail: Some(Arc::new(f)),
        };
        seq.validate()?;
        Ok(seq)
    }

    fn validate(&self) -> Result<()> {
        match self.get(0) {
            Some(1.0) => Ok(()),
            Some(v) => Err(Error::InvalidMultiplier(format!(
                "{}: phi_0 must be 1, got {v}",
                self.name
            ))),
            None => Err(Error::InvalidMultiplier(format!("{}: empty", self.name))),
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn rule(&self) -> &str {
        &self.rule
    }

    pub fn get(&self, k: usize) -> Option<f64> {
        if k < self.prefix.len() {
            Some(self.prefix[k])
        } else {
            self.tail.as_ref().map(|f| f(k))
        }
    }

    pub fn phi(&self, k: usize) -> Result<f64> {
        self.get(k).ok_or_else(|| Error::MultiplierUndefined {
            name: self.name.clone(),
            index: k,
        })
    }

    /// `φ_0..=φ_n`.
    pub fn values(&self, n: usize) -> Result<Vec<f64>> {
        (0..=n).map(|k| self.phi(k)).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "name", rename_all = "lowercase")]
pub enum BuiltinMultiplier {
    Ones,
    Fejer { n: usize },
    Log,
    Power { beta: f64 },
    Abel { r: f64 },
}

impl BuiltinMultiplier {
    /// `ones`, `fejer:N`, `log`, `power:BETA`, `abel:R`.
    pub fn parse(descriptor: &str) -> Result<Self> {
        let (name, param) = match descriptor.split_once(':') {
            Some((n, p)) => (n, Some(p)),
            None => (descriptor, None),
        };
        let bad = || Error::InvalidMultiplier(descriptor.to_string());
        let num = |p: Option<&str>| -> Result<f64> {
            p.ok_or_else(bad)?.parse::<f64>().map_err(|_| bad())
        };
        match (name, param) {
            ("ones", None) => Ok(Self::Ones),
            ("log", None) => Ok(Self::Log),
            ("fejer", Some(p)) => Ok(Self::Fejer {
                n: p.parse().map_err(|_| bad())?,
            }),
            ("power", p) => Ok(Self::Power { beta: num(p)? }),
            ("abel", p) => Ok(Self::Abel { r: num(p)? }),
            _ => Err(bad()),
        }
    }

    pub fn descriptor(&self) -> String {
        match self {
            Self::Ones => "ones".into(),
            Self::Fejer { n } => format!("fejer:{n}"),
            Self::Log => "log".into(),
            Self::Power { beta } => format!("power:{beta}"),
            Self::Abel { r } => format!("abel:{r}"),
        }
    }
}

pub fn builtin_multiplier(which: BuiltinMultiplier) -> Result<MultiplierSequence> {
    let name = which.descriptor();
    match which {
        BuiltinMultiplier::Ones => MultiplierSequence::from_rule(name, "phi_k = 1", |_| 1.0),
        BuiltinMultiplier::Fejer { n } => MultiplierSequence::from_rule(
            name,
            format!("phi_k = max(0, 1 - k/{})", n + 1),
            move |k| (1.0 - k as f64 / (n + 1) as f64).max(0.0),
        ),
        BuiltinMultiplier::Log => {
            MultiplierSequence::from_rule(name, "phi_k = ln 2 / ln(k + 2) (phi_0 = 1)", |k| {
                std::f64::consts::LN_2 / ((k + 2) as f64).ln()
            })
        }
        BuiltinMultiplier::Power { beta } => {
            if !(beta.is_finite() && beta > 0.0) {
                return Err(Error::InvalidMultiplier(format!(
                    "power needs beta > 0, got {beta}"
                )));
            }
            MultiplierSequence::from_rule(name, format!("phi_k = (k + 1)^-{beta}"), move |k| {
                ((k + 1) as f64).powf(-beta)
            })
        }
        BuiltinMultiplier::Abel { r } => {
            if !(r > 0.0 && r < 1.0) {
                return Err(Error::InvalidMultiplier(format!(
                    "abel needs 0 < r < 1, got {r}"
                )));
            }
            MultiplierSequence::from_rule(name, format!("phi_k = {r}^k"), move |k| r.powi(k as i32))
        }
    }
}

/// `(Δφ_0..=Δφ_K, Δ²φ_0..=Δ²φ_K)`; needs `φ` up to `K + 2`.
pub fn delta_calculus(phi: &MultiplierSequence, k_max: usize) -> Result<(Vec<f64>, Vec<f64>)> {
    let v = phi.values(k_max + 2)?;
    let first: Vec<f64> = (0..=k_max + 1).map(|k| v[k] - v[k + 1]).collect();
    let second: Vec<f64> = (0..=k_max)
        .map(|k| v[k] - 2.0 * v[k + 1] + v[k + 2])
        .collect();
    Ok((first[..=k_max].to_vec(), second))
}

/// Neumaier compensated sum, in iteration order.
#[derive(Debug, Default, Clone, Copy)]
pub(crate) struct CompensatedSum {
    sum: f64,
    carry: f64,
}

impl CompensatedSum {
    pub(crate) fn add(&mut self, v: f64) {
        let t = self.sum + v;
        if self.sum.abs() >= v.abs() {
            self.carry += (self.sum - t) + v;
        } else {
            self.carry += (v - t) + self.sum;
        }
        self.sum = t;
    }

    pub(crate) fn value(&self) -> f64 {
        self.sum + self.carry
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuasiconvexReport {
    pub multiplier: String,
    pub k_max: usize,
    /// `Σ_{k<=K} (k+1)|Δ²φ_k|`.
    pub partial_total: f64,
    /// Partial total plus a power-law estimate of the remaining tail, when
    /// the terms decay faster than `1/k`.
    pub extrapolated_total: Option<f64>,
    /// `P_K - P_{K/10}`.
    pub last_decade_increment: f64,
    /// `P_K - P_{K/2}`; the verdict window.
    pub last_dyadic_increment: f64,
    /// `P_{K/2} - P_{K/4}`.
    pub previous_dyadic_increment: f64,
    pub tail_tol: f64,
    /// Relative mismatch of
    /// `Σ_{k<=K}(k+1)Δ²φ_k = φ_0 - φ_{K+1} - (K+1)Δφ_{K+1}`.
    pub identity_residual: f64,
    pub verdict: Verdict,
    /// `(k, partial total up to k)` at powers of two and at `K`.
    pub trace: Vec<(usize, f64)>,
}

impl QuasiconvexReport {
    pub fn to_report(&self) -> HypothesisReport {
        let mut r = HypothesisReport::new(
            "quasiconvex",
            self.verdict,
            format!("sum of (k+1)|second difference| up to K = {}", self.k_max),
        )
        .with_tolerance("tail_tol", self.tail_tol)
        .with_value("partial_total", self.partial_total)
        .with_value("last_decade_increment", self.last_decade_increment)
        .with_value("last_dyadic_increment", self.last_dyadic_increment)
        .with_value("previous_dyadic_increment", self.previous_dyadic_increment)
        .with_value("identity_residual", self.identity_residual)
        .with_trace(
            "checkpoints",
            self.trace.iter().map(|&(k, _)| k as f64).collect(),
        )
        .with_trace("partial_sums", self.trace.iter().map(|&(_, v)| v).collect())
        .with_note(format!("multiplier {}", self.multiplier));
        if let Some(e) = self.extrapolated_total {
            r = r.with_value("extrapolated_total", e);
        }
        r
    }
}

pub const DEFAULT_TAIL_TOL: f64 = 1e-2;

pub fn check_quasiconvex(phi: &MultiplierSequence, k_max: usize) -> Result<QuasiconvexReport> {
    check_quasiconvex_with(phi, k_max, DEFAULT_TAIL_TOL)
}

pub fn check_quasiconvex_with(
    phi: &MultiplierSequence,
    k_max: usize,
    tail_tol: f64,
) -> Result<QuasiconvexReport> {
    if k_max < 2 {
        return Err(Error::InvalidParameter(
            "quasiconvexity check needs K >= 2".into(),
        ));
    }
    let v = phi.values(k_max + 2)?;
    let mut abs_sum = CompensatedSum::default();
    let mut signed_sum = CompensatedSum::default();
    let mut partial = Vec::with_capacity(k_max + 1);
    let mut terms = Vec::with_capacity(k_max + 1);
    let mut trace = Vec::new();
    for k in 0..=k_max {
        let d2 = v[k] - 2.0 * v[k + 1] + v[k + 2];
        let weighted = (k + 1) as f64 * d2;
        abs_sum.add(weighted.abs());
        signed_sum.add(weighted);
        partial.push(abs_sum.value());
        terms.push(weighted.abs());
        if k.is_power_of_two() || k == k_max {
            trace.push((k, abs_sum.value()));
        }
    }
    let total = abs_sum.value();
    let rhs = v[0] - v[k_max + 1] - (k_max + 1) as f64 * (v[k_max + 1] - v[k_max + 2]);
    let lhs = signed_sum.value();
    let scale = lhs.abs().max(rhs.abs()).max(1.0);
    let identity_residual = (lhs - rhs).abs() / scale;

    let at = |k: usize| if k == 0 { 0.0 } else { partial[k - 1] };
    let decade = total - at(k_max / 10 + 1);
    let last = total - at(k_max / 2 + 1);
    let previous = at(k_max / 2 + 1) - at(k_max / 4 + 1);
    let bound = tail_tol * total.max(1.0);
    let verdict = if last <= bound {
        Verdict::Passes
    } else if last >= 0.9 * previous {
        Verdict::Fails
    } else {
        Verdict::Inconclusive
    };

    Ok(QuasiconvexReport {
        multiplier: phi.name().to_string(),
        k_max,
        partial_total: total,
        extrapolated_total: extrapolate_tail(&terms, total),
        last_decade_increment: decade,
        last_dyadic_increment: last,
        previous_dyadic_increment: previous,
        tail_tol,
        identity_residual,
        verdict,
        trace,
    })
}

/// Adds `Σ_{k>K} t_k` for terms fitted by `t_k ≈ c k^{-p}` from `t_{K/2}`
/// and `t_K`; `None` when the terms do not decay faster than `1/k`.
fn extrapolate_tail(terms: &[f64], total: f64) -> Option<f64> {
    let k = terms.len() - 1;
    let t_k = terms[k];
    if t_k == 0.0 {
        return terms[k / 2..].iter().all(|&t| t == 0.0).then_some(total);
    }
    if k < 4 {
        return None;
    }
    let t_half = terms[k / 2];
    let p = (t_half / t_k).ln() / (k as f64 / (k / 2) as f64).ln();
    if !(p.is_finite() && p > 1.0) {
        return None;
    }
    let kf = k as f64;
    let tail = t_k * kf.powf(p) * (kf + 0.5).powf(1.0 - p) / (p - 1.0);
    Some(total + tail)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecayReport {
    pub multiplier: String,
    pub k_max: usize,
    /// `sup_{2<=k<=K} |φ_k| ln k`.
    pub sup: f64,
    /// Maximum of `|φ_k| ln k` over each complete dyadic block `[2^m, 2^{m+1})`.
    pub block_maxima: Vec<f64>,
    pub verdict: Verdict,
}

impl DecayReport {
    pub fn to_report(&self) -> HypothesisReport {
        HypothesisReport::new(
            "eq4",
            self.verdict,
            format!("sup of |phi_k| ln k for 2 <= k <= {}", self.k_max),
        )
        .with_value("sup", self.sup)
        .with_trace("block_maxima", self.block_maxima.clone())
        .with_note(format!("multiplier {}", self.multiplier))
    }
}

pub fn check_log_decay(phi: &MultiplierSequence, k_max: usize) -> Result<DecayReport> {
    if k_max < 16 {
        return Err(Error::InvalidParameter(
            "log-decay check needs K >= 16".into(),
        ));
    }
    let v = phi.values(k_max)?;
    let g = |k: usize| v[k].abs() * (k as f64).ln();
    let sup = (2..=k_max).map(g).fold(0.0, f64::max);
    let mut block_maxima = Vec::new();
    let mut m = 1;
    while (1usize << (m + 1)) - 1 <= k_max {
        let lo = 1usize << m;
        let hi = (1usize << (m + 1)) - 1;
        block_maxima.push((lo..=hi).map(g).fold(0.0, f64::max));
        m += 1;
    }
    let n = block_maxima.len();
    let d_last = block_maxima[n - 1] - block_maxima[n - 2];
    let d_prev = block_maxima[n - 2] - block_maxima[n - 3];
    let verdict = if d_last <= 1e-3 * block_maxima[n - 1].abs()
        || (d_prev > 0.0 && d_last <= 0.75 * d_prev)
    {
        Verdict::Passes
    } else if d_prev > 0.0 && d_last >= 0.9 * d_prev {
        Verdict::Fails
    } else {
        Verdict::Inconclusive
    };
    Ok(DecayReport {
        multiplier: phi.name().to_string(),
        k_max,
        sup,
        block_maxima,
        verdict,
    })
}

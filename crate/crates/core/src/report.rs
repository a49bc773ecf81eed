//! Three-valued verdicts and the structured reports that carry them.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Passes,
    Fails,
    Inconclusive,
}

impl Verdict {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::Passes => "passes",
            Self::Fails => "fails",
            Self::Inconclusive => "inconclusive",
        }
    }

    /// Combination where any failure dominates, then any inconclusive.
    pub fn combine(self, other: Self) -> Self {
        match (self, other) {
            (Self::Fails, _) | (_, Self::Fails) => Self::Fails,
            (Self::Inconclusive, _) | (_, Self::Inconclusive) => Self::Inconclusive,
            _ => Self::Passes,
        }
    }
}

impl std::fmt::Display for Verdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// A verdict together with everything needed to re-derive it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HypothesisReport {
    /// `eq2`..`eq8`, `thm1i`, `thm1ii`, `thm2`, or a multiplier check id.
    pub condition: String,
    pub verdict: Verdict,
    pub summary: String,
    pub tolerances: BTreeMap<String, f64>,
    pub values: BTreeMap<String, f64>,
    pub traces: BTreeMap<String, Vec<f64>>,
    pub notes: Vec<String>,
}

impl HypothesisReport {
    pub fn new(condition: impl Into<String>, verdict: Verdict, summary: impl Into<String>) -> Self {
        Self {
            condition: condition.into(),
            verdict,
            summary: summary.into(),
            tolerances: BTreeMap::new(),
            values: BTreeMap::new(),
            traces: BTreeMap::new(),
            notes: Vec::new(),
        }
    }

    pub fn with_tolerance(mut self, name: &str, v: f64) -> Self {
        self.tolerances.insert(name.into(), v);
        self
    }

    pub fn with_value(mut self, name: &str, v: f64) -> Self {
        self.values.insert(name.into(), v);
        self
    }

    pub fn with_trace(mut self, name: &str, v: Vec<f64>) -> Self {
        self.traces.insert(name.into(), v);
        self
    }

    pub fn with_note(mut self, note: impl Into<String>) -> Self {
        self.notes.push(note.into());
        self
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    /// `index,value` rows for one trace.
    pub fn trace_csv(&self, name: &str) -> Option<String> {
        let trace = self.traces.get(name)?;
        let rows: Vec<Vec<String>> = trace
            .iter()
            .enumerate()
            .map(|(i, &v)| vec![i.to_string(), fmt_f64(v)])
            .collect();
        Some(csv(&["index", name], &rows))
    }
}

/// Shortest decimal string that parses back to the same `f64`.
pub fn fmt_f64(v: f64) -> String {
    format!("{v:?}")
}

pub fn csv(header: &[&str], rows: &[Vec<String>]) -> String {
    let mut out = header.join(",");
    out.push('\n');
    for row in rows {
        let _ = writeln!(out, "{}", row.join(","));
    }
    out
}

/// Verdict for a nondecreasing sequence of partial sums `P_0..P_N` from its
/// last two dyadic increments `P_N - P_{N/2}` and `P_{N/2} - P_{N/4}`:
/// passes when the last increment is within `tol` of `|P_N|`, fails when it
/// is not and has not shrunk (at least 90% of the previous one).
pub fn dyadic_series_verdict(partials: &[f64], tol: f64) -> (Verdict, f64, f64) {
    let n = partials.len().saturating_sub(1);
    if n < 4 {
        return (Verdict::Inconclusive, f64::NAN, f64::NAN);
    }
    let last = partials[n] - partials[n / 2];
    let prev = partials[n / 2] - partials[n / 4];
    let verdict = if last <= tol * partials[n].abs() {
        Verdict::Passes
    } else if last >= 0.9 * prev {
        Verdict::Fails
    } else {
        Verdict::Inconclusive
    };
    (verdict, last, prev)
}

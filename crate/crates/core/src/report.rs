//! Machine-checkable verification reports.
//!
//! Every suite in this crate produces a [`VerificationReport`]: a flat list
//! of [`Check`] rows (one numeric claim each) plus a snapshot of the
//! quadrature configuration that produced the numbers.  Reports serialize to
//! JSON and CSV; serialization is deterministic, so two runs with the same
//! configuration yield byte-identical output.

use serde::Serialize;

use crate::quadrature::{QuadratureConfig, SeminormValue};

/// Format version stamped into every serialized report.
pub const REPORT_SCHEMA: u32 = 1;

/// Outcome of a single check row.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Verdict {
    /// The claimed bound held (with the suite's slack factor).
    #[serde(rename = "pass")]
    Pass,
    /// The claimed bound failed.
    #[serde(rename = "fail")]
    Fail,
    /// A prerequisite quantity diverged or did not stabilize, so the claim
    /// cannot be evaluated for this function; recorded, not hidden.
    #[serde(rename = "skipped-divergent")]
    SkippedDivergent,
}

impl Verdict {
    pub fn as_str(&self) -> &'static str {
        match self {
            Verdict::Pass => "pass",
            Verdict::Fail => "fail",
            Verdict::SkippedDivergent => "skipped-divergent",
        }
    }
}

/// One verified numeric claim.
///
/// For an inequality `lhs <= constant * rhs` the `margin` field records
/// `constant * rhs / lhs` (how much head-room the bound had; `None` when
/// `lhs` is zero or a side is unavailable).  Equality checks store the two
/// sides and their relative gap in `margin`.
#[derive(Clone, Debug, Serialize)]
pub struct Check {
    pub claim_id: String,
    /// Human-readable statement of the claim being checked.
    pub claim: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lhs: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rhs: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub constant: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub margin: Option<f64>,
    pub verdict: Verdict,
    /// Final rungs of a refinement ladder when the claim is about ladder
    /// behaviour (divergence probes, stabilization claims).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ladder_excerpt: Option<Vec<(f64, f64)>>,
}

fn keep_finite(x: f64) -> Option<f64> {
    x.is_finite().then_some(x)
}

impl Check {
    /// Check `lhs <= slack * constant * rhs`, with `lhs_cap` the certified
    /// upper bound for the left side (usually [`SeminormValue::upper_bound`])
    /// and `rhs` the best estimate of the right side.
    pub fn inequality(
        claim_id: impl Into<String>,
        claim: impl Into<String>,
        lhs_cap: Option<f64>,
        lhs_estimate: f64,
        rhs: Option<f64>,
        constant: f64,
        slack: f64,
    ) -> Self {
        let (verdict, margin) = match (lhs_cap, rhs) {
            (Some(cap), Some(r)) => {
                let verdict = if cap <= slack * constant * r {
                    Verdict::Pass
                } else {
                    Verdict::Fail
                };
                let margin = if lhs_estimate > 0.0 {
                    keep_finite(constant * r / lhs_estimate)
                } else {
                    None
                };
                (verdict, margin)
            }
            _ => (Verdict::SkippedDivergent, None),
        };
        Check {
            claim_id: claim_id.into(),
            claim: claim.into(),
            lhs: keep_finite(lhs_estimate),
            rhs: rhs.and_then(keep_finite),
            constant: keep_finite(constant),
            margin,
            verdict,
            ladder_excerpt: None,
        }
    }

    /// Check that two quantities agree to `rel_tol` relative error.
    pub fn equality(
        claim_id: impl Into<String>,
        claim: impl Into<String>,
        lhs: f64,
        rhs: f64,
        rel_tol: f64,
    ) -> Self {
        let scale = lhs.abs().max(rhs.abs()).max(f64::MIN_POSITIVE);
        let gap = (lhs - rhs).abs() / scale;
        Check {
            claim_id: claim_id.into(),
            claim: claim.into(),
            lhs: keep_finite(lhs),
            rhs: keep_finite(rhs),
            constant: Some(rel_tol),
            margin: keep_finite(gap),
            verdict: if gap <= rel_tol {
                Verdict::Pass
            } else {
                Verdict::Fail
            },
            ladder_excerpt: None,
        }
    }

    /// Record a boolean condition with optional witness numbers.
    pub fn condition(
        claim_id: impl Into<String>,
        claim: impl Into<String>,
        holds: bool,
        lhs: Option<f64>,
        rhs: Option<f64>,
    ) -> Self {
        Check {
            claim_id: claim_id.into(),
            claim: claim.into(),
            lhs: lhs.and_then(keep_finite),
            rhs: rhs.and_then(keep_finite),
            constant: None,
            margin: None,
            verdict: if holds { Verdict::Pass } else { Verdict::Fail },
            ladder_excerpt: None,
        }
    }

    /// Attach the last `n` rungs of a ladder to the row.
    pub fn with_ladder(mut self, value: &SeminormValue, n: usize) -> Self {
        let start = value.ladder.len().saturating_sub(n);
        self.ladder_excerpt = Some(value.ladder[start..].to_vec());
        self
    }
}

/// A suite's full output: check rows plus the configuration that made them.
#[derive(Clone, Debug, Serialize)]
pub struct VerificationReport {
    pub schema: u32,
    pub suite_id: String,
    pub checks: Vec<Check>,
    pub environment: QuadratureConfig,
}

/// Output format for serialized reports.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ReportFormat {
    Json,
    Csv,
}

impl std::str::FromStr for ReportFormat {
    type Err = crate::Error;
    fn from_str(s: &str) -> crate::Result<Self> {
        match s {
            "json" => Ok(ReportFormat::Json),
            "csv" => Ok(ReportFormat::Csv),
            _ => Err(crate::Error::parse(s, "expected json|csv")),
        }
    }
}

impl VerificationReport {
    pub fn new(suite_id: impl Into<String>, cfg: &QuadratureConfig) -> Self {
        VerificationReport {
            schema: REPORT_SCHEMA,
            suite_id: suite_id.into(),
            checks: Vec::new(),
            environment: cfg.clone(),
        }
    }

    pub fn push(&mut self, check: Check) {
        self.checks.push(check);
    }

    /// True when no row failed (skipped rows do not fail a suite).
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.verdict != Verdict::Fail)
    }

    pub fn emit(&self, format: ReportFormat) -> String {
        match format {
            ReportFormat::Json => self.to_json(),
            ReportFormat::Csv => self.to_csv(),
        }
    }

    pub fn to_json(&self) -> String {
        // All stored floats are finite (builders drop non-finite values), so
        // serialization cannot fail.
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    /// CSV with one row per check and the environment in leading comments.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!("# schema={}\n", self.schema));
        out.push_str(&format!("# suite_id={}\n", self.suite_id));
        out.push_str(&format!(
            "# tol_rel={} angular_order={} max_subdivisions={} shells={}\n",
            self.environment.tol_rel,
            self.environment.angular_order,
            self.environment.max_subdivisions,
            self.environment.shell_epsilons.len(),
        ));
        out.push_str("claim_id,claim,lhs,rhs,constant,margin,verdict,ladder_excerpt\n");
        for c in &self.checks {
            let ladder = c
                .ladder_excerpt
                .as_ref()
                .map(|l| {
                    l.iter()
                        .map(|(e, v)| format!("{e}:{v}"))
                        .collect::<Vec<_>>()
                        .join(";")
                })
                .unwrap_or_default();
            out.push_str(&format!(
                "{},{},{},{},{},{},{},{}\n",
                csv_field(&c.claim_id),
                csv_field(&c.claim),
                opt(c.lhs),
                opt(c.rhs),
                opt(c.constant),
                opt(c.margin),
                c.verdict.as_str(),
                csv_field(&ladder),
            ));
        }
        out
    }
}

fn opt(x: Option<f64>) -> String {
    x.map(|v| v.to_string()).unwrap_or_default()
}

fn csv_field(s: &str) -> String {
    if s.contains(',') || s.contains('"') || s.contains('\n') {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

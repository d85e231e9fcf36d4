use serde::{Deserialize, Serialize};

use crate::models::SafeBox;

use super::config::RunConfig;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum Comparator {
    /// Pass when `maxResidual < tolerance`.
    Below,
    /// Pass when the smallest observed value exceeds `tolerance`.
    Above,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Record {
    pub check_id: String,
    pub anchor: String,
    /// Largest residual for `below` checks, smallest witness for `above` checks.
    pub max_residual: f64,
    pub tolerance: f64,
    pub comparator: Comparator,
    pub pass: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

impl Record {
    pub fn below(check_id: impl Into<String>, anchor: &str, value: f64, tolerance: f64) -> Record {
        Record {
            check_id: check_id.into(),
            anchor: anchor.to_string(),
            max_residual: value,
            tolerance,
            comparator: Comparator::Below,
            pass: value < tolerance,
            detail: None,
        }
    }

    pub fn above(check_id: impl Into<String>, anchor: &str, value: f64, tolerance: f64) -> Record {
        Record {
            check_id: check_id.into(),
            anchor: anchor.to_string(),
            max_residual: value,
            tolerance,
            comparator: Comparator::Above,
            pass: value > tolerance,
            detail: None,
        }
    }

    pub fn failed(check_id: impl Into<String>, anchor: &str, tolerance: f64, detail: String) -> Record {
        Record {
            check_id: check_id.into(),
            anchor: anchor.to_string(),
            max_residual: f64::INFINITY,
            tolerance,
            comparator: Comparator::Below,
            pass: false,
            detail: Some(detail),
        }
    }

    pub fn with_detail(mut self, d: impl Into<String>) -> Record {
        self.detail = Some(d.into());
        self
    }

    pub fn line(&self) -> String {
        let op = match self.comparator {
            Comparator::Below => "<",
            Comparator::Above => ">",
        };
        let mut s = format!(
            "{} {:<40} {:.3e} {op} {:.1e}",
            if self.pass { "PASS" } else { "FAIL" },
            self.check_id,
            self.max_residual,
            self.tolerance
        );
        if let Some(d) = &self.detail {
            s.push_str(&format!("  ({d})"));
        }
        s
    }
}

/// Sign conventions realized by this build, measured at run time.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Conventions {
    pub structure_equations: String,
    pub curvature_pairing: String,
    pub singer_thorpe_blocks: String,
    pub induced_connection: String,
    /// `s` of the unit round sphere at the origin of its chart.
    pub sphere_anchor_s: f64,
    /// Trace of `A` on the same sphere.
    pub sphere_anchor_trace_a: f64,
    pub orientation_flipped: bool,
    /// Eigenvalue of `τ ↦ *(τ∧φ)` on the 14-dimensional summand, per branch `(+, −)`.
    pub w14_eigenvalue: [f64; 2],
    pub torsion_equations: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ProbeDomain {
    pub base: SafeBox,
    /// Radius of the fiber ball (`|a|` on X, `|u|` on P).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fiber_radius: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Environment {
    pub seed: u64,
    pub probes: usize,
    pub probe_domain: ProbeDomain,
    pub conventions: Conventions,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Report {
    pub tool: String,
    pub version: String,
    pub config: RunConfig,
    pub environment: Environment,
    pub records: Vec<Record>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub torsion_class: Option<String>,
    pub pass: bool,
}

impl Report {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn failures(&self) -> impl Iterator<Item = &Record> {
        self.records.iter().filter(|r| !r.pass)
    }
}

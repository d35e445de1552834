//! Structured reports emitted by every transformation pipeline.
//!
//! Each step records the facts the corresponding bound talks about (sizes,
//! layer counts, ledger growth, the analytic expressions evaluated on the
//! instance) so that tests and external tooling can audit a run without
//! recomputing the transform.

use serde::{Deserialize, Serialize};

/// One iteration of a pipeline.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct StepReport {
    pub step: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub layers_before: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub layers_after: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub depth_before: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub depth_after: Option<usize>,
    pub size_before: usize,
    pub size_after: usize,
    pub edges_before: usize,
    pub edges_after: usize,
    /// Pairs recorded into the ledger by this step.
    pub ledger_added: usize,
    /// Cut positions considered by this step that were dropped because a
    /// factor was identically zero (they contribute nothing to the sum).
    #[serde(default)]
    pub ledger_dropped_zero: usize,
    /// Chosen cut layer, where applicable.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub j0: Option<usize>,
    /// Total width of the candidate (middle-third) window, where applicable.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub middle_width: Option<usize>,
    /// Analytic ceiling on this step's ledger growth, evaluated on the
    /// instance, where the relevant lemma provides one.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ledger_growth_bound: Option<f64>,
    /// Named analytic facts checked this step, with whether they held.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub bound_checks: Vec<BoundCheck>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BoundCheck {
    pub name: String,
    pub observed: f64,
    pub bound: f64,
    pub holds: bool,
}

impl BoundCheck {
    pub fn le(name: &str, observed: f64, bound: f64) -> Self {
        BoundCheck { name: name.to_string(), observed, bound, holds: observed <= bound }
    }
}

/// Full record of a pipeline run.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct TransformReport {
    pub pipeline: String,
    pub steps: Vec<StepReport>,
    pub total_ledger_pairs: usize,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub band_histogram: Option<BandAudit>,
}

impl TransformReport {
    pub fn new(pipeline: &str) -> Self {
        TransformReport { pipeline: pipeline.to_string(), ..Default::default() }
    }

    pub fn push_step(&mut self, mut step: StepReport) {
        step.step = self.steps.len();
        self.total_ledger_pairs += step.ledger_added;
        self.steps.push(step);
    }

    pub fn note(&mut self, msg: impl Into<String>) {
        self.notes.push(msg.into());
    }

    /// True iff every recorded bound check held.
    pub fn all_bounds_hold(&self) -> bool {
        self.steps
            .iter()
            .flat_map(|s| &s.bound_checks)
            .all(|c| c.holds)
    }
}

/// Vertex counts per formal-degree band `[k*delta, (k+1)*delta)`, together
/// with the lower-bound arithmetic evaluated on the instance.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BandAudit {
    pub delta: u32,
    pub formal_degree: u32,
    /// `counts[k]` = number of vertices in band k.
    pub counts: Vec<usize>,
    pub total_vertices: usize,
    /// Number of bands with index in `1..=d'-1` where `d' = floor(d/delta)`.
    pub usable_bands: usize,
    /// `(n/2 - r) * (usable_bands)` for a ledger of length r — a report-only
    /// quantity with no optimality claim.
    pub lower_bound_expression: f64,
}

/// Structured result of a verification check, serialized as
/// `{check, params, pass, counters, warnings}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct VerifyReport {
    pub check: String,
    pub params: serde_json::Value,
    pub pass: bool,
    pub counters: serde_json::Map<String, serde_json::Value>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub warnings: Vec<String>,
}

impl VerifyReport {
    pub fn new(check: &str, params: serde_json::Value) -> Self {
        VerifyReport {
            check: check.to_string(),
            params,
            pass: true,
            counters: serde_json::Map::new(),
            warnings: Vec::new(),
        }
    }

    pub fn counter(&mut self, name: &str, value: impl Into<serde_json::Value>) {
        self.counters.insert(name.to_string(), value.into());
    }

    pub fn fail(&mut self, warning: impl Into<String>) {
        self.pass = false;
        self.warnings.push(warning.into());
    }

    pub fn warn(&mut self, warning: impl Into<String>) {
        self.warnings.push(warning.into());
    }
}

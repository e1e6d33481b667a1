//! System spec files: JSON with the two centers and the reset, plus an
//! optional analysis block for tuning knobs. Parsing runs every value
//! through the library constructors, so a file that loads is a valid system.

use std::fs;
use std::path::Path;

use hybrid_centers::{HybridSystem, LinearCenter, ResetPolynomial};
use serde::Deserialize;

use crate::emit::{json_num, json_num_array, JsonObject};

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpecFile {
    pub center1: LinearCenter,
    pub center2: LinearCenter,
    pub reset: ResetPolynomial,
    #[serde(default)]
    pub analysis: AnalysisBlock,
}

/// Optional tuning values; command-line flags take precedence over these,
/// and these over the built-in defaults.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct AnalysisBlock {
    pub seed: Option<u64>,
    pub tol: Option<f64>,
    pub max_period: Option<usize>,
    pub max_iter: Option<usize>,
    pub max_events: Option<usize>,
    pub max_time: Option<f64>,
    pub escape_radius: Option<f64>,
    pub arc_samples: Option<usize>,
}

impl SpecFile {
    pub fn system(&self) -> HybridSystem {
        HybridSystem::new(self.center1, self.center2, self.reset.clone())
    }
}

/// Read and validate a spec file; the error string carries the path and the
/// parser's line/column or field diagnosis.
pub fn load(path: &Path) -> Result<SpecFile, String> {
    let text = fs::read_to_string(path)
        .map_err(|e| format!("spec {}: {e}", path.display()))?;
    serde_json::from_str(&text).map_err(|e| format!("spec {}: {e}", path.display()))
}

fn center_json(c: &LinearCenter) -> String {
    JsonObject::new()
        .num("b", c.b)
        .num("omega", c.omega)
        .num("delta", c.delta.value())
        .num("c", c.c)
        .num("d", c.d)
        .finish()
}

/// Canonical echo of a spec: fixed field order, fixed float format, analysis
/// keys only when set. Re-parses to an equal system.
pub fn canonical_json(spec: &SpecFile) -> String {
    let reset = JsonObject::new()
        .field("coeffs", &json_num_array(spec.reset.coeffs().iter().copied()))
        .finish();
    let mut obj = JsonObject::new()
        .field("center1", &center_json(&spec.center1))
        .field("center2", &center_json(&spec.center2))
        .field("reset", &reset);
    let a = &spec.analysis;
    let mut analysis = JsonObject::new();
    let mut any = false;
    if let Some(seed) = a.seed {
        analysis = analysis.field("seed", &seed.to_string());
        any = true;
    }
    if let Some(tol) = a.tol {
        analysis = analysis.field("tol", &json_num(tol));
        any = true;
    }
    for (key, value) in [("max_period", a.max_period), ("max_iter", a.max_iter), ("max_events", a.max_events)] {
        if let Some(v) = value {
            analysis = analysis.field(key, &v.to_string());
            any = true;
        }
    }
    for (key, value) in [("max_time", a.max_time), ("escape_radius", a.escape_radius)] {
        if let Some(v) = value {
            analysis = analysis.field(key, &json_num(v));
            any = true;
        }
    }
    if let Some(v) = a.arc_samples {
        analysis = analysis.field("arc_samples", &v.to_string());
        any = true;
    }
    if any {
        obj = obj.field("analysis", &analysis.finish());
    }
    obj.finish()
}

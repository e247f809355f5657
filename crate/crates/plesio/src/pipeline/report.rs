//! Serializable report types. Field order here is the JSON schema; reports
//! for a fixed seed serialize byte-identically regardless of thread count.

use serde::Serialize;

use crate::anatomy::ShapeFingerprint;

#[derive(Clone, Debug, Serialize)]
pub struct SurfaceReport {
    pub surface: String,
    pub formula: String,
    pub period: f64,
    pub frame: String,
    /// [global minimum, global maximum].
    pub range: [f64; 2],
    pub extrema: ExtremaReport,
    pub runs: RunsReport,
    /// Comparison against the published range, when the catalog has one.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub range_check: Option<RangeCheck>,
}

#[derive(Clone, Debug, Serialize)]
pub struct ExtremaReport {
    /// Rows [x, y, z, value]; positions in [0, period)³.
    pub minima: Vec<[f64; 4]>,
    pub maxima: Vec<[f64; 4]>,
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct RunsReport {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub min: Option<RunReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max: Option<RunReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub both: Option<RunReport>,
}

impl RunsReport {
    pub fn get(&self, which: super::Which) -> Option<&RunReport> {
        match which {
            super::Which::Min => self.min.as_ref(),
            super::Which::Max => self.max.as_ref(),
            super::Which::Both => self.both.as_ref(),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct RunReport {
    /// Sites (= cells) per period cube.
    pub cells: usize,
    /// Congruence classes (reflections allowed), canonically sorted.
    pub classes: Vec<ClassReport>,
    /// Class counts by fingerprint matching at 1e-4 and 1e-3 of scale;
    /// disagreement flags classification instability.
    pub classes_tol_fine: usize,
    pub classes_tol_coarse: usize,
    /// Distinct orientation classes summed over the shape classes.
    pub orientation_classes: usize,
    /// True when some cell needs a reflection to match its class
    /// representative (the tiling requires mirror copies).
    pub chirality: bool,
    /// Roundness of the first class representative.
    pub roundness: f64,
    pub errors: Vec<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct ClassReport {
    pub fingerprint: ShapeFingerprint,
    /// Site indices of the member cells.
    pub members: Vec<usize>,
}

#[derive(Clone, Debug, Serialize)]
pub struct RangeCheck {
    pub published: [f64; 2],
    pub matches: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub published_alt: Option<[f64; 2]>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub matches_alt: Option<bool>,
    pub tolerance: f64,
}

impl SurfaceReport {
    /// Deterministic pretty JSON.
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

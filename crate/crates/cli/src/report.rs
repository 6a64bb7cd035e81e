//! Report format. Exact values are rational strings; floating-point
//! simulation output lives only in [`Report::floats`].

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub command: String,
    pub source: String,
    pub kind: String,
    pub result: Option<Outcome>,
    pub violations: Vec<String>,
    pub errors: Vec<String>,
    /// Some answer depended on a finite exploration window.
    pub truncated: bool,
    pub floats: Option<FloatCheck>,
    pub timing: Timing,
}

impl Report {
    pub fn is_success(&self) -> bool {
        self.violations.is_empty() && self.errors.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Timing {
    pub elapsed_us: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Outcome {
    AnalyzeFinite(FiniteAnalysis),
    AnalyzeStream(StreamAnalysis),
    Tile(TileOutcome),
    Markers(MarkersOutcome),
    Verify(VerifyOutcome),
    Oracle(OracleOutcome),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PointAnalysis {
    pub point: usize,
    pub tail: usize,
    pub cycle: usize,
    pub in_c: bool,
    pub min_period: Option<usize>,
    /// Steps to the periodic part, the cycle weight there and its regime.
    pub entry_steps: usize,
    pub cycle_weight: String,
    pub regime: String,
    pub limit_set: Vec<String>,
    pub converges: bool,
    pub limsup: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FiniteAnalysis {
    pub points: Vec<PointAnalysis>,
    pub c: Vec<usize>,
    pub a: Vec<usize>,
    pub b: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProbeRatio {
    pub point: u64,
    pub n: usize,
    pub ratio: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StreamAnalysis {
    pub window: usize,
    pub probes: Vec<ProbeRatio>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TilingRecord {
    pub index: usize,
    pub base: String,
    pub cuts: Vec<usize>,
    pub tags: Vec<String>,
    pub valid: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TileOutcome {
    pub depth: usize,
    /// Finite systems: periodic part, return set and the threshold used.
    pub c: Option<Vec<usize>>,
    pub b: Option<Vec<usize>>,
    pub h: Option<Vec<String>>,
    /// Stream systems: probes lying in `A_i`, per `i`.
    pub exceptional: Option<Vec<Vec<String>>>,
    pub tilings: Vec<TilingRecord>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MarkerSummary {
    pub origin: String,
    pub count: usize,
    pub index_window: usize,
    /// Probes lying in `B_i`, per `i` in the index window.
    pub members: Vec<Vec<String>>,
    pub certified_radius: Vec<Option<usize>>,
    pub observed_radius: Vec<Option<usize>>,
    pub unreached: Vec<usize>,
    pub unvanished: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MarkersOutcome {
    pub probes: usize,
    pub complete: MarkerSummary,
    pub bounded: Option<MarkerSummary>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    /// `None` when the check could not run; see `error`.
    pub passed: Option<bool>,
    pub values: BTreeMap<String, String>,
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerifyOutcome {
    pub invariant: bool,
    pub checks: Vec<Check>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OraclePoint {
    pub point: String,
    /// Exact limit points (finite) or `R_len` (stream).
    pub exact: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OracleOutcome {
    pub length: usize,
    pub points: Vec<OraclePoint>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FloatPoint {
    pub point: String,
    pub simulated: Vec<f64>,
    pub exact: Vec<f64>,
    pub distance: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FloatCheck {
    pub tolerance: f64,
    pub points: Vec<FloatPoint>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BatchReport {
    pub entries: Vec<Report>,
    pub failed: usize,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip() {
        let report = Report {
            command: "verify".into(),
            source: "x.json".into(),
            kind: "finite".into(),
            result: Some(Outcome::Verify(VerifyOutcome {
                invariant: true,
                checks: vec![Check {
                    name: "dowker".into(),
                    passed: Some(true),
                    values: BTreeMap::from([("int_f".into(), "1/6".into())]),
                    error: None,
                }],
            })),
            violations: vec![],
            errors: vec![],
            truncated: false,
            floats: Some(FloatCheck {
                tolerance: 1e-9,
                points: vec![FloatPoint {
                    point: "0".into(),
                    simulated: vec![0.2, 1.0 / 3.0],
                    exact: vec![0.2, 1.0 / 3.0],
                    distance: 0.0,
                }],
            }),
            timing: Timing { elapsed_us: 12 },
        };
        let text = serde_json::to_string_pretty(&report).unwrap();
        let back: Report = serde_json::from_str(&text).unwrap();
        assert_eq!(back, report);
        assert_eq!(serde_json::to_string_pretty(&back).unwrap(), text);
    }
}

//! JSON experiment configs. Schemas are strict: unknown fields are
//! rejected, and deserialization errors are reported with the JSON pointer
//! of the offending field.

use std::path::Path;

use serde::Deserialize;

use skomap::boundary::BoundarySpec;
use skomap::comb::TruncationPolicy;
use skomap::experiment::TrendThresholds;

use crate::CliError;

/// Loads a strict-schema JSON config, pointing at the offending field on
/// failure.
pub fn load<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Json(format!("cannot read {}: {e}", path.display())))?;
    let mut de = serde_json::Deserializer::from_str(&text);
    serde_path_to_error::deserialize(&mut de).map_err(|e| {
        let pointer = format!("/{}", e.path().to_string().replace('.', "/"));
        CliError::Json(format!(
            "{}: invalid config at {}: {}",
            path.display(),
            pointer,
            e.inner()
        ))
    })
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CuspConfig {
    /// Boundary family template; its exponent is replaced by each entry of
    /// `alphas`.
    pub spec: BoundarySpec,
    pub alphas: Vec<f64>,
    pub resolutions: Vec<usize>,
    pub seeds: Vec<u64>,
    pub thresholds: TrendThresholds,
    #[serde(default)]
    pub x0: f64,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ThornConfig {
    pub gammas: Vec<f64>,
    pub epsilon: f64,
    pub horizon: f64,
    pub resolutions: Vec<usize>,
    pub seeds: Vec<u64>,
    /// Excursion detection threshold: `factor * sqrt(horizon / resolution)`
    /// on the detection (finest) grid.
    #[serde(default = "default_detection_factor")]
    pub detection_factor: f64,
    pub excursion_thresholds: TrendThresholds,
    pub horizon_thresholds: TrendThresholds,
    /// When set, adds a control run with the tip widened to this gap
    /// (first gamma), expected to plateau.
    #[serde(default)]
    pub control_gap: Option<f64>,
}

fn default_detection_factor() -> f64 {
    2.0
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConditionsConfig {
    pub spec: BoundarySpec,
    pub mode: ConditionsMode,
    pub c1: f64,
    #[serde(default)]
    pub truncation: TruncationPolicy,
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ConditionsMode {
    Comb,
    Box,
}

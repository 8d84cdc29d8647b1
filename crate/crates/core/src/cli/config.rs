use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exponents::{validate_and_normalize, Representation, ScalingPair};
use crate::matcalc::Matrix;
use crate::synthesis::{
    Discretization, FieldSample, FrequencySpec, GridSpec, HarmonizableField, MovingAverageField,
    Truncation,
};

/// One run, read from a single JSON document. Unknown keys are rejected.
///
/// ```json
/// {"E": [[1.0]], "D": [[0.5]], "representation": "harmonizable",
///  "grid": {"points_per_axis": [4096]}, "seed": 7}
/// ```
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(rename = "E")]
    pub e: Vec<Vec<f64>>,
    #[serde(rename = "D")]
    pub d: Vec<Vec<f64>>,
    pub representation: Representation,
    pub grid: GridSpec,
    /// Harmonizable only; defaults to a lattice covering the grid.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub freq: Option<FrequencySpec>,
    /// Moving average only.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub truncation: Option<Truncation>,
    #[serde(default)]
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<PathBuf>,
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn from_path(path: &Path) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn pair(&self) -> Result<ScalingPair<f64>> {
        let e = Matrix::from_rows(&self.e)?;
        let d = Matrix::from_rows(&self.d)?;
        let pair = validate_and_normalize(&e, &d, self.representation)?;
        if self.grid.d() != pair.dim_domain() {
            return Err(Error::Dimension(format!(
                "grid has {} axes but E is {}×{}",
                self.grid.d(),
                pair.dim_domain(),
                pair.dim_domain()
            )));
        }
        Ok(pair)
    }

    /// The discretization this run uses, defaults filled in.
    pub fn discretization(&self, pair: &ScalingPair<f64>) -> Result<Discretization> {
        self.grid.validate()?;
        match self.representation {
            Representation::Harmonizable => {
                if self.truncation.is_some() {
                    return Err(Error::Validation(
                        "truncation applies to moving_average runs only".into(),
                    ));
                }
                let freq = match self.freq {
                    Some(f) => {
                        f.validate()?;
                        f
                    }
                    None => FrequencySpec::covering(pair, &self.grid)?,
                };
                Ok(Discretization::Harmonizable(freq))
            }
            Representation::MovingAverage => {
                if self.freq.is_some() {
                    return Err(Error::Validation("freq applies to harmonizable runs only".into()));
                }
                let t = self.truncation.unwrap_or_default();
                t.validate(&self.grid)?;
                Ok(Discretization::MovingAverage(t))
            }
        }
    }

    /// A copy with every default spelled out.
    pub fn resolved(&self) -> Result<RunConfig> {
        let pair = self.pair()?;
        let mut out = self.clone();
        match self.discretization(&pair)? {
            Discretization::Harmonizable(f) => out.freq = Some(f),
            Discretization::MovingAverage(t) => out.truncation = Some(t),
        }
        Ok(out)
    }

    pub fn simulate(&self) -> Result<FieldSample> {
        let pair = self.pair()?;
        match self.discretization(&pair)? {
            Discretization::Harmonizable(f) => {
                HarmonizableField::new(&pair, f)?.sample_grid(&self.grid, self.seed)
            }
            Discretization::MovingAverage(t) => {
                MovingAverageField::new(&pair, &self.grid, t)?.sample_grid(self.seed)
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const FBM: &str = r#"{"E": [[1.0]], "D": [[0.5]], "representation": "harmonizable",
        "grid": {"points_per_axis": [64]}}"#;

    #[test]
    fn defaults_and_unknown_keys() {
        let c = RunConfig::from_json(FBM).unwrap();
        assert_eq!(c.seed, 0);
        let r = c.resolved().unwrap();
        assert!(r.freq.is_some() && r.truncation.is_none());
        let bad = FBM.replace("\"seed\"", "\"sed\"").replace("}}", "}, \"sed\": 1}");
        assert!(matches!(RunConfig::from_json(&bad), Err(Error::Json(_))));
    }

    #[test]
    fn large_seed_is_exact() {
        let text = FBM.replace("}}", "}, \"seed\": 18446744073709551615}");
        assert_eq!(RunConfig::from_json(&text).unwrap().seed, u64::MAX);
    }

    #[test]
    fn mismatched_parameters() {
        let text = FBM.replace("}}", "}, \"truncation\": {\"t\": 8.0, \"refine_levels\": 3}}");
        let c = RunConfig::from_json(&text).unwrap();
        assert!(matches!(c.resolved(), Err(Error::Validation(_))));
        let text = FBM.replace("[64]", "[8, 8]");
        assert!(matches!(RunConfig::from_json(&text).unwrap().pair(), Err(Error::Dimension(_))));
    }
}

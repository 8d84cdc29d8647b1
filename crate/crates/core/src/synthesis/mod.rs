//! Gaussian field generation from the harmonizable and moving-average
//! representations on grids in `[0,1]^d`.

mod grid;
mod harmonizable;
mod moving_average;
mod rng;

use serde::{Deserialize, Serialize};

pub use grid::{GridSpec, MAX_NODES};
pub use harmonizable::{
    harmonizable_sample, FrequencySpec, HarmonizableField, NYQUIST_OVERSAMPLING,
    PATH_BASE_RESOLUTION,
};
pub use moving_average::{moving_average_sample, MovingAverageField, Truncation, MAX_TABLE};
pub use rng::{gaussian_stream, RngStream};

use crate::error::{Error, Result};
use crate::exponents::{Representation, ScalingPair};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Discretization {
    Harmonizable(FrequencySpec),
    MovingAverage(Truncation),
}

/// Where a sample came from: enough to regenerate it and to evaluate the
/// closed-form dimensions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FieldMeta {
    pub representation: Representation,
    pub seed: u64,
    /// `E` and `D` as configured, before normalization.
    #[serde(rename = "E")]
    pub e: Vec<Vec<f64>>,
    #[serde(rename = "D")]
    pub d: Vec<Vec<f64>>,
    pub discretization: Discretization,
}

impl FieldMeta {
    pub fn new(pair: &ScalingPair<f64>, seed: u64, discretization: Discretization) -> Self {
        FieldMeta {
            representation: pair.representation(),
            seed,
            e: pair.raw_e().to_rows(),
            d: pair.raw_d().to_rows(),
            discretization,
        }
    }
}

/// Field values on a grid: `values[node * m + i]` is component `i` at `node`.
#[derive(Debug, Clone, PartialEq)]
pub struct FieldSample {
    pub grid: GridSpec,
    pub m: usize,
    pub values: Vec<f64>,
    pub meta: Option<FieldMeta>,
}

impl FieldSample {
    pub fn new(grid: GridSpec, m: usize, values: Vec<f64>, meta: FieldMeta) -> Result<Self> {
        let s = FieldSample {
            grid,
            m,
            values,
            meta: Some(meta),
        };
        s.validate()?;
        Ok(s)
    }

    /// A sample without provenance, e.g. read from a foreign file.
    pub fn bare(grid: GridSpec, m: usize, values: Vec<f64>) -> Result<Self> {
        let s = FieldSample {
            grid,
            m,
            values,
            meta: None,
        };
        s.validate()?;
        Ok(s)
    }

    fn validate(&self) -> Result<()> {
        self.grid.validate()?;
        if self.m == 0 || self.values.len() != self.grid.len() * self.m {
            return Err(Error::Dimension(format!(
                "{} values do not fill {} nodes with {} components",
                self.values.len(),
                self.grid.len(),
                self.m
            )));
        }
        if self.values.iter().any(|v| !v.is_finite()) {
            return Err(Error::numeric("field sample has non-finite values", f64::NAN));
        }
        Ok(())
    }

    pub fn value(&self, node: usize) -> &[f64] {
        &self.values[node * self.m..(node + 1) * self.m]
    }

    /// Component `i` at every node.
    pub fn component(&self, i: usize) -> Vec<f64> {
        self.values.iter().skip(i).step_by(self.m).copied().collect()
    }
}

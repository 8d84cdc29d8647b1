use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest number of nodes a grid may have.
pub const MAX_NODES: usize = 1 << 24;

/// Rectangular grid on `[0,1]^d` with `points_per_axis[a]` equally spaced
/// nodes on axis `a`, both endpoints included. Nodes are numbered row-major,
/// last axis fastest.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    pub points_per_axis: Vec<usize>,
}

impl GridSpec {
    pub fn new(points_per_axis: Vec<usize>) -> Result<Self> {
        let g = GridSpec { points_per_axis };
        g.validate()?;
        Ok(g)
    }

    pub fn uniform(d: usize, n: usize) -> Result<Self> {
        Self::new(vec![n; d])
    }

    pub fn validate(&self) -> Result<()> {
        if self.points_per_axis.is_empty() {
            return Err(Error::Validation("grid needs at least one axis".into()));
        }
        if let Some(n) = self.points_per_axis.iter().find(|&&n| n < 2) {
            return Err(Error::Validation(format!(
                "every grid axis needs at least 2 points, got {n}"
            )));
        }
        let total = self
            .points_per_axis
            .iter()
            .try_fold(1usize, |acc, &n| acc.checked_mul(n))
            .filter(|&t| t <= MAX_NODES);
        if total.is_none() {
            return Err(Error::Validation(format!(
                "grid {:?} exceeds the node limit of {MAX_NODES}",
                self.points_per_axis
            )));
        }
        Ok(())
    }

    pub fn d(&self) -> usize {
        self.points_per_axis.len()
    }

    pub fn len(&self) -> usize {
        self.points_per_axis.iter().product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn spacing(&self, axis: usize) -> f64 {
        1.0 / (self.points_per_axis[axis] - 1) as f64
    }

    pub fn min_spacing(&self) -> f64 {
        (0..self.d()).map(|a| self.spacing(a)).fold(f64::INFINITY, f64::min)
    }

    /// Coordinate of node `i` along `axis`.
    pub fn coordinate(&self, axis: usize, i: usize) -> f64 {
        i as f64 / (self.points_per_axis[axis] - 1) as f64
    }

    pub fn multi_index(&self, mut flat: usize) -> Vec<usize> {
        let mut idx = vec![0; self.d()];
        for a in (0..self.d()).rev() {
            let n = self.points_per_axis[a];
            idx[a] = flat % n;
            flat /= n;
        }
        idx
    }

    pub fn flat_index(&self, idx: &[usize]) -> usize {
        idx.iter()
            .zip(&self.points_per_axis)
            .fold(0, |acc, (&i, &n)| acc * n + i)
    }

    pub fn point(&self, flat: usize) -> Vec<f64> {
        self.multi_index(flat)
            .iter()
            .enumerate()
            .map(|(a, &i)| self.coordinate(a, i))
            .collect()
    }

    pub fn points(&self) -> Vec<Vec<f64>> {
        (0..self.len()).map(|i| self.point(i)).collect()
    }

    /// Euclidean diameter of `[0,1]^d`.
    pub fn diameter(&self) -> f64 {
        (self.d() as f64).sqrt()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn row_major_last_axis_fastest() {
        let g = GridSpec::new(vec![2, 3]).unwrap();
        assert_eq!(g.len(), 6);
        assert_eq!(g.multi_index(1), vec![0, 1]);
        assert_eq!(g.multi_index(3), vec![1, 0]);
        assert_eq!(g.point(5), vec![1.0, 1.0]);
        assert_eq!(g.point(4), vec![1.0, 0.5]);
        for i in 0..6 {
            assert_eq!(g.flat_index(&g.multi_index(i)), i);
        }
    }

    #[test]
    fn limits() {
        assert!(GridSpec::new(vec![]).is_err());
        assert!(GridSpec::new(vec![1]).is_err());
        assert!(GridSpec::new(vec![1 << 12, 1 << 12, 2]).is_err());
        assert!(GridSpec::new(vec![1 << 12, 1 << 12]).is_ok());
    }
}

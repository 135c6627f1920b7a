use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A job or item described by `d` non-negative coordinates.
///
/// Coordinates of input items lie in `[0, 1]`; summaries built from them
/// (containers, reconstructed jobs) may exceed 1 in absolute units.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct VectorItem(Vec<f64>);

impl VectorItem {
    /// Validates an input vector: at least one coordinate, each in `[0, 1]`.
    pub fn new(coords: Vec<f64>) -> Result<Self> {
        if coords.is_empty() {
            return Err(Error::RejectedInput("vector must have at least one coordinate".into()));
        }
        for (k, &c) in coords.iter().enumerate() {
            if !c.is_finite() || !(0.0..=1.0).contains(&c) {
                return Err(Error::RejectedInput(format!(
                    "coordinate {k} = {c} is outside [0, 1]"
                )));
            }
        }
        Ok(Self(coords))
    }

    /// Wraps coordinates without the unit-range check (summary vectors).
    pub fn from_raw(coords: Vec<f64>) -> Self {
        Self(coords)
    }

    pub fn zeros(dim: usize) -> Self {
        Self(vec![0.0; dim])
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn coords(&self) -> &[f64] {
        &self.0
    }

    pub fn into_coords(self) -> Vec<f64> {
        self.0
    }

    pub fn norm_inf(&self) -> f64 {
        self.0.iter().copied().fold(0.0, f64::max)
    }

    pub fn norm_l1(&self) -> f64 {
        self.0.iter().sum()
    }

    /// Index of the largest coordinate, lowest index on ties.
    pub fn argmax(&self) -> usize {
        let mut best = 0;
        for (k, &c) in self.0.iter().enumerate() {
            if c > self.0[best] {
                best = k;
            }
        }
        best
    }

    pub fn add_assign(&mut self, other: &VectorItem) {
        for (a, b) in self.0.iter_mut().zip(&other.0) {
            *a += b;
        }
    }

    pub fn scaled(&self, factor: f64) -> VectorItem {
        VectorItem(self.0.iter().map(|c| c * factor).collect())
    }

    pub(crate) fn check_dim(&self, expected: usize) -> Result<()> {
        if self.dim() == expected {
            Ok(())
        } else {
            Err(Error::DimensionMismatch { expected, got: self.dim() })
        }
    }
}

impl AsRef<[f64]> for VectorItem {
    fn as_ref(&self) -> &[f64] {
        &self.0
    }
}

impl From<VectorItem> for Vec<f64> {
    fn from(v: VectorItem) -> Self {
        v.0
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_out_of_range_coordinates() {
        assert!(VectorItem::new(vec![0.2, 1.5]).is_err());
        assert!(VectorItem::new(vec![-0.1]).is_err());
        assert!(VectorItem::new(vec![f64::NAN]).is_err());
        assert!(VectorItem::new(vec![]).is_err());
    }

    #[test]
    fn argmax_prefers_lowest_index() {
        let v = VectorItem::new(vec![0.3, 0.6, 0.6]).unwrap();
        assert_eq!(v.argmax(), 1);
        assert_eq!(v.norm_inf(), 0.6);
    }
}

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A point in the event-trigger parameter space.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ThetaPoint(pub Vec<f64>);

impl ThetaPoint {
    pub fn new(coords: impl Into<Vec<f64>>) -> Self {
        ThetaPoint(coords.into())
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }
}

impl From<[f64; 2]> for ThetaPoint {
    fn from(v: [f64; 2]) -> Self {
        ThetaPoint(v.to_vec())
    }
}

impl std::ops::Index<usize> for ThetaPoint {
    type Output = f64;

    fn index(&self, i: usize) -> &f64 {
        &self.0[i]
    }
}

/// Axis-aligned box `[lo_1, hi_1] x ... x [lo_n, hi_n]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParamBox {
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
}

impl ParamBox {
    pub fn new(lower: Vec<f64>, upper: Vec<f64>) -> Result<Self> {
        let b = ParamBox { lower, upper };
        b.validate()?;
        Ok(b)
    }

    pub fn square(lo: f64, hi: f64, dim: usize) -> Self {
        ParamBox {
            lower: vec![lo; dim],
            upper: vec![hi; dim],
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.lower.is_empty() || self.lower.len() != self.upper.len() {
            return Err(Error::Input(format!(
                "box bounds must be non-empty and equal length (got {} and {})",
                self.lower.len(),
                self.upper.len()
            )));
        }
        for (i, (lo, hi)) in self.lower.iter().zip(&self.upper).enumerate() {
            if !lo.is_finite() || !hi.is_finite() || lo > hi {
                return Err(Error::Input(format!(
                    "box dimension {i}: invalid interval [{lo}, {hi}]"
                )));
            }
        }
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.lower.len()
    }

    pub fn contains(&self, theta: &ThetaPoint) -> bool {
        theta.dim() == self.dim()
            && theta
                .0
                .iter()
                .zip(self.lower.iter().zip(&self.upper))
                .all(|(x, (lo, hi))| *x >= *lo && *x <= *hi)
    }

    pub fn contains_box(&self, other: &ParamBox) -> bool {
        other.dim() == self.dim()
            && (0..self.dim())
                .all(|i| other.lower[i] >= self.lower[i] && other.upper[i] <= self.upper[i])
    }

    /// Draws a point uniformly from the box, one coordinate at a time.
    pub fn sample<R: rand::Rng + ?Sized>(&self, rng: &mut R) -> ThetaPoint {
        ThetaPoint(
            self.lower
                .iter()
                .zip(&self.upper)
                .map(|(&lo, &hi)| if hi > lo { rng.gen_range(lo..=hi) } else { lo })
                .collect(),
        )
    }
}

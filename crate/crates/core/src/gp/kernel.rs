use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::theta::ThetaPoint;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum KernelKind {
    SquaredExponential,
}

/// Stationary kernel with per-dimension lengthscales (ARD form).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct KernelSpec {
    pub kind: KernelKind,
    pub lengthscales: Vec<f64>,
    pub signal_variance: f64,
}

impl KernelSpec {
    pub fn squared_exponential(lengthscales: Vec<f64>, signal_variance: f64) -> Result<Self> {
        let spec = KernelSpec {
            kind: KernelKind::SquaredExponential,
            lengthscales,
            signal_variance,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if self.lengthscales.is_empty() {
            return Err(Error::Input("kernel needs at least one lengthscale".into()));
        }
        if let Some(l) = self
            .lengthscales
            .iter()
            .find(|l| !(**l > 0.0) || !l.is_finite())
        {
            return Err(Error::Input(format!(
                "lengthscale must be positive, got {l}"
            )));
        }
        if !(self.signal_variance > 0.0) || !self.signal_variance.is_finite() {
            return Err(Error::Input(format!(
                "signal variance must be positive, got {}",
                self.signal_variance
            )));
        }
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.lengthscales.len()
    }

    pub fn eval(&self, a: &ThetaPoint, b: &ThetaPoint) -> Result<f64> {
        self.check_dim(a)?;
        self.check_dim(b)?;
        Ok(self.eval_unchecked(a.as_slice(), b.as_slice()))
    }

    pub(crate) fn check_dim(&self, p: &ThetaPoint) -> Result<()> {
        if p.dim() != self.dim() {
            return Err(Error::Input(format!(
                "point has dimension {}, kernel expects {}",
                p.dim(),
                self.dim()
            )));
        }
        Ok(())
    }

    /// `σ_f² exp(-½ Σ_d (a_d - b_d)² / ℓ_d²)`; dimensions are assumed to match.
    #[inline]
    pub(crate) fn eval_unchecked(&self, a: &[f64], b: &[f64]) -> f64 {
        match self.kind {
            KernelKind::SquaredExponential => {
                let r2: f64 = a
                    .iter()
                    .zip(b)
                    .zip(&self.lengthscales)
                    .map(|((x, y), l)| {
                        let d = (x - y) / l;
                        d * d
                    })
                    .sum();
                self.signal_variance * (-0.5 * r2).exp()
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit() -> KernelSpec {
        KernelSpec::squared_exponential(vec![1.0, 1.0], 1.0).unwrap()
    }

    #[test]
    fn zero_distance_gives_signal_variance() {
        let k = KernelSpec::squared_exponential(vec![0.2, 0.2], 1.7).unwrap();
        let p = ThetaPoint::from([0.5, 0.5]);
        assert_eq!(k.eval(&p, &p).unwrap(), 1.7);
    }

    #[test]
    fn unit_offset_value() {
        let v = unit()
            .eval(&ThetaPoint::from([0.0, 0.0]), &ThetaPoint::from([1.0, 0.0]))
            .unwrap();
        assert!((v - (-0.5f64).exp()).abs() < 1e-15);
        assert!((v - 0.60653).abs() < 1e-5);
    }

    #[test]
    fn decays_monotonically_with_distance() {
        let k = unit();
        let o = ThetaPoint::from([0.0, 0.0]);
        let mut prev = k.eval(&o, &o).unwrap();
        for i in 1..60 {
            let v = k
                .eval(&o, &ThetaPoint::from([0.25 * i as f64, 0.0]))
                .unwrap();
            assert!(v < prev || v == 0.0);
            prev = v;
        }
        assert!(prev < 1e-12);
    }

    #[test]
    fn dimension_mismatch_is_input_error() {
        let r = unit().eval(&ThetaPoint::new(vec![0.0]), &ThetaPoint::from([0.0, 0.0]));
        assert!(matches!(r, Err(Error::Input(_))));
    }

    #[test]
    fn rejects_bad_hyperparameters() {
        assert!(KernelSpec::squared_exponential(vec![0.0, 1.0], 1.0).is_err());
        assert!(KernelSpec::squared_exponential(vec![1.0], -1.0).is_err());
        assert!(KernelSpec::squared_exponential(vec![f64::NAN], 1.0).is_err());
    }
}

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::theta::ThetaPoint;

/// Relative-error trigger with an exponentially decaying threshold
/// `ε(t) = (ε₀ − ε∞) e^{−γt} + ε∞`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EtmSpec {
    pub eps0: f64,
    pub eps_inf: f64,
    pub gamma: f64,
}

impl EtmSpec {
    pub fn new(eps0: f64, eps_inf: f64, gamma: f64) -> Self {
        EtmSpec {
            eps0,
            eps_inf,
            gamma,
        }
    }

    /// Interprets `theta = (ε₀, ε∞)`.
    pub fn from_theta(theta: &ThetaPoint, gamma: f64) -> Result<Self> {
        if theta.dim() != 2 {
            return Err(Error::Input(format!(
                "trigger parameter must be (eps0, eps_inf), got dimension {}",
                theta.dim()
            )));
        }
        Ok(EtmSpec::new(theta[0], theta[1], gamma))
    }

    pub fn theta(&self) -> ThetaPoint {
        ThetaPoint::from([self.eps0, self.eps_inf])
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.gamma > 0.0) || !self.gamma.is_finite() {
            return Err(Error::Input(format!(
                "gamma must be positive, got {}",
                self.gamma
            )));
        }
        if !(self.eps0 >= 0.0 && self.eps_inf >= 0.0)
            || !self.eps0.is_finite()
            || !self.eps_inf.is_finite()
        {
            return Err(Error::Input(
                "trigger thresholds must be finite and non-negative".into(),
            ));
        }
        Ok(())
    }

    pub fn epsilon(&self, t: f64) -> f64 {
        (self.eps0 - self.eps_inf) * (-self.gamma * t).exp() + self.eps_inf
    }

    /// `h = ‖x − x̂‖ − ε(t)‖x‖`.
    pub fn margin(&self, x_now: &[f64], x_held: &[f64], t: f64) -> f64 {
        let err = x_now
            .iter()
            .zip(x_held)
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt();
        let norm = x_now.iter().map(|a| a * a).sum::<f64>().sqrt();
        err - self.epsilon(t) * norm
    }

    pub fn trigger(&self, x_now: &[f64], x_held: &[f64], t: f64) -> bool {
        self.margin(x_now, x_held, t) >= 0.0
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn threshold_endpoints() {
        let e = EtmSpec::new(0.5, 0.1, 0.1);
        assert_eq!(e.epsilon(0.0), 0.5);
        assert!((e.epsilon(1e4) - 0.1).abs() < 1e-15);
    }

    #[test]
    fn threshold_at_ten_seconds() {
        let e = EtmSpec::new(0.5, 0.1, 0.1);
        let expected = 0.4 * (-1.0f64).exp() + 0.1;
        assert!((e.epsilon(10.0) - expected).abs() < 1e-15);
        assert!((e.epsilon(10.0) - 0.24715).abs() < 1e-5);
    }

    #[test]
    fn no_trigger_on_zero_error() {
        let e = EtmSpec::new(0.3, 0.3, 0.1);
        assert!(!e.trigger(&[0.4, -0.2], &[0.4, -0.2], 2.0));
    }

    #[test]
    fn trigger_at_origin() {
        let e = EtmSpec::new(0.3, 0.3, 0.1);
        assert!(e.trigger(&[0.0, 0.0], &[0.1, 0.0], 1.0));
        assert!(e.trigger(&[0.0, 0.0], &[0.0, 0.0], 1.0));
    }

    #[test]
    fn trigger_relative_error() {
        let e = EtmSpec::new(0.05, 0.05, 0.1);
        assert!(e.trigger(&[1.0, 0.0], &[0.9, 0.0], 3.0));
        assert!(!e.trigger(&[1.0, 0.0], &[0.96, 0.0], 3.0));
    }

    #[test]
    fn constant_threshold_when_equal() {
        let e = EtmSpec::new(0.2, 0.2, 0.1);
        for t in [0.0, 1.0, 50.0] {
            assert_eq!(e.epsilon(t), 0.2);
        }
    }
}

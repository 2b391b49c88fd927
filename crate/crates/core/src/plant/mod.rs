//! Closed-loop plant simulation under an event-triggered transmission rule.

mod etm;
mod sim;

pub use etm::EtmSpec;
pub use sim::{run_episode, SimSettings, Trajectory, DIVERGENCE_NORM};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Continuous-time vector field `ẋ = f(x, u)`.
pub trait Dynamics: Send + Sync {
    fn state_dim(&self) -> usize;
    fn input_dim(&self) -> usize;
    fn derivative(&self, x: &[f64], u: &[f64], dx: &mut [f64]);
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum PlantModel {
    /// `ẋ₁ = x₂`, `ẋ₂ = sin x₁ − x₂ + u`.
    InvertedPendulum,
    /// `ẋ = A x + B u`.
    Linear { a: Vec<Vec<f64>>, b: Vec<Vec<f64>> },
}

impl Dynamics for PlantModel {
    fn state_dim(&self) -> usize {
        match self {
            PlantModel::InvertedPendulum => 2,
            PlantModel::Linear { a, .. } => a.len(),
        }
    }

    fn input_dim(&self) -> usize {
        match self {
            PlantModel::InvertedPendulum => 1,
            PlantModel::Linear { b, .. } => b.first().map_or(0, Vec::len),
        }
    }

    fn derivative(&self, x: &[f64], u: &[f64], dx: &mut [f64]) {
        match self {
            PlantModel::InvertedPendulum => {
                dx[0] = x[1];
                dx[1] = x[0].sin() - x[1] + u[0];
            }
            PlantModel::Linear { a, b } => {
                for (i, out) in dx.iter_mut().enumerate() {
                    let ax: f64 = a[i].iter().zip(x).map(|(c, v)| c * v).sum();
                    let bu: f64 = b[i].iter().zip(u).map(|(c, v)| c * v).sum();
                    *out = ax + bu;
                }
            }
        }
    }
}

impl PlantModel {
    pub fn validate(&self) -> Result<()> {
        if let PlantModel::Linear { a, b } = self {
            let n = a.len();
            if n == 0 || a.iter().any(|r| r.len() != n) {
                return Err(Error::Input(
                    "linear plant: A must be square and non-empty".into(),
                ));
            }
            let m = b.first().map_or(0, Vec::len);
            if b.len() != n || m == 0 || b.iter().any(|r| r.len() != m) {
                return Err(Error::Input(format!(
                    "linear plant: B must be {n} x m with m >= 1"
                )));
            }
        }
        let mut dx = vec![f64::NAN; self.state_dim()];
        self.derivative(
            &vec![0.0; self.state_dim()],
            &vec![0.0; self.input_dim()],
            &mut dx,
        );
        if dx.iter().any(|v| !(v.abs() <= 1e-12)) {
            return Err(Error::Input(
                "plant origin is not an equilibrium: f(0, 0) != 0".into(),
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PlantSpec {
    pub model: PlantModel,
    pub initial_state: Vec<f64>,
}

impl PlantSpec {
    pub fn pendulum(initial_state: [f64; 2]) -> Self {
        PlantSpec {
            model: PlantModel::InvertedPendulum,
            initial_state: initial_state.to_vec(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.model.validate()?;
        if self.initial_state.len() != self.model.state_dim() {
            return Err(Error::Input(format!(
                "initial state has {} entries, plant state dimension is {}",
                self.initial_state.len(),
                self.model.state_dim()
            )));
        }
        if self.initial_state.iter().any(|v| !v.is_finite()) {
            return Err(Error::Input("initial state must be finite".into()));
        }
        Ok(())
    }
}

/// Static state feedback `u = K x̂` on the last transmitted sample.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ControllerSpec {
    /// `n_u x n_x`, row-major.
    pub gain: Vec<Vec<f64>>,
}

impl ControllerSpec {
    pub fn row(gain: &[f64]) -> Self {
        ControllerSpec {
            gain: vec![gain.to_vec()],
        }
    }

    pub fn validate(&self, n_x: usize, n_u: usize) -> Result<()> {
        if self.gain.len() != n_u || self.gain.iter().any(|r| r.len() != n_x) {
            return Err(Error::Input(format!(
                "controller gain must be {n_u} x {n_x}"
            )));
        }
        if self.gain.iter().flatten().any(|v| !v.is_finite()) {
            return Err(Error::Input("controller gain must be finite".into()));
        }
        Ok(())
    }

    pub fn apply(&self, x_held: &[f64], u: &mut [f64]) {
        for (ui, row) in u.iter_mut().zip(&self.gain) {
            *ui = row.iter().zip(x_held).map(|(k, x)| k * x).sum();
        }
    }
}

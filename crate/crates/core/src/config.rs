//! Run configuration and the built-in pendulum preset.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gp::KernelSpec;
use crate::indices::{ConvergenceSpec, SafetyMode, SafetySpec};
use crate::plant::{ControllerSpec, Dynamics, PlantSpec, SimSettings};
use crate::theta::ParamBox;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParameterSpace {
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
    /// Grid points per dimension (inclusive of both bounds).
    pub grid_resolution: Vec<usize>,
}

impl ParameterSpace {
    pub fn bounds(&self) -> ParamBox {
        ParamBox {
            lower: self.lower.clone(),
            upper: self.upper.clone(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExplorationConfig {
    pub n_init: usize,
    pub n_exp: usize,
}

/// GP prior and confidence parameters for one index.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IndexModelConfig {
    pub kernel: KernelSpec,
    /// Assumed bound `B` on the RKHS norm of the index map.
    pub rkhs_bound: f64,
    /// Bound `η` on the additive measurement noise.
    pub noise_bound: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GpConfig {
    pub convergence: IndexModelConfig,
    pub safety: IndexModelConfig,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TriggerConfig {
    /// Decay rate of the trigger threshold.
    pub gamma: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    /// Write every exploration episode to `trajectories/`.
    #[serde(default)]
    pub dump_trajectories: bool,
    /// Keep every n-th integration step in trajectory files.
    #[serde(default = "default_decimation")]
    pub trajectory_decimation: usize,
}

fn default_decimation() -> usize {
    100
}

impl Default for OutputConfig {
    fn default() -> Self {
        OutputConfig {
            dump_trajectories: false,
            trajectory_decimation: default_decimation(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub seed: u64,
    pub parameter_space: ParameterSpace,
    pub initial_safe_set: ParamBox,
    pub exploration: ExplorationConfig,
    pub gp: GpConfig,
    pub plant: PlantSpec,
    pub trigger: TriggerConfig,
    pub controller: ControllerSpec,
    pub convergence: ConvergenceSpec,
    pub safety: SafetySpec,
    pub simulation: SimSettings,
    #[serde(default)]
    pub output: OutputConfig,
}

pub const DEFAULT_SEED: u64 = 20_200_101;
pub const DEFAULT_LENGTHSCALE: f64 = 0.2;
pub const DEFAULT_RKHS_BOUND: f64 = 2.0;
pub const DEFAULT_NOISE_BOUND: f64 = 0.01;

impl RunConfig {
    /// Inverted pendulum experiment: `x̄ = (1, 0)`, `K = (−1.08, −1.43)`,
    /// `γ = 0.1`, parameter space `[0.01, 1]²`, `Q = I`, `η₀ = 2`, decay 0.05,
    /// `|x₂| < 0.25`, initial safe set `[0.01, 0.05]²`, 10 initial and 100
    /// exploration episodes.
    pub fn paper_iv() -> Self {
        let kernel = KernelSpec::squared_exponential(vec![DEFAULT_LENGTHSCALE; 2], 1.0)
            .expect("valid default kernel");
        let index_model = IndexModelConfig {
            kernel,
            rkhs_bound: DEFAULT_RKHS_BOUND,
            noise_bound: DEFAULT_NOISE_BOUND,
        };
        RunConfig {
            seed: DEFAULT_SEED,
            parameter_space: ParameterSpace {
                lower: vec![0.01, 0.01],
                upper: vec![1.0, 1.0],
                grid_resolution: vec![50, 50],
            },
            initial_safe_set: ParamBox::square(0.01, 0.05, 2),
            exploration: ExplorationConfig {
                n_init: 10,
                n_exp: 100,
            },
            gp: GpConfig {
                convergence: index_model.clone(),
                safety: index_model,
            },
            plant: PlantSpec::pendulum([1.0, 0.0]),
            trigger: TriggerConfig { gamma: 0.1 },
            controller: ControllerSpec::row(&[-1.08, -1.43]),
            convergence: ConvergenceSpec::identity(2, 2.0, 0.05),
            safety: SafetySpec {
                mode: SafetyMode::ComponentAbsBound,
                component: 1,
                xi: 0.25,
            },
            simulation: SimSettings {
                horizon: 30.0,
                dt: 1e-3,
            },
            output: OutputConfig::default(),
        }
    }

    pub fn preset(name: &str) -> Option<Self> {
        match name {
            "paper_iv" => Some(Self::paper_iv()),
            _ => None,
        }
    }

    pub fn from_toml_str(text: &str) -> Result<Self> {
        let cfg: RunConfig = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string(self).expect("config serializes to TOML")
    }

    pub fn validate(&self) -> Result<()> {
        let cfg_err = |e: Error| Error::Config(e.to_string());
        let space = self.parameter_space.bounds();
        space.validate().map_err(cfg_err)?;
        let dim = space.dim();
        if dim != 2 {
            return Err(Error::Config(format!(
                "parameter space must be 2-dimensional (eps0, eps_inf), got {dim}"
            )));
        }
        if space.lower.iter().any(|v| *v < 0.0) {
            return Err(Error::Config(
                "trigger thresholds must be non-negative".into(),
            ));
        }
        let res = &self.parameter_space.grid_resolution;
        if res.len() != dim || res.contains(&0) {
            return Err(Error::Config(format!(
                "grid_resolution needs {dim} positive entries, got {res:?}"
            )));
        }
        self.initial_safe_set.validate().map_err(cfg_err)?;
        if !space.contains_box(&self.initial_safe_set) {
            return Err(Error::Config(
                "initial_safe_set must lie inside parameter_space".into(),
            ));
        }
        if self.exploration.n_init == 0 {
            return Err(Error::Config(
                "exploration.n_init must be at least 1".into(),
            ));
        }
        for (name, m) in [
            ("convergence", &self.gp.convergence),
            ("safety", &self.gp.safety),
        ] {
            m.kernel
                .validate()
                .map_err(|e| Error::Config(format!("gp.{name}.kernel: {e}")))?;
            if m.kernel.dim() != dim {
                return Err(Error::Config(format!(
                    "gp.{name}.kernel has {} lengthscales, parameter space has {dim} dimensions",
                    m.kernel.dim()
                )));
            }
            if !(m.rkhs_bound > 0.0) || !m.rkhs_bound.is_finite() {
                return Err(Error::Config(format!(
                    "gp.{name}.rkhs_bound must be positive"
                )));
            }
            if !(m.noise_bound >= 0.0) || !m.noise_bound.is_finite() {
                return Err(Error::Config(format!(
                    "gp.{name}.noise_bound must be non-negative"
                )));
            }
        }
        self.plant.validate().map_err(cfg_err)?;
        let (n_x, n_u) = (self.plant.model.state_dim(), self.plant.model.input_dim());
        self.controller.validate(n_x, n_u).map_err(cfg_err)?;
        if !(self.trigger.gamma > 0.0) || !self.trigger.gamma.is_finite() {
            return Err(Error::Config("trigger.gamma must be positive".into()));
        }
        self.convergence.validate(n_x).map_err(cfg_err)?;
        self.safety.validate(n_x).map_err(cfg_err)?;
        self.simulation.steps().map_err(cfg_err)?;
        if self.output.trajectory_decimation == 0 {
            return Err(Error::Config(
                "output.trajectory_decimation must be positive".into(),
            ));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn preset_constants() {
        let c = RunConfig::paper_iv();
        c.validate().unwrap();
        assert_eq!(c.plant.initial_state, vec![1.0, 0.0]);
        assert_eq!(c.controller.gain, vec![vec![-1.08, -1.43]]);
        assert_eq!(c.trigger.gamma, 0.1);
        assert_eq!(c.parameter_space.lower, vec![0.01, 0.01]);
        assert_eq!(c.parameter_space.upper, vec![1.0, 1.0]);
        assert_eq!(c.convergence.q, vec![vec![1.0, 0.0], vec![0.0, 1.0]]);
        assert_eq!(c.convergence.eta0, 2.0);
        assert_eq!(c.convergence.decay, 0.05);
        assert_eq!(c.safety.xi, 0.25);
        assert_eq!(c.initial_safe_set, ParamBox::square(0.01, 0.05, 2));
        assert_eq!(c.exploration.n_init, 10);
        assert_eq!(c.exploration.n_exp, 100);
    }

    #[test]
    fn toml_round_trip() {
        let c = RunConfig::paper_iv();
        let back = RunConfig::from_toml_str(&c.to_toml_string()).unwrap();
        assert_eq!(c, back);
    }

    #[test]
    fn unknown_keys_rejected() {
        let mut text = RunConfig::paper_iv().to_toml_string();
        text.push_str("\n[extra]\nfoo = 1\n");
        assert!(matches!(
            RunConfig::from_toml_str(&text),
            Err(Error::Config(_))
        ));

        let text = RunConfig::paper_iv()
            .to_toml_string()
            .replace("n_init", "n_initial");
        assert!(RunConfig::from_toml_str(&text).is_err());
    }

    #[test]
    fn init_set_outside_space_rejected() {
        let mut c = RunConfig::paper_iv();
        c.initial_safe_set = ParamBox::square(0.0, 0.05, 2);
        assert!(c.validate().is_err());
    }

    #[test]
    fn zero_initial_samples_rejected() {
        let mut c = RunConfig::paper_iv();
        c.exploration.n_init = 0;
        assert!(c.validate().is_err());
    }
}

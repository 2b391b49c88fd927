use crate::config::RunConfig;
use crate::error::Result;
use crate::indices::{convergence_index, safety_index};
use crate::plant::{run_episode, EtmSpec, Trajectory};
use crate::theta::ThetaPoint;

/// Noise-free indices of one closed-loop episode.
#[derive(Debug, Clone, PartialEq)]
pub struct Evaluation {
    pub convergence: f64,
    pub safety: f64,
    pub trajectory: Trajectory,
}

impl Evaluation {
    pub fn satisfies_both(&self) -> bool {
        self.convergence > 0.0 && self.safety > 0.0
    }
}

/// Runs the configured plant under trigger parameter `theta` and scores it.
pub fn evaluate(cfg: &RunConfig, theta: &ThetaPoint) -> Result<Evaluation> {
    let etm = EtmSpec::from_theta(theta, cfg.trigger.gamma)?;
    let trajectory = run_episode(&cfg.plant, &etm, &cfg.controller, &cfg.simulation)?;
    Ok(Evaluation {
        convergence: convergence_index(&trajectory, &cfg.convergence),
        safety: safety_index(&trajectory, &cfg.safety),
        trajectory,
    })
}

//! Convergence and safety indices of a closed-loop trajectory.
//!
//! Infima over continuous time are taken as minima over the integration grid.
//! Unbounded values are represented by finite sentinels so they survive CSV.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::plant::Trajectory;

/// Stands for `+∞` (e.g. a trajectory pinned at the origin).
pub const POS_SENTINEL: f64 = 1e18;
/// Stands for `−∞` (diverged trajectory).
pub const NEG_SENTINEL: f64 = -1e18;

/// `g(x) = min_{t>0} η₀ e^{−βt} / (xᵀQx) − 1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConvergenceSpec {
    pub q: Vec<Vec<f64>>,
    pub eta0: f64,
    pub decay: f64,
    #[serde(default = "default_denom_floor")]
    pub denom_floor: f64,
}

fn default_denom_floor() -> f64 {
    1e-12
}

impl ConvergenceSpec {
    pub fn identity(dim: usize, eta0: f64, decay: f64) -> Self {
        ConvergenceSpec {
            q: (0..dim)
                .map(|i| (0..dim).map(|j| if i == j { 1.0 } else { 0.0 }).collect())
                .collect(),
            eta0,
            decay,
            denom_floor: default_denom_floor(),
        }
    }

    pub fn validate(&self, n_x: usize) -> Result<()> {
        if self.q.len() != n_x || self.q.iter().any(|r| r.len() != n_x) {
            return Err(Error::Input(format!("Q must be {n_x} x {n_x}")));
        }
        for i in 0..n_x {
            for j in 0..i {
                if self.q[i][j] != self.q[j][i] {
                    return Err(Error::Input("Q must be symmetric".into()));
                }
            }
        }
        // Cholesky test for positive definiteness.
        let mut l = vec![vec![0.0; n_x]; n_x];
        for i in 0..n_x {
            for j in 0..=i {
                let s: f64 = (0..j).map(|k| l[i][k] * l[j][k]).sum();
                if i == j {
                    let d = self.q[i][i] - s;
                    if !(d > 0.0) {
                        return Err(Error::Input("Q must be positive definite".into()));
                    }
                    l[i][i] = d.sqrt();
                } else {
                    l[i][j] = (self.q[i][j] - s) / l[j][j];
                }
            }
        }
        if !(self.eta0 > 0.0) || !(self.decay > 0.0) || !(self.denom_floor > 0.0) {
            return Err(Error::Input(
                "eta0, decay and denom_floor must be positive".into(),
            ));
        }
        Ok(())
    }

    pub fn envelope(&self, t: f64) -> f64 {
        self.eta0 * (-self.decay * t).exp()
    }

    fn quad(&self, x: &[f64]) -> f64 {
        self.q
            .iter()
            .zip(x)
            .map(|(row, xi)| xi * row.iter().zip(x).map(|(q, xj)| q * xj).sum::<f64>())
            .sum()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SafetyMode {
    /// `ξ − ‖x(t)‖`
    NormBound,
    /// `ξ − |x_c(t)|`
    ComponentAbsBound,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SafetySpec {
    pub mode: SafetyMode,
    /// Zero-based state component, used by `component_abs_bound`.
    #[serde(default)]
    pub component: usize,
    pub xi: f64,
}

impl SafetySpec {
    pub fn validate(&self, n_x: usize) -> Result<()> {
        if !(self.xi > 0.0) || !self.xi.is_finite() {
            return Err(Error::Input(format!(
                "safety threshold must be positive, got {}",
                self.xi
            )));
        }
        if self.mode == SafetyMode::ComponentAbsBound && self.component >= n_x {
            return Err(Error::Input(format!(
                "safety component {} out of range for state dimension {n_x}",
                self.component
            )));
        }
        Ok(())
    }
}

pub fn convergence_index(traj: &Trajectory, spec: &ConvergenceSpec) -> f64 {
    if traj.diverged {
        return NEG_SENTINEL;
    }
    let mut best = f64::INFINITY;
    for i in 1..traj.len() {
        let d = spec.quad(traj.state(i));
        if d < spec.denom_floor {
            continue;
        }
        let r = spec.envelope(traj.times[i]) / d - 1.0;
        if r < best {
            best = r;
        }
    }
    if best.is_finite() {
        best.min(POS_SENTINEL)
    } else {
        POS_SENTINEL
    }
}

pub fn safety_index(traj: &Trajectory, spec: &SafetySpec) -> f64 {
    if traj.diverged {
        return NEG_SENTINEL;
    }
    let margin = |x: &[f64]| match spec.mode {
        SafetyMode::NormBound => spec.xi - x.iter().map(|v| v * v).sum::<f64>().sqrt(),
        SafetyMode::ComponentAbsBound => spec.xi - x[spec.component].abs(),
    };
    (0..traj.len())
        .map(|i| margin(traj.state(i)))
        .fold(f64::INFINITY, f64::min)
        .clamp(NEG_SENTINEL, POS_SENTINEL)
}

/// Adds noise drawn uniformly from `[−η, η]`. With `η = 0` no draw is consumed.
pub fn observe<R: Rng + ?Sized>(true_value: f64, noise_bound: f64, rng: &mut R) -> f64 {
    if noise_bound > 0.0 {
        true_value + rng.gen_range(-noise_bound..=noise_bound)
    } else {
        true_value
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn pendulum_spec() -> ConvergenceSpec {
        ConvergenceSpec::identity(2, 2.0, 0.05)
    }

    fn v_safety() -> SafetySpec {
        SafetySpec {
            mode: SafetyMode::ComponentAbsBound,
            component: 1,
            xi: 0.25,
        }
    }

    #[test]
    fn origin_trajectory_sentinels() {
        let traj = Trajectory::from_states(0.1, vec![vec![0.0, 0.0]; 50]);
        assert_eq!(convergence_index(&traj, &pendulum_spec()), POS_SENTINEL);
        assert_eq!(safety_index(&traj, &v_safety()), 0.25);
    }

    #[test]
    fn constant_state_hits_final_time_minimum() {
        // 30 s at dt = 0.01 → 3001 samples; minimum at t = 30.
        let traj = Trajectory::from_states(0.01, vec![vec![1.0, 0.0]; 3001]);
        let g = convergence_index(&traj, &pendulum_spec());
        let expected = 2.0 * (-1.5f64).exp() - 1.0;
        assert!((g - expected).abs() < 1e-12);
        assert!((g + 0.5537).abs() < 1e-4);
    }

    #[test]
    fn convergence_skips_t_zero() {
        // Huge state at t = 0 only; excluded from the minimum.
        let mut states = vec![vec![0.5, 0.0]; 11];
        states[0] = vec![100.0, 0.0];
        let traj = Trajectory::from_states(0.1, states);
        assert!(convergence_index(&traj, &pendulum_spec()) > 0.0);
    }

    #[test]
    fn safety_constructed_peak() {
        let states: Vec<Vec<f64>> = (0..=100)
            .map(|i| vec![0.0, 0.2 * (std::f64::consts::PI * i as f64 / 100.0).sin()])
            .collect();
        let traj = Trajectory::from_states(0.01, states);
        assert!((safety_index(&traj, &v_safety()) - 0.05).abs() < 1e-12);
    }

    #[test]
    fn safety_includes_initial_state() {
        let mut states = vec![vec![0.0, 0.0]; 10];
        states[0] = vec![0.0, 0.3];
        let traj = Trajectory::from_states(0.1, states);
        assert!(safety_index(&traj, &v_safety()) < 0.0);
    }

    #[test]
    fn norm_mode() {
        let traj = Trajectory::from_states(0.1, vec![vec![0.3, 0.4]; 3]);
        let spec = SafetySpec {
            mode: SafetyMode::NormBound,
            component: 0,
            xi: 1.0,
        };
        assert!((safety_index(&traj, &spec) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn diverged_trajectory_fails_both() {
        let mut traj = Trajectory::from_states(0.1, vec![vec![0.1, 0.0]; 3]);
        traj.diverged = true;
        assert_eq!(convergence_index(&traj, &pendulum_spec()), NEG_SENTINEL);
        assert_eq!(safety_index(&traj, &v_safety()), NEG_SENTINEL);
    }

    #[test]
    fn spec_validation() {
        let mut c = pendulum_spec();
        c.validate(2).unwrap();
        c.q = vec![vec![1.0, 2.0], vec![2.0, 1.0]];
        assert!(c.validate(2).is_err());
        assert!(v_safety().validate(1).is_err());
    }

    #[test]
    fn noiseless_observe_is_identity() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        assert_eq!(observe(0.123, 0.0, &mut rng), 0.123);
    }

    #[test]
    fn noise_replays_with_seed() {
        let draw = |seed| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            (0..20)
                .map(|_| observe(1.0, 0.01, &mut rng))
                .collect::<Vec<_>>()
        };
        assert_eq!(draw(7), draw(7));
        assert_ne!(draw(7), draw(8));
    }

    #[test]
    fn noise_bounded_over_many_draws() {
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        for _ in 0..10_000 {
            let v = observe(0.4, 0.01, &mut rng);
            assert!((v - 0.4).abs() <= 0.01);
        }
    }

    proptest! {
        #[test]
        fn safety_shifts_exactly_with_threshold(
            xs in proptest::collection::vec(-1.0f64..1.0, 2..40),
            xi in 0.01f64..2.0,
            delta in 0.0f64..1.0,
        ) {
            let states: Vec<Vec<f64>> = xs.iter().map(|v| vec![0.0, *v]).collect();
            let traj = Trajectory::from_states(0.1, states);
            let a = safety_index(&traj, &SafetySpec { mode: SafetyMode::ComponentAbsBound, component: 1, xi });
            let b = safety_index(&traj, &SafetySpec { mode: SafetyMode::ComponentAbsBound, component: 1, xi: xi + delta });
            prop_assert!((b - a - delta).abs() < 1e-12);
        }

        #[test]
        fn scaling_up_never_increases_convergence(
            xs in proptest::collection::vec((0.01f64..1.0, -1.0f64..1.0), 2..40),
            c in 1.0f64..5.0,
        ) {
            let spec = pendulum_spec();
            let base: Vec<Vec<f64>> = xs.iter().map(|(a, b)| vec![*a, *b]).collect();
            let scaled: Vec<Vec<f64>> = base.iter().map(|v| v.iter().map(|x| c * x).collect()).collect();
            let g0 = convergence_index(&Trajectory::from_states(0.1, base), &spec);
            let g1 = convergence_index(&Trajectory::from_states(0.1, scaled), &spec);
            prop_assert!(g1 <= g0 + 1e-12);
        }
    }
}

use std::io::{self, Write};

use serde::{Deserialize, Serialize};

use super::{ControllerSpec, Dynamics, EtmSpec, PlantSpec};
use crate::error::{Error, Result};
use crate::num_fmt::format_float;

/// State norm beyond which an episode is declared diverged.
pub const DIVERGENCE_NORM: f64 = 1e6;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimSettings {
    pub horizon: f64,
    pub dt: f64,
}

impl SimSettings {
    pub fn steps(&self) -> Result<usize> {
        if !(self.horizon > 0.0) || !(self.dt > 0.0) || !self.horizon.is_finite() {
            return Err(Error::Input(format!(
                "horizon and step must be positive (T = {}, dt = {})",
                self.horizon, self.dt
            )));
        }
        let n = (self.horizon / self.dt).round();
        if (n * self.dt - self.horizon).abs() > 1e-9 * self.horizon.max(1.0) || n < 1.0 {
            return Err(Error::Input(format!(
                "horizon {} is not an integral multiple of dt {}",
                self.horizon, self.dt
            )));
        }
        Ok(n as usize)
    }
}

/// Sampled closed-loop record of one episode on the integration grid.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub n_x: usize,
    pub n_u: usize,
    pub dt: f64,
    pub times: Vec<f64>,
    /// Row-major, `n_x` values per time step.
    pub states: Vec<f64>,
    /// Row-major, `n_u` values per time step; the input applied over `[t_i, t_{i+1})`.
    pub inputs: Vec<f64>,
    pub events: Vec<bool>,
    pub event_times: Vec<f64>,
    pub diverged: bool,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn state(&self, i: usize) -> &[f64] {
        &self.states[i * self.n_x..(i + 1) * self.n_x]
    }

    pub fn input(&self, i: usize) -> &[f64] {
        &self.inputs[i * self.n_u..(i + 1) * self.n_u]
    }

    pub fn final_state(&self) -> &[f64] {
        self.state(self.len() - 1)
    }

    pub fn event_count(&self) -> usize {
        self.event_times.len()
    }

    /// Builds a trajectory directly from sampled states, with zero input and
    /// no events after the first sample. Mostly useful for exercising the
    /// index functions on hand-made signals.
    pub fn from_states(dt: f64, states: Vec<Vec<f64>>) -> Self {
        let n_x = states.first().map_or(0, Vec::len);
        let len = states.len();
        Trajectory {
            n_x,
            n_u: 1,
            dt,
            times: (0..len).map(|i| i as f64 * dt).collect(),
            states: states.into_iter().flatten().collect(),
            inputs: vec![0.0; len],
            events: (0..len).map(|i| i == 0).collect(),
            event_times: if len > 0 { vec![0.0] } else { vec![] },
            diverged: false,
        }
    }

    /// Writes `t,x1..xn,u(1..m),event`, keeping every `decimation`-th row
    /// plus the final one.
    pub fn write_csv<W: Write>(&self, mut w: W, decimation: usize) -> io::Result<()> {
        let decimation = decimation.max(1);
        let mut header = String::from("t");
        for i in 1..=self.n_x {
            header.push_str(&format!(",x{i}"));
        }
        if self.n_u == 1 {
            header.push_str(",u");
        } else {
            for i in 1..=self.n_u {
                header.push_str(&format!(",u{i}"));
            }
        }
        header.push_str(",event");
        writeln!(w, "{header}")?;
        let last = self.len().saturating_sub(1);
        for i in 0..self.len() {
            if i % decimation != 0 && i != last {
                continue;
            }
            let mut row = format_float(self.times[i]);
            for v in self.state(i).iter().chain(self.input(i)) {
                row.push(',');
                row.push_str(&format_float(*v));
            }
            row.push_str(if self.events[i] { ",1" } else { ",0" });
            writeln!(w, "{row}")?;
        }
        Ok(())
    }
}

fn rk4_step<D: Dynamics + ?Sized>(
    f: &D,
    x: &mut [f64],
    u: &[f64],
    dt: f64,
    scratch: &mut [Vec<f64>; 5],
) {
    let [k1, k2, k3, k4, tmp] = scratch;
    let n = x.len();
    f.derivative(x, u, k1);
    for i in 0..n {
        tmp[i] = x[i] + 0.5 * dt * k1[i];
    }
    f.derivative(tmp, u, k2);
    for i in 0..n {
        tmp[i] = x[i] + 0.5 * dt * k2[i];
    }
    f.derivative(tmp, u, k3);
    for i in 0..n {
        tmp[i] = x[i] + dt * k3[i];
    }
    f.derivative(tmp, u, k4);
    for i in 0..n {
        x[i] += dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    }
}

/// Simulates one closed-loop episode on the grid `t_i = i·dt`, `i = 0..=T/dt`.
///
/// At each grid point the trigger is checked first; on an event the held
/// sample is refreshed and logged, then `u = K x̂` is applied constant over the
/// following RK4 step. A retransmission that would not change the held sample
/// (`x = x̂`) is not counted as an event. The first grid point always transmits.
pub fn run_episode(
    plant: &PlantSpec,
    etm: &EtmSpec,
    ctrl: &ControllerSpec,
    sim: &SimSettings,
) -> Result<Trajectory> {
    plant.validate()?;
    etm.validate()?;
    let f = &plant.model;
    let (n_x, n_u) = (f.state_dim(), f.input_dim());
    ctrl.validate(n_x, n_u)?;
    let steps = sim.steps()?;

    let mut traj = Trajectory {
        n_x,
        n_u,
        dt: sim.dt,
        times: Vec::with_capacity(steps + 1),
        states: Vec::with_capacity((steps + 1) * n_x),
        inputs: Vec::with_capacity((steps + 1) * n_u),
        events: Vec::with_capacity(steps + 1),
        event_times: Vec::new(),
        diverged: false,
    };

    let mut x = plant.initial_state.clone();
    let mut held = x.clone();
    let mut u = vec![0.0; n_u];
    let mut scratch: [Vec<f64>; 5] = std::array::from_fn(|_| vec![0.0; n_x]);

    for i in 0..=steps {
        let t = i as f64 * sim.dt;
        let event = i == 0 || (x != held && etm.trigger(&x, &held, t));
        if event {
            held.copy_from_slice(&x);
            traj.event_times.push(t);
        }
        ctrl.apply(&held, &mut u);

        traj.times.push(t);
        traj.states.extend_from_slice(&x);
        traj.inputs.extend_from_slice(&u);
        traj.events.push(event);

        if i == steps {
            break;
        }
        rk4_step(f, &mut x, &u, sim.dt, &mut scratch);
        let norm2: f64 = x.iter().map(|v| v * v).sum();
        if !norm2.is_finite() || norm2 > DIVERGENCE_NORM * DIVERGENCE_NORM {
            traj.diverged = true;
            break;
        }
    }
    Ok(traj)
}

//! Fixtures shared by the benchmarks.

use etc_core::explorer::{stream_rng, Grid, GridSets, Stream};
use etc_core::gp::{Dataset, GpModel};
use etc_core::{RunConfig, ThetaPoint};
use rand::Rng;

/// GP pair fitted to `n` synthetic observations scattered over the preset's
/// parameter space, plus the preset grid seeded with the initial safe set.
pub fn fitted_pair(n: usize) -> (RunConfig, GpModel, GpModel, GridSets) {
    let cfg = RunConfig::paper_iv();
    let mut rng = stream_rng(7, Stream::ThetaSampling);
    let mut g = Dataset::new(cfg.gp.convergence.noise_bound);
    let mut s = Dataset::new(cfg.gp.safety.noise_bound);
    for _ in 0..n {
        let a: f64 = rng.gen_range(0.01..0.5);
        let b: f64 = rng.gen_range(0.01..0.5);
        let theta = ThetaPoint::from([a, b]);
        g.push(theta.clone(), 0.5 - a);
        s.push(theta, 0.1 - 0.1 * b);
    }
    let gp_g = GpModel::fit(&cfg.gp.convergence.kernel, &g).unwrap();
    let gp_s = GpModel::fit(&cfg.gp.safety.kernel, &s).unwrap();
    let bounds = cfg.parameter_space.bounds();
    let grid = Grid::new(&bounds, &cfg.parameter_space.grid_resolution);
    let sets = GridSets::seeded(grid, &cfg.initial_safe_set);
    (cfg, gp_g, gp_s, sets)
}

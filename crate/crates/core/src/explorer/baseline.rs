use super::{evaluate, stream_rng, Stream};
use crate::config::RunConfig;
use crate::error::Result;
use crate::indices::observe;
use crate::theta::ThetaPoint;

#[derive(Debug, Clone, PartialEq)]
pub struct BaselineRecord {
    pub j: usize,
    pub theta: ThetaPoint,
    pub y_g: f64,
    pub y_s: f64,
}

/// Random search: `n_exp` episodes at points drawn uniformly from the whole
/// parameter space, with no model and no safety restriction.
pub fn random_search_baseline(cfg: &RunConfig) -> Result<Vec<BaselineRecord>> {
    cfg.validate()?;
    let space = cfg.parameter_space.bounds();
    let mut sampler = stream_rng(cfg.seed, Stream::BaselineSampling);
    let mut noise = stream_rng(cfg.seed, Stream::BaselineNoise);
    (1..=cfg.exploration.n_exp)
        .map(|j| {
            let theta = space.sample(&mut sampler);
            let eval = evaluate(cfg, &theta)?;
            Ok(BaselineRecord {
                j,
                y_g: observe(eval.convergence, cfg.gp.convergence.noise_bound, &mut noise),
                y_s: observe(eval.safety, cfg.gp.safety.noise_bound, &mut noise),
                theta,
            })
        })
        .collect()
}

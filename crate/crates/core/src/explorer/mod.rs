//! Safe active exploration of the trigger-parameter space.
//!
//! Two GPs model the convergence and safety index maps. Each iteration
//! certifies grid points by their lower confidence bounds, grows the
//! accumulated sets by union, and samples the point of the safe set with the
//! largest summed posterior variance.

mod audit;
mod baseline;
mod episode;
mod grid;

pub use audit::{audit_theta, sample_theta_cells, AuditRow};
pub use baseline::{random_search_baseline, BaselineRecord};
pub use episode::{evaluate, Evaluation};
pub use grid::{Grid, GridSets, SetsDelta};

use std::fmt;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::config::RunConfig;
use crate::error::{Error, Result};
use crate::gp::{Beta, Dataset, GpModel};
use crate::indices::observe;
use crate::theta::ThetaPoint;

/// Caps the number of threads used for grid evaluation.
pub const THREADS_ENV: &str = "ETC_EXPLORE_THREADS";

/// Independent random streams derived from the run seed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stream {
    InitialSampling = 1,
    ExplorationNoise = 2,
    BaselineSampling = 3,
    BaselineNoise = 4,
    ThetaSampling = 5,
}

pub fn stream_rng(seed: u64, stream: Stream) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream as u64);
    rng
}

#[derive(Debug, Clone, PartialEq)]
pub struct Sample {
    pub theta: ThetaPoint,
    pub y_g: f64,
    pub y_s: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct IterationRecord {
    pub j: usize,
    pub theta: ThetaPoint,
    pub y_g: f64,
    pub y_s: f64,
    pub beta_g: f64,
    pub beta_s: f64,
    pub size_theta_s: usize,
    pub size_theta: usize,
    /// Summed posterior variance at the selected point.
    pub acq_value: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Warning {
    /// `B² < Yᵀ K⁻¹ Y`: the RKHS bound is smaller than the data imply.
    BetaClamped {
        index: &'static str,
        n: usize,
        quad_form: f64,
        rkhs_bound: f64,
    },
    SafetyViolation {
        j: usize,
        theta: ThetaPoint,
        y_s: f64,
    },
}

impl fmt::Display for Warning {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Warning::BetaClamped {
                index,
                n,
                quad_form,
                rkhs_bound,
            } => write!(
                f,
                "beta_{index} clamped at N={n}: Y^T K^-1 Y = {quad_form:.6e} exceeds B^2 = {:.6e}",
                rkhs_bound * rkhs_bound
            ),
            Warning::SafetyViolation { j, theta, y_s } => {
                write!(
                    f,
                    "safety violation at j={j}, theta={:?}: y_s = {y_s:.6e}",
                    theta.0
                )
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RunStatus {
    Compliant,
    SafetyViolated,
}

#[derive(Debug, Clone)]
pub struct ExplorationOutcome {
    pub sets: GridSets,
    pub records: Vec<IterationRecord>,
    pub initial: Vec<Sample>,
    pub warnings: Vec<Warning>,
    pub status: RunStatus,
    pub gp_g: GpModel,
    pub gp_s: GpModel,
}

/// Confidence evaluation of one Step 1 pass.
#[derive(Debug, Clone, PartialEq)]
pub struct StepSets {
    pub beta_g: Beta,
    pub beta_s: Beta,
    pub delta: SetsDelta,
}

fn thread_pool() -> Option<rayon::ThreadPool> {
    let n: usize = std::env::var(THREADS_ENV).ok()?.trim().parse().ok()?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n.max(1))
        .build()
        .ok()
}

fn in_pool<T: Send>(pool: Option<&rayon::ThreadPool>, f: impl FnOnce() -> T + Send) -> T {
    match pool {
        Some(p) => p.install(f),
        None => f(),
    }
}

/// Runs `n_init` episodes at points drawn uniformly from the initial safe set.
///
/// Any non-positive safety observation means the initial set is not safe and
/// aborts with [`Error::UnsafeInitialSet`].
pub fn initial_phase(
    cfg: &RunConfig,
    sampler: &mut ChaCha8Rng,
    noise: &mut ChaCha8Rng,
) -> Result<(Dataset, Dataset, Vec<Sample>)> {
    let mut data_g = Dataset::new(cfg.gp.convergence.noise_bound);
    let mut data_s = Dataset::new(cfg.gp.safety.noise_bound);
    let mut samples = Vec::with_capacity(cfg.exploration.n_init);
    for i in 0..cfg.exploration.n_init {
        let theta = cfg.initial_safe_set.sample(sampler);
        let eval = evaluate(cfg, &theta)?;
        let y_g = observe(eval.convergence, cfg.gp.convergence.noise_bound, noise);
        let y_s = observe(eval.safety, cfg.gp.safety.noise_bound, noise);
        if !(y_s > 0.0) {
            return Err(Error::UnsafeInitialSet {
                index: i + 1,
                theta: theta.0,
                y_s,
            });
        }
        data_g.push(theta.clone(), y_g);
        data_s.push(theta.clone(), y_s);
        samples.push(Sample { theta, y_g, y_s });
    }
    Ok((data_g, data_s, samples))
}

/// Strict lower-confidence-bound test `μ − β σ > 0`.
pub fn certifies(mean: f64, variance: f64, beta: f64) -> bool {
    mean - beta * variance.sqrt() > 0.0
}

/// Step 1: points whose safety lower bound is positive, and those whose
/// convergence lower bound is positive as well. Both tests are strict.
pub fn compute_sets(
    gp_g: &GpModel,
    gp_s: &GpModel,
    bound_g: f64,
    bound_s: f64,
    grid: &Grid,
) -> Result<StepSets> {
    let beta_g = gp_g.beta(bound_g)?;
    let beta_s = gp_s.beta(bound_s)?;
    let flags: Vec<(bool, bool)> = grid
        .points
        .par_iter()
        .map(|p| {
            let (ms, vs) = gp_s.posterior_unchecked(p.as_slice());
            let safe = certifies(ms, vs, beta_s.value);
            let certified = safe && {
                let (mg, vg) = gp_g.posterior_unchecked(p.as_slice());
                certifies(mg, vg, beta_g.value)
            };
            (safe, certified)
        })
        .collect();
    let (safe, certified) = flags.into_iter().unzip();
    Ok(StepSets {
        beta_g,
        beta_s,
        delta: SetsDelta { safe, certified },
    })
}

/// Step 2: argmax of `σ²_g + σ²_s` over the accumulated safe set. Ties go to
/// the lowest grid index.
pub fn acquire(gp_g: &GpModel, gp_s: &GpModel, sets: &GridSets) -> Result<(usize, f64)> {
    let scores: Vec<Option<f64>> = sets
        .grid
        .points
        .par_iter()
        .zip(sets.in_theta_s.par_iter())
        .map(|(p, &safe)| {
            safe.then(|| {
                gp_g.posterior_unchecked(p.as_slice()).1 + gp_s.posterior_unchecked(p.as_slice()).1
            })
        })
        .collect();
    let mut best: Option<(usize, f64)> = None;
    for (i, s) in scores.into_iter().enumerate() {
        if let Some(s) = s {
            if best.is_none_or(|(_, b)| s > b) {
                best = Some((i, s));
            }
        }
    }
    best.ok_or_else(|| Error::Invariant("accumulated safe set is empty".into()))
}

fn note_clamp(warnings: &mut Vec<Warning>, index: &'static str, n: usize, beta: &Beta, bound: f64) {
    if beta.clamped {
        warnings.push(Warning::BetaClamped {
            index,
            n,
            quad_form: beta.quad_form,
            rkhs_bound: bound,
        });
    }
}

/// Full exploration run: initial phase, `n_exp` iterations of
/// certify → acquire → measure → refit, and a final certification pass with
/// all collected data.
pub fn explore(cfg: &RunConfig) -> Result<ExplorationOutcome> {
    explore_observed(cfg, |_, _| {})
}

/// [`explore`], calling `observer(j, sets)` after the union of iteration `j`.
/// The final certification pass is reported as `j = n_exp + 1`.
pub fn explore_observed<F>(cfg: &RunConfig, observer: F) -> Result<ExplorationOutcome>
where
    F: FnMut(usize, &GridSets) + Send,
{
    cfg.validate()?;
    let pool = thread_pool();
    in_pool(pool.as_ref(), || explore_inner(cfg, observer))
}

fn explore_inner<F: FnMut(usize, &GridSets)>(
    cfg: &RunConfig,
    mut observer: F,
) -> Result<ExplorationOutcome> {
    let mut sampler = stream_rng(cfg.seed, Stream::InitialSampling);
    let mut noise = stream_rng(cfg.seed, Stream::ExplorationNoise);
    let (mut data_g, mut data_s, initial) = initial_phase(cfg, &mut sampler, &mut noise)?;

    let (bound_g, bound_s) = (cfg.gp.convergence.rkhs_bound, cfg.gp.safety.rkhs_bound);
    let kernel_g = &cfg.gp.convergence.kernel;
    let kernel_s = &cfg.gp.safety.kernel;
    let mut gp_g = GpModel::fit(kernel_g, &data_g)?;
    let mut gp_s = GpModel::fit(kernel_s, &data_s)?;

    let grid = Grid::new(
        &cfg.parameter_space.bounds(),
        &cfg.parameter_space.grid_resolution,
    );
    let mut sets = GridSets::seeded(grid, &cfg.initial_safe_set);
    let mut records = Vec::with_capacity(cfg.exploration.n_exp);
    let mut warnings = Vec::new();
    let mut status = RunStatus::Compliant;

    for j in 1..=cfg.exploration.n_exp {
        let step = compute_sets(&gp_g, &gp_s, bound_g, bound_s, &sets.grid)?;
        note_clamp(&mut warnings, "g", data_g.len(), &step.beta_g, bound_g);
        note_clamp(&mut warnings, "s", data_s.len(), &step.beta_s, bound_s);
        sets.absorb(&step.delta);
        observer(j, &sets);

        let (idx, acq_value) = acquire(&gp_g, &gp_s, &sets)?;
        let theta = sets.grid.points[idx].clone();
        let eval = evaluate(cfg, &theta)?;
        let y_g = observe(eval.convergence, cfg.gp.convergence.noise_bound, &mut noise);
        let y_s = observe(eval.safety, cfg.gp.safety.noise_bound, &mut noise);
        if !(y_s > 0.0) {
            status = RunStatus::SafetyViolated;
            warnings.push(Warning::SafetyViolation {
                j,
                theta: theta.clone(),
                y_s,
            });
        }

        data_g.push(theta.clone(), y_g);
        data_s.push(theta.clone(), y_s);
        gp_g = GpModel::fit(kernel_g, &data_g)?;
        gp_s = GpModel::fit(kernel_s, &data_s)?;

        records.push(IterationRecord {
            j,
            theta,
            y_g,
            y_s,
            beta_g: step.beta_g.value,
            beta_s: step.beta_s.value,
            size_theta_s: sets.size_theta_s(),
            size_theta: sets.size_theta(),
            acq_value,
        });
    }

    let last = compute_sets(&gp_g, &gp_s, bound_g, bound_s, &sets.grid)?;
    note_clamp(&mut warnings, "g", data_g.len(), &last.beta_g, bound_g);
    note_clamp(&mut warnings, "s", data_s.len(), &last.beta_s, bound_s);
    sets.absorb(&last.delta);
    observer(cfg.exploration.n_exp + 1, &sets);

    Ok(ExplorationOutcome {
        sets,
        records,
        initial,
        warnings,
        status,
        gp_g,
        gp_s,
    })
}

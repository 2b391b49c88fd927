use rand::Rng;
use rayon::prelude::*;

use super::{evaluate, GridSets};
use crate::config::RunConfig;
use crate::error::Result;
use crate::theta::ThetaPoint;

#[derive(Debug, Clone, PartialEq)]
pub struct AuditRow {
    pub grid_index: usize,
    pub theta: ThetaPoint,
    pub convergence: f64,
    pub safety: f64,
}

impl AuditRow {
    pub fn passed(&self) -> bool {
        self.convergence > 0.0 && self.safety > 0.0
    }
}

/// Noise-free re-simulation of every grid point flagged as certified.
pub fn audit_theta(cfg: &RunConfig, sets: &GridSets) -> Result<Vec<AuditRow>> {
    let idx: Vec<usize> = sets.theta_indices().collect();
    idx.par_iter()
        .map(|&i| {
            let theta = sets.grid.points[i].clone();
            let eval = evaluate(cfg, &theta)?;
            Ok(AuditRow {
                grid_index: i,
                theta,
                convergence: eval.convergence,
                safety: eval.safety,
            })
        })
        .collect()
}

/// Draws `n` points uniformly from the union of the grid cells of `Θ`.
/// Returns an empty list when `Θ` is empty.
pub fn sample_theta_cells<R: Rng + ?Sized>(
    sets: &GridSets,
    n: usize,
    rng: &mut R,
) -> Vec<ThetaPoint> {
    let idx: Vec<usize> = sets.theta_indices().collect();
    if idx.is_empty() {
        return Vec::new();
    }
    let cells: Vec<_> = idx.iter().map(|&i| sets.grid.cell(i)).collect();
    let volumes: Vec<f64> = cells
        .iter()
        .map(|c| {
            c.lower
                .iter()
                .zip(&c.upper)
                .map(|(lo, hi)| hi - lo)
                .product::<f64>()
        })
        .collect();
    let total: f64 = volumes.iter().sum();
    (0..n)
        .map(|_| {
            let pick = if total > 0.0 {
                let mut r = rng.gen_range(0.0..total);
                volumes
                    .iter()
                    .position(|v| {
                        r -= v;
                        r < 0.0
                    })
                    .unwrap_or(cells.len() - 1)
            } else {
                rng.gen_range(0..cells.len())
            };
            cells[pick].sample(rng)
        })
        .collect()
}

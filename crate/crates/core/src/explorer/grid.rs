use crate::theta::{ParamBox, ThetaPoint};

/// Uniform lattice over a box, stored in lexicographic order (first
/// coordinate varies slowest).
#[derive(Debug, Clone, PartialEq)]
pub struct Grid {
    pub bounds: ParamBox,
    pub resolution: Vec<usize>,
    pub points: Vec<ThetaPoint>,
}

impl Grid {
    pub fn new(bounds: &ParamBox, resolution: &[usize]) -> Self {
        let axes: Vec<Vec<f64>> = bounds
            .lower
            .iter()
            .zip(&bounds.upper)
            .zip(resolution)
            .map(|((&lo, &hi), &n)| {
                if n <= 1 {
                    vec![lo]
                } else {
                    (0..n)
                        .map(|k| {
                            if k == n - 1 {
                                hi
                            } else {
                                lo + (hi - lo) * k as f64 / (n - 1) as f64
                            }
                        })
                        .collect()
                }
            })
            .collect();
        let total: usize = axes.iter().map(Vec::len).product();
        let mut points = Vec::with_capacity(total);
        let mut idx = vec![0usize; axes.len()];
        for _ in 0..total {
            points.push(ThetaPoint(
                idx.iter().zip(&axes).map(|(&i, a)| a[i]).collect(),
            ));
            for d in (0..axes.len()).rev() {
                idx[d] += 1;
                if idx[d] < axes[d].len() {
                    break;
                }
                idx[d] = 0;
            }
        }
        Grid {
            bounds: bounds.clone(),
            resolution: resolution.to_vec(),
            points,
        }
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Grid spacing per dimension (zero for single-point axes).
    pub fn spacing(&self) -> Vec<f64> {
        self.bounds
            .lower
            .iter()
            .zip(&self.bounds.upper)
            .zip(&self.resolution)
            .map(|((lo, hi), &n)| {
                if n > 1 {
                    (hi - lo) / (n - 1) as f64
                } else {
                    0.0
                }
            })
            .collect()
    }

    /// Box of points closer to grid point `i` than to its neighbours, clipped to the bounds.
    pub fn cell(&self, i: usize) -> ParamBox {
        let h = self.spacing();
        let p = &self.points[i];
        ParamBox {
            lower: (0..p.dim())
                .map(|d| (p[d] - 0.5 * h[d]).max(self.bounds.lower[d]))
                .collect(),
            upper: (0..p.dim())
                .map(|d| (p[d] + 0.5 * h[d]).min(self.bounds.upper[d]))
                .collect(),
        }
    }
}

/// Accumulated safe set `Θ_s` and certified set `Θ` on a grid.
#[derive(Debug, Clone, PartialEq)]
pub struct GridSets {
    pub grid: Grid,
    pub in_theta_s: Vec<bool>,
    pub in_theta: Vec<bool>,
}

/// Per-iteration sets from one confidence-bound evaluation.
#[derive(Debug, Clone, PartialEq)]
pub struct SetsDelta {
    pub safe: Vec<bool>,
    pub certified: Vec<bool>,
}

impl GridSets {
    pub fn empty(grid: Grid) -> Self {
        let n = grid.len();
        GridSets {
            grid,
            in_theta_s: vec![false; n],
            in_theta: vec![false; n],
        }
    }

    /// Seeds `Θ_s` with every grid point inside `init`.
    pub fn seeded(grid: Grid, init: &ParamBox) -> Self {
        let mut sets = Self::empty(grid);
        for (flag, p) in sets.in_theta_s.iter_mut().zip(&sets.grid.points) {
            *flag = init.contains(p);
        }
        sets
    }

    pub fn absorb(&mut self, delta: &SetsDelta) {
        for (acc, new) in self.in_theta_s.iter_mut().zip(&delta.safe) {
            *acc |= *new;
        }
        for (acc, new) in self.in_theta.iter_mut().zip(&delta.certified) {
            *acc |= *new;
        }
    }

    pub fn size_theta_s(&self) -> usize {
        self.in_theta_s.iter().filter(|f| **f).count()
    }

    pub fn size_theta(&self) -> usize {
        self.in_theta.iter().filter(|f| **f).count()
    }

    pub fn theta_indices(&self) -> impl Iterator<Item = usize> + '_ {
        self.in_theta
            .iter()
            .enumerate()
            .filter(|(_, f)| **f)
            .map(|(i, _)| i)
    }

    pub fn is_consistent(&self) -> bool {
        self.in_theta
            .iter()
            .zip(&self.in_theta_s)
            .all(|(t, s)| !*t || *s)
    }
}

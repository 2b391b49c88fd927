//! Exact Gaussian-process regression and RKHS confidence widths.
//!
//! The posterior uses a zero prior mean and the noise-regularized Gram matrix
//! `K + (η² + jitter) I`. The same matrix backs the quadratic form `Yᵀ K⁻¹ Y`
//! inside [`GpModel::beta`].

mod kernel;

pub use kernel::{KernelKind, KernelSpec};

use nalgebra::{Cholesky, DMatrix, DVector, Dyn, SymmetricEigen};

use crate::error::{Error, Result};
use crate::theta::ThetaPoint;

/// Jitter ladder tried in order until the Cholesky factorization succeeds.
pub const JITTER_LADDER: [f64; 5] = [1e-10, 1e-9, 1e-8, 1e-7, 1e-6];

/// Posterior variances below this are reported as exactly zero.
pub const VARIANCE_FLOOR: f64 = 1e-12;

/// Paired training inputs and noisy outputs for one index.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub inputs: Vec<ThetaPoint>,
    pub outputs: Vec<f64>,
    /// Bound on the additive observation noise (η_g or η_s).
    pub noise_bound: f64,
}

impl Dataset {
    pub fn new(noise_bound: f64) -> Self {
        Dataset {
            inputs: Vec::new(),
            outputs: Vec::new(),
            noise_bound,
        }
    }

    pub fn from_parts(
        inputs: Vec<ThetaPoint>,
        outputs: Vec<f64>,
        noise_bound: f64,
    ) -> Result<Self> {
        if inputs.len() != outputs.len() {
            return Err(Error::Input(format!(
                "dataset has {} inputs but {} outputs",
                inputs.len(),
                outputs.len()
            )));
        }
        Ok(Dataset {
            inputs,
            outputs,
            noise_bound,
        })
    }

    pub fn push(&mut self, theta: ThetaPoint, y: f64) {
        self.inputs.push(theta);
        self.outputs.push(y);
    }

    pub fn len(&self) -> usize {
        self.inputs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.inputs.is_empty()
    }
}

/// Result of evaluating the confidence width for the current data.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Beta {
    pub value: f64,
    /// `Yᵀ (K + η² I)⁻¹ Y`.
    pub quad_form: f64,
    /// Set when `B² < Yᵀ K⁻¹ Y`, i.e. the supplied RKHS bound is too small
    /// for the observed data and the radicand was clamped to `N`.
    pub clamped: bool,
}

/// A fitted GP. Immutable after [`GpModel::fit`].
#[derive(Debug, Clone)]
pub struct GpModel {
    kernel: KernelSpec,
    data: Dataset,
    chol: Cholesky<f64, Dyn>,
    alpha: DVector<f64>,
    jitter: f64,
}

impl GpModel {
    pub fn fit(kernel: &KernelSpec, data: &Dataset) -> Result<Self> {
        kernel.validate()?;
        if data.is_empty() {
            return Err(Error::Input("cannot fit a GP to an empty dataset".into()));
        }
        if data.inputs.len() != data.outputs.len() {
            return Err(Error::Input(
                "dataset inputs/outputs length mismatch".into(),
            ));
        }
        if !(data.noise_bound >= 0.0) || !data.noise_bound.is_finite() {
            return Err(Error::Input(format!(
                "noise bound must be non-negative, got {}",
                data.noise_bound
            )));
        }
        for p in &data.inputs {
            kernel.check_dim(p)?;
        }
        if let Some(y) = data.outputs.iter().find(|y| !y.is_finite()) {
            return Err(Error::Input(format!("non-finite training output {y}")));
        }

        let n = data.len();
        let gram = DMatrix::from_fn(n, n, |a, b| {
            kernel.eval_unchecked(data.inputs[a].as_slice(), data.inputs[b].as_slice())
        });
        let noise_var = data.noise_bound * data.noise_bound;

        for &jitter in &JITTER_LADDER {
            let mut reg = gram.clone();
            for i in 0..n {
                reg[(i, i)] += noise_var + jitter;
            }
            if let Some(chol) = Cholesky::new(reg) {
                let y = DVector::from_column_slice(&data.outputs);
                let alpha = chol.solve(&y);
                return Ok(GpModel {
                    kernel: kernel.clone(),
                    data: data.clone(),
                    chol,
                    alpha,
                    jitter,
                });
            }
        }

        let max_jitter = JITTER_LADDER[JITTER_LADDER.len() - 1];
        let mut reg = gram;
        for i in 0..n {
            reg[(i, i)] += noise_var + max_jitter;
        }
        let diag: Vec<f64> = (0..n).map(|i| reg[(i, i)]).collect();
        let eig = SymmetricEigen::new(reg).eigenvalues;
        let (lo, hi) = eig
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &e| {
                (lo.min(e), hi.max(e))
            });
        Err(Error::Factorization {
            n,
            max_jitter,
            min_diag: diag.iter().cloned().fold(f64::INFINITY, f64::min),
            max_diag: diag.iter().cloned().fold(f64::NEG_INFINITY, f64::max),
            condition: if lo > 0.0 { hi / lo } else { f64::INFINITY },
        })
    }

    pub fn kernel(&self) -> &KernelSpec {
        &self.kernel
    }

    pub fn data(&self) -> &Dataset {
        &self.data
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    /// Jitter that was needed for the factorization to succeed.
    pub fn jitter(&self) -> f64 {
        self.jitter
    }

    /// Lower Cholesky factor of `K + (η² + jitter) I`.
    pub fn cholesky_factor(&self) -> DMatrix<f64> {
        self.chol.l()
    }

    pub fn alpha(&self) -> &[f64] {
        self.alpha.as_slice()
    }

    /// Posterior mean and variance at `theta`.
    pub fn posterior(&self, theta: &ThetaPoint) -> Result<(f64, f64)> {
        self.kernel.check_dim(theta)?;
        Ok(self.posterior_unchecked(theta.as_slice()))
    }

    pub(crate) fn posterior_unchecked(&self, theta: &[f64]) -> (f64, f64) {
        let kstar = DVector::from_iterator(
            self.data.len(),
            self.data
                .inputs
                .iter()
                .map(|p| self.kernel.eval_unchecked(theta, p.as_slice())),
        );
        let mean = kstar.dot(&self.alpha);
        let prior = self.kernel.eval_unchecked(theta, theta);
        let v = self
            .chol
            .l_dirty()
            .solve_lower_triangular(&kstar)
            .expect("Cholesky factor has a positive diagonal");
        let var = prior - v.norm_squared();
        let var = if var < VARIANCE_FLOOR {
            0.0
        } else {
            var.min(prior)
        };
        (mean, var)
    }

    /// Confidence width `sqrt(max(0, B² − Yᵀ K⁻¹ Y) + N)`.
    pub fn beta(&self, rkhs_bound: f64) -> Result<Beta> {
        if !(rkhs_bound > 0.0) || !rkhs_bound.is_finite() {
            return Err(Error::Input(format!(
                "RKHS bound must be positive, got {rkhs_bound}"
            )));
        }
        let y = DVector::from_column_slice(&self.data.outputs);
        let quad_form = y.dot(&self.alpha);
        let radicand = rkhs_bound * rkhs_bound - quad_form;
        let clamped = radicand < 0.0;
        let value = (radicand.max(0.0) + self.data.len() as f64).sqrt();
        Ok(Beta {
            value,
            quad_form,
            clamped,
        })
    }

    /// Lower confidence bound `μ − β σ`.
    pub fn lower_bound(&self, theta: &ThetaPoint, beta: f64) -> Result<f64> {
        let (m, v) = self.posterior(theta)?;
        Ok(m - beta * v.sqrt())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn se(l: f64) -> KernelSpec {
        KernelSpec::squared_exponential(vec![l, l], 1.0).unwrap()
    }

    fn pt(a: f64, b: f64) -> ThetaPoint {
        ThetaPoint::from([a, b])
    }

    #[test]
    fn single_point_interpolates() {
        let data = Dataset::from_parts(vec![pt(0.3, 0.4)], vec![0.77], 0.0).unwrap();
        let gp = GpModel::fit(&se(0.2), &data).unwrap();
        let (m, v) = gp.posterior(&pt(0.3, 0.4)).unwrap();
        assert!((m - 0.77).abs() < 1e-6);
        assert!(v < 1e-6);
    }

    #[test]
    fn two_point_matches_closed_form_inverse() {
        // Hand inverse of the 2x2 regularized Gram matrix.
        let k = se(0.5);
        let (a, b) = (pt(0.1, 0.2), pt(0.4, 0.3));
        let y = [0.5, -0.2];
        let eta: f64 = 0.1;
        let data = Dataset::from_parts(vec![a.clone(), b.clone()], y.to_vec(), eta).unwrap();
        let gp = GpModel::fit(&k, &data).unwrap();

        let d = eta * eta + gp.jitter();
        let kab = k.eval(&a, &b).unwrap();
        let (p, q) = (1.0 + d, kab);
        let det = p * p - q * q;
        let inv = [[p / det, -q / det], [-q / det, p / det]];

        let t = pt(0.25, 0.1);
        let ks = [k.eval(&t, &a).unwrap(), k.eval(&t, &b).unwrap()];
        let w = [
            inv[0][0] * ks[0] + inv[0][1] * ks[1],
            inv[1][0] * ks[0] + inv[1][1] * ks[1],
        ];
        let mean = w[0] * y[0] + w[1] * y[1];
        let var = 1.0 - (w[0] * ks[0] + w[1] * ks[1]);

        let (m, v) = gp.posterior(&t).unwrap();
        assert!((m - mean).abs() < 1e-9, "{m} vs {mean}");
        assert!((v - var).abs() < 1e-9, "{v} vs {var}");
    }

    #[test]
    fn duplicate_inputs_with_noise_fit() {
        let data = Dataset::from_parts(
            vec![pt(0.2, 0.2), pt(0.2, 0.2), pt(0.2, 0.2)],
            vec![1.0, 1.01, 0.99],
            0.01,
        )
        .unwrap();
        let gp = GpModel::fit(&se(0.2), &data).unwrap();
        assert_eq!(gp.jitter(), JITTER_LADDER[0]);
        let (m, _) = gp.posterior(&pt(0.2, 0.2)).unwrap();
        assert!((m - 1.0).abs() < 1e-2);
    }

    #[test]
    fn duplicate_inputs_noiseless_escalate_jitter() {
        let data = Dataset::from_parts(vec![pt(0.2, 0.2); 2], vec![1.0, 1.0], 0.0).unwrap();
        assert!(GpModel::fit(&se(0.2), &data).is_ok());
    }

    #[test]
    fn far_point_recovers_prior() {
        let data =
            Dataset::from_parts(vec![pt(0.0, 0.0), pt(0.05, 0.0)], vec![3.0, 2.0], 0.01).unwrap();
        let gp = GpModel::fit(&se(0.2), &data).unwrap();
        let (m, v) = gp.posterior(&pt(10.0, 10.0)).unwrap();
        assert!(m.abs() < 1e-12);
        assert!((v - 1.0).abs() < 1e-12);
    }

    #[test]
    fn empty_dataset_rejected() {
        assert!(matches!(
            GpModel::fit(&se(0.2), &Dataset::new(0.01)),
            Err(Error::Input(_))
        ));
    }

    #[test]
    fn nan_output_rejected() {
        let data = Dataset::from_parts(vec![pt(0.0, 0.0)], vec![f64::NAN], 0.01).unwrap();
        assert!(GpModel::fit(&se(0.2), &data).is_err());
    }

    #[test]
    fn beta_zero_outputs() {
        let inputs: Vec<_> = (0..10)
            .map(|i| pt(0.1 * i as f64, 0.05 * i as f64))
            .collect();
        let data = Dataset::from_parts(inputs, vec![0.0; 10], 0.01).unwrap();
        let gp = GpModel::fit(&se(0.2), &data).unwrap();
        let b = gp.beta(3.0).unwrap();
        assert!((b.value - (9.0f64 + 10.0).sqrt()).abs() < 1e-12);
        assert!(!b.clamped);
    }

    #[test]
    fn beta_scalar_case() {
        // K = [[1]], η = 0, y = 1, B = 2: sqrt(4 - 1/(1 + jitter) + 1) ≈ 2.
        let data = Dataset::from_parts(vec![pt(0.5, 0.5)], vec![1.0], 0.0).unwrap();
        let gp = GpModel::fit(&se(0.2), &data).unwrap();
        let b = gp.beta(2.0).unwrap();
        assert!((b.value - 2.0).abs() < 1e-9);
    }

    #[test]
    fn beta_clamps_when_bound_too_small() {
        let data = Dataset::from_parts(vec![pt(0.5, 0.5)], vec![5.0], 0.0).unwrap();
        let gp = GpModel::fit(&se(0.2), &data).unwrap();
        let b = gp.beta(2.0).unwrap();
        assert!(b.clamped);
        assert_eq!(b.value, 1.0);
        assert!(b.quad_form > 4.0);
    }

    #[test]
    fn beta_rejects_non_positive_bound() {
        let data = Dataset::from_parts(vec![pt(0.5, 0.5)], vec![1.0], 0.0).unwrap();
        let gp = GpModel::fit(&se(0.2), &data).unwrap();
        assert!(gp.beta(0.0).is_err());
    }
}

//! Euler-Maruyama sampler for `dU = AU dt + dW_Q`.

use nalgebra::DVector;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{OuError, Result};
use crate::gramian::OUModel;
use crate::linalg::{self, Mat};

/// Paths are split over this many independent streams regardless of the
/// thread count, so results depend only on the seed.
pub const SHARDS: u64 = 16;

#[derive(Debug, Clone, Serialize)]
pub struct PathStats {
    pub n_paths: usize,
    pub steps: usize,
    /// Step actually used: `t / steps`.
    pub dt: f64,
    pub mean: Vec<f64>,
    pub covariance: Vec<Vec<f64>>,
}

impl PathStats {
    pub fn mean_vector(&self) -> DVector<f64> {
        DVector::from_column_slice(&self.mean)
    }

    pub fn covariance_matrix(&self) -> Mat {
        linalg::from_rows(&self.covariance).unwrap_or_else(|_| unreachable!())
    }
}

/// Number of steps covering `[0, t]` with a step no larger than `dt`.
pub fn step_count(t: f64, dt: f64) -> Result<usize> {
    if !(dt > 0.0) || !dt.is_finite() || !t.is_finite() || !(dt < t) {
        return Err(OuError::InvalidStep(format!("need 0 < dt < t, got dt = {dt}, t = {t}")));
    }
    Ok(((t / dt) - 1e-9).ceil() as usize)
}

struct Partial {
    count: usize,
    sum: DVector<f64>,
    outer: Mat,
}

/// Empirical mean and covariance of `U(t)` started at `x0`.
pub fn simulate_paths(model: &OUModel, x0: &[f64], t: f64, dt: f64, n_paths: usize, seed: u64) -> Result<PathStats> {
    let d = model.dim();
    if x0.len() != d {
        return Err(OuError::DimensionMismatch(format!("x0 has length {}, model dimension {d}", x0.len())));
    }
    if n_paths == 0 {
        return Err(OuError::InvalidArgument("n_paths must be at least 1".into()));
    }
    let steps = step_count(t, dt)?;
    let h = t / steps as f64;
    let drift = Mat::identity(d, d) + model.a() * h;
    let noise = linalg::psd_sqrt(model.q()) * h.sqrt();
    let start = DVector::from_column_slice(x0);

    let partials: Vec<Partial> = (0..SHARDS)
        .into_par_iter()
        .map(|shard| {
            let lo = n_paths * shard as usize / SHARDS as usize;
            let hi = n_paths * (shard as usize + 1) / SHARDS as usize;
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(shard);
            let mut acc = Partial { count: 0, sum: DVector::zeros(d), outer: Mat::zeros(d, d) };
            let mut z = DVector::zeros(d);
            for _ in lo..hi {
                let mut x = start.clone();
                for _ in 0..steps {
                    for zi in z.iter_mut() {
                        *zi = StandardNormal.sample(&mut rng);
                    }
                    x = &drift * x + &noise * &z;
                }
                acc.count += 1;
                acc.sum += &x;
                acc.outer += &x * x.transpose();
            }
            acc
        })
        .collect();

    let (mut count, mut sum, mut outer) = (0usize, DVector::zeros(d), Mat::zeros(d, d));
    for p in partials {
        count += p.count;
        sum += p.sum;
        outer += p.outer;
    }
    let n = count as f64;
    let mean = sum / n;
    let cov = if count > 1 { (outer - &mean * mean.transpose() * n) / (n - 1.0) } else { Mat::zeros(d, d) };
    Ok(PathStats {
        n_paths: count,
        steps,
        dt: h,
        mean: mean.iter().copied().collect(),
        covariance: linalg::to_rows(&linalg::symmetrize(&cov)),
    })
}

/// Exact covariance of the Euler-Maruyama chain after `steps` steps of size
/// `t / steps` from a deterministic start:
/// `S_{k+1} = (I + hA) S_k (I + hA)^T + hQ`.
pub fn euler_maruyama_covariance(model: &OUModel, t: f64, steps: usize) -> Mat {
    let d = model.dim();
    let h = t / steps as f64;
    let m = Mat::identity(d, d) + model.a() * h;
    let mut s = Mat::zeros(d, d);
    for _ in 0..steps {
        s = &m * s * m.transpose() + model.q() * h;
    }
    s
}

/// Exact mean of the Euler-Maruyama chain: `(I + hA)^steps x0`.
pub fn euler_maruyama_mean(model: &OUModel, x0: &[f64], t: f64, steps: usize) -> DVector<f64> {
    let d = model.dim();
    let m = Mat::identity(d, d) + model.a() * (t / steps as f64);
    (0..steps).fold(DVector::from_column_slice(x0), |x, _| &m * x)
}

/// Standard error of the sample covariance entry `(i, j)` for Gaussian data:
/// `sqrt((S_ii S_jj + S_ij^2) / n)`.
pub fn covariance_standard_error(cov: &Mat, n_paths: usize) -> Mat {
    let d = cov.nrows();
    Mat::from_fn(d, d, |i, j| ((cov[(i, i)] * cov[(j, j)] + cov[(i, j)].powi(2)) / n_paths as f64).sqrt())
}

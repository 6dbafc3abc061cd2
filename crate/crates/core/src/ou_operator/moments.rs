//! Exact moments `E[x^beta]` of a centered Gaussian `N(0, Sigma)`.

use std::collections::HashMap;

use crate::linalg::Mat;

/// Memoized Isserlis recursion
/// `E[x_i x^beta] = sum_j Sigma_ij beta_j E[x^(beta - e_j)]`.
#[derive(Debug, Clone)]
pub struct GaussianMoments {
    sigma: Mat,
    cache: HashMap<Vec<u32>, f64>,
}

impl GaussianMoments {
    pub fn new(sigma: Mat) -> Self {
        Self { sigma, cache: HashMap::new() }
    }

    pub fn covariance(&self) -> &Mat {
        &self.sigma
    }

    pub fn moment(&mut self, beta: &[u32]) -> f64 {
        let total: u32 = beta.iter().sum();
        if total == 0 {
            return 1.0;
        }
        if total % 2 == 1 {
            return 0.0;
        }
        if let Some(&v) = self.cache.get(beta) {
            return v;
        }
        let i = beta.iter().position(|&b| b > 0).unwrap_or(0);
        let mut rest = beta.to_vec();
        rest[i] -= 1;
        let mut acc = 0.0;
        for j in 0..rest.len() {
            let (s, b) = (self.sigma[(i, j)], rest[j]);
            if s == 0.0 || b == 0 {
                continue;
            }
            let mut lower = rest.clone();
            lower[j] -= 1;
            acc += s * f64::from(b) * self.moment(&lower);
        }
        self.cache.insert(beta.to_vec(), acc);
        acc
    }
}

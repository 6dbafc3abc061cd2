//! Hermite bases and chaos projections for the invariant measure
//! `mu = N(0, Q_inf)`.

use nalgebra::DVector;
use serde::Serialize;

use crate::config::Tolerances;
use crate::error::{OuError, Result};
use crate::gramian::{self, OUModel, RKHSFactor};
use crate::linalg::{self, Mat};
use crate::tensor_fock::SymBasis;

use super::moments::GaussianMoments;
use super::poly::{row_forms, PolyBasis, SparsePoly};

/// Above this ratio of extreme eigenvalues of `Q_inf` the Gram matrix of the
/// monomials loses most of its accuracy.
pub const CONDITION_WARNING: f64 = 1e12;

/// Orthogonal projections `I_n` onto the degree-`n` chaos, in monomial
/// coordinates of a [`PolyBasis`].
#[derive(Debug, Clone)]
pub struct ChaosDecomposition {
    pub basis: PolyBasis,
    /// `L^2(mu)` Gram matrix of the monomials.
    pub gram: Mat,
    /// Columns: `L^2(mu)`-orthonormal polynomials from Gram-Schmidt on the
    /// monomials in graded order.
    pub orthonormal: Mat,
    pub projections: Vec<Mat>,
    /// Monomial coordinates in `x` to monomial coordinates in `y = i_mu^+ x`.
    pub to_whitened: Mat,
    /// Gram matrix of the monomials in `y`, i.e. under `N(0, I)`.
    pub whitened_gram: Mat,
    /// `lambda_max / lambda_min` of `Q_inf`.
    pub condition: f64,
}

impl ChaosDecomposition {
    pub fn projection(&self, n: usize) -> &Mat {
        &self.projections[n]
    }

    /// `<f, g>_{L^2(mu)}` for coefficient vectors, evaluated in whitened
    /// coordinates.
    pub fn inner(&self, f: &DVector<f64>, g: &DVector<f64>) -> f64 {
        let (fy, gy) = (&self.to_whitened * f, &self.to_whitened * g);
        fy.dot(&(&self.whitened_gram * gy))
    }

    pub fn ill_conditioned(&self) -> bool {
        self.condition > CONDITION_WARNING
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ChaosResiduals {
    /// `max |sum_n I_n - Id|`
    pub completeness: f64,
    /// `max_n |I_n^2 - I_n|`
    pub idempotence: f64,
    /// `max_{n != m} |I_n I_m|`
    pub orthogonality: f64,
}

/// `L^2(N(0, sigma))` Gram matrix of the monomials of `basis`.
pub fn gram_matrix(sigma: &Mat, basis: &PolyBasis) -> Mat {
    let mut moments = GaussianMoments::new(sigma.clone());
    let n = basis.dim();
    let mut g = Mat::zeros(n, n);
    for i in 0..n {
        for j in i..n {
            let e: Vec<u32> = basis.monomials()[i].exponents().iter().zip(basis.monomials()[j].exponents()).map(|(a, b)| a + b).collect();
            let v = moments.moment(&e);
            g[(i, j)] = v;
            g[(j, i)] = v;
        }
    }
    g
}

/// Builds the decomposition for `mu = N(0, Q_inf)`. A degenerate `mu` is
/// refused: polynomials in kernel directions vanish in `L^2(mu)`.
pub fn chaos_decomposition(model: &OUModel, basis: &PolyBasis, tol: &Tolerances) -> Result<ChaosDecomposition> {
    if basis.d() != model.dim() {
        return Err(OuError::DimensionMismatch(format!("basis in {} variables, model dimension {}", basis.d(), model.dim())));
    }
    let q_inf = gramian::gramian_inf(model, tol)?;
    chaos_for_covariance(&q_inf, basis, tol)
}

pub fn chaos_for_covariance(q_inf: &Mat, basis: &PolyBasis, tol: &Tolerances) -> Result<ChaosDecomposition> {
    let d = q_inf.nrows();
    let rank = linalg::rank(q_inf, tol.rank_tol);
    if rank < d && basis.degree() > 0 {
        return Err(OuError::DegenerateMeasure { rank, dim: d });
    }
    let (vals, _) = linalg::sym_eig(q_inf);
    let condition = if d == 0 { 1.0 } else { vals[d - 1] / vals[0].max(f64::MIN_POSITIVE) };

    // Gram-Schmidt runs in whitened variables y = i_mu^+ x, where the
    // monomial Gram matrix is that of N(0, I), and is carried back to x by
    // the degree-preserving substitutions y = W x and x = W^-1 y.
    let factor = gramian::rkhs_factor(q_inf, tol);
    let to_x = substitution(&factor.pseudo_inverse(), basis)?;
    let to_y = substitution(&factor.factor, basis)?;
    let gram_y = gram_matrix(&Mat::identity(d, d), basis);
    let n = basis.dim();
    let mut u = Mat::zeros(n, n);
    for k in 0..n {
        let mut v = DVector::zeros(n);
        v[k] = 1.0;
        for _pass in 0..2 {
            let gv = &gram_y * &v;
            for j in 0..k {
                let c = u.column(j).dot(&gv);
                v -= u.column(j) * c;
            }
        }
        let norm2 = v.dot(&(&gram_y * &v));
        if !(norm2 > 0.0) {
            return Err(OuError::DegenerateMeasure { rank, dim: d });
        }
        u.set_column(k, &(v / norm2.sqrt()));
    }

    let projections = (0..=basis.degree())
        .map(|deg| {
            let r = basis.degree_range(deg);
            let un = u.columns(r.start, r.len());
            &to_x * (un * un.transpose() * &gram_y) * &to_y
        })
        .collect();
    let gram = gram_matrix(q_inf, basis);
    let u = to_x * u;
    Ok(ChaosDecomposition { basis: basis.clone(), gram, orthonormal: u, projections, to_whitened: to_y, whitened_gram: gram_y, condition })
}

/// Matrix of `f(y) -> f(M x)` in monomial coordinates.
fn substitution(m: &Mat, basis: &PolyBasis) -> Result<Mat> {
    let forms = row_forms(m);
    let cols = basis
        .monomials()
        .iter()
        .map(|a| basis.coefficients(&SparsePoly::product_of_powers(&forms, a.exponents(), basis.d())))
        .collect::<Result<Vec<_>>>()?;
    Ok(Mat::from_columns(&cols))
}

pub fn chaos_residuals(c: &ChaosDecomposition) -> ChaosResiduals {
    let n = c.basis.dim();
    let sum = c.projections.iter().fold(Mat::zeros(n, n), |acc, p| acc + p);
    let completeness = linalg::max_abs(&(sum - Mat::identity(n, n)));
    let mut idempotence = 0.0_f64;
    let mut orthogonality = 0.0_f64;
    for (i, p) in c.projections.iter().enumerate() {
        idempotence = idempotence.max(linalg::max_abs(&(p * p - p)));
        for (j, q) in c.projections.iter().enumerate() {
            if i != j {
                orthogonality = orthogonality.max(linalg::max_abs(&(p * q)));
            }
        }
    }
    ChaosResiduals { completeness, idempotence, orthogonality }
}

/// Coefficients of the Wick-ordered Hermite polynomials
/// `p_alpha = I_n[(i_mu^+ x)^alpha] / sqrt(alpha!)` for every `alpha` in
/// `SymBasis(r, n)`, `n = 0..=N`, as the columns of one matrix. They are an
/// `L^2(mu)`-orthonormal basis and realize the isometry between the
/// symmetric powers of `H_mu` and the chaoses.
pub fn wick_basis(c: &ChaosDecomposition, factor: &RKHSFactor) -> Result<Mat> {
    let basis = &c.basis;
    let forms = row_forms(&factor.pseudo_inverse());
    let r = factor.rank;
    let mut cols = Vec::new();
    for n in 0..=basis.degree() {
        for alpha in SymBasis::new(r, n).indices() {
            let mono = SparsePoly::product_of_powers(&forms, alpha.exponents(), basis.d());
            let coeffs = basis.coefficients(&mono)?;
            cols.push(c.projection(n) * coeffs / alpha.factorial().sqrt());
        }
    }
    Ok(Mat::from_columns(&cols))
}

/// `phi_h(x) = <h, i_mu^+ x>` as a sparse polynomial in `x`.
pub fn phi(factor: &RKHSFactor, h: &[f64]) -> SparsePoly {
    let row = DVector::from_column_slice(h).transpose() * factor.pseudo_inverse();
    SparsePoly::linear(row.as_slice())
}

/// `<I_n(phi_{h_1} ... phi_{h_n}), I_n(phi_{k_1} ... phi_{k_n})>` in
/// `L^2(mu)`, computed from Gaussian moments.
pub fn chaos_product_inner(c: &ChaosDecomposition, factor: &RKHSFactor, hs: &[Vec<f64>], ks: &[Vec<f64>]) -> Result<f64> {
    if hs.len() != ks.len() || hs.len() > c.basis.degree() {
        return Err(OuError::InvalidArgument("need equally many vectors, at most the basis degree".into()));
    }
    let n = hs.len();
    let d = c.basis.d();
    let product = |vs: &[Vec<f64>]| -> Result<DVector<f64>> {
        let p = vs.iter().fold(SparsePoly::constant(d, 1.0), |acc, h| acc.mul(&phi(factor, h)));
        Ok(c.projection(n) * c.basis.coefficients(&p)?)
    };
    Ok(c.inner(&product(hs)?, &product(ks)?))
}

/// `sum over permutations sigma of prod_j <h_j, k_sigma(j)>`.
pub fn permanent_of_inner_products(hs: &[Vec<f64>], ks: &[Vec<f64>]) -> f64 {
    fn rec(j: usize, used: &mut Vec<bool>, hs: &[Vec<f64>], ks: &[Vec<f64>]) -> f64 {
        if j == hs.len() {
            return 1.0;
        }
        let mut acc = 0.0;
        for s in 0..ks.len() {
            if !used[s] {
                used[s] = true;
                let ip: f64 = hs[j].iter().zip(&ks[s]).map(|(a, b)| a * b).sum();
                acc += ip * rec(j + 1, used, hs, ks);
                used[s] = false;
            }
        }
        acc
    }
    rec(0, &mut vec![false; ks.len()], hs, ks)
}

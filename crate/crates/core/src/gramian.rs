//! Drift/diffusion models, the Gramians `Q_t` and `Q_inf`, the Cameron-Martin
//! space `H_mu` of the invariant measure, and the restricted semigroup `S_mu`.

use nalgebra::DVector;
use serde::Serialize;

use crate::config::Tolerances;
use crate::error::{OuError, Result};
use crate::linalg::{self, Mat};
use crate::spectra;

/// The pair `(A, Q)` defining `L f = 1/2 Tr(Q D^2 f) + <Ax, Df>`.
#[derive(Debug, Clone, PartialEq)]
pub struct OUModel {
    a: Mat,
    q: Mat,
}

impl OUModel {
    /// Validated constructor.
    pub fn new(a: Mat, q: Mat, tol: &Tolerances) -> Result<Self> {
        validate(Self::unchecked(a, q), tol)
    }

    /// Skips validation; [`validate`] must run before the model is trusted.
    pub fn unchecked(a: Mat, q: Mat) -> Self {
        Self { a, q }
    }

    pub fn from_rows(a: &[Vec<f64>], q: &[Vec<f64>], tol: &Tolerances) -> Result<Self> {
        Self::new(linalg::from_rows(a)?, linalg::from_rows(q)?, tol)
    }

    pub fn dim(&self) -> usize {
        self.a.nrows()
    }

    pub fn a(&self) -> &Mat {
        &self.a
    }

    pub fn q(&self) -> &Mat {
        &self.q
    }
}

/// Checks shapes, symmetry and positive semidefiniteness of `Q`. The returned
/// model carries the exactly symmetrized `Q`.
pub fn validate(model: OUModel, tol: &Tolerances) -> Result<OUModel> {
    let OUModel { a, q } = model;
    let d = a.nrows();
    if d == 0 || a.ncols() != d {
        return Err(OuError::DimensionMismatch(format!("drift is {}x{}, expected square", a.nrows(), a.ncols())));
    }
    if q.nrows() != d || q.ncols() != d {
        return Err(OuError::DimensionMismatch(format!("drift is {d}x{d} but diffusion is {}x{}", q.nrows(), q.ncols())));
    }
    if a.iter().chain(q.iter()).any(|x| !x.is_finite()) {
        return Err(OuError::DimensionMismatch("non-finite matrix entry".into()));
    }
    let asym = linalg::max_abs(&(&q - q.transpose()));
    if asym > tol.sym_tol {
        return Err(OuError::AsymmetricQ(asym));
    }
    let q = linalg::symmetrize(&q);
    let lmin = linalg::min_sym_eig(&q);
    if lmin < -tol.psd_tol {
        return Err(OuError::NotPSD(lmin));
    }
    Ok(OUModel { a, q })
}

/// `max Re sigma(A)`.
pub fn spectral_abscissa(a: &Mat) -> Result<f64> {
    spectra::eig(a)?.max_re().ok_or_else(|| OuError::DimensionMismatch("empty drift".into()))
}

/// `Q_t = int_0^t e^{sA} Q e^{sA^T} ds` via the exponential of the block
/// matrix `[[A, Q], [0, -A^T]] t`: its upper right block is `Q_t e^{-tA^T}`.
pub fn gramian_t(model: &OUModel, t: f64) -> Result<Mat> {
    if !(t >= 0.0) || !t.is_finite() {
        return Err(OuError::InvalidArgument(format!("time must be finite and nonnegative, got {t}")));
    }
    let d = model.dim();
    if t == 0.0 {
        return Ok(Mat::zeros(d, d));
    }
    let mut block = Mat::zeros(2 * d, 2 * d);
    block.view_mut((0, 0), (d, d)).copy_from(&(model.a() * t));
    block.view_mut((0, d), (d, d)).copy_from(&(model.q() * t));
    block.view_mut((d, d), (d, d)).copy_from(&(-model.a().transpose() * t));
    let e = linalg::expm(&block)?;
    let f11 = e.view((0, 0), (d, d)).into_owned();
    let f12 = e.view((0, d), (d, d)).into_owned();
    Ok(linalg::symmetrize(&(f12 * f11.transpose())))
}

/// Residual `A X + X A^T + Q`.
pub fn lyapunov_residual(model: &OUModel, x: &Mat) -> Mat {
    model.a() * x + x * model.a().transpose() + model.q()
}

/// Unique symmetric solution of `A X + X A^T + Q = 0` for stable `A`, by a
/// dense solve of the vectorized equation followed by one refinement step.
pub fn gramian_inf(model: &OUModel, tol: &Tolerances) -> Result<Mat> {
    let abscissa = spectral_abscissa(model.a())?;
    if abscissa >= -tol.stab_tol {
        return Err(OuError::Unstable(abscissa));
    }
    let d = model.dim();
    let id = Mat::identity(d, d);
    // column-major vec: vec(AX) = (I (x) A) vec X, vec(X A^T) = (A (x) I) vec X
    let op = id.kronecker(model.a()) + model.a().kronecker(&id);
    let lu = op.lu();
    let solve = |rhs: &Mat| -> Result<Mat> {
        let v = DVector::from_iterator(d * d, rhs.iter().map(|x| -x));
        let sol = lu.solve(&v).ok_or(OuError::Unstable(abscissa))?;
        Ok(Mat::from_column_slice(d, d, sol.as_slice()))
    };
    let mut x = linalg::symmetrize(&solve(model.q())?);
    let r = lyapunov_residual(model, &x);
    // A dX + dX A^T = -r
    let corr = solve(&r)?;
    x = linalg::symmetrize(&(x + corr));
    Ok(x)
}

/// Factorization `Q_inf = i_mu i_mu^T` on the positive eigenspace.
#[derive(Debug, Clone, PartialEq)]
pub struct RKHSFactor {
    pub rank: usize,
    /// `d x r` matrix `U_+ Lambda_+^{1/2}`, mutually orthogonal columns.
    pub factor: Mat,
}

impl RKHSFactor {
    /// `r x d` pseudo-inverse `Lambda_+^{-1/2} U_+^T`.
    pub fn pseudo_inverse(&self) -> Mat {
        let mut p = self.factor.transpose();
        for (k, mut row) in p.row_iter_mut().enumerate() {
            let n2 = self.factor.column(k).norm_squared();
            row /= n2;
        }
        p
    }

    /// Orthogonal projector onto `range(Q_inf)`.
    pub fn range_projector(&self) -> Mat {
        &self.factor * self.pseudo_inverse()
    }

    pub fn dim(&self) -> usize {
        self.factor.nrows()
    }
}

/// Drops eigenvalues of `Q_inf` below `rank_tol * lambda_max`. Columns are
/// ordered by decreasing eigenvalue and signed so their largest entry is
/// positive.
pub fn rkhs_factor(q_inf: &Mat, tol: &Tolerances) -> RKHSFactor {
    let (vals, mut basis) = linalg::psd_range(q_inf, tol.rank_tol);
    for (k, mut col) in basis.column_iter_mut().enumerate() {
        let pivot = col.iter().copied().max_by(|a, b| a.abs().total_cmp(&b.abs())).unwrap_or(0.0);
        if pivot < 0.0 {
            col.neg_mut();
        }
        col *= vals[k].sqrt();
    }
    RKHSFactor { rank: vals.len(), factor: basis }
}

/// `S_mu(t)` in orthonormal coordinates of `H_mu`: `i_mu^+ e^{tA} i_mu`.
pub fn smu_matrix(model: &OUModel, factor: &RKHSFactor, t: f64, tol: &Tolerances) -> Result<Mat> {
    if factor.dim() != model.dim() {
        return Err(OuError::DimensionMismatch(format!("factor has {} rows, model dimension {}", factor.dim(), model.dim())));
    }
    if !(t >= 0.0) || !t.is_finite() {
        return Err(OuError::InvalidArgument(format!("time must be finite and nonnegative, got {t}")));
    }
    let e = linalg::expm(&(model.a() * t))?;
    let moved = &e * &factor.factor;
    let p = factor.range_projector();
    let leak = &moved - &p * &moved;
    let residual = linalg::norm2(&leak);
    if residual > tol.inv_tol * linalg::norm2(&factor.factor).max(1.0) {
        return Err(OuError::RangeNotInvariant(residual));
    }
    Ok(factor.pseudo_inverse() * moved)
}

/// Generator of `S_mu` in the same coordinates: `i_mu^+ A i_mu`.
pub fn amu_matrix(model: &OUModel, factor: &RKHSFactor) -> Mat {
    factor.pseudo_inverse() * model.a() * &factor.factor
}

/// `||S_mu(t)||` on `H_mu`.
pub fn smu_norm(model: &OUModel, factor: &RKHSFactor, t: f64, tol: &Tolerances) -> Result<f64> {
    Ok(linalg::norm2(&smu_matrix(model, factor, t, tol)?))
}

/// `sup <num x, x> / <den x, x>` over `range(den)`; `+inf` when `range(num)`
/// is not contained in `range(den)`.
pub fn pencil_max_ratio(num: &Mat, den: &Mat, rank_tol: f64) -> f64 {
    let (vals, basis) = linalg::psd_range(den, rank_tol);
    let num_norm = linalg::norm2(num);
    // weight of `num` on the orthogonal complement of range(den)
    let proj = Mat::identity(den.nrows(), den.nrows()) - &basis * basis.transpose();
    let leak = linalg::norm2(&(&proj * num * &proj));
    if leak > rank_tol * num_norm.max(f64::MIN_POSITIVE) {
        return f64::INFINITY;
    }
    if vals.is_empty() {
        return if num_norm == 0.0 { 0.0 } else { f64::INFINITY };
    }
    let scale = Mat::from_diagonal(&vals.map(|v| 1.0 / v.sqrt()));
    let w = &scale * basis.transpose() * num * &basis * &scale;
    linalg::sym_eig(&w).0.max()
}

/// `K(t) = sup <Q_inf x, x> / <Q_t x, x>`, computed on `range(Q_t)`.
pub fn contractivity_constant(model: &OUModel, t: f64, tol: &Tolerances) -> Result<f64> {
    if !(t > 0.0) {
        return Err(OuError::InvalidArgument(format!("contractivity constant needs t > 0, got {t}")));
    }
    let q_inf = gramian_inf(model, tol)?;
    let q_t = gramian_t(model, t)?;
    Ok(pencil_max_ratio(&q_inf, &q_t, tol.rank_tol))
}

/// `[B, AB, ..., A^{d-1} B]` with `B = Q^{1/2}`.
pub fn kalman_matrix(model: &OUModel) -> Mat {
    let d = model.dim();
    let b = linalg::psd_sqrt(model.q());
    let mut out = Mat::zeros(d, d * d);
    let mut block = b;
    for k in 0..d {
        out.view_mut((0, k * d), (d, d)).copy_from(&block);
        block = model.a() * block;
    }
    out
}

/// Strong Feller at time `t`: `Q_t` has full rank. Cross-checked against the
/// Kalman controllability rank; the two must agree.
pub fn strong_feller_check(model: &OUModel, t: f64, tol: &Tolerances) -> Result<bool> {
    if !(t > 0.0) {
        return Err(OuError::InvalidArgument(format!("strong Feller check needs t > 0, got {t}")));
    }
    let d = model.dim();
    let gramian_rank = linalg::rank(&gramian_t(model, t)?, tol.rank_tol);
    let kalman_rank = linalg::rank(&kalman_matrix(model), tol.rank_tol);
    if gramian_rank != kalman_rank {
        return Err(OuError::CriteriaDisagree { gramian_rank, kalman_rank });
    }
    Ok(gramian_rank == d)
}

/// Summary of the Gramian analysis at one time `t`.
#[derive(Debug, Clone, Serialize)]
pub struct GramianReport {
    pub t: f64,
    pub q_t: Vec<Vec<f64>>,
    pub q_inf: Option<Vec<Vec<f64>>>,
    pub spectral_abscissa: f64,
    pub strong_feller: bool,
    pub q_inf_invertible: bool,
    pub rank_q_inf: usize,
    pub lyapunov_residual: Option<f64>,
}

pub fn gramian_report(model: &OUModel, t: f64, tol: &Tolerances) -> Result<GramianReport> {
    let q_t = gramian_t(model, t)?;
    let abscissa = spectral_abscissa(model.a())?;
    let strong_feller = strong_feller_check(model, t, tol)?;
    let (q_inf, rank_q_inf, residual) = match gramian_inf(model, tol) {
        Ok(x) => {
            let r = linalg::norm2(&lyapunov_residual(model, &x));
            let rank = rkhs_factor(&x, tol).rank;
            (Some(x), rank, Some(r))
        }
        Err(OuError::Unstable(_)) => (None, 0, None),
        Err(e) => return Err(e),
    };
    Ok(GramianReport {
        t,
        q_t: linalg::to_rows(&q_t),
        q_inf_invertible: rank_q_inf == model.dim() && q_inf.is_some(),
        q_inf: q_inf.as_ref().map(linalg::to_rows),
        spectral_abscissa: abscissa,
        strong_feller,
        rank_q_inf,
        lyapunov_residual: residual,
    })
}

/// Time grid on which `Q_t` invertibility is sampled.
pub const INVERTIBILITY_T_GRID: [f64; 5] = [0.1, 0.5, 1.0, 2.0, 5.0];

/// Both sides of: "`Q_inf` exists and is invertible" iff "`Q_t` invertible
/// for all `t > 0` and `A` uniformly exponentially stable".
#[derive(Debug, Clone, Serialize)]
pub struct InvertibilityReport {
    pub q_inf_exists: bool,
    pub q_inf_rank: usize,
    pub side_limit_invertible: bool,
    pub stable: bool,
    pub t_grid: Vec<f64>,
    pub q_t_invertible: Vec<bool>,
    pub side_gramians_and_stability: bool,
    pub agree: bool,
}

pub fn invertibility_equivalence_report(model: &OUModel, tol: &Tolerances) -> Result<InvertibilityReport> {
    let d = model.dim();
    let abscissa = spectral_abscissa(model.a())?;
    let stable = abscissa < -tol.stab_tol;
    let limit = if stable {
        Some(gramian_inf(model, tol)?)
    } else {
        // the limit may still exist on the controllable part
        let q20 = gramian_t(model, 20.0)?;
        let q40 = gramian_t(model, 40.0)?;
        let scale = linalg::norm2(&q40).max(1.0);
        (linalg::norm2(&(&q40 - &q20)) <= 1e-8 * scale).then_some(q40)
    };
    let q_inf_rank = limit.as_ref().map_or(0, |x| linalg::rank(x, tol.rank_tol));
    let side_limit_invertible = limit.is_some() && q_inf_rank == d;
    let q_t_invertible = INVERTIBILITY_T_GRID
        .iter()
        .map(|&t| gramian_t(model, t).map(|q| linalg::rank(&q, tol.rank_tol) == d))
        .collect::<Result<Vec<bool>>>()?;
    let side_gramians_and_stability = stable && q_t_invertible.iter().all(|&b| b);
    Ok(InvertibilityReport {
        q_inf_exists: limit.is_some(),
        q_inf_rank,
        side_limit_invertible,
        stable,
        t_grid: INVERTIBILITY_T_GRID.to_vec(),
        q_t_invertible,
        side_gramians_and_stability,
        agree: side_limit_invertible == side_gramians_and_stability,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn tol() -> Tolerances {
        Tolerances::default()
    }

    fn model(a: &[Vec<f64>], q: &[Vec<f64>]) -> OUModel {
        OUModel::from_rows(a, q, &tol()).unwrap()
    }

    fn example() -> OUModel {
        model(&[vec![-1.0, 1.0], vec![0.0, -1.0]], &[vec![0.0, 0.0], vec![0.0, 1.0]])
    }

    fn degenerate() -> OUModel {
        model(&[vec![-1.0, 0.0], vec![0.0, -1.0]], &[vec![0.0, 0.0], vec![0.0, 1.0]])
    }

    #[test]
    fn validate_examples() {
        assert!(OUModel::from_rows(&[vec![-1.0]], &[vec![1.0]], &tol()).is_ok());
        let err = OUModel::from_rows(
            &[vec![-1.0, 0.0], vec![0.0, -1.0]],
            &[vec![0.0, 1.0], vec![0.0, 0.0]],
            &tol(),
        );
        assert!(matches!(err, Err(OuError::AsymmetricQ(_))));
        assert!(matches!(OUModel::from_rows(&[vec![-1.0]], &[vec![-1.0]], &tol()), Err(OuError::NotPSD(_))));
        assert!(matches!(
            OUModel::from_rows(&[vec![-1.0]], &[vec![1.0, 0.0], vec![0.0, 1.0]], &tol()),
            Err(OuError::DimensionMismatch(_))
        ));
    }

    #[test]
    fn abscissa_examples() {
        let m = |r: &[Vec<f64>]| linalg::from_rows(r).unwrap();
        assert_abs_diff_eq!(spectral_abscissa(&m(&[vec![-1.0, 1.0], vec![0.0, -1.0]])).unwrap(), -1.0, epsilon = 1e-14);
        assert_abs_diff_eq!(spectral_abscissa(&m(&[vec![0.0, -1.0], vec![1.0, 0.0]])).unwrap(), 0.0, epsilon = 1e-14);
        assert_abs_diff_eq!(spectral_abscissa(&m(&[vec![-1.0, 5.0], vec![0.0, -3.0]])).unwrap(), -1.0, epsilon = 1e-14);
    }

    #[test]
    fn gramian_t_scalar_closed_form() {
        let m = model(&[vec![-1.0]], &[vec![2.0]]);
        for t in [0.1, 1.0, 3.0] {
            assert_abs_diff_eq!(gramian_t(&m, t).unwrap()[(0, 0)], 1.0 - (-2.0 * t).exp(), epsilon = 1e-14);
        }
    }

    #[test]
    fn gramian_t_large_time_matches_hand_lyapunov() {
        let q = gramian_t(&example(), 30.0).unwrap();
        let expect = linalg::from_rows(&[vec![0.25, 0.25], vec![0.25, 0.5]]).unwrap();
        assert!(linalg::max_abs(&(q - expect)) < 1e-10);
    }

    #[test]
    fn gramian_t_small_time_is_linear() {
        let m = model(&[vec![-1.0, 2.0], vec![0.5, -3.0]], &[vec![2.0, 0.3], vec![0.3, 1.0]]);
        let t = 1e-12;
        let q = gramian_t(&m, t).unwrap();
        assert!(linalg::max_abs(&(q - m.q() * t)) < 1e-22);
    }

    #[test]
    fn gramian_inf_examples() {
        let m = model(&[vec![-1.0, 0.0], vec![0.0, -1.0]], &[vec![1.0, 0.0], vec![0.0, 1.0]]);
        let x = gramian_inf(&m, &tol()).unwrap();
        assert!(linalg::max_abs(&(x - Mat::identity(2, 2) * 0.5)) < 1e-15);

        let x = gramian_inf(&example(), &tol()).unwrap();
        let expect = linalg::from_rows(&[vec![0.25, 0.25], vec![0.25, 0.5]]).unwrap();
        assert!(linalg::max_abs(&(x - expect)) < 1e-15);

        let rot = model(&[vec![0.0, -1.0], vec![1.0, 0.0]], &[vec![1.0, 0.0], vec![0.0, 1.0]]);
        assert!(matches!(gramian_inf(&rot, &tol()), Err(OuError::Unstable(_))));
    }

    #[test]
    fn rkhs_factor_examples() {
        let f = rkhs_factor(&Mat::identity(2, 2), &tol());
        assert_eq!(f.rank, 2);
        assert!(linalg::max_abs(&(f.factor - Mat::identity(2, 2))) < 1e-15);

        let f = rkhs_factor(&linalg::from_rows(&[vec![0.0, 0.0], vec![0.0, 0.5]]).unwrap(), &tol());
        assert_eq!(f.rank, 1);
        assert_abs_diff_eq!(f.factor[(0, 0)], 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(f.factor[(1, 0)], 0.5_f64.sqrt(), epsilon = 1e-15);

        let q = linalg::from_rows(&[vec![0.25, 0.25], vec![0.25, 0.5]]).unwrap();
        let f = rkhs_factor(&q, &tol());
        assert_eq!(f.rank, 2);
        assert!(linalg::max_abs(&(&f.factor * f.factor.transpose() - &q)) < 1e-15);
        let pinv = f.pseudo_inverse();
        assert!(linalg::max_abs(&(pinv * &f.factor - Mat::identity(2, 2))) < 1e-14);

        assert_eq!(rkhs_factor(&Mat::zeros(2, 2), &tol()).rank, 0);
    }

    #[test]
    fn smu_examples() {
        let m = example();
        let f = rkhs_factor(&gramian_inf(&m, &tol()).unwrap(), &tol());
        let b0 = smu_matrix(&m, &f, 0.0, &tol()).unwrap();
        assert!(linalg::max_abs(&(b0 - Mat::identity(2, 2))) < 1e-15);
        assert_abs_diff_eq!(smu_norm(&m, &f, 0.0, &tol()).unwrap(), 1.0, epsilon = 1e-14);
        for t in [0.5_f64, 1.0, 2.0] {
            let expect = (-t).exp() * (t + (t * t + 1.0).sqrt());
            assert_abs_diff_eq!(smu_norm(&m, &f, t, &tol()).unwrap(), expect, epsilon = 1e-12);
        }
        assert_abs_diff_eq!(smu_norm(&m, &f, 1.0, &tol()).unwrap(), 0.888_139_536_194_331_2, epsilon = 1e-12);

        let scalar = model(&[vec![-1.0, 0.0], vec![0.0, -1.0]], &[vec![2.0, 0.0], vec![0.0, 2.0]]);
        let f = rkhs_factor(&gramian_inf(&scalar, &tol()).unwrap(), &tol());
        let b = smu_matrix(&scalar, &f, 1.0, &tol()).unwrap();
        assert!(linalg::max_abs(&(b - Mat::identity(2, 2) * (-1.0f64).exp())) < 1e-14);
        assert_abs_diff_eq!(smu_norm(&scalar, &f, 1.0, &tol()).unwrap(), (-1.0f64).exp(), epsilon = 1e-14);
    }

    #[test]
    fn smu_detects_non_invariant_range() {
        // range(diag(1, 0)) is not invariant under a shear into the second axis
        let m = OUModel::unchecked(
            linalg::from_rows(&[vec![-1.0, 0.0], vec![1.0, -1.0]]).unwrap(),
            Mat::identity(2, 2),
        );
        let bogus = rkhs_factor(&linalg::from_rows(&[vec![1.0, 0.0], vec![0.0, 0.0]]).unwrap(), &tol());
        assert!(matches!(smu_matrix(&m, &bogus, 1.0, &tol()), Err(OuError::RangeNotInvariant(_))));
    }

    #[test]
    fn contractivity_examples() {
        let m = model(&[vec![-1.0]], &[vec![2.0]]);
        for t in [0.3, 1.0, 2.0] {
            let k = contractivity_constant(&m, t, &tol()).unwrap();
            assert_abs_diff_eq!(k, 1.0 / (1.0 - (-2.0 * t).exp()), epsilon = 1e-12);
        }
        let k = contractivity_constant(&example(), 1.0, &tol()).unwrap();
        let norm = (-1.0f64).exp() * (1.0 + 2.0_f64.sqrt());
        assert_abs_diff_eq!(1.0 - 1.0 / k, norm * norm, epsilon = 1e-10);

        // degenerate Gramians: finite on the common range
        let k = contractivity_constant(&degenerate(), 1.0, &tol()).unwrap();
        assert_abs_diff_eq!(k, 1.0 / (1.0 - (-2.0f64).exp()), epsilon = 1e-12);
        // range(Q_inf) not inside range(Q_t) gives the sentinel
        let full = Mat::identity(2, 2);
        let thin = linalg::from_rows(&[vec![1.0, 0.0], vec![0.0, 0.0]]).unwrap();
        assert_eq!(pencil_max_ratio(&full, &thin, 1e-10), f64::INFINITY);
    }

    #[test]
    fn strong_feller_examples() {
        assert!(strong_feller_check(&example(), 1.0, &tol()).unwrap());
        assert!(!strong_feller_check(&degenerate(), 1.0, &tol()).unwrap());
        let full = model(&[vec![-2.0, 1.0], vec![-1.0, -0.5]], &[vec![1.0, 0.2], vec![0.2, 0.5]]);
        assert!(strong_feller_check(&full, 1.0, &tol()).unwrap());
        assert_eq!(kalman_matrix(&example()).ncols(), 4);
    }

    #[test]
    fn invertibility_examples() {
        let r = invertibility_equivalence_report(&example(), &tol()).unwrap();
        assert!(r.side_limit_invertible && r.side_gramians_and_stability && r.agree);
        let r = invertibility_equivalence_report(&degenerate(), &tol()).unwrap();
        assert!(!r.side_limit_invertible && !r.side_gramians_and_stability && r.agree);
        assert_eq!(r.q_inf_rank, 1);
        let r = invertibility_equivalence_report(&model(&[vec![-1.0]], &[vec![1.0]]), &tol()).unwrap();
        assert!(r.side_limit_invertible && r.side_gramians_and_stability && r.agree);
        // unstable but with a convergent controllable part
        let r = invertibility_equivalence_report(
            &model(&[vec![-1.0, 0.0], vec![0.0, 1.0]], &[vec![1.0, 0.0], vec![0.0, 0.0]]),
            &tol(),
        )
        .unwrap();
        assert!(r.q_inf_exists && !r.side_limit_invertible && !r.stable && r.agree);
    }

    #[test]
    fn report_flags() {
        let r = gramian_report(&degenerate(), 1.0, &tol()).unwrap();
        assert!(!r.strong_feller);
        assert_eq!(r.rank_q_inf, 1);
        assert!(!r.q_inf_invertible);
        assert!(r.lyapunov_residual.unwrap() < 1e-12);
    }
}

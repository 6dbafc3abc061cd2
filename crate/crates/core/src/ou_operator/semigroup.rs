//! Three independent constructions of the transition semigroup on
//! polynomials of degree `<= N`, compared pairwise.

use serde::Serialize;

use crate::config::Tolerances;
use crate::error::{OuError, Result};
use crate::gramian::{self, OUModel};
use crate::linalg::{self, Mat};
use crate::tensor_fock::sym_power;

use super::chaos::{chaos_for_covariance, wick_basis};
use super::galerkin::assemble_l;
use super::mehler::mehler_matrix;
use super::poly::PolyBasis;

#[derive(Debug, Clone, Serialize)]
pub struct SecondQuantizationReport {
    pub t: f64,
    pub degree: usize,
    /// `exp(tL)` against the Mehler matrix.
    pub generator_vs_mehler: f64,
    /// `exp(tL)` against the second-quantized restricted drift.
    pub generator_vs_fock: f64,
    pub mehler_vs_fock: f64,
    pub max_residual: f64,
    pub tol: f64,
    pub pass: bool,
}

fn residual(a: &Mat, b: &Mat) -> f64 {
    linalg::max_abs(&(a - b)) / linalg::max_abs(a).max(1.0)
}

/// The three matrices of `P(t)` on `PolyBasis(d, N)`:
/// the exponential of the Galerkin generator, the Mehler matrix, and
/// `H (sum_n (B^T)^(sym n)) H^-1` with `B = i_mu^+ e^{tA} i_mu` and `H` the
/// Wick basis of the chaoses.
pub fn semigroup_routes(model: &OUModel, t: f64, degree: usize, tol: &Tolerances) -> Result<[Mat; 3]> {
    let basis = PolyBasis::with_cap(model.dim(), degree, tol.size_cap)?;
    let q_inf = gramian::gramian_inf(model, tol)?;
    let chaos = chaos_for_covariance(&q_inf, &basis, tol)?;
    let factor = gramian::rkhs_factor(&q_inf, tol);

    let via_generator = linalg::expm(&(assemble_l(model, &basis)? * t))?;
    let via_mehler = mehler_matrix(model, t, &basis)?;

    let bt = gramian::smu_matrix(model, &factor, t, tol)?.transpose();
    let n = basis.dim();
    let mut fock = Mat::zeros(n, n);
    let mut off = 0;
    for deg in 0..=degree {
        let block = sym_power(&bt, deg, tol.size_cap)?;
        let k = block.nrows();
        fock.view_mut((off, off), (k, k)).copy_from(&block);
        off += k;
    }
    let h = wick_basis(&chaos, &factor)?;
    let h_inv = h.clone().try_inverse().ok_or(OuError::DegenerateMeasure { rank: factor.rank, dim: model.dim() })?;
    let via_fock = &h * fock * h_inv;
    Ok([via_generator, via_mehler, via_fock])
}

/// Pairwise residuals are `max |X - Y| / max(1, max |X|)`; the check passes
/// iff the largest is `<= tol_check`.
pub fn verify_second_quantization(model: &OUModel, t: f64, degree: usize, tol_check: f64, tol: &Tolerances) -> Result<SecondQuantizationReport> {
    let [g, m, f] = semigroup_routes(model, t, degree, tol)?;
    let (gm, gf, mf) = (residual(&g, &m), residual(&g, &f), residual(&m, &f));
    let max_residual = gm.max(gf).max(mf);
    Ok(SecondQuantizationReport {
        t,
        degree,
        generator_vs_mehler: gm,
        generator_vs_fock: gf,
        mehler_vs_fock: mf,
        max_residual,
        tol: tol_check,
        pass: max_residual <= tol_check,
    })
}

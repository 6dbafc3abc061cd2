//! Matrix of the OU operator on the polynomial space of degree `<= N`.

use crate::config::Tolerances;
use crate::error::{OuError, Result};
use crate::gramian::OUModel;
use crate::linalg::Mat;
use crate::spectra::{self, SpectrumSet};
use crate::tensor_fock::MultiIndex;

use super::poly::PolyBasis;

/// `L f = 1/2 Tr(Q D^2 f) + <Ax, Df>` on monomials:
///
/// ```text
/// L x^a = sum_{i,k} A_ik a_i x^(a - e_i + e_k)
///       + 1/2 sum_{i,j} Q_ij a_i (a_j - [i = j]) x^(a - e_i - e_j)
/// ```
///
/// Column `c` holds the image of the `c`-th monomial.
pub fn assemble_l(model: &OUModel, basis: &PolyBasis) -> Result<Mat> {
    let d = model.dim();
    if basis.d() != d {
        return Err(OuError::DimensionMismatch(format!("basis in {} variables, model dimension {d}", basis.d())));
    }
    let (a, q) = (model.a(), model.q());
    let n = basis.dim();
    let mut l = Mat::zeros(n, n);
    for (col, alpha) in basis.monomials().iter().enumerate() {
        let e = alpha.exponents();
        for i in (0..d).filter(|&i| e[i] > 0) {
            let ai = f64::from(e[i]);
            let lowered = alpha.lowered(i).unwrap_or_else(|| unreachable!());
            for k in 0..d {
                if a[(i, k)] != 0.0 {
                    let row = position(basis, &lowered.raised(k));
                    l[(row, col)] += a[(i, k)] * ai;
                }
            }
            for j in 0..d {
                let aj = f64::from(lowered.exponents()[j]);
                if q[(i, j)] != 0.0 && aj > 0.0 {
                    let target = lowered.lowered(j).unwrap_or_else(|| unreachable!());
                    l[(position(basis, &target), col)] += 0.5 * q[(i, j)] * ai * aj;
                }
            }
        }
    }
    debug_assert_eq!(block_structure_violation(&l, basis), 0.0);
    Ok(l)
}

fn position(basis: &PolyBasis, alpha: &MultiIndex) -> usize {
    basis.position(alpha).unwrap_or_else(|| unreachable!("degree never increases"))
}

/// Largest `|L_rc|` where the row degree is neither the column degree nor
/// two below it. Zero for every matrix produced by [`assemble_l`].
pub fn block_structure_violation(l: &Mat, basis: &PolyBasis) -> f64 {
    let mut worst = 0.0_f64;
    for col in 0..basis.dim() {
        let dc = basis.degree_of(col);
        for row in 0..basis.dim() {
            let dr = basis.degree_of(row);
            if dr != dc && dr + 2 != dc {
                worst = worst.max(l[(row, col)].abs());
            }
        }
    }
    worst
}

/// Degree-`n` diagonal block: the drift part acting on homogeneous
/// polynomials of degree `n`.
pub fn degree_block(l: &Mat, basis: &PolyBasis, n: usize) -> Mat {
    let r = basis.degree_range(n);
    l.view((r.start, r.start), (r.len(), r.len())).into_owned()
}

/// Eigenvalues of `assemble_l` at degree `N`. The matrix is block upper
/// triangular, so they are the union of the eigenvalues of its diagonal
/// blocks. When `A` has repeated eigenvalues the degree-`n` block can carry
/// Jordan blocks of size up to `n (m - 1) + 1`, and each block is clustered
/// accordingly.
pub fn galerkin_spectrum(model: &OUModel, degree: usize, tol: &Tolerances) -> Result<SpectrumSet> {
    let basis = PolyBasis::with_cap(model.dim(), degree, tol.size_cap)?;
    let l = assemble_l(model, &basis)?;
    galerkin_spectrum_of(&l, &basis, spectra::max_cluster_multiplicity(model.a())?, tol)
}

pub fn galerkin_spectrum_of(l: &Mat, basis: &PolyBasis, multiplicity: usize, tol: &Tolerances) -> Result<SpectrumSet> {
    let mut pts = Vec::new();
    for n in 0..=basis.degree() {
        let jordan = n * multiplicity.saturating_sub(1) + 1;
        let block = degree_block(l, basis, n);
        pts.extend_from_slice(spectra::eig_defective(&block, jordan, tol.cluster_radius)?.points());
    }
    Ok(SpectrumSet::new(pts, tol.cluster_radius).clustered())
}

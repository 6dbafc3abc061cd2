//! Exact action of the transition semigroup `P(t) f(x) = E f(e^{tA} x + G)`,
//! `G ~ N(0, Q_t)`, on polynomials.

use std::collections::HashMap;

use crate::error::{OuError, Result};
use crate::gramian::{self, OUModel};
use crate::linalg::{self, Mat};

use super::moments::GaussianMoments;
use super::poly::{PolyBasis, Polynomial, SparsePoly};

fn check_time(t: f64) -> Result<()> {
    if !(t >= 0.0) || !t.is_finite() {
        return Err(OuError::InvalidArgument(format!("time must be finite and nonnegative, got {t}")));
    }
    Ok(())
}

/// Matrix of `P(t)` on `basis`; column `c` is `P(t)` applied to the `c`-th
/// monomial.
pub fn mehler_matrix(model: &OUModel, t: f64, basis: &PolyBasis) -> Result<Mat> {
    check_time(t)?;
    let d = model.dim();
    if basis.d() != d {
        return Err(OuError::DimensionMismatch(format!("basis in {} variables, model dimension {d}", basis.d())));
    }
    if t == 0.0 {
        return Ok(Mat::identity(basis.dim(), basis.dim()));
    }
    let flow = linalg::expm(&(model.a() * t))?;
    let mut moments = GaussianMoments::new(gramian::gramian_t(model, t)?);

    // (e^{tA} x + g)_i as linear forms in the 2d variables (x, g)
    let forms: Vec<SparsePoly> = (0..d)
        .map(|i| {
            let mut c = vec![0.0; 2 * d];
            for k in 0..d {
                c[k] = flow[(i, k)];
            }
            c[d + i] = 1.0;
            SparsePoly::linear(&c)
        })
        .collect();

    let mut out = Mat::zeros(basis.dim(), basis.dim());
    for (col, alpha) in basis.monomials().iter().enumerate() {
        let expanded = SparsePoly::product_of_powers(&forms, alpha.exponents(), 2 * d);
        let mut collapsed: HashMap<Vec<u32>, f64> = HashMap::new();
        for (e, &c) in &expanded.terms {
            let m = moments.moment(&e[d..]);
            if m != 0.0 {
                *collapsed.entry(e[..d].to_vec()).or_insert(0.0) += c * m;
            }
        }
        let image = basis.coefficients(&SparsePoly { vars: d, terms: collapsed })?;
        out.set_column(col, &image);
    }
    Ok(out)
}

/// `P(t) f` for a polynomial on `PolyBasis(model.dim(), f.degree)`.
pub fn mehler_apply(model: &OUModel, t: f64, f: &Polynomial) -> Result<Polynomial> {
    let basis = PolyBasis::new(model.dim(), f.degree);
    f.check_basis(&basis)?;
    let m = mehler_matrix(model, t, &basis)?;
    Polynomial::from_coeffs(&basis, m * &f.coeffs)
}

mod common;

use common::*;
use num_complex::Complex64;
use ou_spectra::gramian::{self, gramian_inf, gramian_t};
use ou_spectra::linalg::{self, Mat};
use ou_spectra::ou_operator::{self, chaos_decomposition, galerkin_spectrum, mehler_apply, PolyBasis, Polynomial};
use ou_spectra::spectra::{hausdorff, SpectrumSet};
use ou_spectra::tensor_fock::MultiIndex;
use ou_spectra::OUModel;
use proptest::prelude::*;

/// Eigenvalues of a 2x2 matrix from its trace and determinant.
fn eig2(a: &Mat) -> [Complex64; 2] {
    let tr = a[(0, 0)] + a[(1, 1)];
    let det = a[(0, 0)] * a[(1, 1)] - a[(0, 1)] * a[(1, 0)];
    let disc = Complex64::new(tr * tr / 4.0 - det, 0.0).sqrt();
    [tr / 2.0 + disc, tr / 2.0 - disc]
}

/// `{ k lambda_1 + l lambda_2 : k + l <= n }`.
fn lattice2(l: [Complex64; 2], n: usize) -> SpectrumSet {
    let mut pts = Vec::new();
    for k in 0..=n {
        for j in 0..=n - k {
            pts.push(l[0] * k as f64 + l[1] * j as f64);
        }
    }
    SpectrumSet::new(pts, 1e-7)
}

fn points(model: &OUModel) -> Vec<Vec<f64>> {
    let d = model.dim();
    (0..5).map(|k| (0..d).map(|i| ((k * d + i) as f64 * 0.77).sin() * 1.3).collect()).collect()
}

#[test]
fn classical_generator_has_integer_spectrum() {
    let s = galerkin_spectrum(&classical(), 6, &tol()).unwrap();
    let expect = SpectrumSet::from_real(&[0.0, -1.0, -2.0, -3.0, -4.0, -5.0, -6.0], 1e-7);
    assert!(hausdorff(&s, &expect).unwrap() <= 1e-9);
}

#[test]
fn hermite_polynomials_are_eigenfunctions() {
    // invariant variance 1/2: He_2 = x^2 - 1/2, He_3 = x^3 - 3x/2
    let basis = PolyBasis::new(1, 3);
    let l = ou_operator::assemble_l(&classical(), &basis).unwrap();
    for (terms, n) in [(vec![(2u32, 1.0), (0, -0.5)], 2.0), (vec![(3, 1.0), (1, -1.5)], 3.0)] {
        let mut v = nalgebra::DVector::zeros(basis.dim());
        for (e, c) in terms {
            v[basis.position(&MultiIndex::new(vec![e])).unwrap()] = c;
        }
        assert!((&l * &v + &v * n).amax() < 1e-12);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn generator_spectrum_is_the_drift_lattice(model in model_2d()) {
        let computed = galerkin_spectrum(&model, 4, &tol()).unwrap();
        let predicted = lattice2(eig2(model.a()), 4);
        prop_assert!(hausdorff(&computed, &predicted).unwrap() <= 1e-6);
    }

    #[test]
    fn mehler_on_quadratics(model in any_model(), t in 0.1..2.0f64) {
        let d = model.dim();
        let basis = PolyBasis::new(d, 2);
        let e = linalg::expm(&(model.a() * t)).unwrap();
        let qt = gramian_t(&model, t).unwrap();
        for i in 0..d {
            for j in i..d {
                let mut alpha = vec![0u32; d];
                alpha[i] += 1;
                alpha[j] += 1;
                let f = Polynomial::monomial(&basis, &MultiIndex::new(alpha)).unwrap();
                let pf = mehler_apply(&model, t, &f).unwrap();
                for x in points(&model) {
                    let y = &e * nalgebra::DVector::from_column_slice(&x);
                    let expect = y[i] * y[j] + qt[(i, j)];
                    prop_assert!((pf.eval(&basis, &x) - expect).abs() <= 1e-10 * (1.0 + expect.abs()));
                }
            }
        }
    }

    #[test]
    fn mehler_semigroup_and_invariance(model in any_model()) {
        let basis = PolyBasis::new(model.dim(), 3);
        let p = |t| ou_operator::mehler_matrix(&model, t, &basis).unwrap();
        prop_assert!(linalg::max_abs(&(p(0.9) - p(0.4) * p(0.5))) <= 1e-9);
        let chaos = chaos_decomposition(&model, &basis, &tol());
        if let Ok(c) = chaos {
            // mean under mu is preserved: the constant row of the Gram matrix
            let mean = c.gram.row(0).clone_owned();
            let drift = mean * p(1.0) - c.gram.row(0);
            prop_assert!(drift.amax() <= 1e-10 * (1.0 + c.gram.row(0).amax()));
        }
    }

    #[test]
    fn chaos_projections_partition_unity(model in any_model()) {
        let basis = PolyBasis::new(model.dim(), 3);
        let Ok(c) = chaos_decomposition(&model, &basis, &tol()) else { return Ok(()) };
        let r = ou_operator::chaos::chaos_residuals(&c);
        prop_assert!(r.completeness <= 1e-10 && r.idempotence <= 1e-10 && r.orthogonality <= 1e-10);
    }

    #[test]
    fn three_routes_agree(model in any_model(), t in 0.2..1.5f64) {
        let q_inf = gramian_inf(&model, &tol()).unwrap();
        prop_assume!(linalg::rank(&q_inf, tol().rank_tol) == model.dim());
        let r = ou_operator::verify_second_quantization(&model, t, 3, 1e-8, &tol()).unwrap();
        prop_assert!(r.pass, "{r:?}");
    }

    #[test]
    fn restricted_drift_is_similar_to_drift(model in model_2d()) {
        let f = gramian::rkhs_factor(&gramian_inf(&model, &tol()).unwrap(), &tol());
        let amu = gramian::amu_matrix(&model, &f);
        let a = eig2(model.a());
        let b = eig2(&amu);
        let d = SpectrumSet::new(a.to_vec(), 1e-7);
        prop_assert!(hausdorff(&d, &SpectrumSet::new(b.to_vec(), 1e-7)).unwrap() <= 1e-6);
    }
}

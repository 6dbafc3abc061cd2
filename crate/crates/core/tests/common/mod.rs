#![allow(dead_code)]

use ou_spectra::gramian;
use ou_spectra::linalg::{self, Mat};
use ou_spectra::verify::{self, SpectrumKind};
use ou_spectra::{OUModel, Tolerances};
use proptest::prelude::*;

pub fn tol() -> Tolerances {
    Tolerances::default()
}

pub fn m(rows: &[Vec<f64>]) -> Mat {
    linalg::from_rows(rows).unwrap()
}

pub fn example() -> OUModel {
    OUModel::from_rows(&[vec![-1.0, 1.0], vec![0.0, -1.0]], &[vec![0.0, 0.0], vec![0.0, 1.0]], &tol()).unwrap()
}

pub fn classical() -> OUModel {
    OUModel::from_rows(&[vec![-1.0]], &[vec![1.0]], &tol()).unwrap()
}

/// Rank decisions on `Q_inf` and on `Q_t` for `t >= 0.1` sit at least two
/// decades away from `rank_tol`.
pub fn well_resolved(model: &OUModel) -> bool {
    let ratio = |m: Mat| {
        let s = m.singular_values();
        s.min() / s.max()
    };
    let q_inf = gramian::gramian_inf(model, &tol()).unwrap();
    ratio(q_inf) > 1e2 * tol().rank_tol && ratio(gramian::gramian_t(model, 0.1).unwrap()) > 1e2 * tol().rank_tol
}

fn model_of_dim(d: impl Strategy<Value = usize>) -> impl Strategy<Value = OUModel> {
    (any::<u64>(), d, 0usize..3)
        .prop_map(|(seed, d, k)| {
            let mut r = verify::rng(seed);
            verify::random_model(&mut r, d, SpectrumKind::ALL[k], &tol()).unwrap()
        })
        .prop_filter("near the rank threshold", well_resolved)
}

/// Seeded random stable model of dimension 1 to 3.
pub fn any_model() -> impl Strategy<Value = OUModel> {
    model_of_dim(1usize..4)
}

pub fn model_2d() -> impl Strategy<Value = OUModel> {
    model_of_dim(Just(2))
}

/// `int_0^t f(s) ds` by composite Simpson with `n` (even) panels.
pub fn simpson(t: f64, n: usize, f: impl Fn(f64) -> Mat) -> Mat {
    let h = t / n as f64;
    let mut acc = f(0.0) + f(t);
    for i in 1..n {
        acc += f(i as f64 * h) * if i % 2 == 1 { 4.0 } else { 2.0 };
    }
    acc * (h / 3.0)
}

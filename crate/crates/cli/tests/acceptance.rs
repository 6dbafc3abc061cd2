//! Acceptance criteria, one PASS/FAIL line each. Run with
//! `cargo test -p ou-spectra-cli --test acceptance`.

use std::path::{Path, PathBuf};
use std::time::Instant;

use nalgebra::DVector;
use ou_spectra::gramian::{self, gramian_inf, gramian_t, rkhs_factor, smu_norm};
use ou_spectra::linalg::{self, Mat};
use ou_spectra::ou_operator::{galerkin_spectrum, simulate_paths, verify_second_quantization};
use ou_spectra::ou_operator::sde::{covariance_standard_error, euler_maruyama_covariance};
use ou_spectra::spectra::{self, hausdorff, LatticeWindow, SpectrumSet};
use ou_spectra::tensor_fock::{annihilation, creation, second_quantization};
use ou_spectra::verify::{self, power_spectra_residual, random_contraction, rng};
use ou_spectra::{OUModel, Tolerances};
use ou_spectra_cli::model_file::{load_model, LoadedModel};
use rand::Rng;

const BUNDLED: [&str; 4] = ["classical_1d", "jordan_omega1", "hypoelliptic_2d", "degenerate_2d"];

fn tol() -> Tolerances {
    Tolerances::default()
}

fn bundled(name: &str) -> LoadedModel {
    let p: PathBuf = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../models").join(format!("{name}.json"));
    load_model(&p).unwrap_or_else(|e| panic!("{name}: {e}"))
}

fn random_models(seed: u64, count: usize, d: usize) -> Vec<OUModel> {
    verify::random_models(seed, count, d, &tol()).unwrap().into_iter().map(|(_, m)| m).collect()
}

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

/// Gauss-Legendre nodes and weights on [-1, 1] by Newton iteration on P_n.
fn gauss_legendre(n: usize) -> Vec<(f64, f64)> {
    (1..=n)
        .map(|i| {
            let mut x = (std::f64::consts::PI * (i as f64 - 0.25) / (n as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (mut p0, mut p1) = (1.0, x);
                for k in 2..=n {
                    let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                    p0 = p1;
                    p1 = p2;
                }
                dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
                let step = p1 / dp;
                x -= step;
                if step.abs() < 1e-16 {
                    break;
                }
            }
            (x, 2.0 / ((1.0 - x * x) * dp * dp))
        })
        .collect()
}

fn quadrature_gramian(model: &OUModel, t: f64) -> Mat {
    let rule = gauss_legendre(16);
    let panels = 8;
    let h = t / panels as f64;
    let d = model.dim();
    let mut acc = Mat::zeros(d, d);
    for p in 0..panels {
        let mid = (p as f64 + 0.5) * h;
        for &(x, w) in &rule {
            let e = linalg::expm(&(model.a() * (mid + 0.5 * h * x))).unwrap();
            acc += (&e * model.q() * e.transpose()) * (0.5 * h * w);
        }
    }
    acc
}

fn criterion_1() -> Outcome {
    let m = bundled("jordan_omega1");
    let f = rkhs_factor(&gramian_inf(&m.model, &m.tol).unwrap(), &m.tol);
    let worst = (1..=50)
        .map(|k| {
            let t = 0.1 * k as f64;
            (smu_norm(&m.model, &f, t, &m.tol).unwrap() - (-t).exp() * (t + (t * t + 1.0).sqrt())).abs()
        })
        .fold(0.0, f64::max);
    outcome(worst <= 1e-8, format!("max |error| over 50 points = {worst:.2e} (tol 1e-8)"))
}

fn criterion_2() -> Outcome {
    let m = bundled("classical_1d");
    let computed = galerkin_spectrum(&m.model, 6, &m.tol).unwrap();
    let expect = SpectrumSet::from_real(&[0.0, -1.0, -2.0, -3.0, -4.0, -5.0, -6.0], 1e-7);
    let h = hausdorff(&computed, &expect).unwrap();
    outcome(h <= 1e-9, format!("Hausdorff to {{0,...,-6}} = {h:.2e} (tol 1e-9)"))
}

fn criterion_3() -> Outcome {
    let models = random_models(3, 10, 2);
    let mut worst = 0.0_f64;
    let mut kinds = [0usize; 3];
    let mut full_kalman = true;
    for (i, m) in models.iter().enumerate() {
        kinds[i % 3] += 1;
        full_kalman &= linalg::rank(&gramian::kalman_matrix(m), tol().rank_tol) == 2;
        let computed = galerkin_spectrum(m, 4, &tol()).unwrap();
        let jordan = spectra::max_cluster_multiplicity(m.a()).unwrap();
        let eigs = spectra::eig_defective(m.a(), jordan, tol().cluster_radius).unwrap();
        let predicted = spectra::lattice_spectrum(&eigs, &LatticeWindow::degree(4), tol().enum_cap).unwrap();
        worst = worst.max(hausdorff(&computed, &predicted).unwrap());
    }
    let mixed = kinds.iter().all(|&k| k > 0);
    outcome(
        worst <= 1e-6 && mixed && full_kalman,
        format!("10 models (real/complex/defective = {kinds:?}), max Hausdorff = {worst:.2e} (tol 1e-6)"),
    )
}

fn criterion_4() -> Outcome {
    let mut r = rng(4);
    let mut worst = 0.0_f64;
    let mut with_jordan = 0;
    for i in 0..20 {
        let d = 1 + i % 3;
        let n = 1 + (i / 3) % 3;
        let jordan = d >= 2 && i % 2 == 0;
        with_jordan += usize::from(jordan);
        let t = random_contraction(&mut r, d, jordan, None);
        assert!(linalg::norm2(&t) < 1.0);
        worst = worst.max(power_spectra_residual(&t, n, &tol()).unwrap());
    }
    outcome(worst <= 1e-7, format!("20 contractions ({with_jordan} with Jordan blocks), max Hausdorff = {worst:.2e} (tol 1e-7)"))
}

fn criterion_5() -> Outcome {
    let mut r = rng(5);
    let cap = tol().size_cap;
    let (mut ccr, mut dual) = (0.0_f64, true);
    for d in 1..=3 {
        for n in 0..=4 {
            for _ in 0..3 {
                let h: Vec<f64> = (0..d).map(|_| r.random_range(-2.0..2.0)).collect();
                let h2: f64 = h.iter().map(|x| x * x).sum();
                let comm = annihilation(&h, n + 2, cap).unwrap() * creation(&h, n + 1, cap).unwrap()
                    - creation(&h, n, cap).unwrap() * annihilation(&h, n + 1, cap).unwrap();
                let k = comm.nrows();
                ccr = ccr.max(linalg::max_abs(&(comm - Mat::identity(k, k) * h2)));
                dual &= creation(&h, n, cap).unwrap().transpose() == annihilation(&h, n + 1, cap).unwrap();
            }
        }
    }
    let mut violations = 0;
    for _ in 0..100 {
        let d = r.random_range(1..=3);
        let n = r.random_range(0..=4);
        let h: Vec<f64> = (0..d).map(|_| r.random_range(-2.0..2.0)).collect();
        let up = creation(&h, n, cap).unwrap();
        let g = DVector::from_fn(up.ncols(), |_, _| r.random_range(-1.0..1.0));
        let lhs = (&up * &g).norm_squared();
        let rhs = g.norm_squared() * h.iter().map(|x| x * x).sum::<f64>();
        if lhs < rhs * (1.0 - 1e-12) {
            violations += 1;
        }
    }
    outcome(
        ccr <= 1e-12 && dual && violations == 0,
        format!("commutator residual {ccr:.2e} (tol 1e-12), duality exact: {dual}, lower-bound violations {violations}/100"),
    )
}

fn criterion_6() -> Outcome {
    let classical = bundled("classical_1d");
    let example = bundled("jordan_omega1");
    let runs = [(&classical, 4, 0.5), (&classical, 4, 1.0), (&example, 3, 1.0)];
    let mut worst = 0.0_f64;
    for (m, n, t) in runs {
        worst = worst.max(verify_second_quantization(&m.model, t, n, 1e-8, &m.tol).unwrap().max_residual);
    }
    outcome(worst <= 1e-8, format!("max three-way residual = {worst:.2e} (tol 1e-8)"))
}

fn criterion_7() -> Outcome {
    let t = random_contraction(&mut rng(7), 3, false, Some(0.6));
    let norm = linalg::norm2(&t);
    let low = second_quantization(&t, 4, false, &tol()).unwrap();
    let high = second_quantization(&t, 6, false, &tol()).unwrap();
    let h = hausdorff(&low.spectrum_in(6, tol().cluster_radius).unwrap(), &high.spectrum(tol().cluster_radius).unwrap()).unwrap();
    let bound = 0.6_f64.powi(5) + 1e-9;
    outcome(
        (norm - 0.6).abs() < 1e-12 && h <= bound,
        format!("||T|| = {norm:.12}, Hausdorff(levels 4, 6) = {h:.3e} <= {bound:.6e}"),
    )
}

fn criterion_8() -> Outcome {
    let mut models: Vec<(String, OUModel)> = BUNDLED.iter().map(|n| (n.to_string(), bundled(n).model)).collect();
    for d in [2, 3] {
        models.extend(verify::random_models(8, 10, d, &tol()).unwrap());
    }
    let (mut lyap, mut split, mut quad) = (0.0_f64, 0.0_f64, 0.0_f64);
    for (_, m) in &models {
        let q_inf = gramian_inf(m, &tol()).unwrap();
        lyap = lyap.max(linalg::norm2(&gramian::lyapunov_residual(m, &q_inf)));
        for t in [0.1, 1.0, 5.0] {
            let e = linalg::expm(&(m.a() * t)).unwrap();
            let qt = gramian_t(m, t).unwrap();
            split = split.max(linalg::norm2(&(&q_inf - &qt - &e * &q_inf * e.transpose())));
            quad = quad.max(linalg::max_abs(&(qt - quadrature_gramian(m, t))));
        }
    }
    outcome(
        lyap <= 1e-10 && split <= 1e-8 && quad <= 1e-8,
        format!("{} models: Lyapunov {lyap:.2e} (1e-10), splitting {split:.2e} (1e-8), quadrature {quad:.2e} (1e-8)", models.len()),
    )
}

fn criterion_9() -> Outcome {
    let grid = [1.0];
    let report = |name: &str| ou_spectra_cli::commands::analyze::build(&bundled(name), &grid, None).unwrap();
    let hypo = report("hypoelliptic_2d");
    let degen = report("degenerate_2d");
    let hypo_ok = hypo.gramian.report.strong_feller && hypo.gramian.report.q_inf_invertible;
    let degen_ok = !degen.gramian.report.strong_feller && degen.gramian.report.rank_q_inf == 1;
    let agree = BUNDLED.iter().all(|n| report(n).gramian.invertibility.agree);
    outcome(
        hypo_ok && degen_ok && agree,
        format!("hypoelliptic strong Feller + invertible: {hypo_ok}, degenerate not strong Feller + rank 1: {degen_ok}, equivalence agrees on all bundled: {agree}"),
    )
}

fn criterion_10() -> Outcome {
    let (t, dt, n) = (1.0, 1e-3, 20_000);
    let mut worst_ratio = 0.0_f64;
    for name in ["classical_1d", "jordan_omega1"] {
        let m = bundled(name).model;
        let d = m.dim();
        let stats = simulate_paths(&m, &vec![0.0; d], t, dt, n, 2024).unwrap();
        let qt = gramian_t(&m, t).unwrap();
        let cov = stats.covariance_matrix();
        let se = covariance_standard_error(&qt, n);
        let bias = euler_maruyama_covariance(&m, t, stats.steps) - &qt;
        for i in 0..d {
            for j in 0..d {
                let allowed = 5.0 * se[(i, j)] + bias[(i, j)].abs();
                worst_ratio = worst_ratio.max((cov[(i, j)] - qt[(i, j)]).abs() / allowed);
            }
        }
    }
    outcome(worst_ratio <= 1.0, format!("worst |error| / (5 se + |bias|) = {worst_ratio:.3} over 2 models"))
}

fn main() {
    if std::env::args().any(|a| a == "--list") {
        return;
    }
    let start = Instant::now();
    let criteria: [(&str, fn() -> Outcome); 10] = [
        ("example norm curve", criterion_1),
        ("classical OU spectrum", criterion_2),
        ("lattice formula on random models", criterion_3),
        ("tensor vs symmetric power spectra", criterion_4),
        ("commutation, duality, lower bound", criterion_5),
        ("second quantization three ways", criterion_6),
        ("Fock truncation stability", criterion_7),
        ("Gramian identities", criterion_8),
        ("strong Feller and invertibility branches", criterion_9),
        ("Monte Carlo covariance", criterion_10),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let t0 = Instant::now();
        let o = f();
        failed += usize::from(!o.pass);
        println!(
            "criterion {:>2} {} {name}: {} [{:.2}s]",
            i + 1,
            if o.pass { "PASS" } else { "FAIL" },
            o.detail,
            t0.elapsed().as_secs_f64()
        );
    }
    println!("acceptance: {} of 10 passed in {:.1}s", 10 - failed, start.elapsed().as_secs_f64());
    if failed > 0 {
        std::process::exit(1);
    }
}

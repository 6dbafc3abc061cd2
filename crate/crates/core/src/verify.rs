//! Invariant suites run by `ou-spectra verify`, and seeded generators of
//! random stable models and contractions.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::config::Tolerances;
use crate::error::{OuError, Result};
use crate::gramian::{self, OUModel};
use crate::linalg::{self, Mat};
use crate::ou_operator::chaos::{self, chaos_for_covariance};
use crate::ou_operator::galerkin::{self, assemble_l, block_structure_violation};
use crate::ou_operator::mehler::mehler_matrix;
use crate::ou_operator::poly::PolyBasis;
use crate::ou_operator::semigroup::verify_second_quantization;
use crate::spectra::{self, hausdorff, LatticeWindow, SpectrumSet};
use crate::tensor_fock;

/// Statements that a finite-dimensional, `L^2` computation cannot reach.
pub const UNTESTED_THEORY: [&str; 3] = [
    "spectra of the L^p realizations for p != 2 (only p = 2 is computed)",
    "infinite-dimensional state spaces and Banach-space drifts",
    "closure of the lattice sums when infinitely many eigenvalues accumulate",
];

pub type Rng64 = ChaCha8Rng;

pub fn rng(seed: u64) -> Rng64 {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Spectral type of a random drift.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum SpectrumKind {
    RealDistinct,
    ComplexPair,
    Defective,
}

impl SpectrumKind {
    pub const ALL: [SpectrumKind; 3] = [Self::RealDistinct, Self::ComplexPair, Self::Defective];
}

fn uniform(rng: &mut Rng64, lo: f64, hi: f64) -> f64 {
    rng.random_range(lo..hi)
}

fn random_matrix(rng: &mut Rng64, d: usize, amp: f64) -> Mat {
    Mat::from_fn(d, d, |_, _| uniform(rng, -amp, amp))
}

/// `P` with condition number at most 10.
fn random_similarity(rng: &mut Rng64, d: usize, amp: f64) -> (Mat, Mat) {
    loop {
        let p = Mat::identity(d, d) + random_matrix(rng, d, amp);
        let s = p.singular_values();
        if s.min() > 0.0 && s.max() / s.min() <= 10.0 {
            if let Some(inv) = p.clone().try_inverse() {
                return (p, inv);
            }
        }
    }
}

/// Real eigenvalues descending from `top`, consecutive gaps in `[0.3, 0.9)`.
fn spaced_reals(rng: &mut Rng64, top: f64, count: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(count);
    let mut cur = top;
    for _ in 0..count {
        cur -= uniform(rng, 0.3, 0.9);
        out.push(cur);
    }
    out
}

/// Drift `A = P D P^-1` of the requested spectral type with spectral
/// abscissa in `[-1.5, -0.3]`. A complex pair or a Jordan block needs
/// `d >= 2`; for `d = 1` the kind falls back to a real eigenvalue.
pub fn random_drift(rng: &mut Rng64, d: usize, kind: SpectrumKind) -> Mat {
    let mut core = Mat::zeros(d, d);
    let lead = -uniform(rng, 0.3, 1.5);
    let used = if d >= 2 && kind != SpectrumKind::RealDistinct { 2 } else { 0 };
    match (kind, used) {
        (SpectrumKind::ComplexPair, 2) => {
            let b = uniform(rng, 0.4, 1.5);
            core[(0, 0)] = lead;
            core[(1, 1)] = lead;
            core[(0, 1)] = b;
            core[(1, 0)] = -b;
        }
        (SpectrumKind::Defective, 2) => {
            core[(0, 0)] = lead;
            core[(1, 1)] = lead;
            core[(0, 1)] = uniform(rng, 0.5, 1.5);
        }
        _ => {}
    }
    let reals = if used == 0 {
        let mut v = vec![lead];
        v.extend(spaced_reals(rng, lead, d - 1));
        v
    } else {
        spaced_reals(rng, lead, d - used)
    };
    for (k, &l) in reals.iter().enumerate() {
        core[(used + k, used + k)] = l;
    }
    let (p, p_inv) = random_similarity(rng, d, 0.4);
    p * core * p_inv
}

/// Random PSD diffusion with full Kalman rank for `a`: rank one or full
/// rank with equal probability.
pub fn random_diffusion(rng: &mut Rng64, a: &Mat, tol: &Tolerances) -> Mat {
    let d = a.nrows();
    loop {
        let q = if rng.random_bool(0.5) {
            let v = DVector::from_fn(d, |_, _| uniform(rng, -1.0, 1.0));
            &v * v.transpose()
        } else {
            let b = random_matrix(rng, d, 1.0);
            &b * b.transpose() + Mat::identity(d, d) * 0.1
        };
        let model = OUModel::unchecked(a.clone(), q.clone());
        if linalg::rank(&gramian::kalman_matrix(&model), tol.rank_tol) == d && linalg::norm2(&q) > 0.05 {
            return linalg::symmetrize(&q);
        }
    }
}

pub fn random_model(rng: &mut Rng64, d: usize, kind: SpectrumKind, tol: &Tolerances) -> Result<OUModel> {
    let a = random_drift(rng, d, kind);
    let q = random_diffusion(rng, &a, tol);
    OUModel::new(a, q, tol)
}

/// Random strict contraction. With `jordan` and `d >= 2` the matrix is
/// similar to a Jordan block (of size 3 half the time when `d = 3`), with
/// any remaining eigenvalue of opposite sign and smaller modulus. The result
/// is scaled to norm `target` when given, else to a norm below 0.95.
pub fn random_contraction(rng: &mut Rng64, d: usize, jordan: bool, target: Option<f64>) -> Mat {
    let t = if jordan && d >= 2 {
        let lam = uniform(rng, 0.45, 0.8) * if rng.random_bool(0.5) { 1.0 } else { -1.0 };
        let mut core = Mat::from_diagonal_element(d, d, lam);
        core[(0, 1)] = uniform(rng, 0.2, 0.5);
        if d == 3 {
            if rng.random_bool(0.5) {
                core[(1, 2)] = uniform(rng, 0.2, 0.5);
            } else {
                core[(2, 2)] = -lam.signum() * uniform(rng, 0.1, 0.35);
            }
        }
        let (p, p_inv) = random_similarity(rng, d, 0.2);
        p * core * p_inv
    } else {
        random_matrix(rng, d, 1.0)
    };
    let norm = linalg::norm2(&t).max(f64::MIN_POSITIVE);
    let goal = match target {
        Some(g) => g,
        None if norm < 0.95 => norm,
        None => uniform(rng, 0.3, 0.95),
    };
    t * (goal / norm)
}

/// One line of a verification report.
#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub name: String,
    pub residual: f64,
    pub tol: f64,
    pub pass: bool,
    pub skipped: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl Check {
    pub fn new(name: impl Into<String>, residual: f64, tol: f64) -> Self {
        Self { name: name.into(), residual, tol, pass: residual <= tol, skipped: false, note: None }
    }

    pub fn skipped(name: impl Into<String>, note: impl Into<String>) -> Self {
        Self { name: name.into(), residual: 0.0, tol: 0.0, pass: true, skipped: true, note: Some(note.into()) }
    }

    fn with_note(mut self, note: impl Into<String>) -> Self {
        self.note = Some(note.into());
        self
    }

    /// Failures read as residual 1, successes as 0.
    pub fn flag(name: impl Into<String>, ok: bool) -> Self {
        Self::new(name, if ok { 0.0 } else { 1.0 }, 0.0)
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SuiteReport {
    pub label: String,
    pub checks: Vec<Check>,
    pub pass: bool,
}

impl SuiteReport {
    pub fn new(label: impl Into<String>, checks: Vec<Check>) -> Self {
        let pass = checks.iter().all(|c| c.pass);
        Self { label: label.into(), checks, pass }
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.pass)
    }
}

/// Knobs of the per-model suite.
#[derive(Debug, Clone)]
pub struct SuiteOptions {
    pub degree: usize,
    pub levels: usize,
    pub seed: u64,
    /// Added to every entry of `Q_inf` before the Gramian checks; a negative
    /// control for the report plumbing.
    pub corrupt_q_inf: Option<f64>,
    /// Hausdorff tolerance for the Galerkin spectrum against the lattice.
    pub lattice_tol: f64,
}

impl Default for SuiteOptions {
    fn default() -> Self {
        Self { degree: 3, levels: 3, seed: 0, corrupt_q_inf: None, lattice_tol: 1e-6 }
    }
}

pub const SPLIT_TIMES: [f64; 3] = [0.1, 1.0, 5.0];
pub const NORM_IDENTITY_TIMES: [f64; 3] = [0.5, 1.0, 2.0];
pub const SEMIGROUP_TIMES: [f64; 2] = [0.3, 0.7];
pub const MONOTONE_TIMES: [f64; 5] = [0.1, 0.5, 1.0, 2.0, 5.0];

/// `int_0^t e^{sA} Q e^{sA^T} ds` by composite 8-point Gauss-Legendre on
/// `panels` equal panels; an integration route independent of the block
/// exponential.
pub fn gramian_quadrature(model: &OUModel, t: f64, panels: usize) -> Result<Mat> {
    const NODES: [f64; 4] = [0.183_434_642_495_649_8, 0.525_532_409_916_329, 0.796_666_477_413_626_7, 0.960_289_856_497_536_3];
    const WEIGHTS: [f64; 4] = [0.362_683_783_378_362, 0.313_706_645_877_887_3, 0.222_381_034_453_374_5, 0.101_228_536_290_376_3];
    let d = model.dim();
    let mut acc = Mat::zeros(d, d);
    let h = t / panels as f64;
    for p in 0..panels {
        let mid = (p as f64 + 0.5) * h;
        for (x, w) in NODES.iter().zip(WEIGHTS) {
            for s in [mid - 0.5 * h * x, mid + 0.5 * h * x] {
                let e = linalg::expm(&(model.a() * s))?;
                acc += &e * model.q() * e.transpose() * (0.5 * h * w);
            }
        }
    }
    Ok(acc)
}

/// Gramian and `H_mu` invariants for a stable model.
pub fn gramian_checks(model: &OUModel, opts: &SuiteOptions, tol: &Tolerances) -> Result<Vec<Check>> {
    let mut out = Vec::new();
    let mut q_inf = gramian::gramian_inf(model, tol)?;
    if let Some(delta) = opts.corrupt_q_inf {
        q_inf.iter_mut().for_each(|x| *x += delta);
    }
    let q_norm = linalg::norm2(model.q());
    let qi_norm = linalg::norm2(&q_inf).max(f64::MIN_POSITIVE);
    out.push(Check::new(
        "lyapunov_residual",
        linalg::norm2(&gramian::lyapunov_residual(model, &q_inf)) / (1.0 + q_norm),
        tol.lyap_tol,
    ));

    let split = SPLIT_TIMES
        .iter()
        .map(|&t| -> Result<f64> {
            let e = linalg::expm(&(model.a() * t))?;
            let r = &q_inf - gramian::gramian_t(model, t)? - &e * &q_inf * e.transpose();
            Ok(linalg::norm2(&r) / qi_norm)
        })
        .collect::<Result<Vec<_>>>()?;
    out.push(Check::new("splitting_identity", split.into_iter().fold(0.0, f64::max), 1e-8));

    let quad = [0.5, 2.0]
        .iter()
        .map(|&t| -> Result<f64> {
            let diff = gramian::gramian_t(model, t)? - gramian_quadrature(model, t, 64)?;
            Ok(linalg::max_abs(&diff))
        })
        .collect::<Result<Vec<_>>>()?;
    out.push(Check::new("gramian_t_vs_quadrature", quad.into_iter().fold(0.0, f64::max), 1e-8));

    let mut worst_mono = 0.0_f64;
    let gram: Vec<Mat> = MONOTONE_TIMES.iter().map(|&t| gramian::gramian_t(model, t)).collect::<Result<_>>()?;
    for w in gram.windows(2) {
        worst_mono = worst_mono.max(-linalg::min_sym_eig(&(&w[1] - &w[0])));
    }
    for g in &gram {
        worst_mono = worst_mono.max(-linalg::min_sym_eig(&(&q_inf - g)));
    }
    out.push(Check::new("gramian_monotonicity", worst_mono.max(0.0) / (1.0 + qi_norm), 1e-10));

    let factor = gramian::rkhs_factor(&q_inf, tol);
    let strong = gramian::strong_feller_check(model, 1.0, tol);
    out.push(Check::flag("strong_feller_criteria_agree", strong.is_ok()).with_note(match &strong {
        Ok(b) => format!("strong_feller = {b}"),
        Err(e) => e.to_string(),
    }));
    let strong = strong.unwrap_or(false);

    let smu = |t: f64| gramian::smu_matrix(model, &factor, t, tol);
    match smu(1.0) {
        Err(e @ OuError::RangeNotInvariant(_)) => {
            out.push(Check::flag("range_invariance", false).with_note(e.to_string()));
            return Ok(out);
        }
        Err(e) => return Err(e),
        Ok(_) => {}
    }

    let mut worst_norm_id = 0.0_f64;
    for &t in &NORM_IDENTITY_TIMES {
        let k = gramian::pencil_max_ratio(&q_inf, &gramian::gramian_t(model, t)?, tol.rank_tol);
        if k.is_finite() {
            let s2 = linalg::norm2(&smu(t)?).powi(2);
            let expect = 1.0 - 1.0 / k;
            worst_norm_id = worst_norm_id.max((s2 - expect).abs() / s2.abs().max(expect.abs()).max(f64::MIN_POSITIVE));
        }
    }
    out.push(Check::new("norm_identity", worst_norm_id, 1e-6));

    let mut worst_sg = 0.0_f64;
    for &s in &SEMIGROUP_TIMES {
        for &t in &SEMIGROUP_TIMES {
            worst_sg = worst_sg.max(linalg::max_abs(&(smu(s + t)? - smu(s)? * smu(t)?)));
        }
    }
    out.push(Check::new("smu_semigroup_law", worst_sg, 1e-8));

    let norms: Vec<f64> = MONOTONE_TIMES.iter().map(|&t| smu(t).map(|m| linalg::norm2(&m))).collect::<Result<_>>()?;
    let max_norm = norms.iter().copied().fold(0.0, f64::max);
    out.push(Check::new("smu_contraction", (max_norm - 1.0).max(0.0), tol.contraction_tol));
    if strong {
        out.push(Check::flag("smu_strict_contraction", max_norm < 1.0));
    } else {
        out.push(Check::skipped("smu_strict_contraction", "not strong Feller"));
    }

    let inv = gramian::invertibility_equivalence_report(model, tol)?;
    out.push(Check::flag("invertibility_equivalence", inv.agree));
    Ok(out)
}

/// The curve `e^{-t}(t + sqrt(t^2 + 1))` on 50 points of `(0, 5]` for the
/// Jordan example `A = [[-1, 1], [0, -1]]`, `Q = diag(0, 1)`.
pub fn example_norm_curve(model: &OUModel, tol: &Tolerances) -> Result<Check> {
    let factor = gramian::rkhs_factor(&gramian::gramian_inf(model, tol)?, tol);
    let mut worst = 0.0_f64;
    for k in 1..=50 {
        let t = 0.1 * k as f64;
        let expect = (-t).exp() * (t + (t * t + 1.0).sqrt());
        worst = worst.max((gramian::smu_norm(model, &factor, t, tol)? - expect).abs());
    }
    Ok(Check::new("example_norm_curve", worst, 1e-8))
}

pub fn is_jordan_example(model: &OUModel) -> bool {
    let a = linalg::from_rows(&[vec![-1.0, 1.0], vec![0.0, -1.0]]).unwrap_or_else(|_| unreachable!());
    let q = linalg::from_rows(&[vec![0.0, 0.0], vec![0.0, 1.0]]).unwrap_or_else(|_| unreachable!());
    model.dim() == 2 && model.a() == &a && model.q() == &q
}

/// All sums of `n` entries (with repetition) of `base`.
pub fn sum_set(base: &[Complex64], n: usize) -> Vec<Complex64> {
    fn rec(base: &[Complex64], start: usize, left: usize, acc: Complex64, out: &mut Vec<Complex64>) {
        if left == 0 {
            out.push(acc);
            return;
        }
        for i in start..base.len() {
            rec(base, i, left - 1, acc + base[i], out);
        }
    }
    let mut out = Vec::new();
    rec(base, 0, n, Complex64::new(0.0, 0.0), &mut out);
    out
}

/// Predicted spectrum of `L` in a window: lattice sums over the eigenvalues
/// of `A_mu`.
pub fn predicted_spectrum(model: &OUModel, window: &LatticeWindow, tol: &Tolerances) -> Result<SpectrumSet> {
    let q_inf = gramian::gramian_inf(model, tol)?;
    let factor = gramian::rkhs_factor(&q_inf, tol);
    let amu = gramian::amu_matrix(model, &factor);
    let eigs = spectra::eig_defective(&amu, spectra::max_cluster_multiplicity(&amu)?, tol.cluster_radius)?;
    spectra::lattice_spectrum(&eigs, window, tol.enum_cap)
}

/// Galerkin spectrum at degree `N` against the lattice prediction with at
/// most `N` terms. Returns `(computed, predicted, hausdorff)`.
pub fn galerkin_vs_lattice(model: &OUModel, degree: usize, tol: &Tolerances) -> Result<(SpectrumSet, SpectrumSet, f64)> {
    let computed = galerkin::galerkin_spectrum(model, degree, tol)?;
    let predicted = predicted_spectrum(model, &LatticeWindow::degree(degree), tol)?;
    let h = hausdorff(&computed, &predicted)?;
    Ok((computed, predicted, h))
}

fn smallest_singular_value(m: &DMatrix<Complex64>) -> f64 {
    m.singular_values().iter().copied().fold(f64::INFINITY, f64::min)
}

/// Each lattice point `z` whose shortest representation uses `n` terms is an
/// eigenvalue of `L` restricted to polynomials of degree `<= n`. Returns the
/// worst relative smallest singular value of `L_{<=n} - z`.
pub fn eigenvector_degree_residual(model: &OUModel, degree: usize, tol: &Tolerances) -> Result<f64> {
    let basis = PolyBasis::with_cap(model.dim(), degree, tol.size_cap)?;
    let l = assemble_l(model, &basis)?;
    let eigs = spectra::eig_defective(model.a(), spectra::max_cluster_multiplicity(model.a())?, tol.cluster_radius)?;
    let reps = eigs.representatives();
    let mut worst = 0.0_f64;
    let mut seen: Vec<Complex64> = Vec::new();
    for n in 0..=degree {
        let r = basis.up_to(n);
        let sub = l.view((0, 0), (r.len(), r.len())).map(|x| Complex64::new(x, 0.0));
        let scale = linalg::norm2(&l.view((0, 0), (r.len(), r.len())).into_owned()).max(1.0);
        for z in sum_set(&reps, n) {
            if seen.iter().any(|s| (s - z).norm() <= 1e-6 * scale) {
                continue;
            }
            seen.push(z);
            let shifted = &sub - DMatrix::<Complex64>::identity(r.len(), r.len()) * z;
            worst = worst.max(smallest_singular_value(&shifted) / scale);
        }
    }
    Ok(worst)
}

/// Galerkin, chaos, Mehler and second-quantization invariants.
pub fn operator_checks(model: &OUModel, opts: &SuiteOptions, tol: &Tolerances) -> Result<Vec<Check>> {
    let mut out = Vec::new();
    let degree = opts.degree;
    let basis = PolyBasis::with_cap(model.dim(), degree, tol.size_cap)?;
    let l = assemble_l(model, &basis)?;
    out.push(Check::new("galerkin_block_structure", block_structure_violation(&l, &basis), 0.0));

    let q_inf = gramian::gramian_inf(model, tol)?;
    let rank = linalg::rank(&q_inf, tol.rank_tol);
    if rank < model.dim() {
        let why = format!("invariant measure is degenerate (rank {rank} of {})", model.dim());
        for name in [
            "galerkin_vs_lattice",
            "eigenvector_degrees",
            "chaos_projections",
            "mu_invariance",
            "mehler_semigroup_law",
            "chaos_covariance",
            "second_quantization",
        ] {
            out.push(Check::skipped(name, why.clone()));
        }
        return Ok(out);
    }

    let (_, _, h) = galerkin_vs_lattice(model, degree, tol)?;
    out.push(Check::new("galerkin_vs_lattice", h, opts.lattice_tol));
    out.push(Check::new("eigenvector_degrees", eigenvector_degree_residual(model, degree, tol)?, 1e-8));

    let chaos = chaos_for_covariance(&q_inf, &basis, tol)?;
    let res = chaos::chaos_residuals(&chaos);
    let mut c = Check::new("chaos_projections", res.completeness.max(res.idempotence).max(res.orthogonality), 1e-10);
    if chaos.ill_conditioned() {
        c = c.with_note(format!("Q_inf condition number {:.3e}", chaos.condition));
    }
    out.push(c);

    let (s, t) = (0.4, 0.9);
    let ps = mehler_matrix(model, s, &basis)?;
    let pt = mehler_matrix(model, t, &basis)?;
    let pst = mehler_matrix(model, s + t, &basis)?;
    let i0 = chaos.projection(0);
    let inv = i0 * &pt - i0;
    let inv_res = (0..basis.dim())
        .map(|c| inv.column(c).amax() / i0.column(c).amax().max(1.0))
        .fold(0.0, f64::max);
    out.push(Check::new("mu_invariance", inv_res, 1e-10));
    out.push(Check::new("mehler_semigroup_law", linalg::max_abs(&(&ps * &pt - &pst)) / linalg::max_abs(&pst).max(1.0), 1e-9));

    if degree >= 2 {
        let factor = gramian::rkhs_factor(&q_inf, tol);
        let mut r = rng(opts.seed ^ 0x9e37_79b9);
        let vec = |r: &mut Rng64| (0..factor.rank).map(|_| uniform(r, -1.0, 1.0)).collect::<Vec<f64>>();
        let hs = vec![vec(&mut r), vec(&mut r)];
        let ks = vec![vec(&mut r), vec(&mut r)];
        let lhs = chaos::chaos_product_inner(&chaos, &factor, &hs, &ks)?;
        out.push(Check::new("chaos_covariance", (lhs - chaos::permanent_of_inner_products(&hs, &ks)).abs(), 1e-9));
    } else {
        out.push(Check::skipped("chaos_covariance", "needs degree >= 2"));
    }

    let sq = verify_second_quantization(model, 1.0, degree.min(3), 1e-8, tol)?;
    out.push(Check::new("second_quantization", sq.max_residual, sq.tol));
    Ok(out)
}

/// Hausdorff distance between clustered eigenvalue sets of `T^(x)n`,
/// `T^(sym n)` and the `n`-fold products of `sigma(T)`.
pub fn power_spectra_residual(t: &Mat, n: usize, tol: &Tolerances) -> Result<f64> {
    let m = spectra::max_cluster_multiplicity(t)?;
    let jordan = n * m.saturating_sub(1) + 1;
    let tensor = spectra::eig_defective(&tensor_fock::tensor_power(t, n, tol.size_cap)?, jordan, tol.cluster_radius)?;
    let sym = spectra::eig_defective(&tensor_fock::sym_power(t, n, tol.size_cap)?, jordan, tol.cluster_radius)?;
    let base = spectra::eig_defective(t, m, tol.cluster_radius)?;
    let products = spectra::product_set(&base, n, tol.enum_cap)?;
    Ok(hausdorff(&tensor, &sym)?.max(hausdorff(&tensor, &products)?).max(hausdorff(&sym, &products)?))
}

/// Fock-space invariants for a contraction `t`; `other` is a second matrix
/// of the same size for the homomorphism and telescoping checks.
pub fn fock_checks(t: &Mat, other: &Mat, levels: usize, seed: u64, tol: &Tolerances) -> Result<Vec<Check>> {
    let mut out = Vec::new();
    let d = t.nrows();
    let cap = tol.size_cap;
    let max_n = (1..=levels.max(1)).take_while(|&n| d.checked_pow(n as u32).is_some_and(|s| s <= cap)).last().unwrap_or(1);
    let nt = linalg::norm2(t);
    let ns = linalg::norm2(other);

    let (mut tensor_law, mut sym_law, mut telescope, mut hom, mut spectra_res, mut dg) = (0.0_f64, 0.0_f64, 0.0_f64, 0.0_f64, 0.0_f64, 0.0_f64);
    for n in 1..=max_n {
        let tp = tensor_fock::tensor_power(t, n, cap)?;
        let want = nt.powi(n as i32);
        tensor_law = tensor_law.max((linalg::norm2(&tp) - want).abs());
        sym_law = sym_law.max((linalg::norm2(&tensor_fock::sym_power(t, n, cap)?) - want).abs());
        let diff = linalg::norm2(&(tp - tensor_fock::tensor_power(other, n, cap)?));
        let bound: f64 = (0..n).map(|j| ns.powi(j as i32) * nt.powi((n - 1 - j) as i32)).sum::<f64>() * linalg::norm2(&(t - other));
        telescope = telescope.max(diff - bound * (1.0 + 1e-12));
        let lhs = tensor_fock::sym_power(&(t * other), n, cap)?;
        let rhs = tensor_fock::sym_power(t, n, cap)? * tensor_fock::sym_power(other, n, cap)?;
        hom = hom.max(linalg::max_abs(&(lhs - rhs)));
        if n <= 3 {
            spectra_res = spectra_res.max(power_spectra_residual(t, n, tol)?);
        }
        let gen = t - Mat::identity(d, d);
        let lifted = spectra::eig(&tensor_fock::dgamma(&gen, n, cap)?)?;
        let sums = SpectrumSet::new(sum_set(&spectra::eig(&gen)?.representatives(), n), tol.cluster_radius);
        let m = spectra::max_cluster_multiplicity(&gen)?;
        let lifted = if m > 1 {
            spectra::eig_defective(&tensor_fock::dgamma(&gen, n, cap)?, n * (m - 1) + 1, tol.cluster_radius)?
        } else {
            lifted
        };
        dg = dg.max(hausdorff(&lifted, &sums.clustered())?);
    }
    out.push(Check::new("tensor_norm_law", tensor_law, 1e-10));
    out.push(Check::new("sym_norm_law", sym_law, 1e-8));
    out.push(Check::new("telescoping_bound", telescope.max(0.0), 1e-14));
    out.push(Check::new("homomorphism", hom, 1e-10));
    out.push(Check::new("power_spectra_agree", spectra_res, 1e-7));
    out.push(Check::new("dgamma_spectrum", dg, 1e-7));

    if nt < 1.0 {
        let gamma = tensor_fock::second_quantization(t, levels, false, tol)?;
        let computed = gamma.spectrum(tol.cluster_radius)?;
        let predicted = tensor_fock::predicted_fock_spectrum(t, levels, tol)?;
        out.push(Check::new("fock_spectrum", hausdorff(&computed, &predicted)?, 1e-7));
        let next = tensor_fock::second_quantization(t, levels + 1, false, tol)?;
        let gap = hausdorff(&gamma.spectrum_in(levels + 1, tol.cluster_radius)?, &next.spectrum(tol.cluster_radius)?)?;
        out.push(Check::new("truncation_stability", gap, nt.powi(levels as i32 + 1) + 1e-9));
    } else {
        out.push(Check::skipped("fock_spectrum", "not a strict contraction"));
        out.push(Check::skipped("truncation_stability", "not a strict contraction"));
    }

    let mut r = rng(seed ^ 0x51f1_5eed);
    let (mut ccr, mut dual, mut lower) = (0.0_f64, true, 0.0_f64);
    for n in 0..=4 {
        let h: Vec<f64> = (0..d).map(|_| uniform(&mut r, -2.0, 2.0)).collect();
        let h2: f64 = h.iter().map(|x| x * x).sum();
        let up = tensor_fock::creation(&h, n, cap)?;
        let comm = tensor_fock::annihilation(&h, n + 2, cap)? * tensor_fock::creation(&h, n + 1, cap)?
            - tensor_fock::creation(&h, n, cap)? * tensor_fock::annihilation(&h, n + 1, cap)?;
        let k = comm.nrows();
        ccr = ccr.max(linalg::max_abs(&(comm - Mat::identity(k, k) * h2)));
        dual &= up == tensor_fock::annihilation(&h, n + 1, cap)?.transpose();
        for _ in 0..20 {
            let g = DVector::from_fn(up.ncols(), |_, _| uniform(&mut r, -1.0, 1.0));
            lower = lower.max(g.norm() * h2.sqrt() * (1.0 - 1e-12) - (&up * &g).norm());
        }
    }
    out.push(Check::new("commutation_relation", ccr, 1e-12));
    out.push(Check::flag("duality", dual));
    out.push(Check::new("creation_lower_bound", lower.max(0.0), 0.0));
    Ok(out)
}

/// Full suite for one model: Gramian, operator, and the Fock checks for
/// `T = S_mu(1)` (a contraction on `H_mu`).
pub fn model_suite(label: &str, model: &OUModel, opts: &SuiteOptions, tol: &Tolerances) -> Result<SuiteReport> {
    let mut checks = gramian_checks(model, opts, tol)?;
    if is_jordan_example(model) {
        checks.push(example_norm_curve(model, tol)?);
    }
    checks.extend(operator_checks(model, opts, tol)?);
    let q_inf = gramian::gramian_inf(model, tol)?;
    let factor = gramian::rkhs_factor(&q_inf, tol);
    if factor.rank > 0 {
        let t1 = gramian::smu_matrix(model, &factor, 1.0, tol)?;
        let t2 = gramian::smu_matrix(model, &factor, 0.5, tol)?;
        checks.extend(fock_checks(&t1, &t2, opts.levels, opts.seed, tol)?.into_iter().map(|mut c| {
            c.name = format!("fock.{}", c.name);
            c
        }));
    }
    Ok(SuiteReport::new(label, checks))
}

/// `count` random models of dimension `d`, cycling through the spectral kinds.
pub fn random_models(seed: u64, count: usize, d: usize, tol: &Tolerances) -> Result<Vec<(String, OUModel)>> {
    let mut r = rng(seed);
    (0..count)
        .map(|i| {
            let kind = SpectrumKind::ALL[i % 3];
            Ok((format!("random[{seed}:{i}:{kind:?}]"), random_model(&mut r, d, kind, tol)?))
        })
        .collect()
}

use std::fmt::Write;
use std::path::PathBuf;

use ou_spectra::gramian::{self, GramianReport, InvertibilityReport};
use ou_spectra::linalg;
use ou_spectra::verify;
use serde::Serialize;

use super::{sidecar_name, ModelEcho, Sink, SCHEMA};
use crate::error::{CliError, CliResult};
use crate::model_file::LoadedModel;

#[derive(Debug, Clone, Serialize)]
pub struct CurvePoint {
    pub t: f64,
    pub smu_norm: f64,
    /// `None` when `range(Q_inf)` is not contained in `range(Q_t)`.
    pub k: Option<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct CurveSection {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub csv: Option<String>,
    pub points: Vec<CurvePoint>,
    pub max_smu_norm: f64,
    pub strictly_contractive: bool,
    /// Largest deviation from `e^{-t}(t + sqrt(t^2 + 1))`, for the Jordan example only.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub closed_form_error: Option<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct GramianSection {
    #[serde(flatten)]
    pub report: GramianReport,
    pub kalman_rank: usize,
    pub rkhs_rank: usize,
    pub invertibility: InvertibilityReport,
}

#[derive(Debug, Clone, Serialize)]
pub struct SummaryCheck {
    pub name: String,
    pub pass: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct AnalyzeReport {
    pub schema: u32,
    pub command: &'static str,
    pub model: ModelEcho,
    pub tolerances: ou_spectra::Tolerances,
    pub gramian: GramianSection,
    pub contractivity: CurveSection,
    pub checks: Vec<SummaryCheck>,
    pub pass: bool,
}

pub fn curve_csv(points: &[CurvePoint]) -> String {
    let mut s = String::from("t,smu_norm,K\n");
    for p in points {
        let k = p.k.map_or_else(|| "inf".to_string(), |k| format!("{k:.17e}"));
        let _ = writeln!(s, "{:.17e},{:.17e},{k}", p.t, p.smu_norm);
    }
    s
}

pub fn build(m: &LoadedModel, grid: &[f64], csv: Option<String>) -> CliResult<AnalyzeReport> {
    let (model, tol) = (&m.model, &m.tol);
    let q_inf = gramian::gramian_inf(model, tol)?;
    let report = gramian::gramian_report(model, 1.0, tol)?;
    let factor = gramian::rkhs_factor(&q_inf, tol);
    let invertibility = gramian::invertibility_equivalence_report(model, tol)?;
    let kalman_rank = linalg::rank(&gramian::kalman_matrix(model), tol.rank_tol);

    let mut points = Vec::with_capacity(grid.len());
    for &t in grid {
        let smu_norm = gramian::smu_norm(model, &factor, t, tol)?;
        let k = gramian::contractivity_constant(model, t, tol)?;
        points.push(CurvePoint { t, smu_norm, k: k.is_finite().then_some(k) });
    }
    let max_smu_norm = points.iter().map(|p| p.smu_norm).fold(0.0, f64::max);
    let closed_form_error = verify::is_jordan_example(model).then(|| {
        points
            .iter()
            .map(|p| (p.smu_norm - (-p.t).exp() * (p.t + (p.t * p.t + 1.0).sqrt())).abs())
            .fold(0.0, f64::max)
    });

    let lyap = report.lyapunov_residual.unwrap_or(f64::INFINITY);
    let mut checks = vec![
        SummaryCheck { name: "lyapunov_residual".into(), pass: lyap <= tol.lyap_tol * (1.0 + linalg::norm2(model.q())) },
        SummaryCheck { name: "invertibility_equivalence".into(), pass: invertibility.agree },
        SummaryCheck { name: "smu_contraction".into(), pass: max_smu_norm <= 1.0 + 1e-12 },
    ];
    if let Some(err) = closed_form_error {
        checks.push(SummaryCheck { name: "example_closed_form".into(), pass: err <= 1e-8 });
    }
    let pass = checks.iter().all(|c| c.pass);
    Ok(AnalyzeReport {
        schema: SCHEMA,
        command: "analyze",
        model: ModelEcho::of(m),
        tolerances: *tol,
        gramian: GramianSection { report, kalman_rank, rkhs_rank: factor.rank, invertibility },
        contractivity: CurveSection {
            csv,
            max_smu_norm,
            strictly_contractive: points.iter().all(|p| p.smu_norm < 1.0),
            closed_form_error,
            points,
        },
        checks,
        pass,
    })
}

pub fn run(m: &LoadedModel, grid: &[f64], out: Option<PathBuf>) -> CliResult<()> {
    let sink = Sink { out };
    let csv_path = sink.sidecar_path("contractivity");
    let report = build(m, grid, sidecar_name(&csv_path))?;
    let g = &report.gramian.report;
    let mut summary = String::new();
    let _ = writeln!(summary, "model {} (d = {})", m.name, m.model.dim());
    let _ = writeln!(summary, "  spectral abscissa     {:.6}", g.spectral_abscissa);
    let _ = writeln!(summary, "  rank Q_inf            {} (invertible: {})", g.rank_q_inf, g.q_inf_invertible);
    let _ = writeln!(summary, "  strong Feller         {}", g.strong_feller);
    let _ = writeln!(summary, "  max ||S_mu(t)||       {:.10} over {} times", report.contractivity.max_smu_norm, grid.len());
    if let Some(e) = report.contractivity.closed_form_error {
        let _ = writeln!(summary, "  closed-form error     {e:.3e}");
    }
    for c in report.checks.iter().filter(|c| !c.pass) {
        let _ = writeln!(summary, "  FAILED {}", c.name);
    }
    let sidecars: Vec<(PathBuf, String)> = csv_path.into_iter().map(|p| (p, curve_csv(&report.contractivity.points))).collect();
    sink.emit(&report, &sidecars, &summary)?;
    if report.pass {
        Ok(())
    } else {
        Err(CliError::Invariant(format!("analysis checks failed for {}", m.name)))
    }
}

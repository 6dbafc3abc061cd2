use std::fmt::Write;
use std::path::PathBuf;

use ou_spectra::gramian;
use ou_spectra::linalg;
use ou_spectra::ou_operator::galerkin_spectrum;
use ou_spectra::spectra::{match_report, LatticeWindow, MatchReport, Point, SpectrumSet};
use ou_spectra::verify::predicted_spectrum;
use ou_spectra::OuError;
use serde::Serialize;

use super::{sidecar_name, ModelEcho, Sink, SCHEMA};
use crate::error::{CliError, CliResult};
use crate::model_file::LoadedModel;

#[derive(Debug, Clone)]
pub struct SpectrumArgs {
    pub degree: usize,
    pub re_min: Option<f64>,
    pub im_max: Option<f64>,
    pub tol: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct SpectrumSection {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub csv: Option<String>,
    pub points: Vec<Point>,
}

impl SpectrumSection {
    fn of(s: &SpectrumSet, csv: Option<String>) -> Self {
        Self { csv, points: s.representatives().into_iter().map(Point::from).collect() }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct WindowEcho {
    pub degree: usize,
    pub re_min: Option<f64>,
    pub im_max: Option<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct SpectrumReport {
    pub schema: u32,
    pub command: &'static str,
    pub model: ModelEcho,
    pub tolerances: ou_spectra::Tolerances,
    pub window: WindowEcho,
    pub drift_eigenvalues: Vec<Point>,
    pub predicted: SpectrumSection,
    pub galerkin: SpectrumSection,
    #[serde(rename = "match")]
    pub matching: MatchReport,
    pub pass: bool,
}

/// Stability and nondegeneracy of `mu`, named when they fail.
fn check_hypotheses(m: &LoadedModel) -> CliResult<()> {
    let q_inf = gramian::gramian_inf(&m.model, &m.tol).map_err(|e| match e {
        OuError::Unstable(_) => CliError::Numerical(format!("hypothesis failed: Unstable: {e}")),
        other => other.into(),
    })?;
    let rank = linalg::rank(&q_inf, m.tol.rank_tol);
    if rank < m.model.dim() {
        return Err(CliError::Numerical(format!(
            "hypothesis failed: DegenerateMeasure: rank Q_inf = {rank} < dimension {}",
            m.model.dim()
        )));
    }
    Ok(())
}

pub fn build(m: &LoadedModel, args: &SpectrumArgs, csv: (Option<String>, Option<String>)) -> CliResult<SpectrumReport> {
    if !(args.tol > 0.0) {
        return Err(CliError::Input(format!("--tol must be positive, got {}", args.tol)));
    }
    check_hypotheses(m)?;
    let window = LatticeWindow::new(
        args.re_min.unwrap_or(f64::NEG_INFINITY),
        args.im_max.unwrap_or(f64::INFINITY),
        args.degree,
    )?;
    let predicted = predicted_spectrum(&m.model, &window, &m.tol)?;
    // eigenvalues exactly on the window edge may be computed just outside it
    let computed = galerkin_spectrum(&m.model, args.degree, &m.tol)?.restrict(window.re_min - args.tol, window.im_max + args.tol);
    let matching = match_report(&computed, &predicted, args.tol);
    let drift = ou_spectra::spectra::eig(m.model.a())?;
    Ok(SpectrumReport {
        schema: SCHEMA,
        command: "spectrum",
        model: ModelEcho::of(m),
        tolerances: m.tol,
        window: WindowEcho { degree: args.degree, re_min: args.re_min, im_max: args.im_max },
        drift_eigenvalues: drift.points().iter().map(|&z| z.into()).collect(),
        predicted: SpectrumSection::of(&predicted, csv.0),
        galerkin: SpectrumSection::of(&computed, csv.1),
        pass: matching.pass,
        matching,
    })
}

pub fn run(m: &LoadedModel, args: &SpectrumArgs, out: Option<PathBuf>) -> CliResult<()> {
    let sink = Sink { out };
    let (pp, gp) = (sink.sidecar_path("predicted"), sink.sidecar_path("galerkin"));
    let report = build(m, args, (sidecar_name(&pp), sidecar_name(&gp)))?;
    let mut summary = String::new();
    let _ = writeln!(summary, "model {} (d = {}), degree {}", m.name, m.model.dim(), args.degree);
    let _ = writeln!(summary, "  predicted points      {}", report.predicted.points.len());
    let _ = writeln!(summary, "  Galerkin points       {}", report.galerkin.points.len());
    match report.matching.hausdorff {
        Some(h) => {
            let _ = writeln!(summary, "  Hausdorff distance    {h:.3e} (tol {:.1e})", args.tol);
        }
        None => {
            let _ = writeln!(summary, "  Hausdorff distance    undefined (one side empty)");
        }
    }
    let _ = writeln!(summary, "  {}", if report.pass { "PASS" } else { "FAIL" });
    let to_set = |pts: &[Point]| SpectrumSet::new(pts.iter().map(|&p| p.into()).collect(), m.tol.cluster_radius).to_csv();
    let mut sidecars = Vec::new();
    if let Some(p) = pp {
        sidecars.push((p, to_set(&report.predicted.points)));
    }
    if let Some(p) = gp {
        sidecars.push((p, to_set(&report.galerkin.points)));
    }
    sink.emit(&report, &sidecars, &summary)?;
    if report.pass {
        Ok(())
    } else {
        Err(CliError::Invariant(format!("Galerkin spectrum does not match the lattice within {}", args.tol)))
    }
}

use std::fmt::Write;
use std::path::PathBuf;

use ou_spectra::linalg::{self, Mat};
use ou_spectra::spectra::{hausdorff, Point, SpectrumSet};
use ou_spectra::tensor_fock::{full_second_quantization, predicted_fock_spectrum, second_quantization};
use ou_spectra::Tolerances;
use serde::Serialize;

use super::{sidecar_name, Sink, SCHEMA};
use crate::error::{CliError, CliResult};

/// Hausdorff bound for the three Fock spectra to count as equal.
pub const FOCK_MATCH_TOL: f64 = 1e-7;

#[derive(Debug, Clone, Serialize)]
pub struct FockSpectrum {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub csv: Option<String>,
    pub dim: usize,
    pub points: Vec<Point>,
}

#[derive(Debug, Clone, Serialize)]
pub struct Distances {
    pub symmetric_vs_predicted: f64,
    pub full_vs_predicted: f64,
    pub symmetric_vs_full: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct FockReport {
    pub schema: u32,
    pub command: &'static str,
    #[serde(rename = "T")]
    pub t: Vec<Vec<f64>>,
    pub norm: f64,
    pub levels: usize,
    pub symmetric: FockSpectrum,
    pub full: FockSpectrum,
    pub predicted: FockSpectrum,
    pub hausdorff: Distances,
    pub tol: f64,
    pub pass: bool,
}

fn section(s: &SpectrumSet, dim: usize, csv: Option<String>) -> FockSpectrum {
    FockSpectrum { csv, dim, points: s.representatives().into_iter().map(Point::from).collect() }
}

pub fn build(t: &Mat, levels: usize, allow_noncontraction: bool, tol: &Tolerances, csv: [Option<String>; 3]) -> CliResult<FockReport> {
    let sym = second_quantization(t, levels, allow_noncontraction, tol)?;
    let full = full_second_quantization(t, levels, allow_noncontraction, tol)?;
    let s_sym = sym.spectrum(tol.cluster_radius)?;
    let s_full = full.spectrum(tol.cluster_radius)?;
    let s_pred = predicted_fock_spectrum(t, levels, tol)?;
    let hausdorff = Distances {
        symmetric_vs_predicted: hausdorff(&s_sym, &s_pred)?,
        full_vs_predicted: hausdorff(&s_full, &s_pred)?,
        symmetric_vs_full: hausdorff(&s_sym, &s_full)?,
    };
    let worst = hausdorff.symmetric_vs_predicted.max(hausdorff.full_vs_predicted).max(hausdorff.symmetric_vs_full);
    let [c_sym, c_full, c_pred] = csv;
    Ok(FockReport {
        schema: SCHEMA,
        command: "fock",
        t: linalg::to_rows(t),
        norm: linalg::norm2(t),
        levels,
        symmetric: section(&s_sym, sym.dim(), c_sym),
        full: section(&s_full, full.dim(), c_full),
        predicted: section(&s_pred, s_pred.representatives().len(), c_pred),
        hausdorff,
        tol: FOCK_MATCH_TOL,
        pass: worst <= FOCK_MATCH_TOL,
    })
}

pub fn run(t: &Mat, levels: usize, allow_noncontraction: bool, tol: &Tolerances, out: Option<PathBuf>) -> CliResult<()> {
    let sink = Sink { out };
    let paths = [sink.sidecar_path("symmetric"), sink.sidecar_path("full"), sink.sidecar_path("predicted")];
    let report = build(t, levels, allow_noncontraction, tol, paths.clone().map(|p| sidecar_name(&p)))?;
    let mut summary = String::new();
    let _ = writeln!(summary, "T: {}x{}, ||T|| = {:.6}, levels 0..={levels}", t.nrows(), t.ncols(), report.norm);
    let _ = writeln!(summary, "  symmetric Fock dim    {}", report.symmetric.dim);
    let _ = writeln!(summary, "  full Fock dim         {}", report.full.dim);
    let _ = writeln!(summary, "  distinct eigenvalues  {}", report.symmetric.points.len());
    let h = &report.hausdorff;
    let _ = writeln!(summary, "  Hausdorff sym/pred    {:.3e}", h.symmetric_vs_predicted);
    let _ = writeln!(summary, "  Hausdorff full/pred   {:.3e}", h.full_vs_predicted);
    let _ = writeln!(summary, "  {}", if report.pass { "PASS" } else { "FAIL" });
    let to_csv = |s: &FockSpectrum| SpectrumSet::new(s.points.iter().map(|&p| p.into()).collect(), tol.cluster_radius).to_csv();
    let bodies = [to_csv(&report.symmetric), to_csv(&report.full), to_csv(&report.predicted)];
    let sidecars: Vec<(PathBuf, String)> = paths.into_iter().zip(bodies).filter_map(|(p, b)| p.map(|p| (p, b))).collect();
    sink.emit(&report, &sidecars, &summary)?;
    if report.pass {
        Ok(())
    } else {
        Err(CliError::Invariant(format!("Fock spectra disagree beyond {FOCK_MATCH_TOL}")))
    }
}

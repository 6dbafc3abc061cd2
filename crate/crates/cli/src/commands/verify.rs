use std::fmt::Write;
use std::path::PathBuf;

use ou_spectra::verify::{self, SuiteOptions, SuiteReport, UNTESTED_THEORY};
use ou_spectra::{OUModel, Tolerances};
use rayon::prelude::*;
use serde::Serialize;

use super::{Sink, SCHEMA};
use crate::error::{CliError, CliResult};

#[derive(Debug, Clone, Serialize)]
pub struct VerifyReport {
    pub schema: u32,
    pub command: &'static str,
    pub degree: usize,
    pub levels: usize,
    pub lattice_tol: f64,
    pub suites: Vec<SuiteReport>,
    pub failures: usize,
    pub pass: bool,
    pub untested_theory: Vec<&'static str>,
}

pub struct Target {
    pub label: String,
    pub model: OUModel,
    pub tol: Tolerances,
}

pub fn build(targets: &[Target], opts: &SuiteOptions) -> CliResult<VerifyReport> {
    let suites = targets
        .par_iter()
        .map(|t| verify::model_suite(&t.label, &t.model, opts, &t.tol))
        .collect::<Result<Vec<_>, _>>()?;
    let failures = suites.iter().map(|s| s.failures().count()).sum();
    Ok(VerifyReport {
        schema: SCHEMA,
        command: "verify",
        degree: opts.degree,
        levels: opts.levels,
        lattice_tol: opts.lattice_tol,
        pass: failures == 0,
        failures,
        suites,
        untested_theory: UNTESTED_THEORY.to_vec(),
    })
}

pub fn run(targets: &[Target], opts: &SuiteOptions, out: Option<PathBuf>) -> CliResult<()> {
    let report = build(targets, opts)?;
    let mut summary = String::new();
    for s in &report.suites {
        let run = s.checks.iter().filter(|c| !c.skipped).count();
        let skipped = s.checks.len() - run;
        let _ = writeln!(summary, "{} {} ({} checks, {} skipped)", if s.pass { "PASS" } else { "FAIL" }, s.label, run, skipped);
        for c in s.failures() {
            let _ = writeln!(summary, "    {} residual {:.3e} > tol {:.1e}", c.name, c.residual, c.tol);
        }
    }
    let _ = writeln!(summary, "untested theory:");
    for item in UNTESTED_THEORY {
        let _ = writeln!(summary, "    {item}");
    }
    Sink { out }.emit(&report, &[], &summary)?;
    if report.pass {
        Ok(())
    } else {
        let list: Vec<String> = report
            .suites
            .iter()
            .flat_map(|s| s.failures().map(move |c| format!("{}: {} (residual {:.3e})", s.label, c.name, c.residual)))
            .collect();
        Err(CliError::Invariant(list.join("; ")))
    }
}

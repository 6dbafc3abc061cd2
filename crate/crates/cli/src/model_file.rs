use std::path::Path;

use ou_spectra::linalg::{self, Mat};
use ou_spectra::{OUModel, TolProfile, Tolerances};
use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use crate::error::{CliError, CliResult};
use crate::io::read_to_string;

/// On-disk model: row-major `A` and `Q`, optional name and tolerance overrides.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    #[serde(rename = "A")]
    pub a: Vec<Vec<f64>>,
    #[serde(rename = "Q")]
    pub q: Vec<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tolerances: Option<Map<String, Value>>,
}

/// A validated model together with the tolerances it was validated under.
#[derive(Debug, Clone)]
pub struct LoadedModel {
    pub name: String,
    pub file: ModelFile,
    pub model: OUModel,
    pub tol: Tolerances,
}

/// Tolerances from the environment profile, then `overrides`.
pub fn resolve_tolerances(overrides: Option<&Map<String, Value>>) -> CliResult<Tolerances> {
    let profile = TolProfile::from_env().map_err(CliError::Input)?;
    let base = Tolerances::for_profile(profile);
    let Some(over) = overrides else { return Ok(base) };
    let Value::Object(mut merged) = serde_json::to_value(base).unwrap_or_else(|_| unreachable!()) else {
        unreachable!()
    };
    for (k, v) in over {
        if !merged.contains_key(k) {
            return Err(CliError::Input(format!("unknown tolerance {k:?}")));
        }
        merged.insert(k.clone(), v.clone());
    }
    let tol: Tolerances =
        serde_json::from_value(Value::Object(merged)).map_err(|e| CliError::Input(format!("bad tolerances: {e}")))?;
    let floats = [tol.sym_tol, tol.psd_tol, tol.lyap_tol, tol.rank_tol, tol.inv_tol, tol.stab_tol, tol.cluster_radius, tol.contraction_tol];
    if floats.iter().any(|x| !(x.is_finite() && *x >= 0.0)) {
        return Err(CliError::Input("tolerances must be finite and nonnegative".into()));
    }
    Ok(tol)
}

pub fn parse_model(text: &str, fallback_name: &str) -> CliResult<LoadedModel> {
    let file: ModelFile = serde_json::from_str(text).map_err(|e| CliError::Input(format!("model file: {e}")))?;
    let tol = resolve_tolerances(file.tolerances.as_ref())?;
    let model = OUModel::from_rows(&file.a, &file.q, &tol)?;
    let name = file.name.clone().unwrap_or_else(|| fallback_name.to_string());
    Ok(LoadedModel { name, file, model, tol })
}

pub fn load_model(path: &Path) -> CliResult<LoadedModel> {
    let stem = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    parse_model(&read_to_string(path)?, &stem)
}

#[derive(Deserialize)]
#[serde(untagged)]
enum MatrixFile {
    Wrapped {
        #[serde(rename = "T")]
        t: Vec<Vec<f64>>,
    },
    Bare(Vec<Vec<f64>>),
}

/// A square matrix stored as `{"T": [[..], ..]}` or as a bare nested array.
pub fn parse_matrix(text: &str) -> CliResult<Mat> {
    let rows = match serde_json::from_str::<MatrixFile>(text) {
        Ok(MatrixFile::Wrapped { t }) | Ok(MatrixFile::Bare(t)) => t,
        Err(e) => return Err(CliError::Input(format!("matrix file: {e}"))),
    };
    let m = linalg::from_rows(&rows)?;
    if m.nrows() != m.ncols() || m.is_empty() {
        return Err(CliError::Input(format!("matrix must be square and nonempty, got {}x{}", m.nrows(), m.ncols())));
    }
    Ok(m)
}

pub fn load_matrix(path: &Path) -> CliResult<Mat> {
    parse_matrix(&read_to_string(path)?)
}

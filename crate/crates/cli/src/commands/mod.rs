pub mod analyze;
pub mod fock;
pub mod spectrum;
pub mod verify;

use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::error::CliResult;
use crate::io::{sidecar, to_json, write_atomic};

pub const SCHEMA: u32 = 1;

/// Model echo shared by the reports.
#[derive(Debug, Clone, Serialize)]
pub struct ModelEcho {
    pub name: String,
    pub dim: usize,
    #[serde(rename = "A")]
    pub a: Vec<Vec<f64>>,
    #[serde(rename = "Q")]
    pub q: Vec<Vec<f64>>,
}

impl ModelEcho {
    pub fn of(m: &crate::model_file::LoadedModel) -> Self {
        Self { name: m.name.clone(), dim: m.model.dim(), a: m.file.a.clone(), q: m.file.q.clone() }
    }
}

/// Where a command sends its machine output.
pub struct Sink {
    pub out: Option<PathBuf>,
}

impl Sink {
    /// Sidecar file name for `tag`, if files are being written.
    pub fn sidecar_path(&self, tag: &str) -> Option<PathBuf> {
        self.out.as_deref().map(|o| sidecar(o, tag))
    }

    /// With `--out`: writes the sidecars and the report, and returns the
    /// human summary for stdout. Without: the report goes to stdout and the
    /// summary to stderr.
    pub fn emit<T: Serialize>(&self, report: &T, sidecars: &[(PathBuf, String)], summary: &str) -> CliResult<()> {
        match &self.out {
            Some(path) => {
                for (p, body) in sidecars {
                    write_atomic(p, body.as_bytes())?;
                }
                write_atomic(path, to_json(report).as_bytes())?;
                stdout(&format!("{summary}report written to {}\n", path.display()));
            }
            None => {
                eprint!("{summary}");
                stdout(&to_json(report));
            }
        }
        Ok(())
    }
}

/// Writes to stdout; a closed pipe (`| head`) is not an error.
fn stdout(text: &str) {
    use std::io::Write;
    let mut out = std::io::stdout().lock();
    let _ = out.write_all(text.as_bytes()).and_then(|()| out.flush());
}

pub fn sidecar_name(path: &Option<PathBuf>) -> Option<String> {
    path.as_deref().map(crate::io::file_name)
}

pub fn fmt_path(p: &Path) -> String {
    p.display().to_string()
}

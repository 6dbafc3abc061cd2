//! Numerical tolerances used across the crate.
//!
//! Every threshold that drives a branch (symmetry, definiteness, rank,
//! stability, clustering) lives here so a caller can see and override it
//! in one place.

use serde::{Deserialize, Serialize};

/// Tolerance record. All fields have documented defaults, see [`Tolerances::default`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct Tolerances {
    /// Max entrywise asymmetry `max|Q - Q^T|` accepted for the diffusion.
    pub sym_tol: f64,
    /// Smallest eigenvalue of `Q` must be at least `-psd_tol`.
    pub psd_tol: f64,
    /// Lyapunov residual bound, relative to `1 + ||Q||`.
    pub lyap_tol: f64,
    /// A singular value `s` counts as zero iff `s <= rank_tol * s_max`.
    pub rank_tol: f64,
    /// Bound on the residual `||(I - P) e^{tA} i_mu||` for range invariance.
    pub inv_tol: f64,
    /// `Unstable` is raised when the spectral abscissa is `>= -stab_tol`.
    pub stab_tol: f64,
    /// Single-linkage radius for spectral set semantics.
    pub cluster_radius: f64,
    /// Slack on `||T|| <= 1` for contraction checks.
    pub contraction_tol: f64,
    /// Largest matrix side any constructor may allocate.
    pub size_cap: usize,
    /// Largest number of points an enumeration may produce.
    pub enum_cap: usize,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            sym_tol: 1e-10,
            psd_tol: 1e-10,
            lyap_tol: 1e-10,
            rank_tol: 1e-10,
            inv_tol: 1e-8,
            stab_tol: 1e-8,
            cluster_radius: 1e-7,
            contraction_tol: 1e-12,
            size_cap: 4096,
            enum_cap: 1_000_000,
        }
    }
}

/// Named presets selectable through `OU_SPECTRA_TOL_PROFILE`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TolProfile {
    Strict,
    Default,
    Loose,
}

impl TolProfile {
    pub const ENV_VAR: &'static str = "OU_SPECTRA_TOL_PROFILE";

    pub fn parse(s: &str) -> Option<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "strict" => Some(Self::Strict),
            "default" | "" => Some(Self::Default),
            "loose" => Some(Self::Loose),
            _ => None,
        }
    }

    /// Reads the profile from the environment; unset means `Default`.
    pub fn from_env() -> std::result::Result<Self, String> {
        match std::env::var(Self::ENV_VAR) {
            Ok(v) => Self::parse(&v)
                .ok_or_else(|| format!("{}={v:?} is not one of strict, default, loose", Self::ENV_VAR)),
            Err(_) => Ok(Self::Default),
        }
    }

    fn scale(self) -> f64 {
        match self {
            Self::Strict => 1e-2,
            Self::Default => 1.0,
            Self::Loose => 1e2,
        }
    }
}

impl Tolerances {
    /// Default tolerances with every floating threshold scaled by the profile
    /// (strict: x0.01, loose: x100). Caps are unchanged.
    pub fn for_profile(profile: TolProfile) -> Self {
        let s = profile.scale();
        let d = Self::default();
        Self {
            sym_tol: d.sym_tol * s,
            psd_tol: d.psd_tol * s,
            lyap_tol: d.lyap_tol * s,
            rank_tol: d.rank_tol * s,
            inv_tol: d.inv_tol * s,
            stab_tol: d.stab_tol * s,
            cluster_radius: d.cluster_radius * s,
            contraction_tol: d.contraction_tol * s,
            ..d
        }
    }
}

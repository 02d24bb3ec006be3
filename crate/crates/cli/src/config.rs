//! Versioned JSON run configuration. Unknown keys are rejected everywhere.

use std::path::Path;

use mfunclab::numkit::{CMatrix, DEFAULT_GRID_N, ODE_TOL};
use mfunclab::odelab::{Coefficients, Cplx};
use mfunclab::triplet::{BoundaryRealization, LambdaWindow, SubspaceRealization};
use mfunclab::C64;
use serde::{Deserialize, Serialize};

use crate::error::CliError;

pub const CONFIG_SCHEMA: &str = "mfunclab.config/1";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Config {
    pub schema: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub coefficients: Option<Coefficients>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub realization: Option<RealizationSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub window: Option<WindowSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grid_n: Option<usize>,
    #[serde(default)]
    pub tolerances: Tolerances,
    #[serde(default)]
    pub outputs: Outputs,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub twin: Option<TwinSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub krein: Option<KreinSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub halfspace: Option<HalfspaceSpec>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", deny_unknown_fields)]
pub enum RealizationSpec {
    /// `Γ₁u = BΓ₀u`, `entries` given row by row.
    #[serde(rename = "matrixB")]
    MatrixB { entries: Vec<Vec<Cplx>> },
    #[serde(rename = "subspace")]
    Subspace {
        #[serde(rename = "selX")]
        sel_x: Vec<u8>,
        #[serde(rename = "selY")]
        sel_y: Vec<u8>,
        #[serde(rename = "L1")]
        l1: Vec<Vec<Cplx>>,
    },
}

fn matrix_from_rows(rows: &[Vec<Cplx>], what: &str) -> Result<CMatrix, CliError> {
    let r = rows.len();
    let c = rows.first().map_or(0, |row| row.len());
    if rows.iter().any(|row| row.len() != c) {
        return Err(CliError::Config(format!("{what}: ragged rows")));
    }
    let data: Vec<C64> = rows.iter().flatten().map(|z| z.0).collect();
    CMatrix::new(r, c, data).map_err(|e| CliError::Config(format!("{what}: {e}")))
}

fn selector(v: &[u8], what: &str) -> Result<Vec<bool>, CliError> {
    v.iter()
        .map(|&s| match s {
            0 => Ok(false),
            1 => Ok(true),
            _ => Err(CliError::Config(format!("{what} entries must be 0 or 1"))),
        })
        .collect()
}

impl RealizationSpec {
    pub fn neumann() -> Self {
        RealizationSpec::MatrixB { entries: vec![vec![Cplx::from(0.0); 2]; 2] }
    }

    pub fn to_realization(&self) -> Result<BoundaryRealization, CliError> {
        let r = match self {
            RealizationSpec::MatrixB { entries } => BoundaryRealization::Matrix(matrix_from_rows(entries, "matrixB")?),
            RealizationSpec::Subspace { sel_x, sel_y, l1 } => {
                let l1 = if l1.is_empty() { CMatrix::zeros(0, 0) } else { matrix_from_rows(l1, "L1")? };
                let s = SubspaceRealization::new(selector(sel_x, "selX")?, selector(sel_y, "selY")?, l1)
                    .map_err(|e| CliError::Config(e.to_string()))?;
                BoundaryRealization::Subspace(s)
            }
        };
        r.validate(2).map_err(|e| CliError::Config(e.to_string()))?;
        Ok(r)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WindowSpec {
    pub re_min: f64,
    pub re_max: f64,
    pub im_min: f64,
    pub im_max: f64,
    pub n_re: usize,
    pub n_im: usize,
}

impl WindowSpec {
    pub fn to_window(&self) -> Result<LambdaWindow, CliError> {
        let w = LambdaWindow {
            re_min: self.re_min,
            re_max: self.re_max,
            im_min: self.im_min,
            im_max: self.im_max,
            n_re: self.n_re,
            n_im: self.n_im,
        };
        w.validate().map_err(|e| CliError::Config(e.to_string()))?;
        Ok(w)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Tolerances {
    pub ode_tol: f64,
    pub den_eps: f64,
    pub tube_eps: f64,
    /// Relative determinant level below which a scan point is spectral.
    pub flag_rel: f64,
    /// Pass level for the twin comparison.
    pub m_diff_tol: f64,
    pub hausdorff_threshold: f64,
    /// Pass level for the Kreĭn verification.
    pub krein_tol: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            ode_tol: ODE_TOL,
            den_eps: 1e-10,
            tube_eps: 0.05,
            flag_rel: 1e-8,
            m_diff_tol: 1e-8,
            hausdorff_threshold: 0.1,
            krein_tol: 1e-5,
        }
    }
}

/// File names, relative to `--out`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Outputs {
    pub scan_csv: String,
    pub scan_summary: String,
    pub twins: String,
    pub krein: String,
    pub halfspace_csv: String,
}

impl Default for Outputs {
    fn default() -> Self {
        Self {
            scan_csv: "scan.csv".into(),
            scan_summary: "scan_summary.json".into(),
            twins: "twins.json".into(),
            krein: "krein.json".into(),
            halfspace_csv: "halfspace.csv".into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TwinSpec {
    pub interval: [f64; 2],
    pub bump_height: Cplx,
    /// λ-grid for the M comparison; defaults to the main window.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub window: Option<WindowSpec>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct KreinSpec {
    pub lambdas: Vec<Cplx>,
    pub n_trials: usize,
    #[serde(default = "default_resample_radius")]
    pub resample_radius: f64,
}

fn default_resample_radius() -> f64 {
    0.1
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Range {
    pub min: f64,
    pub max: f64,
    pub n: usize,
}

impl Range {
    pub fn values(&self) -> Vec<f64> {
        match self.n {
            0 => vec![],
            1 => vec![self.min],
            n => (0..n).map(|k| self.min + (self.max - self.min) * k as f64 / (n - 1) as f64).collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HalfspaceSpec {
    pub rho: Range,
    pub arg_mu: Range,
    pub abs_mu: Range,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bvec: Option<Vec<f64>>,
    #[serde(default)]
    pub direction: usize,
    /// Scalar `c(ξ′)` used when `bvec` is absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub symbol_c: Option<Cplx>,
}

impl Default for HalfspaceSpec {
    fn default() -> Self {
        Self {
            rho: Range { min: 0.0, max: 2.0, n: 32 },
            arg_mu: Range { min: -0.7, max: 0.7, n: 8 },
            abs_mu: Range { min: 0.5, max: 2.0, n: 8 },
            bvec: None,
            direction: 0,
            symbol_c: None,
        }
    }
}

impl Config {
    pub fn empty() -> Self {
        Self {
            schema: CONFIG_SCHEMA.into(),
            coefficients: None,
            realization: None,
            window: None,
            grid_n: None,
            tolerances: Tolerances::default(),
            outputs: Outputs::default(),
            twin: None,
            krein: None,
            halfspace: None,
        }
    }

    pub fn parse(text: &str) -> Result<Self, CliError> {
        let cfg: Config = serde_json::from_str(text).map_err(|e| CliError::Config(e.to_string()))?;
        if cfg.schema != CONFIG_SCHEMA {
            return Err(CliError::Config(format!("unsupported schema {:?}, expected {CONFIG_SCHEMA:?}", cfg.schema)));
        }
        if let Some(n) = cfg.grid_n {
            if n < 9 || n % 2 == 0 {
                return Err(CliError::Config(format!("grid_n = {n}: need an odd number >= 9")));
            }
        }
        if let Some(w) = &cfg.window {
            w.to_window()?;
        }
        if let Some(r) = &cfg.realization {
            r.to_realization()?;
        }
        let t = &cfg.tolerances;
        if ![t.ode_tol, t.den_eps, t.flag_rel, t.m_diff_tol, t.krein_tol].iter().all(|v| v.is_finite() && *v > 0.0)
            || !(t.tube_eps.is_finite() && t.tube_eps >= 0.0)
            || !t.hausdorff_threshold.is_finite()
        {
            return Err(CliError::Config("tolerances must be finite and positive".into()));
        }
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn grid_n(&self) -> usize {
        self.grid_n.unwrap_or(DEFAULT_GRID_N)
    }

    pub fn coefficients(&self) -> Result<&Coefficients, CliError> {
        self.coefficients.as_ref().ok_or_else(|| CliError::Config("missing `coefficients`".into()))
    }

    pub fn realization(&self) -> Result<BoundaryRealization, CliError> {
        self.realization.clone().unwrap_or_else(RealizationSpec::neumann).to_realization()
    }

    pub fn window(&self) -> Result<LambdaWindow, CliError> {
        self.window.as_ref().ok_or_else(|| CliError::Config("missing `window`".into()))?.to_window()
    }
}

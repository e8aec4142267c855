//! Run configuration: one serializable struct drives every CLI entry point.
//!
//! All fields have defaults, so a config deserialized from an empty object is
//! usable. Validation reports the offending field by name. Study runners fill
//! empty parameter lists with their pinned default grids before validation,
//! so the manifest always records the grids that actually ran.

use crate::error::{Error, Result};
use crate::minimize::MinimizeParams;
use crate::noise::{EnsembleKind, EnsembleSpec, TransformId};
use crate::grid::Grid;
use serde::{Deserialize, Serialize};
use std::path::PathBuf;

/// Noise ensemble selection.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(default)]
pub struct EnsembleConfig {
    pub kind: EnsembleKind,
    /// Approximation scale; 0 means none and is only valid for white noise.
    pub ell: f64,
    /// Cell transform for the non-Gaussian lattice family.
    pub transform: TransformId,
}

impl Default for EnsembleConfig {
    fn default() -> Self {
        EnsembleConfig { kind: EnsembleKind::White, ell: 0.0, transform: TransformId::SinShift }
    }
}

impl EnsembleConfig {
    /// Build the concrete sampler on `grid` with `samples` draws.
    pub fn spec(&self, grid: Grid, seed: u64, samples: usize) -> Result<EnsembleSpec> {
        EnsembleSpec::new(self.kind, grid, self.ell, self.transform, seed, samples)
    }
}

/// Descent solver settings; mirrors [`MinimizeParams`] minus the dump path.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(default)]
pub struct SolverConfig {
    pub tau: f64,
    pub max_iters: usize,
    pub residual_tol: f64,
    pub backtrack: f64,
    pub patience: usize,
}

impl Default for SolverConfig {
    fn default() -> Self {
        let p = MinimizeParams::default();
        SolverConfig {
            tau: p.tau,
            max_iters: p.max_iters,
            residual_tol: p.residual_tol,
            backtrack: p.backtrack,
            patience: p.patience,
        }
    }
}

impl SolverConfig {
    pub fn params(&self) -> MinimizeParams {
        MinimizeParams {
            tau: self.tau,
            max_iters: self.max_iters,
            residual_tol: self.residual_tol,
            backtrack: self.backtrack,
            patience: self.patience,
            abort_dump: None,
        }
    }
}

/// Full run configuration. Serialized verbatim (with defaults applied) into
/// every run manifest.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(default)]
pub struct RunConfig {
    pub n1: usize,
    pub n2: usize,
    pub seed: u64,
    pub samples: usize,
    /// Exponent offset for near-critical scans; must sit in (0, 0.24).
    pub epsilon: f64,
    /// Construction scales t for the nonlinear forcing ladder.
    pub t_list: Vec<f64>,
    /// Smoothing scales T for small-scale moment studies.
    pub big_t_list: Vec<f64>,
    /// Approximation scales for ensemble ladders.
    pub ell_list: Vec<f64>,
    /// Grid sizes for resolution scans.
    pub n_list: Vec<usize>,
    pub ensemble: EnsembleConfig,
    pub solver: SolverConfig,
    /// Study name this config drove, echoed into the manifest.
    pub study: Option<String>,
    pub out_dir: PathBuf,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            n1: 64,
            n2: 64,
            seed: 0,
            samples: 64,
            epsilon: 0.05,
            t_list: Vec::new(),
            big_t_list: Vec::new(),
            ell_list: Vec::new(),
            n_list: Vec::new(),
            ensemble: EnsembleConfig::default(),
            solver: SolverConfig::default(),
            study: None,
            out_dir: PathBuf::from("runs"),
        }
    }
}

fn config_err(field: &str, reason: impl Into<String>) -> Error {
    Error::Config { field: field.into(), reason: reason.into() }
}

fn check_grid_side(field: &'static str, n: usize) -> Result<()> {
    if n < 8 || n % 2 != 0 {
        return Err(config_err(field, format!("must be even and at least 8, got {n}")));
    }
    Ok(())
}

impl RunConfig {
    /// Validate every field; the error names the first offending field.
    pub fn validate(&self) -> Result<()> {
        check_grid_side("n1", self.n1)?;
        check_grid_side("n2", self.n2)?;
        if self.samples == 0 {
            return Err(config_err("samples", "must be positive"));
        }
        if !(self.epsilon > 0.0 && self.epsilon < 0.24) {
            return Err(config_err(
                "epsilon",
                format!("must lie strictly inside (0, 0.24), got {}", self.epsilon),
            ));
        }
        for &t in &self.t_list {
            if !(t > 0.0 && t.is_finite()) {
                return Err(config_err("t_list", format!("scales must be positive, got {t}")));
            }
        }
        for &t in &self.big_t_list {
            if !(t > 0.0 && t.is_finite()) {
                return Err(config_err("big_t_list", format!("scales must be positive, got {t}")));
            }
        }
        for &l in &self.ell_list {
            if !(l > 0.0 && l.is_finite()) {
                return Err(config_err("ell_list", format!("scales must be positive, got {l}")));
            }
        }
        for &n in &self.n_list {
            check_grid_side("n_list", n)?;
        }
        if !(self.ensemble.ell >= 0.0 && self.ensemble.ell.is_finite()) {
            return Err(config_err(
                "ensemble.ell",
                format!("must be finite and nonnegative, got {}", self.ensemble.ell),
            ));
        }
        if self.ensemble.kind == EnsembleKind::White && self.ensemble.ell != 0.0 {
            return Err(config_err(
                "ensemble.ell",
                "white noise takes no approximation scale; set ell = 0",
            ));
        }
        if self.ensemble.kind != EnsembleKind::White && self.ensemble.ell <= 0.0 {
            return Err(config_err(
                "ensemble.ell",
                "approximating ensembles need a positive scale",
            ));
        }
        self.solver.params().validate().map_err(|e| match e {
            Error::InvalidParameter { name, reason } => {
                config_err(&format!("solver.{name}"), reason)
            }
            other => other,
        })?;
        Ok(())
    }

    /// The working grid.
    pub fn grid(&self) -> Result<Grid> {
        Grid::new(self.n1, self.n2)
    }
}

/// Dyadic scales `2^{-a}, ..., 2^{-b}` (inclusive, descending).
pub fn dyadic_scales(a: u32, b: u32) -> Vec<f64> {
    assert!(a <= b);
    (a..=b).map(|j| (2.0f64).powi(-(j as i32))).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_config_validates() {
        RunConfig::default().validate().unwrap();
    }

    #[test]
    fn empty_json_deserializes_to_defaults() {
        let cfg: RunConfig = serde_json::from_str("{}").unwrap();
        cfg.validate().unwrap();
        assert_eq!(cfg.n1, 64);
        assert_eq!(cfg.epsilon, 0.05);
    }

    #[test]
    fn validation_names_the_offending_field() {
        let mut cfg = RunConfig { n1: 63, ..RunConfig::default() };
        match cfg.validate() {
            Err(Error::Config { field, .. }) => assert_eq!(field, "n1"),
            other => panic!("expected config error, got {other:?}"),
        }
        cfg.n1 = 64;
        cfg.epsilon = 0.3;
        match cfg.validate() {
            Err(Error::Config { field, .. }) => assert_eq!(field, "epsilon"),
            other => panic!("expected config error, got {other:?}"),
        }
        cfg.epsilon = 0.05;
        cfg.n_list = vec![64, 10, 7];
        match cfg.validate() {
            Err(Error::Config { field, .. }) => assert_eq!(field, "n_list"),
            other => panic!("expected config error, got {other:?}"),
        }
        cfg.n_list.clear();
        cfg.solver.tau = -1.0;
        match cfg.validate() {
            Err(Error::Config { field, .. }) => assert_eq!(field, "solver.tau"),
            other => panic!("expected config error, got {other:?}"),
        }
    }

    #[test]
    fn ensemble_scale_rules() {
        let mut cfg = RunConfig::default();
        cfg.ensemble.kind = EnsembleKind::GaussianMollified;
        assert!(cfg.validate().is_err());
        cfg.ensemble.ell = 0.125;
        cfg.validate().unwrap();
        cfg.ensemble.kind = EnsembleKind::White;
        assert!(cfg.validate().is_err());
    }

    #[test]
    fn dyadic_scales_descend() {
        let s = dyadic_scales(2, 5);
        assert_eq!(s, vec![0.25, 0.125, 0.0625, 0.03125]);
    }
}

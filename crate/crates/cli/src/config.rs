use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use qfm_core::greens::{DEFAULT_BETA, DEFAULT_DT, DEFAULT_ETA, DEFAULT_T_MAX};
use qfm_core::oracle::InitialState;
use qfm_core::qfm::{FockLabel, LatticeGeometry, Spin};

use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TauGrid {
    pub start: f64,
    pub stop: f64,
    pub step: f64,
}

impl TauGrid {
    pub fn points(&self) -> Vec<f64> {
        let count = ((self.stop - self.start) / self.step + 1e-9).floor() as usize;
        (0..=count).map(|k| self.start + k as f64 * self.step).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Fourier {
    pub eta: f64,
    pub t_max: f64,
    pub dt: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Observable {
    Populations,
    LesserGf,
    RetardedGf,
    Spectral,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct GfPair {
    pub i: usize,
    pub j: usize,
    pub spin: Spin,
}

/// Parses `"i,j,spin;i,j,spin;…"`.
pub fn parse_pairs(text: &str) -> Result<Vec<GfPair>, CliError> {
    text.split(';')
        .filter(|s| !s.trim().is_empty())
        .map(|item| {
            let parts: Vec<&str> = item.split(',').map(str::trim).collect();
            let bad = || CliError::Config(format!("pairs: '{item}' is not 'i,j,spin'"));
            if parts.len() != 3 {
                return Err(bad());
            }
            Ok(GfPair {
                i: parts[0].parse().map_err(|_| bad())?,
                j: parts[1].parse().map_err(|_| bad())?,
                spin: parts[2].parse().map_err(|_| bad())?,
            })
        })
        .collect()
}

/// Everything a run needs. Loaded from an optional JSON file, then
/// overridden field by field from the command line.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub geometry: String,
    #[serde(rename = "J")]
    pub j: f64,
    pub v: f64,
    /// Defaults to alternating `u,d,u,…`.
    pub init: Option<String>,
    pub tau_grid: TauGrid,
    pub trotter_steps: usize,
    pub observables: Vec<Observable>,
    /// Defaults to every diagonal pair.
    pub gf_pairs: Option<Vec<GfPair>>,
    pub fourier: Fourier,
    pub beta: f64,
    pub output_dir: PathBuf,
    pub seed: u64,
    pub baseline: bool,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            geometry: "chain:2".into(),
            j: 1.0,
            v: 2.0,
            init: None,
            tau_grid: TauGrid { start: 0.5, stop: 5.0, step: 0.5 },
            trotter_steps: 30,
            observables: vec![Observable::Populations, Observable::LesserGf],
            gf_pairs: None,
            fourier: Fourier { eta: DEFAULT_ETA, t_max: DEFAULT_T_MAX, dt: DEFAULT_DT },
            beta: DEFAULT_BETA,
            output_dir: PathBuf::from("out"),
            seed: 0,
            baseline: false,
        }
    }
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("config: cannot read {}: {e}", path.display())))?;
        serde_json::from_str(&text).map_err(|e| CliError::Config(format!("config: {}: {e}", path.display())))
    }

    pub fn geometry(&self) -> Result<LatticeGeometry, CliError> {
        self.geometry.parse().map_err(|e| CliError::Config(format!("geometry: {e}")))
    }

    pub fn initial_state(&self) -> Result<InitialState, CliError> {
        let sites = self.geometry()?.site_count;
        let init = match &self.init {
            Some(text) => text.parse::<InitialState>().map_err(|e| CliError::Config(format!("init: {e}")))?,
            None => InitialState::new(
                (0..sites).map(|m| if m % 2 == 0 { FockLabel::Up } else { FockLabel::Down }).collect(),
            )
            .map_err(|e| CliError::Config(format!("init: {e}")))?,
        };
        if init.len() != sites {
            return Err(CliError::Config(format!("init: {} site tokens for a {sites}-site lattice", init.len())));
        }
        Ok(init)
    }

    pub fn pairs(&self) -> Result<Vec<GfPair>, CliError> {
        let sites = self.geometry()?.site_count;
        let pairs = match &self.gf_pairs {
            Some(p) => p.clone(),
            None => (1..=sites).flat_map(|m| Spin::BOTH.map(|spin| GfPair { i: m, j: m, spin })).collect(),
        };
        for p in &pairs {
            if p.i == 0 || p.j == 0 || p.i > sites || p.j > sites {
                return Err(CliError::Config(format!("pairs: ({},{}) outside sites 1..={sites}", p.i, p.j)));
            }
        }
        Ok(pairs)
    }

    /// Field-level sanity checks shared by every subcommand.
    pub fn validate(&self) -> Result<(), CliError> {
        self.geometry()?;
        let finite = |name: &str, x: f64| {
            if x.is_finite() {
                Ok(())
            } else {
                Err(CliError::Config(format!("{name}: must be finite")))
            }
        };
        finite("J", self.j)?;
        finite("v", self.v)?;
        let g = &self.tau_grid;
        finite("tau_grid.start", g.start)?;
        finite("tau_grid.stop", g.stop)?;
        if !(g.step > 0.0) || !g.step.is_finite() {
            return Err(CliError::Config(format!("tau_grid.step: must be positive, got {}", g.step)));
        }
        if g.stop < g.start {
            return Err(CliError::Config(format!("tau_grid.stop: {} is below start {}", g.stop, g.start)));
        }
        if self.trotter_steps == 0 {
            return Err(CliError::Config("trotter_steps: must be at least 1".into()));
        }
        let f = &self.fourier;
        if !(f.eta > 0.0) {
            return Err(CliError::Config(format!("fourier.eta: must be positive, got {}", f.eta)));
        }
        if !(f.dt > 0.0) {
            return Err(CliError::Config(format!("fourier.dt: must be positive, got {}", f.dt)));
        }
        if !(f.t_max > 0.0) {
            return Err(CliError::Config(format!("fourier.t_max: must be positive, got {}", f.t_max)));
        }
        if self.beta.is_nan() || self.beta < 0.0 {
            return Err(CliError::Config(format!("beta: must be non-negative, got {}", self.beta)));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pairs_grammar() {
        let pairs = parse_pairs("1,1,up;2,3,d").unwrap();
        assert_eq!(pairs, vec![GfPair { i: 1, j: 1, spin: Spin::Up }, GfPair { i: 2, j: 3, spin: Spin::Down }]);
        assert!(parse_pairs("1,1").is_err());
        assert!(parse_pairs("1,x,up").is_err());
    }

    #[test]
    fn tau_grid_points_include_stop() {
        let g = TauGrid { start: 0.5, stop: 5.0, step: 0.5 };
        let pts = g.points();
        assert_eq!(pts.len(), 10);
        assert_eq!(*pts.last().unwrap(), 5.0);
    }

    #[test]
    fn defaults_are_valid_and_round_trip() {
        let cfg = RunConfig::default();
        cfg.validate().unwrap();
        let back: RunConfig = serde_json::from_str(&serde_json::to_string(&cfg).unwrap()).unwrap();
        assert_eq!(back, cfg);
        assert_eq!(cfg.initial_state().unwrap().to_string(), "u,d");
    }

    #[test]
    fn zero_step_is_rejected() {
        let cfg = RunConfig { tau_grid: TauGrid { start: 0.5, stop: 5.0, step: 0.0 }, ..Default::default() };
        assert!(matches!(cfg.validate(), Err(CliError::Config(m)) if m.starts_with("tau_grid.step")));
    }

    #[test]
    fn init_length_checked() {
        let cfg = RunConfig { init: Some("u,d,0".into()), ..Default::default() };
        assert!(cfg.initial_state().is_err());
    }
}

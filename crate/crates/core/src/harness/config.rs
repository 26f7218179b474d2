//! Experiment configuration: a TOML file with grids, model constants and
//! engine settings. Powers and thresholds are given in dB/dBm and converted
//! once by [`SweepConfig::points`].

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::analytic::energy::{db_to_linear, dbm_to_watts, PowerModel};
use crate::analytic::AnalyticOptions;
use crate::channel::FadingSpec;
use crate::error::{Error, Result};
use crate::montecarlo::{ActivityModel, CascadeModel, SimOptions};
use crate::scenario::Scenario;

/// Smallest drop count accepted when the simulator runs.
pub const MIN_DROPS: usize = 100;

/// Which engines a sweep runs.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Engine {
    Sim,
    Analytic,
    #[default]
    Both,
}

impl Engine {
    pub fn runs_sim(self) -> bool {
        matches!(self, Engine::Sim | Engine::Both)
    }

    pub fn runs_analytic(self) -> bool {
        matches!(self, Engine::Analytic | Engine::Both)
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OutputFormat {
    #[default]
    Csv,
    Json,
}

/// Analytic quantities to evaluate. The simulator always reports all of them.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct MetricSet {
    /// Mean signal and interference powers.
    pub moments: bool,
    pub coverage: bool,
    /// Area spectral and energy efficiency.
    pub ase: bool,
}

impl Default for MetricSet {
    fn default() -> Self {
        MetricSet { moments: true, coverage: true, ase: true }
    }
}

/// Axes of the sweep. RIS settings come from `ris` when given, otherwise
/// from the product of `lambda_m` and `q`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Grid {
    pub lambda_active: Vec<f64>,
    pub lambda_m: Vec<f64>,
    pub q: Vec<u32>,
    /// Explicit `[lambda_m, q]` pairs.
    pub ris: Option<Vec<(f64, u32)>>,
    pub varsigma: Vec<u32>,
    pub threshold_db: Vec<f64>,
}

impl Default for Grid {
    fn default() -> Self {
        Grid {
            lambda_active: vec![0.01],
            lambda_m: vec![0.01],
            q: vec![10],
            ris: None,
            varsigma: vec![1],
            threshold_db: vec![0.0],
        }
    }
}

impl Grid {
    pub fn ris_pairs(&self) -> Vec<(f64, u32)> {
        match &self.ris {
            Some(pairs) => pairs.clone(),
            None => self.lambda_m.iter().flat_map(|&m| self.q.iter().map(move |&q| (m, q))).collect(),
        }
    }
}

/// Propagation and power constants.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ModelConfig {
    pub alpha: f64,
    /// UE-to-BS intensity ratio.
    pub ue_ratio: f64,
    pub p_tr_dbm: f64,
    /// Noise power; the default is 7.96e-14 W.
    pub noise_dbm: Option<f64>,
    pub delta_p: f64,
    pub p_ns_w: f64,
    pub p_md_w: f64,
    pub p_ms_w: f64,
}

impl Default for ModelConfig {
    fn default() -> Self {
        let p = PowerModel::default();
        ModelConfig {
            alpha: 4.0,
            ue_ratio: 20.0,
            p_tr_dbm: 30.0,
            noise_dbm: None,
            delta_p: p.delta_p,
            p_ns_w: p.p_ns,
            p_md_w: p.p_md,
            p_ms_w: p.p_ms,
        }
    }
}

impl ModelConfig {
    pub fn power(&self) -> PowerModel {
        PowerModel {
            p_tr: dbm_to_watts(self.p_tr_dbm),
            delta_p: self.delta_p,
            p_ns: self.p_ns_w,
            p_md: self.p_md_w,
            p_ms: self.p_ms_w,
            sigma_n2: self.noise_dbm.map_or(PowerModel::default().sigma_n2, dbm_to_watts),
        }
    }
}

/// Simulator settings other than the seed and drop count.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SimConfig {
    pub window_radius: Option<f64>,
    pub guard_factor: f64,
    pub ris_radius: f64,
    pub activity: ActivityModel,
    pub cascade: CascadeModel,
    pub max_resample: usize,
}

impl Default for SimConfig {
    fn default() -> Self {
        let o = SimOptions::default();
        SimConfig {
            window_radius: o.window_radius,
            guard_factor: o.guard_factor,
            ris_radius: o.ris_radius,
            activity: o.activity,
            cascade: o.cascade,
            max_resample: o.max_resample,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputConfig {
    pub path: Option<PathBuf>,
    pub format: OutputFormat,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SweepConfig {
    pub name: String,
    pub seed: u64,
    /// Drops per grid point.
    pub drops: usize,
    pub engine: Engine,
    /// Use the approximate cascade sampler, thinned BS activity and looser
    /// quadrature tolerances.
    pub fast: bool,
    /// Worker threads; `None` uses the global pool.
    pub workers: Option<usize>,
    pub metrics: MetricSet,
    pub grid: Grid,
    pub model: ModelConfig,
    pub simulation: SimConfig,
    pub analytic: AnalyticOptions,
    pub output: OutputConfig,
}

impl Default for SweepConfig {
    fn default() -> Self {
        SweepConfig {
            name: "sweep".into(),
            seed: 1,
            drops: 2000,
            engine: Engine::Both,
            fast: false,
            workers: None,
            metrics: MetricSet::default(),
            grid: Grid::default(),
            model: ModelConfig::default(),
            simulation: SimConfig::default(),
            analytic: AnalyticOptions::default(),
            output: OutputConfig::default(),
        }
    }
}

/// One scenario of the sweep together with its thresholds.
#[derive(Debug, Clone, PartialEq)]
pub struct GridPoint {
    pub index: usize,
    pub scenario: Scenario,
    pub threshold_db: Vec<f64>,
    /// Linear thresholds, in the order of `threshold_db`.
    pub thresholds: Vec<f64>,
}

impl SweepConfig {
    /// Parses and validates.
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let cfg = SweepConfig::parse_toml(text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    /// Parses without validating, for callers that adjust the result first.
    pub fn parse_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    /// Reads a file without validating it.
    pub fn read(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        SweepConfig::parse_toml(&text)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let cfg = SweepConfig::read(path)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_toml_string(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn validate(&self) -> Result<()> {
        let g = &self.grid;
        let empty = [
            ("lambda_active", g.lambda_active.is_empty()),
            ("ris", g.ris_pairs().is_empty()),
            ("varsigma", g.varsigma.is_empty()),
            ("threshold_db", g.threshold_db.is_empty()),
        ];
        for (name, is_empty) in empty {
            if is_empty {
                return Err(Error::Config(format!("grid axis `{name}` is empty")));
            }
        }
        if self.engine.runs_sim() && self.drops < MIN_DROPS {
            return Err(Error::Config(format!("drops must be at least {MIN_DROPS}, got {}", self.drops)));
        }
        if self.workers == Some(0) {
            return Err(Error::Config("workers must be positive".into()));
        }
        if g.threshold_db.iter().any(|t| !t.is_finite()) {
            return Err(Error::Config("thresholds must be finite".into()));
        }
        for p in self.points() {
            p.scenario.validate().map_err(|e| Error::Config(e.to_string()))?;
        }
        self.sim_options().validate().map_err(|e| Error::Config(e.to_string()))?;
        self.analytic_options().validate().map_err(|e| Error::Config(e.to_string()))
    }

    /// Grid points in output order: `varsigma`, then RIS setting, then
    /// `lambda_active`.
    pub fn points(&self) -> Vec<GridPoint> {
        let power = self.model.power();
        let thresholds: Vec<f64> = self.grid.threshold_db.iter().map(|&t| db_to_linear(t)).collect();
        let mut out = Vec::new();
        for &varsigma in &self.grid.varsigma {
            for (lambda_m, q) in self.grid.ris_pairs() {
                for &lambda_active in &self.grid.lambda_active {
                    out.push(GridPoint {
                        index: out.len(),
                        scenario: Scenario {
                            lambda_active,
                            lambda_m,
                            ue_ratio: self.model.ue_ratio,
                            fading: FadingSpec { varsigma, alpha: self.model.alpha, q },
                            power,
                        },
                        threshold_db: self.grid.threshold_db.clone(),
                        thresholds: thresholds.clone(),
                    });
                }
            }
        }
        out
    }

    pub fn sim_options(&self) -> SimOptions {
        let s = &self.simulation;
        let mut o = SimOptions {
            seed: self.seed,
            window_radius: s.window_radius,
            guard_factor: s.guard_factor,
            ris_radius: s.ris_radius,
            activity: s.activity,
            cascade: s.cascade,
            max_resample: s.max_resample,
        };
        if self.fast {
            o.activity = ActivityModel::Thinned;
            o.cascade = CascadeModel::Approx;
        }
        o
    }

    pub fn analytic_options(&self) -> AnalyticOptions {
        let mut o = self.analytic;
        if self.fast {
            o.plane.quad.rel_tol = o.plane.quad.rel_tol.max(1e-3);
            o.plane.quad.z_grid = o.plane.quad.z_grid.min(200);
        }
        o
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_a_minimal_file() {
        let cfg = SweepConfig::from_toml_str(
            r#"
            name = "demo"
            drops = 500
            [grid]
            lambda_active = [0.01, 0.1]
            ris = [[0.01, 10], [0.005, 563]]
            threshold_db = [-10, 0, 10]
            [model]
            p_tr_dbm = 20
            "#,
        )
        .unwrap();
        assert_eq!(cfg.name, "demo");
        let pts = cfg.points();
        assert_eq!(pts.len(), 4);
        assert_eq!(pts[1].scenario.lambda_active, 0.1);
        assert_eq!(pts[2].scenario.fading.q, 563);
        assert!((pts[0].scenario.power.p_tr - 0.1).abs() < 1e-15);
        assert_eq!(pts[0].scenario.power.sigma_n2, 7.96e-14);
        assert_eq!(pts[0].thresholds[1], 1.0);
        assert!((pts[0].thresholds[2] - 10.0).abs() < 1e-12);
    }

    #[test]
    fn rejects_bad_files() {
        for text in [
            "[grid]\nlambda_active = []",
            "[grid]\nvarsigma = [1.5]",
            "[grid]\nvarsigma = [0]",
            "drops = 10",
            "unknown_key = 1",
            "[grid]\nlambda_active = [-1.0]",
            "[model]\nalpha = 2.0",
        ] {
            assert!(matches!(SweepConfig::from_toml_str(text), Err(Error::Config(_))), "{text}");
        }
        assert!(SweepConfig::from_toml_str("drops = 10\nengine = \"analytic\"").is_ok());
        assert!(SweepConfig::parse_toml("drops = 10").is_ok());
        assert!(SweepConfig::parse_toml("unknown_key = 1").is_err());
    }

    #[test]
    fn round_trips_through_toml() {
        let mut cfg = SweepConfig::default();
        cfg.grid.ris = Some(vec![(0.0, 10), (0.05, 563)]);
        cfg.model.noise_dbm = Some(-100.0);
        let text = cfg.to_toml_string().unwrap();
        assert_eq!(SweepConfig::from_toml_str(&text).unwrap(), cfg);
    }

    #[test]
    fn fast_mode_switches_approximations() {
        let cfg = SweepConfig { fast: true, ..Default::default() };
        assert_eq!(cfg.sim_options().cascade, CascadeModel::Approx);
        assert_eq!(cfg.analytic_options().plane.quad.rel_tol, 1e-3);
    }
}

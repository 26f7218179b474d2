//! Desk-scale sweeps of the five RIS settings and both fading orders on a
//! coarser `lambda_active` grid with fewer drops.
//! Large non-Rayleigh cascades use their Gaussian form.

use crate::error::{Error, Result};
use crate::harness::config::{MetricSet, SweepConfig};
use crate::montecarlo::CascadeModel;

pub const PRESET_NAMES: [&str; 6] = ["fig6", "fig7", "fig8", "fig9", "fig10", "fig11"];

/// No RIS, then two pairs of settings with equal RIS power consumption:
/// `(0.1, 10)` with `(0.05, 563)` and `(0.01, 10)` with `(0.005, 563)`.
pub const RIS_SETTINGS: [(f64, u32); 5] = [(0.0, 10), (0.1, 10), (0.05, 563), (0.01, 10), (0.005, 563)];

const WIDE_GRID: [f64; 7] = [0.001, 0.01, 0.1, 0.316, 1.0, 3.16, 10.0];
const DECADE_GRID: [f64; 5] = [0.001, 0.01, 0.1, 1.0, 10.0];

fn base(name: &str, lambda_active: &[f64], drops: usize, metrics: MetricSet) -> SweepConfig {
    let mut cfg = SweepConfig { name: name.into(), drops, metrics, ..Default::default() };
    cfg.grid.lambda_active = lambda_active.to_vec();
    cfg.grid.ris = Some(RIS_SETTINGS.to_vec());
    cfg.grid.varsigma = vec![1, 10];
    cfg.grid.threshold_db = vec![0.0];
    cfg.analytic.plane.quad.rel_tol = 1e-4;
    cfg.simulation.cascade = CascadeModel::Auto;
    cfg
}

pub fn preset(name: &str) -> Result<SweepConfig> {
    let only = |moments, coverage, ase| MetricSet { moments, coverage, ase };
    let cfg = match name {
        // Mean signal and interference power.
        "fig6" => base(name, &WIDE_GRID, 500, only(true, false, false)),
        // Outage against the threshold at one density.
        "fig7" => {
            let mut c = base(name, &[0.01], 2000, only(false, true, false));
            c.grid.threshold_db = (-30..=50).step_by(5).map(f64::from).collect();
            c
        }
        "fig8" => base(name, &DECADE_GRID, 1000, only(false, true, false)),
        "fig9" | "fig10" => base(name, &DECADE_GRID, 1000, only(false, false, true)),
        "fig11" => base(name, &[0.001, 0.01, 0.1, 1.0, 3.16, 10.0], 1000, only(false, true, false)),
        _ => return Err(Error::Config(format!("unknown preset `{name}`; expected one of {}", PRESET_NAMES.join(", ")))),
    };
    cfg.validate()?;
    Ok(cfg)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_preset_is_valid() {
        for name in PRESET_NAMES {
            let cfg = preset(name).unwrap();
            assert_eq!(cfg.name, name);
            assert!(cfg.points().len() >= 10);
        }
        assert!(preset("fig5").is_err());
    }

    #[test]
    fn equal_power_pairs() {
        let p = crate::analytic::energy::PowerModel::default();
        let ris = |(m, q): (f64, u32)| m * p.ris_power(q);
        // Equal within the rounding of the element count.
        assert!((ris(RIS_SETTINGS[1]) / ris(RIS_SETTINGS[2]) - 1.0).abs() < 0.01);
        assert!((ris(RIS_SETTINGS[3]) / ris(RIS_SETTINGS[4]) - 1.0).abs() < 0.01);
    }
}

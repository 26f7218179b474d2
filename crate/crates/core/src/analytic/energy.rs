//! Power consumption model and the energy-efficiency metrics built on it.

use serde::{Deserialize, Serialize};

use crate::error::{ensure_non_negative, invalid, Result};

/// Linear power consumption model and receiver noise.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PowerModel {
    /// Transmit power per active BS (W).
    pub p_tr: f64,
    /// Slope of the BS power amplifier.
    pub delta_p: f64,
    /// Static power per BS (W).
    pub p_ns: f64,
    /// Dynamic power per RIS element (W).
    pub p_md: f64,
    /// Static power per RIS (W).
    pub p_ms: f64,
    /// Noise power at the UE (W).
    pub sigma_n2: f64,
}

impl Default for PowerModel {
    fn default() -> Self {
        PowerModel { p_tr: 1.0, delta_p: 1.0, p_ns: 14.7, p_md: 0.012, p_ms: 6.52, sigma_n2: 7.96e-14 }
    }
}

impl PowerModel {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("p_tr", self.p_tr),
            ("delta_p", self.delta_p),
            ("p_ns", self.p_ns),
            ("p_md", self.p_md),
            ("p_ms", self.p_ms),
            ("sigma_n2", self.sigma_n2),
        ] {
            ensure_non_negative(name, v)?;
        }
        if self.p_tr == 0.0 {
            return invalid("transmit power must be positive");
        }
        Ok(())
    }

    /// Power drawn by one active BS.
    pub fn bs_power(&self) -> f64 {
        self.delta_p * self.p_tr + self.p_ns
    }

    /// Power drawn by one RIS with `q` elements.
    pub fn ris_power(&self, q: u32) -> f64 {
        q as f64 * self.p_md + self.p_ms
    }

    /// Network power per unit area.
    pub fn area_power(&self, lambda_active: f64, lambda_m: f64, q: u32) -> f64 {
        lambda_active * self.bs_power() + lambda_m * self.ris_power(q)
    }
}

pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

pub fn linear_to_db(x: f64) -> f64 {
    10.0 * x.log10()
}

pub fn dbm_to_watts(dbm: f64) -> f64 {
    db_to_linear(dbm - 30.0)
}

fn area_power_checked(lambda_active: f64, lambda_m: f64, q: u32, power: &PowerModel) -> Result<f64> {
    ensure_non_negative("lambda_active", lambda_active)?;
    ensure_non_negative("lambda_m", lambda_m)?;
    let denom = power.area_power(lambda_active, lambda_m, q);
    if !(denom > 0.0) {
        return invalid("area power consumption is zero");
    }
    Ok(denom)
}

/// Area energy efficiency: spectral efficiency per unit-area power (bit/J per area).
pub fn aee(ase: f64, lambda_active: f64, lambda_m: f64, q: u32, power: &PowerModel) -> Result<f64> {
    Ok(ase / area_power_checked(lambda_active, lambda_m, q, power)?)
}

/// Energy coverage efficiency: coverage probability per unit-area power.
pub fn ece(coverage: f64, lambda_active: f64, lambda_m: f64, q: u32, power: &PowerModel) -> Result<f64> {
    Ok(coverage / area_power_checked(lambda_active, lambda_m, q, power)?)
}

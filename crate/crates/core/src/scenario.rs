//! Parameters of the network model shared by the simulator and the
//! analytic engine.

use serde::{Deserialize, Serialize};

use crate::analytic::energy::PowerModel;
use crate::channel::FadingSpec;
use crate::error::{ensure_non_negative, ensure_positive, Result};
use crate::ppp::active_bs_probability;

/// Model parameters shared by both engines.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Scenario {
    /// Intensity of active BSs.
    pub lambda_active: f64,
    /// RIS intensity.
    pub lambda_m: f64,
    /// UE-to-BS intensity ratio used to place the UEs that switch BSs on.
    pub ue_ratio: f64,
    pub fading: FadingSpec,
    pub power: PowerModel,
}

impl Default for Scenario {
    fn default() -> Self {
        Scenario {
            lambda_active: 0.01,
            lambda_m: 0.01,
            ue_ratio: 20.0,
            fading: FadingSpec::default(),
            power: PowerModel::default(),
        }
    }
}

impl Scenario {
    pub fn validate(&self) -> Result<()> {
        ensure_positive("lambda_active", self.lambda_active)?;
        ensure_non_negative("lambda_m", self.lambda_m)?;
        ensure_positive("ue_ratio", self.ue_ratio)?;
        self.fading.validate()?;
        self.power.validate()
    }

    /// Probability that a BS is active.
    pub fn activity(&self) -> f64 {
        active_bs_probability(self.ue_ratio, 1.0).unwrap_or(1.0)
    }

    /// Intensity of all (active and idle) BSs.
    pub fn lambda_n(&self) -> f64 {
        self.lambda_active / self.activity()
    }

    pub fn lambda_u(&self) -> f64 {
        self.ue_ratio * self.lambda_n()
    }
}

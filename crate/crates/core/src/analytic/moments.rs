//! Mean received signal and interference power of the typical UE.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::analytic::distance_rule;
use crate::analytic::functionals::{func_f, func_q, PlaneOptions, RisSelection};
use crate::analytic::quad::integrate_to_infinity;
use crate::analytic::special::{beta, nakagami_mean};
use crate::channel::cascade_distribution;
use crate::error::{Error, Result};
use crate::scenario::Scenario;

/// Terms of `E|D_sum|²`.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct SignalMoments {
    /// Direct link.
    pub direct: f64,
    /// Incoherent power of the RISs served by the serving BS.
    pub in_cell: f64,
    /// Coherent combination of distinct served RISs.
    pub coherent: f64,
    /// Direct-times-reflected cross term.
    pub cross: f64,
    /// Randomly phased RISs of other cells.
    pub out_of_cell: f64,
}

impl SignalMoments {
    pub fn total(&self) -> f64 {
        self.direct + self.in_cell + self.coherent + self.cross + self.out_of_cell
    }

    pub fn reflected(&self) -> f64 {
        self.total() - self.direct
    }

    fn scaled(self, k: f64) -> Self {
        SignalMoments {
            direct: k * self.direct,
            in_cell: k * self.in_cell,
            coherent: k * self.coherent,
            cross: k * self.cross,
            out_of_cell: k * self.out_of_cell,
        }
    }

    fn add_weighted(&mut self, w: f64, o: &SignalMoments) {
        self.direct += w * o.direct;
        self.in_cell += w * o.in_cell;
        self.coherent += w * o.coherent;
        self.cross += w * o.cross;
        self.out_of_cell += w * o.out_of_cell;
    }
}

/// Terms of `E|I_sum|²`.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct InterferenceMoments {
    /// Direct links of the other active BSs.
    pub direct: f64,
    /// Reflections of other BSs' signals.
    pub reflected: f64,
}

impl InterferenceMoments {
    pub fn total(&self) -> f64 {
        self.direct + self.reflected
    }
}

/// `E|D_sum|²` given the serving distance `d`, at unit transmit power.
pub fn signal_moments_at(scn: &Scenario, d: f64, plane: &PlaneOptions) -> Result<SignalMoments> {
    let f = &scn.fading;
    let alpha = f.alpha;
    let direct = (1.0 + d).powf(-alpha);
    if scn.lambda_m == 0.0 {
        return Ok(SignalMoments { direct, ..Default::default() });
    }
    let stats = cascade_distribution(f.varsigma, f.q);
    let c = nakagami_mean(f.varsigma as f64);
    let la = scn.lambda_active;
    let ring = 2.0 * PI * scn.lambda_m;
    let amp = ring * func_q(RisSelection::InCell, alpha / 2.0, d, la, plane)?;
    let pow_in = ring * func_q(RisSelection::InCell, alpha, d, la, plane)?;
    let pow_out = ring * func_q(RisSelection::OutOfCell, alpha, d, la, plane)?;
    let coherent_amp = stats.mean_served * amp;
    Ok(SignalMoments {
        direct,
        in_cell: stats.second_moment_served() * pow_in,
        coherent: coherent_amp * coherent_amp,
        cross: 2.0 * c * direct.sqrt() * coherent_amp,
        out_of_cell: stats.power_unserved * pow_out,
    })
}

/// `E|D_sum|²` averaged over the serving distance, in watts.
pub fn mean_signal_power(scn: &Scenario, plane: &PlaneOptions) -> Result<SignalMoments> {
    scn.validate()?;
    plane.quad.validate()?;
    let mut acc = SignalMoments::default();
    for (d, w) in distance_rule(scn.lambda_active, plane.quad.inner_nodes())? {
        acc.add_weighted(w, &signal_moments_at(scn, d, plane)?);
    }
    Ok(acc.scaled(scn.power.p_tr))
}

/// `E|I_sum|²` in watts.
pub fn mean_interference_power(scn: &Scenario, plane: &PlaneOptions) -> Result<InterferenceMoments> {
    scn.validate()?;
    plane.quad.validate()?;
    let f = &scn.fading;
    let la = scn.lambda_active;
    if la == 0.0 {
        return Ok(InterferenceMoments::default());
    }
    let alpha = f.alpha;
    if alpha <= 2.0 {
        return Err(Error::Divergent(format!("interference power diverges for path-loss exponent {alpha}")));
    }
    // Interferers lie beyond the serving distance; averaging over it gives
    // the factor 1 − e^{-πλ'r²} on an interferer at distance r.
    let direct = 2.0 * PI * la * (beta(2.0, alpha - 2.0) - func_f(alpha, PI * la, &plane.quad)?);
    let reflected = if scn.lambda_m == 0.0 {
        0.0
    } else {
        let mut failure = None;
        let scale = 1.0 / (PI * la).sqrt();
        let integral = integrate_to_infinity(
            |r| match func_q(RisSelection::All, alpha, r, la, plane) {
                Ok(q) => q * r * -(-PI * la * r * r).exp_m1(),
                Err(e) => {
                    failure.get_or_insert(e);
                    0.0
                }
            },
            0.0,
            scale,
            &plane.quad,
        )?
        .value;
        if let Some(e) = failure {
            return Err(e);
        }
        4.0 * PI * PI * la * scn.lambda_m * f.q as f64 * integral
    };
    let p = scn.power.p_tr;
    Ok(InterferenceMoments { direct: p * direct, reflected: p * reflected })
}

//! Area spectral efficiency `λ' E[log2(1 + SINR)]`.
//!
//! Uses `E ln(1 + S/(I+N)) = ∫_0^∞ (M_I(z) − M_{I+S}(z)) e^{−zN} dz/z` with
//! `M_X(z) = E e^{−zX}`, evaluated on a log-spaced `z` grid.

use std::f64::consts::LN_2;

use crate::analytic::field::LinkField;
use crate::analytic::laplace::served_amplitude_transform;
use crate::analytic::{distance_rule, AnalyticOptions};
use crate::error::Result;
use crate::scenario::Scenario;

/// Span of the `z` grid in units of the mean received power.
const Z_FLOOR: f64 = 1e-7;
/// Upper end of the grid in units of `1/σ²`.
const Z_CEILING: f64 = 60.0;

pub fn ase(scn: &Scenario, opts: &AnalyticOptions) -> Result<f64> {
    Ok(spectral_efficiency(scn, opts)? * scn.lambda_active)
}

/// `(ln M_I, ln M_S)` given the serving distance, at `x = z·P_tr`.
fn log_transforms(f: &LinkField, x: f64, q: f64, m: f64, cross: f64) -> Result<(f64, f64)> {
    let log_i = -f.interferers.sum(|l| 1.0 - (1.0 + x * l / m).powf(-m))
        - f.reflected_interferers.sum(|l| {
            let y = x * q * l;
            y / (1.0 + y)
        });
    let mut failure = None;
    let served = f.served.sum(|l| match served_amplitude_transform(x * l, x * cross * (l * f.direct_loss).sqrt(), &f.stats) {
        Ok(v) => 1.0 - v,
        Err(e) => {
            failure.get_or_insert(e);
            0.0
        }
    });
    if let Some(e) = failure {
        return Err(e);
    }
    let unserved = f.unserved.sum(|l| {
        let y = x * q * l;
        y / (1.0 + y)
    });
    let coherent = x * f.coherent_amplitude * f.coherent_amplitude;
    let log_s = -m * (x * f.direct_loss / m).ln_1p() - served - unserved - coherent;
    Ok((log_i, log_s))
}

/// `M_I(z)` and `M_{I+S}(z)` averaged over the serving distance.
pub fn transform_pair(scn: &Scenario, z: f64, opts: &AnalyticOptions) -> Result<(f64, f64)> {
    scn.validate()?;
    opts.validate()?;
    let cross = opts.cross_coefficient(scn.fading.varsigma);
    let (mut mi, mut mis) = (0.0, 0.0);
    for (d, w) in distance_rule(scn.lambda_active, opts.rule_nodes)? {
        let f = LinkField::build(scn, d, opts.rule_nodes, &opts.plane)?;
        let (li, ls) = log_transforms(&f, z * scn.power.p_tr, scn.fading.q as f64, scn.fading.varsigma as f64, cross)?;
        mi += w * li.exp();
        mis += w * (li + ls).exp();
    }
    Ok((mi, mis))
}

/// `E[log2(1 + SINR)]` of the typical UE.
pub fn spectral_efficiency(scn: &Scenario, opts: &AnalyticOptions) -> Result<f64> {
    scn.validate()?;
    opts.validate()?;
    let p = scn.power.p_tr;
    let noise = scn.power.sigma_n2;
    let q = scn.fading.q as f64;
    let m = scn.fading.varsigma as f64;
    let cross = opts.cross_coefficient(scn.fading.varsigma);
    let rule = distance_rule(scn.lambda_active, opts.rule_nodes)?;
    let fields = rule
        .iter()
        .map(|&(d, w)| Ok((w, LinkField::build(scn, d, opts.rule_nodes, &opts.plane)?)))
        .collect::<Result<Vec<_>>>()?;

    // Small-z limit: [M_I − M_{I+S}]/z → P·E[S].
    let mean_signal: f64 = fields.iter().map(|(w, f)| w * (f.direct_loss + f.reflected_mean(cross))).sum::<f64>() * p;
    let z_lo = Z_FLOOR / mean_signal;
    let z_hi = if noise > 0.0 { Z_CEILING / noise } else { 1e20 / p };
    let n = opts.plane.quad.z_grid | 1;
    let (u_lo, u_hi) = (z_lo.ln(), z_hi.ln().max(z_lo.ln() + 1.0));
    let h = (u_hi - u_lo) / (n - 1) as f64;

    let mut integral = 0.0;
    for i in 0..n {
        let z = (u_lo + h * i as f64).exp();
        let mut g = 0.0;
        for (w, f) in &fields {
            let (log_i, log_s) = log_transforms(f, z * p, q, m, cross)?;
            g += w * log_i.exp() * -log_s.exp_m1();
        }
        let simpson = if i == 0 || i == n - 1 {
            1.0
        } else if i % 2 == 1 {
            4.0
        } else {
            2.0
        };
        integral += simpson * g * (-z * noise).exp();
    }
    integral *= h / 3.0;
    integral += z_lo * mean_signal;
    Ok(integral / LN_2)
}

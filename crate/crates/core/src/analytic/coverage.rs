//! Coverage probability `P[SINR ≥ δ]` of the typical UE.
//!
//! With `|h|² ~ Gamma(ς, 1/ς)` on the serving link, the tail bound
//! `P[|h|² ≥ x] ≈ 1 − (1 − e^{−ϖx})^ς` expands into a binomial sum of
//! exponential moments of the normalized interference-plus-noise excess.
//! Interference factors are probability generating functionals of the
//! interferer and interferer–RIS processes; the reflected desired signal is
//! taken at its conditional mean by default (see [`SignalTransform`]).

use serde::{Deserialize, Serialize};

use crate::analytic::field::LinkField;
use crate::analytic::laplace::served_amplitude_transform;
use crate::analytic::special::binomial;
use crate::analytic::{distance_rule, AnalyticOptions, SignalTransform};
use crate::error::{ensure_non_negative, Error, Result};
use crate::scenario::Scenario;

/// Inputs of one coverage evaluation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CoverageParams {
    pub scenario: Scenario,
    /// SINR threshold (linear).
    pub delta: f64,
}

impl CoverageParams {
    /// Tail-bound constant for the configured fading order.
    pub fn varpi(&self, opts: &AnalyticOptions) -> f64 {
        opts.tail.value(self.scenario.fading.varsigma)
    }
}

pub fn coverage_probability(params: &CoverageParams, opts: &AnalyticOptions) -> Result<f64> {
    Ok(coverage_curve(&params.scenario, &[params.delta], opts)?[0])
}

/// Coverage at several thresholds sharing the same geometry.
pub fn coverage_curve(scn: &Scenario, deltas: &[f64], opts: &AnalyticOptions) -> Result<Vec<f64>> {
    scn.validate()?;
    opts.validate()?;
    for &d in deltas {
        ensure_non_negative("delta", d)?;
    }
    let rule = distance_rule(scn.lambda_active, opts.rule_nodes)?;
    let mut out = vec![0.0; deltas.len()];
    for (d, w) in rule {
        let field = LinkField::build(scn, d, opts.rule_nodes, &opts.plane)?;
        for (acc, &delta) in out.iter_mut().zip(deltas) {
            *acc += w * conditional_coverage(scn, &field, delta, opts)?;
        }
    }
    Ok(out.into_iter().map(|p| p.clamp(0.0, 1.0)).collect())
}

/// Coverage given the serving distance encoded in `field`.
pub(crate) fn conditional_coverage(scn: &Scenario, field: &LinkField, delta: f64, opts: &AnalyticOptions) -> Result<f64> {
    let m = scn.fading.varsigma;
    let varpi = opts.tail.value(m);
    let p = scn.power.p_tr;
    let noise = scn.power.sigma_n2 / p;
    let q = scn.fading.q as f64;
    let cross = opts.cross_coefficient(m);
    let inv_direct = 1.0 / field.direct_loss;
    let reflected = match opts.signal {
        SignalTransform::Linearized => Some(field.reflected_mean(cross)),
        SignalTransform::Omitted => Some(0.0),
        SignalTransform::Mgf => None,
    };
    let mut exponents = Vec::with_capacity(m as usize);
    for k in 1..=m {
        let s = k as f64 * varpi * inv_direct;
        let c = s * delta;
        let mf = m as f64;
        let i1 = field.interferers.sum(|l| -(1.0 + c * l / mf).powf(-mf) + 1.0);
        let i2 = field.reflected_interferers.sum(|l| {
            let x = c * q * l;
            x / (1.0 + x)
        });
        let signal = match reflected {
            Some(_) => 0.0,
            None => signal_mgf_exponent(field, s, q, cross)?,
        };
        exponents.push(-c * noise - i1 - i2 + signal);
    }
    Ok(match reflected {
        Some(mean) => boost_envelope(m, &exponents, varpi * inv_direct * mean),
        None => binomial_sum(m, exponents.iter().copied()).clamp(0.0, 1.0),
    })
}

/// `Σ_k (−1)^{k+1} C(m, k) e^{x_k}` for `k = 1..=m`.
fn binomial_sum(m: u32, exponents: impl Iterator<Item = f64>) -> f64 {
    exponents
        .zip(1..=m)
        .map(|(x, k)| if k % 2 == 1 { 1.0 } else { -1.0 } * binomial(m, k) * x.exp())
        .sum()
}

/// Largest term, as a logarithm, that the binomial sum may contain before
/// cancellation swamps a result of order one.
const MAX_TERM_LN: f64 = 13.8;
const BOOST_SCAN: usize = 256;

/// Coverage under a deterministic reflected boost `e^{k·beta}` on the `k`-th
/// moment. The expansion is a degree-ς polynomial in the boost that turns
/// over once the boost exceeds what the interference needs, whereas the tail
/// bound it stands for never decreases. Take the running maximum over boosts
/// up to `e^beta`, scanning only while the terms stay summable.
fn boost_envelope(m: u32, base: &[f64], beta: f64) -> f64 {
    let at = |t: f64| binomial_sum(m, base.iter().zip(1..).map(|(a, k)| a + k as f64 * t));
    let mut best = at(0.0);
    if beta > 0.0 {
        let reach = base
            .iter()
            .zip(1..=m)
            .map(|(a, k)| (MAX_TERM_LN - a - binomial(m, k).ln()) / k as f64)
            .fold(f64::INFINITY, f64::min)
            .max(0.0);
        let end = beta.min(reach);
        for j in 1..=BOOST_SCAN {
            best = best.max(at(end * j as f64 / BOOST_SCAN as f64));
            if best >= 1.0 {
                break;
            }
        }
    }
    best.clamp(0.0, 1.0)
}

/// `ln E[exp(s·R)]` of the reflected signal `R` through the generating
/// functional of the RIS process.
fn signal_mgf_exponent(field: &LinkField, s: f64, q: f64, cross: f64) -> Result<f64> {
    let sd = field.direct_loss.sqrt();
    let mut failure = None;
    let served = field.served.sum(|l| match served_amplitude_transform(-s * l, -s * cross * (l.sqrt() * sd), &field.stats) {
        Ok(v) => v - 1.0,
        Err(e) => {
            failure.get_or_insert(e);
            0.0
        }
    });
    let unserved = field.unserved.sum(|l| {
        let base = 1.0 - s * q * l;
        if base <= 0.0 {
            failure.get_or_insert(Error::Divergent(format!("unserved cascade MGF diverges at s·L = {}", s * l)));
            return 0.0;
        }
        1.0 / base - 1.0
    });
    if let Some(e) = failure {
        return Err(e);
    }
    Ok(served + unserved + s * field.coherent_amplitude * field.coherent_amplitude)
}

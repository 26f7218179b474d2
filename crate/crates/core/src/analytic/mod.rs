//! Numerical evaluation of the closed-form and integral expressions.

pub mod ase;
pub mod coverage;
pub mod energy;
mod field;
pub mod functionals;
pub mod laplace;
pub mod lemmas;
pub mod moments;
pub mod quad;
pub mod special;

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::analytic::functionals::{PlaneOptions, TailConstant};
use crate::analytic::quad::GaussLegendre;
use crate::error::{ensure_positive, invalid, Result};

/// How the reflected part of the desired signal enters the coverage expression.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SignalTransform {
    /// Replaced by its conditional mean given the serving distance.
    #[default]
    Linearized,
    /// Full moment generating function; usually divergent.
    Mgf,
    /// Left out, so only the direct link carries the desired signal.
    Omitted,
}

/// Settings of the analytic engine.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct AnalyticOptions {
    pub plane: PlaneOptions,
    pub tail: TailConstant,
    /// Scale of the direct amplitude in the direct/reflected cross term.
    /// `None` uses `Γ(ς+½)/Γ(ς+1)`, which makes the cross term use `2·E|h|`.
    pub sigma_h: Option<f64>,
    pub signal: SignalTransform,
    /// Nodes per panel of the fixed rules of the coverage and
    /// spectral-efficiency expressions.
    pub rule_nodes: usize,
}

impl Default for AnalyticOptions {
    fn default() -> Self {
        AnalyticOptions {
            plane: PlaneOptions::default(),
            tail: TailConstant::default(),
            sigma_h: None,
            signal: SignalTransform::default(),
            rule_nodes: 8,
        }
    }
}

impl AnalyticOptions {
    pub fn validate(&self) -> Result<()> {
        self.plane.quad.validate()?;
        if self.rule_nodes < 2 {
            return invalid("rule_nodes must be >= 2");
        }
        if let Some(s) = self.sigma_h {
            if !(s >= 0.0 && s.is_finite()) {
                return invalid(format!("sigma_h must be finite and >= 0, got {s}"));
            }
        }
        Ok(())
    }

    /// Coefficient of `|h^C|·sqrt(L_m L_d)` in the cross term.
    pub fn cross_coefficient(&self, varsigma: u32) -> f64 {
        let m = varsigma as f64;
        let sigma = self.sigma_h.unwrap_or_else(|| special::gamma(m + 0.5) / special::gamma(m + 1.0));
        2.0 * m.sqrt() * sigma
    }
}

/// Quadrature over the serving distance: `Σ w g(d) ≈ E[g(d)]` with
/// `d` distributed as the nearest-BS distance at intensity `lambda_active`.
pub fn distance_rule(lambda_active: f64, nodes: usize) -> Result<Vec<(f64, f64)>> {
    ensure_positive("lambda_active", lambda_active)?;
    let scale = 1.0 / (PI * lambda_active).sqrt();
    let gl = GaussLegendre::new(nodes.max(2));
    let breaks = [0.0, 0.1, 0.25, 0.5, 0.75, 1.0, 1.5, 2.0, 3.0, 4.0, 6.5];
    let mut out = Vec::with_capacity(nodes * breaks.len());
    for p in breaks.windows(2) {
        for (x, w) in gl.mapped(p[0], p[1]) {
            // x = d/scale; density 2x e^{-x²}.
            out.push((x * scale, w * 2.0 * x * (-x * x).exp()));
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn distance_rule_is_normalized() {
        for lambda in [1e-4, 0.01, 1.0] {
            let rule = distance_rule(lambda, 12).unwrap();
            let total: f64 = rule.iter().map(|(_, w)| w).sum();
            assert!((total - 1.0).abs() < 1e-13);
            let mean: f64 = rule.iter().map(|(d, w)| d * w).sum();
            let exact = 0.5 / lambda.sqrt();
            assert!((mean - exact).abs() < 1e-12 * exact);
        }
    }

    #[test]
    fn default_cross_coefficient_is_twice_mean_amplitude() {
        let o = AnalyticOptions::default();
        for m in [1, 2, 10] {
            let c = o.cross_coefficient(m);
            assert!((c - 2.0 * special::nakagami_mean(m as f64)).abs() < 1e-12);
        }
    }
}

//! Path-loss spectra seen by the typical UE at a fixed serving distance.

use std::f64::consts::PI;

use crate::analytic::functionals::{plane_rule, PlaneOptions};
use crate::analytic::laplace::{FrozenSpectrum, LossSpectrum};
use crate::analytic::quad::GaussLegendre;
use crate::channel::{cascade_distribution, CascadeStats};
use crate::error::Result;
use crate::scenario::Scenario;

/// Everything the coverage and spectral-efficiency functionals need at one
/// serving distance. Weights carry the point-process intensities, so
/// `Σ w g(L)` is the Campbell integral of `g` over the relevant points.
#[derive(Debug, Clone)]
pub(crate) struct LinkField {
    /// Direct path loss of the serving link.
    pub direct_loss: f64,
    /// RISs served by the serving BS.
    pub served: FrozenSpectrum,
    /// RISs of other cells reflecting the serving BS.
    pub unserved: FrozenSpectrum,
    /// Direct links of the other active BSs.
    pub interferers: FrozenSpectrum,
    /// Interferer–RIS pairs reflecting towards the UE.
    pub reflected_interferers: FrozenSpectrum,
    /// `E[Σ_served β A sqrt(L)]`.
    pub coherent_amplitude: f64,
    pub stats: CascadeStats,
}

impl LinkField {
    pub fn build(scn: &Scenario, d: f64, nodes: usize, plane: &PlaneOptions) -> Result<Self> {
        let f = &scn.fading;
        let alpha = f.alpha;
        let la = scn.lambda_active;
        let lm = scn.lambda_m;
        let stats = cascade_distribution(f.varsigma, f.q);
        let direct_loss = (1.0 + d).powf(-alpha);

        let mut served = LossSpectrum::new();
        let mut unserved = LossSpectrum::new();
        let mut coherent_amplitude = 0.0;
        if lm > 0.0 {
            for n in plane_rule(d, Some(la), nodes, plane)? {
                let loss = ((1.0 + n.d_i) * (1.0 + n.d_r)).powf(-alpha);
                let w = lm * n.area;
                served.push(w * n.in_cell, loss);
                unserved.push(w * (1.0 - n.in_cell), loss);
                coherent_amplitude += w * n.in_cell * stats.mean_served * loss.sqrt();
            }
        }

        let gl = GaussLegendre::new(nodes);
        let mut interferers = FrozenSpectrum::default();
        let mut reflected = LossSpectrum::new();
        for (r, w_r) in interferer_rule(d, la, &gl) {
            let w = 2.0 * PI * la * r * w_r;
            interferers.weight.push(w);
            interferers.loss.push((1.0 + r).powf(-alpha));
            if lm > 0.0 {
                for n in plane_rule(r, None, nodes, plane)? {
                    let loss = ((1.0 + n.d_i) * (1.0 + n.d_r)).powf(-alpha);
                    reflected.push(w * lm * n.area, loss);
                }
            }
        }

        Ok(LinkField {
            direct_loss,
            served: (&served).into(),
            unserved: (&unserved).into(),
            interferers,
            reflected_interferers: (&reflected).into(),
            coherent_amplitude,
            stats,
        })
    }

    /// Conditional mean of the reflected signal power under the closure used
    /// by the coverage and spectral-efficiency expressions, at unit power.
    pub fn reflected_mean(&self, cross_coefficient: f64) -> f64 {
        let s = &self.stats;
        let in_cell = s.second_moment_served() * self.served.sum(|l| l);
        let out = s.power_unserved * self.unserved.sum(|l| l);
        let coherent = self.coherent_amplitude * self.coherent_amplitude;
        let cross = cross_coefficient * self.direct_loss.sqrt() * self.coherent_amplitude;
        in_cell + out + coherent + cross
    }
}

/// Nodes over the distance `r ≥ d` of an interferer, refined near `d` and on
/// the scale of the mean inter-BS distance.
fn interferer_rule(d: f64, lambda_active: f64, gl: &GaussLegendre) -> Vec<(f64, f64)> {
    let scale = 1.0 / (PI * lambda_active).sqrt();
    let mut cuts: Vec<f64> = [1.0, 4.0, 16.0].into_iter().chain([0.5, 1.0, 2.0, 4.0].map(|k| k * scale)).map(|o| d + o).collect();
    cuts.sort_by(f64::total_cmp);
    let mut breaks = vec![d];
    for c in cuts {
        if c > *breaks.last().unwrap() + 1e-9 {
            breaks.push(c);
        }
    }
    let mut out = Vec::new();
    for p in breaks.windows(2) {
        out.extend(gl.mapped(p[0], p[1]));
    }
    let start = *breaks.last().unwrap();
    for p in [[0.0, 0.5], [0.5, 1.0]] {
        for (t, w) in gl.mapped(p[0], p[1]) {
            let u = 1.0 - t;
            out.push((start + start * t / u, w * start / (u * u)));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analytic::functionals::{func_q, RisSelection};
    use crate::channel::FadingSpec;

    #[test]
    fn spectra_reproduce_the_mean_powers() {
        let scn = Scenario { lambda_active: 0.01, lambda_m: 0.01, fading: FadingSpec { varsigma: 1, alpha: 4.0, q: 10 }, ..Default::default() };
        let plane = PlaneOptions::default();
        let d = 4.0;
        let field = LinkField::build(&scn, d, 8, &plane).unwrap();
        let ring = 2.0 * PI * scn.lambda_m;
        let p_in = ring * func_q(RisSelection::InCell, 4.0, d, 0.01, &plane).unwrap();
        let p_out = ring * func_q(RisSelection::OutOfCell, 4.0, d, 0.01, &plane).unwrap();
        let amp = ring * func_q(RisSelection::InCell, 2.0, d, 0.01, &plane).unwrap();
        assert!((field.served.sum(|l| l) - p_in).abs() < 2e-3 * p_in);
        assert!((field.unserved.sum(|l| l) - p_out).abs() < 2e-3 * p_out);
        let coh = field.stats.mean_served * amp;
        assert!((field.coherent_amplitude - coh).abs() < 2e-3 * coh);

        // 2πλ ∫_d^∞ r (1+r)^-4 dr
        let i1 = field.interferers.sum(|l| l);
        let exact = 2.0 * PI * scn.lambda_active * (0.5 * (1.0 + d).powi(-2) - (1.0 + d).powi(-3) / 3.0);
        assert!((i1 - exact).abs() < 1e-6 * exact, "{i1} vs {exact}");
    }
}

//! Laplace transforms `E[e^{-sX}]` of the per-link random variables, and a
//! compressed representation of path-loss sums used to evaluate probability
//! generating functionals at many arguments.
//!
//! Negative arguments give moment generating functions; they return
//! [`Error::Divergent`] outside the region of convergence.

use crate::analytic::special::ln_norm_cdf;
use crate::channel::CascadeStats;
use crate::error::{Error, Result};

/// `E[e^{-s|h|²}]` for `|h|² ~ Gamma(m, 1/m)`.
pub fn nakagami_power_transform(s: f64, varsigma: u32) -> Result<f64> {
    let m = varsigma as f64;
    let base = 1.0 + s / m;
    if base <= 0.0 {
        return Err(Error::Divergent(format!("gamma power MGF diverges at s = {s}")));
    }
    Ok(base.powf(-m))
}

/// `E[e^{-s|X|²}]` for a randomly phased cascade, modelled as `CN(0, Q)`.
pub fn unserved_power_transform(s: f64, power: f64) -> Result<f64> {
    let base = 1.0 + s * power;
    if base <= 0.0 {
        return Err(Error::Divergent(format!("unserved cascade MGF diverges at s = {s}")));
    }
    Ok(1.0 / base)
}

/// `E[e^{-sY²}]` for `Y ~ N(mean, var)`.
pub fn gaussian_square_transform(s: f64, mean: f64, var: f64) -> Result<f64> {
    let base = 1.0 + 2.0 * s * var;
    if base <= 0.0 {
        return Err(Error::Divergent(format!("Gaussian square MGF diverges at s = {s}")));
    }
    Ok((-s * mean * mean / base).exp() / base.sqrt())
}

/// `E[e^{-aA² - bA}]` for the co-phased cascade amplitude `A = max(0, Y)`,
/// `Y ~ N(mean_served, var_served)`.
pub fn served_amplitude_transform(a: f64, b: f64, stats: &CascadeStats) -> Result<f64> {
    let mu = stats.mean_served;
    let var = stats.var_served;
    if var <= 0.0 {
        let y = mu.max(0.0);
        return Ok((-a * y * y - b * y).exp());
    }
    let base = 1.0 + 2.0 * a * var;
    if base <= 0.0 {
        return Err(Error::Divergent(format!("served cascade MGF diverges at a = {a}")));
    }
    let sd = var.sqrt();
    let v = var / base;
    let m = (mu - b * var) / base;
    let exponent = m * m / (2.0 * v) - mu * mu / (2.0 * var);
    let below = crate::analytic::special::norm_cdf(-mu / sd);
    let above = (exponent + ln_norm_cdf(m / v.sqrt())).exp() / base.sqrt();
    if !above.is_finite() {
        return Err(Error::Divergent(format!("served cascade MGF overflows at a = {a}, b = {b}")));
    }
    Ok(below + above)
}

/// Weighted path losses merged into logarithmic bins.
///
/// Sums `Σ w_i g(L_i)` over many quadrature nodes are replaced by sums over
/// bins, each holding its total weight and weight-averaged loss. Losses are
/// expected in `(0, 1]`; anything below `e^{-MAX_EFOLDS}` is dropped.
#[derive(Debug, Clone, Default)]
pub struct LossSpectrum {
    weight: Vec<f64>,
    weighted_loss: Vec<f64>,
}

/// Bins per e-fold of path loss.
const BINS_PER_E: f64 = 48.0;
const MAX_EFOLDS: f64 = 240.0;

impl LossSpectrum {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, weight: f64, loss: f64) {
        if weight == 0.0 || !(loss > 0.0) {
            return;
        }
        let depth = -loss.ln();
        if depth > MAX_EFOLDS {
            return;
        }
        let key = (depth.max(0.0) * BINS_PER_E) as usize;
        if key >= self.weight.len() {
            self.weight.resize(key + 1, 0.0);
            self.weighted_loss.resize(key + 1, 0.0);
        }
        self.weight[key] += weight;
        self.weighted_loss[key] += weight * loss;
    }

    /// `(weight, loss)` of each non-empty bin.
    pub fn bins(&self) -> Vec<(f64, f64)> {
        self.weight
            .iter()
            .zip(&self.weighted_loss)
            .filter(|(w, _)| **w != 0.0)
            .map(|(w, wl)| (*w, wl / w))
            .collect()
    }

    /// Number of non-empty bins.
    pub fn len(&self) -> usize {
        self.weight.iter().filter(|w| **w != 0.0).count()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// `Σ w · g(L)`.
    pub fn sum<G: FnMut(f64) -> f64>(&self, mut g: G) -> f64 {
        self.bins().into_iter().map(|(w, l)| w * g(l)).sum()
    }

    pub fn total_weight(&self) -> f64 {
        self.weight.iter().sum()
    }
}

/// Frozen bins in flat storage for repeated evaluation.
#[derive(Debug, Clone, Default)]
pub struct FrozenSpectrum {
    pub weight: Vec<f64>,
    pub loss: Vec<f64>,
}

impl From<&LossSpectrum> for FrozenSpectrum {
    fn from(s: &LossSpectrum) -> Self {
        let (weight, loss) = s.bins().into_iter().unzip();
        FrozenSpectrum { weight, loss }
    }
}

impl FrozenSpectrum {
    pub fn sum<G: FnMut(f64) -> f64>(&self, mut g: G) -> f64 {
        self.weight.iter().zip(&self.loss).map(|(w, l)| w * g(*l)).sum()
    }
}

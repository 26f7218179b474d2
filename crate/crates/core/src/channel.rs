//! Small-scale fading, path loss, RIS phase design and cascade channels.

use std::f64::consts::TAU;

use num_complex::Complex64;
use rand::Rng;
use rand_distr::{Distribution, Gamma, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::analytic::special::nakagami_mean;
use crate::error::{ensure_non_negative, invalid, Error, Result};

/// Fading and propagation parameters shared by both engines.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FadingSpec {
    /// Nakagami shape parameter.
    pub varsigma: u32,
    /// Path-loss exponent.
    pub alpha: f64,
    /// Reflecting elements per RIS.
    pub q: u32,
}

impl Default for FadingSpec {
    fn default() -> Self {
        FadingSpec { varsigma: 1, alpha: 4.0, q: 10 }
    }
}

impl FadingSpec {
    pub fn validate(&self) -> Result<()> {
        if self.varsigma == 0 {
            return invalid("Nakagami shape must be a positive integer");
        }
        if !(self.alpha > 2.0) || !self.alpha.is_finite() {
            return invalid(format!("path-loss exponent must exceed 2, got {}", self.alpha));
        }
        if self.q == 0 {
            return invalid("a RIS needs at least one element");
        }
        Ok(())
    }
}

/// First and second order statistics of the cascade channel through one RIS.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CascadeStats {
    /// Mean of the co-phased cascade amplitude, `Q·c²` with `c = E|h|`.
    pub mean_served: f64,
    /// Variance of the co-phased cascade amplitude, `Q·(1 − c⁴)`.
    pub var_served: f64,
    /// Mean power of a randomly phased cascade, `E|Σ g φ w|² = Q`.
    pub power_unserved: f64,
}

impl CascadeStats {
    /// Second moment of the co-phased amplitude.
    pub fn second_moment_served(&self) -> f64 {
        self.var_served + self.mean_served * self.mean_served
    }
}

pub fn cascade_distribution(varsigma: u32, q: u32) -> CascadeStats {
    let c = nakagami_mean(varsigma as f64);
    let c2 = c * c;
    let q = q as f64;
    CascadeStats { mean_served: q * c2, var_served: q * (1.0 - c2 * c2), power_unserved: q }
}

/// Nakagami(m, 1) fading: `|h|² ~ Gamma(m, 1/m)` and a uniform phase.
#[derive(Debug, Clone, Copy)]
pub struct Nakagami {
    power: Gamma<f64>,
}

impl Nakagami {
    pub fn new(varsigma: f64) -> Result<Self> {
        if !(varsigma > 0.0) || !varsigma.is_finite() {
            return invalid(format!("Nakagami shape must be > 0, got {varsigma}"));
        }
        let power = Gamma::new(varsigma, 1.0 / varsigma).map_err(|e| Error::InvalidArgument(e.to_string()))?;
        Ok(Nakagami { power })
    }

    pub fn power<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        self.power.sample(rng)
    }

    pub fn amplitude<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        self.power(rng).sqrt()
    }

    pub fn coefficient<R: Rng + ?Sized>(&self, rng: &mut R) -> Complex64 {
        let a = self.amplitude(rng);
        Complex64::from_polar(a, rng.random::<f64>() * TAU)
    }
}

/// Draws a Nakagami(ς, 1) amplitude.
pub fn sample_nakagami_amplitude<R: Rng + ?Sized>(varsigma: f64, rng: &mut R) -> Result<f64> {
    Ok(Nakagami::new(varsigma)?.amplitude(rng))
}

/// Amplitude path loss `(1+d)^{−α/2}`.
pub fn path_loss_amplitude(d: f64, alpha: f64) -> Result<f64> {
    ensure_non_negative("d", d)?;
    Ok((1.0 + d).powf(-0.5 * alpha))
}

/// Power path loss `(1+d)^{−α}` without argument checks.
#[inline]
pub fn path_loss_power(d: f64, alpha: f64) -> f64 {
    if alpha == 4.0 {
        let x = 1.0 + d;
        let x2 = x * x;
        1.0 / (x2 * x2)
    } else {
        (1.0 + d).powf(-alpha)
    }
}

/// Phase shift that aligns the element path `g·φ·w` with the direct link `h`.
pub fn design_phase(h: Complex64, w: Complex64, g: Complex64) -> Result<Complex64> {
    if h.norm() == 0.0 || w.norm() == 0.0 || g.norm() == 0.0 {
        return invalid("phase alignment is undefined for a zero channel coefficient");
    }
    Ok(aligned_phase(h, w, g))
}

#[inline]
fn aligned_phase(h: Complex64, w: Complex64, g: Complex64) -> Complex64 {
    let v = h * w.conj() * g.conj();
    let n = v.norm();
    if n == 0.0 {
        Complex64::new(1.0, 0.0)
    } else {
        v / n
    }
}

/// `Σ_q g_q φ_q w_q`.
pub fn cascade_gain(g: &[Complex64], phases: &[Complex64], w: &[Complex64]) -> Result<Complex64> {
    if g.len() != phases.len() || g.len() != w.len() {
        return invalid(format!(
            "cascade vectors differ in length: g={}, phases={}, w={}",
            g.len(),
            phases.len(),
            w.len()
        ));
    }
    Ok(g.iter().zip(phases).zip(w).map(|((g, p), w)| g * p * w).sum())
}

/// Source of the random channel coefficients used by the simulator.
pub trait ChannelSampler {
    /// Direct BS–UE coefficient (unit mean power).
    fn direct<R: Rng + ?Sized>(&self, rng: &mut R) -> Complex64;
    /// One element of a BS–RIS or RIS–UE channel vector (unit mean power).
    fn element<R: Rng + ?Sized>(&self, rng: &mut R) -> Complex64;
    /// One RIS phase shift that is not matched to any link.
    fn random_phase<R: Rng + ?Sized>(&self, rng: &mut R) -> Complex64 {
        Complex64::from_polar(1.0, rng.random::<f64>() * TAU)
    }
    /// Cascade `Σ g_q φ_q w_q` through fresh BS–RIS elements `g` and
    /// unmatched phases `φ`, for a given RIS–UE vector `w`.
    fn random_cascade<R: Rng + ?Sized>(&self, w: &[Complex64], rng: &mut R) -> Complex64 {
        w.iter().map(|w| self.element(rng) * self.random_phase(rng) * w).sum()
    }
}

/// Independent Nakagami(ς, 1) fading on every link and element.
#[derive(Debug, Clone, Copy)]
pub struct NakagamiChannel {
    fading: Nakagami,
    rayleigh: bool,
}

impl NakagamiChannel {
    pub fn new(varsigma: u32) -> Result<Self> {
        Ok(NakagamiChannel { fading: Nakagami::new(varsigma as f64)?, rayleigh: varsigma == 1 })
    }
}

#[inline]
fn complex_normal<R: Rng + ?Sized>(variance: f64, rng: &mut R) -> Complex64 {
    let s = (0.5 * variance).sqrt();
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(s * re, s * im)
}

impl ChannelSampler for NakagamiChannel {
    fn direct<R: Rng + ?Sized>(&self, rng: &mut R) -> Complex64 {
        self.element(rng)
    }

    fn element<R: Rng + ?Sized>(&self, rng: &mut R) -> Complex64 {
        if self.rayleigh {
            complex_normal(1.0, rng)
        } else {
            self.fading.coefficient(rng)
        }
    }

    fn random_cascade<R: Rng + ?Sized>(&self, w: &[Complex64], rng: &mut R) -> Complex64 {
        if self.rayleigh {
            // g_q ~ CN(0,1) independent of w and φ, so the sum is exactly CN(0, ‖w‖²)
            complex_normal(w.iter().map(|w| w.norm_sqr()).sum(), rng)
        } else {
            w.iter().map(|w| self.element(rng) * self.random_phase(rng) * w).sum()
        }
    }
}

/// Every coefficient equals 1 and unmatched phases are 1; used to check the
/// signal assembly deterministically.
#[derive(Debug, Clone, Copy, Default)]
pub struct UnitChannel;

impl ChannelSampler for UnitChannel {
    fn direct<R: Rng + ?Sized>(&self, _rng: &mut R) -> Complex64 {
        Complex64::new(1.0, 0.0)
    }

    fn element<R: Rng + ?Sized>(&self, _rng: &mut R) -> Complex64 {
        Complex64::new(1.0, 0.0)
    }

    fn random_phase<R: Rng + ?Sized>(&self, _rng: &mut R) -> Complex64 {
        Complex64::new(1.0, 0.0)
    }
}

/// Channel vectors of one RIS towards its serving BS and the typical UE.
#[derive(Debug, Clone, PartialEq)]
pub struct RisLink {
    pub g: Vec<Complex64>,
    pub w: Vec<Complex64>,
}

impl RisLink {
    pub fn sample<S: ChannelSampler, R: Rng + ?Sized>(sampler: &S, q: usize, rng: &mut R) -> Self {
        let g = (0..q).map(|_| sampler.element(rng)).collect();
        let w = (0..q).map(|_| sampler.element(rng)).collect();
        RisLink { g, w }
    }

    /// Cascade with every element co-phased with the direct coefficient `h`.
    pub fn matched(&self, h: Complex64) -> Complex64 {
        self.g.iter().zip(&self.w).map(|(g, w)| g * aligned_phase(h, *w, *g) * w).sum()
    }

    /// Cascade under the given element phases.
    pub fn with_phases(&self, phases: &[Complex64]) -> Complex64 {
        self.g.iter().zip(&self.w).zip(phases).map(|((g, w), p)| g * p * w).sum()
    }
}

/// Randomly phased cascade drawn from its complex Gaussian approximation
/// `CN(0, Q)`.
pub fn sample_unserved_cascade_approx<R: Rng + ?Sized>(q: u32, rng: &mut R) -> Complex64 {
    complex_normal(q as f64, rng)
}

/// Co-phased cascade amplitude drawn from its Gaussian approximation,
/// clamped at zero.
pub fn sample_served_amplitude_approx<R: Rng + ?Sized>(stats: &CascadeStats, rng: &mut R) -> f64 {
    let z: f64 = rng.sample(StandardNormal);
    (stats.mean_served + stats.var_served.sqrt() * z).max(0.0)
}

//! Homogeneous Poisson point processes on a disk and the intensity-level
//! quantities derived from them.

use std::f64::consts::{PI, TAU};

use rand::Rng;
use rand_distr::{Distribution, Poisson};
use serde::{Deserialize, Serialize};

use crate::analytic::special::{gamma, upper_incomplete_gamma};
use crate::error::{ensure_non_negative, ensure_positive, invalid, Result};
use crate::rng::{substream, SimRng};

/// Shape constant of the gamma approximation to the Voronoi cell area.
pub const CELL_SHAPE: f64 = 3.5;

/// Intensities of the three tiers and the sampling window.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PointProcessConfig {
    pub lambda_n: f64,
    pub lambda_m: f64,
    pub lambda_u: f64,
    pub radius: f64,
    pub seed: u64,
}

impl PointProcessConfig {
    pub fn validate(&self) -> Result<()> {
        ensure_non_negative("lambda_n", self.lambda_n)?;
        ensure_non_negative("lambda_m", self.lambda_m)?;
        ensure_non_negative("lambda_u", self.lambda_u)?;
        ensure_positive("radius", self.radius)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PolarPoint {
    pub r: f64,
    pub theta: f64,
}

impl PolarPoint {
    pub const ORIGIN: PolarPoint = PolarPoint { r: 0.0, theta: 0.0 };

    pub fn new(r: f64, theta: f64) -> Self {
        PolarPoint { r, theta: theta.rem_euclid(TAU) }
    }

    pub fn from_xy(x: f64, y: f64) -> Self {
        let theta = y.atan2(x).rem_euclid(TAU);
        // rem_euclid can round up to exactly TAU for tiny negative angles
        let theta = if theta >= TAU { 0.0 } else { theta };
        PolarPoint { r: x.hypot(y), theta }
    }

    pub fn xy(&self) -> (f64, f64) {
        let (s, c) = self.theta.sin_cos();
        (self.r * c, self.r * s)
    }

    pub fn distance(&self, other: &PolarPoint) -> f64 {
        let (ax, ay) = self.xy();
        let (bx, by) = other.xy();
        (ax - bx).hypot(ay - by)
    }

    pub fn translated(&self, dx: f64, dy: f64) -> Self {
        let (x, y) = self.xy();
        PolarPoint::from_xy(x + dx, y + dy)
    }
}

/// A RIS site: position plus the orientation of its reflecting face.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RisSite {
    pub position: PolarPoint,
    pub kappa: f64,
}

/// One drop of all three point processes.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct NetworkRealization {
    pub bs: Vec<PolarPoint>,
    pub ris: Vec<RisSite>,
    pub ue: Vec<PolarPoint>,
}

impl NetworkRealization {
    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("realization is always serializable")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        serde_json::from_str(s).map_err(|e| crate::Error::Config(e.to_string()))
    }
}

fn poisson_count<R: Rng + ?Sized>(mean: f64, rng: &mut R) -> usize {
    if mean <= 0.0 {
        return 0;
    }
    let dist = Poisson::new(mean).expect("positive finite Poisson mean");
    let n: f64 = dist.sample(rng);
    n as usize
}

/// Uniform point on the disk of radius `radius` by radial generation.
pub fn sample_uniform_disk<R: Rng + ?Sized>(radius: f64, rng: &mut R) -> PolarPoint {
    let u: f64 = rng.random();
    let theta: f64 = rng.random::<f64>() * TAU;
    PolarPoint { r: radius * u.sqrt(), theta }
}

/// Samples an HPPP of intensity `lambda` on the disk of radius `radius`.
pub fn sample_hppp<R: Rng + ?Sized>(lambda: f64, radius: f64, rng: &mut R) -> Result<Vec<PolarPoint>> {
    ensure_non_negative("lambda", lambda)?;
    ensure_positive("radius", radius)?;
    let n = poisson_count(lambda * PI * radius * radius, rng);
    Ok((0..n).map(|_| sample_uniform_disk(radius, rng)).collect())
}

/// Samples BSs, RISs (with uniform placement angles) and UEs, in that order.
pub fn sample_realization_with<R: Rng + ?Sized>(config: &PointProcessConfig, rng: &mut R) -> Result<NetworkRealization> {
    config.validate()?;
    let bs = sample_hppp(config.lambda_n, config.radius, rng)?;
    let ris = sample_hppp(config.lambda_m, config.radius, rng)?
        .into_iter()
        .map(|position| RisSite { position, kappa: rng.random::<f64>() * TAU })
        .collect();
    let ue = sample_hppp(config.lambda_u, config.radius, rng)?;
    Ok(NetworkRealization { bs, ris, ue })
}

/// Realization number `index` of the experiment seeded by `config.seed`.
pub fn sample_realization(config: &PointProcessConfig, index: u64) -> Result<NetworkRealization> {
    let mut rng: SimRng = substream(config.seed, index);
    sample_realization_with(config, &mut rng)
}

/// Density of the normalized Voronoi cell area (gamma approximation).
pub fn voronoi_area_pdf(x: f64) -> Result<f64> {
    ensure_non_negative("x", x)?;
    if x == 0.0 {
        return Ok(0.0);
    }
    let k = CELL_SHAPE;
    let log = k * k.ln() - crate::analytic::special::ln_gamma(k) + (k - 1.0) * x.ln() - k * x;
    Ok(log.exp())
}

/// Probability that a BS has at least one UE in its cell.
pub fn active_bs_probability(lambda_u: f64, lambda_n: f64) -> Result<f64> {
    ensure_non_negative("lambda_u", lambda_u)?;
    ensure_positive("lambda_n", lambda_n)?;
    Ok(1.0 - (1.0 + lambda_u / (CELL_SHAPE * lambda_n)).powf(-CELL_SHAPE))
}

/// Intensity of active BSs, `p_active * lambda_n`.
pub fn active_bs_intensity(lambda_u: f64, lambda_n: f64) -> Result<f64> {
    Ok(active_bs_probability(lambda_u, lambda_n)? * lambda_n)
}

/// BS intensity that yields `lambda_active` active BSs when the UE intensity
/// is `ue_ratio` times the BS intensity.
pub fn bs_intensity_for_active(lambda_active: f64, ue_ratio: f64) -> Result<f64> {
    ensure_non_negative("lambda_active", lambda_active)?;
    ensure_positive("ue_ratio", ue_ratio)?;
    Ok(lambda_active / active_bs_probability(ue_ratio, 1.0)?)
}

/// Normalization of the RIS-in-cell probability.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CellNormalization {
    /// `1/Γ(3.5)`, so the probability is exactly 1 at zero distance.
    #[default]
    Exact,
    /// The rounded coefficient 0.3.
    Rounded,
}

impl CellNormalization {
    pub fn coefficient(self) -> f64 {
        match self {
            CellNormalization::Exact => 1.0 / gamma(CELL_SHAPE),
            CellNormalization::Rounded => 0.3,
        }
    }
}

/// Probability that a RIS at distance `d_i` from an active BS lies in that BS's cell.
pub fn ris_in_cell_probability(lambda_active: f64, d_i: f64, norm: CellNormalization) -> Result<f64> {
    ensure_positive("lambda_active", lambda_active)?;
    if !(d_i >= 0.0) {
        return invalid(format!("d_I must be >= 0, got {d_i}"));
    }
    let x = CELL_SHAPE * PI * lambda_active * d_i * d_i;
    Ok(norm.coefficient() * upper_incomplete_gamma(CELL_SHAPE, x)?)
}

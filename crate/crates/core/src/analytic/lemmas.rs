//! Campbell sums and generating functionals over pairs of independent
//! homogeneous Poisson processes, for functions of the two distances to the
//! origin.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::analytic::quad::{integrate_to_infinity, QuadratureConfig};
use crate::error::{ensure_non_negative, ensure_positive, Error, Result};
use crate::ppp::sample_hppp;
use crate::rng::substream;
use crate::stats::{Estimate, MeanAccumulator};

fn double_integral<F: Fn(f64, f64) -> f64>(f: F, quad: &QuadratureConfig) -> Result<f64> {
    let mut failure = None;
    let v = integrate_to_infinity(
        |y| match integrate_to_infinity(|x| f(x, y) * x, 0.0, 1.0, quad) {
            Ok(r) => r.value * y,
            Err(e) => {
                failure.get_or_insert(e);
                0.0
            }
        },
        0.0,
        1.0,
        quad,
    )?
    .value;
    match failure {
        Some(e) => Err(e),
        None if v.is_finite() => Ok(v),
        None => Err(Error::Divergent("double integral is not finite".into())),
    }
}

/// `E[Σ_n Σ_m f(|x_n|, |y_m|)] = 4π² λ_n λ_m ∬ f(x, y) x y dx dy`.
pub fn ternary_campbell<F: Fn(f64, f64) -> f64>(f: F, lambda_n: f64, lambda_m: f64, quad: &QuadratureConfig) -> Result<f64> {
    ensure_non_negative("lambda_n", lambda_n)?;
    ensure_non_negative("lambda_m", lambda_m)?;
    if lambda_n == 0.0 || lambda_m == 0.0 {
        return Ok(0.0);
    }
    Ok(4.0 * PI * PI * lambda_n * lambda_m * double_integral(f, quad)?)
}

/// Approximations of `E[Π_n Π_m f(|x_n|, |y_m|)]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PgflApprox {
    /// `exp(−4π² λ_n λ_m ∬ (1 − f) x y dx dy)`.
    pub symmetric: f64,
    /// `exp(−2π λ_m ∫ (1 − exp(−2π λ_n ∫ (1 − f) x dx)) y dy)`, the form
    /// before the inner exponential is linearized.
    pub nested: f64,
}

impl PgflApprox {
    /// Relative gap between the two forms.
    pub fn gap(&self) -> f64 {
        (self.symmetric - self.nested).abs() / self.nested.abs().max(f64::MIN_POSITIVE)
    }
}

pub fn ternary_pgfl_approx<F: Fn(f64, f64) -> f64>(f: F, lambda_n: f64, lambda_m: f64, quad: &QuadratureConfig) -> Result<PgflApprox> {
    ensure_non_negative("lambda_n", lambda_n)?;
    ensure_non_negative("lambda_m", lambda_m)?;
    if lambda_n == 0.0 || lambda_m == 0.0 {
        return Ok(PgflApprox { symmetric: 1.0, nested: 1.0 });
    }
    let deficit = |x: f64, y: f64| 1.0 - f(x, y);
    let symmetric = (-4.0 * PI * PI * lambda_n * lambda_m * double_integral(deficit, quad)?).exp();
    let mut failure = None;
    let outer = integrate_to_infinity(
        |y| match integrate_to_infinity(|x| deficit(x, y) * x, 0.0, 1.0, quad) {
            Ok(r) => -(-2.0 * PI * lambda_n * r.value).exp_m1() * y,
            Err(e) => {
                failure.get_or_insert(e);
                0.0
            }
        },
        0.0,
        1.0,
        quad,
    )?
    .value;
    if let Some(e) = failure {
        return Err(e);
    }
    Ok(PgflApprox { symmetric, nested: (-2.0 * PI * lambda_m * outer).exp() })
}

/// Settings of the brute-force estimators: both processes are sampled on a
/// disk of `radius` around the origin, so the function must be negligible
/// beyond it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BruteForce {
    pub radius: f64,
    pub realizations: usize,
    pub seed: u64,
}

impl BruteForce {
    fn sample<F: FnMut(&[f64], &[f64]) -> f64>(&self, lambda_n: f64, lambda_m: f64, mut stat: F) -> Result<Estimate> {
        ensure_positive("radius", self.radius)?;
        if self.realizations < 2 {
            return Err(Error::InvalidArgument("need at least 2 realizations".into()));
        }
        let mut acc = MeanAccumulator::default();
        for i in 0..self.realizations {
            let mut rng = substream(self.seed, i as u64);
            let n: Vec<f64> = sample_hppp(lambda_n, self.radius, &mut rng)?.iter().map(|p| p.r).collect();
            let m: Vec<f64> = sample_hppp(lambda_m, self.radius, &mut rng)?.iter().map(|p| p.r).collect();
            acc.push(stat(&n, &m));
        }
        Ok(acc.estimate())
    }

    /// Sample mean of `Σ_n Σ_m f(|x_n|, |y_m|)`.
    pub fn campbell<F: Fn(f64, f64) -> f64>(&self, f: F, lambda_n: f64, lambda_m: f64) -> Result<Estimate> {
        self.sample(lambda_n, lambda_m, |n, m| n.iter().map(|&x| m.iter().map(|&y| f(x, y)).sum::<f64>()).sum())
    }

    /// Sample mean of `Π_n Π_m f(|x_n|, |y_m|)`.
    pub fn pgfl<F: Fn(f64, f64) -> f64>(&self, f: F, lambda_n: f64, lambda_m: f64) -> Result<Estimate> {
        self.sample(lambda_n, lambda_m, |n, m| n.iter().map(|&x| m.iter().map(|&y| f(x, y)).product::<f64>()).product())
    }
}

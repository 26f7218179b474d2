//! Special functions. Gamma-family values come from `statrs`; the rest are
//! thin compositions on top of it.

use std::f64::consts::{LN_2, PI};

use statrs::function::{erf, gamma as sg};

use crate::error::{invalid, Result};

pub fn gamma(x: f64) -> f64 {
    sg::gamma(x)
}

pub fn ln_gamma(x: f64) -> f64 {
    sg::ln_gamma(x)
}

/// Upper incomplete gamma function Γ(a, x) (not regularized).
pub fn upper_incomplete_gamma(a: f64, x: f64) -> Result<f64> {
    if !(a > 0.0) || !a.is_finite() || !(x >= 0.0) {
        return invalid(format!("upper incomplete gamma needs a > 0, x >= 0; got a={a}, x={x}"));
    }
    if x == 0.0 {
        return Ok(gamma(a));
    }
    if x.is_infinite() {
        return Ok(0.0);
    }
    let q = sg::checked_gamma_ur(a, x).map_err(|e| crate::Error::InvalidArgument(e.to_string()))?;
    Ok(q * gamma(a))
}

/// Beta function B(a, b).
pub fn beta(a: f64, b: f64) -> f64 {
    (ln_gamma(a) + ln_gamma(b) - ln_gamma(a + b)).exp()
}

/// Binomial coefficient C(n, k) as a float.
pub fn binomial(n: u32, k: u32) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// `n!` as a float.
pub fn factorial(n: u32) -> f64 {
    (1..=n).fold(1.0, |acc, i| acc * i as f64)
}

/// E|h| for a Nakagami(m, 1) amplitude: Γ(m+½) / (Γ(m)·√m).
pub fn nakagami_mean(m: f64) -> f64 {
    (ln_gamma(m + 0.5) - ln_gamma(m)).exp() / m.sqrt()
}

/// Standard normal CDF.
pub fn norm_cdf(x: f64) -> f64 {
    0.5 * erf::erfc(-x / std::f64::consts::SQRT_2)
}

/// ln Φ(x), accurate far into the lower tail.
pub fn ln_norm_cdf(x: f64) -> f64 {
    if x > -30.0 {
        return norm_cdf(x).ln();
    }
    // Asymptotic series of the Mills ratio.
    let x2 = x * x;
    let series = 1.0 - 1.0 / x2 + 3.0 / (x2 * x2) - 15.0 / (x2 * x2 * x2);
    -0.5 * x2 - (-x).ln() - 0.5 * (2.0 * PI).ln() + series.ln()
}

pub fn log2(x: f64) -> f64 {
    x.ln() / LN_2
}

//! Small statistical helpers shared by the simulator, the harness and the
//! test suites: confidence intervals and goodness-of-fit statistics.

use serde::{Deserialize, Serialize};
use statrs::distribution::{ChiSquared, ContinuousCDF};

/// Two-sided 95% normal quantile.
pub const Z95: f64 = 1.959_963_984_540_054;

/// Point estimate with a 95% confidence interval.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub value: f64,
    pub lower: f64,
    pub upper: f64,
}

impl Estimate {
    pub fn half_width(&self) -> f64 {
        0.5 * (self.upper - self.lower)
    }

    pub fn contains(&self, x: f64) -> bool {
        self.lower <= x && x <= self.upper
    }
}

/// Wilson score interval for `successes` out of `trials`.
pub fn wilson_interval(successes: u64, trials: u64) -> Estimate {
    if trials == 0 {
        return Estimate { value: 0.0, lower: 0.0, upper: 1.0 };
    }
    let n = trials as f64;
    let p = successes as f64 / n;
    let z2 = Z95 * Z95;
    let denom = 1.0 + z2 / n;
    let centre = (p + z2 / (2.0 * n)) / denom;
    let half = Z95 * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt() / denom;
    Estimate {
        value: p,
        lower: if successes == 0 { 0.0 } else { (centre - half).max(0.0) },
        upper: if successes >= trials { 1.0 } else { (centre + half).min(1.0) },
    }
}

/// Running mean/variance (Welford), mergeable in a fixed order.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct MeanAccumulator {
    count: u64,
    mean: f64,
    m2: f64,
}

impl MeanAccumulator {
    pub fn push(&mut self, x: f64) {
        self.count += 1;
        let delta = x - self.mean;
        self.mean += delta / self.count as f64;
        self.m2 += delta * (x - self.mean);
    }

    pub fn merge(&mut self, other: &MeanAccumulator) {
        if other.count == 0 {
            return;
        }
        if self.count == 0 {
            *self = *other;
            return;
        }
        let n = (self.count + other.count) as f64;
        let delta = other.mean - self.mean;
        self.mean += delta * other.count as f64 / n;
        self.m2 += other.m2 + delta * delta * self.count as f64 * other.count as f64 / n;
        self.count += other.count;
    }

    pub fn count(&self) -> u64 {
        self.count
    }

    pub fn mean(&self) -> f64 {
        self.mean
    }

    pub fn variance(&self) -> f64 {
        if self.count < 2 {
            0.0
        } else {
            self.m2 / (self.count - 1) as f64
        }
    }

    pub fn std_error(&self) -> f64 {
        if self.count == 0 {
            0.0
        } else {
            (self.variance() / self.count as f64).sqrt()
        }
    }

    /// Normal-approximation 95% interval for the mean.
    pub fn estimate(&self) -> Estimate {
        let h = Z95 * self.std_error();
        Estimate { value: self.mean, lower: self.mean - h, upper: self.mean + h }
    }
}

impl FromIterator<f64> for MeanAccumulator {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut acc = MeanAccumulator::default();
        for x in iter {
            acc.push(x);
        }
        acc
    }
}

/// One-sample Kolmogorov–Smirnov statistic of `sample` against `cdf`.
pub fn ks_statistic<F: Fn(f64) -> f64>(sample: &[f64], cdf: F) -> f64 {
    let mut xs = sample.to_vec();
    xs.sort_by(f64::total_cmp);
    let n = xs.len() as f64;
    xs.iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = cdf(x);
            (f - i as f64 / n).max((i + 1) as f64 / n - f)
        })
        .fold(0.0, f64::max)
}

/// Two-sample Kolmogorov–Smirnov statistic.
pub fn ks_two_sample_statistic(a: &[f64], b: &[f64]) -> f64 {
    let mut xa = a.to_vec();
    let mut xb = b.to_vec();
    xa.sort_by(f64::total_cmp);
    xb.sort_by(f64::total_cmp);
    let (na, nb) = (xa.len() as f64, xb.len() as f64);
    let (mut i, mut j, mut d) = (0usize, 0usize, 0.0f64);
    while i < xa.len() && j < xb.len() {
        let x = xa[i].min(xb[j]);
        while i < xa.len() && xa[i] <= x {
            i += 1;
        }
        while j < xb.len() && xb[j] <= x {
            j += 1;
        }
        d = d.max((i as f64 / na - j as f64 / nb).abs());
    }
    d
}

/// Asymptotic p-value of a KS statistic `d` with effective sample size `n`
/// (Stephens' small-sample correction).
pub fn ks_p_value(d: f64, n: f64) -> f64 {
    let sqrt_n = n.sqrt();
    let lambda = (sqrt_n + 0.12 + 0.11 / sqrt_n) * d;
    if lambda < 1e-3 {
        return 1.0;
    }
    let mut sum = 0.0;
    for k in 1..=100 {
        let k = k as f64;
        let term = (-2.0 * k * k * lambda * lambda).exp();
        sum += if k as u64 % 2 == 1 { term } else { -term };
        if term < 1e-12 {
            break;
        }
    }
    (2.0 * sum).clamp(0.0, 1.0)
}

/// Effective sample size for the two-sample KS p-value.
pub fn ks_two_sample_n(na: usize, nb: usize) -> f64 {
    let (a, b) = (na as f64, nb as f64);
    a * b / (a + b)
}

/// Pearson chi-square p-value: upper tail of `statistic` with `dof` degrees of freedom.
pub fn chi_square_p_value(statistic: f64, dof: usize) -> f64 {
    match ChiSquared::new(dof as f64) {
        Ok(dist) => 1.0 - dist.cdf(statistic),
        Err(_) => f64::NAN,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn wilson_brackets_the_proportion() {
        let e = wilson_interval(30, 100);
        assert!((e.value - 0.3).abs() < 1e-12);
        assert!(e.lower < 0.3 && e.upper > 0.3);
        // Known value: Wilson 95% for 30/100 is [0.2189, 0.3958].
        assert!((e.lower - 0.2189).abs() < 5e-4);
        assert!((e.upper - 0.3958).abs() < 5e-4);
        let z = wilson_interval(0, 50);
        assert_eq!(z.lower, 0.0);
        assert!(z.upper > 0.0);
    }

    #[test]
    fn accumulator_merge_matches_single_pass() {
        let xs: Vec<f64> = (0..100).map(|i| ((i * 37) % 11) as f64 * 0.5).collect();
        let whole: MeanAccumulator = xs.iter().copied().collect();
        let mut left: MeanAccumulator = xs[..40].iter().copied().collect();
        let right: MeanAccumulator = xs[40..].iter().copied().collect();
        left.merge(&right);
        assert!((whole.mean() - left.mean()).abs() < 1e-12);
        assert!((whole.variance() - left.variance()).abs() < 1e-10);
    }

    #[test]
    fn ks_statistic_of_exact_quantiles_is_small() {
        let n = 1000;
        let sample: Vec<f64> = (0..n).map(|i| (i as f64 + 0.5) / n as f64).collect();
        let d = ks_statistic(&sample, |x| x.clamp(0.0, 1.0));
        assert!(d <= 0.5 / n as f64 + 1e-12);
        assert!(ks_p_value(d, n as f64) > 0.99);
    }

    #[test]
    fn ks_p_value_critical_point() {
        // 1% critical value of the asymptotic Kolmogorov distribution is 1.6276.
        let n: f64 = 1e6;
        let d = 1.6276 / n.sqrt();
        assert!((ks_p_value(d, n) - 0.01).abs() < 5e-4);
    }

    #[test]
    fn two_sample_ks_detects_shift() {
        let a: Vec<f64> = (0..500).map(|i| i as f64 / 500.0).collect();
        let b: Vec<f64> = a.iter().map(|x| x + 0.2).collect();
        let d = ks_two_sample_statistic(&a, &b);
        assert!((d - 0.2).abs() < 0.01);
        assert!(ks_p_value(d, ks_two_sample_n(500, 500)) < 1e-3);
    }

    #[test]
    fn chi_square_tail() {
        // P[chi2_2 > 2 ln 100] = 0.01
        let p = chi_square_p_value(2.0 * 100f64.ln(), 2);
        assert!((p - 0.01).abs() < 1e-9);
    }
}

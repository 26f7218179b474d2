//! Reference implementations that share no code with the library: point
//! sampling, association and SINR evaluation are written out directly.

#![allow(dead_code)]

use std::f64::consts::{PI, TAU};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Gamma, Poisson};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Homogeneous Poisson points on the disk of radius `radius`, as `(x, y)`.
pub fn poisson_disk(lambda: f64, radius: f64, rng: &mut ChaCha8Rng) -> Vec<(f64, f64)> {
    let mean = lambda * PI * radius * radius;
    if mean <= 0.0 {
        return Vec::new();
    }
    let n = Poisson::new(mean).unwrap().sample(rng) as usize;
    (0..n)
        .map(|_| {
            let r = radius * rng.random::<f64>().sqrt();
            let t = TAU * rng.random::<f64>();
            (r * t.cos(), r * t.sin())
        })
        .collect()
}

/// Index of the point of `set` closest to `p` by exhaustive scan.
pub fn min_scan(set: &[(f64, f64)], p: (f64, f64)) -> usize {
    let mut best = 0;
    let mut best_d = f64::INFINITY;
    for (i, q) in set.iter().enumerate() {
        let d = (q.0 - p.0).powi(2) + (q.1 - p.1).powi(2);
        if d < best_d {
            best_d = d;
            best = i;
        }
    }
    best
}

/// Settings of a network without RISs.
#[derive(Debug, Clone, Copy)]
pub struct ClassicalNetwork {
    pub lambda_n: f64,
    pub lambda_u: f64,
    pub alpha: f64,
    pub varsigma: u32,
    pub p_tr: f64,
    pub noise: f64,
    pub radius: f64,
}

/// SINR of the typical UE at the origin in `drops` independent drops. BSs are
/// active when a UE (including the typical one) is closest to them; every
/// link has Nakagami power gain `Gamma(ς, 1/ς)`.
pub fn classical_sinr(net: &ClassicalNetwork, drops: usize, seed: u64) -> Vec<f64> {
    let mut rng = rng(seed);
    let gain = Gamma::new(net.varsigma as f64, 1.0 / net.varsigma as f64).unwrap();
    let mut out = Vec::with_capacity(drops);
    while out.len() < drops {
        let bs = poisson_disk(net.lambda_n, net.radius, &mut rng);
        if bs.is_empty() {
            continue;
        }
        let ue = poisson_disk(net.lambda_u, net.radius, &mut rng);
        let mut active = vec![false; bs.len()];
        let serving = min_scan(&bs, (0.0, 0.0));
        active[serving] = true;
        for &u in &ue {
            active[min_scan(&bs, u)] = true;
        }
        let loss = |b: (f64, f64)| (1.0 + b.0.hypot(b.1)).powf(-net.alpha);
        let signal = net.p_tr * gain.sample(&mut rng) * loss(bs[serving]);
        let mut interference = 0.0;
        for (i, &b) in bs.iter().enumerate() {
            if i != serving && active[i] {
                interference += net.p_tr * gain.sample(&mut rng) * loss(b);
            }
        }
        out.push(signal / (interference + net.noise));
    }
    out
}

/// Mean and standard error.
pub fn mean_se(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let m = xs.iter().sum::<f64>() / n;
    let v = xs.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (n - 1.0);
    (m, (v / n).sqrt())
}

/// Distances to the origin of two independent Poisson processes.
fn paired_radii(lambda_n: f64, lambda_m: f64, radius: f64, rng: &mut ChaCha8Rng) -> (Vec<f64>, Vec<f64>) {
    let r = |p: &(f64, f64)| p.0.hypot(p.1);
    let n = poisson_disk(lambda_n, radius, rng).iter().map(r).collect();
    let m = poisson_disk(lambda_m, radius, rng).iter().map(r).collect();
    (n, m)
}

/// Sample mean and standard error of `Σ_n Σ_m f(|x_n|, |y_m|)`.
pub fn brute_campbell(f: impl Fn(f64, f64) -> f64, lambda_n: f64, lambda_m: f64, radius: f64, realizations: usize, seed: u64) -> (f64, f64) {
    let mut rng = rng(seed);
    let samples: Vec<f64> = (0..realizations)
        .map(|_| {
            let (n, m) = paired_radii(lambda_n, lambda_m, radius, &mut rng);
            n.iter().map(|&x| m.iter().map(|&y| f(x, y)).sum::<f64>()).sum()
        })
        .collect();
    mean_se(&samples)
}

/// Sample mean and standard error of `Π_n Π_m f(|x_n|, |y_m|)`.
pub fn brute_pgfl(f: impl Fn(f64, f64) -> f64, lambda_n: f64, lambda_m: f64, radius: f64, realizations: usize, seed: u64) -> (f64, f64) {
    let mut rng = rng(seed);
    let samples: Vec<f64> = (0..realizations)
        .map(|_| {
            let (n, m) = paired_radii(lambda_n, lambda_m, radius, &mut rng);
            n.iter().map(|&x| m.iter().map(|&y| f(x, y).ln()).sum::<f64>()).sum::<f64>().exp()
        })
        .collect();
    mean_se(&samples)
}

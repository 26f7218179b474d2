//! Network drops around a typical UE at the origin and the empirical metrics
//! computed from them.
//!
//! Every drop samples BSs, RISs and (in the exact activity mode) UEs on a
//! disk centred on the typical UE. The typical UE is served by its nearest
//! BS. A RIS is served by its own nearest BS; it co-phases its elements for
//! the typical UE only when that BS is the typical UE's BS and its face can
//! reflect between them. Every other RIS path to the typical UE has
//! unmatched phases.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::channel::{
    cascade_distribution, path_loss_power, sample_served_amplitude_approx, sample_unserved_cascade_approx,
    ChannelSampler, NakagamiChannel, RisLink,
};
use crate::error::{ensure_positive, invalid, Error, Result};
use crate::geometry::{build_triangle_xy, NearestIndex};
use crate::ppp::{sample_hppp, PolarPoint, RisSite};
pub use crate::scenario::Scenario;
use crate::rng::substream;
use crate::stats::{wilson_interval, Estimate, MeanAccumulator};

use rand::distr::{Distribution, Uniform};

/// How interfering BSs are switched on.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ActivityModel {
    /// Sample UEs; a BS is active iff at least one UE is nearest to it.
    #[default]
    Exact,
    /// Keep each BS independently with the active-BS probability.
    Thinned,
}

/// How RIS cascade channels are drawn.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CascadeModel {
    /// Element-wise channels and phases.
    #[default]
    Exact,
    /// Gaussian amplitude for co-phased cascades and `CN(0, Q)` otherwise.
    Approx,
    /// `Exact` for Rayleigh fading or at most [`AUTO_EXACT_MAX_Q`] elements,
    /// `Approx` otherwise.
    Auto,
}

pub const AUTO_EXACT_MAX_Q: u32 = 64;

impl CascadeModel {
    /// Whether cascades of `scenario` are drawn element by element.
    pub fn is_exact(self, scenario: &Scenario) -> bool {
        match self {
            CascadeModel::Exact => true,
            CascadeModel::Approx => false,
            CascadeModel::Auto => scenario.fading.varsigma == 1 || scenario.fading.q <= AUTO_EXACT_MAX_Q,
        }
    }
}

/// Simulation controls that do not change the model.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SimOptions {
    pub seed: u64,
    /// Explicit window radius; otherwise `guard_factor / sqrt(π λ')`.
    pub window_radius: Option<f64>,
    pub guard_factor: f64,
    /// RISs farther than this from the typical UE are ignored.
    pub ris_radius: f64,
    pub activity: ActivityModel,
    pub cascade: CascadeModel,
    pub max_resample: usize,
}

impl Default for SimOptions {
    fn default() -> Self {
        SimOptions {
            seed: 1,
            window_radius: None,
            guard_factor: 10.0,
            ris_radius: 40.0,
            activity: ActivityModel::Exact,
            cascade: CascadeModel::Exact,
            max_resample: 100,
        }
    }
}

impl SimOptions {
    pub fn window(&self, lambda_active: f64) -> f64 {
        self.window_radius.unwrap_or(self.guard_factor / (PI * lambda_active).sqrt())
    }

    pub fn validate(&self) -> Result<()> {
        if let Some(r) = self.window_radius {
            ensure_positive("window_radius", r)?;
        }
        ensure_positive("guard_factor", self.guard_factor)?;
        ensure_positive("ris_radius", self.ris_radius)
    }
}

/// Geometry of one drop as seen from the typical UE at the origin.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DropLayout {
    pub bs: Vec<PolarPoint>,
    pub active: Vec<bool>,
    pub serving: usize,
    pub ris: Vec<RisSite>,
    pub ris_to_bs: Vec<usize>,
}

impl DropLayout {
    /// Builds the layout from explicit point sets; activity follows the
    /// UE association rule with the typical UE added at the origin.
    pub fn from_points(bs: Vec<PolarPoint>, ris: Vec<RisSite>, ue: &[PolarPoint]) -> Result<Self> {
        let index = NearestIndex::new(&bs)?;
        let serving = index.nearest_xy(0.0, 0.0).0;
        let mut active = vec![false; bs.len()];
        active[serving] = true;
        for u in ue {
            active[index.nearest(u)] = true;
        }
        let ris_to_bs = ris.iter().map(|s| index.nearest(&s.position)).collect();
        Ok(DropLayout { bs, active, serving, ris, ris_to_bs })
    }

    pub fn sample<R: Rng + ?Sized>(scenario: &Scenario, opts: &SimOptions, rng: &mut R) -> Result<Self> {
        let radius = opts.window(scenario.lambda_active);
        let lambda_n = scenario.lambda_n();
        let mut bs = Vec::new();
        for _ in 0..=opts.max_resample {
            bs = sample_hppp(lambda_n, radius, rng)?;
            if !bs.is_empty() {
                break;
            }
        }
        if bs.is_empty() {
            return Err(Error::Degenerate(format!(
                "no BS in a window of radius {radius} after {} attempts",
                opts.max_resample + 1
            )));
        }
        let kappa = Uniform::new(0.0, std::f64::consts::TAU).expect("valid range");
        let ris: Vec<RisSite> = sample_hppp(scenario.lambda_m, radius, rng)?
            .into_iter()
            .map(|position| RisSite { position, kappa: kappa.sample(rng) })
            .collect();
        match opts.activity {
            ActivityModel::Exact => {
                let ue = sample_hppp(scenario.lambda_u(), radius, rng)?;
                DropLayout::from_points(bs, ris, &ue)
            }
            ActivityModel::Thinned => {
                let p = scenario.activity();
                let index = NearestIndex::new(&bs)?;
                let serving = index.nearest_xy(0.0, 0.0).0;
                let active = (0..bs.len()).map(|i| i == serving || rng.random::<f64>() < p).collect();
                let ris_to_bs = ris.iter().map(|s| index.nearest(&s.position)).collect();
                Ok(DropLayout { bs, active, serving, ris, ris_to_bs })
            }
        }
    }

    pub fn serving_distance(&self) -> f64 {
        self.bs[self.serving].r
    }
}

/// Received signal components of one drop, at unit transmit power.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SignalComponents {
    /// Direct path from the serving BS.
    pub d1: Complex64,
    /// All RIS paths carrying the serving BS's signal.
    pub d2: Complex64,
    /// Direct interference power.
    pub i1: f64,
    /// Interference power through RISs.
    pub i2: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DropResult {
    pub sinr: f64,
    /// `P_tr |D1 + D2|²` (W).
    pub signal_power: f64,
    /// `P_tr (I1 + I2)` (W).
    pub interference_power: f64,
    pub n_active_bs: usize,
    /// RISs co-phased for the typical UE.
    pub n_serving_ris: usize,
    /// RISs associated with the serving BS.
    pub n_cell_ris: usize,
    pub serving_distance: f64,
    pub components: SignalComponents,
}

/// Evaluates the received signal of the typical UE for a fixed layout.
pub fn evaluate_drop<S: ChannelSampler, R: Rng + ?Sized>(
    layout: &DropLayout,
    scenario: &Scenario,
    opts: &SimOptions,
    sampler: &S,
    rng: &mut R,
) -> DropResult {
    let alpha = scenario.fading.alpha;
    let q = scenario.fading.q as usize;
    let stats = cascade_distribution(scenario.fading.varsigma, scenario.fading.q);
    let exact = opts.cascade.is_exact(scenario);
    let serving = layout.serving;
    let bs_xy: Vec<(f64, f64)> = layout.bs.iter().map(PolarPoint::xy).collect();
    let interferers: Vec<usize> = (0..layout.bs.len()).filter(|&n| n != serving && layout.active[n]).collect();

    let h = sampler.direct(rng);
    let d1 = h * path_loss_power(layout.serving_distance(), alpha).sqrt();
    let i1: f64 = interferers
        .iter()
        .map(|&n| sampler.direct(rng).norm_sqr() * path_loss_power(layout.bs[n].r, alpha))
        .sum();
    let h_dir = if h.norm() > 0.0 { h / h.norm() } else { Complex64::new(1.0, 0.0) };

    let mut d2 = Complex64::new(0.0, 0.0);
    let mut i2 = 0.0;
    let mut n_serving_ris = 0;
    let mut n_cell_ris = 0;
    for (m, site) in layout.ris.iter().enumerate() {
        if layout.ris_to_bs[m] == serving {
            n_cell_ris += 1;
        }
        let d_r = site.position.r;
        if d_r > opts.ris_radius {
            continue;
        }
        let ris_xy = site.position.xy();
        let loss_r = path_loss_power(d_r, alpha);
        let link = exact.then(|| RisLink::sample(sampler, q, rng));
        let unmatched = |rng: &mut R| match &link {
            Some(link) => sampler.random_cascade(&link.w, rng),
            None => sample_unserved_cascade_approx(scenario.fading.q, rng),
        };

        let tri = build_triangle_xy(bs_xy[serving], ris_xy, (0.0, 0.0));
        if tri.reflects(site.kappa) {
            let amp = (path_loss_power(tri.d_i, alpha) * loss_r).sqrt();
            let cascade = if layout.ris_to_bs[m] == serving {
                n_serving_ris += 1;
                match &link {
                    Some(link) => link.matched(h),
                    None => h_dir * sample_served_amplitude_approx(&stats, rng),
                }
            } else {
                unmatched(rng)
            };
            d2 += cascade * amp;
        }
        for &n in &interferers {
            let tri = build_triangle_xy(bs_xy[n], ris_xy, (0.0, 0.0));
            if tri.reflects(site.kappa) {
                i2 += unmatched(rng).norm_sqr() * path_loss_power(tri.d_i, alpha) * loss_r;
            }
        }
    }

    let p_tr = scenario.power.p_tr;
    let signal_power = p_tr * (d1 + d2).norm_sqr();
    let interference_power = p_tr * (i1 + i2);
    DropResult {
        sinr: signal_power / (interference_power + scenario.power.sigma_n2),
        signal_power,
        interference_power,
        n_active_bs: interferers.len() + 1,
        n_serving_ris,
        n_cell_ris,
        serving_distance: layout.serving_distance(),
        components: SignalComponents { d1, d2, i1, i2 },
    }
}

/// Monte Carlo engine for one scenario.
#[derive(Debug, Clone)]
pub struct Simulator {
    pub scenario: Scenario,
    pub options: SimOptions,
    channel: NakagamiChannel,
}

impl Simulator {
    pub fn new(scenario: Scenario, options: SimOptions) -> Result<Self> {
        scenario.validate()?;
        options.validate()?;
        let channel = NakagamiChannel::new(scenario.fading.varsigma)?;
        Ok(Simulator { scenario, options, channel })
    }

    /// Drop number `index`; depends only on the seed and the index.
    pub fn run_drop(&self, index: u64) -> Result<DropResult> {
        let mut rng = substream(self.options.seed, index);
        let layout = DropLayout::sample(&self.scenario, &self.options, &mut rng)?;
        Ok(evaluate_drop(&layout, &self.scenario, &self.options, &self.channel, &mut rng))
    }

    /// Drops `0..n_drops`, in index order.
    pub fn run(&self, n_drops: usize) -> Result<Vec<DropResult>> {
        (0..n_drops as u64).into_par_iter().map(|i| self.run_drop(i)).collect()
    }

    pub fn run_serial(&self, n_drops: usize) -> Result<Vec<DropResult>> {
        (0..n_drops as u64).map(|i| self.run_drop(i)).collect()
    }

    pub fn summarize(&self, n_drops: usize, thresholds: &[f64]) -> Result<SimSummary> {
        if n_drops == 0 {
            return invalid("at least one drop is required");
        }
        Ok(SimSummary::from_drops(&self.run(n_drops)?, thresholds, self.scenario.lambda_active))
    }
}

/// Aggregate statistics of a set of drops.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimSummary {
    pub n_drops: usize,
    /// `(threshold, coverage)` pairs.
    pub coverage: Vec<(f64, Estimate)>,
    pub ase: Estimate,
    pub signal_power: Estimate,
    pub interference_power: Estimate,
    pub direct_power: Estimate,
    pub reflected_power: Estimate,
    pub i1_power: Estimate,
    pub i2_power: Estimate,
    /// Share of RISs in the serving cell that can reflect to the typical UE.
    pub reflection_fraction: f64,
}

impl SimSummary {
    pub fn from_drops(drops: &[DropResult], thresholds: &[f64], lambda_active: f64) -> Self {
        let acc = |f: &dyn Fn(&DropResult) -> f64| -> MeanAccumulator { drops.iter().map(f).collect() };
        let p_tr_of = |d: &DropResult| {
            let unit = (d.components.d1 + d.components.d2).norm_sqr();
            if unit > 0.0 {
                d.signal_power / unit
            } else {
                1.0
            }
        };
        let rate = acc(&|d| (1.0 + d.sinr).log2());
        let ase = rate.estimate();
        let coverage = thresholds
            .iter()
            .map(|&t| (t, wilson_interval(drops.iter().filter(|d| d.sinr >= t).count() as u64, drops.len() as u64)))
            .collect();
        let (cell, serving) = drops.iter().fold((0usize, 0usize), |(c, s), d| (c + d.n_cell_ris, s + d.n_serving_ris));
        SimSummary {
            n_drops: drops.len(),
            coverage,
            ase: Estimate { value: lambda_active * ase.value, lower: lambda_active * ase.lower, upper: lambda_active * ase.upper },
            signal_power: acc(&|d| d.signal_power).estimate(),
            interference_power: acc(&|d| d.interference_power).estimate(),
            direct_power: acc(&|d| p_tr_of(d) * d.components.d1.norm_sqr()).estimate(),
            reflected_power: acc(&|d| p_tr_of(d) * d.components.d2.norm_sqr()).estimate(),
            i1_power: acc(&|d| p_tr_of(d) * d.components.i1).estimate(),
            i2_power: acc(&|d| p_tr_of(d) * d.components.i2).estimate(),
            reflection_fraction: if cell == 0 { 0.0 } else { serving as f64 / cell as f64 },
        }
    }

    pub fn coverage_at(&self, threshold: f64) -> Option<Estimate> {
        self.coverage.iter().find(|(t, _)| *t == threshold).map(|(_, e)| *e)
    }
}

/// Empirical P[SINR ≥ `delta`] with a Wilson interval.
pub fn estimate_coverage(sim: &Simulator, delta: f64, n_drops: usize) -> Result<Estimate> {
    if !(delta > 0.0) {
        return invalid(format!("threshold must be > 0, got {delta}"));
    }
    Ok(sim.summarize(n_drops, &[delta])?.coverage[0].1)
}

/// Empirical mean signal and interference powers.
pub fn estimate_signal_stats(sim: &Simulator, n_drops: usize) -> Result<(Estimate, Estimate)> {
    let s = sim.summarize(n_drops, &[])?;
    Ok((s.signal_power, s.interference_power))
}

/// Empirical area spectral efficiency, `λ' E[log2(1 + SINR)]`.
pub fn estimate_ase(sim: &Simulator, n_drops: usize) -> Result<Estimate> {
    Ok(sim.summarize(n_drops, &[])?.ase)
}

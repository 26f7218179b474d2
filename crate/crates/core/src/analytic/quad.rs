//! Numerical integration: adaptive Gauss–Kronrod (7/15) with bisection, a
//! semi-infinite variant through a rational change of variable, and fixed
//! composite Gauss–Legendre rules for inner dimensions of nested integrals.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

/// Tolerances for every integral evaluated by the analytic engine.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct QuadratureConfig {
    pub rel_tol: f64,
    pub abs_tol: f64,
    /// Maximum number of subintervals of one adaptive integral.
    pub max_depth: usize,
    /// Upper limit used for improper integrals. `inf` maps the half-line
    /// onto a finite interval instead of truncating.
    pub r_max: f64,
    /// Number of nodes of the log grid used by the spectral-efficiency integral.
    pub z_grid: usize,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        QuadratureConfig { rel_tol: 1e-6, abs_tol: 1e-13, max_depth: 2000, r_max: f64::INFINITY, z_grid: 400 }
    }
}

impl QuadratureConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.rel_tol > 0.0 && self.rel_tol < 1.0) {
            return Err(Error::InvalidArgument(format!("rel_tol must lie in (0, 1), got {}", self.rel_tol)));
        }
        if !(self.r_max > 0.0) {
            return Err(Error::InvalidArgument(format!("r_max must be > 0, got {}", self.r_max)));
        }
        if self.max_depth == 0 || self.z_grid < 16 {
            return Err(Error::InvalidArgument("max_depth must be >= 1 and z_grid >= 16".into()));
        }
        Ok(())
    }

    pub fn with_rel_tol(mut self, rel_tol: f64) -> Self {
        self.rel_tol = rel_tol;
        self
    }

    /// Nodes per panel for the fixed inner rules.
    pub fn inner_nodes(&self) -> usize {
        let digits = (-self.rel_tol.log10()).clamp(2.0, 14.0);
        (8.0 + 2.0 * digits).round() as usize
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadResult {
    pub value: f64,
    pub error: f64,
    pub evaluations: usize,
}

struct Segment {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

fn kronrod<F: FnMut(f64) -> f64>(f: &mut F, a: f64, b: f64) -> Result<Segment> {
    let centre = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(centre);
    let mut kron = WGK[7] * fc;
    let mut gauss = WG[3] * fc;
    let mut fv = [0.0f64; 15];
    fv[7] = fc;
    for j in 0..7 {
        let dx = half * XGK[j];
        let f1 = f(centre - dx);
        let f2 = f(centre + dx);
        fv[j] = f1;
        fv[14 - j] = f2;
        kron += WGK[j] * (f1 + f2);
        if j % 2 == 1 {
            gauss += WG[j / 2] * (f1 + f2);
        }
    }
    if !kron.is_finite() {
        let bad = fv.iter().position(|v| !v.is_finite()).unwrap_or(7);
        let x = if bad == 7 {
            centre
        } else if bad < 7 {
            centre - half * XGK[bad]
        } else {
            centre + half * XGK[14 - bad]
        };
        return Err(Error::Divergent(format!("integrand is not finite at x = {x}")));
    }
    let mean = 0.5 * kron;
    let mut asc = WGK[7] * (fc - mean).abs();
    for j in 0..7 {
        asc += WGK[j] * ((fv[j] - mean).abs() + (fv[14 - j] - mean).abs());
    }
    let asc = asc * half.abs();
    let mut error = ((kron - gauss) * half).abs();
    if asc != 0.0 && error != 0.0 {
        error = asc * (200.0 * error / asc).powf(1.5).min(1.0);
    }
    Ok(Segment { a, b, value: kron * half, error })
}

/// Adaptive integral of `f` over the finite interval `[a, b]`.
pub fn integrate<F: FnMut(f64) -> f64>(mut f: F, a: f64, b: f64, cfg: &QuadratureConfig) -> Result<QuadResult> {
    if a == b {
        return Ok(QuadResult { value: 0.0, error: 0.0, evaluations: 0 });
    }
    if !a.is_finite() || !b.is_finite() {
        return Err(Error::InvalidArgument(format!("integrate needs finite limits, got [{a}, {b}]")));
    }
    let mut segments = vec![kronrod(&mut f, a, b)?];
    let mut evaluations = 15;
    loop {
        let value: f64 = segments.iter().map(|s| s.value).sum();
        let error: f64 = segments.iter().map(|s| s.error).sum();
        if error <= cfg.abs_tol.max(cfg.rel_tol * value.abs()) {
            return Ok(QuadResult { value, error, evaluations });
        }
        let (worst, _) = segments
            .iter()
            .enumerate()
            .max_by(|x, y| x.1.error.total_cmp(&y.1.error))
            .expect("non-empty");
        let s = segments.swap_remove(worst);
        let mid = 0.5 * (s.a + s.b);
        if segments.len() + 2 > cfg.max_depth || mid <= s.a.min(s.b) || mid >= s.a.max(s.b) {
            segments.push(s);
            let value: f64 = segments.iter().map(|s| s.value).sum();
            let error: f64 = segments.iter().map(|s| s.error).sum();
            return Err(Error::Quadrature { lower: a, upper: b, estimate: value, error, evaluations });
        }
        segments.push(kronrod(&mut f, s.a, mid)?);
        segments.push(kronrod(&mut f, mid, s.b)?);
        evaluations += 30;
    }
}

/// Adaptive integral over `[a, ∞)` via `x = a + scale·t/(1−t)`, or over
/// `[a, r_max]` when the configuration sets a finite truncation radius.
pub fn integrate_to_infinity<F: FnMut(f64) -> f64>(mut f: F, a: f64, scale: f64, cfg: &QuadratureConfig) -> Result<QuadResult> {
    if cfg.r_max.is_finite() {
        return integrate(f, a, cfg.r_max.max(a), cfg);
    }
    let scale = if scale > 0.0 && scale.is_finite() { scale } else { 1.0 };
    // Tail mass beyond x is of order x·f(x); it must shrink for a convergent integral.
    let reach = a.abs() + scale;
    let mut tail = |k: f64| {
        let x = a + reach * k;
        x.abs().max(reach) * f(x)
    };
    let (near, far) = (tail(1e8), tail(1e12));
    if !near.is_finite() || !far.is_finite() || (far.abs() >= near.abs() && far != 0.0) {
        return Err(Error::Divergent(format!("integrand does not decay on [{a}, inf)")));
    }
    integrate(
        |t| {
            if t >= 1.0 {
                return 0.0;
            }
            let u = 1.0 - t;
            let x = a + scale * t / u;
            let v = f(x);
            if v == 0.0 {
                0.0
            } else {
                v * scale / (u * u)
            }
        },
        0.0,
        1.0,
        cfg,
    )
}

/// Gauss–Legendre rule on [-1, 1].
#[derive(Debug, Clone, PartialEq)]
pub struct GaussLegendre {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl GaussLegendre {
    pub fn new(n: usize) -> Self {
        assert!(n >= 1, "Gauss-Legendre rule needs at least one node");
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        let nf = n as f64;
        for i in 0..n.div_ceil(2) {
            let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
            let mut dp = 1.0;
            for _ in 0..100 {
                let (mut p0, mut p1) = (1.0, x);
                for k in 2..=n {
                    let k = k as f64;
                    let p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                    p0 = p1;
                    p1 = p2;
                }
                let (p, pm1) = if n == 1 { (x, 1.0) } else { (p1, p0) };
                dp = nf * (x * p - pm1) / (x * x - 1.0);
                let dx = p / dp;
                x -= dx;
                if dx.abs() < 1e-15 {
                    break;
                }
            }
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            weights[i] = w;
            nodes[n - 1 - i] = x;
            weights[n - 1 - i] = w;
        }
        GaussLegendre { nodes, weights }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Nodes and weights mapped onto `[a, b]`.
    pub fn mapped(&self, a: f64, b: f64) -> impl Iterator<Item = (f64, f64)> + '_ {
        let c = 0.5 * (a + b);
        let h = 0.5 * (b - a);
        self.nodes.iter().zip(&self.weights).map(move |(x, w)| (c + h * x, h * w))
    }

    pub fn integrate<F: FnMut(f64) -> f64>(&self, mut f: F, a: f64, b: f64) -> f64 {
        self.mapped(a, b).map(|(x, w)| w * f(x)).sum()
    }

    /// Composite rule over the panels delimited by `breaks` (sorted).
    pub fn integrate_panels<F: FnMut(f64) -> f64>(&self, mut f: F, breaks: &[f64]) -> f64 {
        breaks.windows(2).map(|p| self.integrate(&mut f, p[0], p[1])).sum()
    }
}

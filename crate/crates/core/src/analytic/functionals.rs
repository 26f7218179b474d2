//! Building-block integrals of the closed-form expressions.
//!
//! The reflected-link integrals place a RIS at distance `d_i` and bearing `psi`
//! around a BS whose UE sits at distance `d_bu`; the RIS–UE distance follows
//! from the law of cosines.

use std::f64::consts::{PI, TAU};

use serde::{Deserialize, Serialize};

use crate::analytic::quad::{integrate, integrate_to_infinity, GaussLegendre, QuadratureConfig};
use crate::analytic::special::{beta, factorial};
use crate::error::{ensure_non_negative, ensure_positive, invalid, Error, Result};
use crate::ppp::{ris_in_cell_probability, CellNormalization};

/// `F(a, k) = ∫_0^∞ x (1+x)^{-a} e^{-k x²} dx`.
pub fn func_f(a: f64, k: f64, quad: &QuadratureConfig) -> Result<f64> {
    ensure_non_negative("k", k)?;
    if k == 0.0 {
        if a <= 2.0 {
            return Err(Error::Divergent(format!("∫ x(1+x)^-a dx diverges for a = {a}")));
        }
        return Ok(beta(2.0, a - 2.0));
    }
    let scale = 1.0 / k.sqrt();
    Ok(integrate_to_infinity(|x| x * (1.0 + x).powf(-a) * (-k * x * x).exp(), 0.0, scale, quad)?.value)
}

/// `G(f) = ∫_0^π (π − θ)/(2π) · f(θ) dθ/π`: the average of `f` over a
/// uniform angle, weighted by the reflection probability at that angle.
pub fn func_g<F: FnMut(f64) -> f64>(mut f: F, quad: &QuadratureConfig) -> Result<f64> {
    Ok(integrate(|t| (PI - t) / TAU * f(t) / PI, 0.0, PI, quad)?.value)
}

/// Which RISs of the plane enter a reflected-link integral.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RisSelection {
    /// Every RIS.
    All,
    /// RISs inside the BS's cell, weighted by the in-cell probability.
    InCell,
    /// RISs outside the BS's cell.
    OutOfCell,
}

/// How the RIS vertex angle of the reflection weight is obtained.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RisAngleModel {
    /// From the BS–RIS–UE triangle, as the simulator does.
    #[default]
    Triangle,
    /// The integration bearing is used as the vertex angle.
    Bearing,
}

/// Settings shared by the reflected-link integrals.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct PlaneOptions {
    pub angle_model: RisAngleModel,
    pub cell_norm: CellNormalization,
    pub quad: QuadratureConfig,
}

/// RIS–UE distance and RIS vertex angle for a RIS at (`d_i`, `psi`) around a
/// BS that is `d_bu` away from the UE.
pub fn ris_geometry(d_bu: f64, d_i: f64, psi: f64) -> (f64, f64) {
    let d_r = (d_i * d_i + d_bu * d_bu - 2.0 * d_i * d_bu * psi.cos()).max(0.0).sqrt();
    let vertex = if d_i <= 0.0 || d_r <= 0.0 {
        0.0
    } else {
        ((d_r * d_r + d_i * d_i - d_bu * d_bu) / (2.0 * d_r * d_i)).clamp(-1.0, 1.0).acos()
    };
    (d_r, vertex)
}

impl RisAngleModel {
    /// RIS–UE distance and reflection probability of the RIS at (`d_i`, `psi`).
    pub fn weight(self, d_bu: f64, d_i: f64, psi: f64) -> (f64, f64) {
        let (d_r, vertex) = ris_geometry(d_bu, d_i, psi);
        let angle = match self {
            RisAngleModel::Triangle => vertex,
            RisAngleModel::Bearing => psi,
        };
        (d_r, (PI - angle) / TAU)
    }
}

fn selection_weight(sel: RisSelection, lambda_active: f64, d_i: f64, norm: CellNormalization) -> Result<f64> {
    Ok(match sel {
        RisSelection::All => 1.0,
        RisSelection::InCell => ris_in_cell_probability(lambda_active, d_i, norm)?,
        RisSelection::OutOfCell => 1.0 - ris_in_cell_probability(lambda_active, d_i, norm)?,
    })
}

/// Reflected-link integral
/// `Q(a, d) = ∫_0^∞ d_i (1+d_i)^{-a} s(d_i) ∫_0^π w (1+d_r)^{-a} dψ/π dd_i`,
/// where `w` is the reflection probability and `s` the selection weight.
/// `2π·λ_m·Q` is the mean of `Σ β (1+d_i)^{-a} (1+d_r)^{-a}` over the RISs.
pub fn func_q(sel: RisSelection, a: f64, d_bu: f64, lambda_active: f64, opts: &PlaneOptions) -> Result<f64> {
    ensure_non_negative("d", d_bu)?;
    ensure_positive("lambda_active", lambda_active)?;
    if a <= 1.0 && sel != RisSelection::InCell {
        return Err(Error::Divergent(format!("reflected-link integral diverges for exponent {a}")));
    }
    let quad = &opts.quad;
    let mut failure = None;
    let mut radial = |d_i: f64| -> f64 {
        let s = match selection_weight(sel, lambda_active, d_i, opts.cell_norm) {
            Ok(s) => s,
            Err(e) => {
                failure.get_or_insert(e);
                return 0.0;
            }
        };
        if s == 0.0 {
            return 0.0;
        }
        let inner = integrate(
            |psi| {
                let (d_r, w) = opts.angle_model.weight(d_bu, d_i, psi);
                w * (1.0 + d_r).powf(-a)
            },
            0.0,
            PI,
            quad,
        );
        match inner {
            Ok(r) => d_i * (1.0 + d_i).powf(-a) * s * r.value / PI,
            Err(e) => {
                failure.get_or_insert(e);
                0.0
            }
        }
    };
    let near = integrate(&mut radial, 0.0, d_bu, quad)?.value;
    let far = integrate_to_infinity(&mut radial, d_bu, d_bu.max(1.0), quad)?.value;
    if let Some(e) = failure {
        return Err(e);
    }
    Ok(near + far)
}

/// Constant of the gamma tail bound `P[G ≥ x] ≈ 1 − (1 − e^{−c x})^m`.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TailConstant {
    /// `min{1, ((m+1)!)^{−1/(m+1)}}·m/(m+1)`.
    #[default]
    Loose,
    /// `m·(m!)^{−1/m}`, exact for `m = 1`.
    Tight,
}

impl TailConstant {
    pub fn value(self, varsigma: u32) -> f64 {
        let m = varsigma.max(1) as f64;
        match self {
            TailConstant::Loose => {
                let root = factorial(varsigma + 1).powf(-1.0 / (m + 1.0));
                root.min(1.0) * m / (m + 1.0)
            }
            TailConstant::Tight => m * factorial(varsigma).powf(-1.0 / m),
        }
    }
}

/// Quadrature nodes covering the RIS plane around one BS.
///
/// `Σ area · g` over the nodes approximates `∫ g dA` over the whole plane,
/// folded onto the half-plane `psi ∈ [0, π]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlaneNode {
    pub d_i: f64,
    pub d_r: f64,
    /// Area element times reflection probability.
    pub area: f64,
    /// In-cell probability of the RIS with respect to the BS.
    pub in_cell: f64,
}

/// Fixed product rule for the RIS plane around a BS at distance `d_bu` from
/// the UE. Panels are refined around the UE, where the reflected path loss
/// peaks.
/// With `lambda_active = None` the in-cell probability is not evaluated and
/// set to 1.
pub fn plane_rule(d_bu: f64, lambda_active: Option<f64>, nodes: usize, opts: &PlaneOptions) -> Result<Vec<PlaneNode>> {
    ensure_non_negative("d", d_bu)?;
    if let Some(la) = lambda_active {
        ensure_positive("lambda_active", la)?;
    }
    if nodes < 2 {
        return invalid("plane rule needs at least 2 nodes per panel");
    }
    let gl = GaussLegendre::new(nodes);
    let mut cuts: Vec<f64> = [1.0, 4.0, 16.0].into_iter().chain([-16.0, -4.0, -1.0, 0.0, 1.0, 4.0, 16.0].map(|o| d_bu + o)).collect();
    cuts.sort_by(f64::total_cmp);
    let mut radial = vec![0.0];
    for r in cuts {
        if r > *radial.last().unwrap() + 1e-9 {
            radial.push(r);
        }
    }
    let tail_start = *radial.last().unwrap();
    let mut out = Vec::with_capacity(nodes * nodes * 4 * (radial.len() + 2));
    let push_ring = |d_i: f64, w_r: f64, out: &mut Vec<PlaneNode>| -> Result<()> {
        let in_cell = match lambda_active {
            Some(la) => ris_in_cell_probability(la, d_i, opts.cell_norm)?,
            None => 1.0,
        };
        let mut breaks = vec![0.0];
        for c in [0.25, 1.0, 4.0, 16.0] {
            let b = c / d_i.max(1.0);
            if b < PI && b > *breaks.last().unwrap() {
                breaks.push(b);
            }
        }
        breaks.push(PI);
        for p in breaks.windows(2) {
            for (psi, w_a) in gl.mapped(p[0], p[1]) {
                let (d_r, refl) = opts.angle_model.weight(d_bu, d_i, psi);
                out.push(PlaneNode { d_i, d_r, area: 2.0 * d_i * w_r * w_a * refl, in_cell });
            }
        }
        Ok(())
    };
    for p in radial.windows(2) {
        for (d_i, w) in gl.mapped(p[0], p[1]) {
            push_ring(d_i, w, &mut out)?;
        }
    }
    // Tail: d_i = tail_start + s·t/(1 − t) on two panels of t.
    let s = tail_start.max(4.0);
    for p in [[0.0, 0.5], [0.5, 1.0]] {
        for (t, w) in gl.mapped(p[0], p[1]) {
            let u = 1.0 - t;
            push_ring(tail_start + s * t / u, w * s / (u * u), &mut out)?;
        }
    }
    Ok(out)
}

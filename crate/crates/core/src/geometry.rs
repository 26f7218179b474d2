//! Nearest-anchor association, BS–RIS–UE triangles and the one-sided RIS
//! reflection state.

use std::f64::consts::{PI, TAU};

use serde::{Deserialize, Serialize};

use crate::error::{ensure_non_negative, ensure_positive, invalid, Result};
use crate::ppp::{NetworkRealization, PolarPoint};

/// Uniform-grid index over a fixed set of anchor points.
///
/// Queries return the anchor with the smallest Euclidean distance; ties go to
/// the lowest anchor index.
#[derive(Debug, Clone)]
pub struct NearestIndex {
    xy: Vec<(f64, f64)>,
    origin: (f64, f64),
    cell: f64,
    nx: i64,
    ny: i64,
    // anchors of cell (ix, iy) live in items[starts[k]..starts[k + 1]], k = iy * nx + ix
    starts: Vec<usize>,
    items: Vec<usize>,
}

impl NearestIndex {
    pub fn new(anchors: &[PolarPoint]) -> Result<Self> {
        Self::from_xy(anchors.iter().map(PolarPoint::xy).collect())
    }

    pub fn from_xy(xy: Vec<(f64, f64)>) -> Result<Self> {
        if xy.is_empty() {
            return invalid("nearest-anchor search needs at least one anchor");
        }
        let (mut x0, mut y0, mut x1, mut y1) = (f64::INFINITY, f64::INFINITY, f64::NEG_INFINITY, f64::NEG_INFINITY);
        for &(x, y) in &xy {
            x0 = x0.min(x);
            y0 = y0.min(y);
            x1 = x1.max(x);
            y1 = y1.max(y);
        }
        let (w, h) = ((x1 - x0).max(1e-12), (y1 - y0).max(1e-12));
        // about two anchors per cell
        let cell = (2.0 * w * h / xy.len() as f64).sqrt().max(w.max(h) / 1024.0);
        let nx = ((w / cell).floor() as i64 + 1).max(1);
        let ny = ((h / cell).floor() as i64 + 1).max(1);
        let mut counts = vec![0usize; (nx * ny) as usize + 1];
        let key = |x: f64, y: f64| -> usize {
            let ix = (((x - x0) / cell) as i64).clamp(0, nx - 1);
            let iy = (((y - y0) / cell) as i64).clamp(0, ny - 1);
            (iy * nx + ix) as usize
        };
        for &(x, y) in &xy {
            counts[key(x, y) + 1] += 1;
        }
        for k in 1..counts.len() {
            counts[k] += counts[k - 1];
        }
        let starts = counts.clone();
        let mut fill = counts;
        let mut items = vec![0usize; xy.len()];
        for (i, &(x, y)) in xy.iter().enumerate() {
            let k = key(x, y);
            items[fill[k]] = i;
            fill[k] += 1;
        }
        Ok(NearestIndex { xy, origin: (x0, y0), cell, nx, ny, starts, items })
    }

    pub fn len(&self) -> usize {
        self.xy.len()
    }

    pub fn is_empty(&self) -> bool {
        self.xy.is_empty()
    }

    /// Index of, and squared distance to, the nearest anchor.
    pub fn nearest_xy(&self, x: f64, y: f64) -> (usize, f64) {
        let cx = ((x - self.origin.0) / self.cell).floor() as i64;
        let cy = ((y - self.origin.1) / self.cell).floor() as i64;
        let gap_x = (-cx).max(cx - (self.nx - 1)).max(0);
        let gap_y = (-cy).max(cy - (self.ny - 1)).max(0);
        let first_ring = gap_x.max(gap_y);
        let last_ring = [cx, self.nx - 1 - cx, cy, self.ny - 1 - cy].iter().map(|v| v.abs()).max().unwrap_or(0);
        let mut best = (usize::MAX, f64::INFINITY);
        let visit = |ix: i64, iy: i64, best: &mut (usize, f64)| {
            let k = (iy * self.nx + ix) as usize;
            for &i in &self.items[self.starts[k]..self.starts[k + 1]] {
                let (ax, ay) = self.xy[i];
                let d2 = (ax - x) * (ax - x) + (ay - y) * (ay - y);
                if d2 < best.1 || (d2 == best.1 && i < best.0) {
                    *best = (i, d2);
                }
            }
        };
        for ring in first_ring..=last_ring {
            // only the part of the ring that overlaps the grid
            let x_lo = (cx - ring).max(0);
            let x_hi = (cx + ring).min(self.nx - 1);
            let y_lo = (cy - ring).max(0);
            let y_hi = (cy + ring).min(self.ny - 1);
            for iy in [cy - ring, cy + ring] {
                if (0..self.ny).contains(&iy) {
                    for ix in x_lo..=x_hi {
                        visit(ix, iy, &mut best);
                    }
                }
                if ring == 0 {
                    break;
                }
            }
            if ring > 0 {
                for ix in [cx - ring, cx + ring] {
                    if (0..self.nx).contains(&ix) {
                        for iy in y_lo.max(cy - ring + 1)..=y_hi.min(cy + ring - 1) {
                            visit(ix, iy, &mut best);
                        }
                    }
                }
            }
            // every anchor outside this ring is at least ring·cell away
            let reach = ring as f64 * self.cell;
            if best.0 != usize::MAX && best.1 < reach * reach {
                break;
            }
        }
        best
    }

    pub fn nearest(&self, p: &PolarPoint) -> usize {
        let (x, y) = p.xy();
        self.nearest_xy(x, y).0
    }
}

/// Index of the nearest anchor for every point (ties go to the lowest index).
pub fn associate_nearest(points: &[PolarPoint], anchors: &[PolarPoint]) -> Result<Vec<usize>> {
    let index = NearestIndex::new(anchors)?;
    Ok(points.iter().map(|p| index.nearest(p)).collect())
}

/// Serving relationships of one realization.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AssociationMap {
    pub ue_to_bs: Vec<usize>,
    pub ris_to_bs: Vec<usize>,
    /// Sorted indices of BSs with at least one UE.
    pub active_bs: Vec<usize>,
}

impl AssociationMap {
    pub fn is_active(&self, bs: usize) -> bool {
        self.active_bs.binary_search(&bs).is_ok()
    }
}

/// Associates every UE and RIS of `net` with its nearest BS.
pub fn associate(net: &NetworkRealization) -> Result<AssociationMap> {
    let index = NearestIndex::new(&net.bs)?;
    let ue_to_bs: Vec<usize> = net.ue.iter().map(|p| index.nearest(p)).collect();
    let ris_to_bs = net.ris.iter().map(|s| index.nearest(&s.position)).collect();
    let mut active = vec![false; net.bs.len()];
    for &b in &ue_to_bs {
        active[b] = true;
    }
    let active_bs = active.iter().enumerate().filter(|(_, a)| **a).map(|(i, _)| i).collect();
    Ok(AssociationMap { ue_to_bs, ris_to_bs, active_bs })
}

/// One BS–RIS–UE triangle.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TriangleBRU {
    pub d_d: f64,
    pub d_i: f64,
    pub d_r: f64,
    /// Angle at the UE between the BS and RIS directions, in [0, π].
    pub dtheta_u: f64,
    /// Angle at the RIS between the BS and UE directions, in [0, π].
    pub dtheta_m: f64,
    /// Polar angle of the RIS seen from the BS, in [0, 2π).
    pub theta_m: f64,
    /// Two of the three vertices coincide.
    pub degenerate: bool,
}

fn angle_between(ax: f64, ay: f64, bx: f64, by: f64) -> f64 {
    let cross = ax * by - ay * bx;
    let dot = ax * bx + ay * by;
    cross.abs().atan2(dot)
}

pub fn build_triangle(bs: &PolarPoint, ris: &PolarPoint, ue: &PolarPoint) -> TriangleBRU {
    let (bx, by) = bs.xy();
    let (mx, my) = ris.xy();
    let (ux, uy) = ue.xy();
    build_triangle_xy((bx, by), (mx, my), (ux, uy))
}

pub fn build_triangle_xy(bs: (f64, f64), ris: (f64, f64), ue: (f64, f64)) -> TriangleBRU {
    let (bx, by) = bs;
    let (mx, my) = ris;
    let (ux, uy) = ue;
    let d_d = (bx - ux).hypot(by - uy);
    let d_i = (mx - bx).hypot(my - by);
    let d_r = (mx - ux).hypot(my - uy);
    let degenerate = d_d == 0.0 || d_i == 0.0 || d_r == 0.0;
    let dtheta_u = if d_d > 0.0 && d_r > 0.0 { angle_between(bx - ux, by - uy, mx - ux, my - uy) } else { 0.0 };
    let dtheta_m = if d_i > 0.0 && d_r > 0.0 { angle_between(bx - mx, by - my, ux - mx, uy - my) } else { 0.0 };
    let theta_m = if d_i > 0.0 { polar_angle(mx - bx, my - by) } else { 0.0 };
    TriangleBRU { d_d, d_i, d_r, dtheta_u, dtheta_m, theta_m, degenerate }
}

fn polar_angle(x: f64, y: f64) -> f64 {
    let t = y.atan2(x).rem_euclid(TAU);
    if t >= TAU {
        0.0
    } else {
        t
    }
}

impl TriangleBRU {
    /// Triangle with the UE at the origin, the BS at distance `d_d` on the
    /// x-axis and the RIS at distance `d_r` and angle `dtheta_u`.
    pub fn from_ue_sides(d_d: f64, d_r: f64, dtheta_u: f64) -> Self {
        build_triangle_xy((d_d, 0.0), (d_r * dtheta_u.cos(), d_r * dtheta_u.sin()), (0.0, 0.0))
    }

    /// Reflection state for a RIS whose face points along `kappa`.
    pub fn reflects(&self, kappa: f64) -> bool {
        self.degenerate || reflection_state(kappa, self.theta_m, self.dtheta_m)
    }

    /// Relative residual of the law of cosines at the UE vertex.
    pub fn cosine_residual(&self) -> f64 {
        let rhs = self.d_d * self.d_d + self.d_r * self.d_r - 2.0 * self.d_d * self.d_r * self.dtheta_u.cos();
        let scale = (self.d_i * self.d_i).max(self.d_d * self.d_d + self.d_r * self.d_r).max(f64::MIN_POSITIVE);
        (self.d_i * self.d_i - rhs).abs() / scale
    }
}

/// RIS vertex angle from the three side lengths.
pub fn ris_vertex_angle(d_d: f64, d_i: f64, d_r: f64) -> f64 {
    if d_i <= 0.0 || d_r <= 0.0 {
        return 0.0;
    }
    ((d_r * d_r + d_i * d_i - d_d * d_d) / (2.0 * d_r * d_i)).clamp(-1.0, 1.0).acos()
}

const ANGLE_EPS: f64 = 1e-12;

/// Whether a RIS with placement angle `kappa` can reflect: `kappa` must lie
/// in `[−θ_m, π − Δθ_M − θ_m]` on the circle, endpoints included.
pub fn reflection_state(kappa: f64, theta_m: f64, dtheta_m: f64) -> bool {
    let width = PI - dtheta_m;
    if width < -ANGLE_EPS {
        return false;
    }
    let t = (kappa + theta_m).rem_euclid(TAU);
    t <= width + ANGLE_EPS || TAU - t <= ANGLE_EPS
}

/// P[reflection | RIS vertex angle] for a uniform placement angle.
pub fn reflection_prob_given_angle(dtheta_m: f64) -> Result<f64> {
    if !(0.0..=PI).contains(&dtheta_m) {
        return invalid(format!("RIS vertex angle must lie in [0, pi], got {dtheta_m}"));
    }
    Ok((PI - dtheta_m) / TAU)
}

/// Density of the distance from a typical UE to its nearest active BS.
pub fn nearest_bs_distance_pdf(d: f64, lambda_active: f64) -> Result<f64> {
    ensure_non_negative("d", d)?;
    ensure_positive("lambda_active", lambda_active)?;
    Ok(TAU * lambda_active * d * (-PI * lambda_active * d * d).exp())
}

pub fn nearest_bs_distance_cdf(d: f64, lambda_active: f64) -> f64 {
    if d <= 0.0 {
        0.0
    } else {
        1.0 - (-PI * lambda_active * d * d).exp()
    }
}

/// Fraction of BSs within `radius` of the origin that serve at least one UE.
pub fn active_fraction_within(net: &NetworkRealization, assoc: &AssociationMap, radius: f64) -> (usize, usize) {
    let mut total = 0;
    let mut active = 0;
    for (i, b) in net.bs.iter().enumerate() {
        if b.r <= radius {
            total += 1;
            if assoc.is_active(i) {
                active += 1;
            }
        }
    }
    (active, total)
}

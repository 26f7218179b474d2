//! Simulator-versus-analytic comparison of sweep rows.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::harness::sweep::MetricRow;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ToleranceKind {
    Absolute,
    Relative,
}

/// Largest accepted deviation per metric.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct Tolerances {
    /// Absolute, on the probability scale.
    pub coverage: f64,
    pub ase: f64,
    pub signal: f64,
    pub interference: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances { coverage: 0.05, ase: 0.10, signal: 0.10, interference: 0.10 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricDeviation {
    pub metric: String,
    /// Rows with both values present.
    pub pairs: usize,
    pub max_abs: f64,
    pub mean_abs: f64,
    pub max_rel: f64,
    pub mean_rel: f64,
    pub kind: ToleranceKind,
    pub tolerance: f64,
    pub pass: bool,
}

/// Analytic coverage below the simulated lower confidence bound.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundAnomaly {
    pub point: usize,
    pub threshold_db: f64,
    pub analytic: f64,
    pub sim_lower: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrendCheck {
    pub name: String,
    pub engine: String,
    /// Fixed parameters of the series.
    pub series: String,
    /// `(lambda_active, value)` in increasing `lambda_active`.
    pub values: Vec<(f64, f64)>,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CompareReport {
    pub metrics: Vec<MetricDeviation>,
    pub anomalies: Vec<BoundAnomaly>,
    pub trends: Vec<TrendCheck>,
    /// All metrics within tolerance and all trend checks satisfied.
    pub pass: bool,
}

type Pick = fn(&MetricRow) -> (Option<f64>, Option<f64>);

fn deviation(rows: &[MetricRow], metric: &str, pick: Pick, kind: ToleranceKind, tolerance: f64) -> Option<MetricDeviation> {
    let pairs: Vec<(f64, f64)> = rows.iter().filter_map(|r| match pick(r) {
        (Some(s), Some(a)) => Some((s, a)),
        _ => None,
    }).collect();
    if pairs.is_empty() {
        return None;
    }
    let abs: Vec<f64> = pairs.iter().map(|(s, a)| (a - s).abs()).collect();
    let rel: Vec<f64> = pairs
        .iter()
        .zip(&abs)
        .map(|((s, _), d)| if *d == 0.0 { 0.0 } else { d / s.abs().max(f64::MIN_POSITIVE) })
        .collect();
    let n = pairs.len() as f64;
    let max_abs = abs.iter().copied().fold(0.0, f64::max);
    let max_rel = rel.iter().copied().fold(0.0, f64::max);
    let worst = match kind {
        ToleranceKind::Absolute => max_abs,
        ToleranceKind::Relative => max_rel,
    };
    Some(MetricDeviation {
        metric: metric.to_string(),
        pairs: pairs.len(),
        max_abs,
        mean_abs: abs.iter().sum::<f64>() / n,
        max_rel,
        mean_rel: rel.iter().sum::<f64>() / n,
        kind,
        tolerance,
        pass: worst <= tolerance,
    })
}

/// Values along one series with their confidence bounds (equal to the
/// value for analytic columns).
struct Series {
    x: Vec<f64>,
    value: Vec<f64>,
    lower: Vec<f64>,
    upper: Vec<f64>,
}

impl Series {
    /// `value[i] <= value[j]` up to the confidence bounds.
    fn le(&self, i: usize, j: usize) -> bool {
        let slack = 1e-9 * self.value[i].abs().max(self.value[j].abs());
        self.lower[i] <= self.upper[j] + slack
    }

    fn decreasing(&self) -> bool {
        (1..self.x.len()).all(|i| self.le(i, i - 1))
    }

    fn unimodal(&self) -> bool {
        let top = (0..self.value.len()).max_by(|&a, &b| self.value[a].total_cmp(&self.value[b])).unwrap_or(0);
        (1..=top).all(|i| self.le(i - 1, i)) && (top + 1..self.x.len()).all(|i| self.le(i, i - 1))
    }
}

fn series_key(r: &MetricRow) -> String {
    format!(
        "varsigma={} lambda_m={} q={} alpha={} ue_ratio={} threshold_db={}",
        r.varsigma, r.lambda_m, r.q, r.alpha, r.ue_ratio, r.threshold_db
    )
}

fn collect_series(rows: &[&MetricRow], pick: impl Fn(&MetricRow) -> Option<(f64, f64, f64)>) -> Option<Series> {
    let mut pts: Vec<(f64, (f64, f64, f64))> = rows.iter().filter_map(|r| pick(r).map(|v| (r.lambda_active, v))).collect();
    if pts.len() < 2 || pts.len() != rows.len() {
        return None;
    }
    pts.sort_by(|a, b| a.0.total_cmp(&b.0));
    Some(Series {
        x: pts.iter().map(|p| p.0).collect(),
        value: pts.iter().map(|p| p.1 .0).collect(),
        lower: pts.iter().map(|p| p.1 .1).collect(),
        upper: pts.iter().map(|p| p.1 .2).collect(),
    })
}

fn trend_checks(rows: &[MetricRow]) -> Vec<TrendCheck> {
    let mut groups: BTreeMap<String, Vec<&MetricRow>> = BTreeMap::new();
    for r in rows {
        groups.entry(series_key(r)).or_default().push(r);
    }
    let exact = |v: Option<f64>| v.map(|x| (x, x, x));
    let with_ci = |v: Option<f64>, lo: Option<f64>, hi: Option<f64>| Some((v?, lo?, hi?));
    type Picker<'a> = Box<dyn Fn(&MetricRow) -> Option<(f64, f64, f64)> + 'a>;
    let checks: Vec<(&str, &str, bool, Picker)> = vec![
        ("coverage decreases with lambda_active", "analytic", false, Box::new(|r| exact(r.ana_coverage))),
        ("coverage decreases with lambda_active", "sim", false, Box::new(|r| with_ci(r.sim_coverage, r.sim_coverage_lo, r.sim_coverage_hi))),
        ("signal power is unimodal in lambda_active", "analytic", true, Box::new(|r| exact(r.ana_signal))),
        ("signal power is unimodal in lambda_active", "sim", true, Box::new(|r| with_ci(r.sim_signal, r.sim_signal_lo, r.sim_signal_hi))),
    ];
    let mut out = Vec::new();
    for (key, members) in &groups {
        let mut seen = std::collections::BTreeSet::new();
        if !members.iter().all(|r| seen.insert(r.lambda_active.to_bits())) {
            continue;
        }
        for (name, engine, unimodal, pick) in &checks {
            if let Some(s) = collect_series(members, pick) {
                out.push(TrendCheck {
                    name: name.to_string(),
                    engine: engine.to_string(),
                    series: key.clone(),
                    pass: if *unimodal { s.unimodal() } else { s.decreasing() },
                    values: s.x.iter().copied().zip(s.value.iter().copied()).collect(),
                });
            }
        }
    }
    out
}

/// Compares the simulated and analytic columns of `rows`.
pub fn compare_report(rows: &[MetricRow], tol: &Tolerances) -> Result<CompareReport> {
    use ToleranceKind::*;
    let specs: [(&str, Pick, ToleranceKind, f64); 4] = [
        ("coverage", |r| (r.sim_coverage, r.ana_coverage), Absolute, tol.coverage),
        ("ase", |r| (r.sim_ase, r.ana_ase), Relative, tol.ase),
        ("signal", |r| (r.sim_signal, r.ana_signal), Relative, tol.signal),
        ("interference", |r| (r.sim_interference, r.ana_interference), Relative, tol.interference),
    ];
    let metrics: Vec<MetricDeviation> = specs.iter().filter_map(|(m, p, k, t)| deviation(rows, m, *p, *k, *t)).collect();
    if metrics.is_empty() {
        return Err(Error::MissingColumn("no row has both simulated and analytic values".into()));
    }
    let anomalies = rows
        .iter()
        .filter_map(|r| match (r.ana_coverage, r.sim_coverage_lo) {
            (Some(a), Some(lo)) if a < lo => Some(BoundAnomaly { point: r.point, threshold_db: r.threshold_db, analytic: a, sim_lower: lo }),
            _ => None,
        })
        .collect();
    let trends = trend_checks(rows);
    let pass = metrics.iter().all(|m| m.pass) && trends.iter().all(|t| t.pass);
    Ok(CompareReport { metrics, anomalies, trends, pass })
}

impl CompareReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn render_text(&self) -> String {
        let mut s = String::new();
        let verdict = |p: bool| if p { "PASS" } else { "FAIL" };
        let _ = writeln!(s, "metric        pairs   max_abs     mean_abs    max_rel     mean_rel    tolerance");
        for m in &self.metrics {
            let tol = match m.kind {
                ToleranceKind::Absolute => format!("abs {}", m.tolerance),
                ToleranceKind::Relative => format!("rel {}", m.tolerance),
            };
            let _ = writeln!(
                s,
                "{:<13} {:>5}   {:<10.3e}  {:<10.3e}  {:<10.3e}  {:<10.3e}  {tol:<10} {}",
                m.metric,
                m.pairs,
                m.max_abs,
                m.mean_abs,
                m.max_rel,
                m.mean_rel,
                verdict(m.pass)
            );
        }
        if self.anomalies.is_empty() {
            let _ = writeln!(s, "bound direction: analytic coverage never below the simulated lower bound");
        } else {
            let _ = writeln!(s, "bound direction: {} anomalies", self.anomalies.len());
            for a in &self.anomalies {
                let _ = writeln!(s, "  point {} at {} dB: analytic {:.4} < sim lower {:.4}", a.point, a.threshold_db, a.analytic, a.sim_lower);
            }
        }
        for t in &self.trends {
            let _ = writeln!(s, "trend [{}] {} ({}): {}", t.engine, t.name, t.series, verdict(t.pass));
        }
        let _ = writeln!(s, "overall: {}", verdict(self.pass));
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn row(la: f64, sim_cov: f64, ana_cov: f64) -> MetricRow {
        MetricRow {
            lambda_active: la,
            varsigma: 1,
            q: 10,
            alpha: 4.0,
            ue_ratio: 20.0,
            sim_coverage: Some(sim_cov),
            sim_coverage_lo: Some(sim_cov - 0.01),
            sim_coverage_hi: Some(sim_cov + 0.01),
            ana_coverage: Some(ana_cov),
            sim_ase: Some(1.0),
            ana_ase: Some(1.0),
            ..Default::default()
        }
    }

    #[test]
    fn identical_columns_have_zero_deviation() {
        let rows = vec![row(0.01, 0.8, 0.8), row(0.1, 0.6, 0.6)];
        let r = compare_report(&rows, &Tolerances::default()).unwrap();
        assert!(r.metrics.iter().all(|m| m.max_abs == 0.0 && m.mean_rel == 0.0 && m.pass));
        assert!(r.anomalies.is_empty());
        assert!(r.pass);
    }

    #[test]
    fn analytic_below_the_interval_is_an_anomaly() {
        let rows = vec![row(0.01, 0.8, 0.7), row(0.1, 0.6, 0.6)];
        let r = compare_report(&rows, &Tolerances::default()).unwrap();
        assert_eq!(r.anomalies.len(), 1);
        assert!(!r.metrics[0].pass);
        assert!((r.metrics[0].max_abs - 0.1).abs() < 1e-12);
        assert!(r.render_text().contains("1 anomalies"));
    }

    #[test]
    fn coverage_trend_is_checked_per_series() {
        let rows = vec![row(0.001, 0.9, 0.9), row(0.01, 0.8, 0.8), row(0.1, 0.85, 0.6)];
        let r = compare_report(&rows, &Tolerances { coverage: 1.0, ..Default::default() }).unwrap();
        let ana = r.trends.iter().find(|t| t.engine == "analytic" && t.name.starts_with("coverage")).unwrap();
        let sim = r.trends.iter().find(|t| t.engine == "sim" && t.name.starts_with("coverage")).unwrap();
        assert!(ana.pass);
        assert!(!sim.pass);
        assert!(!r.pass);
    }

    #[test]
    fn unimodality() {
        let s = |v: &[f64]| Series { x: (0..v.len()).map(|i| i as f64).collect(), value: v.to_vec(), lower: v.to_vec(), upper: v.to_vec() };
        assert!(s(&[1.0, 3.0, 2.0]).unimodal());
        assert!(s(&[3.0, 2.0, 1.0]).unimodal());
        assert!(!s(&[1.0, 3.0, 2.0, 2.5]).unimodal());
    }

    #[test]
    fn rows_without_pairs_are_rejected() {
        let rows = vec![MetricRow { sim_coverage: Some(0.5), ..Default::default() }];
        assert!(matches!(compare_report(&rows, &Tolerances::default()), Err(Error::MissingColumn(_))));
    }
}

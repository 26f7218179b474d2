//! Runs both engines over a configuration grid and writes the rows.
//!
//! Output schema, version [`SCHEMA_VERSION`]: one row per grid point and
//! threshold, with the columns of [`COLUMNS`] in that order. Columns prefixed
//! `sim_` come from the simulator, `ana_` from the analytic engine; `_lo` and
//! `_hi` are 95% confidence bounds. Powers are in watts, ASE in bit/s/Hz per
//! unit area, AEE and ECE per watt of area power. A missing value is an empty
//! CSV field or a JSON `null`; `error` holds the failures of that row.

use std::io::{Read, Write};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::analytic::ase::ase;
use crate::analytic::coverage::coverage_curve;
use crate::analytic::energy::{aee, ece};
use crate::analytic::moments::{mean_interference_power, mean_signal_power};
use crate::analytic::AnalyticOptions;
use crate::error::{Error, Result};
use crate::harness::config::{GridPoint, OutputFormat, SweepConfig};
use crate::montecarlo::{SimOptions, SimSummary, Simulator};
use crate::stats::Estimate;

pub const SCHEMA_VERSION: u32 = 1;

pub const COLUMNS: [&str; 41] = [
    "point",
    "lambda_active",
    "ue_ratio",
    "lambda_m",
    "q",
    "varsigma",
    "alpha",
    "threshold_db",
    "drops",
    "sim_coverage",
    "sim_coverage_lo",
    "sim_coverage_hi",
    "sim_ase",
    "sim_ase_lo",
    "sim_ase_hi",
    "sim_signal",
    "sim_signal_lo",
    "sim_signal_hi",
    "sim_interference",
    "sim_interference_lo",
    "sim_interference_hi",
    "sim_reflected",
    "sim_reflected_lo",
    "sim_reflected_hi",
    "sim_i2",
    "sim_i2_lo",
    "sim_i2_hi",
    "sim_aee",
    "sim_aee_lo",
    "sim_aee_hi",
    "sim_ece",
    "sim_ece_lo",
    "sim_ece_hi",
    "ana_coverage",
    "ana_ase",
    "ana_aee",
    "ana_ece",
    "ana_signal",
    "ana_interference",
    "ana_reflected",
    "ana_i2",
];

/// One output row. Field order is the column order.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct MetricRow {
    pub point: usize,
    pub lambda_active: f64,
    pub ue_ratio: f64,
    pub lambda_m: f64,
    pub q: u32,
    pub varsigma: u32,
    pub alpha: f64,
    pub threshold_db: f64,
    pub drops: usize,
    pub sim_coverage: Option<f64>,
    pub sim_coverage_lo: Option<f64>,
    pub sim_coverage_hi: Option<f64>,
    pub sim_ase: Option<f64>,
    pub sim_ase_lo: Option<f64>,
    pub sim_ase_hi: Option<f64>,
    pub sim_signal: Option<f64>,
    pub sim_signal_lo: Option<f64>,
    pub sim_signal_hi: Option<f64>,
    pub sim_interference: Option<f64>,
    pub sim_interference_lo: Option<f64>,
    pub sim_interference_hi: Option<f64>,
    /// Power of the reflected signal alone.
    pub sim_reflected: Option<f64>,
    pub sim_reflected_lo: Option<f64>,
    pub sim_reflected_hi: Option<f64>,
    /// Interference power through RISs.
    pub sim_i2: Option<f64>,
    pub sim_i2_lo: Option<f64>,
    pub sim_i2_hi: Option<f64>,
    pub sim_aee: Option<f64>,
    pub sim_aee_lo: Option<f64>,
    pub sim_aee_hi: Option<f64>,
    pub sim_ece: Option<f64>,
    pub sim_ece_lo: Option<f64>,
    pub sim_ece_hi: Option<f64>,
    pub ana_coverage: Option<f64>,
    pub ana_ase: Option<f64>,
    pub ana_aee: Option<f64>,
    pub ana_ece: Option<f64>,
    pub ana_signal: Option<f64>,
    pub ana_interference: Option<f64>,
    pub ana_reflected: Option<f64>,
    pub ana_i2: Option<f64>,
    pub error: Option<String>,
}

fn set(value: &mut Option<f64>, lo: &mut Option<f64>, hi: &mut Option<f64>, e: Estimate) {
    *value = Some(e.value);
    *lo = Some(e.lower);
    *hi = Some(e.upper);
}

fn scale(e: Estimate, k: f64) -> Estimate {
    Estimate { value: e.value * k, lower: e.lower * k, upper: e.upper * k }
}

impl MetricRow {
    /// Replaces non-finite values by `None` and notes them in `error`.
    fn sanitize(mut self) -> Self {
        let mut bad = Vec::new();
        let fields: [(&str, &mut Option<f64>); 32] = [
            ("sim_coverage", &mut self.sim_coverage),
            ("sim_coverage_lo", &mut self.sim_coverage_lo),
            ("sim_coverage_hi", &mut self.sim_coverage_hi),
            ("sim_ase", &mut self.sim_ase),
            ("sim_ase_lo", &mut self.sim_ase_lo),
            ("sim_ase_hi", &mut self.sim_ase_hi),
            ("sim_signal", &mut self.sim_signal),
            ("sim_signal_lo", &mut self.sim_signal_lo),
            ("sim_signal_hi", &mut self.sim_signal_hi),
            ("sim_interference", &mut self.sim_interference),
            ("sim_interference_lo", &mut self.sim_interference_lo),
            ("sim_interference_hi", &mut self.sim_interference_hi),
            ("sim_reflected", &mut self.sim_reflected),
            ("sim_reflected_lo", &mut self.sim_reflected_lo),
            ("sim_reflected_hi", &mut self.sim_reflected_hi),
            ("sim_i2", &mut self.sim_i2),
            ("sim_i2_lo", &mut self.sim_i2_lo),
            ("sim_i2_hi", &mut self.sim_i2_hi),
            ("sim_aee", &mut self.sim_aee),
            ("sim_aee_lo", &mut self.sim_aee_lo),
            ("sim_aee_hi", &mut self.sim_aee_hi),
            ("sim_ece", &mut self.sim_ece),
            ("sim_ece_lo", &mut self.sim_ece_lo),
            ("sim_ece_hi", &mut self.sim_ece_hi),
            ("ana_coverage", &mut self.ana_coverage),
            ("ana_ase", &mut self.ana_ase),
            ("ana_aee", &mut self.ana_aee),
            ("ana_ece", &mut self.ana_ece),
            ("ana_signal", &mut self.ana_signal),
            ("ana_interference", &mut self.ana_interference),
            ("ana_reflected", &mut self.ana_reflected),
            ("ana_i2", &mut self.ana_i2),
        ];
        for (name, v) in fields {
            if v.is_some_and(|x| !x.is_finite()) {
                *v = None;
                bad.push(name);
            }
        }
        if !bad.is_empty() {
            let msg = format!("non-finite {}", bad.join(", "));
            self.error = Some(match self.error.take() {
                Some(e) => format!("{e}; {msg}"),
                None => msg,
            });
        }
        self
    }

    pub fn failed(&self) -> bool {
        self.error.is_some()
    }
}

/// Analytic results of one grid point.
#[derive(Debug, Clone, Default)]
struct AnalyticPoint {
    signal: Option<f64>,
    reflected: Option<f64>,
    interference: Option<f64>,
    i2: Option<f64>,
    coverage: Option<Vec<f64>>,
    ase: Option<f64>,
    errors: Vec<String>,
}

fn run_analytic(p: &GridPoint, cfg: &SweepConfig, opts: &AnalyticOptions) -> AnalyticPoint {
    let scn = &p.scenario;
    let mut out = AnalyticPoint::default();
    let mut note = |what: &str, e: Error| out.errors.push(format!("analytic {what}: {e}"));
    let mut signal = None;
    let mut interference = None;
    if cfg.metrics.moments {
        match mean_signal_power(scn, &opts.plane) {
            Ok(s) => signal = Some(s),
            Err(e) => note("signal", e),
        }
        match mean_interference_power(scn, &opts.plane) {
            Ok(i) => interference = Some(i),
            Err(e) => note("interference", e),
        }
    }
    let mut coverage = None;
    if cfg.metrics.coverage {
        match coverage_curve(scn, &p.thresholds, opts) {
            Ok(c) => coverage = Some(c),
            Err(e) => note("coverage", e),
        }
    }
    let mut area_se = None;
    if cfg.metrics.ase {
        match ase(scn, opts) {
            Ok(a) => area_se = Some(a),
            Err(e) => note("ase", e),
        }
    }
    out.signal = signal.map(|s| s.total());
    out.reflected = signal.map(|s| s.reflected());
    out.interference = interference.map(|i| i.total());
    out.i2 = interference.map(|i| i.reflected);
    out.coverage = coverage;
    out.ase = area_se;
    out
}

fn run_sim(p: &GridPoint, drops: usize, opts: &SimOptions) -> Result<SimSummary> {
    Simulator::new(p.scenario, *opts)?.summarize(drops, &p.thresholds)
}

fn rows_for_point(p: &GridPoint, cfg: &SweepConfig, sim: Option<Result<SimSummary>>, ana: Option<AnalyticPoint>) -> Vec<MetricRow> {
    let scn = &p.scenario;
    let power = &scn.power;
    let area_power = |la: f64| power.area_power(la, scn.lambda_m, scn.fading.q);
    let mut rows = Vec::with_capacity(p.thresholds.len());
    for (k, &t_db) in p.threshold_db.iter().enumerate() {
        let mut row = MetricRow {
            point: p.index,
            lambda_active: scn.lambda_active,
            ue_ratio: scn.ue_ratio,
            lambda_m: scn.lambda_m,
            q: scn.fading.q,
            varsigma: scn.fading.varsigma,
            alpha: scn.fading.alpha,
            threshold_db: t_db,
            drops: if sim.is_some() { cfg.drops } else { 0 },
            ..Default::default()
        };
        let mut errors = Vec::new();
        match &sim {
            Some(Ok(s)) => {
                let cov = s.coverage[k].1;
                let inv_power = 1.0 / area_power(scn.lambda_active);
                set(&mut row.sim_coverage, &mut row.sim_coverage_lo, &mut row.sim_coverage_hi, cov);
                set(&mut row.sim_ase, &mut row.sim_ase_lo, &mut row.sim_ase_hi, s.ase);
                set(&mut row.sim_signal, &mut row.sim_signal_lo, &mut row.sim_signal_hi, s.signal_power);
                set(&mut row.sim_interference, &mut row.sim_interference_lo, &mut row.sim_interference_hi, s.interference_power);
                set(&mut row.sim_reflected, &mut row.sim_reflected_lo, &mut row.sim_reflected_hi, s.reflected_power);
                set(&mut row.sim_i2, &mut row.sim_i2_lo, &mut row.sim_i2_hi, s.i2_power);
                set(&mut row.sim_aee, &mut row.sim_aee_lo, &mut row.sim_aee_hi, scale(s.ase, inv_power));
                set(&mut row.sim_ece, &mut row.sim_ece_lo, &mut row.sim_ece_hi, scale(cov, inv_power));
            }
            Some(Err(e)) => errors.push(format!("sim: {e}")),
            None => {}
        }
        if let Some(a) = &ana {
            let l = scn.lambda_active;
            row.ana_signal = a.signal;
            row.ana_reflected = a.reflected;
            row.ana_interference = a.interference;
            row.ana_i2 = a.i2;
            row.ana_ase = a.ase;
            row.ana_coverage = a.coverage.as_ref().map(|c| c[k]);
            if let Some(v) = a.ase {
                match aee(v, l, scn.lambda_m, scn.fading.q, power) {
                    Ok(x) => row.ana_aee = Some(x),
                    Err(e) => errors.push(format!("analytic aee: {e}")),
                }
            }
            if let Some(c) = row.ana_coverage {
                match ece(c, l, scn.lambda_m, scn.fading.q, power) {
                    Ok(x) => row.ana_ece = Some(x),
                    Err(e) => errors.push(format!("analytic ece: {e}")),
                }
            }
            errors.extend(a.errors.iter().cloned());
        }
        if !errors.is_empty() {
            row.error = Some(errors.join("; "));
        }
        rows.push(row.sanitize());
    }
    rows
}

/// Rows of a finished sweep in grid order.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepOutput {
    pub config: SweepConfig,
    pub rows: Vec<MetricRow>,
}

impl SweepOutput {
    pub fn failed_rows(&self) -> usize {
        self.rows.iter().filter(|r| r.failed()).count()
    }

    pub fn write<W: Write>(&self, format: OutputFormat, out: W) -> Result<()> {
        match format {
            OutputFormat::Csv => write_csv(&self.config, &self.rows, out),
            OutputFormat::Json => write_json_lines(&self.config, &self.rows, out),
        }
    }
}

/// Evaluates every grid point. Points run on a worker pool; rows come back in
/// grid order and depend only on the configuration.
pub fn run_sweep(cfg: &SweepConfig) -> Result<SweepOutput> {
    cfg.validate()?;
    let points = cfg.points();
    let sim_opts = cfg.sim_options();
    let ana_opts = cfg.analytic_options();
    let eval = |p: &GridPoint| {
        let sim = cfg.engine.runs_sim().then(|| run_sim(p, cfg.drops, &sim_opts));
        let ana = cfg.engine.runs_analytic().then(|| run_analytic(p, cfg, &ana_opts));
        rows_for_point(p, cfg, sim, ana)
    };
    let run = || points.par_iter().map(eval).collect::<Vec<_>>();
    let per_point = match cfg.workers {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| Error::Config(format!("worker pool: {e}")))?
            .install(run),
        None => run(),
    };
    Ok(SweepOutput { config: cfg.clone(), rows: per_point.into_iter().flatten().collect() })
}

fn header(cfg: &SweepConfig) -> Result<String> {
    serde_json::to_string(&serde_json::json!({ "schema": SCHEMA_VERSION, "config": cfg })).map_err(|e| Error::Io(e.to_string()))
}

/// CSV with a `#` provenance line holding the resolved configuration,
/// then the header row.
pub fn write_csv<W: Write>(cfg: &SweepConfig, rows: &[MetricRow], mut out: W) -> Result<()> {
    writeln!(out, "# {}", header(cfg)?)?;
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(out);
    w.write_record(COLUMNS.iter().chain(std::iter::once(&"error"))).map_err(csv_error)?;
    for r in rows {
        w.serialize(r).map_err(csv_error)?;
    }
    w.flush()?;
    Ok(())
}

/// JSON lines: a header object, then one object per row.
pub fn write_json_lines<W: Write>(cfg: &SweepConfig, rows: &[MetricRow], mut out: W) -> Result<()> {
    writeln!(out, "{}", header(cfg)?)?;
    for r in rows {
        let line = serde_json::to_string(r).map_err(|e| Error::Io(e.to_string()))?;
        writeln!(out, "{line}")?;
    }
    Ok(())
}

fn csv_error(e: csv::Error) -> Error {
    Error::Io(e.to_string())
}

/// Reads rows written by [`write_csv`]. Every schema column must be present.
pub fn read_csv<R: Read>(input: R) -> Result<Vec<MetricRow>> {
    let mut r = csv::ReaderBuilder::new().comment(Some(b'#')).from_reader(input);
    let headers = r.headers().map_err(csv_error)?.clone();
    for c in COLUMNS {
        if !headers.iter().any(|h| h == c) {
            return Err(Error::MissingColumn(c.to_string()));
        }
    }
    r.deserialize().map(|row| row.map_err(csv_error)).collect()
}

/// Reads rows written by [`write_json_lines`].
pub fn read_json_lines<R: Read>(input: R) -> Result<Vec<MetricRow>> {
    let mut text = String::new();
    std::io::BufReader::new(input).read_to_string(&mut text)?;
    let mut rows = Vec::new();
    for line in text.lines().filter(|l| !l.trim().is_empty()) {
        let value: serde_json::Value = serde_json::from_str(line).map_err(|e| Error::Io(e.to_string()))?;
        if value.get("schema").is_some() {
            continue;
        }
        for c in COLUMNS {
            if value.get(c).is_none() {
                return Err(Error::MissingColumn(c.to_string()));
            }
        }
        rows.push(serde_json::from_value(value).map_err(|e| Error::Io(e.to_string()))?);
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::config::Engine;

    fn tiny() -> SweepConfig {
        let mut cfg = SweepConfig { drops: 100, ..Default::default() };
        cfg.grid.ris = Some(vec![(0.0, 10)]);
        cfg.grid.threshold_db = vec![-5.0, 5.0];
        cfg.analytic.plane.quad = cfg.analytic.plane.quad.with_rel_tol(1e-3);
        cfg.simulation.guard_factor = 4.0;
        cfg
    }

    #[test]
    fn column_list_matches_the_row_type() {
        let mut buf = Vec::new();
        write_csv(&SweepConfig::default(), &[MetricRow::default()], &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let header = text.lines().nth(1).unwrap();
        let expected: Vec<&str> = COLUMNS.iter().copied().chain(["error"]).collect();
        assert_eq!(header.split(',').collect::<Vec<_>>(), expected);
    }

    #[test]
    fn classical_point_has_zero_ris_terms() {
        let out = run_sweep(&tiny()).unwrap();
        assert_eq!(out.rows.len(), 2);
        for r in &out.rows {
            assert_eq!(r.error, None);
            assert_eq!(r.ana_reflected, Some(0.0));
            assert_eq!(r.ana_i2, Some(0.0));
            assert_eq!(r.sim_reflected, Some(0.0));
            assert_eq!(r.sim_i2, Some(0.0));
            assert!(r.sim_coverage_lo.unwrap() <= r.sim_coverage.unwrap());
        }
        assert!(out.rows[0].ana_coverage > out.rows[1].ana_coverage);
    }

    #[test]
    fn rows_round_trip_through_both_formats() {
        let mut cfg = tiny();
        cfg.engine = Engine::Sim;
        let out = run_sweep(&cfg).unwrap();
        let mut csv_buf = Vec::new();
        out.write(OutputFormat::Csv, &mut csv_buf).unwrap();
        assert_eq!(read_csv(csv_buf.as_slice()).unwrap(), out.rows);
        let mut json_buf = Vec::new();
        out.write(OutputFormat::Json, &mut json_buf).unwrap();
        assert_eq!(read_json_lines(json_buf.as_slice()).unwrap(), out.rows);
        assert!(out.rows.iter().all(|r| r.ana_coverage.is_none() && r.sim_coverage.is_some()));
    }

    #[test]
    fn missing_columns_are_reported() {
        let r = read_csv("point,lambda_active\n0,0.01\n".as_bytes());
        assert!(matches!(r, Err(Error::MissingColumn(c)) if c == "ue_ratio"));
    }

    #[test]
    fn engine_errors_stay_in_their_row() {
        let p = &tiny().points()[0];
        let rows = rows_for_point(p, &tiny(), Some(Err(Error::Degenerate("empty".into()))), None);
        assert!(rows.iter().all(|r| r.failed() && r.sim_coverage.is_none() && r.sim_coverage_lo.is_none()));
    }

    #[test]
    fn non_finite_values_are_dropped() {
        let r = MetricRow { ana_ase: Some(f64::NAN), ..Default::default() }.sanitize();
        assert_eq!(r.ana_ase, None);
        assert!(r.error.unwrap().contains("ana_ase"));
    }
}

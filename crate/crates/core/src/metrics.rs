//! Packet reception ratio: per-message samples, run results, and the
//! cross-seed aggregation written to the sweep CSV.

use std::cmp::Ordering;
use std::io::{self, Write};

use serde::Serialize;
use thiserror::Error;

use crate::config::{RetxScheme, SimConfig};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MetricsError {
    #[error("results for sweep point {0} come from different configurations")]
    MixedFingerprints(String),
}

/// Outcome of one broadcast message: `n` of `m` in-range receivers decoded it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct PrrSample {
    pub tx: usize,
    pub m: u32,
    pub n: u32,
}

/// Mean of `n / m` over messages with at least one receiver. `None` when
/// no message had a receiver.
pub fn prr_runtime(samples: &[PrrSample]) -> Option<f64> {
    let (sum, count) = samples
        .iter()
        .filter(|s| s.m > 0)
        .fold((0.0, 0usize), |(sum, count), s| {
            (sum + f64::from(s.n) / f64::from(s.m), count + 1)
        });
    (count > 0).then(|| sum / count as f64)
}

pub fn effective_prr(prr_max: f64, prr_runtime: f64) -> f64 {
    prr_max * prr_runtime
}

/// Final PRR of the nonequal scheme: mean of the two phase PRRs.
pub fn combine_nonequal(prr_1: f64, prr_2: f64) -> f64 {
    (prr_1 + prr_2) / 2.0
}

/// Sweep coordinates of a run, in CSV column order.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SweepAxes {
    pub ivd_m: f64,
    pub mu: u8,
    pub tf_hz: f64,
    pub bandwidth_mhz: f64,
    pub retx: RetxScheme,
    pub delta_db: f64,
}

impl SweepAxes {
    pub fn of(cfg: &SimConfig) -> Self {
        Self {
            ivd_m: cfg.ivd_m,
            mu: cfg.mu,
            tf_hz: cfg.tf_hz,
            bandwidth_mhz: cfg.bandwidth_mhz,
            retx: cfg.retx_scheme,
            delta_db: cfg.l2sm_delta_db,
        }
    }

    fn cmp_key(&self, other: &Self) -> Ordering {
        self.ivd_m
            .total_cmp(&other.ivd_m)
            .then(self.mu.cmp(&other.mu))
            .then(self.tf_hz.total_cmp(&other.tf_hz))
            .then(self.bandwidth_mhz.total_cmp(&other.bandwidth_mhz))
            .then(self.retx.cmp(&other.retx))
            .then(self.delta_db.total_cmp(&other.delta_db))
    }

    fn label(&self) -> String {
        format!(
            "ivd={} mu={} tf={} bw={} retx={} delta={}",
            self.ivd_m, self.mu, self.tf_hz, self.bandwidth_mhz, self.retx, self.delta_db
        )
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunResult {
    pub fingerprint: u64,
    pub seed: u64,
    pub axes: SweepAxes,
    /// `None` when no message had an in-range receiver.
    pub prr_runtime: Option<f64>,
    pub prr_max: f64,
    pub prr_effective: Option<f64>,
    /// Messages that contributed a PRR sample.
    pub samples: usize,
    /// Per-phase runtime PRR (two entries for the nonequal scheme).
    pub phase_prr: Vec<Option<f64>>,
}

impl RunResult {
    /// Assembles a result from per-phase runtime PRRs. Several phases are
    /// combined by their mean.
    pub fn new(cfg: &SimConfig, prr_max: f64, phase_prr: Vec<Option<f64>>, samples: usize) -> Self {
        let prr_runtime = match phase_prr.as_slice() {
            [single] => *single,
            [a, b] => match (a, b) {
                (Some(a), Some(b)) => Some(combine_nonequal(*a, *b)),
                _ => None,
            },
            _ => None,
        };
        let prr_effective = if prr_max == 0.0 {
            Some(0.0)
        } else {
            prr_runtime.map(|r| effective_prr(prr_max, r))
        };
        Self {
            fingerprint: cfg.fingerprint(),
            seed: cfg.seed,
            axes: SweepAxes::of(cfg),
            prr_runtime,
            prr_max,
            prr_effective,
            samples,
            phase_prr: if phase_prr.len() > 1 { phase_prr } else { Vec::new() },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub axes: SweepAxes,
    /// Seeds with a defined PRR.
    pub seed_count: usize,
    /// Mean effective PRR, `NaN` when no seed had receivers.
    pub prr_mean: f64,
    /// Normal-approximation 95% half-width.
    pub prr_ci95: f64,
    pub prr_max: f64,
}

pub const SWEEP_CSV_HEADER: &str = "ivd_m,mu,tf_hz,bandwidth_mhz,retx,delta_db,seed_count,prr_mean,prr_ci95,prr_max";

/// Mean and 95% half-width `1.96 s / sqrt(k)` of `values`.
pub fn mean_ci95(values: &[f64]) -> (f64, f64) {
    let k = values.len();
    if k == 0 {
        return (f64::NAN, f64::NAN);
    }
    let mean = values.iter().sum::<f64>() / k as f64;
    if k == 1 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (k - 1) as f64;
    (mean, 1.96 * var.sqrt() / (k as f64).sqrt())
}

/// Groups results by sweep point and summarises each across seeds. Rows
/// are sorted by the axes; the output does not depend on input order.
pub fn aggregate(results: &[RunResult]) -> Result<Vec<SweepRow>, MetricsError> {
    let mut sorted: Vec<&RunResult> = results.iter().collect();
    sorted.sort_by(|a, b| {
        a.axes
            .cmp_key(&b.axes)
            .then(a.fingerprint.cmp(&b.fingerprint))
            .then(a.seed.cmp(&b.seed))
            .then(a.prr_effective.unwrap_or(-1.0).total_cmp(&b.prr_effective.unwrap_or(-1.0)))
    });

    let mut rows = Vec::new();
    for group in sorted.chunk_by(|a, b| a.axes.cmp_key(&b.axes) == Ordering::Equal) {
        let first = group[0];
        if group.iter().any(|r| r.fingerprint != first.fingerprint) {
            return Err(MetricsError::MixedFingerprints(first.axes.label()));
        }
        let values: Vec<f64> = group.iter().filter_map(|r| r.prr_effective).collect();
        let (prr_mean, prr_ci95) = mean_ci95(&values);
        let prr_max = group.iter().map(|r| r.prr_max).sum::<f64>() / group.len() as f64;
        rows.push(SweepRow {
            axes: first.axes,
            seed_count: values.len(),
            prr_mean,
            prr_ci95,
            prr_max,
        });
    }
    Ok(rows)
}

fn fixed6(v: f64) -> String {
    if v.is_nan() {
        "NA".to_string()
    } else {
        format!("{v:.6}")
    }
}

pub fn write_sweep_csv<W: Write>(rows: &[SweepRow], mut out: W) -> io::Result<()> {
    writeln!(out, "{SWEEP_CSV_HEADER}")?;
    for r in rows {
        writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{}",
            r.axes.ivd_m,
            r.axes.mu,
            r.axes.tf_hz,
            r.axes.bandwidth_mhz,
            r.axes.retx,
            r.axes.delta_db,
            r.seed_count,
            fixed6(r.prr_mean),
            fixed6(r.prr_ci95),
            fixed6(r.prr_max),
        )?;
    }
    Ok(())
}

//! Parameter sweeps over network size, coin bias and ancilla rotation scale,
//! and power-law fits of the resulting success probabilities and costs.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::search::{run_to_report, Method, PeakReport, SearchConfig};
use crate::topology::EdgeMode;
use crate::walker::{CosDeltaRule, TulsiParams};

/// Which axis a sweep walks.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepVariable {
    /// Network size: one run per `n` in `n_range`.
    Size,
    /// Coin bias: one run per value of `epsilon_grid`.
    Epsilon,
    /// Ancilla rotation scale: one run per value of `c_grid` (Tulsi only).
    Delta,
}

impl SweepVariable {
    pub fn as_str(self) -> &'static str {
        match self {
            SweepVariable::Size => "size",
            SweepVariable::Epsilon => "epsilon",
            SweepVariable::Delta => "delta",
        }
    }
}

impl std::fmt::Display for SweepVariable {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for SweepVariable {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "size" => Ok(SweepVariable::Size),
            "epsilon" => Ok(SweepVariable::Epsilon),
            "delta" => Ok(SweepVariable::Delta),
            other => Err(Error::domain(format!(
                "unknown sweep variable `{other}` (expected `size`, `epsilon` or `delta`)"
            ))),
        }
    }
}

/// Default coin-bias grid: 0.25 to 2.0 in steps of 0.25.
pub fn default_epsilon_grid() -> Vec<f64> {
    (1..=8).map(|i| i as f64 * 0.25).collect()
}

/// Default rotation-scale grid, same shape as the epsilon grid.
pub fn default_c_grid() -> Vec<f64> {
    (1..=8).map(|i| i as f64 * 0.25).collect()
}

/// Default size grid `n = 5..=12` (N = 32..4096).
pub fn default_n_range() -> Vec<u32> {
    (5..=12).collect()
}

/// A grid of runs sharing one template configuration.
#[derive(Debug, Clone)]
pub struct SweepSpec {
    pub variable: SweepVariable,
    pub n_range: Vec<u32>,
    pub epsilon_grid: Vec<f64>,
    pub c_grid: Vec<f64>,
    /// Fixed parameters of every run; the swept field is overwritten.
    pub template: SearchConfig,
}

impl SweepSpec {
    pub fn validate(&self) -> Result<()> {
        let empty = match self.variable {
            SweepVariable::Size => self.n_range.is_empty(),
            SweepVariable::Epsilon => self.epsilon_grid.is_empty(),
            SweepVariable::Delta => self.c_grid.is_empty(),
        };
        if empty {
            return Err(Error::domain(format!("{} sweep has an empty grid", self.variable)));
        }
        if self.variable == SweepVariable::Delta && self.template.method != Method::Tulsi {
            return Err(Error::domain(
                "delta sweeps only apply to the tulsi method".to_string(),
            ));
        }
        Ok(())
    }

    fn grid_configs(&self) -> Vec<(f64, SearchConfig)> {
        match self.variable {
            SweepVariable::Size => self
                .n_range
                .iter()
                .map(|&n| {
                    let mut config = self.template.clone();
                    config.n = n;
                    config.t_max = crate::search::default_t_max(n);
                    config.peak = crate::search::PeakParams::for_horizon(config.t_max);
                    ((1u64 << n) as f64, config)
                })
                .collect(),
            SweepVariable::Epsilon => self
                .epsilon_grid
                .iter()
                .map(|&eps| {
                    let mut config = self.template.clone();
                    config.epsilon = eps;
                    (eps, config)
                })
                .collect(),
            SweepVariable::Delta => self
                .c_grid
                .iter()
                .map(|&c| {
                    let mut config = self.template.clone();
                    config.tulsi =
                        TulsiParams { c, rule: config.tulsi.rule, ..config.tulsi };
                    (c, config)
                })
                .collect(),
        }
    }
}

/// One grid point of a sweep. `report` is `None` when the run finished but
/// no peak was found; such rows are flagged rather than aborting the sweep.
#[derive(Debug, Clone)]
pub struct SweepRow {
    pub variable: SweepVariable,
    pub value: f64,
    pub method: Method,
    pub mode: EdgeMode,
    pub n: u32,
    pub k0: usize,
    pub epsilon: f64,
    pub cos_delta: Option<f64>,
    pub report: Option<PeakReport>,
}

/// Run every grid point of a sweep. Rows come back in grid order whatever
/// the worker count; the whole pipeline is deterministic.
pub fn sweep(spec: &SweepSpec) -> Result<Vec<SweepRow>> {
    spec.validate()?;
    let grid = spec.grid_configs();
    grid.into_par_iter()
        .map(|(value, config)| {
            let report = match run_to_report(&config) {
                Ok(report) => Some(report),
                Err(Error::NoPeak(_)) => None,
                Err(e) => return Err(e),
            };
            Ok(SweepRow {
                variable: spec.variable,
                value,
                method: config.method,
                mode: config.edge_mode,
                n: config.n,
                k0: config.k0,
                epsilon: config.epsilon,
                cos_delta: config.cos_delta(),
                report,
            })
        })
        .collect()
}

/// Tune the rotation scale `c` on a small grid: the value minimizing
/// `cost_total` at the template's size. Used before Tulsi size sweeps.
pub fn tune_delta_scale(template: &SearchConfig, c_grid: &[f64]) -> Result<f64> {
    let spec = SweepSpec {
        variable: SweepVariable::Delta,
        n_range: Vec::new(),
        epsilon_grid: Vec::new(),
        c_grid: c_grid.to_vec(),
        template: template.clone(),
    };
    let rows = sweep(&spec)?;
    rows.iter()
        .filter_map(|row| row.report.map(|r| (row.value, r.cost_total)))
        .min_by(|a, b| a.1.total_cmp(&b.1))
        .map(|(c, _)| c)
        .ok_or_else(|| Error::NoPeak("every grid point of the delta tuning sweep failed".into()))
}

/// Power-law fit `y = prefactor * x^exponent` by least squares on log-log
/// transformed data.
#[derive(Debug, Clone, Copy)]
pub struct ScalingFit {
    pub prefactor: f64,
    pub exponent: f64,
    pub r_squared: f64,
    pub points_used: usize,
}

/// Fit a power law through `(x, y)` points, all strictly positive, at least
/// three of them.
pub fn fit_powerlaw(points: &[(f64, f64)]) -> Result<ScalingFit> {
    if points.len() < 3 {
        return Err(Error::domain(format!(
            "power-law fit needs at least 3 points, got {}",
            points.len()
        )));
    }
    if let Some(&(x, y)) = points.iter().find(|&&(x, y)| x <= 0.0 || y <= 0.0) {
        return Err(Error::domain(format!(
            "power-law fit needs positive coordinates, got ({x}, {y})"
        )));
    }

    let logs: Vec<(f64, f64)> = points.iter().map(|&(x, y)| (x.ln(), y.ln())).collect();
    let n = logs.len() as f64;
    let sum_x: f64 = logs.iter().map(|p| p.0).sum();
    let sum_y: f64 = logs.iter().map(|p| p.1).sum();
    let sum_xx: f64 = logs.iter().map(|p| p.0 * p.0).sum();
    let sum_xy: f64 = logs.iter().map(|p| p.0 * p.1).sum();
    let denom = n * sum_xx - sum_x * sum_x;
    if denom.abs() < 1e-12 {
        return Err(Error::domain("power-law fit is degenerate: all x equal".to_string()));
    }
    let slope = (n * sum_xy - sum_x * sum_y) / denom;
    let intercept = (sum_y - slope * sum_x) / n;

    let mean_y = sum_y / n;
    let ss_tot: f64 = logs.iter().map(|p| (p.1 - mean_y).powi(2)).sum();
    let ss_res: f64 = logs.iter().map(|p| (p.1 - (slope * p.0 + intercept)).powi(2)).sum();
    let r_squared = if ss_tot <= f64::EPSILON { 1.0 } else { 1.0 - ss_res / ss_tot };

    Ok(ScalingFit {
        prefactor: intercept.exp(),
        exponent: slope,
        r_squared,
        points_used: points.len(),
    })
}

/// Smallest size admitted into scaling fits; smaller networks carry strong
/// transients.
pub const FIT_MIN_LEVELS: u32 = 5;

/// Extract `(N, column)` fit points from sweep rows, skipping flagged rows
/// and sizes below [`FIT_MIN_LEVELS`].
pub fn scaling_points(
    rows: &[SweepRow],
    column: impl Fn(&PeakReport) -> f64,
) -> Vec<(f64, f64)> {
    rows.iter()
        .filter(|row| row.n >= FIT_MIN_LEVELS)
        .filter_map(|row| {
            row.report.as_ref().map(|report| ((1u64 << row.n) as f64, column(report)))
        })
        .collect()
}

//! Full search runs: evolve a configured walk, record the marked-vertex
//! probability after every step, locate the first peak, and derive costs.

use crate::error::{Error, Result};
use crate::topology::{EdgeMode, NetworkTopology};
use crate::walker::{epsilon_coin, TulsiParams, WalkerState};

/// Default marked vertex.
pub const DEFAULT_K0: usize = 3;
/// Default amplitude-cell budget for a single run (slices * 4N * t_max).
pub const DEFAULT_BUDGET_CELLS: u128 = 1_000_000_000;

/// Which evolution drives the run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Method {
    /// Grover coin, marked-coin walk, uniform initial condition.
    Abstract,
    /// Ancilla-controlled variant of the abstract walk.
    Tulsi,
    /// Epsilon coin with the matching biased initial condition.
    Modified,
}

impl Method {
    pub fn as_str(self) -> &'static str {
        match self {
            Method::Abstract => "abstract",
            Method::Tulsi => "tulsi",
            Method::Modified => "modified",
        }
    }

    pub fn uses_ancilla(self) -> bool {
        matches!(self, Method::Tulsi)
    }
}

impl std::fmt::Display for Method {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "abstract" => Ok(Method::Abstract),
            "tulsi" => Ok(Method::Tulsi),
            "modified" => Ok(Method::Modified),
            other => Err(Error::domain(format!(
                "unknown method `{other}` (expected `abstract`, `tulsi` or `modified`)"
            ))),
        }
    }
}

/// First-peak detection parameters.
#[derive(Debug, Clone, Copy)]
pub struct PeakParams {
    /// Centered moving-average window, odd, truncated at the boundaries.
    pub smooth_window: usize,
    /// A candidate peak must reach this fraction of the smoothed maximum.
    pub height_fraction: f64,
}

impl PeakParams {
    /// Defaults scaled to the horizon: window `max(3, odd(ceil(t_max/200)))`,
    /// height fraction 0.8.
    pub fn for_horizon(t_max: usize) -> Self {
        let raw = t_max.div_ceil(200);
        let odd = if raw % 2 == 0 { raw + 1 } else { raw };
        PeakParams { smooth_window: odd.max(3), height_fraction: 0.8 }
    }

    pub fn validate(&self) -> Result<()> {
        if self.smooth_window % 2 == 0 || self.smooth_window == 0 {
            return Err(Error::domain(format!(
                "smooth_window = {} must be an odd integer >= 1",
                self.smooth_window
            )));
        }
        if !(self.height_fraction > 0.0 && self.height_fraction <= 1.0) {
            return Err(Error::domain(format!(
                "height_fraction = {} outside (0, 1]",
                self.height_fraction
            )));
        }
        Ok(())
    }
}

/// A fully specified search run.
#[derive(Debug, Clone)]
pub struct SearchConfig {
    pub method: Method,
    pub n: u32,
    pub k0: usize,
    pub epsilon: f64,
    pub tulsi: TulsiParams,
    pub t_max: usize,
    pub edge_mode: EdgeMode,
    pub peak: PeakParams,
    pub budget_cells: u128,
}

impl SearchConfig {
    /// Config with the standard defaults: `k0 = 3`, horizon
    /// `ceil(6 N^0.75)`, peak parameters scaled to the horizon.
    pub fn new(method: Method, n: u32, epsilon: f64, edge_mode: EdgeMode) -> Self {
        let t_max = default_t_max(n);
        SearchConfig {
            method,
            n,
            k0: DEFAULT_K0,
            epsilon,
            tulsi: TulsiParams::default(),
            t_max,
            edge_mode,
            peak: PeakParams::for_horizon(t_max),
            budget_cells: DEFAULT_BUDGET_CELLS,
        }
    }

    pub fn num_vertices(&self) -> usize {
        1usize << self.n
    }

    /// `cos(delta)` actually used by the run; `None` for ancilla-free methods.
    pub fn cos_delta(&self) -> Option<f64> {
        self.method.uses_ancilla().then(|| self.tulsi.resolve_cos_delta(self.n))
    }

    pub fn validate(&self) -> Result<()> {
        if !(crate::topology::MIN_LEVELS..=crate::topology::MAX_LEVELS).contains(&self.n) {
            return Err(Error::domain(format!("n = {} out of range", self.n)));
        }
        if self.method == Method::Abstract && self.epsilon != 1.0 {
            return Err(Error::domain(format!(
                "the abstract search algorithm forces epsilon = 1 (got {})",
                self.epsilon
            )));
        }
        if !(self.epsilon > 0.0 && self.epsilon <= crate::walker::EPSILON_MAX) {
            return Err(Error::domain(format!("epsilon = {} outside (0, 2]", self.epsilon)));
        }
        if self.k0 >= self.num_vertices() {
            return Err(Error::domain(format!(
                "marked vertex k0 = {} out of range for N = {}",
                self.k0,
                self.num_vertices()
            )));
        }
        if self.t_max == 0 {
            return Err(Error::domain("t_max must be at least 1".to_string()));
        }
        self.peak.validate()
    }
}

/// Default step horizon `ceil(6 N^0.75)`, comfortably above the observed
/// first-peak times.
pub fn default_t_max(n: u32) -> usize {
    let num_vertices = (1u64 << n) as f64;
    (6.0 * num_vertices.powf(0.75)).ceil() as usize
}

/// First-peak summary of one run.
#[derive(Debug, Clone, Copy)]
pub struct PeakReport {
    /// First-peak step (on the smoothed series).
    pub t_f: usize,
    /// Raw success probability at `t_f`.
    pub p_f: f64,
    /// Evolution-operator applications of a single run: `t_f`.
    pub cost_single: f64,
    /// Single run plus the amplitude-amplification overhead: `t_f / sqrt(p_f)`.
    pub cost_total: f64,
    /// Raw global maximum of the series.
    pub series_max: f64,
    /// Step of the raw global maximum.
    pub t_global: usize,
}

/// Cost summary derived from a peak report.
#[derive(Debug, Clone, Copy)]
pub struct CostRecord {
    pub cost_single: f64,
    pub cost_total: f64,
    /// `ceil(1 / sqrt(p_f))` reruns to push the overall success near 1.
    pub repetitions_estimate: u64,
}

/// Evolve the configured walk and return the probability series
/// `p_k0(t)` for `t = 0..=t_max` together with the final state.
pub fn run_walk(config: &SearchConfig) -> Result<(Vec<f64>, WalkerState)> {
    config.validate()?;
    let slices = if config.method.uses_ancilla() { 2u128 } else { 1 };
    let cells = slices * 4 * config.num_vertices() as u128 * config.t_max as u128;
    if cells > config.budget_cells {
        return Err(Error::ResourceBudget { cells, budget: config.budget_cells });
    }

    let topo = NetworkTopology::new(config.n, config.edge_mode)?;
    let coin = epsilon_coin(config.epsilon)?;
    let mut state =
        WalkerState::initial(config.epsilon, config.n, config.method.uses_ancilla())?;
    let cos_delta = config.cos_delta();

    let mut series = Vec::with_capacity(config.t_max + 1);
    series.push(state.marked_probability(config.k0));
    for _ in 0..config.t_max {
        match config.method {
            Method::Abstract | Method::Modified => state.step_search(&coin, &topo, config.k0),
            Method::Tulsi => {
                state.step_tulsi(&coin, &topo, config.k0, cos_delta.expect("ancilla method"))
            }
        }
        series.push(state.marked_probability(config.k0));
    }
    Ok((series, state))
}

/// [`run_walk`] without the final state.
pub fn run_series(config: &SearchConfig) -> Result<Vec<f64>> {
    run_walk(config).map(|(series, _)| series)
}

/// Centered moving average with the window truncated at the boundaries.
fn smooth(series: &[f64], window: usize) -> Vec<f64> {
    if window <= 1 {
        return series.to_vec();
    }
    let half = window / 2;
    let len = series.len();
    (0..len)
        .map(|t| {
            let lo = t.saturating_sub(half);
            let hi = (t + half).min(len - 1);
            series[lo..=hi].iter().sum::<f64>() / (hi - lo + 1) as f64
        })
        .collect()
}

/// Locate the first peak of a probability series.
///
/// The series is smoothed, then the earliest interior local maximum whose
/// smoothed height reaches `height_fraction` of the smoothed global maximum
/// is selected. The reported `p_f` is the raw series value at that step, so
/// costs are not biased by the filter.
pub fn detect_first_peak(series: &[f64], peak: &PeakParams) -> Result<PeakReport> {
    peak.validate()?;
    if series.len() < peak.smooth_window {
        return Err(Error::domain(format!(
            "series of length {} shorter than smoothing window {}",
            series.len(),
            peak.smooth_window
        )));
    }
    let smoothed = smooth(series, peak.smooth_window);
    let n_est = 1.0 / series[0].max(f64::MIN_POSITIVE);
    let smoothed_max = smoothed.iter().cloned().fold(f64::MIN, f64::max);
    if smoothed_max <= 2.0 / n_est {
        return Err(Error::NoPeak(format!(
            "series never exceeds 2/N = {:.3e}; t_max may be too small or the run degenerate",
            2.0 / n_est
        )));
    }

    let threshold = peak.height_fraction * smoothed_max;
    let mut t_f = None;
    for t in 1..smoothed.len() - 1 {
        if smoothed[t] >= smoothed[t - 1] && smoothed[t] > smoothed[t + 1] && smoothed[t] >= threshold
        {
            t_f = Some(t);
            break;
        }
    }
    let t_f = t_f.ok_or_else(|| {
        Error::NoPeak("smoothed series has no interior local maximum above the height gate".into())
    })?;

    let (t_global, series_max) = series
        .iter()
        .enumerate()
        .fold((0usize, f64::MIN), |acc, (t, &p)| if p > acc.1 { (t, p) } else { acc });

    let p_f = series[t_f];
    Ok(PeakReport {
        t_f,
        p_f,
        cost_single: t_f as f64,
        cost_total: t_f as f64 / p_f.sqrt(),
        series_max,
        t_global,
    })
}

/// Derive the cost record of a run from its peak report.
pub fn evaluate_cost(report: &PeakReport) -> CostRecord {
    CostRecord {
        cost_single: report.t_f as f64,
        cost_total: report.t_f as f64 / report.p_f.sqrt(),
        repetitions_estimate: (1.0 / report.p_f.sqrt()).ceil() as u64,
    }
}

/// Run a configured search end to end: series, peak, costs.
pub fn run_to_report(config: &SearchConfig) -> Result<PeakReport> {
    let series = run_series(config)?;
    detect_first_peak(&series, &config.peak)
}

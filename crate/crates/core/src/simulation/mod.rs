//! Monte Carlo coverage experiments.
//!
//! Every trial draws fresh training data and a fresh test point, builds the
//! grids from the training response range, runs each requested method and
//! records whether the (hulled) prediction set covers the test response and
//! how long it is.

mod data;
mod summary;

use std::time::Instant;

use rayon::prelude::*;

use crate::baselines::{oracle_interval, parametric_interval};
use crate::conformal::{
    approximate_from_fits, augmented_design, cpdd_from_fits, cpdm_from_fits, fit_grid, round_responses,
    split_conformal, Execution,
};
use crate::error::{Error, Result};
use crate::fitters::{default_lasso_lambda, FitterSpec, DEFAULT_MAX_ITER, DEFAULT_TOL};
use crate::grid::RoundingMode;
use crate::interval::PredictionSet;

pub use data::{
    data_range_grid, generate_trial, stream_rng, stream_seed, true_mean, Purpose, RangeGrid, Trial, SIGNAL_FEATURES,
};
pub use summary::{summarize, SummaryRow};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SimMethod {
    Oracle,
    Parametric,
    Approximate,
    Cpdd,
    Cpdm,
    Split,
}

impl SimMethod {
    pub const ALL: [SimMethod; 6] = [
        SimMethod::Oracle,
        SimMethod::Parametric,
        SimMethod::Approximate,
        SimMethod::Cpdd,
        SimMethod::Cpdm,
        SimMethod::Split,
    ];

    pub fn name(self) -> &'static str {
        match self {
            SimMethod::Oracle => "oracle",
            SimMethod::Parametric => "parametric",
            SimMethod::Approximate => "approximate",
            SimMethod::Cpdd => "cpdd",
            SimMethod::Cpdm => "cpdm",
            SimMethod::Split => "split",
        }
    }
}

impl std::str::FromStr for SimMethod {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        SimMethod::ALL
            .into_iter()
            .find(|m| m.name() == s)
            .ok_or_else(|| Error::Config(format!("unknown method `{s}`")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RoundingKind {
    Nearest,
    Randomized,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub n: usize,
    pub p: usize,
    pub sigma: f64,
    pub alpha: f64,
    pub grid_sizes: Vec<usize>,
    pub methods: Vec<SimMethod>,
    pub trials: usize,
    pub seed: u64,
    pub rounding: RoundingKind,
    pub lasso_tol: f64,
    pub lasso_max_iter: usize,
    pub warm_start: bool,
    /// Worker threads; 0 lets rayon decide.
    pub threads: usize,
    /// Measure wall time per method. Off by default so output is reproducible.
    pub timing: bool,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            n: 100,
            p: 200,
            sigma: 1.0,
            alpha: 0.1,
            grid_sizes: vec![5, 10, 20, 40, 80, 160],
            methods: vec![
                SimMethod::Oracle,
                SimMethod::Parametric,
                SimMethod::Approximate,
                SimMethod::Cpdd,
                SimMethod::Cpdm,
            ],
            trials: 1000,
            seed: 0,
            rounding: RoundingKind::Nearest,
            lasso_tol: DEFAULT_TOL,
            lasso_max_iter: DEFAULT_MAX_ITER,
            warm_start: true,
            threads: 0,
            timing: false,
        }
    }
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return Err(Error::Config("n must be >= 1".into()));
        }
        if self.p < SIGNAL_FEATURES {
            return Err(Error::Config(format!("p must be >= {SIGNAL_FEATURES}")));
        }
        if !(self.sigma > 0.0 && self.sigma.is_finite()) {
            return Err(Error::Config("sigma must be positive".into()));
        }
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return Err(Error::Config("alpha must lie in (0, 1)".into()));
        }
        if self.trials == 0 {
            return Err(Error::Config("trials must be >= 1".into()));
        }
        if self.grid_sizes.is_empty() || self.grid_sizes.contains(&0) {
            return Err(Error::Config("grid sizes must be a nonempty list of positive integers".into()));
        }
        if self.methods.is_empty() {
            return Err(Error::Config("at least one method is required".into()));
        }
        self.fitter().validate()
    }

    /// The Lasso used by every model-based method.
    pub fn fitter(&self) -> FitterSpec {
        FitterSpec::lasso(default_lasso_lambda(self.sigma, self.n, self.p))
            .with_tol(self.lasso_tol)
            .with_max_iter(self.lasso_max_iter)
    }

    fn has(&self, method: SimMethod) -> bool {
        self.methods.contains(&method)
    }

    fn execution(&self) -> Execution {
        if self.warm_start {
            Execution::Sequential { warm_start: true }
        } else {
            Execution::Parallel
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrialRecord {
    pub method: SimMethod,
    pub m: usize,
    pub trial: usize,
    pub covered: bool,
    /// Length of the hull, with unbounded ends clipped to the grid window.
    pub length: f64,
    pub clipped: bool,
    pub empty: bool,
    pub fit_count: usize,
    pub unconverged: usize,
    /// Degenerate response range fallback was used for this trial's grid.
    pub degenerate_range: bool,
    /// Seconds spent on this method; `None` unless timing is enabled. Shared
    /// grid fits are charged in full to both discretized methods.
    pub wall_time_s: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrialFailure {
    pub method: SimMethod,
    pub m: usize,
    pub trial: usize,
    pub reason: &'static str,
    pub message: String,
}

#[derive(Debug, Clone)]
pub struct ExperimentResult {
    /// Sorted by `(method, M, trial)`.
    pub records: Vec<TrialRecord>,
    pub failures: Vec<TrialFailure>,
    pub summary: Vec<SummaryRow>,
}

impl ExperimentResult {
    pub fn failure_rate(&self) -> f64 {
        let total = self.records.len() + self.failures.len();
        if total == 0 {
            0.0
        } else {
            self.failures.len() as f64 / total as f64
        }
    }

    pub fn row(&self, method: SimMethod, m: usize) -> Option<&SummaryRow> {
        self.summary.iter().find(|r| r.method == method && r.m == m)
    }
}

pub fn run_experiment(cfg: &ExperimentConfig) -> Result<ExperimentResult> {
    cfg.validate()?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.threads)
        .build()
        .map_err(|e| Error::Config(format!("thread pool: {e}")))?;
    let outcomes: Vec<Result<TrialOutcome>> =
        pool.install(|| (0..cfg.trials).into_par_iter().map(|t| run_trial(cfg, t)).collect());

    let mut records = Vec::new();
    let mut failures = Vec::new();
    for outcome in outcomes {
        let outcome = outcome?;
        records.extend(outcome.records);
        failures.extend(outcome.failures);
    }
    records.sort_by(|a, b| (a.method, a.m, a.trial).cmp(&(b.method, b.m, b.trial)));
    failures.sort_by(|a, b| (a.method, a.m, a.trial).cmp(&(b.method, b.m, b.trial)));
    let summary = summarize(cfg, &records, &failures);
    Ok(ExperimentResult { records, failures, summary })
}

#[derive(Default)]
struct TrialOutcome {
    records: Vec<TrialRecord>,
    failures: Vec<TrialFailure>,
}

impl TrialOutcome {
    fn push(&mut self, method: SimMethod, m: usize, trial: usize, result: Result<Measured>, y_test: f64) {
        match result {
            Ok(measured) => {
                let hull = measured.set.hull();
                self.records.push(TrialRecord {
                    method,
                    m,
                    trial,
                    covered: hull.contains(y_test),
                    length: hull.length(),
                    clipped: hull.clipped(),
                    empty: hull.is_empty(),
                    fit_count: measured.fit_count,
                    unconverged: measured.unconverged,
                    degenerate_range: measured.degenerate,
                    wall_time_s: measured.seconds,
                });
            }
            Err(err) => self.failures.push(TrialFailure {
                method,
                m,
                trial,
                reason: err.code(),
                message: err.to_string(),
            }),
        }
    }
}

struct Measured {
    set: PredictionSet,
    fit_count: usize,
    unconverged: usize,
    degenerate: bool,
    seconds: Option<f64>,
}

struct Clock(Option<Instant>);

impl Clock {
    fn start(enabled: bool) -> Self {
        Clock(enabled.then(Instant::now))
    }

    fn seconds(&self) -> Option<f64> {
        self.0.map(|t| t.elapsed().as_secs_f64())
    }
}

fn run_trial(cfg: &ExperimentConfig, t: usize) -> Result<TrialOutcome> {
    let trial = generate_trial(cfg.n, cfg.p, cfg.sigma, cfg.seed, t as u64)?;
    let fitter = cfg.fitter();
    let responses = trial.train.responses().as_slice();
    let y = trial.y_test;
    let mut out = TrialOutcome::default();

    // Grid-free methods are computed once and reported at every M.
    let mut grid_free = Vec::new();
    if cfg.has(SimMethod::Oracle) {
        let clock = Clock::start(cfg.timing);
        let set = oracle_interval(&trial.x_test, data::mean_unchecked, cfg.sigma, cfg.alpha);
        grid_free.push((SimMethod::Oracle, set.map(|set| (set, 0, 0)), clock.seconds()));
    }
    if cfg.has(SimMethod::Parametric) {
        let clock = Clock::start(cfg.timing);
        let res = parametric_interval(&trial.train, &trial.x_test, cfg.sigma, cfg.alpha, &fitter, false);
        grid_free.push((SimMethod::Parametric, res.map(|r| (r.set, 1, 0)), clock.seconds()));
    }
    if cfg.has(SimMethod::Split) {
        let clock = Clock::start(cfg.timing);
        let split_seed = stream_seed(cfg.seed, t as u64, Purpose::Split, 0);
        let set = split_conformal(&trial.train, &trial.x_test, cfg.alpha, &fitter, split_seed);
        grid_free.push((SimMethod::Split, set.map(|s| (s, 1, 0)), clock.seconds()));
    }
    for &m in &cfg.grid_sizes {
        for (method, res, seconds) in &grid_free {
            let measured = res.clone().map(|(set, fit_count, unconverged)| Measured {
                set,
                fit_count,
                unconverged,
                degenerate: false,
                seconds: *seconds,
            });
            out.push(*method, m, t, measured, y);
        }
    }

    let needs_grid = cfg.has(SimMethod::Approximate) || cfg.has(SimMethod::Cpdd) || cfg.has(SimMethod::Cpdm);
    if !needs_grid {
        return Ok(out);
    }
    let design = augmented_design(&trial.train, &trial.x_test)?;
    let execution = cfg.execution();

    for &m in &cfg.grid_sizes {
        let mode = match cfg.rounding {
            RoundingKind::Nearest => RoundingMode::Nearest,
            RoundingKind::Randomized => RoundingMode::Randomized {
                seed: stream_seed(cfg.seed, t as u64, Purpose::Rounding, m as u64),
            },
        };
        let range = match data_range_grid(responses, m, mode) {
            Ok(r) => r,
            Err(err) => {
                for method in [SimMethod::Approximate, SimMethod::Cpdd, SimMethod::Cpdm] {
                    if cfg.has(method) {
                        out.push(method, m, t, Err(err.clone()), y);
                    }
                }
                continue;
            }
        };
        let grid = range.grid();

        if cfg.has(SimMethod::Approximate) {
            let clock = Clock::start(cfg.timing);
            let res = fit_grid(&fitter, &design, responses, grid, execution).and_then(|fits| {
                let gap = grid
                    .point_gap()
                    .ok_or_else(|| Error::InvalidInput("grid has no spacing".into()))?;
                Ok(Measured {
                    set: approximate_from_fits(&fits, responses, cfg.alpha, gap),
                    fit_count: fits.fit_count,
                    unconverged: fits.unconverged,
                    degenerate: range.degenerate,
                    seconds: None,
                })
            });
            let seconds = clock.seconds();
            out.push(SimMethod::Approximate, m, t, res.map(|r| Measured { seconds, ..r }), y);
        }

        if cfg.has(SimMethod::Cpdd) || cfg.has(SimMethod::Cpdm) {
            let clock = Clock::start(cfg.timing);
            let rounded = round_responses(&range.discretizer, responses);
            match fit_grid(&fitter, &design, &rounded, grid, execution) {
                Ok(fits) => {
                    let seconds = clock.seconds();
                    let measured = |set| Measured {
                        set,
                        fit_count: fits.fit_count,
                        unconverged: fits.unconverged,
                        degenerate: range.degenerate,
                        seconds,
                    };
                    if cfg.has(SimMethod::Cpdd) {
                        let set = cpdd_from_fits(&fits, &rounded, cfg.alpha, &range.discretizer);
                        out.push(SimMethod::Cpdd, m, t, Ok(measured(set)), y);
                    }
                    if cfg.has(SimMethod::Cpdm) {
                        let set = cpdm_from_fits(&fits, responses, cfg.alpha, &range.discretizer);
                        out.push(SimMethod::Cpdm, m, t, Ok(measured(set)), y);
                    }
                }
                Err(err) => {
                    for method in [SimMethod::Cpdd, SimMethod::Cpdm] {
                        if cfg.has(method) {
                            out.push(method, m, t, Err(err.clone()), y);
                        }
                    }
                }
            }
        }
    }
    Ok(out)
}

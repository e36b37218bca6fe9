//! ε sweeps with fitted convergence orders.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::config::Config;
use super::experiment::{run_experiment, RunSummary};
use super::fit::{loglog_order, LineFit};
use super::HarnessError;
use crate::entropy::Distances;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub epsilon: f64,
    pub n_cells: usize,
    pub delta: f64,
    pub e0: f64,
    pub e_h0: f64,
    pub e_tau: f64,
    pub e_h_tau: f64,
    pub c_fit: f64,
    pub c_fit_h: f64,
    pub margin: f64,
    pub margin_h: f64,
    pub tol: f64,
    pub gronwall_ok: bool,
    pub envelope_ok: bool,
    pub corrected_ok: bool,
    pub wall_mismatch: f64,
    pub dist: Distances,
}

impl From<&RunSummary> for SweepRow {
    fn from(s: &RunSummary) -> Self {
        let g = &s.gronwall;
        Self {
            epsilon: s.epsilon,
            n_cells: s.n_cells,
            delta: s.delta,
            e0: s.e0,
            e_h0: s.e_h0,
            e_tau: s.e_tau,
            e_h_tau: s.e_h_tau,
            c_fit: g.c_fit,
            c_fit_h: g.c_fit_h,
            margin: g.margin,
            margin_h: g.margin_h,
            tol: g.tol,
            gronwall_ok: g.holds(),
            envelope_ok: g.envelope_ok,
            corrected_ok: g.corrected_ok,
            wall_mismatch: s.wall_mismatch,
            dist: s.dist,
        }
    }
}

/// Per-norm values in the fixed order `L1, Lgamma, Lambda, gradbeta, J`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PerNorm<T> {
    pub l1: T,
    pub lgamma: T,
    pub lambda: T,
    pub gradbeta: T,
    pub momentum: T,
}

impl<T> PerNorm<T> {
    fn build<F: Fn(fn(&Distances) -> f64) -> T>(f: F) -> Self {
        Self {
            l1: f(|d| d.l1),
            lgamma: f(|d| d.lgamma),
            lambda: f(|d| d.lambda),
            gradbeta: f(|d| d.gradbeta),
            momentum: f(|d| d.momentum),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepReport {
    pub config: Config,
    pub rows: Vec<SweepRow>,
    /// Least-squares slopes of `ln dist` against `ln ε`.
    pub orders: Option<PerNorm<LineFit>>,
    /// Strict decrease along decreasing ε.
    pub monotone: PerNorm<bool>,
    /// `max C_fit / min C_fit` over the runs.
    pub c_fit_spread: f64,
    pub complete: bool,
    pub failures: Vec<String>,
}

impl SweepReport {
    pub fn gronwall_ok(&self) -> bool {
        self.rows.iter().all(|r| r.gronwall_ok)
    }

    /// Every asserted property: all runs finished, both inequalities hold,
    /// and the four distances decrease monotonically.
    pub fn passed(&self) -> bool {
        let m = &self.monotone;
        self.complete && self.gronwall_ok() && m.l1 && m.lgamma && m.lambda && m.gradbeta
    }
}

/// Runs every ε of `cfg.sweep_epsilons`, concurrently unless `serial`.
pub fn run_sweep(cfg: &Config, serial: bool) -> Result<SweepReport, HarnessError> {
    let mut eps = cfg.sweep_epsilons.clone();
    if eps.len() < 3 {
        return Err(super::ConfigError::BadValue {
            key: "sweep.epsilons".into(),
            reason: "need at least 3 values".into(),
        }
        .into());
    }
    eps.sort_by(|a, b| b.total_cmp(a));
    let one = |&e: &f64| run_experiment(cfg, e).map(|o| o.summary);
    let results: Vec<Result<RunSummary, HarnessError>> = if serial {
        eps.iter().map(one).collect()
    } else {
        eps.par_iter().map(one).collect()
    };
    let mut rows = Vec::new();
    let mut failures = Vec::new();
    for (e, r) in eps.iter().zip(results) {
        match r {
            Ok(s) => rows.push(SweepRow::from(&s)),
            Err(err @ HarnessError::Window { .. }) => return Err(err),
            Err(err) => failures.push(format!("epsilon = {e}: {err}")),
        }
    }
    let x: Vec<f64> = rows.iter().map(|r| r.epsilon).collect();
    let orders = (rows.len() >= 3).then(|| {
        PerNorm::build(|f| {
            let y: Vec<f64> = rows.iter().map(|r| f(&r.dist)).collect();
            loglog_order(&x, &y)
        })
    });
    let monotone = PerNorm::build(|f| rows.windows(2).all(|w| f(&w[1].dist) < f(&w[0].dist)));
    let (cmin, cmax) = rows.iter().fold((f64::INFINITY, 0.0f64), |(lo, hi), r| {
        (lo.min(r.c_fit), hi.max(r.c_fit))
    });
    Ok(SweepReport {
        config: cfg.clone(),
        complete: failures.is_empty(),
        rows,
        orders,
        monotone,
        c_fit_spread: cmax / cmin,
        failures,
    })
}

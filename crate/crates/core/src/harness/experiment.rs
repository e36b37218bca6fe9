//! One EK run against its Euler reference with the full entropy bookkeeping.

use serde::{Deserialize, Serialize};

use super::config::Config;
use super::presets::Preset;
use super::HarnessError;
use crate::boundary_layer::build_vbl;
use crate::ek::{self, Diagnostics, EkConfig};
use crate::entropy::{discrete_tolerance, Distances, EntropyReport, EntropyRow, GronwallCheck};
use crate::euler::{run_reference, EulerConfig, EulerSnapshot};
use crate::grid::{FlowState, Grid1D};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunSummary {
    pub epsilon: f64,
    pub preset: Preset,
    pub well_prepared: bool,
    pub n_cells: usize,
    pub euler_intervals: usize,
    pub tau: f64,
    pub s: f64,
    pub c: f64,
    pub delta: f64,
    pub steps: u64,
    pub dt_mean: f64,
    pub vacuum_flags: u64,
    pub mass_drift: f64,
    pub energy_drift: f64,
    /// End of the verified smooth window of the reference.
    pub t_window: f64,
    /// `max_t |v^E − v_bl|` at the walls.
    pub wall_mismatch: f64,
    pub e0: f64,
    pub e_h0: f64,
    pub e_tau: f64,
    pub e_h_tau: f64,
    /// Sup over the sampled times.
    pub dist: Distances,
    pub gronwall: GronwallCheck,
}

#[derive(Debug, Clone)]
pub struct RunOutput {
    pub summary: RunSummary,
    pub report: EntropyReport,
    pub diagnostics: Vec<Diagnostics>,
    pub final_state: FlowState,
    /// Reference at `τ` restricted to the EK cell centres.
    pub final_reference: EulerSnapshot,
}

fn sup_distances(rows: &[EntropyRow]) -> Distances {
    let mut d = Distances::default();
    for r in rows {
        d.l1 = d.l1.max(r.dist.l1);
        d.lgamma = d.lgamma.max(r.dist.lgamma);
        d.lambda = d.lambda.max(r.dist.lambda);
        d.gradbeta = d.gradbeta.max(r.dist.gradbeta);
        d.momentum = d.momentum.max(r.dist.momentum);
        d.momentum_bound = d.momentum_bound.max(r.dist.momentum_bound);
    }
    d
}

/// Runs the reference to `τ/0.9` (so that `τ ≤ 0.9 T_window` is verified),
/// the EK scheme to `τ`, and evaluates every entropy row on the samples.
pub fn run_experiment(cfg: &Config, epsilon: f64) -> Result<RunOutput, HarnessError> {
    let sf = cfg.state(epsilon);
    let n = cfg.grid.cells_for(epsilon);
    let grid = Grid1D::unit(n).map_err(|e| HarnessError::Run(e.to_string()))?;
    let tau = cfg.run.tau;
    let times = ek::uniform_times(tau, cfg.run.samples);
    let preset = cfg.run.preset;

    let mut ecfg = EulerConfig::new(sf, cfg.euler.refine * n, tau / 0.9);
    ecfg.cfl = cfg.euler.cfl;
    ecfg.blowup_threshold = cfg.euler.blowup_threshold;
    let reference = run_reference(ecfg, |x| preset.rho0(x), |x| preset.u0(x), &times)
        .map_err(|e| HarnessError::Run(e.to_string()))?;
    if let Some(reason) = &reference.window_reason {
        return Err(HarnessError::Window {
            t_window: reference.t_window,
            needed: ecfg.t_end,
            reason: reason.clone(),
        });
    }

    let wp = cfg.run.well_prepared;
    let rho_init = move |x: f64| preset.rho0(x) + if wp { 0.0 } else { Preset::perturbation(x) };
    let init = FlowState::from_fns(grid, rho_init, |x| rho_init(x) * preset.u0(x));
    let mut kcfg = EkConfig::new(sf, grid, tau);
    kcfg.cfl = cfg.scheme.cfl;
    kcfg.reconstruction = cfg.scheme.reconstruction;
    let traj = ek::run(kcfg, &init, &times).map_err(|e| HarnessError::Run(e.to_string()))?;

    let delta = cfg.layer.delta(epsilon);
    let mut rows = Vec::with_capacity(times.len());
    let mut wall = 0.0f64;
    let mut last_ref = None;
    for (k, &t) in times.iter().enumerate() {
        let nodes = &reference.snapshots[k];
        let bl = build_vbl(nodes, 0.0, 1.0, cfg.layer.c, delta)
            .map_err(|e| HarnessError::Run(e.to_string()))?
            .with_rate(cfg.layer.s);
        wall = wall.max(bl.wall_mismatch());
        let re = nodes.on_cells(n).expect("even refinement");
        let blc = bl.on_cells(n).expect("even refinement");
        rows.push(EntropyRow::evaluate(&sf, t, &traj.snapshots[k], &re, &blc));
        last_ref = Some(re);
    }
    let dt_mean = tau / traj.steps.max(1) as f64;
    let tol = discrete_tolerance(grid.dx(), dt_mean, rows[0].e_ek);
    let report = EntropyReport::new(rows, tol);
    let (first, last) = (&report.rows[0], report.last());
    let summary = RunSummary {
        epsilon,
        preset,
        well_prepared: wp,
        n_cells: n,
        euler_intervals: ecfg.intervals,
        tau,
        s: cfg.layer.s,
        c: cfg.layer.c,
        delta,
        steps: traj.steps,
        dt_mean,
        vacuum_flags: traj.vacuum_flags,
        mass_drift: traj.mass_drift(),
        energy_drift: traj.energy_drift(),
        t_window: reference.t_window,
        wall_mismatch: wall,
        e0: first.e,
        e_h0: first.e_h,
        e_tau: last.e,
        e_h_tau: last.e_h,
        dist: sup_distances(&report.rows),
        gronwall: report.gronwall,
    };
    Ok(RunOutput {
        summary,
        diagnostics: traj.diagnostics.clone(),
        final_state: traj.snapshots.last().expect("samples").clone(),
        final_reference: last_ref.expect("samples"),
        report,
    })
}

//! Euler–Korteweg solver: Rusanov transport, centred capillary stress,
//! SSP-RK3 in time, no-flux walls through ghost cells.

mod residuals;
mod rhs;

use std::io::{self, Write};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::grid::{FlowState, Grid1D, GHOSTS};
use crate::state::StateFunctions;

pub use residuals::{
    augmented_residuals, m_equation_residual, weak_residuals, CosineTest, SineTest, TestFunction, WeakResiduals,
    ZeroTest,
};
pub use rhs::{hyperbolic_rhs, korteweg_rhs, korteweg_rhs_mu_form, Reconstruction};

use rhs::Workspace;

#[derive(Debug, Error)]
pub enum EkError {
    #[error("invalid solver configuration: {0}")]
    Config(String),
    #[error("time step {dt:e} exceeds the stability bound {bound:e}")]
    Unstable { dt: f64, bound: f64 },
    #[error("non-finite value in cell {cell} at t = {t}")]
    NonFinite { t: f64, cell: usize, dump: Box<FlowState> },
    #[error("initial state does not match the configured grid")]
    GridMismatch,
    #[error("test function does not vanish at the walls (|φ| = {0:e})")]
    BadTestFunction(f64),
    #[error("trajectory too short for a time quadrature ({0} samples)")]
    ShortTrajectory(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EkConfig {
    pub state: StateFunctions,
    pub grid: Grid1D,
    pub cfl: f64,
    pub t_end: f64,
    pub vacuum_floor: f64,
    pub energy_drift_tol: f64,
    pub reconstruction: Reconstruction,
    /// Drops the capillary stress (ε = 0 transport only).
    pub hyperbolic_only: bool,
}

impl EkConfig {
    pub fn new(state: StateFunctions, grid: Grid1D, t_end: f64) -> Self {
        Self {
            state,
            grid,
            cfl: 0.5,
            t_end,
            vacuum_floor: 1e-10,
            energy_drift_tol: 1e-3,
            reconstruction: Reconstruction::Linear,
            hyperbolic_only: false,
        }
    }

    pub fn validate(&self) -> Result<(), EkError> {
        if !(self.cfl > 0.0 && self.cfl < 1.0) {
            return Err(EkError::Config(format!("cfl must lie in (0,1), got {}", self.cfl)));
        }
        if !(self.t_end > 0.0) || !self.t_end.is_finite() {
            return Err(EkError::Config(format!("t_end must be > 0, got {}", self.t_end)));
        }
        if !(self.vacuum_floor > 0.0) {
            return Err(EkError::Config(format!(
                "vacuum_floor must be > 0, got {}",
                self.vacuum_floor
            )));
        }
        if !(self.energy_drift_tol > 0.0) {
            return Err(EkError::Config("energy_drift_tol must be > 0".into()));
        }
        Ok(())
    }
}

/// One diagnostics row.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Diagnostics {
    pub t: f64,
    pub mass: f64,
    pub energy: f64,
    pub min_rho: f64,
    pub max_u: f64,
}

/// `E_EK = ∫ ½J²/ρ + f(ρ) + ε²/2 |∂x β(ρ)|²`, midpoint rule with centred `βx`.
pub fn total_energy(sf: &StateFunctions, state: &FlowState) -> f64 {
    let gb = state.grad_beta(sf).values;
    let e2 = sf.epsilon().powi(2);
    let mut sum = 0.0;
    for i in 0..state.grid.n_cells() {
        let (r, j) = (state.rho.values[i], state.j.values[i]);
        sum += 0.5 * j * j / r + sf.f(r) + 0.5 * e2 * gb[i] * gb[i];
    }
    sum * state.grid.dx()
}

pub fn diagnostics(sf: &StateFunctions, t: f64, state: &FlowState) -> Diagnostics {
    let mut min_rho = f64::INFINITY;
    let mut max_u = 0.0f64;
    for (r, j) in state.rho.values.iter().zip(&state.j.values) {
        min_rho = min_rho.min(*r);
        max_u = max_u.max((j / r).abs());
    }
    Diagnostics {
        t,
        mass: state.mass(),
        energy: total_energy(sf, state),
        min_rho,
        max_u,
    }
}

pub struct EkSolver {
    cfg: EkConfig,
    rho: Vec<f64>,
    j: Vec<f64>,
    t: f64,
    steps: u64,
    vacuum_flags: u64,
    ws: Workspace,
    r1: Vec<f64>,
    j1: Vec<f64>,
    dr: Vec<f64>,
    dj: Vec<f64>,
    k0r: Vec<f64>,
    k0j: Vec<f64>,
    k1r: Vec<f64>,
    k1j: Vec<f64>,
    comp: Vec<f64>,
}

impl EkSolver {
    pub fn new(cfg: EkConfig, initial: &FlowState) -> Result<Self, EkError> {
        cfg.validate()?;
        let n = cfg.grid.n_cells();
        if initial.grid.n_cells() != n || initial.rho.len() != n || initial.j.len() != n {
            return Err(EkError::GridMismatch);
        }
        Ok(Self {
            cfg,
            rho: initial.rho.values.clone(),
            j: initial.j.values.clone(),
            t: 0.0,
            steps: 0,
            vacuum_flags: 0,
            ws: Workspace::new(n),
            r1: vec![0.0; n],
            j1: vec![0.0; n],
            dr: vec![0.0; n],
            dj: vec![0.0; n],
            k0r: vec![0.0; n],
            k0j: vec![0.0; n],
            k1r: vec![0.0; n],
            k1j: vec![0.0; n],
            comp: vec![0.0; n],
        })
    }

    pub fn config(&self) -> &EkConfig {
        &self.cfg
    }

    pub fn time(&self) -> f64 {
        self.t
    }

    pub fn steps(&self) -> u64 {
        self.steps
    }

    /// Cells clamped at the vacuum floor, summed over all stages so far.
    pub fn vacuum_flags(&self) -> u64 {
        self.vacuum_flags
    }

    pub fn state(&self) -> FlowState {
        FlowState::new(self.cfg.grid, self.rho.clone(), self.j.clone()).expect("sizes fixed")
    }

    /// Largest admissible step, `min(dx/(max|u|+c), dx²/(π² ε max μ'))`.
    pub fn stability_bound(&self) -> f64 {
        let sf = &self.cfg.state;
        let dx = self.cfg.grid.dx();
        let (mut speed, mut mu) = (0.0f64, 0.0f64);
        for (&r, &j) in self.rho.iter().zip(&self.j) {
            let r = r.max(self.cfg.vacuum_floor);
            speed = speed.max((j / r).abs() + sf.sound_speed(r));
            mu = mu.max(sf.mu_prime(r));
        }
        let hyp = dx / speed;
        if self.cfg.hyperbolic_only {
            return hyp;
        }
        let disp = dx * dx / (std::f64::consts::PI.powi(2) * sf.epsilon() * mu);
        hyp.min(disp)
    }

    /// `cfl` times the stability bound.
    pub fn suggested_dt(&self) -> f64 {
        self.cfg.cfl * self.stability_bound()
    }

    fn rhs(&mut self, stage_from_r1: bool) {
        let sf = self.cfg.state;
        let dx = self.cfg.grid.dx();
        let (r, j) = if stage_from_r1 {
            (&self.r1, &self.j1)
        } else {
            (&self.rho, &self.j)
        };
        self.vacuum_flags += self.ws.load(r, j, self.cfg.vacuum_floor) as u64;
        self.dr.iter_mut().for_each(|v| *v = 0.0);
        self.dj.iter_mut().for_each(|v| *v = 0.0);
        rhs::hyperbolic_into(
            &sf,
            dx,
            self.cfg.reconstruction,
            self.cfg.vacuum_floor,
            &mut self.ws,
            &mut self.dr,
            &mut self.dj,
        );
        if !self.cfg.hyperbolic_only {
            rhs::stress_k_form(&sf, dx, &mut self.ws);
            rhs::add_stress_divergence(sf.epsilon().powi(2), dx, &self.ws, &mut self.dj);
        }
    }

    /// One SSP-RK3 step.
    pub fn step(&mut self, dt: f64) -> Result<(), EkError> {
        let bound = self.stability_bound();
        if !(dt > 0.0) || dt > bound * (1.0 + 1e-12) {
            return Err(EkError::Unstable { dt, bound });
        }
        let n = self.rho.len();
        // Butcher form: u + dt(L0 + L1 + 4 L2)/6, so the density increment is a
        // combination of telescoping flux differences.
        self.rhs(false);
        self.k0r.copy_from_slice(&self.dr);
        self.k0j.copy_from_slice(&self.dj);
        for i in 0..n {
            self.r1[i] = self.rho[i] + dt * self.dr[i];
            self.j1[i] = self.j[i] + dt * self.dj[i];
        }
        self.rhs(true);
        self.k1r.copy_from_slice(&self.dr);
        self.k1j.copy_from_slice(&self.dj);
        for i in 0..n {
            self.r1[i] = self.rho[i] + 0.25 * dt * (self.k0r[i] + self.k1r[i]);
            self.j1[i] = self.j[i] + 0.25 * dt * (self.k0j[i] + self.k1j[i]);
        }
        self.rhs(true);
        let w = dt / 6.0;
        for i in 0..n {
            let inc = w * (self.k0r[i] + self.k1r[i] + 4.0 * self.dr[i]) + self.comp[i];
            // TwoSum keeps the rounding of ρ + inc for the next step
            let s = self.rho[i] + inc;
            let bp = s - self.rho[i];
            self.comp[i] = (self.rho[i] - (s - bp)) + (inc - bp);
            self.rho[i] = s;
            self.j[i] += w * (self.k0j[i] + self.k1j[i] + 4.0 * self.dj[i]);
        }
        self.t += dt;
        self.steps += 1;
        if let Some(cell) = (0..n).find(|&i| !self.rho[i].is_finite() || !self.j[i].is_finite()) {
            return Err(EkError::NonFinite {
                t: self.t,
                cell,
                dump: Box::new(self.state()),
            });
        }
        Ok(())
    }

    /// Steps until `t_target`, shortening the last step to land on it.
    pub fn advance_to(&mut self, t_target: f64) -> Result<(), EkError> {
        while self.t < t_target {
            let mut dt = self.suggested_dt();
            let remaining = t_target - self.t;
            let last = dt >= remaining * (1.0 - 1e-12);
            if last {
                dt = remaining;
            }
            self.step(dt)?;
            if last {
                self.t = t_target;
            }
        }
        Ok(())
    }
}

/// Sampled run: snapshots and diagnostics at the requested times.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EkTrajectory {
    pub config: EkConfig,
    pub times: Vec<f64>,
    pub snapshots: Vec<FlowState>,
    pub diagnostics: Vec<Diagnostics>,
    pub steps: u64,
    pub vacuum_flags: u64,
}

impl EkTrajectory {
    /// `max_t |E(t) − E(0)| / E(0)`.
    pub fn energy_drift(&self) -> f64 {
        let e0 = self.diagnostics[0].energy;
        self.diagnostics
            .iter()
            .map(|d| (d.energy - e0).abs())
            .fold(0.0, f64::max)
            / e0
    }

    /// `max_t |M(t) − M(0)| / M(0)`.
    pub fn mass_drift(&self) -> f64 {
        let m0 = self.diagnostics[0].mass;
        self.diagnostics.iter().map(|d| (d.mass - m0).abs()).fold(0.0, f64::max) / m0
    }

    pub fn energy_within_tolerance(&self) -> bool {
        self.energy_drift() <= self.config.energy_drift_tol
    }

    pub fn write_diagnostics_csv<W: Write>(&self, mut w: W) -> io::Result<()> {
        writeln!(w, "t,mass,E_EK,min_rho,max_abs_u")?;
        for d in &self.diagnostics {
            writeln!(
                w,
                "{:.17e},{:.17e},{:.17e},{:.17e},{:.17e}",
                d.t, d.mass, d.energy, d.min_rho, d.max_u
            )?;
        }
        Ok(())
    }
}

/// Uniform sample times `0, t_end/k, …, t_end`.
pub fn uniform_times(t_end: f64, intervals: usize) -> Vec<f64> {
    (0..=intervals).map(|k| t_end * k as f64 / intervals as f64).collect()
}

/// Runs to `config.t_end`, recording the state at each of `sample_times`
/// (which must be nondecreasing and within `[0, t_end]`).
pub fn run(config: EkConfig, initial: &FlowState, sample_times: &[f64]) -> Result<EkTrajectory, EkError> {
    if sample_times.windows(2).any(|w| w[1] < w[0]) || sample_times.iter().any(|&t| t < 0.0 || t > config.t_end) {
        return Err(EkError::Config("sample times must be sorted within [0, t_end]".into()));
    }
    let mut solver = EkSolver::new(config, initial)?;
    let sf = config.state;
    let mut traj = EkTrajectory {
        config,
        times: Vec::with_capacity(sample_times.len()),
        snapshots: Vec::with_capacity(sample_times.len()),
        diagnostics: Vec::with_capacity(sample_times.len()),
        steps: 0,
        vacuum_flags: 0,
    };
    for &t in sample_times {
        solver.advance_to(t)?;
        let s = solver.state();
        traj.diagnostics.push(diagnostics(&sf, t, &s));
        traj.times.push(t);
        traj.snapshots.push(s);
    }
    solver.advance_to(config.t_end)?;
    traj.steps = solver.steps();
    traj.vacuum_flags = solver.vacuum_flags();
    if traj.vacuum_flags > 0 {
        log::warn!("{} vacuum-floor clamps during the run", traj.vacuum_flags);
    }
    Ok(traj)
}

// keep the ghost width consistent with the stencils above
const _: () = assert!(GHOSTS == 2);

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use std::f64::consts::PI;

    fn qhd(eps: f64) -> StateFunctions {
        StateFunctions::qhd(2.0, eps).unwrap()
    }

    #[test]
    fn constant_state_is_fixed_point() {
        for eps in [1.0, 0.1, 0.01] {
            let g = Grid1D::unit(32).unwrap();
            let init = FlowState::from_fns(g, |_| 0.7, |_| 0.0);
            let cfg = EkConfig::new(qhd(eps), g, 0.05);
            let tr = run(cfg, &init, &[0.0, 0.05]).unwrap();
            assert_eq!(tr.snapshots[1].rho.values, init.rho.values);
            assert!(tr.snapshots[1].j.values.iter().all(|&v| v == 0.0));
        }
    }

    #[test]
    fn energy_of_rest_state() {
        let g = Grid1D::unit(64).unwrap();
        let s = FlowState::from_fns(g, |_| 1.0, |_| 0.0);
        assert_relative_eq!(total_energy(&qhd(0.1), &s), 1.0, max_relative = 1e-14);
    }

    #[test]
    fn capillary_energy_forms_agree() {
        // k|ρx|² against |βx|² with analytic gradients
        let sf = StateFunctions::new(2.0, 0.5, 1.3, 0.2).unwrap();
        for i in 0..100 {
            let x = i as f64 / 100.0;
            let rho = 2.0 + (2.0 * PI * x).sin();
            let drho = 2.0 * PI * (2.0 * PI * x).cos();
            let a = sf.k(rho) * drho * drho;
            let b = (sf.beta_prime(rho) * drho).powi(2);
            assert!((a - b).abs() <= 1e-8 * a.abs().max(1e-300));
        }
    }

    #[test]
    fn refuses_unstable_step() {
        let g = Grid1D::unit(32).unwrap();
        let init = FlowState::from_fns(g, |x| 1.0 + 0.1 * (PI * x).cos(), |_| 0.0);
        let mut s = EkSolver::new(EkConfig::new(qhd(0.1), g, 1.0), &init).unwrap();
        let b = s.stability_bound();
        assert!(matches!(s.step(2.0 * b), Err(EkError::Unstable { .. })));
        assert!(s.step(0.5 * b).is_ok());
    }

    #[test]
    fn rejects_bad_config() {
        let g = Grid1D::unit(32).unwrap();
        let mut c = EkConfig::new(qhd(0.1), g, 1.0);
        c.cfl = 1.5;
        assert!(c.validate().is_err());
        c.cfl = 0.5;
        c.t_end = 0.0;
        assert!(c.validate().is_err());
    }

    #[test]
    fn sod_mass_conserved() {
        let g = Grid1D::unit(200).unwrap();
        let init = FlowState::from_fns(g, |x| if x < 0.5 { 1.0 } else { 0.125 }, |_| 0.0);
        let mut cfg = EkConfig::new(qhd(0.1), g, 0.15);
        cfg.hyperbolic_only = true;
        cfg.reconstruction = Reconstruction::Minmod;
        let mut s = EkSolver::new(cfg, &init).unwrap();
        let m0 = init.mass();
        while s.time() < 0.15 {
            let dt = s.suggested_dt();
            s.step(dt).unwrap();
            assert!((s.state().mass() - m0).abs() < 1e-14 * m0);
        }
    }

    #[test]
    fn smooth_run_conserves_mass_and_energy() {
        let g = Grid1D::unit(128).unwrap();
        let init = FlowState::from_fns(g, |x| 1.0 + 0.2 * (PI * x).cos(), |_| 0.0);
        let cfg = EkConfig::new(qhd(0.1), g, 0.1);
        let tr = run(cfg, &init, &uniform_times(0.1, 4)).unwrap();
        assert!(tr.mass_drift() < 1e-13);
        assert!(tr.energy_drift() < 1e-3, "{}", tr.energy_drift());
        assert_eq!(tr.vacuum_flags, 0);
    }
}

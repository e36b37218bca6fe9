//! Cosine-spectral split-step solver for
//! `iε ψt = −ε²/2 ψxx + γ/(γ−1) |ψ|^{2(γ−1)} ψ` on `[0, 1]` with `ψx = 0` at
//! the walls, and the Madelung map to `(ρ, J)`.

use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ek::{self, EkConfig, EkError};
use crate::entropy::{entropy_e, Fields};
use crate::grid::{norms_of, FlowState, Grid1D};
use crate::state::StateFunctions;

#[derive(Debug, Error)]
pub enum NlsError {
    #[error("invalid NLS configuration: {0}")]
    Config(String),
    #[error(transparent)]
    Ek(#[from] EkError),
}

/// Wave function at the cell centres `(i + ½)/n` of `[0, 1]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WaveState {
    pub psi: Vec<Complex64>,
    pub epsilon: f64,
    pub gamma: f64,
    pub t: f64,
}

impl WaveState {
    /// `ψ₀ = √ρ₀ e^{iS₀/ε}` with `S₀(x) = ∫₀^x u₀`, integrated with Simpson
    /// on each cell so `S₀'` vanishes where `u₀` does.
    pub fn from_hydro(n: usize, epsilon: f64, gamma: f64, rho0: impl Fn(f64) -> f64, u0: impl Fn(f64) -> f64) -> Self {
        let h = 1.0 / n as f64;
        let mut s = 0.0;
        let mut x_prev = 0.0;
        let psi = (0..n)
            .map(|i| {
                let x = (i as f64 + 0.5) * h;
                s += (x - x_prev) / 6.0 * (u0(x_prev) + 4.0 * u0(0.5 * (x_prev + x)) + u0(x));
                x_prev = x;
                Complex64::from_polar(rho0(x).sqrt(), s / epsilon)
            })
            .collect();
        Self {
            psi,
            epsilon,
            gamma,
            t: 0.0,
        }
    }

    pub fn len(&self) -> usize {
        self.psi.len()
    }

    pub fn is_empty(&self) -> bool {
        self.psi.is_empty()
    }

    pub fn dx(&self) -> f64 {
        1.0 / self.len() as f64
    }

    pub fn mass(&self) -> f64 {
        self.psi.iter().map(|p| p.norm_sqr()).sum::<f64>() * self.dx()
    }
}

/// Spectral transforms on the even extension of length `2n` over `[0, 2)`.
pub struct NlsSolver {
    n: usize,
    fwd: Arc<dyn Fft<f64>>,
    inv: Arc<dyn Fft<f64>>,
    buf: Vec<Complex64>,
    scratch: Vec<Complex64>,
    omega: Vec<f64>,
}

impl std::fmt::Debug for NlsSolver {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("NlsSolver").field("n", &self.n).finish()
    }
}

impl NlsSolver {
    pub fn new(n: usize) -> Self {
        let mut planner = FftPlanner::new();
        let fwd = planner.plan_fft_forward(2 * n);
        let inv = planner.plan_fft_inverse(2 * n);
        let len = fwd.get_inplace_scratch_len().max(inv.get_inplace_scratch_len());
        let omega = (0..2 * n)
            .map(|k| {
                let k = if k <= n { k as f64 } else { k as f64 - 2.0 * n as f64 };
                PI * k
            })
            .collect();
        Self {
            n,
            fwd,
            inv,
            buf: vec![Complex64::new(0.0, 0.0); 2 * n],
            scratch: vec![Complex64::new(0.0, 0.0); len],
            omega,
        }
    }

    fn load(&mut self, psi: &[Complex64]) {
        let n = self.n;
        for i in 0..n {
            self.buf[i] = psi[i];
            self.buf[2 * n - 1 - i] = psi[i];
        }
        self.fwd.process_with_scratch(&mut self.buf, &mut self.scratch);
    }

    /// Multiplies the extension's spectrum by `g(ω)` and returns the first half.
    fn apply<G: Fn(f64) -> Complex64>(&mut self, psi: &[Complex64], g: G) -> Vec<Complex64> {
        self.load(psi);
        for (c, &w) in self.buf.iter_mut().zip(&self.omega) {
            *c *= g(w);
        }
        self.inv.process_with_scratch(&mut self.buf, &mut self.scratch);
        let s = 1.0 / (2 * self.n) as f64;
        self.buf[..self.n].iter().map(|c| c * s).collect()
    }

    /// `∂x ψ`; the Nyquist mode is dropped.
    pub fn derivative(&mut self, psi: &[Complex64]) -> Vec<Complex64> {
        let nyq = PI * self.n as f64;
        self.apply(psi, |w| {
            if w == nyq {
                Complex64::new(0.0, 0.0)
            } else {
                Complex64::new(0.0, w)
            }
        })
    }

    /// Largest odd part `|y_j − y_{2n−1−j}|` of the extension after a linear
    /// step; zero up to rounding means the Neumann symmetry is preserved.
    pub fn odd_mode_residual(&mut self, state: &WaveState, dt: f64) -> f64 {
        let eps = state.epsilon;
        self.load(&state.psi);
        for (c, &w) in self.buf.iter_mut().zip(&self.omega) {
            *c *= Complex64::from_polar(1.0, -0.5 * dt * eps * w * w);
        }
        self.inv.process_with_scratch(&mut self.buf, &mut self.scratch);
        let n = self.n;
        let s = 1.0 / (2 * n) as f64;
        (0..n)
            .map(|i| ((self.buf[i] - self.buf[2 * n - 1 - i]) * s).norm())
            .fold(0.0, f64::max)
    }

    fn nonlinear(state: &mut WaveState, dt: f64) {
        let c = state.gamma / (state.gamma - 1.0);
        let e = state.gamma - 1.0;
        for p in &mut state.psi {
            let v = c * p.norm_sqr().powf(e);
            *p *= Complex64::from_polar(1.0, -dt * v / state.epsilon);
        }
    }

    /// One Strang step: half nonlinear, full linear, half nonlinear.
    pub fn step(&mut self, state: &mut WaveState, dt: f64) {
        Self::nonlinear(state, 0.5 * dt);
        let eps = state.epsilon;
        state.psi = self.apply(&state.psi, |w| Complex64::from_polar(1.0, -0.5 * dt * eps * w * w));
        Self::nonlinear(state, 0.5 * dt);
        state.t += dt;
    }

    /// Uniform steps of at most `dt_max` landing exactly on `t_target`.
    pub fn advance_to(&mut self, state: &mut WaveState, t_target: f64, dt_max: f64) {
        let span = t_target - state.t;
        if span <= 0.0 {
            return;
        }
        let k = (span / dt_max).ceil().max(1.0) as usize;
        let dt = span / k as f64;
        let t0 = state.t;
        for s in 1..=k {
            self.step(state, dt);
            state.t = t0 + s as f64 * dt;
        }
    }

    /// `(ρ, J) = (|ψ|², ε Im(ψ̄ ψx))`.
    pub fn madelung(&mut self, state: &WaveState) -> (Vec<f64>, Vec<f64>) {
        let d = self.derivative(&state.psi);
        let rho = state.psi.iter().map(|p| p.norm_sqr()).collect();
        let j = state
            .psi
            .iter()
            .zip(&d)
            .map(|(p, dp)| state.epsilon * (p.conj() * dp).im)
            .collect();
        (rho, j)
    }

    /// `∫ ε²/2 |ψx|² + |ψ|^{2γ}/(γ−1)`.
    pub fn energy(&mut self, state: &WaveState) -> f64 {
        let d = self.derivative(&state.psi);
        let e2 = state.epsilon * state.epsilon;
        let g = state.gamma;
        state
            .psi
            .iter()
            .zip(&d)
            .map(|(p, dp)| 0.5 * e2 * dp.norm_sqr() + p.norm_sqr().powf(g) / (g - 1.0))
            .sum::<f64>()
            * state.dx()
    }
}

/// Evaluates a cosine-series field at arbitrary points of `[0, 1]`.
pub fn cosine_interpolate(values: &[f64], xs: &[f64]) -> Vec<f64> {
    let n = values.len();
    // DCT-II coefficients by direct sum; n is small in every caller
    let coef: Vec<f64> = (0..n)
        .map(|k| {
            let s: f64 = values
                .iter()
                .enumerate()
                .map(|(i, v)| v * (PI * k as f64 * (i as f64 + 0.5) / n as f64).cos())
                .sum();
            s * if k == 0 { 1.0 } else { 2.0 } / n as f64
        })
        .collect();
    xs.iter()
        .map(|&x| {
            coef.iter()
                .enumerate()
                .map(|(k, c)| c * (PI * k as f64 * x).cos())
                .sum()
        })
        .collect()
}

/// One row of the EK-vs-NLS comparison.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OracleRow {
    pub t: f64,
    pub n_cells: usize,
    pub rho_l2: f64,
    pub j_l2: f64,
    /// `|E_EK-fields − E_NLS-fields|` against the common reference `(ρ₀, u = 0)`.
    pub entropy_gap: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OracleConfig {
    pub epsilon: f64,
    pub t_end: f64,
    pub ek_cells: Vec<usize>,
    pub nls_cells: usize,
    pub nls_dt: f64,
    pub samples: usize,
}

impl Default for OracleConfig {
    fn default() -> Self {
        Self {
            epsilon: 0.5,
            t_end: 0.2,
            ek_cells: vec![256, 512],
            nls_cells: 512,
            nls_dt: 2e-5,
            samples: 2,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OracleReport {
    pub config: OracleConfig,
    pub rows: Vec<OracleRow>,
    pub nls_mass_drift: f64,
    pub nls_energy_drift: f64,
    /// `log₂` of the density divergence ratio between successive EK grids at `t_end`.
    pub orders: Vec<f64>,
    /// Set when an EK run stopped early (vacuum or blow-up).
    pub truncated: Option<String>,
}

impl OracleReport {
    pub fn write_csv<W: std::io::Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "t,n_cells,rho_l2,J_l2,entropy_gap")?;
        for r in &self.rows {
            writeln!(
                w,
                "{:.17e},{},{:.17e},{:.17e},{:.17e}",
                r.t, r.n_cells, r.rho_l2, r.j_l2, r.entropy_gap
            )?;
        }
        Ok(())
    }
}

/// QHD cross-check (`γ = 2`, `k = 1/(4ρ)`) on identical data `(ρ₀, u₀)`.
pub fn oracle_compare(
    cfg: &OracleConfig,
    rho0: impl Fn(f64) -> f64 + Sync,
    u0: impl Fn(f64) -> f64 + Sync,
) -> Result<OracleReport, NlsError> {
    if cfg.ek_cells.is_empty() || cfg.samples == 0 || cfg.t_end <= 0.0 {
        return Err(NlsError::Config("need EK grids, samples >= 1 and t_end > 0".into()));
    }
    let sf = StateFunctions::qhd(2.0, cfg.epsilon).map_err(|e| NlsError::Config(e.to_string()))?;
    let times = ek::uniform_times(cfg.t_end, cfg.samples);
    let mut solver = NlsSolver::new(cfg.nls_cells);
    let mut wave = WaveState::from_hydro(cfg.nls_cells, cfg.epsilon, 2.0, &rho0, &u0);
    let m0 = wave.mass();
    let e0 = solver.energy(&wave);
    let mut nls_fields = Vec::with_capacity(times.len());
    for &t in &times {
        solver.advance_to(&mut wave, t, cfg.nls_dt);
        nls_fields.push(solver.madelung(&wave));
    }
    let nls_mass_drift = (wave.mass() - m0).abs() / m0;
    let nls_energy_drift = (solver.energy(&wave) - e0).abs() / e0.abs();

    let mut rows = Vec::new();
    let mut truncated = None;
    let mut finals = Vec::new();
    for &n in &cfg.ek_cells {
        let grid = Grid1D::unit(n).map_err(|e| NlsError::Config(e.to_string()))?;
        let init = FlowState::from_fns(grid, &rho0, |x| rho0(x) * u0(x));
        let traj = match ek::run(EkConfig::new(sf, grid, cfg.t_end), &init, &times) {
            Ok(t) => t,
            Err(e @ EkError::NonFinite { .. }) => {
                truncated = Some(format!("EK run on {n} cells stopped: {e}"));
                continue;
            }
            Err(e) => return Err(e.into()),
        };
        let xs = grid.centers();
        let r_ref: Vec<f64> = xs.iter().map(|&x| rho0(x)).collect();
        let zero = vec![0.0; n];
        for (k, s) in traj.snapshots.iter().enumerate() {
            let (nr, nj) = &nls_fields[k];
            let nr = cosine_interpolate_fast(nr, n);
            let nj = cosine_interpolate_fast(nj, n);
            let dr: Vec<f64> = s.rho.values.iter().zip(&nr).map(|(a, b)| a - b).collect();
            let dj: Vec<f64> = s.j.values.iter().zip(&nj).map(|(a, b)| a - b).collect();
            let e_ek = entropy_e(&sf, &Fields::from_state(&sf, s), &r_ref, &zero);
            let nls_state = FlowState::new(grid, nr, nj).map_err(|e| NlsError::Config(e.to_string()))?;
            let e_nls = entropy_e(&sf, &Fields::from_state(&sf, &nls_state), &r_ref, &zero);
            rows.push(OracleRow {
                t: times[k],
                n_cells: n,
                rho_l2: norms_of(&dr, grid.dx(), 2.0).l2,
                j_l2: norms_of(&dj, grid.dx(), 2.0).l2,
                entropy_gap: (e_ek - e_nls).abs(),
            });
        }
        finals.push(rows.last().map(|r| r.rho_l2).unwrap_or(f64::NAN));
    }
    let orders = finals.windows(2).map(|w| (w[0] / w[1]).log2()).collect();
    Ok(OracleReport {
        config: cfg.clone(),
        rows,
        nls_mass_drift,
        nls_energy_drift,
        orders,
        truncated,
    })
}

/// Restricts a cell-centred field on `m` cells to `n` cells: a direct pick
/// when centres coincide, cosine interpolation otherwise.
fn cosine_interpolate_fast(values: &[f64], n: usize) -> Vec<f64> {
    let m = values.len();
    if m == n {
        return values.to_vec();
    }
    if m.is_multiple_of(n) && (m / n) % 2 == 1 {
        let r = m / n;
        return (0..n).map(|i| values[r * i + r / 2]).collect();
    }
    let xs: Vec<f64> = (0..n).map(|i| (i as f64 + 0.5) / n as f64).collect();
    cosine_interpolate(values, &xs)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_state_only_rotates_phase() {
        let mut s = NlsSolver::new(32);
        let mut w = WaveState::from_hydro(32, 0.3, 2.0, |_| 1.5, |_| 0.0);
        s.advance_to(&mut w, 0.1, 1e-3);
        for p in &w.psi {
            assert!((p.norm() - 1.5f64.sqrt()).abs() < 1e-13);
        }
        let ph = w.psi[0].arg();
        assert!(w.psi.iter().all(|p| (p.arg() - ph).abs() < 1e-12));
    }

    #[test]
    fn mass_is_conserved() {
        let mut s = NlsSolver::new(128);
        let mut w = WaveState::from_hydro(128, 0.2, 2.0, |x| 1.0 + 0.3 * (PI * x).cos(), |x| 0.2 * (PI * x).sin());
        let m0 = w.mass();
        for _ in 0..10_000 {
            s.step(&mut w, 1e-4);
        }
        assert!(((w.mass() - m0) / m0).abs() < 1e-10);
    }

    #[test]
    fn energy_drift_is_second_order() {
        let drift = |dt: f64| {
            let mut s = NlsSolver::new(64);
            let mut w = WaveState::from_hydro(64, 0.3, 2.0, |x| 1.0 + 0.3 * (PI * x).cos(), |_| 0.0);
            let e0 = s.energy(&w);
            s.advance_to(&mut w, 0.2, dt);
            (s.energy(&w) - e0).abs()
        };
        let (a, b) = (drift(4e-3), drift(2e-3));
        assert!((a / b).log2() > 1.7, "{a} {b}");
    }

    #[test]
    fn madelung_of_real_and_wkb_states() {
        let mut s = NlsSolver::new(128);
        let w = WaveState::from_hydro(128, 0.2, 2.0, |x| 1.0 + 0.3 * (PI * x).cos(), |_| 0.0);
        let (rho, j) = s.madelung(&w);
        assert!(j.iter().all(|v| v.abs() < 1e-13));
        assert!(((rho.iter().sum::<f64>() / 128.0) - w.mass()).abs() < 1e-15);
        // S' = u odd about both walls: J = ρ u up to spectral error
        let u = |x: f64| 0.1 * (2.0 * PI * x).sin();
        let w = WaveState::from_hydro(256, 0.2, 2.0, |x| 1.0 + 0.3 * (PI * x).cos(), u);
        let mut s = NlsSolver::new(256);
        let (rho, j) = s.madelung(&w);
        for i in 0..256 {
            let x = (i as f64 + 0.5) / 256.0;
            assert!((j[i] - rho[i] * u(x)).abs() < 1e-6, "{i}");
        }
    }

    #[test]
    fn neumann_symmetry_is_exact() {
        let mut s = NlsSolver::new(64);
        let w = WaveState::from_hydro(64, 0.3, 2.0, |x| 1.0 + 0.3 * (PI * x).cos(), |x| 0.1 * (PI * x).sin());
        assert!(s.odd_mode_residual(&w, 1e-2) < 1e-14);
    }

    #[test]
    fn cosine_interpolation_is_exact_on_modes() {
        let v: Vec<f64> = (0..16).map(|i| (3.0 * PI * (i as f64 + 0.5) / 16.0).cos()).collect();
        let xs = [0.0, 0.13, 0.5, 1.0];
        for (x, y) in xs.iter().zip(cosine_interpolate(&v, &xs)) {
            assert!((y - (3.0 * PI * x).cos()).abs() < 1e-13);
        }
    }
}

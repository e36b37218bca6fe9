//! Spatial operators of the conservative Euler–Korteweg system
//!
//! ```text
//! ∂t ρ + ∂x J = 0
//! ∂t J + ∂x (J²/ρ + p(ρ)) = ε² ∂x S,   S = ∂xx K(ρ) − ½ K''(ρ) ρx² − βx²
//! ```

use serde::{Deserialize, Serialize};

use crate::grid::{fill_ghosts, Field, FlowState, GhostPolicy, GHOSTS};
use crate::state::StateFunctions;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
pub enum Reconstruction {
    FirstOrder,
    /// Unlimited centred slope.
    #[default]
    Linear,
    Minmod,
    VanLeer,
}

impl Reconstruction {
    #[inline]
    fn slope(self, qm: f64, q: f64, qp: f64) -> f64 {
        let (a, b) = (q - qm, qp - q);
        match self {
            Reconstruction::FirstOrder => 0.0,
            Reconstruction::Linear => 0.5 * (a + b),
            Reconstruction::Minmod => {
                if a * b <= 0.0 {
                    0.0
                } else if a.abs() < b.abs() {
                    a
                } else {
                    b
                }
            }
            Reconstruction::VanLeer => {
                if a * b <= 0.0 {
                    0.0
                } else {
                    2.0 * a * b / (a + b)
                }
            }
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "first-order" | "first_order" | "first" => Some(Self::FirstOrder),
            "linear" => Some(Self::Linear),
            "minmod" => Some(Self::Minmod),
            "van-leer" | "vanleer" | "van_leer" => Some(Self::VanLeer),
            _ => None,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Self::FirstOrder => "first-order",
            Self::Linear => "linear",
            Self::Minmod => "minmod",
            Self::VanLeer => "van-leer",
        }
    }
}

/// Scratch buffers for one evaluation of the right-hand side.
#[derive(Debug, Clone)]
pub(crate) struct Workspace {
    pub rho_e: Vec<f64>,
    pub j_e: Vec<f64>,
    pub flux_r: Vec<f64>,
    pub flux_j: Vec<f64>,
    pub s_e: Vec<f64>,
    pub aux: Vec<f64>,
}

impl Workspace {
    pub fn new(n: usize) -> Self {
        let ne = n + 2 * GHOSTS;
        Self {
            rho_e: vec![0.0; ne],
            j_e: vec![0.0; ne],
            flux_r: vec![0.0; n + 1],
            flux_j: vec![0.0; n + 1],
            s_e: vec![0.0; ne],
            aux: vec![0.0; ne],
        }
    }

    /// Loads `(ρ, J)` with ghosts, clamping ρ at `floor`; returns the number
    /// of clamped cells.
    pub fn load(&mut self, rho: &[f64], j: &[f64], floor: f64) -> usize {
        let n = rho.len();
        let mut flagged = 0;
        for i in 0..n {
            let r = rho[i];
            self.rho_e[i + GHOSTS] = if r < floor {
                flagged += 1;
                floor
            } else {
                r
            };
            self.j_e[i + GHOSTS] = j[i];
        }
        fill_ghosts(&mut self.rho_e, GHOSTS, GhostPolicy::Even);
        fill_ghosts(&mut self.j_e, GHOSTS, GhostPolicy::Odd);
        flagged
    }
}

/// Rusanov fluxes from the loaded workspace; adds `-∂x F` into `(drho, dj)`.
pub(crate) fn hyperbolic_into(
    sf: &StateFunctions,
    dx: f64,
    recon: Reconstruction,
    floor: f64,
    ws: &mut Workspace,
    drho: &mut [f64],
    dj: &mut [f64],
) {
    let n = drho.len();
    let (re, je) = (&ws.rho_e, &ws.j_e);
    for f in 0..=n {
        // face f separates cells f-1 and f; extended indices f+1 and f+2
        let (l, r) = (f + 1, f + 2);
        let sl_r = recon.slope(re[l - 1], re[l], re[l + 1]);
        let sl_j = recon.slope(je[l - 1], je[l], je[l + 1]);
        let sr_r = recon.slope(re[r - 1], re[r], re[r + 1]);
        let sr_j = recon.slope(je[r - 1], je[r], je[r + 1]);
        let rl = (re[l] + 0.5 * sl_r).max(floor);
        let jl = je[l] + 0.5 * sl_j;
        let rr = (re[r] - 0.5 * sr_r).max(floor);
        let jr = je[r] - 0.5 * sr_j;
        let (ul, ur) = (jl / rl, jr / rr);
        let a = (ul.abs() + sf.sound_speed(rl)).max(ur.abs() + sf.sound_speed(rr));
        ws.flux_r[f] = 0.5 * (jl + jr) - 0.5 * a * (rr - rl);
        ws.flux_j[f] = 0.5 * (jl * ul + sf.p(rl) + jr * ur + sf.p(rr)) - 0.5 * a * (jr - jl);
    }
    ws.flux_r[0] = 0.0;
    ws.flux_r[n] = 0.0;
    let h = 1.0 / dx;
    for i in 0..n {
        drho[i] -= (ws.flux_r[i + 1] - ws.flux_r[i]) * h;
        dj[i] -= (ws.flux_j[i + 1] - ws.flux_j[i]) * h;
    }
}

/// Capillary stress `S` at cells (K-form), stored with even ghosts in `ws.s_e`.
pub(crate) fn stress_k_form(sf: &StateFunctions, dx: f64, ws: &mut Workspace) {
    let n = ws.rho_e.len() - 2 * GHOSTS;
    let re = &ws.rho_e;
    for c in 1..n + 2 * GHOSTS - 1 {
        ws.aux[c] = sf.big_k(re[c]);
    }
    let h2 = 1.0 / (dx * dx);
    let h = 0.5 / dx;
    let mut bm = sf.beta(re[GHOSTS - 1]);
    let mut b0 = sf.beta(re[GHOSTS]);
    for c in GHOSTS..GHOSTS + n {
        let bp = sf.beta(re[c + 1]);
        let kxx = (ws.aux[c + 1] - 2.0 * ws.aux[c] + ws.aux[c - 1]) * h2;
        let rx = (re[c + 1] - re[c - 1]) * h;
        let bx = (bp - bm) * h;
        ws.s_e[c] = kxx - 0.5 * sf.big_k_second(re[c]) * rx * rx - bx * bx;
        bm = b0;
        b0 = bp;
    }
    fill_ghosts(&mut ws.s_e, GHOSTS, GhostPolicy::Even);
}

/// Capillary stress in the form `S = μ'(ρ) ∂x m − βx²`, `m = √ρ βx`.
pub(crate) fn stress_mu_form(sf: &StateFunctions, dx: f64, ws: &mut Workspace) {
    let n = ws.rho_e.len() - 2 * GHOSTS;
    let re = &ws.rho_e;
    let h = 0.5 / dx;
    for c in GHOSTS..GHOSTS + n {
        let bx = (sf.beta(re[c + 1]) - sf.beta(re[c - 1])) * h;
        ws.aux[c] = re[c].sqrt() * bx;
    }
    fill_ghosts(&mut ws.aux, GHOSTS, GhostPolicy::Odd);
    for c in GHOSTS..GHOSTS + n {
        let bx = ws.aux[c] / re[c].sqrt();
        let mx = (ws.aux[c + 1] - ws.aux[c - 1]) * h;
        ws.s_e[c] = sf.mu_prime(re[c]) * mx - bx * bx;
    }
    fill_ghosts(&mut ws.s_e, GHOSTS, GhostPolicy::Even);
}

/// Adds `ε² ∂x S` (centred) into `dj`.
pub(crate) fn add_stress_divergence(eps2: f64, dx: f64, ws: &Workspace, dj: &mut [f64]) {
    let h = 0.5 * eps2 / dx;
    for (i, d) in dj.iter_mut().enumerate() {
        let c = i + GHOSTS;
        *d += (ws.s_e[c + 1] - ws.s_e[c - 1]) * h;
    }
}

/// Capillary momentum tendency `ε²[∂x(∂xxK − ½K''ρx²) − ∂x(βx²)]`.
pub fn korteweg_rhs(sf: &StateFunctions, state: &FlowState, vacuum_floor: f64) -> Field {
    let n = state.grid.n_cells();
    let mut ws = Workspace::new(n);
    ws.load(&state.rho.values, &state.j.values, vacuum_floor);
    stress_k_form(sf, state.grid.dx(), &mut ws);
    let mut dj = vec![0.0; n];
    add_stress_divergence(sf.epsilon().powi(2), state.grid.dx(), &ws, &mut dj);
    Field::new(dj, GhostPolicy::Odd)
}

/// Same tendency through `ε² ∂x(μ'(ρ) ∂x m − βx²)`; agrees with
/// `korteweg_rhs` to second order.
pub fn korteweg_rhs_mu_form(sf: &StateFunctions, state: &FlowState, vacuum_floor: f64) -> Field {
    let n = state.grid.n_cells();
    let mut ws = Workspace::new(n);
    ws.load(&state.rho.values, &state.j.values, vacuum_floor);
    stress_mu_form(sf, state.grid.dx(), &mut ws);
    let mut dj = vec![0.0; n];
    add_stress_divergence(sf.epsilon().powi(2), state.grid.dx(), &ws, &mut dj);
    Field::new(dj, GhostPolicy::Odd)
}

/// Transport tendencies `(−∂x J, −∂x(J²/ρ + p))` from Rusanov fluxes.
pub fn hyperbolic_rhs(
    sf: &StateFunctions,
    state: &FlowState,
    recon: Reconstruction,
    vacuum_floor: f64,
) -> (Field, Field) {
    let n = state.grid.n_cells();
    let mut ws = Workspace::new(n);
    ws.load(&state.rho.values, &state.j.values, vacuum_floor);
    let (mut dr, mut dj) = (vec![0.0; n], vec![0.0; n]);
    hyperbolic_into(sf, state.grid.dx(), recon, vacuum_floor, &mut ws, &mut dr, &mut dj);
    (Field::new(dr, GhostPolicy::Even), Field::new(dj, GhostPolicy::Odd))
}

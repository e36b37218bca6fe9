//! Discrete residuals of the weak formulations, evaluated on a sampled
//! trajectory with a time quadrature over the samples.

use serde::{Deserialize, Serialize};

use super::{EkError, EkTrajectory};
use crate::grid::{Field, FlowState, GhostPolicy, GHOSTS};
use crate::state::StateFunctions;

/// Smooth space-time test function with the derivatives the weak forms need.
pub trait TestFunction: Sync {
    fn value(&self, x: f64, t: f64) -> f64;
    fn dx(&self, x: f64, t: f64) -> f64;
    fn dxx(&self, x: f64, t: f64) -> f64;
    fn dt(&self, x: f64, t: f64) -> f64;
}

/// `a · cos(kπx)`; even across walls of `[0, 1]`.
#[derive(Debug, Clone, Copy)]
pub struct CosineTest {
    pub k: f64,
    pub a: f64,
}

/// `a · sin(kπx) · (1 + t)`; vanishes on the walls of `[0, 1]` for integer `k`.
#[derive(Debug, Clone, Copy)]
pub struct SineTest {
    pub k: f64,
    pub a: f64,
}

impl TestFunction for CosineTest {
    fn value(&self, x: f64, _t: f64) -> f64 {
        self.a * (self.k * std::f64::consts::PI * x).cos()
    }
    fn dx(&self, x: f64, _t: f64) -> f64 {
        let w = self.k * std::f64::consts::PI;
        -self.a * w * (w * x).sin()
    }
    fn dxx(&self, x: f64, _t: f64) -> f64 {
        let w = self.k * std::f64::consts::PI;
        -self.a * w * w * (w * x).cos()
    }
    fn dt(&self, _x: f64, _t: f64) -> f64 {
        0.0
    }
}

impl TestFunction for SineTest {
    fn value(&self, x: f64, t: f64) -> f64 {
        self.a * (self.k * std::f64::consts::PI * x).sin() * (1.0 + t)
    }
    fn dx(&self, x: f64, t: f64) -> f64 {
        let w = self.k * std::f64::consts::PI;
        self.a * w * (w * x).cos() * (1.0 + t)
    }
    fn dxx(&self, x: f64, t: f64) -> f64 {
        let w = self.k * std::f64::consts::PI;
        -self.a * w * w * (w * x).sin() * (1.0 + t)
    }
    fn dt(&self, x: f64, _t: f64) -> f64 {
        self.a * (self.k * std::f64::consts::PI * x).sin()
    }
}

/// Identically zero.
#[derive(Debug, Clone, Copy)]
pub struct ZeroTest;

impl TestFunction for ZeroTest {
    fn value(&self, _: f64, _: f64) -> f64 {
        0.0
    }
    fn dx(&self, _: f64, _: f64) -> f64 {
        0.0
    }
    fn dxx(&self, _: f64, _: f64) -> f64 {
        0.0
    }
    fn dt(&self, _: f64, _: f64) -> f64 {
        0.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WeakResiduals {
    /// Continuity equation (or first equation of a pair).
    pub first: f64,
    /// Momentum equation (or second equation of a pair).
    pub second: f64,
}

/// Composite Simpson on uniform samples with an even number of intervals,
/// trapezoid otherwise.
pub(crate) fn time_integral(times: &[f64], values: &[f64]) -> f64 {
    let n = times.len();
    if n < 2 {
        return 0.0;
    }
    let h = (times[n - 1] - times[0]) / (n - 1) as f64;
    let uniform = times
        .windows(2)
        .all(|w| ((w[1] - w[0]) - h).abs() <= 1e-9 * h.abs().max(1e-300));
    if uniform && (n - 1).is_multiple_of(2) {
        let mut s = values[0] + values[n - 1];
        for (k, v) in values.iter().enumerate().take(n - 1).skip(1) {
            s += if k % 2 == 1 { 4.0 * v } else { 2.0 * v };
        }
        s * h / 3.0
    } else {
        times
            .windows(2)
            .zip(values.windows(2))
            .map(|(t, v)| 0.5 * (t[1] - t[0]) * (v[0] + v[1]))
            .sum()
    }
}

/// Per-cell fields reused by every residual.
struct Local {
    rho: Vec<f64>,
    j: Vec<f64>,
    rho_x: Vec<f64>,
    beta_x: Vec<f64>,
    big_k_x: Vec<f64>,
}

fn centred(ext: &[f64], dx: f64) -> Vec<f64> {
    let n = ext.len() - 2 * GHOSTS;
    (0..n)
        .map(|i| (ext[i + GHOSTS + 1] - ext[i + GHOSTS - 1]) / (2.0 * dx))
        .collect()
}

fn local(sf: &StateFunctions, s: &FlowState) -> Local {
    let dx = s.grid.dx();
    let re = s.rho.extended();
    let be: Vec<f64> = re.iter().map(|&r| sf.beta(r)).collect();
    let ke: Vec<f64> = re.iter().map(|&r| sf.big_k(r)).collect();
    Local {
        rho: s.rho.values.clone(),
        j: s.j.values.clone(),
        rho_x: centred(&re, dx),
        beta_x: centred(&be, dx),
        big_k_x: centred(&ke, dx),
    }
}

fn check_walls(phi: &dyn TestFunction, traj: &EkTrajectory) -> Result<(), EkError> {
    let g = traj.config.grid;
    let worst = traj
        .times
        .iter()
        .map(|&t| phi.value(g.x_min(), t).abs().max(phi.value(g.x_max(), t).abs()))
        .fold(0.0, f64::max);
    if worst > 1e-12 {
        return Err(EkError::BadTestFunction(worst));
    }
    Ok(())
}

/// Generic weak residual `[∫ q φ]₀^T − ∫∫ G(x, t)` where `q` and `G` come from
/// per-cell closures.
fn residual<Q, G>(traj: &EkTrajectory, q: Q, g: G) -> Result<f64, EkError>
where
    Q: Fn(usize, &Local, usize, f64, f64) -> f64,
    G: Fn(usize, &Local, usize, f64, f64) -> f64,
{
    let ns = traj.times.len();
    if ns < 2 {
        return Err(EkError::ShortTrajectory(ns));
    }
    let sf = traj.config.state;
    let grid = traj.config.grid;
    let dx = grid.dx();
    let mut integrand = Vec::with_capacity(ns);
    let mut boundary = [0.0; 2];
    for (k, (s, &t)) in traj.snapshots.iter().zip(&traj.times).enumerate() {
        let loc = local(&sf, s);
        let mut acc = 0.0;
        let mut qa = 0.0;
        for i in 0..grid.n_cells() {
            let x = grid.x(i);
            acc += g(k, &loc, i, x, t);
            if k == 0 || k == ns - 1 {
                qa += q(k, &loc, i, x, t);
            }
        }
        integrand.push(acc * dx);
        if k == 0 {
            boundary[0] = qa * dx;
        }
        if k == ns - 1 {
            boundary[1] = qa * dx;
        }
    }
    Ok(boundary[1] - boundary[0] - time_integral(&traj.times, &integrand))
}

/// Residuals of the mass and momentum weak formulations for test functions
/// `ψ` (any) and `φ` (vanishing at the walls).
pub fn weak_residuals(
    traj: &EkTrajectory,
    psi: &dyn TestFunction,
    phi: &dyn TestFunction,
) -> Result<WeakResiduals, EkError> {
    check_walls(phi, traj)?;
    let sf = traj.config.state;
    let e2 = sf.epsilon().powi(2);
    let first = residual(
        traj,
        |_, l, i, x, t| l.rho[i] * psi.value(x, t),
        |_, l, i, x, t| l.rho[i] * psi.dt(x, t) + l.j[i] * psi.dx(x, t),
    )?;
    let second = residual(
        traj,
        |_, l, i, x, t| l.j[i] * phi.value(x, t),
        |_, l, i, x, t| {
            let (r, j) = (l.rho[i], l.j[i]);
            let px = phi.dx(x, t);
            j * phi.dt(x, t)
                + (j * j / r + sf.p(r)) * px
                + e2 * (l.beta_x[i].powi(2) * px
                    + 0.5 * sf.big_k_second(r) * l.rho_x[i].powi(2) * px
                    + l.big_k_x[i] * phi.dxx(x, t))
        },
    )?;
    Ok(WeakResiduals { first, second })
}

/// Weak residual of `∂t m + ∂x(∂x(μ'J) − Λ√ρ ∂x μ') = 0`, `m = √ρ βx`.
pub fn m_equation_residual(traj: &EkTrajectory, phi: &dyn TestFunction) -> Result<f64, EkError> {
    check_walls(phi, traj)?;
    let sf = traj.config.state;
    residual(
        traj,
        |_, l, i, x, t| l.rho[i].sqrt() * l.beta_x[i] * phi.value(x, t),
        |_, l, i, x, t| {
            let r = l.rho[i];
            r.sqrt() * l.beta_x[i] * phi.dt(x, t)
                - sf.mu_prime(r) * l.j[i] * phi.dxx(x, t)
                - l.j[i] * sf.mu_second(r) * l.rho_x[i] * phi.dx(x, t)
        },
    )
}

/// Weak residuals of the velocity form
/// `∂t u + u ux + ∂x(f'(ρ) − ε²μ' vx − ε²/2 v²) = 0`, `∂t v + ∂x(uv + μ' ux) = 0`.
pub fn augmented_residuals(traj: &EkTrajectory, phi: &dyn TestFunction) -> Result<WeakResiduals, EkError> {
    check_walls(phi, traj)?;
    let sf = traj.config.state;
    let e2 = sf.epsilon().powi(2);
    let dx = traj.config.grid.dx();
    // u, v and their centred gradients per snapshot
    let fields: Vec<[Vec<f64>; 4]> = traj
        .snapshots
        .iter()
        .map(|s| {
            let u = s.velocity();
            let re = s.rho.extended();
            let rx = centred(&re, dx);
            let v: Vec<f64> = s
                .rho
                .values
                .iter()
                .zip(&rx)
                .map(|(&r, &g)| sf.theta_prime(r) * g)
                .collect();
            let ux = centred(&u.extended(), dx);
            let vx = centred(&Field::new(v.clone(), GhostPolicy::Odd).extended(), dx);
            [u.values, ux, v, vx]
        })
        .collect();
    let first = residual(
        traj,
        |k, _, i, x, t| fields[k][0][i] * phi.value(x, t),
        |k, l, i, x, t| {
            let f = &fields[k];
            let (u, ux, v, vx) = (f[0][i], f[1][i], f[2][i], f[3][i]);
            let r = l.rho[i];
            u * phi.dt(x, t) - u * ux * phi.value(x, t)
                + (sf.f_prime(r) - e2 * sf.mu_prime(r) * vx - 0.5 * e2 * v * v) * phi.dx(x, t)
        },
    )?;
    let second = residual(
        traj,
        |k, _, i, x, t| fields[k][2][i] * phi.value(x, t),
        |k, l, i, x, t| {
            let f = &fields[k];
            let (u, ux, v) = (f[0][i], f[1][i], f[2][i]);
            v * phi.dt(x, t) + (u * v + sf.mu_prime(l.rho[i]) * ux) * phi.dx(x, t)
        },
    )?;
    Ok(WeakResiduals { first, second })
}

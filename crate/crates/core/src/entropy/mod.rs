//! Relative-entropy functionals, remainder terms and the Gronwall checks.

pub mod gn;

use serde::{Deserialize, Serialize};

use crate::boundary_layer::BoundaryLayerField;
use crate::ek::total_energy;
use crate::euler::EulerSnapshot;
use crate::grid::FlowState;
use crate::state::StateFunctions;

pub use gn::{gn_exponents, gn_ratio, GnError, GnField};

/// Per-cell EK quantities shared by every functional.
#[derive(Debug, Clone, PartialEq)]
pub struct Fields {
    pub dx: f64,
    pub rho: Vec<f64>,
    pub j: Vec<f64>,
    pub rho_x: Vec<f64>,
    pub beta_x: Vec<f64>,
    /// `m = √ρ ∂x β(ρ)`, or `∂x μ(ρ)` when built from analytic gradients.
    pub m: Vec<f64>,
}

impl Fields {
    /// Centred differences on the cell grid.
    pub fn from_state(sf: &StateFunctions, s: &FlowState) -> Self {
        let gb = s.grad_beta(sf).values;
        let rho_x = crate::grid::gradient(&s.grid, &s.rho).expect("lengths checked").values;
        let m = s.rho.values.iter().zip(&gb).map(|(r, g)| r.sqrt() * g).collect();
        Self {
            dx: s.grid.dx(),
            rho: s.rho.values.clone(),
            j: s.j.values.clone(),
            rho_x,
            beta_x: gb,
            m,
        }
    }

    /// From exact point values of `ρ`, `ρx` and `J`; `m = μ'(ρ) ρx`.
    pub fn from_analytic(sf: &StateFunctions, dx: f64, rho: Vec<f64>, rho_x: Vec<f64>, j: Vec<f64>) -> Self {
        let beta_x = rho.iter().zip(&rho_x).map(|(&r, &g)| sf.beta_prime(r) * g).collect();
        let m = rho.iter().zip(&rho_x).map(|(&r, &g)| sf.mu_prime(r) * g).collect();
        Self {
            dx,
            rho,
            j,
            rho_x,
            beta_x,
            m,
        }
    }

    pub fn len(&self) -> usize {
        self.rho.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rho.is_empty()
    }

    fn lambda(&self, i: usize) -> f64 {
        self.j[i] / self.rho[i].sqrt()
    }

    fn sum<F: Fn(usize) -> f64>(&self, f: F) -> f64 {
        (0..self.len()).map(f).sum::<f64>() * self.dx
    }

    /// `E_EK = ∫ ½J²/ρ + f(ρ) + ε²/2 βx²`.
    pub fn energy(&self, sf: &StateFunctions) -> f64 {
        let e2 = sf.epsilon().powi(2);
        self.sum(|i| {
            let r = self.rho[i];
            0.5 * self.j[i] * self.j[i] / r + sf.f(r) + 0.5 * e2 * self.beta_x[i].powi(2)
        })
    }
}

/// `∫ ½|Λ − √ρ U|² + f(ρ|r) + ε²/2 |βx|²`.
pub fn entropy_e(sf: &StateFunctions, fl: &Fields, r: &[f64], u: &[f64]) -> f64 {
    let e2 = sf.epsilon().powi(2);
    fl.sum(|i| {
        let d = fl.lambda(i) - fl.rho[i].sqrt() * u[i];
        0.5 * d * d + sf.f_rel(fl.rho[i], r[i]) + 0.5 * e2 * fl.beta_x[i].powi(2)
    })
}

/// Same functional through the energy: `E_EK − ∫ J U + ρ(−½U² + f'(r)) + ∫ p(r)`.
pub fn entropy_e_expanded(sf: &StateFunctions, fl: &Fields, r: &[f64], u: &[f64]) -> f64 {
    let lin = fl.sum(|i| fl.j[i] * u[i] + fl.rho[i] * (-0.5 * u[i] * u[i] + sf.f_prime(r[i])) - sf.p(r[i]));
    fl.energy(sf) - lin
}

/// `½∫ |Λ − √ρ U|² + ε²|βx − √ρ V|² + ∫ f(ρ|r)`.
pub fn entropy_eh(sf: &StateFunctions, fl: &Fields, r: &[f64], u: &[f64], v: &[f64]) -> f64 {
    let e2 = sf.epsilon().powi(2);
    fl.sum(|i| {
        let s = fl.rho[i].sqrt();
        let a = fl.lambda(i) - s * u[i];
        let b = fl.beta_x[i] - s * v[i];
        0.5 * (a * a + e2 * b * b) + sf.f_rel(fl.rho[i], r[i])
    })
}

/// `E_EK − ∫ J U + ρ(−½U² − ε²/2 V² + ε² v V + f'(r)) + ∫ p(r)`, `v = m/ρ`.
pub fn entropy_eh_expanded(sf: &StateFunctions, fl: &Fields, r: &[f64], u: &[f64], v: &[f64]) -> f64 {
    let e2 = sf.epsilon().powi(2);
    let lin = fl.sum(|i| {
        let rho = fl.rho[i];
        let vv = fl.m[i] / rho;
        fl.j[i] * u[i] + rho * (-0.5 * u[i] * u[i] - 0.5 * e2 * v[i] * v[i] + e2 * vv * v[i] + sf.f_prime(r[i]))
            - sf.p(r[i])
    });
    fl.energy(sf) - lin
}

/// `∫ ε²/2 ρ V² − ε² m V`, the gap `E_h − E`.
pub fn entropy_gap(sf: &StateFunctions, fl: &Fields, v: &[f64]) -> f64 {
    let e2 = sf.epsilon().powi(2);
    fl.sum(|i| 0.5 * e2 * fl.rho[i] * v[i] * v[i] - e2 * fl.m[i] * v[i])
}

/// First-order remainder pieces.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Remainder {
    pub r1: f64,
    pub r2: f64,
    pub r3: f64,
    pub r4: f64,
    pub r5: f64,
}

impl Remainder {
    pub fn total(&self) -> f64 {
        self.r1 + self.r2 + self.r3 + self.r4 + self.r5
    }
}

/// High-order remainder pieces.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct RemainderHigh {
    pub r_rel: f64,
    pub r_in: f64,
    pub r_bl: [f64; 10],
}

impl RemainderHigh {
    pub fn r_bl_total(&self) -> f64 {
        self.r_bl.iter().sum()
    }

    pub fn total(&self) -> f64 {
        self.r_rel + self.r_in + self.r_bl_total()
    }
}

fn p_rel(sf: &StateFunctions, rho: f64, r: f64) -> f64 {
    sf.p(rho) - sf.p(r) - sf.p_prime(r) * (rho - r)
}

/// `R1..R5` against a reference sampled on the same cells.
pub fn remainder_r(sf: &StateFunctions, fl: &Fields, re: &EulerSnapshot) -> Remainder {
    let e2 = sf.epsilon().powi(2);
    let mut out = Remainder::default();
    for i in 0..fl.len() {
        let (rho, ux, uxx) = (fl.rho[i], re.u_x[i], re.u_xx[i]);
        let d = fl.lambda(i) - rho.sqrt() * re.u[i];
        out.r1 -= d * d * ux;
        out.r2 -= ux * p_rel(sf, rho, re.rho[i]);
        out.r3 -= e2 * fl.beta_x[i].powi(2) * ux;
        out.r4 -= 0.5 * e2 * sf.big_k_second(rho) * fl.rho_x[i].powi(2) * ux;
        out.r5 -= e2 * sf.big_k_prime(rho) * fl.rho_x[i] * uxx;
    }
    out.r1 *= fl.dx;
    out.r2 *= fl.dx;
    out.r3 *= fl.dx;
    out.r4 *= fl.dx;
    out.r5 *= fl.dx;
    out
}

/// `R_rel`, `R_in` and the ten pieces of `R_bl`.
pub fn remainder_rh(sf: &StateFunctions, fl: &Fields, re: &EulerSnapshot, bl: &BoundaryLayerField) -> RemainderHigh {
    let e2 = sf.epsilon().powi(2);
    let mut rel = 0.0;
    let mut rin = 0.0;
    let mut b = [0.0; 10];
    for i in 0..fl.len() {
        let (rho, j, rx, m) = (fl.rho[i], fl.j[i], fl.rho_x[i], fl.m[i]);
        let s = rho.sqrt();
        let (re_rho, u, ux, uxx) = (re.rho[i], re.u[i], re.u_x[i], re.u_xx[i]);
        let (ve, vex, vexx) = (re.v[i], re.v_x[i], re.v_xx[i]);
        let (mu_p, mu_pp) = (sf.mu_prime(rho), sf.mu_second(rho));
        let md = re.mu_p[i] - mu_p;
        let md_x = re.mu_p_x[i] - mu_pp * rx;
        let a = fl.lambda(i) - s * u;
        let g = fl.beta_x[i] - s * ve;
        rel += -(a * a + e2 * g * g) * ux + e2 * (m - rho * ve) * (md_x * ux + md * uxx)
            - e2 * (j - rho * u) * (md_x * vex + md * vexx)
            - p_rel(sf, rho, re_rho) * ux;
        rin -= e2 * (rho * u - j) * (re.mu_p_x[i] * vex + re.mu_p[i] * vexx + ve * vex);
        let (vb, vbx, vbxx, vbt) = (bl.v_bl[i], bl.dx_v_bl[i], bl.dxx_v_bl[i], bl.dt_v_bl[i]);
        b[0] -= (rho * bl.v_e_bl[i] - m) * vbt;
        b[1] += j * (vb * vbx - vb * vex - ve * vbx);
        b[2] += rho * vb * ve * ux;
        b[3] += rho * vb * md_x * ux;
        b[4] += rho * md * vb * uxx;
        b[5] -= mu_p * j * vbxx;
        b[6] -= rho * mu_p * vbx * ux;
        b[7] -= mu_p * vb * rx * ux;
        b[8] -= j * mu_pp * rx * vbx;
        b[9] += vbx * m * u + m * vb * ux - ux * m * vb - m * u * vbx;
    }
    for v in &mut b {
        *v *= e2 * fl.dx;
    }
    RemainderHigh {
        r_rel: rel * fl.dx,
        r_in: rin * fl.dx,
        r_bl: b,
    }
}

/// Distances of both convergence statements.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Distances {
    pub l1: f64,
    pub lgamma: f64,
    pub lambda: f64,
    pub gradbeta: f64,
    /// `‖J − ρ^E u^E‖_{L¹}`.
    pub momentum: f64,
    /// `‖u^E‖_∞ ‖ρ − ρ^E‖_{L¹} + ‖√ρ‖_{L²} ‖Λ − √ρ u^E‖_{L²}`.
    pub momentum_bound: f64,
}

/// Against reference density, velocity and `v^E` on the same cells.
pub fn distances(sf: &StateFunctions, fl: &Fields, re_rho: &[f64], re_u: &[f64], re_v: &[f64]) -> Distances {
    let g = sf.gamma();
    let (mut l1, mut lg, mut la, mut gb, mut mo, mut mass) = (0.0, 0.0, 0.0, 0.0, 0.0, 0.0);
    let mut umax = 0.0f64;
    for i in 0..fl.len() {
        let rho = fl.rho[i];
        let s = rho.sqrt();
        let d = (rho - re_rho[i]).abs();
        l1 += d;
        lg += d.powf(g);
        la += (fl.lambda(i) - s * re_u[i]).powi(2);
        gb += (fl.beta_x[i] - s * re_v[i]).powi(2);
        mo += (fl.j[i] - re_rho[i] * re_u[i]).abs();
        mass += rho;
        umax = umax.max(re_u[i].abs());
    }
    let dx = fl.dx;
    let l1 = l1 * dx;
    let lambda = (la * dx).sqrt();
    Distances {
        l1,
        lgamma: (lg * dx).powf(1.0 / g),
        lambda,
        gradbeta: sf.epsilon() * (gb * dx).sqrt(),
        momentum: mo * dx,
        momentum_bound: umax * l1 + (mass * dx).sqrt() * lambda,
    }
}

/// One time level of the entropy bookkeeping.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EntropyRow {
    pub t: f64,
    pub e_ek: f64,
    pub e: f64,
    pub e_h: f64,
    /// `E_h` with the uncorrected `v^E`.
    pub e_h_e: f64,
    pub r: Remainder,
    pub rh: RemainderHigh,
    pub dist: Distances,
    /// `ε²/2 ∫ ρ |v_bl|²`, the offset in `½ E_h^E ≤ E_h + offset`.
    pub bl_offset: f64,
}

impl EntropyRow {
    pub fn evaluate(
        sf: &StateFunctions,
        t: f64,
        state: &FlowState,
        re: &EulerSnapshot,
        bl: &BoundaryLayerField,
    ) -> Self {
        let fl = Fields::from_state(sf, state);
        let e2 = sf.epsilon().powi(2);
        Self {
            t,
            e_ek: total_energy(sf, state),
            e: entropy_e(sf, &fl, &re.rho, &re.u),
            e_h: entropy_eh(sf, &fl, &re.rho, &re.u, &bl.v_e_bl),
            e_h_e: entropy_eh(sf, &fl, &re.rho, &re.u, &re.v),
            r: remainder_r(sf, &fl, re),
            rh: remainder_rh(sf, &fl, re, bl),
            dist: distances(sf, &fl, &re.rho, &re.u, &re.v),
            bl_offset: 0.5 * e2 * fl.sum(|i| fl.rho[i] * bl.v_bl[i] * bl.v_bl[i]),
        }
    }

    pub const CSV_HEADER: &'static str = "t,E_EK,E,E_h,E_h_E,R1,R2,R3,R4,R5,R,R_rel,R_in,\
R_bl_1,R_bl_2,R_bl_3,R_bl_4,R_bl_5,R_bl_6,R_bl_7,R_bl_8,R_bl_9,R_bl_10,R_h,\
dist_L1,dist_Lgamma,dist_Lambda,dist_gradbeta,dist_J";

    pub fn csv_values(&self) -> Vec<f64> {
        let mut v = vec![
            self.t,
            self.e_ek,
            self.e,
            self.e_h,
            self.e_h_e,
            self.r.r1,
            self.r.r2,
            self.r.r3,
            self.r.r4,
            self.r.r5,
            self.r.total(),
            self.rh.r_rel,
            self.rh.r_in,
        ];
        v.extend_from_slice(&self.rh.r_bl);
        v.extend_from_slice(&[
            self.rh.total(),
            self.dist.l1,
            self.dist.lgamma,
            self.dist.lambda,
            self.dist.gradbeta,
            self.dist.momentum,
        ]);
        v
    }
}

/// Outcome of both Gronwall-type inequalities on a sampled series.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GronwallCheck {
    pub tol: f64,
    /// `min_τ [E(0) + ∫₀^τ R − E(τ)]`.
    pub margin: f64,
    pub margin_h: f64,
    /// `sup_t |R| / E`.
    pub c_fit: f64,
    pub c_fit_h: f64,
    /// `E(τ) ≤ e^{C_fit τ}(E(0) + tol)` at every sample.
    pub envelope_ok: bool,
    /// `½ E_h^E ≤ E_h + ε²/2 ∫ρ|v_bl|²` at every sample.
    pub corrected_ok: bool,
}

impl GronwallCheck {
    pub fn holds(&self) -> bool {
        self.margin >= -self.tol && self.margin_h >= -self.tol
    }
}

/// Running time integral: composite Simpson on pairs of uniform intervals,
/// with a cubic end correction on an odd last interval.
fn cumulative_integral(t: &[f64], f: &[f64]) -> Vec<f64> {
    let n = t.len();
    let mut out = vec![0.0; n];
    for k in 1..n {
        let h = t[k] - t[k - 1];
        out[k] = out[k - 1]
            + if n >= 3 {
                // three-point rule on the interval [k-1, k] using a neighbour
                let (a, b, c) = if k >= 2 { (k - 2, k - 1, k) } else { (0, 1, 2) };
                let (ta, tb, tc) = (t[a], t[b], t[c]);
                // integrate the quadratic through (a, b, c) over [t_{k-1}, t_k]
                quad_segment(ta, tb, tc, f[a], f[b], f[c], t[k - 1], t[k])
            } else {
                0.5 * h * (f[k - 1] + f[k])
            };
    }
    out
}

fn quad_segment(ta: f64, tb: f64, tc: f64, fa: f64, fb: f64, fc: f64, lo: f64, hi: f64) -> f64 {
    // Lagrange basis integrals via Gauss–Legendre with two nodes (exact for quadratics)
    let lag = |s: f64| {
        fa * (s - tb) * (s - tc) / ((ta - tb) * (ta - tc))
            + fb * (s - ta) * (s - tc) / ((tb - ta) * (tb - tc))
            + fc * (s - ta) * (s - tb) / ((tc - ta) * (tc - tb))
    };
    let mid = 0.5 * (lo + hi);
    let half = 0.5 * (hi - lo);
    let g = half / 3f64.sqrt();
    half * (lag(mid - g) + lag(mid + g))
}

/// `tol = 10 (dx² + dt²) E_EK(0)`.
pub fn discrete_tolerance(dx: f64, dt: f64, e_ek0: f64) -> f64 {
    10.0 * (dx * dx + dt * dt) * e_ek0.abs()
}

pub fn gronwall_check(rows: &[EntropyRow], tol: f64) -> GronwallCheck {
    let t: Vec<f64> = rows.iter().map(|r| r.t).collect();
    let r: Vec<f64> = rows.iter().map(|r| r.r.total()).collect();
    let rh: Vec<f64> = rows.iter().map(|r| r.rh.total()).collect();
    let ir = cumulative_integral(&t, &r);
    let irh = cumulative_integral(&t, &rh);
    let (e0, eh0) = (rows[0].e, rows[0].e_h);
    let mut margin = f64::INFINITY;
    let mut margin_h = f64::INFINITY;
    let mut c_fit = 0.0f64;
    let mut c_fit_h = 0.0f64;
    let mut corrected_ok = true;
    for (k, row) in rows.iter().enumerate() {
        margin = margin.min(e0 + ir[k] - row.e);
        margin_h = margin_h.min(eh0 + irh[k] - row.e_h);
        c_fit = c_fit.max(r[k].abs() / row.e.max(1e-14));
        c_fit_h = c_fit_h.max(rh[k].abs() / row.e_h.max(1e-14));
        corrected_ok &= 0.5 * row.e_h_e <= row.e_h + row.bl_offset;
    }
    let envelope_ok = rows
        .iter()
        .all(|row| row.e <= (c_fit * (row.t - t[0])).exp() * (e0 + tol));
    GronwallCheck {
        tol,
        margin,
        margin_h,
        c_fit,
        c_fit_h,
        envelope_ok,
        corrected_ok,
    }
}

/// Time series of entropy rows plus the Gronwall verdict.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EntropyReport {
    pub rows: Vec<EntropyRow>,
    pub gronwall: GronwallCheck,
}

impl EntropyReport {
    pub fn new(rows: Vec<EntropyRow>, tol: f64) -> Self {
        let gronwall = gronwall_check(&rows, tol);
        Self { rows, gronwall }
    }

    pub fn last(&self) -> &EntropyRow {
        self.rows.last().expect("non-empty series")
    }

    pub fn write_csv<W: std::io::Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "{}", EntropyRow::CSV_HEADER)?;
        for r in &self.rows {
            let s: Vec<String> = r.csv_values().iter().map(|v| format!("{v:.17e}")).collect();
            writeln!(w, "{}", s.join(","))?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::Grid1D;
    use std::f64::consts::PI;

    fn fields(sf: &StateFunctions, n: usize, rho: impl Fn(f64) -> (f64, f64), j: impl Fn(f64) -> f64) -> Fields {
        let g = Grid1D::unit(n).unwrap();
        let xs = g.centers();
        let r: Vec<(f64, f64)> = xs.iter().map(|&x| rho(x)).collect();
        Fields::from_analytic(
            sf,
            g.dx(),
            r.iter().map(|p| p.0).collect(),
            r.iter().map(|p| p.1).collect(),
            xs.iter().map(|&x| j(x)).collect(),
        )
    }

    #[test]
    fn constant_state_has_zero_entropy() {
        let sf = StateFunctions::qhd(2.0, 0.1).unwrap();
        let fl = fields(&sf, 64, |_| (1.0, 0.0), |_| 0.0);
        let one = vec![1.0; 64];
        let zero = vec![0.0; 64];
        assert_eq!(entropy_e(&sf, &fl, &one, &zero), 0.0);
        assert_eq!(entropy_eh(&sf, &fl, &one, &zero, &zero), 0.0);
    }

    #[test]
    fn capillary_term_is_absolute() {
        let sf = StateFunctions::new(2.0, 0.0, 1.0, 0.3).unwrap();
        let fl = fields(
            &sf,
            256,
            |x| (1.0 + 0.2 * (PI * x).cos(), -0.2 * PI * (PI * x).sin()),
            |_| 0.0,
        );
        let r = fl.rho.clone();
        let zero = vec![0.0; 256];
        let e = entropy_e(&sf, &fl, &r, &zero);
        let cap = 0.5 * 0.09 * fl.sum(|i| fl.beta_x[i].powi(2));
        assert!(e > 0.0 && (e - cap).abs() < 1e-15);
    }

    #[test]
    fn expanded_forms_agree() {
        let sf = StateFunctions::new(1.6, 0.4, 0.7, 0.2).unwrap();
        let fl = fields(
            &sf,
            200,
            |x| (1.0 + 0.3 * (2.0 * PI * x).cos(), -0.6 * PI * (2.0 * PI * x).sin()),
            |x| 0.2 * (PI * x).sin(),
        );
        let xs = Grid1D::unit(200).unwrap().centers();
        let r: Vec<f64> = xs.iter().map(|x| 1.1 + 0.1 * x).collect();
        let u: Vec<f64> = xs.iter().map(|x| 0.3 * x * (1.0 - x)).collect();
        let v: Vec<f64> = xs.iter().map(|x| (3.0 * x).sin()).collect();
        let a = entropy_e(&sf, &fl, &r, &u);
        let b = entropy_e_expanded(&sf, &fl, &r, &u);
        assert!((a - b).abs() <= 1e-10 * a.abs());
        let a = entropy_eh(&sf, &fl, &r, &u, &v);
        let b = entropy_eh_expanded(&sf, &fl, &r, &u, &v);
        assert!((a - b).abs() <= 1e-10 * a.abs());
        let gap = entropy_eh(&sf, &fl, &r, &u, &v) - entropy_e(&sf, &fl, &r, &u);
        assert!((gap - entropy_gap(&sf, &fl, &v)).abs() <= 1e-10 * a.abs());
        let zero = vec![0.0; 200];
        assert_eq!(entropy_eh(&sf, &fl, &r, &u, &zero), entropy_e(&sf, &fl, &r, &u));
    }

    #[test]
    fn lgamma_distance_of_sine_perturbation() {
        let sf = StateFunctions::qhd(2.0, 0.1).unwrap();
        let n = 512;
        let fl = fields(&sf, n, |x| (1.0 + 0.1 * (2.0 * PI * x).sin(), 0.0), |_| 0.0);
        let d = distances(&sf, &fl, &vec![1.0; n], &vec![0.0; n], &vec![0.0; n]);
        assert!((d.lgamma - 0.1 / 2f64.sqrt()).abs() < 1e-6);
        assert!(d.momentum <= d.momentum_bound + 1e-15);
    }

    #[test]
    fn cumulative_integral_is_exact_for_quadratics() {
        let t: Vec<f64> = (0..=7).map(|k| 0.1 * k as f64).collect();
        let f: Vec<f64> = t.iter().map(|s| 1.0 + s - 3.0 * s * s).collect();
        let c = cumulative_integral(&t, &f);
        for (k, &s) in t.iter().enumerate() {
            let exact = s + 0.5 * s * s - s * s * s;
            assert!((c[k] - exact).abs() < 1e-14);
        }
    }
}

//! Boundary-layer corrector `v_bl = ∂x(χ(d/cδ) θ(ρ^E))` and the corrected
//! test velocity `v^E_bl = v^E − v_bl`.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::euler::{node_d1, EulerSnapshot};
use crate::grid::GhostPolicy;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum BlError {
    #[error("layers overlap: c·δ = {width} must be below half the domain length {half}")]
    Overlap { width: f64, half: f64 },
    #[error("layer parameters must be positive (c = {c}, δ = {delta})")]
    NonPositive { c: f64, delta: f64 },
    #[error("rate exponent s = {s} outside (0, {s_max}) for d = {d}, α = {alpha}")]
    InadmissibleRate { s: f64, s_max: f64, d: u32, alpha: f64 },
}

/// Quintic smoothstep cutoff with plateau: `χ = 1` on `[0, 1/4]`, `χ = 0` on
/// `[1, ∞)`, `C²` in between.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Cutoff;

impl Cutoff {
    pub const PLATEAU: f64 = 0.25;

    #[inline]
    fn t(xi: f64) -> Option<f64> {
        if xi <= Self::PLATEAU || xi >= 1.0 {
            None
        } else {
            Some((xi - Self::PLATEAU) / (1.0 - Self::PLATEAU))
        }
    }

    /// `(χ, χ', χ'', χ''')` at `ξ ≥ 0`.
    pub fn eval(&self, xi: f64) -> [f64; 4] {
        match Self::t(xi) {
            None => {
                if xi <= Self::PLATEAU {
                    [1.0, 0.0, 0.0, 0.0]
                } else {
                    [0.0; 4]
                }
            }
            Some(t) => {
                let k = 1.0 / (1.0 - Self::PLATEAU);
                let s = t * t * t * (10.0 + t * (-15.0 + 6.0 * t));
                let s1 = 30.0 * t * t * (1.0 - t) * (1.0 - t);
                let s2 = 60.0 * t * (1.0 - t) * (1.0 - 2.0 * t);
                let s3 = 60.0 * (1.0 - 6.0 * t + 6.0 * t * t);
                [1.0 - s, -k * s1, -k * k * s2, -k * k * k * s3]
            }
        }
    }

    pub fn value(&self, xi: f64) -> f64 {
        self.eval(xi)[0]
    }
}

/// Supremum of admissible layer exponents `s` for dimension `d`.
pub fn s_max(d: u32, alpha: f64) -> f64 {
    let bound = match d {
        1 => (5.0 + alpha) / (3.0 * (3.0 + alpha)),
        2 => (3.0 + alpha) / (3.0 * (2.0 + alpha)),
        _ => {
            let q = d as f64 * (1.0 + alpha);
            (q + 4.0) / (3.0 * (q + 2.0))
        }
    };
    bound.min(0.5)
}

/// Layer parameters `(c, s)` with `δ = ε^s`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LayerParams {
    pub c: f64,
    pub s: f64,
}

impl LayerParams {
    /// `c = 1`, `s = 0.9 s_max`.
    pub fn default_for(d: u32, alpha: f64) -> Self {
        Self {
            c: 1.0,
            s: 0.9 * s_max(d, alpha),
        }
    }

    pub fn validate(&self, d: u32, alpha: f64) -> Result<(), BlError> {
        let sm = s_max(d, alpha);
        if !(self.s > 0.0 && self.s < sm) {
            return Err(BlError::InadmissibleRate {
                s: self.s,
                s_max: sm,
                d,
                alpha,
            });
        }
        if !(self.c > 0.0) {
            return Err(BlError::NonPositive {
                c: self.c,
                delta: f64::NAN,
            });
        }
        Ok(())
    }

    pub fn delta(&self, epsilon: f64) -> f64 {
        epsilon.powf(self.s)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundaryLayerField {
    pub delta: f64,
    pub c: f64,
    pub s: Option<f64>,
    pub x: Vec<f64>,
    pub v_bl: Vec<f64>,
    pub dx_v_bl: Vec<f64>,
    pub dxx_v_bl: Vec<f64>,
    pub dt_v_bl: Vec<f64>,
    /// `v^E − v_bl`.
    pub v_e_bl: Vec<f64>,
    /// `∂x v^E_bl`.
    pub dx_v_e_bl: Vec<f64>,
}

/// Builds the corrector from a reference snapshot on `[x_min, x_max]`.
///
/// With `v^E = ∂x θ(ρ^E)` already available, the product rule gives
/// `v_bl = χ v^E + θ χ' d'/(cδ)`, so `v^E_bl` vanishes identically where
/// `χ ≡ 1`, in particular on the walls.
pub fn build_vbl(
    snap: &EulerSnapshot,
    x_min: f64,
    x_max: f64,
    c: f64,
    delta: f64,
) -> Result<BoundaryLayerField, BlError> {
    if !(c > 0.0 && delta > 0.0) {
        return Err(BlError::NonPositive { c, delta });
    }
    let half = 0.5 * (x_max - x_min);
    let w = c * delta;
    if w >= half {
        return Err(BlError::Overlap { width: w, half });
    }
    let chi = Cutoff;
    let n = snap.len();
    let mut out = BoundaryLayerField {
        delta,
        c,
        s: None,
        x: snap.x.clone(),
        v_bl: vec![0.0; n],
        dx_v_bl: vec![0.0; n],
        dxx_v_bl: vec![0.0; n],
        dt_v_bl: vec![0.0; n],
        v_e_bl: vec![0.0; n],
        dx_v_e_bl: vec![0.0; n],
    };
    // θt = θ'(ρ) ρt with θ' = μ'/ρ
    let theta_t = |j: usize| snap.mu_p[j] / snap.rho[j] * snap.rho_t[j];
    for j in 0..n {
        let x = snap.x[j];
        let (d, slope) = if x - x_min <= x_max - x {
            (x - x_min, 1.0)
        } else {
            (x_max - x, -1.0)
        };
        let xi = d / w;
        if xi >= 1.0 {
            out.v_e_bl[j] = snap.v[j];
            out.dx_v_e_bl[j] = snap.v_x[j];
            continue;
        }
        let [c0, c1, c2, c3] = chi.eval(xi);
        let (th, v, vx, vxx) = (snap.theta[j], snap.v[j], snap.v_x[j], snap.v_xx[j]);
        let a = slope / w;
        out.v_bl[j] = c0 * v + th * c1 * a;
        out.dx_v_bl[j] = c2 * th / (w * w) + 2.0 * c1 * a * v + c0 * vx;
        out.dxx_v_bl[j] = c3 * a * th / (w * w) + 3.0 * c2 * v / (w * w) + 3.0 * c1 * a * vx + c0 * vxx;
        out.dt_v_bl[j] = c1 * a * theta_t(j) + c0 * snap.v_t[j];
        out.v_e_bl[j] = (1.0 - c0) * v - th * c1 * a;
        out.dx_v_e_bl[j] = vx - out.dx_v_bl[j];
    }
    Ok(out)
}

impl BoundaryLayerField {
    pub fn with_rate(mut self, s: f64) -> Self {
        self.s = Some(s);
        self
    }

    pub fn len(&self) -> usize {
        self.v_bl.len()
    }

    pub fn is_empty(&self) -> bool {
        self.v_bl.is_empty()
    }

    /// `max |v^E − v_bl|` over the two end points, which must be the walls.
    pub fn wall_mismatch(&self) -> f64 {
        let n = self.len();
        self.v_e_bl[0].abs().max(self.v_e_bl[n - 1].abs())
    }

    pub fn subsample(&self, offset: usize, stride: usize, count: usize) -> Self {
        let pick = |v: &Vec<f64>| (0..count).map(|i| v[offset + i * stride]).collect::<Vec<f64>>();
        Self {
            delta: self.delta,
            c: self.c,
            s: self.s,
            x: pick(&self.x),
            v_bl: pick(&self.v_bl),
            dx_v_bl: pick(&self.dx_v_bl),
            dxx_v_bl: pick(&self.dxx_v_bl),
            dt_v_bl: pick(&self.dt_v_bl),
            v_e_bl: pick(&self.v_e_bl),
            dx_v_e_bl: pick(&self.dx_v_e_bl),
        }
    }

    /// Same restriction to cell centres as `EulerSnapshot::on_cells`.
    pub fn on_cells(&self, n_cells: usize) -> Option<Self> {
        let m = self.len() - 1;
        if !m.is_multiple_of(n_cells) || !(m / n_cells).is_multiple_of(2) {
            return None;
        }
        let r = m / n_cells;
        Some(self.subsample(r / 2, r, n_cells))
    }
}

/// `v_bl` by differentiating `χ(d/cδ) θ(ρ^E)` with the fourth-order node
/// stencil; agrees with the product-rule form of `build_vbl` to stencil order.
pub fn vbl_by_differentiation(snap: &EulerSnapshot, x_min: f64, x_max: f64, c: f64, delta: f64) -> Vec<f64> {
    let h = snap.x[1] - snap.x[0];
    let w = c * delta;
    let prod: Vec<f64> = snap
        .x
        .iter()
        .zip(&snap.theta)
        .map(|(&x, &th)| Cutoff.value((x - x_min).min(x_max - x) / w) * th)
        .collect();
    node_d1(&prod, GhostPolicy::Even, h)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScalingRow {
    pub delta: f64,
    pub sup_vbl: f64,
    pub sup_grad_vbl: f64,
    pub sup_dt_vbl: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScalingReport {
    pub rows: Vec<ScalingRow>,
    pub slope_vbl: f64,
    pub slope_grad_vbl: f64,
    pub slope_dt_vbl: f64,
}

/// Sup norms of the corrector and its derivatives for each `δ`, with
/// least-squares log-log slopes.
pub fn scaling_report(
    snap: &EulerSnapshot,
    x_min: f64,
    x_max: f64,
    c: f64,
    deltas: &[f64],
) -> Result<ScalingReport, BlError> {
    let sup = |v: &[f64]| v.iter().fold(0.0f64, |a, b| a.max(b.abs()));
    let mut rows = Vec::with_capacity(deltas.len());
    for &delta in deltas {
        let bl = build_vbl(snap, x_min, x_max, c, delta)?;
        rows.push(ScalingRow {
            delta,
            sup_vbl: sup(&bl.v_bl),
            sup_grad_vbl: sup(&bl.dx_v_bl),
            sup_dt_vbl: sup(&bl.dt_v_bl),
        });
    }
    let lx: Vec<f64> = rows.iter().map(|r| r.delta.ln()).collect();
    let slope = |f: fn(&ScalingRow) -> f64| {
        let ly: Vec<f64> = rows.iter().map(|r| f(r).max(1e-300).ln()).collect();
        crate::harness::fit::least_squares(&lx, &ly).slope
    };
    Ok(ScalingReport {
        slope_vbl: slope(|r| r.sup_vbl),
        slope_grad_vbl: slope(|r| r.sup_grad_vbl),
        slope_dt_vbl: slope(|r| r.sup_dt_vbl),
        rows,
    })
}

impl ScalingReport {
    pub fn write_csv<W: std::io::Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "delta,sup_vbl,sup_grad_vbl,sup_dt_vbl")?;
        for r in &self.rows {
            writeln!(
                w,
                "{:.17e},{:.17e},{:.17e},{:.17e}",
                r.delta, r.sup_vbl, r.sup_grad_vbl, r.sup_dt_vbl
            )?;
        }
        Ok(())
    }
}

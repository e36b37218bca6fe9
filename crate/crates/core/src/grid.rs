//! Cell-centred 1D grids, ghost extension and centred difference operators.

use std::io::{self, Write};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::state::StateFunctions;

/// Number of ghost cells kept on each side by every extension.
pub const GHOSTS: usize = 2;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GridError {
    #[error("grid needs at least 8 cells, got {0}")]
    TooFewCells(usize),
    #[error("empty interval [{0}, {1}]")]
    EmptyInterval(f64, f64),
    #[error("field length {got} does not match grid size {expected}")]
    LengthMismatch { expected: usize, got: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Grid1D {
    x_min: f64,
    x_max: f64,
    n_cells: usize,
    dx: f64,
}

impl Grid1D {
    pub fn new(x_min: f64, x_max: f64, n_cells: usize) -> Result<Self, GridError> {
        if n_cells < 8 {
            return Err(GridError::TooFewCells(n_cells));
        }
        if !(x_max > x_min) || !x_min.is_finite() || !x_max.is_finite() {
            return Err(GridError::EmptyInterval(x_min, x_max));
        }
        Ok(Self {
            x_min,
            x_max,
            n_cells,
            dx: (x_max - x_min) / n_cells as f64,
        })
    }

    /// `[0, 1]` with `n` cells.
    pub fn unit(n_cells: usize) -> Result<Self, GridError> {
        Self::new(0.0, 1.0, n_cells)
    }

    pub fn x_min(&self) -> f64 {
        self.x_min
    }

    pub fn x_max(&self) -> f64 {
        self.x_max
    }

    pub fn n_cells(&self) -> usize {
        self.n_cells
    }

    pub fn dx(&self) -> f64 {
        self.dx
    }

    pub fn length(&self) -> f64 {
        self.x_max - self.x_min
    }

    /// Centre of cell `i`.
    #[inline]
    pub fn x(&self, i: usize) -> f64 {
        self.x_min + (i as f64 + 0.5) * self.dx
    }

    pub fn centers(&self) -> Vec<f64> {
        (0..self.n_cells).map(|i| self.x(i)).collect()
    }

    /// Distance to the nearer wall.
    #[inline]
    pub fn d_omega(&self, x: f64) -> f64 {
        (x - self.x_min).min(self.x_max - x)
    }

    /// Derivative of `d_omega`: `+1` in the left half, `-1` in the right half.
    #[inline]
    pub fn d_omega_slope(&self, x: f64) -> f64 {
        if x - self.x_min <= self.x_max - x {
            1.0
        } else {
            -1.0
        }
    }

    pub fn sample<F: Fn(f64) -> f64>(&self, f: F, policy: GhostPolicy) -> Field {
        Field::new((0..self.n_cells).map(|i| f(self.x(i))).collect(), policy)
    }

    fn check(&self, f: &Field) -> Result<(), GridError> {
        if f.len() != self.n_cells {
            return Err(GridError::LengthMismatch {
                expected: self.n_cells,
                got: f.len(),
            });
        }
        Ok(())
    }
}

/// Extension rule across the walls.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum GhostPolicy {
    /// Mirror image; zero normal derivative.
    Even,
    /// Negated mirror image; zero trace.
    Odd,
    /// Linear extrapolation from the two outermost cells.
    Extrapolated,
}

impl GhostPolicy {
    /// Policy of the derivative of a field with this policy.
    pub fn derivative(self) -> Self {
        match self {
            GhostPolicy::Even => GhostPolicy::Odd,
            GhostPolicy::Odd => GhostPolicy::Even,
            GhostPolicy::Extrapolated => GhostPolicy::Extrapolated,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Field {
    pub values: Vec<f64>,
    pub policy: GhostPolicy,
}

impl Field {
    pub fn new(values: Vec<f64>, policy: GhostPolicy) -> Self {
        Self { values, policy }
    }

    pub fn constant(n: usize, value: f64, policy: GhostPolicy) -> Self {
        Self::new(vec![value; n], policy)
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn map<F: Fn(f64) -> f64>(&self, f: F, policy: GhostPolicy) -> Field {
        Field::new(self.values.iter().map(|&v| f(v)).collect(), policy)
    }

    /// Values with `GHOSTS` ghost cells on each side.
    pub fn extended(&self) -> Vec<f64> {
        let mut out = vec![0.0; self.len() + 2 * GHOSTS];
        out[GHOSTS..GHOSTS + self.len()].copy_from_slice(&self.values);
        fill_ghosts(&mut out, GHOSTS, self.policy);
        out
    }

    /// Writes `x,value` rows.
    pub fn write_csv<W: Write>(&self, grid: &Grid1D, mut w: W) -> io::Result<()> {
        writeln!(w, "x,value")?;
        for (i, v) in self.values.iter().enumerate() {
            writeln!(w, "{:.17e},{:.17e}", grid.x(i), v)?;
        }
        Ok(())
    }
}

/// Fills `ng` ghost entries on each side of `buf` in place according to `policy`.
pub fn fill_ghosts(buf: &mut [f64], ng: usize, policy: GhostPolicy) {
    let n = buf.len() - 2 * ng;
    for g in 0..ng {
        let (li, ri) = (ng - 1 - g, ng + n + g);
        let (lsrc, rsrc) = (ng + g, ng + n - 1 - g);
        match policy {
            GhostPolicy::Even => {
                buf[li] = buf[lsrc];
                buf[ri] = buf[rsrc];
            }
            GhostPolicy::Odd => {
                buf[li] = -buf[lsrc];
                buf[ri] = -buf[rsrc];
            }
            GhostPolicy::Extrapolated => {
                let k = (g + 1) as f64;
                buf[li] = buf[ng] - k * (buf[ng + 1] - buf[ng]);
                buf[ri] = buf[ng + n - 1] + k * (buf[ng + n - 1] - buf[ng + n - 2]);
            }
        }
    }
}

/// Centred gradient `(f_{i+1} - f_{i-1}) / 2dx`.
pub fn gradient(grid: &Grid1D, f: &Field) -> Result<Field, GridError> {
    grid.check(f)?;
    let e = f.extended();
    let h = 0.5 / grid.dx();
    let vals = (0..f.len())
        .map(|i| (e[i + GHOSTS + 1] - e[i + GHOSTS - 1]) * h)
        .collect();
    Ok(Field::new(vals, f.policy.derivative()))
}

/// Same stencil as `gradient`; in one dimension the two coincide.
pub fn divergence(grid: &Grid1D, g: &Field) -> Result<Field, GridError> {
    gradient(grid, g)
}

/// `divergence ∘ gradient`, the wide five-point Laplacian.
pub fn laplacian(grid: &Grid1D, f: &Field) -> Result<Field, GridError> {
    divergence(grid, &gradient(grid, f)?)
}

/// Compact three-point Laplacian.
pub fn laplacian_compact(grid: &Grid1D, f: &Field) -> Result<Field, GridError> {
    grid.check(f)?;
    let e = f.extended();
    let h2 = 1.0 / (grid.dx() * grid.dx());
    let vals = (0..f.len())
        .map(|i| {
            let c = i + GHOSTS;
            (e[c + 1] - 2.0 * e[c] + e[c - 1]) * h2
        })
        .collect();
    Ok(Field::new(vals, f.policy))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Norms {
    pub l1: f64,
    pub l2: f64,
    pub lgamma: f64,
    pub linf: f64,
}

/// Midpoint-rule norms of a cell array.
pub fn norms_of(values: &[f64], dx: f64, gamma: f64) -> Norms {
    let (mut l1, mut l2, mut lg, mut linf) = (0.0, 0.0, 0.0, 0.0f64);
    for &v in values {
        let a = v.abs();
        l1 += a;
        l2 += a * a;
        lg += a.powf(gamma);
        linf = linf.max(a);
    }
    Norms {
        l1: l1 * dx,
        l2: (l2 * dx).sqrt(),
        lgamma: (lg * dx).powf(1.0 / gamma),
        linf,
    }
}

pub fn norms(grid: &Grid1D, f: &Field, sf: &StateFunctions) -> Result<Norms, GridError> {
    grid.check(f)?;
    Ok(norms_of(&f.values, grid.dx(), sf.gamma()))
}

/// Norms of the difference `f - g`.
pub fn norms_diff(grid: &Grid1D, f: &Field, g: &Field, sf: &StateFunctions) -> Result<Norms, GridError> {
    grid.check(f)?;
    grid.check(g)?;
    let d: Vec<f64> = f.values.iter().zip(&g.values).map(|(a, b)| a - b).collect();
    Ok(norms_of(&d, grid.dx(), sf.gamma()))
}

/// Midpoint integral of a cell array.
#[inline]
pub fn integrate(values: &[f64], dx: f64) -> f64 {
    values.iter().sum::<f64>() * dx
}

/// Density and momentum on a grid; `rho` is even across walls, `j` odd.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FlowState {
    pub grid: Grid1D,
    pub rho: Field,
    pub j: Field,
}

impl FlowState {
    pub fn new(grid: Grid1D, rho: Vec<f64>, j: Vec<f64>) -> Result<Self, GridError> {
        let s = Self {
            grid,
            rho: Field::new(rho, GhostPolicy::Even),
            j: Field::new(j, GhostPolicy::Odd),
        };
        grid.check(&s.rho)?;
        grid.check(&s.j)?;
        Ok(s)
    }

    pub fn from_fns<R: Fn(f64) -> f64, J: Fn(f64) -> f64>(grid: Grid1D, rho: R, j: J) -> Self {
        Self {
            grid,
            rho: grid.sample(rho, GhostPolicy::Even),
            j: grid.sample(j, GhostPolicy::Odd),
        }
    }

    pub fn mass(&self) -> f64 {
        integrate(&self.rho.values, self.grid.dx())
    }

    pub fn sqrt_rho(&self) -> Field {
        self.rho.map(f64::sqrt, GhostPolicy::Even)
    }

    pub fn velocity(&self) -> Field {
        let v = self.rho.values.iter().zip(&self.j.values).map(|(r, j)| j / r).collect();
        Field::new(v, GhostPolicy::Odd)
    }

    /// `Λ = J/√ρ`.
    pub fn lambda(&self) -> Field {
        let v = self
            .rho
            .values
            .iter()
            .zip(&self.j.values)
            .map(|(r, j)| j / r.sqrt())
            .collect();
        Field::new(v, GhostPolicy::Odd)
    }

    /// Centred difference of `β(ρ)`.
    pub fn grad_beta(&self, sf: &StateFunctions) -> Field {
        let beta = self.rho.map(|r| sf.beta(r), GhostPolicy::Even);
        gradient(&self.grid, &beta).expect("lengths checked at construction")
    }

    /// `m = √ρ ∇β(ρ)`.
    pub fn m(&self, sf: &StateFunctions) -> Field {
        let gb = self.grad_beta(sf);
        let v = self
            .rho
            .values
            .iter()
            .zip(&gb.values)
            .map(|(r, g)| r.sqrt() * g)
            .collect();
        Field::new(v, GhostPolicy::Odd)
    }

    /// `v = m/ρ`.
    pub fn v(&self, sf: &StateFunctions) -> Field {
        let m = self.m(sf);
        let v = self.rho.values.iter().zip(&m.values).map(|(r, m)| m / r).collect();
        Field::new(v, GhostPolicy::Odd)
    }

    /// Writes `x,rho,J` rows.
    pub fn write_csv<W: Write>(&self, mut w: W) -> io::Result<()> {
        writeln!(w, "x,rho,J")?;
        for i in 0..self.grid.n_cells() {
            writeln!(
                w,
                "{:.17e},{:.17e},{:.17e}",
                self.grid.x(i),
                self.rho.values[i],
                self.j.values[i]
            )?;
        }
        Ok(())
    }
}

//! Gagliardo–Nirenberg ratio `‖ρ^{(2+α)/2}‖₂ / (‖ρ‖₁^a ‖∇β(ρ)‖₂^b)` on
//! synthetic static fields in `d ∈ {1, 2, 3}`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::state::pw;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GnError {
    #[error("dimension {0} not in 1..=3")]
    Dimension(usize),
    #[error("alpha = {0} must exceed -2")]
    Alpha(f64),
    #[error("field vanishes on the grid; ratio undefined")]
    ZeroField,
}

/// Exponents `(a, b)` for dimension `d`.
pub fn gn_exponents(d: usize, alpha: f64) -> (f64, f64) {
    match d {
        1 => ((2.0 + alpha) / (3.0 + alpha), (1.0 + alpha) / (3.0 + alpha)),
        2 => (0.5, (1.0 + alpha) / (2.0 + alpha)),
        _ => {
            let q = d as f64 * (1.0 + alpha) + 2.0;
            ((2.0 + alpha) / q, d as f64 * (1.0 + alpha) / q)
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Bump {
    pub center: [f64; 3],
    pub width: f64,
    pub amp: f64,
}

/// Smooth nonnegative test density with exact gradient.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum GnField {
    /// Sum of isotropic Gaussians.
    Gaussians(Vec<Bump>),
    /// Gaussian envelope times `1 + ½ Π cos(k_i x_i + φ_i)`.
    Trig { bump: Bump, k: [f64; 3], phase: [f64; 3] },
    /// `amp Π (1 − ((x_i − c_i)/w)²)₊⁴`.
    Compact(Bump),
    /// `λ ρ(κ x)`.
    Scaled {
        inner: Box<GnField>,
        lambda: f64,
        kappa: f64,
    },
}

impl GnField {
    /// Value and gradient at `x` (only the first `d` components are used).
    pub fn eval(&self, x: &[f64; 3], d: usize) -> (f64, [f64; 3]) {
        match self {
            GnField::Gaussians(bs) => {
                let mut v = 0.0;
                let mut g = [0.0; 3];
                for b in bs {
                    let (bv, bg) = gauss(b, x, d);
                    v += bv;
                    for k in 0..d {
                        g[k] += bg[k];
                    }
                }
                (v, g)
            }
            GnField::Trig { bump, k, phase } => {
                let (e, eg) = gauss(bump, x, d);
                let mut prod = 1.0;
                for i in 0..d {
                    prod *= (k[i] * x[i] + phase[i]).cos();
                }
                let w = 1.0 + 0.5 * prod;
                let mut g = [0.0; 3];
                for i in 0..d {
                    let mut p = -0.5 * k[i] * (k[i] * x[i] + phase[i]).sin();
                    for j in 0..d {
                        if j != i {
                            p *= (k[j] * x[j] + phase[j]).cos();
                        }
                    }
                    g[i] = eg[i] * w + e * p;
                }
                (e * w, g)
            }
            GnField::Compact(b) => {
                let mut f = [0.0; 3];
                let mut df = [0.0; 3];
                for i in 0..d {
                    let s = (x[i] - b.center[i]) / b.width;
                    if s.abs() >= 1.0 {
                        return (0.0, [0.0; 3]);
                    }
                    let q = 1.0 - s * s;
                    f[i] = q.powi(4);
                    df[i] = -8.0 * s * q.powi(3) / b.width;
                }
                let v: f64 = b.amp * f[..d].iter().product::<f64>();
                let mut g = [0.0; 3];
                for i in 0..d {
                    let mut p = b.amp * df[i];
                    for j in 0..d {
                        if j != i {
                            p *= f[j];
                        }
                    }
                    g[i] = p;
                }
                (v, g)
            }
            GnField::Scaled { inner, lambda, kappa } => {
                let y = [kappa * x[0], kappa * x[1], kappa * x[2]];
                let (v, g) = inner.eval(&y, d);
                (
                    lambda * v,
                    [lambda * kappa * g[0], lambda * kappa * g[1], lambda * kappa * g[2]],
                )
            }
        }
    }

    pub fn scaled(self, lambda: f64, kappa: f64) -> Self {
        GnField::Scaled {
            inner: Box::new(self),
            lambda,
            kappa,
        }
    }

    /// Random field; all mass well inside `[-5, 5]^d`.
    pub fn random<R: Rng>(rng: &mut R, d: usize) -> Self {
        let bump = |rng: &mut R, wlo: f64, whi: f64| {
            let mut c = [0.0; 3];
            for ci in c.iter_mut().take(d) {
                *ci = rng.random_range(-1.0..1.0);
            }
            Bump {
                center: c,
                width: rng.random_range(wlo..whi),
                amp: rng.random_range(0.2..2.0),
            }
        };
        match rng.random_range(0..3) {
            0 => {
                let k = rng.random_range(1..=4);
                GnField::Gaussians((0..k).map(|_| bump(rng, 0.5, 1.0)).collect())
            }
            1 => {
                let b = bump(rng, 0.6, 1.0);
                let mut k = [0.0; 3];
                let mut phase = [0.0; 3];
                for i in 0..d {
                    k[i] = rng.random_range(0.0..2.0);
                    phase[i] = rng.random_range(0.0..std::f64::consts::TAU);
                }
                GnField::Trig { bump: b, k, phase }
            }
            _ => GnField::Compact(bump(rng, 1.5, 2.5)),
        }
    }
}

fn gauss(b: &Bump, x: &[f64; 3], d: usize) -> (f64, [f64; 3]) {
    let mut r2 = 0.0;
    for i in 0..d {
        r2 += (x[i] - b.center[i]).powi(2);
    }
    let s2 = b.width * b.width;
    let v = b.amp * (-0.5 * r2 / s2).exp();
    let mut g = [0.0; 3];
    for i in 0..d {
        g[i] = -v * (x[i] - b.center[i]) / s2;
    }
    (v, g)
}

/// Half-width of the integration box.
pub const BOX: f64 = 5.0;

/// Midpoint-rule ratio on `n^d` cells of `[-BOX, BOX]^d`, with `β' = ρ^{α/2}`.
pub fn gn_ratio(field: &GnField, d: usize, alpha: f64, n: usize) -> Result<f64, GnError> {
    if !(1..=3).contains(&d) {
        return Err(GnError::Dimension(d));
    }
    if !(alpha > -2.0) {
        return Err(GnError::Alpha(alpha));
    }
    let (a, b) = gn_exponents(d, alpha);
    let h = 2.0 * BOX / n as f64;
    let cell = pw(h, d as f64);
    let nn = [n, if d > 1 { n } else { 1 }, if d > 2 { n } else { 1 }];
    let (mut s_top, mut s_one, mut s_grad) = (0.0, 0.0, 0.0);
    for i2 in 0..nn[2] {
        for i1 in 0..nn[1] {
            for i0 in 0..nn[0] {
                let x = [
                    -BOX + (i0 as f64 + 0.5) * h,
                    if d > 1 { -BOX + (i1 as f64 + 0.5) * h } else { 0.0 },
                    if d > 2 { -BOX + (i2 as f64 + 0.5) * h } else { 0.0 },
                ];
                let (r, g) = field.eval(&x, d);
                if r <= 0.0 {
                    continue;
                }
                s_top += pw(r, 2.0 + alpha);
                s_one += r;
                let g2: f64 = g[..d].iter().map(|v| v * v).sum();
                s_grad += pw(r, alpha) * g2;
            }
        }
    }
    if s_one == 0.0 {
        return Err(GnError::ZeroField);
    }
    let top = (s_top * cell).sqrt();
    let l1 = s_one * cell;
    let grad = (s_grad * cell).sqrt();
    Ok(top / (pw(l1, a) * pw(grad, b)))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GnSummary {
    pub d: usize,
    pub alpha: f64,
    pub draws: usize,
    pub n: usize,
    pub max_ratio: f64,
    pub max_ratio_refined: f64,
    /// `|refined − coarse| / coarse`.
    pub change: f64,
}

/// Default coarse resolution per dimension.
pub fn default_cells(d: usize) -> usize {
    match d {
        1 => 256,
        2 => 64,
        _ => 24,
    }
}

/// Max ratio over `draws` random fields at `n` and `2n` cells per axis. Draw
/// `k` uses its own stream seeded from `(seed, k)`, so the result does not
/// depend on scheduling.
pub fn gn_sweep(d: usize, alpha: f64, draws: usize, seed: u64, n: usize, serial: bool) -> Result<GnSummary, GnError> {
    let one = |k: usize| -> Result<(f64, f64), GnError> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(k as u64);
        let f = GnField::random(&mut rng, d);
        Ok((gn_ratio(&f, d, alpha, n)?, gn_ratio(&f, d, alpha, 2 * n)?))
    };
    let pairs: Result<Vec<(f64, f64)>, GnError> = if serial {
        (0..draws).map(one).collect()
    } else {
        (0..draws).into_par_iter().map(one).collect()
    };
    let pairs = pairs?;
    let max_ratio = pairs.iter().map(|p| p.0).fold(0.0, f64::max);
    let max_ratio_refined = pairs.iter().map(|p| p.1).fold(0.0, f64::max);
    Ok(GnSummary {
        d,
        alpha,
        draws,
        n,
        max_ratio,
        max_ratio_refined,
        change: (max_ratio_refined - max_ratio).abs() / max_ratio.max(f64::MIN_POSITIVE),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn printed_exponents() {
        assert_eq!(gn_exponents(2, 0.0), (0.5, 0.5));
        assert_eq!(gn_exponents(1, -1.0), (0.5, 0.0));
        let (a, b) = gn_exponents(3, 1.0);
        assert!((a - 3.0 / 8.0).abs() < 1e-15 && (b - 6.0 / 8.0).abs() < 1e-15);
    }

    #[test]
    fn exponents_balance_both_scalings() {
        // under ρ → λρ(κx): ‖ρ^{(2+α)/2}‖₂ ~ λ^{(2+α)/2} κ^{-d/2},
        // ‖ρ‖₁ ~ λ κ^{-d}, ‖∇β‖₂ ~ λ^{(2+α)/2} κ^{1-d/2}
        for d in 1..=3usize {
            for &al in &[-0.5, 0.0, 1.0, 2.5] {
                let (a, b) = gn_exponents(d, al);
                let dd = d as f64;
                assert!((a + b * (2.0 + al) / 2.0 - (2.0 + al) / 2.0).abs() < 1e-14);
                assert!((-dd * a + b * (1.0 - dd / 2.0) + dd / 2.0).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn ratio_is_scale_invariant() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for d in 1..=2 {
            let f = GnField::Gaussians(vec![Bump {
                center: [0.2, -0.1, 0.0],
                width: 0.6,
                amp: 1.3,
            }]);
            let _ = GnField::random(&mut rng, d);
            let base = gn_ratio(&f, d, 0.5, 400 / d).unwrap();
            let s = gn_ratio(&f.clone().scaled(3.0, 1.25), d, 0.5, 400 / d).unwrap();
            assert!((base - s).abs() < 1e-8 * base, "{d} {base} {s}");
        }
    }

    #[test]
    fn degenerate_case_is_one() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..20 {
            let f = GnField::random(&mut rng, 1);
            assert_eq!(gn_ratio(&f, 1, -1.0, 300).unwrap(), 1.0);
        }
    }

    #[test]
    fn zero_field_is_an_error() {
        let f = GnField::Compact(Bump {
            center: [0.0; 3],
            width: 1.0,
            amp: 0.0,
        });
        assert_eq!(gn_ratio(&f, 1, 0.0, 64), Err(GnError::ZeroField));
    }

    #[test]
    fn gradients_match_differences() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..30 {
            let f = GnField::random(&mut rng, 3);
            let x = [0.3, -0.2, 0.4];
            let (_, g) = f.eval(&x, 3);
            for k in 0..3 {
                let h = 1e-6;
                let mut xp = x;
                let mut xm = x;
                xp[k] += h;
                xm[k] -= h;
                let fd = (f.eval(&xp, 3).0 - f.eval(&xm, 3).0) / (2.0 * h);
                assert!((fd - g[k]).abs() < 1e-6 * (1.0 + g[k].abs()));
            }
        }
    }
}

//! Randomised identity suite over the state maps and entropy functionals.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::entropy::{entropy_e, entropy_e_expanded, entropy_eh, entropy_eh_expanded, entropy_gap, Fields};
use crate::state::StateFunctions;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IdentityResult {
    pub name: String,
    pub draw: usize,
    pub residual: f64,
    pub tol: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IdentityLedger {
    pub seed: u64,
    pub count: usize,
    pub checks: usize,
    pub failures: Vec<IdentityResult>,
    /// Worst relative residual per identity name.
    pub worst: Vec<(String, f64)>,
    pub warning: Option<String>,
}

impl IdentityLedger {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Identity suite; `beta_scale ≠ 1` multiplies `∂x β` to emulate a faulty
/// prefactor.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IdentitySuite {
    pub seed: u64,
    pub count: usize,
    pub beta_scale: f64,
}

pub const FIELD_TOL: f64 = 1e-8;
pub const SCALAR_TOL: f64 = 1e-10;
const CELLS: usize = 128;

/// Random trigonometric field `c + Σ a_k cos(kπx + φ_k)` with derivative.
struct Trig {
    c: f64,
    a: [f64; 3],
    phase: [f64; 3],
}

impl Trig {
    fn random(rng: &mut ChaCha8Rng, c: f64, amp: f64, neumann: bool) -> Self {
        let mut a = [0.0; 3];
        let mut phase = [0.0; 3];
        for k in 0..3 {
            a[k] = rng.random_range(-amp..amp) / 3.0;
            phase[k] = if neumann {
                0.0
            } else {
                rng.random_range(0.0..std::f64::consts::TAU)
            };
        }
        Self { c, a, phase }
    }

    fn eval(&self, x: f64) -> (f64, f64) {
        let mut v = self.c;
        let mut d = 0.0;
        for k in 0..3 {
            let w = (k + 1) as f64 * PI;
            v += self.a[k] * (w * x + self.phase[k]).cos();
            d -= self.a[k] * w * (w * x + self.phase[k]).sin();
        }
        (v, d)
    }
}

fn rel(a: f64, b: f64, scale: f64) -> f64 {
    let s = scale.abs().max(f64::MIN_POSITIVE);
    (a - b).abs() / s
}

impl IdentitySuite {
    pub fn new(seed: u64, count: usize) -> Self {
        Self {
            seed,
            count,
            beta_scale: 1.0,
        }
    }

    fn draw(&self, k: usize, out: &mut Vec<IdentityResult>) {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(k as u64);
        let sf = StateFunctions::new(
            rng.random_range(1.2..3.0),
            rng.random_range(-1.0..1.0),
            rng.random_range(0.1..1.0),
            rng.random_range(0.01..1.0),
        )
        .expect("ranges are admissible");
        let rho = Trig::random(&mut rng, 1.0, 0.6, true);
        let jf = Trig::random(&mut rng, 0.0, 0.5, false);
        let rf = Trig::random(&mut rng, 1.0, 0.6, false);
        let uf = Trig::random(&mut rng, 0.0, 0.8, false);
        let vf = Trig::random(&mut rng, 0.0, 0.8, false);
        let dx = 1.0 / CELLS as f64;
        let xs: Vec<f64> = (0..CELLS).map(|i| (i as f64 + 0.5) * dx).collect();
        let rv: Vec<(f64, f64)> = xs.iter().map(|&x| rho.eval(x)).collect();
        let mut fl = Fields::from_analytic(
            &sf,
            dx,
            rv.iter().map(|p| p.0).collect(),
            rv.iter().map(|p| p.1).collect(),
            xs.iter().map(|&x| jf.eval(x).0).collect(),
        );
        for b in &mut fl.beta_x {
            *b *= self.beta_scale;
        }
        let r: Vec<f64> = xs.iter().map(|&x| rf.eval(x).0).collect();
        let u: Vec<f64> = xs.iter().map(|&x| uf.eval(x).0).collect();
        let v: Vec<f64> = xs.iter().map(|&x| vf.eval(x).0).collect();

        let mut push = |name: &str, residual: f64, tol: f64| {
            out.push(IdentityResult {
                name: name.to_string(),
                draw: k,
                residual,
                tol,
                pass: residual <= tol,
            })
        };
        let e = entropy_e(&sf, &fl, &r, &u);
        let e_x = entropy_e_expanded(&sf, &fl, &r, &u);
        push("relative entropy expanded form", rel(e, e_x, e), FIELD_TOL);
        let eh = entropy_eh(&sf, &fl, &r, &u, &v);
        let eh_x = entropy_eh_expanded(&sf, &fl, &r, &u, &v);
        push("high-order entropy expanded form", rel(eh, eh_x, eh), FIELD_TOL);
        let gap = entropy_gap(&sf, &fl, &v);
        push(
            "high-order minus first-order gap",
            rel(eh - e, gap, eh.max(e)),
            FIELD_TOL,
        );
        push(
            "nonnegative entropies",
            if e >= 0.0 && eh >= 0.0 { 0.0 } else { 1.0 },
            0.0,
        );

        let mut worst = [0.0f64; 9];
        for i in 0..CELLS {
            let (p, q) = (fl.rho[i], r[i]);
            let lhs = sf.p(p) - sf.p(q) - sf.p_prime(q) * (p - q);
            let rhs = (sf.gamma() - 1.0) * sf.f_rel(p, q);
            let scale = sf.p(p).abs() + sf.p(q).abs() + (sf.p_prime(q) * (p - q)).abs();
            worst[0] = worst[0].max(rel(lhs, rhs, scale));
            worst[1] = worst[1].max(rel(sf.p(p), p * sf.f_prime(p) - sf.f(p), sf.p(p)));
            worst[2] = worst[2].max(rel(sf.f_second(p), sf.p_prime(p) / p, sf.f_second(p)));
            worst[3] = worst[3].max(rel(sf.mu_prime(p).powi(2), p * sf.k(p), p * sf.k(p)));
            worst[4] = worst[4].max(rel(sf.theta_prime(p), sf.mu_prime(p) / p, sf.theta_prime(p)));
            worst[5] = worst[5].max(rel(sf.beta_prime(p).powi(2), sf.k(p), sf.k(p)));
            worst[6] = worst[6].max(rel(sf.big_k_prime(p), p * sf.k(p), p * sf.k(p)));
            let k2 = sf.k(p) + p * sf.k_prime(p);
            worst[7] = worst[7].max(rel(sf.big_k_second(p), k2, sf.k(p)));
            worst[8] = worst[8].max(if sf.f_rel(p, q) >= 0.0 { 0.0 } else { 1.0 });
        }
        let names = [
            "pressure relative-energy identity",
            "p = rho f' - f",
            "f'' = p'/rho",
            "mu'^2 = rho k",
            "theta' = mu'/rho",
            "beta'^2 = k",
            "K' = rho k",
            "K'' = k + rho k'",
            "nonnegative f(rho|r)",
        ];
        for (n, w) in names.iter().zip(worst) {
            let tol = if n.starts_with("nonnegative") { 0.0 } else { SCALAR_TOL };
            push(n, w, tol);
        }
    }

    pub fn run(&self) -> IdentityLedger {
        let mut all = Vec::new();
        for k in 0..self.count {
            self.draw(k, &mut all);
        }
        let mut worst: Vec<(String, f64)> = Vec::new();
        for r in &all {
            match worst.iter_mut().find(|w| w.0 == r.name) {
                Some(w) => w.1 = w.1.max(r.residual),
                None => worst.push((r.name.clone(), r.residual)),
            }
        }
        let warning = (self.count == 0).then(|| "count = 0: no draws, vacuous pass".to_string());
        if let Some(w) = &warning {
            log::warn!("{w}");
        }
        IdentityLedger {
            seed: self.seed,
            count: self.count,
            checks: all.len(),
            failures: all.into_iter().filter(|r| !r.pass).collect(),
            worst,
            warning,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn suite_passes_and_catches_tampering() {
        let ok = IdentitySuite::new(0, 20).run();
        assert!(ok.passed(), "{:?}", ok.failures);
        let bad = IdentitySuite {
            beta_scale: 1.01,
            ..IdentitySuite::new(0, 20)
        }
        .run();
        assert!(bad
            .failures
            .iter()
            .any(|f| f.name == "high-order minus first-order gap"));
    }

    #[test]
    fn zero_count_is_vacuous() {
        let l = IdentitySuite::new(1, 0).run();
        assert!(l.passed() && l.warning.is_some() && l.checks == 0);
    }
}

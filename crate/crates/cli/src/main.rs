use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use eklab::entropy::gn::{default_cells, gn_sweep};
use eklab::harness::{output, run_experiment, run_sweep, Config, HarnessError, IdentitySuite};
use eklab::nls::oracle_compare;

#[derive(Parser)]
#[command(name = "eklab", version, about = "Euler-Korteweg zero-capillarity experiments")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args)]
struct Common {
    /// Output directory.
    #[arg(long, default_value = "out")]
    out: PathBuf,
    /// Run everything on one thread.
    #[arg(long)]
    serial: bool,
    /// Overrides `run.seed`.
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Subcommand)]
enum Cmd {
    /// One EK run against its Euler reference.
    Simulate {
        #[arg(long)]
        config: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// ε sweep with fitted orders.
    Sweep {
        #[arg(long)]
        config: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// Randomised identity suite.
    CheckIdentities {
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        count: Option<usize>,
        /// Multiplies the β derivative (mutation testing).
        #[arg(long, hide = true, default_value_t = 1.0)]
        tamper_beta: f64,
        #[command(flatten)]
        common: Common,
    },
    /// Gagliardo-Nirenberg ratio tables.
    GnCheck {
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long, value_delimiter = ',')]
        dims: Option<Vec<usize>>,
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        alphas: Option<Vec<f64>>,
        #[arg(long)]
        draws: Option<usize>,
        #[command(flatten)]
        common: Common,
    },
    /// EK against the NLS oracle.
    NlsCompare {
        #[arg(long)]
        config: Option<PathBuf>,
        #[command(flatten)]
        common: Common,
    },
}

fn load(path: &Path) -> Result<Config, HarnessError> {
    let text = std::fs::read_to_string(path).map_err(|e| {
        HarnessError::Config(eklab::harness::ConfigError::BadValue {
            key: "--config".into(),
            reason: format!("{}: {e}", path.display()),
        })
    })?;
    Ok(Config::parse(&text)?)
}

fn load_or_default(path: Option<&PathBuf>) -> Result<Config, HarnessError> {
    match path {
        Some(p) => load(p),
        None => Ok(Config::default()),
    }
}

fn apply(cfg: &mut Config, common: &Common) {
    if let Some(s) = common.seed {
        cfg.run.seed = s;
    }
}

fn report(files: &[PathBuf]) {
    for f in files {
        println!("wrote {}", f.display());
    }
}

fn run(cmd: Cmd) -> Result<(), HarnessError> {
    match cmd {
        Cmd::Simulate { config, common } => {
            let mut cfg = load(&config)?;
            apply(&mut cfg, &common);
            let eps = cfg.epsilon()?;
            let out = run_experiment(&cfg, eps)?;
            report(&output::write_run(&common.out, &cfg, &out)?);
            let s = &out.summary;
            let g = &s.gronwall;
            println!(
                "epsilon = {} n = {} C_fit = {:.3e} margin = {:.3e} margin_h = {:.3e} tol = {:.3e}",
                s.epsilon, s.n_cells, g.c_fit, g.margin, g.margin_h, g.tol
            );
            println!(
                "dist: L1 {:.3e} Lgamma {:.3e} Lambda {:.3e} grad beta {:.3e} J {:.3e}",
                s.dist.l1, s.dist.lgamma, s.dist.lambda, s.dist.gradbeta, s.dist.momentum
            );
            if !g.holds() {
                return Err(HarnessError::Numerical(
                    "entropy inequality violated beyond tolerance".into(),
                ));
            }
        }
        Cmd::Sweep { config, common } => {
            let mut cfg = load(&config)?;
            apply(&mut cfg, &common);
            let rep = run_sweep(&cfg, common.serial)?;
            report(&output::write_sweep(&common.out, &rep)?);
            for r in &rep.rows {
                println!(
                    "epsilon = {:<8} n = {:<5} Lgamma {:.3e} grad beta {:.3e} C_fit {:.3e} gronwall {}",
                    r.epsilon, r.n_cells, r.dist.lgamma, r.dist.gradbeta, r.c_fit, r.gronwall_ok
                );
            }
            if let Some(o) = &rep.orders {
                println!(
                    "orders: L1 {:.2} Lgamma {:.2} Lambda {:.2} grad beta {:.2} J {:.2}",
                    o.l1.slope, o.lgamma.slope, o.lambda.slope, o.gradbeta.slope, o.momentum.slope
                );
            }
            for f in &rep.failures {
                eprintln!("aborted: {f}");
            }
            if !rep.passed() {
                return Err(HarnessError::Numerical(format!(
                    "sweep failed (complete {}, gronwall {}, monotone {:?})",
                    rep.complete,
                    rep.gronwall_ok(),
                    rep.monotone
                )));
            }
        }
        Cmd::CheckIdentities {
            config,
            count,
            tamper_beta,
            common,
        } => {
            let mut cfg = load_or_default(config.as_ref())?;
            apply(&mut cfg, &common);
            let suite = IdentitySuite {
                seed: cfg.run.seed,
                count: count.unwrap_or(cfg.identities_count),
                beta_scale: tamper_beta,
            };
            let ledger = suite.run();
            report(&output::write_identities(&common.out, &ledger)?);
            if let Some(w) = &ledger.warning {
                eprintln!("warning: {w}");
            }
            for f in &ledger.failures {
                eprintln!(
                    "FAIL {} (seed {}, draw {}): residual {:.3e} > {:.1e}",
                    f.name, ledger.seed, f.draw, f.residual, f.tol
                );
            }
            println!("{} checks, {} failures", ledger.checks, ledger.failures.len());
            if !ledger.passed() {
                return Err(HarnessError::Numerical("identity suite failed".into()));
            }
        }
        Cmd::GnCheck {
            config,
            dims,
            alphas,
            draws,
            common,
        } => {
            let mut cfg = load_or_default(config.as_ref())?;
            apply(&mut cfg, &common);
            if let Some(d) = dims {
                cfg.gn.dims = d;
            }
            if let Some(a) = alphas {
                cfg.gn.alphas = a;
            }
            if let Some(n) = draws {
                cfg.gn.draws = n;
            }
            cfg.validate()?;
            let mut rows = Vec::new();
            for &d in &cfg.gn.dims {
                for &a in &cfg.gn.alphas {
                    let r = gn_sweep(d, a, cfg.gn.draws, cfg.run.seed, default_cells(d), common.serial)
                        .map_err(|e| HarnessError::Run(e.to_string()))?;
                    println!(
                        "d = {d} alpha = {a:<5} max ratio {:.6} refined {:.6} change {:.2e}",
                        r.max_ratio, r.max_ratio_refined, r.change
                    );
                    rows.push(r);
                }
            }
            report(&output::write_gn(&common.out, &rows)?);
            if rows.iter().any(|r| !r.max_ratio.is_finite()) {
                return Err(HarnessError::Numerical("non-finite ratio".into()));
            }
        }
        Cmd::NlsCompare { config, common } => {
            let mut cfg = load_or_default(config.as_ref())?;
            apply(&mut cfg, &common);
            let p = cfg.run.preset;
            let rep =
                oracle_compare(&cfg.nls, |x| p.rho0(x), |x| p.u0(x)).map_err(|e| HarnessError::Run(e.to_string()))?;
            report(&output::write_nls(&common.out, &rep)?);
            for r in rep.rows.iter().filter(|r| r.t == cfg.nls.t_end) {
                println!("n = {:<5} rho L2 {:.3e} J L2 {:.3e}", r.n_cells, r.rho_l2, r.j_l2);
            }
            println!(
                "halving orders {:?}, NLS mass drift {:.2e}",
                rep.orders, rep.nls_mass_drift
            );
            if let Some(t) = &rep.truncated {
                eprintln!("warning: {t}");
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match run(Cli::parse().cmd) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

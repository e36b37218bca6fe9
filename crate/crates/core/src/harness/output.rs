//! Writes run, sweep, GN, NLS and identity artifacts into an output directory.
//!
//! CSV floats use `{:.17e}` so that serial reruns are byte-identical.

use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::Serialize;

use super::config::Config;
use super::experiment::{RunOutput, RunSummary};
use super::identities::IdentityLedger;
use super::plot::{line_plot, Series};
use super::sweep::SweepReport;
use crate::entropy::gn::GnSummary;
use crate::nls::OracleReport;

fn create(dir: &Path, name: &str) -> std::io::Result<BufWriter<File>> {
    fs::create_dir_all(dir)?;
    Ok(BufWriter::new(File::create(dir.join(name))?))
}

fn write_json<T: Serialize>(dir: &Path, name: &str, value: &T) -> std::io::Result<PathBuf> {
    let mut w = create(dir, name)?;
    serde_json::to_writer_pretty(&mut w, value)?;
    writeln!(w)?;
    w.flush()?;
    Ok(dir.join(name))
}

fn write_text(dir: &Path, name: &str, text: &str) -> std::io::Result<PathBuf> {
    let mut w = create(dir, name)?;
    w.write_all(text.as_bytes())?;
    w.flush()?;
    Ok(dir.join(name))
}

#[derive(Serialize)]
struct RunJson<'a> {
    config: &'a Config,
    summary: &'a RunSummary,
}

/// `entropy.csv`, `diagnostics.csv`, `final_state.csv`, `summary.json`.
pub fn write_run(dir: &Path, cfg: &Config, out: &RunOutput) -> std::io::Result<Vec<PathBuf>> {
    let mut files = Vec::new();
    let mut w = create(dir, "entropy.csv")?;
    out.report.write_csv(&mut w)?;
    w.flush()?;
    files.push(dir.join("entropy.csv"));

    let mut w = create(dir, "diagnostics.csv")?;
    writeln!(w, "t,mass,E_EK,min_rho,max_abs_u")?;
    for d in &out.diagnostics {
        writeln!(
            w,
            "{:.17e},{:.17e},{:.17e},{:.17e},{:.17e}",
            d.t, d.mass, d.energy, d.min_rho, d.max_u
        )?;
    }
    w.flush()?;
    files.push(dir.join("diagnostics.csv"));

    let mut w = create(dir, "final_state.csv")?;
    let s = &out.final_state;
    let u = s.velocity();
    let re = &out.final_reference;
    writeln!(w, "x,rho,J,u,rho_E,u_E")?;
    for i in 0..s.grid.n_cells() {
        writeln!(
            w,
            "{:.17e},{:.17e},{:.17e},{:.17e},{:.17e},{:.17e}",
            s.grid.x(i),
            s.rho.values[i],
            s.j.values[i],
            u.values[i],
            re.rho[i],
            re.u[i]
        )?;
    }
    w.flush()?;
    files.push(dir.join("final_state.csv"));

    files.push(write_json(
        dir,
        "summary.json",
        &RunJson {
            config: cfg,
            summary: &out.summary,
        },
    )?);
    Ok(files)
}

/// `sweep.csv`, `sweep.json`, `sweep.svg`.
pub fn write_sweep(dir: &Path, rep: &SweepReport) -> std::io::Result<Vec<PathBuf>> {
    let mut w = create(dir, "sweep.csv")?;
    writeln!(
        w,
        "epsilon,n_cells,delta,E0,Eh0,E_tau,Eh_tau,C_fit,C_fit_h,margin,margin_h,tol,\
         dist_L1,dist_Lgamma,dist_Lambda,dist_gradbeta,dist_J,gronwall_ok"
    )?;
    for r in &rep.rows {
        let d = &r.dist;
        let vals = [
            r.delta, r.e0, r.e_h0, r.e_tau, r.e_h_tau, r.c_fit, r.c_fit_h, r.margin, r.margin_h, r.tol, d.l1, d.lgamma,
            d.lambda, d.gradbeta, d.momentum,
        ];
        write!(w, "{:.17e},{}", r.epsilon, r.n_cells)?;
        for v in vals {
            write!(w, ",{v:.17e}")?;
        }
        writeln!(w, ",{}", r.gronwall_ok)?;
    }
    w.flush()?;
    let eps: Vec<f64> = rep.rows.iter().map(|r| r.epsilon).collect();
    let col = |f: fn(&SweepReport, usize) -> f64| (0..rep.rows.len()).map(|i| f(rep, i)).collect::<Vec<f64>>();
    let ys = [
        ("L1", col(|r, i| r.rows[i].dist.l1)),
        ("Lgamma", col(|r, i| r.rows[i].dist.lgamma)),
        ("Lambda", col(|r, i| r.rows[i].dist.lambda)),
        ("grad beta", col(|r, i| r.rows[i].dist.gradbeta)),
        ("J", col(|r, i| r.rows[i].dist.momentum)),
    ];
    let series: Vec<Series> = ys.iter().map(|(l, y)| Series { label: l, x: &eps, y }).collect();
    let svg = line_plot("distances at tau", "epsilon", "sup_t distance", &series, true);
    Ok(vec![
        dir.join("sweep.csv"),
        write_json(dir, "sweep.json", rep)?,
        write_text(dir, "sweep.svg", &svg)?,
    ])
}

/// `gn.csv`, `gn.json`, `gn.svg` (max ratio against α per dimension).
pub fn write_gn(dir: &Path, rows: &[GnSummary]) -> std::io::Result<Vec<PathBuf>> {
    let mut w = create(dir, "gn.csv")?;
    writeln!(w, "d,alpha,draws,n,max_ratio,max_ratio_refined,change")?;
    for r in rows {
        writeln!(
            w,
            "{},{:.17e},{},{},{:.17e},{:.17e},{:.17e}",
            r.d, r.alpha, r.draws, r.n, r.max_ratio, r.max_ratio_refined, r.change
        )?;
    }
    w.flush()?;
    let mut dims: Vec<usize> = rows.iter().map(|r| r.d).collect();
    dims.dedup();
    let data: Vec<(String, Vec<f64>, Vec<f64>)> = dims
        .iter()
        .map(|&d| {
            let sel: Vec<&GnSummary> = rows.iter().filter(|r| r.d == d).collect();
            (
                format!("d = {d}"),
                sel.iter().map(|r| r.alpha).collect(),
                sel.iter().map(|r| r.max_ratio).collect(),
            )
        })
        .collect();
    let series: Vec<Series> = data.iter().map(|(l, x, y)| Series { label: l, x, y }).collect();
    let svg = line_plot("Gagliardo-Nirenberg ratio", "alpha", "max ratio", &series, false);
    Ok(vec![
        dir.join("gn.csv"),
        write_json(dir, "gn.json", &rows)?,
        write_text(dir, "gn.svg", &svg)?,
    ])
}

/// `nls.csv`, `nls.json`, `nls.svg` (density divergence against time per EK grid).
pub fn write_nls(dir: &Path, rep: &OracleReport) -> std::io::Result<Vec<PathBuf>> {
    let mut w = create(dir, "nls.csv")?;
    rep.write_csv(&mut w)?;
    w.flush()?;
    let data: Vec<(String, Vec<f64>, Vec<f64>)> = rep
        .config
        .ek_cells
        .iter()
        .map(|&n| {
            let sel: Vec<_> = rep.rows.iter().filter(|r| r.n_cells == n && r.t > 0.0).collect();
            (
                format!("n = {n}"),
                sel.iter().map(|r| r.t).collect(),
                sel.iter().map(|r| r.rho_l2).collect(),
            )
        })
        .collect();
    let series: Vec<Series> = data.iter().map(|(l, x, y)| Series { label: l, x, y }).collect();
    let svg = line_plot("EK vs NLS density divergence", "t", "L2 divergence", &series, true);
    Ok(vec![
        dir.join("nls.csv"),
        write_json(dir, "nls.json", rep)?,
        write_text(dir, "nls.svg", &svg)?,
    ])
}

/// `identities.json`.
pub fn write_identities(dir: &Path, ledger: &IdentityLedger) -> std::io::Result<Vec<PathBuf>> {
    Ok(vec![write_json(dir, "identities.json", ledger)?])
}

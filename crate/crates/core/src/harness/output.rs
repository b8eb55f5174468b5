use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use serde::Serialize;

use super::config::{SweepConfig, SweepMode};
use super::sweep::{CellSummary, SeriesFit, SweepResult, REFERENCE_RUNTIME_SCALE};
use super::trial::TrialRecord;
use crate::analysis::{ols_loglog, write_diagnostics_header, write_diagnostics_row};
use crate::error::{Error, Result};
use crate::fmt_g;

pub const TRIALS_HEADER: &str = "trial,seed,theta_T,gamma,k,n,m,R_gen,R_prequel,U_size,PH_size,\
cell,iteration,m_prime,p,theta_i,theta_d,theta_s,rho_i,N_H,N_C,N_S,chain_len,chain_score,\
ext_cells,end_cells,chain_ops,ec_exp,ec_con,f1,f2,max_gap,g_n,dropped";

pub const CELLS_HEADER: &str = "theta_T,gamma,k,C,alpha,n,m_prime,trials,dropped,valid,mean_m,\
mean_R_gen,mean_R_prequel,one_minus_R,mean_U,mean_spurious,mean_ext_cells,mean_chain_ops,predicted";

pub const FITS_HEADER: &str = "mode,theta_T,gamma,slope,intercept,ci_lo,ci_hi,r_squared,n_points,\
reference_slope,scale,reference_scale,ops_time_r,warnings";

fn opt<T>(v: Option<T>, f: impl Fn(T) -> String) -> String {
    v.map(f).unwrap_or_default()
}

fn trial_row(id: usize, cell: usize, r: &TrialRecord) -> String {
    let rep = r.recov;
    let d = r.diag;
    let flag = |b: bool| (b as u8).to_string();
    [
        id.to_string(),
        r.seed.to_string(),
        fmt_g(r.theta_total),
        fmt_g(r.gamma),
        r.k.to_string(),
        r.n.to_string(),
        r.m.to_string(),
        opt(rep, |x| fmt_g(x.generalized)),
        opt(rep, |x| fmt_g(x.prequel)),
        opt(rep, |x| x.u_size.to_string()),
        opt(rep, |x| x.ph_size.to_string()),
        cell.to_string(),
        r.trial.to_string(),
        r.m_prime.to_string(),
        r.p.to_string(),
        fmt_g(r.theta_i),
        fmt_g(r.theta_d),
        fmt_g(r.theta_s),
        fmt_g(r.rho_i),
        r.counts.homologous.to_string(),
        r.counts.clipping.to_string(),
        r.counts.spurious.to_string(),
        r.chain_len.to_string(),
        fmt_g(r.chain_score),
        r.ext_cells.to_string(),
        r.end_cells.to_string(),
        r.chain_ops.to_string(),
        opt(d, |x| flag(x.ec_expansion_ok)),
        opt(d, |x| flag(x.ec_contraction_ok)),
        opt(d, |x| flag(x.f1_no_spurious)),
        opt(d, |x| flag(x.f2_max_gap_ok)),
        opt(d, |x| x.max_homologous_gap.to_string()),
        opt(d, |x| fmt_g(x.g_n)),
        r.dropped.as_deref().unwrap_or("").replace(',', ";"),
    ]
    .join(",")
}

/// One row per trial; wall times are kept out so the file is reproducible.
pub fn write_trials_csv<W: Write>(mut w: W, result: &SweepResult) -> Result<()> {
    writeln!(w, "{TRIALS_HEADER}")?;
    let mut id = 0;
    for (c, records) in result.trials.iter().enumerate() {
        for r in records {
            writeln!(w, "{}", trial_row(id, c, r))?;
            id += 1;
        }
    }
    Ok(())
}

pub fn write_diagnostics_csv<W: Write>(mut w: W, result: &SweepResult) -> Result<()> {
    write_diagnostics_header(&mut w)?;
    let mut id = 0;
    for records in &result.trials {
        for r in records {
            if let Some(d) = &r.diag {
                write_diagnostics_row(&mut w, id, d)?;
            }
            id += 1;
        }
    }
    Ok(())
}

pub fn write_timings_csv<W: Write>(mut w: W, result: &SweepResult) -> Result<()> {
    writeln!(w, "trial,chain_secs,ext_secs")?;
    let mut id = 0;
    for times in &result.timings {
        for t in times {
            writeln!(w, "{},{},{}", id, fmt_g(t.chain_secs), fmt_g(t.ext_secs))?;
            id += 1;
        }
    }
    Ok(())
}

fn cell_row(c: &CellSummary) -> String {
    [
        fmt_g(c.cell.theta_total),
        fmt_g(c.cell.gamma),
        c.cell.k.to_string(),
        fmt_g(c.cell.c),
        fmt_g(c.cell.alpha),
        c.cell.n.to_string(),
        c.cell.m_prime.to_string(),
        c.trials.to_string(),
        c.dropped.to_string(),
        (c.valid() as u8).to_string(),
        fmt_g(c.mean_m),
        fmt_g(c.mean_r_gen),
        fmt_g(c.mean_r_prequel),
        fmt_g(c.one_minus_r()),
        fmt_g(c.mean_u),
        fmt_g(c.mean_spurious),
        fmt_g(c.mean_ext_cells),
        fmt_g(c.mean_chain_ops),
        fmt_g(c.predicted_cost()),
    ]
    .join(",")
}

pub fn write_cells_csv<W: Write>(mut w: W, cells: &[CellSummary]) -> Result<()> {
    writeln!(w, "{CELLS_HEADER}")?;
    for c in cells {
        writeln!(w, "{}", cell_row(c))?;
    }
    Ok(())
}

/// Measured and predicted runtime per cell. The prediction is also given
/// rescaled so that it meets the measurement at the smallest `k`.
pub fn write_runtime_csv<W: Write>(mut w: W, cells: &[CellSummary], fits: &[SeriesFit]) -> Result<()> {
    writeln!(
        w,
        "theta_T,gamma,k,n,mean_m,predicted,predicted_scaled,mean_chain_secs,mean_ext_secs,mean_total_secs,mean_ops"
    )?;
    for c in cells {
        let scale = fits
            .iter()
            .find(|f| f.theta_total == c.cell.theta_total && f.gamma == c.cell.gamma)
            .and_then(|f| f.scale)
            .unwrap_or(f64::NAN);
        writeln!(
            w,
            "{},{},{},{},{},{},{},{},{},{},{}",
            fmt_g(c.cell.theta_total),
            fmt_g(c.cell.gamma),
            c.cell.k,
            c.cell.n,
            fmt_g(c.mean_m),
            fmt_g(c.predicted_cost()),
            fmt_g(scale * c.predicted_cost()),
            fmt_g(c.mean_chain_secs),
            fmt_g(c.mean_ext_secs),
            fmt_g(c.mean_total_secs()),
            fmt_g(c.mean_ext_cells + c.mean_chain_ops)
        )?;
    }
    Ok(())
}

pub fn write_fits_csv<W: Write>(mut w: W, fits: &[SeriesFit]) -> Result<()> {
    writeln!(w, "{FITS_HEADER}")?;
    for f in fits {
        let mode = f.mode.to_string();
        let runtime = f.mode == SweepMode::Runtime;
        writeln!(
            w,
            "{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
            mode,
            fmt_g(f.theta_total),
            fmt_g(f.gamma),
            opt(f.fit, |x| fmt_g(x.slope)),
            opt(f.fit, |x| fmt_g(x.intercept)),
            opt(f.fit, |x| fmt_g(x.slope_ci95.0)),
            opt(f.fit, |x| fmt_g(x.slope_ci95.1)),
            opt(f.fit, |x| fmt_g(x.r_squared)),
            f.points.len(),
            fmt_g(f.reference_slope),
            opt(f.scale, fmt_g),
            if runtime { fmt_g(REFERENCE_RUNTIME_SCALE) } else { String::new() },
            opt(f.ops_time_r, fmt_g),
            f.warnings.join("; ").replace(',', ";"),
        )?;
    }
    Ok(())
}

fn write_dat(path: &Path, rows: &[(f64, f64)]) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    for &(x, y) in rows {
        writeln!(w, "{} {}", fmt_g(x), fmt_g(y))?;
    }
    w.flush()?;
    Ok(())
}

fn series_name(f: &SeriesFit) -> String {
    format!("theta{}_gamma{}", fmt_g(f.theta_total), fmt_g(f.gamma))
}

/// Two-column plot files: the fitted points of each series, and a reference
/// line through the first point.
pub fn write_plot_data(dir: &Path, cells: &[CellSummary], fits: &[SeriesFit]) -> Result<Vec<PathBuf>> {
    let mut written = Vec::new();
    for f in fits {
        let Some(&(x0, y0)) = f.points.first() else { continue };
        let name = series_name(f);
        match f.mode {
            SweepMode::Recoverability => {
                let data = dir.join(format!("recov_{name}.dat"));
                write_dat(&data, &f.points)?;
                let reference = dir.join(format!("recov_{name}_ref.dat"));
                let line: Vec<_> = f
                    .points
                    .iter()
                    .map(|&(x, _)| (x, y0 * (x / x0).powf(f.reference_slope)))
                    .collect();
                write_dat(&reference, &line)?;
                written.extend([data, reference]);
            }
            SweepMode::Runtime => {
                let scale = f.scale.unwrap_or(f64::NAN);
                let of_series = |c: &&CellSummary| c.cell.theta_total == f.theta_total && c.cell.gamma == f.gamma;
                let measured: Vec<_> = cells
                    .iter()
                    .filter(of_series)
                    .map(|c| (c.cell.k as f64, c.mean_total_secs()))
                    .collect();
                let predicted: Vec<_> = cells
                    .iter()
                    .filter(of_series)
                    .map(|c| (c.cell.k as f64, scale * c.predicted_cost()))
                    .collect();
                let (a, b) = (
                    dir.join(format!("runtime_{name}_measured.dat")),
                    dir.join(format!("runtime_{name}_predicted.dat")),
                );
                write_dat(&a, &measured)?;
                write_dat(&b, &predicted)?;
                written.extend([a, b]);
            }
        }
    }
    Ok(written)
}

#[derive(Debug, Serialize)]
struct ManifestCell {
    theta_t: f64,
    gamma: f64,
    k: usize,
    c: f64,
    n: usize,
    m_prime: usize,
    valid: bool,
}

#[derive(Debug, Serialize)]
struct Manifest<'a> {
    tool: &'static str,
    version: &'static str,
    master_seed: u64,
    config: &'a SweepConfig,
    config_text: String,
    files: Vec<String>,
    cells: Vec<ManifestCell>,
    started_unix: u64,
    finished_unix: u64,
}

fn unix_now() -> u64 {
    SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0)
}

fn create(dir: &Path, name: &str) -> Result<BufWriter<File>> {
    Ok(BufWriter::new(File::create(dir.join(name))?))
}

/// Writes every sweep output into `dir` and returns the file names.
pub fn write_sweep_outputs(dir: &Path, result: &SweepResult, started_unix: u64) -> Result<Vec<String>> {
    fs::create_dir_all(dir)?;
    let mut files = vec![
        "trials.csv".to_string(),
        "diagnostics.csv".into(),
        "timings.csv".into(),
        "cells.csv".into(),
        "fits.csv".into(),
    ];
    let flush = |mut w: BufWriter<File>| w.flush().map_err(Error::from);
    let mut w = create(dir, "trials.csv")?;
    write_trials_csv(&mut w, result)?;
    flush(w)?;
    let mut w = create(dir, "diagnostics.csv")?;
    write_diagnostics_csv(&mut w, result)?;
    flush(w)?;
    let mut w = create(dir, "timings.csv")?;
    write_timings_csv(&mut w, result)?;
    flush(w)?;
    let mut w = create(dir, "cells.csv")?;
    write_cells_csv(&mut w, &result.cells)?;
    flush(w)?;
    let mut w = create(dir, "fits.csv")?;
    write_fits_csv(&mut w, &result.fits)?;
    flush(w)?;
    if result.config.mode == SweepMode::Runtime {
        let mut w = create(dir, "runtime.csv")?;
        write_runtime_csv(&mut w, &result.cells, &result.fits)?;
        flush(w)?;
        files.push("runtime.csv".into());
    }
    for p in write_plot_data(dir, &result.cells, &result.fits)? {
        files.push(p.file_name().unwrap().to_string_lossy().into_owned());
    }
    files.push("manifest.json".into());
    let manifest = Manifest {
        tool: env!("CARGO_PKG_NAME"),
        version: env!("CARGO_PKG_VERSION"),
        master_seed: result.config.master_seed,
        config: &result.config,
        config_text: result.config.to_text(),
        files: files.clone(),
        cells: result
            .cells
            .iter()
            .map(|c| ManifestCell {
                theta_t: c.cell.theta_total,
                gamma: c.cell.gamma,
                k: c.cell.k,
                c: c.cell.c,
                n: c.cell.n,
                m_prime: c.cell.m_prime,
                valid: c.valid(),
            })
            .collect(),
        started_unix,
        finished_unix: unix_now(),
    };
    let mut w = create(dir, "manifest.json")?;
    serde_json::to_writer_pretty(&mut w, &manifest).map_err(|e| Error::Param(e.to_string()))?;
    writeln!(w)?;
    flush(w)?;
    Ok(files)
}

pub fn now_unix() -> u64 {
    unix_now()
}

/// `(theta_T, gamma, points)` collected from one table.
type Group = (f64, f64, Vec<(f64, f64)>);

/// A log-log fit of column `y` on column `x`, one per `(theta_T, gamma)`
/// group, from any CSV written by a sweep. Rows with `valid = 0` are skipped.
pub fn fit_table(text: &str, x: &str, y: &str) -> Result<Vec<(f64, f64, Result<crate::analysis::RegressionFit>)>> {
    let mut lines = text.lines().enumerate();
    let (_, header) = lines.next().ok_or(Error::Parse { line: 1, msg: "empty table".into() })?;
    let cols: Vec<&str> = header.split(',').collect();
    let col = |name: &str| {
        cols.iter().position(|c| *c == name).ok_or(Error::Parse {
            line: 1,
            msg: format!("missing column {name:?}"),
        })
    };
    let (ci, cg, cx, cy) = (col("theta_T")?, col("gamma")?, col(x)?, col(y)?);
    let cv = cols.iter().position(|c| *c == "valid");
    let mut groups: Vec<Group> = Vec::new();
    for (lineno, line) in lines {
        if line.trim().is_empty() {
            continue;
        }
        let f: Vec<&str> = line.split(',').collect();
        let num = |i: usize| -> Result<f64> {
            f.get(i).and_then(|v| v.parse().ok()).ok_or(Error::Parse {
                line: lineno + 1,
                msg: format!("bad number in column {}", cols[i]),
            })
        };
        if cv.is_some_and(|v| f.get(v) == Some(&"0")) {
            continue;
        }
        let key = (num(ci)?, num(cg)?);
        let pt = (num(cx)?, num(cy)?);
        match groups.iter_mut().find(|g| (g.0, g.1) == key) {
            Some(g) => g.2.push(pt),
            None => groups.push((key.0, key.1, vec![pt])),
        }
    }
    Ok(groups
        .into_iter()
        .map(|(t, g, mut pts)| {
            pts.sort_by(|a, b| a.0.total_cmp(&b.0));
            (t, g, ols_loglog(&pts))
        })
        .collect())
}

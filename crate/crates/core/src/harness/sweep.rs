use rayon::prelude::*;

use super::config::{SweepConfig, SweepMode};
use super::trial::{run_trial, Cell, Timings, TrialRecord};
use crate::analysis::{ols_loglog, pearson, RegressionFit};
use crate::error::{Error, Result};

/// Cells whose drop fraction exceeds this are left out of fits.
pub const MAX_DROP_FRACTION: f64 = 0.2;

/// Reference slope drawn next to recoverability fits.
pub const REFERENCE_SLOPE: f64 = -0.5;

/// Seconds per predicted unit measured on other hardware, printed next to
/// the scale fitted here.
pub const REFERENCE_RUNTIME_SCALE: f64 = 3.87e-8;

#[derive(Debug, Clone, PartialEq)]
pub struct CellSummary {
    pub cell: Cell,
    pub trials: usize,
    pub dropped: usize,
    pub mean_r_gen: f64,
    pub mean_r_prequel: f64,
    pub mean_m: f64,
    pub mean_u: f64,
    pub mean_spurious: f64,
    pub mean_ext_cells: f64,
    pub mean_chain_ops: f64,
    pub mean_chain_secs: f64,
    pub mean_ext_secs: f64,
}

impl CellSummary {
    pub fn valid(&self) -> bool {
        self.trials > self.dropped && (self.dropped as f64) <= MAX_DROP_FRACTION * self.trials as f64
    }

    pub fn one_minus_r(&self) -> f64 {
        1.0 - self.mean_r_gen
    }

    pub fn mean_total_secs(&self) -> f64 {
        self.mean_chain_secs + self.mean_ext_secs
    }

    pub fn predicted_cost(&self) -> f64 {
        self.cell.predicted_cost(self.mean_m)
    }
}

/// Averages the kept trials of one cell. Timings may be empty when only the
/// deterministic part is needed.
pub fn summarize(cell: Cell, records: &[TrialRecord], timings: &[Timings]) -> CellSummary {
    let kept: Vec<usize> = (0..records.len()).filter(|&t| !records[t].is_dropped()).collect();
    let denom = kept.len().max(1) as f64;
    let mean = |f: &dyn Fn(usize) -> f64| kept.iter().map(|&t| f(t)).sum::<f64>() / denom;
    CellSummary {
        cell,
        trials: records.len(),
        dropped: records.len() - kept.len(),
        mean_r_gen: mean(&|t| records[t].recov.map_or(0.0, |r| r.generalized)),
        mean_r_prequel: mean(&|t| records[t].recov.map_or(0.0, |r| r.prequel)),
        mean_m: mean(&|t| records[t].m as f64),
        mean_u: mean(&|t| records[t].recov.map_or(0.0, |r| r.u_size as f64)),
        mean_spurious: mean(&|t| records[t].counts.spurious as f64),
        mean_ext_cells: mean(&|t| records[t].ext_cells as f64 + records[t].end_cells as f64),
        mean_chain_ops: mean(&|t| records[t].chain_ops as f64),
        mean_chain_secs: if timings.is_empty() { 0.0 } else { mean(&|t| timings[t].chain_secs) },
        mean_ext_secs: if timings.is_empty() { 0.0 } else { mean(&|t| timings[t].ext_secs) },
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SeriesFit {
    pub mode: SweepMode,
    pub theta_total: f64,
    pub gamma: f64,
    pub fit: Option<RegressionFit>,
    pub reference_slope: f64,
    /// Runtime sweeps: measured seconds per predicted unit at the smallest k.
    pub scale: Option<f64>,
    /// Runtime sweeps: correlation between operation counts and wall time.
    pub ops_time_r: Option<f64>,
    pub warnings: Vec<String>,
    /// The `(x, y)` points that went into the fit.
    pub points: Vec<(f64, f64)>,
}

#[derive(Debug, Clone)]
pub struct SweepResult {
    pub config: SweepConfig,
    pub cells: Vec<CellSummary>,
    /// Per cell, in the same order as `cells`.
    pub trials: Vec<Vec<TrialRecord>>,
    pub timings: Vec<Vec<Timings>>,
    pub fits: Vec<SeriesFit>,
}

pub fn sweep_cells(cfg: &SweepConfig) -> Result<Vec<Cell>> {
    cfg.validate()?;
    let mut cells = Vec::new();
    for &theta in &cfg.theta_list {
        for &gamma in &cfg.gamma_list {
            for k in cfg.k_values() {
                cells.push(Cell::derive(cfg, theta, gamma, k)?);
            }
        }
    }
    Ok(cells)
}

fn run_all(cfg: &SweepConfig, jobs: &[(usize, Cell, usize)]) -> Result<Vec<(TrialRecord, Timings)>> {
    let job = |&(_, cell, t): &(usize, Cell, usize)| run_trial(&cell, t, cell.trial_seed(cfg.master_seed, t));
    if cfg.mode == SweepMode::Runtime || cfg.workers == 1 {
        return jobs.iter().map(job).collect();
    }
    if cfg.workers > 1 {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(cfg.workers)
            .build()
            .map_err(|e| Error::Param(e.to_string()))?;
        return pool.install(|| jobs.par_iter().map(job).collect());
    }
    jobs.par_iter().map(job).collect()
}

/// Runs every trial of every cell, then aggregates and fits.
pub fn run_sweep(cfg: &SweepConfig) -> Result<SweepResult> {
    let cells = sweep_cells(cfg)?;
    let jobs: Vec<(usize, Cell, usize)> = cells
        .iter()
        .enumerate()
        .flat_map(|(c, &cell)| (0..cfg.iterations).map(move |t| (c, cell, t)))
        .collect();
    let mut results = run_all(cfg, &jobs)?.into_iter();
    let mut trials = Vec::with_capacity(cells.len());
    let mut timings = Vec::with_capacity(cells.len());
    let mut summaries = Vec::with_capacity(cells.len());
    for &cell in &cells {
        let (r, t): (Vec<_>, Vec<_>) = results.by_ref().take(cfg.iterations).unzip();
        summaries.push(summarize(cell, &r, &t));
        trials.push(r);
        timings.push(t);
    }
    let fits = fit_series(cfg.mode, &summaries, &trials, &timings);
    Ok(SweepResult {
        config: cfg.clone(),
        cells: summaries,
        trials,
        timings,
        fits,
    })
}

/// Groups cells by `(theta_T, gamma)` in first-seen order.
fn series(cells: &[CellSummary]) -> Vec<(f64, f64, Vec<usize>)> {
    let mut out: Vec<(f64, f64, Vec<usize>)> = Vec::new();
    for (idx, c) in cells.iter().enumerate() {
        let key = (c.cell.theta_total, c.cell.gamma);
        match out.iter_mut().find(|s| (s.0, s.1) == key) {
            Some(s) => s.2.push(idx),
            None => out.push((key.0, key.1, vec![idx])),
        }
    }
    for s in &mut out {
        s.2.sort_by_key(|&i| cells[i].cell.k);
    }
    out
}

/// Fits one log-log line per `(theta_T, gamma)` series.
///
/// Recoverability: `1 - mean R_gen` against mean `|S'|`. Runtime: mean
/// chaining plus extension seconds against `m n^(C alpha) log_sigma n`.
/// Invalid cells and cells with a non-positive response are skipped with a
/// warning. Timings are only needed in runtime mode.
pub fn fit_series(
    mode: SweepMode,
    cells: &[CellSummary],
    trials: &[Vec<TrialRecord>],
    timings: &[Vec<Timings>],
) -> Vec<SeriesFit> {
    let mut fits = Vec::new();
    for (theta, gamma, idx) in series(cells) {
        let mut warnings = Vec::new();
        let mut points = Vec::new();
        for &i in &idx {
            let c = &cells[i];
            if !c.valid() {
                warnings.push(format!("k={}: {} of {} trials dropped, cell excluded", c.cell.k, c.dropped, c.trials));
                continue;
            }
            let (x, y) = match mode {
                SweepMode::Recoverability => (c.mean_m, c.one_minus_r()),
                SweepMode::Runtime => (c.predicted_cost(), c.mean_total_secs()),
            };
            if !(x > 0.0 && y > 0.0) {
                warnings.push(format!("k={}: non-positive value {y}, cell excluded", c.cell.k));
                continue;
            }
            points.push((x, y));
        }
        let fit = if points.len() >= 3 {
            match ols_loglog(&points) {
                Ok(f) => Some(f),
                Err(e) => {
                    warnings.push(e.to_string());
                    None
                }
            }
        } else {
            warnings.push(format!("only {} usable points, no fit", points.len()));
            None
        };
        let (scale, ops_time_r) = match mode {
            SweepMode::Runtime => {
                let scale = points.first().map(|&(x, y)| y / x);
                let (mut ops, mut secs) = (Vec::new(), Vec::new());
                for &i in &idx {
                    for (r, t) in trials[i].iter().zip(timings.get(i).map_or(&[][..], |v| &v[..])) {
                        if !r.is_dropped() {
                            ops.push((r.ext_cells + r.end_cells + r.chain_ops) as f64);
                            secs.push(t.chain_secs + t.ext_secs);
                        }
                    }
                }
                (scale, pearson(&ops, &secs))
            }
            SweepMode::Recoverability => (None, None),
        };
        fits.push(SeriesFit {
            mode,
            theta_total: theta,
            gamma,
            fit,
            reference_slope: match mode {
                SweepMode::Recoverability => REFERENCE_SLOPE,
                SweepMode::Runtime => 1.0,
            },
            scale,
            ops_time_r,
            warnings,
            points,
        });
    }
    fits
}

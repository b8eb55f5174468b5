use std::time::Instant;

use rand::Rng;

use super::config::{CRule, SweepConfig, SweepMode};
use crate::analysis::{derive_constants, diagnose, ConstantsBundle, DiagnosticReport};
use crate::chaining::{optimal_chain_fast_counted, Chain};
use crate::error::{Error, Result};
use crate::extension::{count_extension_cells, extension_cost, EndExtension};
use crate::recoverability::{non_recoverable, recoverability, RecoverabilityReport};
use crate::rng::{derive_seed, rng_from_seed};
use crate::seeding::{classify_all, find_anchors, index_reference, AnchorClass, AnchorSet, ClassCounts};
use crate::seqgen::{
    build_homologous_path, generate_reference, mutate, EditScript, MutationParams, SequencePair,
};

/// One `(theta_T, gamma, k)` point of a sweep with its derived sizes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Cell {
    pub theta_total: f64,
    pub gamma: f64,
    pub k: usize,
    pub sigma: u8,
    pub c: f64,
    pub alpha: f64,
    pub n: usize,
    pub m_prime: usize,
    pub delta: f64,
    pub strict: bool,
    pub mode: SweepMode,
    pub include_ends: bool,
}

impl Cell {
    /// `n = round(sigma^(k/C))`, `m' = round(n^((2 C alpha + 1)/2 + epsilon))`.
    pub fn derive(cfg: &SweepConfig, theta_total: f64, gamma: f64, k: usize) -> Result<Cell> {
        let ln_sigma = (cfg.sigma as f64).ln();
        let alpha = -(1.0 - theta_total).ln() / ln_sigma;
        let c = match cfg.c_rule {
            CRule::Fixed(c) => c,
            CRule::Theory => {
                if 1.0 - 2.0 * alpha <= 0.0 {
                    return Err(Error::Param(format!("theta_T = {theta_total} gives alpha >= 1/2")));
                }
                3.0 / (1.0 - 2.0 * alpha) + if alpha > 0.0 { cfg.delta / alpha } else { 0.0 }
            }
        };
        let n = (cfg.sigma as f64).powf(k as f64 / c).round() as usize;
        let exponent = (2.0 * c * alpha + 1.0) / 2.0 + cfg.epsilon;
        let m_prime = ((n as f64).powf(exponent).round() as usize).min(n);
        if n < k || m_prime < 1 {
            return Err(Error::Param(format!("k = {k} gives n = {n}, m' = {m_prime}")));
        }
        Ok(Cell {
            theta_total,
            gamma,
            k,
            sigma: cfg.sigma,
            c,
            alpha,
            n,
            m_prime,
            delta: cfg.delta,
            strict: cfg.strict,
            mode: cfg.mode,
            include_ends: cfg.include_ends,
        })
    }

    /// Seed of trial `t`, keyed by the cell coordinates rather than its
    /// position in the sweep.
    pub fn trial_seed(&self, master: u64, t: usize) -> u64 {
        derive_seed(
            master,
            &[self.theta_total.to_bits(), self.gamma.to_bits(), self.k as u64, t as u64],
        )
    }

    pub fn predicted_cost(&self, m: f64) -> f64 {
        let n = self.n as f64;
        m * n.powf(self.c * self.alpha) * n.ln() / (self.sigma as f64).ln()
    }
}

/// Splits `total` into `(theta_i, theta_d, theta_s)` uniformly on the simplex.
pub fn sample_simplex<R: Rng + ?Sized>(total: f64, rng: &mut R) -> (f64, f64, f64) {
    let (mut u, mut v): (f64, f64) = (rng.random(), rng.random());
    if u > v {
        std::mem::swap(&mut u, &mut v);
    }
    let theta_i = u * total;
    let theta_d = (v - u) * total;
    (theta_i, theta_d, total - theta_i - theta_d)
}

#[derive(Debug, Clone, PartialEq)]
pub struct Timings {
    pub chain_secs: f64,
    pub ext_secs: f64,
}

/// Everything recorded about one trial except wall-clock times.
#[derive(Debug, Clone, PartialEq)]
pub struct TrialRecord {
    pub trial: usize,
    pub seed: u64,
    pub theta_total: f64,
    pub gamma: f64,
    pub k: usize,
    pub n: usize,
    pub m_prime: usize,
    pub m: usize,
    pub p: usize,
    pub theta_i: f64,
    pub theta_d: f64,
    pub theta_s: f64,
    pub rho_i: f64,
    pub counts: ClassCounts,
    pub chain_len: usize,
    pub chain_score: f64,
    pub recov: Option<RecoverabilityReport>,
    pub diag: Option<DiagnosticReport>,
    pub ext_cells: u64,
    pub end_cells: u64,
    pub chain_ops: u64,
    pub dropped: Option<String>,
}

impl TrialRecord {
    pub fn is_dropped(&self) -> bool {
        self.dropped.is_some()
    }

    pub fn r_gen(&self) -> Option<f64> {
        self.recov.map(|r| r.generalized)
    }
}

/// Intermediate products of a trial, kept for replay and inspection.
#[derive(Debug, Clone)]
pub struct TrialArtifacts {
    pub pair: SequencePair,
    pub anchors: AnchorSet,
    pub classes: Vec<AnchorClass>,
    pub chain: Chain,
}

fn counts_of(classes: &[AnchorClass]) -> ClassCounts {
    let mut c = ClassCounts::default();
    for class in classes {
        match class {
            AnchorClass::Homologous => c.homologous += 1,
            AnchorClass::Clipping => c.clipping += 1,
            AnchorClass::Spurious => c.spurious += 1,
        }
    }
    c
}

/// Seeds, chains and scores a known pair.
///
/// Returns the record, the wall times and the intermediates. The record's
/// sweep coordinates (`trial`, `seed`, rates) are left for the caller.
pub fn evaluate_pair(
    pair: SequencePair,
    k: usize,
    constants: Option<&ConstantsBundle>,
    mode: SweepMode,
    include_ends: bool,
) -> Result<(TrialRecord, Timings, TrialArtifacts)> {
    let mut rec = TrialRecord {
        trial: 0,
        seed: 0,
        theta_total: 0.0,
        gamma: 0.0,
        k,
        n: pair.n(),
        m_prime: pair.script.m_prime(),
        m: pair.m(),
        p: pair.script.p,
        theta_i: 0.0,
        theta_d: 0.0,
        theta_s: 0.0,
        rho_i: 0.0,
        counts: ClassCounts::default(),
        chain_len: 0,
        chain_score: 0.0,
        recov: None,
        diag: None,
        ext_cells: 0,
        end_cells: 0,
        chain_ops: 0,
        dropped: None,
    };
    let mut timings = Timings { chain_secs: 0.0, ext_secs: 0.0 };
    if pair.m() < k {
        rec.dropped = Some(format!("m = {} < k = {k}", pair.m()));
        let artifacts = TrialArtifacts {
            anchors: AnchorSet { k, anchors: Vec::new() },
            classes: Vec::new(),
            chain: Chain::empty(),
            pair,
        };
        return Ok((rec, timings, artifacts));
    }

    let index = index_reference(&pair.s, k)?;
    let anchors = find_anchors(&index, &pair.s_prime);
    drop(index);
    let path = build_homologous_path(&pair.script);
    let classes = classify_all(&anchors, &path);
    rec.counts = counts_of(&classes);

    let xi = 1.0 / pair.n() as f64;
    let started = Instant::now();
    let (chain, ops) = optimal_chain_fast_counted(&anchors, xi);
    timings.chain_secs = started.elapsed().as_secs_f64();
    rec.chain_ops = ops;
    rec.chain_len = chain.len();
    rec.chain_score = chain.score;

    match mode {
        SweepMode::Runtime => {
            let ends = include_ends.then_some(EndExtension {
                p: pair.script.p,
                m_prime: pair.script.m_prime(),
            });
            let (_, acct) = extension_cost(&pair.s, &pair.s_prime, &chain, ends)?;
            rec.ext_cells = acct.ext_cells;
            rec.end_cells = acct.end_cells;
            timings.ext_secs = acct.ext_secs;
        }
        SweepMode::Recoverability => rec.ext_cells = count_extension_cells(&chain),
    }

    let u = non_recoverable(&path, &pair.s, &pair.s_prime);
    match recoverability(&chain, &path, &u) {
        Ok(r) => rec.recov = Some(r),
        Err(Error::Degenerate(msg)) => rec.dropped = Some(msg),
        Err(e) => return Err(e),
    }
    if let Some(c) = constants {
        rec.diag = Some(diagnose(&pair.script, &anchors, &classes, c));
    }
    Ok((rec, timings, TrialArtifacts { pair, anchors, classes, chain }))
}

/// Generates, mutates and evaluates one trial of `cell`.
pub fn run_trial_full(cell: &Cell, trial: usize, seed: u64) -> Result<(TrialRecord, Timings, TrialArtifacts)> {
    let mut rng = rng_from_seed(seed);
    let s = generate_reference(cell.n, cell.sigma, &mut rng)?;
    let p = rng.random_range(0..=cell.n - cell.m_prime);
    let (theta_i, theta_d, theta_s) = sample_simplex(cell.theta_total, &mut rng);
    let rho_i = if cell.strict { cell.gamma - 1e-9 } else { cell.gamma };
    let mut params = MutationParams::new(theta_s, theta_d, theta_i, rho_i, cell.gamma, cell.sigma)?;
    if cell.strict {
        params = params.strict()?;
    }
    let pair = mutate(&s, p, cell.m_prime, &params, &mut rng)?;
    drop(s);
    let constants = derive_constants(cell.sigma, cell.theta_total, theta_d, cell.gamma, cell.n, cell.delta)?
        .with_k(cell.k);
    let (mut rec, timings, artifacts) = evaluate_pair(pair, cell.k, Some(&constants), cell.mode, cell.include_ends)?;
    rec.trial = trial;
    rec.seed = seed;
    rec.theta_total = cell.theta_total;
    rec.gamma = cell.gamma;
    rec.theta_i = theta_i;
    rec.theta_d = theta_d;
    rec.theta_s = theta_s;
    rec.rho_i = rho_i;
    Ok((rec, timings, artifacts))
}

pub fn run_trial(cell: &Cell, trial: usize, seed: u64) -> Result<(TrialRecord, Timings)> {
    run_trial_full(cell, trial, seed).map(|(r, t, _)| (r, t))
}

/// Evaluates a fixed reference and edit script, as the `replay` command does.
pub fn replay(s: &[u8], script: &EditScript, k: usize) -> Result<(TrialRecord, TrialArtifacts)> {
    let s_prime = script.apply(s)?;
    let pair = SequencePair {
        s: s.to_vec(),
        s_prime,
        script: script.clone(),
    };
    let (rec, _, artifacts) = evaluate_pair(pair, k, None, SweepMode::Recoverability, false)?;
    Ok((rec, artifacts))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::seqgen::worked_example;

    #[test]
    fn simplex_sums_to_total() {
        let mut rng = rng_from_seed(4);
        for _ in 0..1000 {
            let (a, b, c) = sample_simplex(0.1, &mut rng);
            assert!(a >= 0.0 && b >= 0.0 && c >= 0.0);
            assert!((a + b + c - 0.1).abs() < 1e-12);
        }
    }

    #[test]
    fn worked_example_replay() {
        let pair = worked_example();
        let (rec, art) = replay(&pair.s, &pair.script, 3).unwrap();
        assert_eq!(art.chain.anchors.len(), 3);
        let r = rec.recov.unwrap();
        assert!((r.generalized - 0.6).abs() < 1e-12);
        assert!((r.prequel - 4.0 / 9.0).abs() < 1e-12);
        assert_eq!(r.u_size, 4);
    }

    #[test]
    fn zero_rate_trial() {
        let cfg = SweepConfig::recoverability();
        let mut cell = Cell::derive(&cfg, 0.0, 0.5, 12).unwrap();
        cell.mode = SweepMode::Runtime;
        let (rec, _) = run_trial(&cell, 0, 5).unwrap();
        assert_eq!(rec.r_gen(), Some(1.0));
        assert_eq!(rec.ext_cells, 0);
        assert!(rec.diag.unwrap().all_ok());
    }

    #[test]
    fn trials_are_deterministic() {
        let cfg = SweepConfig::recoverability();
        let cell = Cell::derive(&cfg, 0.1, 0.5, 14).unwrap();
        let seed = cell.trial_seed(1, 0);
        assert_eq!(run_trial(&cell, 0, seed).unwrap().0, run_trial(&cell, 0, seed).unwrap().0);
    }
}

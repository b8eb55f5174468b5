//! The `sce` command line.

use std::fs::{self, File};
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use rand::Rng;

use super::config::{SweepConfig, SweepMode};
use super::output::{fit_table, now_unix, write_sweep_outputs};
use super::sweep::run_sweep;
use super::trial::{replay, run_trial, Cell};
use crate::analysis::derive_constants;
use crate::chaining::{optimal_chain_fast, write_chain_csv};
use crate::error::{Error, Result};
use crate::extension::full_alignment;
use crate::fmt_g;
use crate::recoverability::{non_recoverable, recoverability};
use crate::rng::rng_from_seed;
use crate::seeding::{classify_all, find_anchors, index_reference, write_anchor_csv};
use crate::seqgen::{
    build_homologous_path, correspondence, generate_reference, letters_to_dna, mutate, read_edit_script, read_fasta,
    write_edit_script, write_fasta, EditScript, FastaRecord, MutationParams,
};

#[derive(Debug, Parser)]
#[command(name = "sce", version, about = "Seed-chain-extend workbench for indel and substitution channels")]
pub struct Cli {
    /// Master seed for every random draw (default 0, or the config's seed).
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Sweep config file (`key = value` lines).
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Output directory.
    #[arg(long, global = true, default_value = "out")]
    pub out: PathBuf,
    /// Reject theta_T >= 0.159 and keep insertion lengths strictly below gamma.
    #[arg(long, global = true)]
    pub strict_theta: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate a reference, mutate a region of it and write both plus the script.
    Simulate(SimulateArgs),
    /// Seed, chain and extend a query against a reference.
    Align(PairArgs),
    /// Classify the anchors of a scripted pair against its homologous path.
    Classify(ScriptArgs),
    /// Recoverability of the optimal chain for a scripted pair.
    Recoverability(ScriptArgs),
    /// Run a recoverability or runtime sweep.
    Sweep(SweepArgs),
    /// Log-log fits over a table written by `sweep`.
    Fit(FitArgs),
    /// Print the theory constants, optionally with event frequencies.
    CheckBounds(BoundsArgs),
    /// Recompute path, correspondence map, classes and recoverability for a script.
    Replay(ScriptArgs),
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[arg(long)]
    pub n: usize,
    #[arg(long = "theta-t", default_value_t = 0.1)]
    pub theta_t: f64,
    #[arg(long, default_value_t = 0.5)]
    pub gamma: f64,
    /// Generative region length; defaults to `n`.
    #[arg(long = "m-prime")]
    pub m_prime: Option<usize>,
    /// Region offset; uniform in `[0, n - m']` when absent.
    #[arg(long)]
    pub p: Option<usize>,
}

#[derive(Debug, Args)]
pub struct PairArgs {
    #[arg(long = "ref")]
    pub reference: PathBuf,
    #[arg(long)]
    pub query: PathBuf,
    #[arg(long, default_value_t = 15)]
    pub k: usize,
}

#[derive(Debug, Args)]
pub struct ScriptArgs {
    #[arg(long = "ref")]
    pub reference: PathBuf,
    #[arg(long)]
    pub script: PathBuf,
    #[arg(long, default_value_t = 3)]
    pub k: usize,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[arg(long)]
    pub mode: Option<SweepMode>,
    /// Comma-separated theta_T values.
    #[arg(long = "theta-t")]
    pub theta_t: Option<String>,
    /// Comma-separated gamma values.
    #[arg(long)]
    pub gamma: Option<String>,
    #[arg(long = "k-min")]
    pub k_min: Option<usize>,
    #[arg(long = "k-max")]
    pub k_max: Option<usize>,
    #[arg(long = "k-step")]
    pub k_step: Option<usize>,
    #[arg(long)]
    pub iterations: Option<usize>,
    #[arg(long)]
    pub workers: Option<usize>,
}

#[derive(Debug, Args)]
pub struct FitArgs {
    /// A `cells.csv` or `runtime.csv` file.
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long, default_value = "mean_m")]
    pub x: String,
    #[arg(long, default_value = "one_minus_R")]
    pub y: String,
}

#[derive(Debug, Args)]
pub struct BoundsArgs {
    #[arg(long)]
    pub k: usize,
    #[arg(long = "theta-t", default_value_t = 0.1)]
    pub theta_t: f64,
    #[arg(long, default_value_t = 0.5)]
    pub gamma: f64,
    #[arg(long, default_value_t = 4)]
    pub sigma: u8,
    /// Monte-Carlo trials for the EC, F1 and F2 frequencies.
    #[arg(long, default_value_t = 0)]
    pub trials: usize,
}

/// Exit status for an error: 2 for degenerate input, 1 otherwise.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Degenerate(_) => 2,
        _ => 1,
    }
}

/// Parses `args` (including the program name) and runs the command.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match run(&cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

fn load_fasta(path: &Path) -> Result<Vec<u8>> {
    let recs = read_fasta(BufReader::new(File::open(path)?))?;
    recs.into_iter()
        .next()
        .map(|r| r.seq)
        .ok_or_else(|| Error::Param(format!("{} holds no FASTA record", path.display())))
}

fn load_script(path: &Path) -> Result<EditScript> {
    read_edit_script(BufReader::new(File::open(path)?))
}

fn create(dir: &Path, name: &str) -> Result<BufWriter<File>> {
    fs::create_dir_all(dir)?;
    Ok(BufWriter::new(File::create(dir.join(name))?))
}

fn list(v: &str) -> Result<Vec<f64>> {
    v.split(',')
        .map(|x| x.trim().parse().map_err(|e| Error::Param(format!("{x:?}: {e}"))))
        .collect()
}

pub fn run(cli: &Cli) -> Result<()> {
    match &cli.command {
        Command::Simulate(a) => simulate(cli, a),
        Command::Align(a) => align(cli, a),
        Command::Classify(a) => classify(cli, a),
        Command::Recoverability(a) => recover(a),
        Command::Sweep(a) => sweep(cli, a),
        Command::Fit(a) => fit(a),
        Command::CheckBounds(a) => check_bounds(cli, a),
        Command::Replay(a) => replay_cmd(cli, a),
    }
}

fn simulate(cli: &Cli, a: &SimulateArgs) -> Result<()> {
    let m_prime = a.m_prime.unwrap_or(a.n);
    if m_prime > a.n {
        return Err(Error::Param(format!("m' = {m_prime} exceeds n = {}", a.n)));
    }
    let mut rng = rng_from_seed(cli.seed.unwrap_or(0));
    let s = generate_reference(a.n, 4, &mut rng)?;
    let p = match a.p {
        Some(p) => p,
        None => rng.random_range(0..=a.n - m_prime),
    };
    let (ti, td, ts) = super::trial::sample_simplex(a.theta_t, &mut rng);
    let rho = if cli.strict_theta { a.gamma - 1e-9 } else { a.gamma };
    let mut params = MutationParams::new(ts, td, ti, rho, a.gamma, 4)?;
    if cli.strict_theta {
        params = params.strict()?;
    }
    let pair = mutate(&s, p, m_prime, &params, &mut rng)?;
    let mut w = create(&cli.out, "reference.fa")?;
    write_fasta(&mut w, &[FastaRecord { name: "S".into(), seq: pair.s.clone() }])?;
    w.flush()?;
    let mut w = create(&cli.out, "query.fa")?;
    write_fasta(&mut w, &[FastaRecord { name: "S_prime".into(), seq: pair.s_prime.clone() }])?;
    w.flush()?;
    let mut w = create(&cli.out, "script.edits")?;
    write_edit_script(&mut w, &pair.script)?;
    w.flush()?;
    println!(
        "n={} m'={} m={} p={} theta_i={} theta_d={} theta_s={}",
        pair.n(),
        m_prime,
        pair.m(),
        p,
        fmt_g(ti),
        fmt_g(td),
        fmt_g(ts)
    );
    Ok(())
}

fn align(cli: &Cli, a: &PairArgs) -> Result<()> {
    let s = load_fasta(&a.reference)?;
    let q = load_fasta(&a.query)?;
    let anchors = find_anchors(&index_reference(&s, a.k)?, &q);
    let chain = optimal_chain_fast(&anchors, 1.0 / s.len() as f64);
    if chain.is_empty() {
        return Err(Error::Degenerate("no anchors between reference and query".into()));
    }
    let (aln, acct) = full_alignment(&s, &q, &chain, None)?;
    let mut w = create(&cli.out, "chain.csv")?;
    write_chain_csv(&mut w, &chain)?;
    w.flush()?;
    let mut w = create(&cli.out, "gaps.tsv")?;
    aln.write_gap_tsv(&mut w)?;
    w.flush()?;
    println!(
        "anchors={} chain={} score={} cost={} cells={}",
        anchors.len(),
        chain.len(),
        fmt_g(chain.score),
        aln.cost,
        acct.ext_cells
    );
    println!("cigar={}", aln.cigar(&s, &q));
    Ok(())
}

fn classify(cli: &Cli, a: &ScriptArgs) -> Result<()> {
    let s = load_fasta(&a.reference)?;
    let script = load_script(&a.script)?;
    let q = script.apply(&s)?;
    let path = build_homologous_path(&script);
    let anchors = find_anchors(&index_reference(&s, a.k)?, &q);
    let mut w = create(&cli.out, "anchors.csv")?;
    write_anchor_csv(&mut w, &anchors, &path)?;
    w.flush()?;
    let classes = classify_all(&anchors, &path);
    for (an, c) in anchors.anchors.iter().zip(&classes) {
        println!("({},{}) {c}", an.i, an.j);
    }
    Ok(())
}

fn recover(a: &ScriptArgs) -> Result<()> {
    let s = load_fasta(&a.reference)?;
    let script = load_script(&a.script)?;
    let q = script.apply(&s)?;
    let path = build_homologous_path(&script);
    let anchors = find_anchors(&index_reference(&s, a.k)?, &q);
    let chain = optimal_chain_fast(&anchors, 1.0 / s.len() as f64);
    let u = non_recoverable(&path, &s, &q);
    let r = recoverability(&chain, &path, &u)?;
    println!(
        "R_gen={} R_prequel={} U_size={} PH_size={}",
        fmt_g(r.generalized),
        fmt_g(r.prequel),
        r.u_size,
        r.ph_size
    );
    Ok(())
}

fn sweep_config(cli: &Cli, a: &SweepArgs) -> Result<SweepConfig> {
    let mut cfg = match &cli.config {
        Some(path) => SweepConfig::parse(&fs::read_to_string(path)?)?,
        None => match a.mode {
            Some(SweepMode::Runtime) => SweepConfig::runtime(),
            _ => SweepConfig::recoverability(),
        },
    };
    if let Some(m) = a.mode {
        if m != cfg.mode {
            let defaults = match m {
                SweepMode::Runtime => SweepConfig::runtime(),
                SweepMode::Recoverability => SweepConfig::recoverability(),
            };
            cfg.mode = m;
            cfg.include_ends = defaults.include_ends;
        }
    }
    if let Some(seed) = cli.seed {
        cfg.master_seed = seed;
    }
    cfg.strict |= cli.strict_theta;
    if let Some(v) = &a.theta_t {
        cfg.theta_list = list(v)?;
    }
    if let Some(v) = &a.gamma {
        cfg.gamma_list = list(v)?;
    }
    cfg.k_min = a.k_min.unwrap_or(cfg.k_min);
    cfg.k_max = a.k_max.unwrap_or(cfg.k_max);
    cfg.k_step = a.k_step.unwrap_or(cfg.k_step);
    cfg.iterations = a.iterations.unwrap_or(cfg.iterations);
    cfg.workers = a.workers.unwrap_or(cfg.workers);
    cfg.validate()?;
    Ok(cfg)
}

fn sweep(cli: &Cli, a: &SweepArgs) -> Result<()> {
    let cfg = sweep_config(cli, a)?;
    let started = now_unix();
    let result = run_sweep(&cfg)?;
    write_sweep_outputs(&cli.out, &result, started)?;
    for f in &result.fits {
        match &f.fit {
            Some(fit) => println!(
                "theta_T={} gamma={} slope={} ci95=({}, {}) points={}",
                fmt_g(f.theta_total),
                fmt_g(f.gamma),
                fmt_g(fit.slope),
                fmt_g(fit.slope_ci95.0),
                fmt_g(fit.slope_ci95.1),
                fit.n_points
            ),
            None => println!("theta_T={} gamma={} no fit", fmt_g(f.theta_total), fmt_g(f.gamma)),
        }
        for w in &f.warnings {
            println!("  warning: {w}");
        }
    }
    println!("wrote {}", cli.out.display());
    Ok(())
}

fn fit(a: &FitArgs) -> Result<()> {
    let text = fs::read_to_string(&a.input)?;
    for (theta, gamma, fit) in fit_table(&text, &a.x, &a.y)? {
        match fit {
            Ok(f) => println!(
                "theta_T={} gamma={} slope={} intercept={} ci95=({}, {}) r2={} points={}",
                fmt_g(theta),
                fmt_g(gamma),
                fmt_g(f.slope),
                fmt_g(f.intercept),
                fmt_g(f.slope_ci95.0),
                fmt_g(f.slope_ci95.1),
                fmt_g(f.r_squared),
                f.n_points
            ),
            Err(e) => println!("theta_T={} gamma={} warning: {e}", fmt_g(theta), fmt_g(gamma)),
        }
    }
    Ok(())
}

fn check_bounds(cli: &Cli, a: &BoundsArgs) -> Result<()> {
    let cfg = SweepConfig {
        theta_list: vec![a.theta_t],
        gamma_list: vec![a.gamma],
        sigma: a.sigma,
        strict: cli.strict_theta,
        ..SweepConfig::recoverability()
    };
    cfg.validate()?;
    let cell = Cell::derive(&cfg, a.theta_t, a.gamma, a.k)?;
    let c = derive_constants(a.sigma, a.theta_t, a.theta_t / 3.0, a.gamma, cell.n, 0.0)?.with_k(a.k);
    println!("n={} m'={} k={}", cell.n, cell.m_prime, a.k);
    println!("alpha={} C={} C*alpha={} bound={}", fmt_g(c.alpha), fmt_g(c.c), fmt_g(c.c_alpha()), fmt_g(c.c_alpha_bound));
    println!("beta={} t0={} c0={} xi={}", fmt_g(c.beta), fmt_g(c.t0), fmt_g(c.c0), fmt_g(c.xi));
    println!("g_n={}", fmt_g(c.g_n));
    println!("expansion_threshold={}", fmt_g(c.expansion_threshold));
    println!(
        "contraction_block={} contraction_threshold(theta_d=theta_T/3)={}",
        c.contraction_block,
        fmt_g(c.contraction_threshold)
    );
    if c.theta_warning {
        println!("warning: theta_T >= 0.159 is outside the proven range");
    }
    if a.trials == 0 {
        return Ok(());
    }
    let (mut ec, mut f1, mut f2, mut used) = (0usize, 0usize, 0usize, 0usize);
    for t in 0..a.trials {
        let (rec, _) = run_trial(&cell, t, cell.trial_seed(cli.seed.unwrap_or(0), t))?;
        if let Some(d) = rec.diag {
            used += 1;
            ec += !d.ec_ok() as usize;
            f1 += !d.f1_no_spurious as usize;
            f2 += !d.f2_max_gap_ok as usize;
        }
    }
    let n = cell.n as f64;
    for (name, hits, bound) in [("EC", ec, 2.0 / n), ("F1", f1, 3.0 / n), ("F2", f2, 1.0 / n)] {
        let freq = hits as f64 / used.max(1) as f64;
        println!(
            "{name}: violations={hits}/{used} freq={} bound={}",
            fmt_g(freq),
            fmt_g(bound)
        );
    }
    Ok(())
}

fn replay_cmd(cli: &Cli, a: &ScriptArgs) -> Result<()> {
    let s = load_fasta(&a.reference)?;
    let script = load_script(&a.script)?;
    let (rec, art) = replay(&s, &script, a.k)?;
    let path = build_homologous_path(&script);
    let f = correspondence(&path, &script, s.len());
    println!("S'={}", letters_to_dna(&art.pair.s_prime));
    let pts: Vec<String> = path.points().iter().map(|(x, y)| format!("({x},{y})")).collect();
    println!("path=[{}]", pts.join(","));
    let fx: Vec<String> = (script.p + 1..=script.p + script.m_prime())
        .map(|x| match f.forward(x) {
            Some(y) => format!("f({x})={y}"),
            None => format!("f({x})=null"),
        })
        .collect();
    println!("{}", fx.join(" "));
    for (an, c) in art.anchors.anchors.iter().zip(&art.classes) {
        println!("anchor ({},{}) {c}", an.i, an.j);
    }
    let chain: Vec<String> = art.chain.anchors.iter().map(|a| format!("({},{})", a.i, a.j)).collect();
    println!("chain=[{}]", chain.join(","));
    if let Some(r) = rec.recov {
        println!(
            "R_gen={} R_prequel={} U_size={} PH_size={}",
            fmt_g(r.generalized),
            fmt_g(r.prequel),
            r.u_size,
            r.ph_size
        );
    }
    if let Some(reason) = &rec.dropped {
        return Err(Error::Degenerate(reason.clone()));
    }
    let mut w = create(&cli.out, "anchors.csv")?;
    write_anchor_csv(&mut w, &art.anchors, &path)?;
    w.flush()?;
    Ok(())
}

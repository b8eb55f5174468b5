use std::io::Write;

use super::ConstantsBundle;
use crate::error::Result;
use crate::fmt_g;
use crate::seeding::{AnchorClass, AnchorSet};
use crate::seqgen::EditScript;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiagnosticReport {
    pub ec_expansion_ok: bool,
    pub ec_contraction_ok: bool,
    pub f1_no_spurious: bool,
    pub f2_max_gap_ok: bool,
    pub max_homologous_gap: usize,
    pub spurious_count: usize,
    pub g_n: f64,
}

impl DiagnosticReport {
    pub fn ec_ok(&self) -> bool {
        self.ec_expansion_ok && self.ec_contraction_ok
    }

    /// All three events hold.
    pub fn all_ok(&self) -> bool {
        self.ec_ok() && self.f1_no_spurious && self.f2_max_gap_ok
    }
}

/// Slides a window of `w` generative positions across the script. Returns
/// `(expansion_ok, contraction_ok)`; a region shorter than a window passes
/// that check vacuously.
pub fn check_ec(script: &EditScript, c: &ConstantsBundle) -> (bool, bool) {
    let recs = &script.records;
    let k = c.k.max(1);
    let mut expansion_ok = true;
    if recs.len() >= k {
        let mut inserted: usize = recs[..k].iter().map(|r| r.inserted.len()).sum();
        let mut worst = inserted;
        for t in k..recs.len() {
            inserted = inserted + recs[t].inserted.len() - recs[t - k].inserted.len();
            worst = worst.max(inserted);
        }
        expansion_ok = worst as f64 <= c.expansion_threshold;
    }
    let l = c.contraction_block.max(1);
    let mut contraction_ok = true;
    if recs.len() >= l {
        let mut kept = recs[..l].iter().filter(|r| !r.deleted).count();
        let mut fewest = kept;
        for t in l..recs.len() {
            kept = kept + !recs[t].deleted as usize - !recs[t - l].deleted as usize;
            fewest = fewest.min(kept);
        }
        contraction_ok = fewest as f64 > c.contraction_threshold;
    }
    (expansion_ok, contraction_ok)
}

/// Longest run of candidate starts in `[p+1, p+m'-k+1]` with no homologous
/// anchor starting there. Returns `(max_gap <= g_n, max_gap)`.
pub fn check_f2(anchors: &AnchorSet, classes: &[AnchorClass], script: &EditScript, g_n: f64) -> (bool, usize) {
    let k = anchors.k;
    let lo = script.p + 1;
    if script.m_prime() < k {
        return (true, 0);
    }
    let hi = script.p + script.m_prime() - k + 1;
    let mut hit = vec![false; hi - lo + 1];
    for (a, class) in anchors.anchors.iter().zip(classes) {
        if *class == AnchorClass::Homologous && (lo..=hi).contains(&a.i) {
            hit[a.i - lo] = true;
        }
    }
    let mut run = 0;
    let mut max_gap = 0;
    for h in hit {
        run = if h { 0 } else { run + 1 };
        max_gap = max_gap.max(run);
    }
    (max_gap as f64 <= g_n, max_gap)
}

pub fn diagnose(
    script: &EditScript,
    anchors: &AnchorSet,
    classes: &[AnchorClass],
    constants: &ConstantsBundle,
) -> DiagnosticReport {
    let (ec_expansion_ok, ec_contraction_ok) = check_ec(script, constants);
    let (f2_max_gap_ok, max_homologous_gap) = check_f2(anchors, classes, script, constants.g_n);
    let spurious_count = classes.iter().filter(|&&c| c == AnchorClass::Spurious).count();
    DiagnosticReport {
        ec_expansion_ok,
        ec_contraction_ok,
        f1_no_spurious: spurious_count == 0,
        f2_max_gap_ok,
        max_homologous_gap,
        spurious_count,
        g_n: constants.g_n,
    }
}

pub const DIAGNOSTICS_HEADER: &str = "trial,ec_exp,ec_con,f1,f2,max_gap,g_n,spurious_count";

pub fn write_diagnostics_header<W: Write>(mut w: W) -> Result<()> {
    writeln!(w, "{DIAGNOSTICS_HEADER}")?;
    Ok(())
}

pub fn write_diagnostics_row<W: Write>(mut w: W, trial: usize, d: &DiagnosticReport) -> Result<()> {
    writeln!(
        w,
        "{},{},{},{},{},{},{},{}",
        trial,
        d.ec_expansion_ok as u8,
        d.ec_contraction_ok as u8,
        d.f1_no_spurious as u8,
        d.f2_max_gap_ok as u8,
        d.max_homologous_gap,
        fmt_g(d.g_n),
        d.spurious_count
    )?;
    Ok(())
}

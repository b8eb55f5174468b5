//! Non-recoverable regions and the recoverability of a chain.
//!
//! For a path point `(i, j)`, `r(i, j)` is the longest run of letter matches
//! `S[i+l] = S'[j+l]` whose diagonal points `(i+l, j+l)` all lie off the
//! path; `l(i, j)` is the same looking backwards through `S[i-l]` and
//! `S'[j-l]`. The path points sharing an `x` or a `y` coordinate with such a
//! run form the non-recoverable set `U`, which is left out of the
//! recoverability denominator.

use std::io::Write;

use crate::chaining::Chain;
use crate::error::{Error, Result};
use crate::extension::{gap_boxes, GapBox};
use crate::seeding::Anchor;
use crate::seqgen::HomologousPath;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NonRecoverableSet {
    /// `in_u[t]` tells whether `path.points()[t]` belongs to `U`.
    pub in_u: Vec<bool>,
    /// `r(i, j)` for each path point, in path order.
    pub right: Vec<usize>,
    /// `l(i, j)` for each path point, in path order.
    pub left: Vec<usize>,
}

impl NonRecoverableSet {
    /// `U = ∅` for a path with `len` points.
    pub fn empty(len: usize) -> Self {
        NonRecoverableSet {
            in_u: vec![false; len],
            right: vec![0; len],
            left: vec![0; len],
        }
    }

    pub fn len(&self) -> usize {
        self.in_u.iter().filter(|&&b| b).count()
    }

    pub fn is_empty(&self) -> bool {
        !self.in_u.iter().any(|&b| b)
    }

    /// The members of `U` in path order.
    pub fn points<'a>(&'a self, path: &'a HomologousPath) -> impl Iterator<Item = (usize, usize)> + 'a {
        path.points()
            .iter()
            .zip(&self.in_u)
            .filter(|(_, &u)| u)
            .map(|(&pt, _)| pt)
    }
}

fn run_right(path: &HomologousPath, s: &[u8], s_prime: &[u8], i: usize, j: usize) -> usize {
    let mut t = 0;
    while i + t < s.len()
        && j + t < s_prime.len()
        && s[i + t] == s_prime[j + t]
        && !path.contains(i + t + 1, j + t + 1)
    {
        t += 1;
    }
    t
}

fn run_left(path: &HomologousPath, s: &[u8], s_prime: &[u8], i: usize, j: usize) -> usize {
    let mut t = 1;
    while t < i && t < j && s[i - t - 1] == s_prime[j - t - 1] && !path.contains(i - t, j - t) {
        t += 1;
    }
    t - 1
}

/// Computes `r`, `l` and `U` for every point of `path`.
pub fn non_recoverable(path: &HomologousPath, s: &[u8], s_prime: &[u8]) -> NonRecoverableSet {
    let pts = path.points();
    let n = pts.len();
    let lb_x = |x: usize| pts.partition_point(|&(px, _)| px < x);
    let lb_y = |y: usize| pts.partition_point(|&(_, py)| py < y);
    let mut diff = vec![0i64; n + 1];
    let mut mark = |lo: usize, hi: usize| {
        if lo < hi {
            diff[lo] += 1;
            diff[hi] -= 1;
        }
    };
    let mut right = Vec::with_capacity(n);
    let mut left = Vec::with_capacity(n);
    for &(i, j) in pts {
        let r = run_right(path, s, s_prime, i, j);
        let l = run_left(path, s, s_prime, i, j);
        if r > 0 {
            mark(lb_x(i + 1), lb_x(i + r + 1));
            mark(lb_y(j + 1), lb_y(j + r + 1));
        }
        if l > 0 {
            mark(lb_x(i + 1 - l), lb_x(i + 1));
            mark(lb_y(j + 1 - l), lb_y(j + 1));
        }
        right.push(r);
        left.push(l);
    }
    let mut in_u = Vec::with_capacity(n);
    let mut acc = 0;
    for d in &diff[..n] {
        acc += d;
        in_u.push(acc > 0);
    }
    NonRecoverableSet { in_u, right, left }
}

/// Membership test for `Align(C)`: anchor diagonals plus full `Ext` rectangles.
#[derive(Debug, Clone)]
pub struct AlignSet {
    anchors: Vec<Anchor>,
    boxes: Vec<GapBox>,
}

impl AlignSet {
    pub fn new(chain: &Chain) -> Self {
        AlignSet {
            anchors: chain.anchors.clone(),
            boxes: gap_boxes(chain).into_iter().filter(|b| !b.is_empty()).collect(),
        }
    }

    pub fn contains(&self, x: usize, y: usize) -> bool {
        let hi = self.anchors.partition_point(|a| a.i <= x);
        for a in self.anchors[..hi].iter().rev() {
            if a.i + a.k <= x {
                break;
            }
            if x - a.i == y.wrapping_sub(a.j) && y >= a.j {
                return true;
            }
        }
        let hi = self.boxes.partition_point(|b| b.x_lo <= x);
        for b in self.boxes[..hi].iter().rev() {
            if b.x_hi < x {
                break;
            }
            if b.contains(x, y) {
                return true;
            }
        }
        false
    }

    /// Every point of the set, for small chains.
    pub fn enumerate(&self) -> Vec<(usize, usize)> {
        let mut pts: Vec<(usize, usize)> = self
            .anchors
            .iter()
            .flat_map(|a| (0..a.k).map(move |t| (a.i + t, a.j + t)))
            .chain(self.boxes.iter().flat_map(|b| {
                (b.x_lo..=b.x_hi).flat_map(move |x| (b.y_lo..=b.y_hi).map(move |y| (x, y)))
            }))
            .collect();
        pts.sort_unstable();
        pts.dedup();
        pts
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RecoverabilityReport {
    pub generalized: f64,
    pub prequel: f64,
    pub ph_size: usize,
    pub u_size: usize,
    /// `|Align(C) ∩ P_H \ U|`
    pub recovered: usize,
    /// `|Align(C) ∩ P_H|`
    pub recovered_prequel: usize,
}

/// Computes both recoverability variants.
///
/// The path origin `(p, 0)` pairs no letters and no anchor diagonal can reach
/// it, so it is left out of every count except `ph_size`. Fails when every
/// remaining point is non-recoverable.
pub fn recoverability(chain: &Chain, path: &HomologousPath, u: &NonRecoverableSet) -> Result<RecoverabilityReport> {
    let align = AlignSet::new(chain);
    let mut recovered = 0;
    let mut recovered_prequel = 0;
    let mut scored = 0;
    let mut scored_prequel = 0;
    for (&(x, y), &in_u) in path.points().iter().zip(&u.in_u).skip(1) {
        scored_prequel += 1;
        scored += !in_u as usize;
        if align.contains(x, y) {
            recovered_prequel += 1;
            recovered += !in_u as usize;
        }
    }
    if scored == 0 {
        return Err(Error::Degenerate("every homologous path point is non-recoverable".into()));
    }
    Ok(RecoverabilityReport {
        generalized: recovered as f64 / scored as f64,
        prequel: recovered_prequel as f64 / scored_prequel as f64,
        ph_size: path.len(),
        u_size: u.len(),
        recovered,
        recovered_prequel,
    })
}

pub fn recoverability_generalized(chain: &Chain, path: &HomologousPath, u: &NonRecoverableSet) -> Result<f64> {
    recoverability(chain, path, u).map(|r| r.generalized)
}

pub fn recoverability_prequel(chain: &Chain, path: &HomologousPath) -> f64 {
    let u = NonRecoverableSet::empty(path.len());
    recoverability(chain, path, &u).map(|r| r.prequel).unwrap_or(0.0)
}

/// Lower bound on the recoverability of an optimal chain from its distance to
/// the path ends.
pub fn end_gap_lower_bound(chain: &Chain, path: &HomologousPath) -> f64 {
    let (Some(first), Some(last)) = (chain.first(), chain.last()) else {
        return 0.0;
    };
    let (is, js) = path.first();
    let (ie, je) = path.last();
    let missed = first.i as f64 - is as f64 + first.j as f64 - js as f64 + ie as f64 - last.i as f64 + je as f64
        - last.j as f64;
    1.0 - missed / path.len() as f64
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReportRow {
    pub trial: usize,
    pub seed: u64,
    pub theta_total: f64,
    pub gamma: f64,
    pub k: usize,
    pub n: usize,
    pub m: usize,
    pub report: RecoverabilityReport,
}

pub const REPORT_HEADER: &str = "trial,seed,theta_T,gamma,k,n,m,R_gen,R_prequel,U_size,PH_size";

pub fn write_report_row<W: Write>(mut w: W, row: &ReportRow) -> Result<()> {
    use crate::fmt_g;
    writeln!(
        w,
        "{},{},{},{},{},{},{},{},{},{},{}",
        row.trial,
        row.seed,
        fmt_g(row.theta_total),
        fmt_g(row.gamma),
        row.k,
        row.n,
        row.m,
        fmt_g(row.report.generalized),
        fmt_g(row.report.prequel),
        row.report.u_size,
        row.report.ph_size
    )?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::seqgen::{build_homologous_path, dna_to_letters, EditScript};

    #[test]
    fn substitutions_leave_u_empty() {
        let s = dna_to_letters("ACGTACGTAC").unwrap();
        let mut script = EditScript::unmutated(1, 8);
        script.records[2].substituted = Some(0);
        script.records[5].substituted = Some(3);
        let q = script.apply(&s).unwrap();
        let path = build_homologous_path(&script);
        assert!(non_recoverable(&path, &s, &q).is_empty());
    }

    #[test]
    fn two_letter_no_op_is_partly_swallowed() {
        // Delete "AC" at positions 3..4 and reinsert "AC" before position 5.
        let s = dna_to_letters("GGACTTGG").unwrap();
        let mut script = EditScript::unmutated(0, 8);
        script.records[2].deleted = true;
        script.records[3].deleted = true;
        script.records[4].inserted = dna_to_letters("AC").unwrap();
        let q = script.apply(&s).unwrap();
        assert_eq!(q, s);
        let path = build_homologous_path(&script);
        let u = non_recoverable(&path, &s, &q);
        let pts: Vec<_> = u.points(&path).collect();
        assert!(pts.contains(&(3, 2)));
        assert!(pts.contains(&(4, 3)));
    }

    #[test]
    fn align_set_of_abutting_anchors() {
        let k = 3;
        let chain = Chain::new(vec![Anchor::new(1, 1, k), Anchor::new(1 + k, 1 + k, k)], 0.0).unwrap();
        let set = AlignSet::new(&chain);
        let pts = set.enumerate();
        assert_eq!(pts.len(), 2 * k + 2);
        for x in 0..10 {
            for y in 0..10 {
                assert_eq!(set.contains(x, y), pts.contains(&(x, y)), "({x}, {y})");
            }
        }
    }

    #[test]
    fn identity_channel_full_chain() {
        let s = dna_to_letters("ACGTTGCAAC").unwrap();
        let script = EditScript::unmutated(0, 10);
        let path = build_homologous_path(&script);
        let chain = Chain::new((1..=8).map(|t| Anchor::new(t, t, 3)).collect(), 0.1).unwrap();
        let u = non_recoverable(&path, &s, &s);
        let rep = recoverability(&chain, &path, &u).unwrap();
        assert_eq!(rep.recovered, 10);
        assert_eq!(rep.ph_size, 11);
        assert_eq!(rep.generalized, 1.0);
        let empty = recoverability(&Chain::empty(), &path, &u).unwrap();
        assert_eq!(empty.generalized, 0.0);
    }
}

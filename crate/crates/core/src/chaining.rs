//! Optimal chaining under the linear gap cost.
//!
//! A chain `(i_1, j_1), ..., (i_u, j_u)` needs `i` strictly increasing and `j`
//! non-decreasing. Its score is `u - xi * (i_u - i_1 + j_u - j_1)`.

use std::io::Write;

use crate::error::{Error, Result};
use crate::seeding::{Anchor, AnchorSet};

/// Scores closer than this are treated as equal when breaking ties.
pub const SCORE_EPS: f64 = 1e-9;

/// Largest anchor count [`brute_force_optimal`] accepts.
pub const BRUTE_FORCE_LIMIT: usize = 20;

#[derive(Debug, Clone, PartialEq)]
pub struct Chain {
    pub anchors: Vec<Anchor>,
    pub score: f64,
}

impl Chain {
    pub fn empty() -> Self {
        Chain {
            anchors: Vec::new(),
            score: 0.0,
        }
    }

    /// Validates `anchors` and computes the score.
    pub fn new(anchors: Vec<Anchor>, xi: f64) -> Result<Self> {
        let score = score_chain(&anchors, xi)?;
        Ok(Chain { anchors, score })
    }

    pub fn len(&self) -> usize {
        self.anchors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.anchors.is_empty()
    }

    pub fn first(&self) -> Option<&Anchor> {
        self.anchors.first()
    }

    pub fn last(&self) -> Option<&Anchor> {
        self.anchors.last()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChainingConfig {
    pub xi: f64,
}

impl ChainingConfig {
    /// The default penalty `1/n` for a reference of length `n`.
    pub fn for_reference(n: usize) -> Self {
        ChainingConfig {
            xi: 1.0 / n.max(1) as f64,
        }
    }
}

fn precedes(u: &Anchor, v: &Anchor) -> bool {
    u.i < v.i && u.j <= v.j
}

pub fn validate_chain(anchors: &[Anchor]) -> Result<()> {
    for w in anchors.windows(2) {
        if !precedes(&w[0], &w[1]) {
            return Err(Error::InvalidChain(format!(
                "({}, {}) cannot precede ({}, {})",
                w[0].i, w[0].j, w[1].i, w[1].j
            )));
        }
    }
    Ok(())
}

pub fn score_chain(anchors: &[Anchor], xi: f64) -> Result<f64> {
    validate_chain(anchors)?;
    Ok(match (anchors.first(), anchors.last()) {
        (Some(a), Some(b)) => anchors.len() as f64 - xi * ((b.i - a.i) + (b.j - a.j)) as f64,
        _ => 0.0,
    })
}

/// Same value as [`score_chain`], summed gap by gap.
pub fn score_chain_by_gaps(anchors: &[Anchor], xi: f64) -> Result<f64> {
    validate_chain(anchors)?;
    if anchors.is_empty() {
        return Ok(0.0);
    }
    Ok(anchors.windows(2).fold(1.0, |acc, w| {
        acc + 1.0 - xi * ((w[1].i - w[0].i) + (w[1].j - w[0].j)) as f64
    }))
}

fn backtrace(anchors: &[Anchor], dp: &[f64], pred: &[Option<usize>]) -> Chain {
    let mut best: Option<usize> = None;
    for v in 0..anchors.len() {
        if best.is_none_or(|b| dp[v] > dp[b] + SCORE_EPS) {
            best = Some(v);
        }
    }
    let Some(mut v) = best else {
        return Chain::empty();
    };
    let score = dp[v];
    let mut out = vec![anchors[v]];
    while let Some(u) = pred[v] {
        out.push(anchors[u]);
        v = u;
    }
    out.reverse();
    Chain { anchors: out, score }
}

fn sorted(anchors: &AnchorSet) -> Vec<Anchor> {
    let mut v = anchors.anchors.clone();
    if !v.is_sorted() {
        v.sort_unstable();
    }
    v
}

/// O(N²) predecessor DP.
pub fn optimal_chain_quadratic(anchors: &AnchorSet, xi: f64) -> Chain {
    let a = sorted(anchors);
    let mut dp = vec![0.0; a.len()];
    let mut pred = vec![None; a.len()];
    for v in 0..a.len() {
        let mut best = 0.0;
        for u in 0..v {
            if !precedes(&a[u], &a[v]) {
                continue;
            }
            let cand = dp[u] - xi * ((a[v].i - a[u].i) + (a[v].j - a[u].j)) as f64;
            if cand > best + SCORE_EPS {
                best = cand;
                pred[v] = Some(u);
            }
        }
        dp[v] = 1.0 + best;
    }
    backtrace(&a, &dp, &pred)
}

/// Fenwick tree over compressed `j` holding prefix maxima of
/// `dp[u] + xi * (i_u + j_u)`.
struct PrefixMax {
    tree: Vec<(f64, usize)>,
    ops: u64,
}

impl PrefixMax {
    fn new(len: usize) -> Self {
        PrefixMax {
            tree: vec![(f64::NEG_INFINITY, usize::MAX); len + 1],
            ops: 0,
        }
    }

    fn better(a: (f64, usize), b: (f64, usize)) -> bool {
        a.0 > b.0 + SCORE_EPS || (a.0 >= b.0 - SCORE_EPS && a.1 < b.1)
    }

    fn update(&mut self, pos: usize, val: (f64, usize)) {
        let mut p = pos + 1;
        while p < self.tree.len() {
            self.ops += 1;
            if Self::better(val, self.tree[p]) {
                self.tree[p] = val;
            }
            p += p & p.wrapping_neg();
        }
    }

    /// Maximum over positions `0..=pos`.
    fn query(&mut self, pos: usize) -> (f64, usize) {
        let mut best = (f64::NEG_INFINITY, usize::MAX);
        let mut p = pos + 1;
        while p > 0 {
            self.ops += 1;
            if Self::better(self.tree[p], best) {
                best = self.tree[p];
            }
            p -= p & p.wrapping_neg();
        }
        best
    }
}

/// O(N log N) chaining. Returns the chain and the number of Fenwick-tree
/// steps taken.
pub fn optimal_chain_fast_counted(anchors: &AnchorSet, xi: f64) -> (Chain, u64) {
    let a = sorted(anchors);
    let mut js: Vec<usize> = a.iter().map(|x| x.j).collect();
    js.sort_unstable();
    js.dedup();
    let mut tree = PrefixMax::new(js.len());
    let mut dp = vec![0.0; a.len()];
    let mut pred = vec![None; a.len()];

    let mut start = 0;
    while start < a.len() {
        let mut end = start;
        while end < a.len() && a[end].i == a[start].i {
            end += 1;
        }
        for v in start..end {
            let rank = js.partition_point(|&j| j < a[v].j);
            let (val, u) = tree.query(rank);
            let cand = val - xi * (a[v].i + a[v].j) as f64;
            if u != usize::MAX && cand > SCORE_EPS {
                dp[v] = 1.0 + cand;
                pred[v] = Some(u);
            } else {
                dp[v] = 1.0;
            }
        }
        for v in start..end {
            let rank = js.partition_point(|&j| j < a[v].j);
            tree.update(rank, (dp[v] + xi * (a[v].i + a[v].j) as f64, v));
        }
        start = end;
    }
    (backtrace(&a, &dp, &pred), tree.ops)
}

pub fn optimal_chain_fast(anchors: &AnchorSet, xi: f64) -> Chain {
    optimal_chain_fast_counted(anchors, xi).0
}

/// Exhaustive search over every subset; refuses more than
/// [`BRUTE_FORCE_LIMIT`] anchors.
pub fn brute_force_optimal(anchors: &AnchorSet, xi: f64) -> Result<Chain> {
    let a = sorted(anchors);
    if a.len() > BRUTE_FORCE_LIMIT {
        return Err(Error::TooLarge(a.len(), BRUTE_FORCE_LIMIT));
    }
    let mut best = Chain::empty();
    let mut subset = Vec::with_capacity(a.len());
    for mask in 1u32..(1u32 << a.len()) {
        subset.clear();
        subset.extend((0..a.len()).filter(|&t| mask >> t & 1 == 1).map(|t| a[t]));
        if let Ok(score) = score_chain(&subset, xi) {
            if score > best.score + SCORE_EPS {
                best = Chain {
                    anchors: subset.clone(),
                    score,
                };
            }
        }
    }
    Ok(best)
}

pub fn write_chain_csv<W: Write>(mut w: W, chain: &Chain) -> Result<()> {
    writeln!(w, "rank,i,j")?;
    for (rank, a) in chain.anchors.iter().enumerate() {
        writeln!(w, "{},{},{}", rank + 1, a.i, a.j)?;
    }
    writeln!(w, "score={}", crate::fmt_g(chain.score))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn set(pairs: &[(usize, usize)]) -> AnchorSet {
        AnchorSet::from_pairs(3, pairs.iter().copied())
    }

    #[test]
    fn direct_formula() {
        let a = set(&[(1, 1), (5, 4)]).anchors;
        assert!((score_chain(&a, 0.01).unwrap() - 1.93).abs() < 1e-12);
        assert_eq!(score_chain(&a[..1], 0.01).unwrap(), 1.0);
    }

    #[test]
    fn monotonicity_violation_is_an_error() {
        let a = vec![Anchor::new(5, 1, 3), Anchor::new(1, 5, 3)];
        assert!(matches!(score_chain(&a, 0.0), Err(Error::InvalidChain(_))));
        let same_i = vec![Anchor::new(2, 1, 3), Anchor::new(2, 5, 3)];
        assert!(score_chain(&same_i, 0.0).is_err());
        let same_j = vec![Anchor::new(1, 4, 3), Anchor::new(2, 4, 3)];
        assert!(score_chain(&same_j, 0.0).is_ok());
    }

    #[test]
    fn crossing_pair_keeps_one_anchor() {
        let s = set(&[(1, 5), (5, 1)]);
        for chain in [
            optimal_chain_quadratic(&s, 1e-3),
            optimal_chain_fast(&s, 1e-3),
            brute_force_optimal(&s, 1e-3).unwrap(),
        ] {
            assert_eq!(chain.anchors, vec![Anchor::new(1, 5, 3)]);
            assert_eq!(chain.score, 1.0);
        }
    }

    #[test]
    fn empty_set() {
        let s = set(&[]);
        assert_eq!(optimal_chain_quadratic(&s, 0.1), Chain::empty());
        assert_eq!(optimal_chain_fast(&s, 0.1), Chain::empty());
        assert_eq!(brute_force_optimal(&s, 0.1).unwrap(), Chain::empty());
    }

    #[test]
    fn diagonal_anchors_chain_completely() {
        let s = set(&(1..=500).map(|t| (t, t)).collect::<Vec<_>>());
        let chain = optimal_chain_fast(&s, 1e-4);
        assert_eq!(chain.len(), 500);
        let q = optimal_chain_quadratic(&s, 1e-4);
        assert_eq!(q.anchors, chain.anchors);
    }

    #[test]
    fn brute_force_refuses_large_sets() {
        let s = set(&(1..=21).map(|t| (t, t)).collect::<Vec<_>>());
        assert!(matches!(brute_force_optimal(&s, 0.0), Err(Error::TooLarge(21, 20))));
    }

    #[test]
    fn chain_csv() {
        let chain = Chain::new(set(&[(1, 1), (5, 4)]).anchors, 0.01).unwrap();
        let mut buf = Vec::new();
        write_chain_csv(&mut buf, &chain).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "rank,i,j\n1,1,1\n2,5,4\nscore=1.93\n");
    }
}

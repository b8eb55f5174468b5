//! Gap filling between chained anchors.
//!
//! Boxes are given in path-point coordinates. Extending the box
//! `[x_lo, x_hi] × [y_lo, y_hi]` aligns `S[x_lo+1 ..= x_hi]` against
//! `S'[y_lo+1 ..= y_hi]`, so the path runs from corner `(x_lo, y_lo)` to
//! corner `(x_hi, y_hi)` and the DP fills `(x_hi - x_lo) * (y_hi - y_lo)`
//! cells.

use std::fmt::Write as _;
use std::io::Write;
use std::time::Instant;

use crate::chaining::Chain;
use crate::error::{param, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GapBox {
    pub x_lo: usize,
    pub x_hi: usize,
    pub y_lo: usize,
    pub y_hi: usize,
}

impl GapBox {
    pub fn is_empty(&self) -> bool {
        self.x_lo > self.x_hi || self.y_lo > self.y_hi
    }

    /// DP cells needed to extend across the box.
    pub fn cells(&self) -> u64 {
        if self.is_empty() {
            0
        } else {
            ((self.x_hi - self.x_lo) as u64) * ((self.y_hi - self.y_lo) as u64)
        }
    }

    pub fn contains(&self, x: usize, y: usize) -> bool {
        self.x_lo <= x && x <= self.x_hi && self.y_lo <= y && y <= self.y_hi
    }
}

/// One box per consecutive anchor pair, empty when the anchors overlap.
pub fn gap_boxes(chain: &Chain) -> Vec<GapBox> {
    chain
        .anchors
        .windows(2)
        .map(|w| GapBox {
            x_lo: w[0].i + w[0].k - 1,
            x_hi: w[1].i,
            y_lo: w[0].j + w[0].k - 1,
            y_hi: w[1].j,
        })
        .collect()
}

pub fn count_extension_cells(chain: &Chain) -> u64 {
    chain
        .anchors
        .windows(2)
        .map(|w| {
            let k = w[0].k as i64;
            let gx = (w[1].i as i64 - w[0].i as i64 - k + 1).max(0) as u64;
            let gy = (w[1].j as i64 - w[0].j as i64 - k + 1).max(0) as u64;
            gx * gy
        })
        .sum()
}

/// A global alignment between two path points.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GapAlignment {
    pub points: Vec<(usize, usize)>,
    pub cost: u32,
    pub cells: u64,
}

fn check_box(s: &[u8], s_prime: &[u8], b: &GapBox) -> Result<()> {
    if b.is_empty() {
        return param(format!("empty extension box {b:?}"));
    }
    if b.x_hi > s.len() || b.y_hi > s_prime.len() {
        return param(format!(
            "extension box {b:?} exceeds sequence lengths ({}, {})",
            s.len(),
            s_prime.len()
        ));
    }
    Ok(())
}

const DIAG: u8 = 0;
const DEL: u8 = 1;
const INS: u8 = 2;

/// Unit-cost global alignment across `b` with traceback. Ties prefer a
/// diagonal step, then a deletion, then an insertion.
pub fn extend_gap(s: &[u8], s_prime: &[u8], b: &GapBox) -> Result<GapAlignment> {
    check_box(s, s_prime, b)?;
    let a = &s[b.x_lo..b.x_hi];
    let q = &s_prime[b.y_lo..b.y_hi];
    let (rows, cols) = (a.len(), q.len());
    let width = cols + 1;
    let mut dir = vec![0u8; (rows + 1) * width];
    let mut prev: Vec<u32> = (0..=cols as u32).collect();
    let mut cur = vec![0u32; cols + 1];
    dir[1..=cols].fill(INS);
    let mut cells = 0u64;
    for r in 1..=rows {
        cur[0] = r as u32;
        dir[r * width] = DEL;
        for c in 1..=cols {
            cells += 1;
            let diag = prev[c - 1] + (a[r - 1] != q[c - 1]) as u32;
            let del = prev[c] + 1;
            let ins = cur[c - 1] + 1;
            let (v, d) = if diag <= del && diag <= ins {
                (diag, DIAG)
            } else if del <= ins {
                (del, DEL)
            } else {
                (ins, INS)
            };
            cur[c] = v;
            dir[r * width + c] = d;
        }
        std::mem::swap(&mut prev, &mut cur);
    }
    let cost = prev[cols];

    let mut points = Vec::with_capacity(rows + cols + 1);
    let (mut r, mut c) = (rows, cols);
    points.push((b.x_lo + r, b.y_lo + c));
    while r > 0 || c > 0 {
        match dir[r * width + c] {
            DIAG => {
                r -= 1;
                c -= 1
            }
            DEL => r -= 1,
            _ => c -= 1,
        }
        points.push((b.x_lo + r, b.y_lo + c));
    }
    points.reverse();
    Ok(GapAlignment { points, cost, cells })
}

/// Edit distance across `b` without traceback, in two rows of memory.
/// Returns `(cost, cells)`.
pub fn extend_gap_cost(s: &[u8], s_prime: &[u8], b: &GapBox) -> Result<(u32, u64)> {
    check_box(s, s_prime, b)?;
    let a = &s[b.x_lo..b.x_hi];
    let q = &s_prime[b.y_lo..b.y_hi];
    let mut prev: Vec<u32> = (0..=q.len() as u32).collect();
    let mut cur = vec![0u32; q.len() + 1];
    for (r, &x) in a.iter().enumerate() {
        cur[0] = r as u32 + 1;
        for (c, &y) in q.iter().enumerate() {
            cur[c + 1] = (prev[c] + (x != y) as u32).min(prev[c + 1] + 1).min(cur[c] + 1);
        }
        std::mem::swap(&mut prev, &mut cur);
    }
    Ok((prev[q.len()], a.len() as u64 * q.len() as u64))
}

/// Generative region used to size the end extensions.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EndExtension {
    pub p: usize,
    pub m_prime: usize,
}

#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct RuntimeAccounting {
    /// Fenwick-tree steps taken by the chainer (filled in by the caller).
    pub chain_ops: u64,
    /// Sum over gaps of the gap-size products.
    pub ext_cells: u64,
    /// Cells spent on the prefix and suffix boxes.
    pub end_cells: u64,
    pub chain_secs: f64,
    pub ext_secs: f64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GapRecord {
    pub index: usize,
    pub bounds: GapBox,
    pub cells: u64,
    pub cost: u32,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Alignment {
    pub points: Vec<(usize, usize)>,
    pub cost: u64,
    pub gaps: Vec<GapRecord>,
}

impl Alignment {
    /// Run-length `=`/`X`/`I`/`D` string. `I` consumes only S', `D` only S.
    pub fn cigar(&self, s: &[u8], s_prime: &[u8]) -> String {
        let mut out = String::new();
        let mut run: Option<(char, usize)> = None;
        for w in self.points.windows(2) {
            let ((x0, y0), (x1, y1)) = (w[0], w[1]);
            let op = match (x1 - x0, y1 - y0) {
                (1, 1) if s[x1 - 1] == s_prime[y1 - 1] => '=',
                (1, 1) => 'X',
                (0, 1) => 'I',
                _ => 'D',
            };
            run = match run {
                Some((c, n)) if c == op => Some((c, n + 1)),
                Some((c, n)) => {
                    write!(out, "{n}{c}").unwrap();
                    Some((op, 1))
                }
                None => Some((op, 1)),
            };
        }
        if let Some((c, n)) = run {
            write!(out, "{n}{c}").unwrap();
        }
        out
    }

    pub fn write_gap_tsv<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "gap\tx_lo\tx_hi\ty_lo\ty_hi\tcells\tcost")?;
        for g in &self.gaps {
            let b = g.bounds;
            writeln!(w, "{}\t{}\t{}\t{}\t{}\t{}\t{}", g.index, b.x_lo, b.x_hi, b.y_lo, b.y_hi, g.cells, g.cost)?;
        }
        Ok(())
    }
}

fn straight(points: &mut Vec<(usize, usize)>, to: (usize, usize), s: &[u8], s_prime: &[u8]) -> u64 {
    let mut cost = 0;
    let (mut x, mut y) = *points.last().unwrap();
    while (x, y) != to {
        if x < to.0 && y < to.1 {
            x += 1;
            y += 1;
            cost += (s[x - 1] != s_prime[y - 1]) as u64;
        } else if x < to.0 {
            x += 1;
            cost += 1;
        } else {
            y += 1;
            cost += 1;
        }
        points.push((x, y));
    }
    cost
}

fn append_box(points: &mut Vec<(usize, usize)>, s: &[u8], s_prime: &[u8], b: &GapBox) -> Result<(u64, u64)> {
    let gap = extend_gap(s, s_prime, b)?;
    points.extend_from_slice(&gap.points[1..]);
    Ok((gap.cost as u64, gap.cells))
}

fn prefix_box(chain: &Chain, ends: &EndExtension) -> GapBox {
    let a = chain.anchors[0];
    let x_lo = (ends.p + 1).saturating_sub(a.k).min(a.i);
    GapBox { x_lo, x_hi: a.i, y_lo: 0, y_hi: a.j }
}

fn suffix_box(chain: &Chain, ends: &EndExtension, n: usize, m: usize) -> GapBox {
    let a = chain.anchors[chain.anchors.len() - 1];
    let (x_lo, y_lo) = (a.i + a.k - 1, a.j + a.k - 1);
    let x_hi = (ends.p + ends.m_prime + a.k - 1).min(n).max(x_lo);
    GapBox { x_lo, x_hi, y_lo, y_hi: m.max(y_lo) }
}

/// Aligns the span of `chain`: anchor diagonals joined by gap extensions.
///
/// Overlapping consecutive anchors are joined by a straight indel run to the
/// first point of the next diagonal that lies beyond the previous anchor. The
/// points start at `(i_1, j_1)`, or at the prefix corner when `ends` is set.
pub fn full_alignment(
    s: &[u8],
    s_prime: &[u8],
    chain: &Chain,
    ends: Option<EndExtension>,
) -> Result<(Alignment, RuntimeAccounting)> {
    let mut acct = RuntimeAccounting::default();
    let Some(first) = chain.anchors.first() else {
        return Ok((
            Alignment {
                points: Vec::new(),
                cost: 0,
                gaps: Vec::new(),
            },
            acct,
        ));
    };
    crate::chaining::validate_chain(&chain.anchors)?;
    let started = Instant::now();
    let mut points = Vec::new();
    let mut cost = 0u64;

    match ends {
        Some(e) => {
            let b = prefix_box(chain, &e);
            points.push((b.x_lo, b.y_lo));
            if b.cells() > 0 {
                let (c, cells) = append_box(&mut points, s, s_prime, &b)?;
                cost += c;
                acct.end_cells += cells;
            } else {
                cost += straight(&mut points, (first.i, first.j), s, s_prime);
            }
        }
        None => points.push((first.i, first.j)),
    }

    let boxes = gap_boxes(chain);
    let mut gaps = Vec::with_capacity(boxes.len());
    for (l, w) in chain.anchors.windows(2).enumerate() {
        let (a, b) = (w[0], w[1]);
        cost += straight(&mut points, (a.i + a.k - 1, a.j + a.k - 1), s, s_prime);
        let gb = boxes[l];
        let record = if gb.is_empty() {
            let (cx, cy) = (a.i + a.k - 1, a.j + a.k - 1);
            let t = (cx.saturating_sub(b.i)).max(cy.saturating_sub(b.j));
            let c = straight(&mut points, (b.i + t, b.j + t), s, s_prime);
            cost += c;
            GapRecord { index: l + 1, bounds: gb, cells: 0, cost: c as u32 }
        } else {
            let (c, cells) = append_box(&mut points, s, s_prime, &gb)?;
            cost += c;
            acct.ext_cells += cells;
            GapRecord { index: l + 1, bounds: gb, cells, cost: c as u32 }
        };
        gaps.push(record);
    }
    let last = chain.anchors[chain.anchors.len() - 1];
    cost += straight(&mut points, (last.i + last.k - 1, last.j + last.k - 1), s, s_prime);

    if let Some(e) = ends {
        let b = suffix_box(chain, &e, s.len(), s_prime.len());
        if b.cells() > 0 {
            let (c, cells) = append_box(&mut points, s, s_prime, &b)?;
            cost += c;
            acct.end_cells += cells;
        } else {
            cost += straight(&mut points, (b.x_hi, b.y_hi), s, s_prime);
        }
    }
    acct.ext_secs = started.elapsed().as_secs_f64();
    Ok((Alignment { points, cost, gaps }, acct))
}

/// Extension cost and cell counts without building the alignment; this is
/// what the runtime sweep times.
pub fn extension_cost(
    s: &[u8],
    s_prime: &[u8],
    chain: &Chain,
    ends: Option<EndExtension>,
) -> Result<(u64, RuntimeAccounting)> {
    let mut acct = RuntimeAccounting::default();
    if chain.is_empty() {
        return Ok((0, acct));
    }
    let started = Instant::now();
    let mut cost = 0u64;
    for b in gap_boxes(chain) {
        if b.cells() > 0 {
            let (c, cells) = extend_gap_cost(s, s_prime, &b)?;
            cost += c as u64;
            acct.ext_cells += cells;
        }
    }
    if let Some(e) = ends {
        for b in [prefix_box(chain, &e), suffix_box(chain, &e, s.len(), s_prime.len())] {
            if b.cells() > 0 {
                let (c, cells) = extend_gap_cost(s, s_prime, &b)?;
                cost += c as u64;
                acct.end_cells += cells;
            }
        }
    }
    acct.ext_secs = started.elapsed().as_secs_f64();
    Ok((cost, acct))
}

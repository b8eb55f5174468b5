mod common;

use std::collections::{HashMap, HashSet};

use proptest::prelude::*;
use sce::chaining::{optimal_chain_fast, Chain};
use sce::extension::{count_extension_cells, extend_gap, extend_gap_cost, full_alignment, gap_boxes, GapBox};
use sce::recoverability::non_recoverable;
use sce::seeding::{classify_all, find_anchors, index_reference, Anchor, AnchorClass};
use sce::seqgen::build_homologous_path;

use common::{legal_step, random_pair};

/// Plain recursive edit distance with memoisation.
fn edit_distance(a: &[u8], b: &[u8]) -> u32 {
    fn go(a: &[u8], b: &[u8], memo: &mut HashMap<(usize, usize), u32>) -> u32 {
        if a.is_empty() || b.is_empty() {
            return (a.len() + b.len()) as u32;
        }
        if let Some(&v) = memo.get(&(a.len(), b.len())) {
            return v;
        }
        let (x, y) = (&a[..a.len() - 1], &b[..b.len() - 1]);
        let v = (go(x, y, memo) + (a[a.len() - 1] != b[b.len() - 1]) as u32)
            .min(go(x, b, memo) + 1)
            .min(go(a, y, memo) + 1);
        memo.insert((a.len(), b.len()), v);
        v
    }
    go(a, b, &mut HashMap::new())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(3_000))]

    #[test]
    fn gap_matches_recursive_edit_distance(
        s in prop::collection::vec(0u8..3, 1..25),
        q in prop::collection::vec(0u8..3, 1..25),
        lo in (0usize..25, 0usize..25),
        hi in (0usize..25, 0usize..25),
    ) {
        let b = GapBox {
            x_lo: lo.0.min(s.len()),
            x_hi: hi.0.min(s.len()).max(lo.0.min(s.len())),
            y_lo: lo.1.min(q.len()),
            y_hi: hi.1.min(q.len()).max(lo.1.min(q.len())),
        };
        let g = extend_gap(&s, &q, &b).unwrap();
        let want = edit_distance(&s[b.x_lo..b.x_hi], &q[b.y_lo..b.y_hi]);
        prop_assert_eq!(g.cost, want);
        prop_assert_eq!(g.cells, b.cells());
        prop_assert_eq!(extend_gap_cost(&s, &q, &b).unwrap(), (want, b.cells()));
        prop_assert_eq!(g.points[0], (b.x_lo, b.y_lo));
        prop_assert_eq!(*g.points.last().unwrap(), (b.x_hi, b.y_hi));
        let mut recount = 0;
        for w in g.points.windows(2) {
            prop_assert!(legal_step(w[0], w[1]));
            let ((x0, y0), (x1, y1)) = (w[0], w[1]);
            recount += if x1 > x0 && y1 > y0 { (s[x1 - 1] != q[y1 - 1]) as u32 } else { 1 };
        }
        prop_assert_eq!(recount, g.cost);
    }

    #[test]
    fn cells_follow_the_box_formula(steps in prop::collection::vec((1usize..30, 0usize..30), 1..20), k in 1usize..8) {
        let mut anchors = Vec::new();
        let (mut i, mut j) = (0, 1);
        for (di, dj) in steps {
            i += di;
            j += dj;
            anchors.push(Anchor::new(i, j, k));
        }
        let chain = Chain::new(anchors, 0.0).unwrap();
        let by_boxes: u64 = gap_boxes(&chain).iter().map(GapBox::cells).sum();
        let direct: u64 = chain.anchors.windows(2).map(|w| {
            let gx = (w[1].i + 1).saturating_sub(w[0].i + k);
            let gy = (w[1].j + 1).saturating_sub(w[0].j + k);
            (gx * gy) as u64
        }).sum();
        prop_assert_eq!(count_extension_cells(&chain), by_boxes);
        prop_assert_eq!(by_boxes, direct);
    }

    #[test]
    fn sparser_chains_cost_at_least_as_much(
        steps in prop::collection::vec((1usize..20, 0usize..20), 2..25),
        keep in prop::collection::vec(any::<bool>(), 25),
        k in 1usize..10,
    ) {
        let mut anchors = Vec::new();
        let (mut i, mut j) = (0, 1);
        for (di, dj) in steps {
            i += di;
            j += dj;
            anchors.push(Anchor::new(i, j, k));
        }
        let last = anchors.len() - 1;
        let sub: Vec<Anchor> = anchors.iter().enumerate()
            .filter(|&(t, _)| t == 0 || t == last || keep[t])
            .map(|(_, a)| *a)
            .collect();
        let full = Chain::new(anchors, 0.0).unwrap();
        let sparse = Chain::new(sub, 0.0).unwrap();
        prop_assert!(count_extension_cells(&sparse) >= count_extension_cells(&full));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn full_alignment_is_a_legal_path(seed: u64, theta in 0.0..0.3f64, k in 4usize..9) {
        let pair = random_pair(seed, 400, 300, theta, 4);
        let anchors = find_anchors(&index_reference(&pair.s, k).unwrap(), &pair.s_prime);
        let chain = optimal_chain_fast(&anchors, 1.0 / 400.0);
        let (aln, acct) = full_alignment(&pair.s, &pair.s_prime, &chain, None).unwrap();
        if chain.is_empty() {
            prop_assert!(aln.points.is_empty());
            return Ok(());
        }
        let (a, b) = (chain.anchors[0], *chain.last().unwrap());
        prop_assert_eq!(aln.points[0], (a.i, a.j));
        prop_assert_eq!(*aln.points.last().unwrap(), (b.i + b.k - 1, b.j + b.k - 1));
        let mut cost = 0u64;
        for w in aln.points.windows(2) {
            prop_assert!(legal_step(w[0], w[1]));
            let ((x0, y0), (x1, y1)) = (w[0], w[1]);
            cost += if x1 > x0 && y1 > y0 { (pair.s[x1 - 1] != pair.s_prime[y1 - 1]) as u64 } else { 1 };
        }
        prop_assert_eq!(cost, aln.cost);
        prop_assert_eq!(acct.ext_cells, count_extension_cells(&chain));
        // Every anchor's last diagonal point is visited, and the whole
        // diagonal when the anchor does not overlap its predecessor.
        let on: HashSet<_> = aln.points.iter().copied().collect();
        for (t, c) in chain.anchors.iter().enumerate() {
            let overlaps = t > 0 && {
                let p = chain.anchors[t - 1];
                p.i + p.k - 1 > c.i || p.j + p.k - 1 > c.j
            };
            let from = if overlaps { c.k - 1 } else { 0 };
            for d in from..c.k {
                prop_assert!(on.contains(&(c.i + d, c.j + d)), "anchor {:?} point {}", c, d);
            }
        }
        // No alignment of the covered span is cheaper than the optimum.
        let opt = edit_distance_dp(&pair.s[a.i..b.i + b.k - 1], &pair.s_prime[a.j..b.j + b.k - 1]) as u64;
        prop_assert!(aln.cost >= opt);
        let path = build_homologous_path(&pair.script);
        let homologous = classify_all(&anchors, &path);
        let chain_homologous = chain.anchors.iter().all(|c| {
            let t = anchors.anchors.binary_search(c).unwrap();
            homologous[t] == AnchorClass::Homologous
        });
        if chain_homologous && non_recoverable(&path, &pair.s, &pair.s_prime).is_empty() {
            prop_assert_eq!(aln.cost, opt);
        }
    }
}

fn edit_distance_dp(a: &[u8], b: &[u8]) -> u32 {
    let s = a.to_vec();
    let q = b.to_vec();
    extend_gap_cost(&s, &q, &GapBox { x_lo: 0, x_hi: s.len(), y_lo: 0, y_hi: q.len() }).unwrap().0
}

#[test]
fn one_insertion_costs_one() {
    let s = sce::seqgen::dna_to_letters("AC").unwrap();
    let q = sce::seqgen::dna_to_letters("AGC").unwrap();
    let g = extend_gap(&s, &q, &GapBox { x_lo: 0, x_hi: 2, y_lo: 0, y_hi: 3 }).unwrap();
    assert_eq!(g.cost, 1);
    assert_eq!(g.cells, 6);
}

#[test]
fn gap_sizes_three_by_two() {
    for k in 1..10 {
        let chain = Chain::new(vec![Anchor::new(1, 1, k), Anchor::new(k + 3, k + 2, k)], 0.0).unwrap();
        assert_eq!(count_extension_cells(&chain), 6);
    }
}

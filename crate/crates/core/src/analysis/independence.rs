use std::collections::HashMap;

use crate::seeding::Anchor;
use crate::seqgen::CorrespondenceMap;

fn preimage_meets(f: &CorrespondenceMap, x_lo: usize, x_hi: usize, y_lo: usize, y_hi: usize) -> bool {
    f.preimage(y_lo, y_hi).any(|x| x_lo <= x && x <= x_hi)
}

/// Sufficient condition for the match events of two anchors to be
/// independent: the anchors are `k` apart on some axis and one of them does
/// not overlap the correspondence preimage of the other's query window.
pub fn check_anchor_independence(a: &Anchor, b: &Anchor, f: &CorrespondenceMap) -> bool {
    let k = a.k;
    let (i, j, h, l) = (a.i, a.j, b.i, b.j);
    let apart = i.abs_diff(h) >= k || j.abs_diff(l) >= k;
    let disjoint = !preimage_meets(f, i, i + k - 1, l, l + k - 1) || !preimage_meets(f, h, h + k - 1, j, j + k - 1);
    apart && disjoint
}

/// The letter comparisons `(x, y)` an anchor asserts.
pub fn anchor_match_vars(a: &Anchor) -> impl Iterator<Item = (usize, usize)> + '_ {
    (0..a.k).map(move |t| (a.i + t, a.j + t))
}

struct Dsu {
    parent: Vec<usize>,
}

impl Dsu {
    fn find(&mut self, mut v: usize) -> usize {
        while self.parent[v] != v {
            self.parent[v] = self.parent[self.parent[v]];
            v = self.parent[v];
        }
        v
    }

    /// Returns false when `a` and `b` were already connected.
    fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        self.parent[ra] = rb;
        true
    }
}

/// Whether the bipartite graph on S and S' positions, with an edge for each
/// match variable and each correspondence pair `(x, f(x))`, is a forest.
/// Parallel edges count once.
pub fn match_graph_acyclic(match_vars: &[(usize, usize)], f: &CorrespondenceMap) -> bool {
    let mut ids: HashMap<(bool, usize), usize> = HashMap::new();
    fn id(ids: &mut HashMap<(bool, usize), usize>, v: (bool, usize)) -> usize {
        let next = ids.len();
        *ids.entry(v).or_insert(next)
    }
    let mut edges: Vec<(usize, usize)> = match_vars
        .iter()
        .map(|&(x, y)| (id(&mut ids, (false, x)), id(&mut ids, (true, y))))
        .collect();
    for &(x, _) in match_vars {
        if let Some(y) = f.forward(x) {
            if let Some(&target) = ids.get(&(true, y)) {
                edges.push((ids[&(false, x)], target));
            }
        }
    }
    edges.sort_unstable();
    edges.dedup();
    let mut dsu = Dsu {
        parent: (0..ids.len()).collect(),
    };
    edges.into_iter().all(|(a, b)| dsu.union(a, b))
}

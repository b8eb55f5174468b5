use super::EditScript;

/// The true alignment between S and S' as a monotone lattice path.
///
/// Points with equal `x` are contiguous in `points` and have consecutive `y`
/// values, so membership is answered from a per-column `y` range.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HomologousPath {
    points: Vec<(usize, usize)>,
    p: usize,
    /// `columns[x - p]` is the inclusive `y` range of points with that `x`.
    columns: Vec<(usize, usize)>,
}

impl HomologousPath {
    /// Wraps a point list. Panics if the list is empty or has an illegal step.
    pub fn from_points(points: Vec<(usize, usize)>) -> Self {
        assert!(!points.is_empty(), "a homologous path has at least its origin");
        let p = points[0].0;
        let last_x = points.last().unwrap().0;
        let mut columns = vec![(usize::MAX, 0); last_x - p + 1];
        for w in points.windows(2) {
            let (dx, dy) = (w[1].0 - w[0].0, w[1].1 - w[0].1);
            assert!(
                matches!((dx, dy), (1, 1) | (0, 1) | (1, 0)),
                "illegal step {:?} -> {:?}",
                w[0],
                w[1]
            );
        }
        for &(x, y) in &points {
            let col = &mut columns[x - p];
            col.0 = col.0.min(y);
            col.1 = col.1.max(y);
        }
        HomologousPath { points, p, columns }
    }

    pub fn points(&self) -> &[(usize, usize)] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn first(&self) -> (usize, usize) {
        self.points[0]
    }

    pub fn last(&self) -> (usize, usize) {
        *self.points.last().unwrap()
    }

    /// Inclusive `y` range of the points in column `x`.
    pub fn column(&self, x: usize) -> Option<(usize, usize)> {
        if x < self.p {
            return None;
        }
        self.columns.get(x - self.p).copied()
    }

    pub fn contains(&self, x: usize, y: usize) -> bool {
        match self.column(x) {
            Some((lo, hi)) => lo <= y && y <= hi,
            None => false,
        }
    }

    /// Number of path points in `[x_lo, x_hi] × [y_lo, y_hi]`.
    pub fn count_in_box(&self, x_lo: usize, x_hi: usize, y_lo: usize, y_hi: usize) -> usize {
        (x_lo..=x_hi)
            .filter_map(|x| self.column(x))
            .map(|(lo, hi)| {
                let a = lo.max(y_lo);
                let b = hi.min(y_hi);
                if a <= b {
                    b - a + 1
                } else {
                    0
                }
            })
            .sum()
    }

    /// Index of the first point with `x >= x0` (points are sorted by `x`).
    pub fn lower_bound_x(&self, x0: usize) -> usize {
        self.points.partition_point(|&(x, _)| x < x0)
    }
}

/// Builds the homologous path by appending points for each generative
/// position according to its insertion and deletion events. Substitutions do
/// not bend the path.
pub fn build_homologous_path(script: &EditScript) -> HomologousPath {
    let mut points = Vec::with_capacity(script.m_prime() + script.inserted_len() + 1);
    let (mut i, mut j) = (script.p, 0usize);
    points.push((i, j));
    for rec in &script.records {
        let ins = rec.inserted.len();
        for t in 1..=ins {
            points.push((i, j + t));
        }
        j += ins;
        if rec.deleted {
            i += 1;
        } else {
            i += 1;
            j += 1;
        }
        points.push((i, j));
    }
    HomologousPath::from_points(points)
}

/// Position correspondence between S and S'.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CorrespondenceMap {
    p: usize,
    n: usize,
    forward: Vec<Option<usize>>,
    inverse: Vec<Option<usize>>,
}

impl CorrespondenceMap {
    /// `f(x)`: the largest `y` with `(x, y)` on the path, or `None` for
    /// positions outside the generative region and deleted positions.
    pub fn forward(&self, x: usize) -> Option<usize> {
        if x > self.p && x <= self.p + self.forward.len() {
            self.forward[x - self.p - 1]
        } else {
            None
        }
    }

    /// The unique `x` with `f(x) = y`, if any.
    pub fn inverse(&self, y: usize) -> Option<usize> {
        if y >= 1 && y <= self.inverse.len() {
            self.inverse[y - 1]
        } else {
            None
        }
    }

    /// Reference positions whose image lies in `[y_lo, y_hi]`.
    pub fn preimage(&self, y_lo: usize, y_hi: usize) -> impl Iterator<Item = usize> + '_ {
        let lo = y_lo.max(1);
        let hi = y_hi.min(self.inverse.len());
        (lo..=hi).filter_map(move |y| self.inverse(y))
    }

    pub fn reference_len(&self) -> usize {
        self.n
    }

    pub fn query_len(&self) -> usize {
        self.inverse.len()
    }
}

/// Builds `f` and its inverse from a path and the script that produced it.
/// `n` is the reference length (positions past the generative region map to
/// `None`).
pub fn correspondence(path: &HomologousPath, script: &EditScript, n: usize) -> CorrespondenceMap {
    let p = script.p;
    let m = path.last().1;
    let mut forward = vec![None; script.m_prime()];
    let mut inverse = vec![None; m];
    for (j, rec) in script.records.iter().enumerate() {
        if rec.deleted {
            continue;
        }
        let x = p + j + 1;
        if let Some((_, y)) = path.column(x) {
            forward[j] = Some(y);
            inverse[y - 1] = Some(x);
        }
    }
    CorrespondenceMap { p, n, forward, inverse }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::seqgen::{mutate, worked_example, MutationParams};
    use crate::rng::rng_from_seed;

    #[test]
    fn diagonal_path_for_an_unmutated_script() {
        let path = build_homologous_path(&EditScript::unmutated(0, 3));
        assert_eq!(path.points(), &[(0, 0), (1, 1), (2, 2), (3, 3)]);
    }

    #[test]
    fn worked_example_path_and_map() {
        let pair = worked_example();
        let path = build_homologous_path(&pair.script);
        assert_eq!(
            path.points(),
            &[(0, 0), (1, 1), (2, 2), (3, 3), (3, 4), (4, 5), (5, 5), (6, 6), (7, 7), (8, 8)]
        );
        let f = correspondence(&path, &pair.script, pair.n());
        assert_eq!(f.forward(4), Some(5));
        assert_eq!(f.forward(5), None);
        assert_eq!(f.inverse(5), Some(4));
        assert_eq!(f.forward(9), None);
    }

    #[test]
    fn insertion_plus_deletion_case() {
        let mut script = EditScript::unmutated(2, 3);
        script.records[1].inserted = vec![0, 1];
        script.records[1].deleted = true;
        let path = build_homologous_path(&script);
        assert_eq!(path.points(), &[(2, 0), (3, 1), (3, 2), (3, 3), (4, 3), (5, 4)]);
    }

    #[test]
    fn identity_map_is_the_diagonal() {
        let p = 4;
        let script = EditScript::unmutated(p, 6);
        let path = build_homologous_path(&script);
        let f = correspondence(&path, &script, 20);
        for j in 1..=6 {
            assert_eq!(f.forward(p + j), Some(j));
        }
        assert_eq!(f.forward(p), None);
        assert_eq!(f.forward(p + 7), None);
    }

    #[test]
    fn box_counts_match_enumeration() {
        let s = crate::seqgen::generate_reference(300, 4, &mut rng_from_seed(1)).unwrap();
        let params = MutationParams::new(0.05, 0.1, 0.1, 0.5, 0.5, 4).unwrap();
        let pair = mutate(&s, 20, 250, &params, &mut rng_from_seed(2)).unwrap();
        let path = build_homologous_path(&pair.script);
        for (x0, y0) in [(20, 0), (50, 40), (100, 90), (260, 250)] {
            let expected = path
                .points()
                .iter()
                .filter(|&&(x, y)| x0 <= x && x <= x0 + 9 && y0 <= y && y <= y0 + 9)
                .count();
            assert_eq!(path.count_in_box(x0, x0 + 9, y0, y0 + 9), expected);
        }
    }
}

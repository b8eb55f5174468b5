//! Exact k-mer index, anchor enumeration and anchor classification.

use std::fmt;
use std::io::Write;

use rand::Rng;

use crate::error::{param, Result};
use crate::seqgen::HomologousPath;

/// Sorted table of `(window code, start)` pairs over every k-window of S.
///
/// Windows are packed `bits` bits per letter into a `u64`. When a window does
/// not fit, the code keeps only its trailing letters and candidate hits are
/// confirmed by comparing the letters.
#[derive(Debug, Clone)]
pub struct KmerIndex {
    k: usize,
    bits: u32,
    exact: bool,
    table: Vec<(u64, u32)>,
    s: Vec<u8>,
}

fn bits_for(sigma: usize) -> u32 {
    usize::BITS - (sigma.max(2) - 1).leading_zeros()
}

/// Rolling codes of every k-window of `seq`; `codes[t]` covers `seq[t..t+k]`.
fn window_codes(seq: &[u8], k: usize, bits: u32) -> impl Iterator<Item = u64> + '_ {
    let mask = if bits as usize * k >= 64 {
        u64::MAX
    } else {
        (1u64 << (bits as usize * k)) - 1
    };
    let mut code = 0u64;
    seq.iter().enumerate().filter_map(move |(t, &c)| {
        code = (code.wrapping_shl(bits) | c as u64) & mask;
        (t + 1 >= k).then_some(code)
    })
}

impl KmerIndex {
    pub fn k(&self) -> usize {
        self.k
    }

    pub fn reference(&self) -> &[u8] {
        &self.s
    }

    /// Sorted 1-based start positions of `window` in S.
    pub fn occurrences(&self, window: &[u8]) -> Vec<usize> {
        if window.len() != self.k {
            return Vec::new();
        }
        let code = window_codes(window, self.k, self.bits).next().unwrap();
        self.lookup(code, window, !self.exact || !self.encodable(window))
    }

    fn encodable(&self, seq: &[u8]) -> bool {
        seq.iter().all(|&c| (c as u64) >> self.bits == 0)
    }

    fn lookup(&self, code: u64, window: &[u8], verify: bool) -> Vec<usize> {
        let lo = self.table.partition_point(|&(c, _)| c < code);
        let hi = lo + self.table[lo..].partition_point(|&(c, _)| c == code);
        self.table[lo..hi]
            .iter()
            .map(|&(_, pos)| pos as usize)
            .filter(|&i| !verify || &self.s[i - 1..i - 1 + self.k] == window)
            .collect()
    }
}

pub fn index_reference(s: &[u8], k: usize) -> Result<KmerIndex> {
    if k == 0 || k > s.len() {
        return param(format!("seed length must lie in 1..={}, got {k}", s.len()));
    }
    if s.len() > u32::MAX as usize {
        return param("reference longer than 2^32 letters");
    }
    let sigma = s.iter().copied().max().unwrap_or(0) as usize + 1;
    let bits = bits_for(sigma.max(4));
    let mut table: Vec<(u64, u32)> = window_codes(s, k, bits)
        .enumerate()
        .map(|(t, code)| (code, t as u32 + 1))
        .collect();
    table.sort_unstable();
    Ok(KmerIndex {
        k,
        bits,
        exact: bits as usize * k <= 64,
        table,
        s: s.to_vec(),
    })
}

/// An exact match of length `k` between `S[i..]` and `S'[j..]` (1-based).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Anchor {
    pub i: usize,
    pub j: usize,
    pub k: usize,
}

impl Anchor {
    pub fn new(i: usize, j: usize, k: usize) -> Self {
        Anchor { i, j, k }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AnchorSet {
    pub k: usize,
    /// Sorted by `(i, j)`.
    pub anchors: Vec<Anchor>,
}

impl AnchorSet {
    pub fn len(&self) -> usize {
        self.anchors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.anchors.is_empty()
    }

    /// Builds a set from raw start pairs, sorting and deduplicating them.
    pub fn from_pairs(k: usize, pairs: impl IntoIterator<Item = (usize, usize)>) -> Self {
        let mut anchors: Vec<Anchor> = pairs.into_iter().map(|(i, j)| Anchor::new(i, j, k)).collect();
        anchors.sort_unstable();
        anchors.dedup();
        AnchorSet { k, anchors }
    }
}

pub fn find_anchors(index: &KmerIndex, s_prime: &[u8]) -> AnchorSet {
    let k = index.k;
    let verify = !index.exact || !index.encodable(s_prime);
    let mut anchors = Vec::new();
    for (t, code) in window_codes(s_prime, k, index.bits).enumerate() {
        let j = t + 1;
        for i in index.lookup(code, &s_prime[t..t + k], verify) {
            anchors.push(Anchor::new(i, j, k));
        }
    }
    anchors.sort_unstable();
    AnchorSet { k, anchors }
}

/// O(nm) scan used to check [`find_anchors`].
pub fn brute_force_anchors(s: &[u8], s_prime: &[u8], k: usize) -> AnchorSet {
    let mut anchors = Vec::new();
    if k > 0 && k <= s.len() && k <= s_prime.len() {
        for i in 1..=s.len() - k + 1 {
            for j in 1..=s_prime.len() - k + 1 {
                if s[i - 1..i - 1 + k] == s_prime[j - 1..j - 1 + k] {
                    anchors.push(Anchor::new(i, j, k));
                }
            }
        }
    }
    AnchorSet { k, anchors }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum AnchorClass {
    Homologous,
    Clipping,
    Spurious,
}

impl fmt::Display for AnchorClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            AnchorClass::Homologous => "homologous",
            AnchorClass::Clipping => "clipping",
            AnchorClass::Spurious => "spurious",
        })
    }
}

/// Compares the anchor's diagonal `A` with the path points `B` inside the
/// anchor's `k × k` bounding box.
pub fn classify_anchor(a: &Anchor, path: &HomologousPath) -> AnchorClass {
    let on_path = (0..a.k).filter(|&t| path.contains(a.i + t, a.j + t)).count();
    if on_path == 0 {
        return AnchorClass::Spurious;
    }
    let in_box = path.count_in_box(a.i, a.i + a.k - 1, a.j, a.j + a.k - 1);
    if on_path == a.k && in_box == a.k {
        AnchorClass::Homologous
    } else {
        AnchorClass::Clipping
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct ClassCounts {
    pub homologous: usize,
    pub clipping: usize,
    pub spurious: usize,
}

impl ClassCounts {
    pub fn total(&self) -> usize {
        self.homologous + self.clipping + self.spurious
    }
}

pub fn classify_all(anchors: &AnchorSet, path: &HomologousPath) -> Vec<AnchorClass> {
    anchors.anchors.iter().map(|a| classify_anchor(a, path)).collect()
}

pub fn count_by_class(anchors: &AnchorSet, path: &HomologousPath) -> ClassCounts {
    let mut counts = ClassCounts::default();
    for a in &anchors.anchors {
        match classify_anchor(a, path) {
            AnchorClass::Homologous => counts.homologous += 1,
            AnchorClass::Clipping => counts.clipping += 1,
            AnchorClass::Spurious => counts.spurious += 1,
        }
    }
    counts
}

pub fn write_anchor_csv<W: Write>(mut w: W, anchors: &AnchorSet, path: &HomologousPath) -> Result<()> {
    writeln!(w, "i,j,k,class")?;
    for a in &anchors.anchors {
        writeln!(w, "{},{},{},{}", a.i, a.j, a.k, classify_anchor(a, path))?;
    }
    Ok(())
}

/// Draws `draws` pairs of independent uniform k-windows and returns how many
/// matched letter for letter.
pub fn count_random_window_matches<R: Rng + ?Sized>(sigma: u8, k: usize, draws: u64, rng: &mut R) -> u64 {
    let mut a = vec![0u8; k];
    let mut b = vec![0u8; k];
    let mut hits = 0;
    for _ in 0..draws {
        for t in 0..k {
            a[t] = rng.random_range(0..sigma);
            b[t] = rng.random_range(0..sigma);
        }
        hits += (a == b) as u64;
    }
    hits
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::seqgen::{build_homologous_path, dna_to_letters, worked_example};

    #[test]
    fn uniform_string_windows() {
        let idx = index_reference(&dna_to_letters("AAAA").unwrap(), 2).unwrap();
        assert_eq!(idx.occurrences(&[0, 0]), vec![1, 2, 3]);
    }

    #[test]
    fn worked_reference_window() {
        let idx = index_reference(&dna_to_letters("TACTTCGC").unwrap(), 3).unwrap();
        assert_eq!(idx.occurrences(&dna_to_letters("ACT").unwrap()), vec![2]);
    }

    #[test]
    fn k_larger_than_reference_is_rejected() {
        assert!(index_reference(&[0, 1], 3).is_err());
        assert!(index_reference(&[0, 1], 0).is_err());
    }

    #[test]
    fn self_match_at_full_length() {
        let s = dna_to_letters("GATTACA").unwrap();
        let idx = index_reference(&s, s.len()).unwrap();
        let set = find_anchors(&idx, &s);
        assert_eq!(set.anchors, vec![Anchor::new(1, 1, 7)]);
    }

    #[test]
    fn worked_example_classes() {
        let pair = worked_example();
        let path = build_homologous_path(&pair.script);
        let set = find_anchors(&index_reference(&pair.s, 3).unwrap(), &pair.s_prime);
        for (i, j, class) in [
            (1, 1, AnchorClass::Homologous),
            (3, 3, AnchorClass::Clipping),
            (1, 6, AnchorClass::Spurious),
        ] {
            let a = Anchor::new(i, j, 3);
            assert!(set.anchors.contains(&a), "missing {a:?}");
            assert_eq!(classify_anchor(&a, &path), class);
        }
    }

    #[test]
    fn long_windows_are_verified() {
        // 40 letters at 2 bits overflow a u64 code.
        let mut s: Vec<u8> = (0..200).map(|t| ((t * 7 + t / 3) % 4) as u8).collect();
        s.extend(std::iter::repeat_n(1, 50));
        let q = s[100..180].to_vec();
        let idx = index_reference(&s, 40).unwrap();
        assert_eq!(find_anchors(&idx, &q), brute_force_anchors(&s, &q, 40));
    }
}

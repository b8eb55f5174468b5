//! Random references, the indel+substitution mutation channel, and the
//! ground-truth structures derived from its edit history.
//!
//! Sequences are stored as `Vec<u8>` of letters `0..sigma`, but every
//! position in the public API is 1-based: letter `x` of `s` is `s[x - 1]`.
//! Path points `(x, y)` pair "consumed `x` letters of S" with "consumed `y`
//! letters of S'"; a diagonal step into `(x, y)` aligns `S[x]` with `S'[y]`.

mod io;
mod path;

pub use io::{
    dna_to_letters, letters_to_dna, read_edit_script, read_fasta, write_edit_script, write_fasta,
    FastaRecord,
};
pub use path::{build_homologous_path, correspondence, CorrespondenceMap, HomologousPath};

use rand::Rng;
use rand_distr::{Distribution, Geometric};

use crate::error::{param, Result};

/// Total mutation rate above which the channel leaves the proven regime.
pub const STRICT_THETA_LIMIT: f64 = 0.159;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MutationParams {
    pub theta_s: f64,
    pub theta_d: f64,
    pub theta_i: f64,
    /// Geometric insertion-length parameter: `Pr(L = l) = (1 - rho_i) rho_i^(l-1)`.
    pub rho_i: f64,
    /// Upper bound on `rho_i`.
    pub gamma: f64,
    pub sigma: u8,
    /// Enforce `theta_total < 0.159` and `rho_i < gamma` strictly.
    pub strict: bool,
}

impl MutationParams {
    pub fn new(theta_s: f64, theta_d: f64, theta_i: f64, rho_i: f64, gamma: f64, sigma: u8) -> Result<Self> {
        let params = MutationParams {
            theta_s,
            theta_d,
            theta_i,
            rho_i,
            gamma,
            sigma,
            strict: false,
        };
        params.validate()?;
        Ok(params)
    }

    /// Error-free channel over a `sigma`-letter alphabet.
    pub fn identity(sigma: u8) -> Self {
        MutationParams {
            theta_s: 0.0,
            theta_d: 0.0,
            theta_i: 0.0,
            rho_i: 0.0,
            gamma: 0.5,
            sigma,
            strict: false,
        }
    }

    pub fn strict(mut self) -> Result<Self> {
        self.strict = true;
        self.validate()?;
        Ok(self)
    }

    pub fn theta_total(&self) -> f64 {
        self.theta_s + self.theta_d + self.theta_i
    }

    pub fn validate(&self) -> Result<()> {
        if self.sigma < 2 {
            return param(format!("alphabet size must be at least 2, got {}", self.sigma));
        }
        for (name, v) in [("theta_s", self.theta_s), ("theta_d", self.theta_d), ("theta_i", self.theta_i)] {
            if !(0.0..1.0).contains(&v) {
                return param(format!("{name} must lie in [0, 1), got {v}"));
            }
        }
        let total = self.theta_total();
        if total >= 1.0 {
            return param(format!("total mutation rate must be below 1, got {total}"));
        }
        if self.strict && total >= STRICT_THETA_LIMIT {
            return param(format!(
                "strict mode requires total mutation rate below {STRICT_THETA_LIMIT}, got {total}"
            ));
        }
        if !(self.gamma > 0.0 && self.gamma < 1.0) {
            return param(format!("gamma must lie in (0, 1), got {}", self.gamma));
        }
        if !(0.0..1.0).contains(&self.rho_i) {
            return param(format!("rho_i must lie in [0, 1), got {}", self.rho_i));
        }
        let bounded = if self.strict { self.rho_i < self.gamma } else { self.rho_i <= self.gamma };
        if !bounded {
            return param(format!("rho_i = {} exceeds gamma = {}", self.rho_i, self.gamma));
        }
        Ok(())
    }
}

/// Events at one generative position.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct EditRecord {
    /// Letters inserted to the left of the position.
    pub inserted: Vec<u8>,
    pub deleted: bool,
    /// Replacement letter; never set together with `deleted`.
    pub substituted: Option<u8>,
}

impl EditRecord {
    pub fn is_mutated(&self) -> bool {
        !self.inserted.is_empty() || self.deleted || self.substituted.is_some()
    }
}

/// Ground-truth edit history of `S[p+1 ..= p+m']`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EditScript {
    /// Number of reference letters before the generative region.
    pub p: usize,
    /// `records[j - 1]` describes reference position `p + j`.
    pub records: Vec<EditRecord>,
}

impl EditScript {
    /// A script with no events.
    pub fn unmutated(p: usize, m_prime: usize) -> Self {
        EditScript {
            p,
            records: vec![EditRecord::default(); m_prime],
        }
    }

    pub fn m_prime(&self) -> usize {
        self.records.len()
    }

    /// Record for absolute reference position `x` (1-based), if generative.
    pub fn record_at(&self, x: usize) -> Option<&EditRecord> {
        if x > self.p && x <= self.p + self.records.len() {
            Some(&self.records[x - self.p - 1])
        } else {
            None
        }
    }

    pub fn record_at_mut(&mut self, x: usize) -> Option<&mut EditRecord> {
        if x > self.p && x <= self.p + self.records.len() {
            Some(&mut self.records[x - self.p - 1])
        } else {
            None
        }
    }

    pub fn deletions(&self) -> usize {
        self.records.iter().filter(|r| r.deleted).count()
    }

    pub fn inserted_len(&self) -> usize {
        self.records.iter().map(|r| r.inserted.len()).sum()
    }

    /// Length of the channel output.
    pub fn output_len(&self) -> usize {
        self.m_prime() - self.deletions() + self.inserted_len()
    }

    /// Checks the script against the reference it claims to edit.
    pub fn validate(&self, s: &[u8]) -> Result<()> {
        if self.p + self.m_prime() > s.len() {
            return param(format!(
                "generative region {}..={} exceeds reference length {}",
                self.p + 1,
                self.p + self.m_prime(),
                s.len()
            ));
        }
        for (j, rec) in self.records.iter().enumerate() {
            let x = self.p + j + 1;
            if let Some(to) = rec.substituted {
                if rec.deleted {
                    return param(format!("position {x} is both deleted and substituted"));
                }
                if to == s[x - 1] {
                    return param(format!("substitution at position {x} keeps the original letter"));
                }
            }
        }
        Ok(())
    }

    /// Replays the script on `s`, producing the mutated substring.
    pub fn apply(&self, s: &[u8]) -> Result<Vec<u8>> {
        self.validate(s)?;
        let mut out = Vec::with_capacity(self.output_len());
        for (j, rec) in self.records.iter().enumerate() {
            out.extend_from_slice(&rec.inserted);
            if !rec.deleted {
                out.push(rec.substituted.unwrap_or(s[self.p + j]));
            }
        }
        Ok(out)
    }
}

/// A reference, its mutated substring and the edit history linking them.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SequencePair {
    pub s: Vec<u8>,
    pub s_prime: Vec<u8>,
    pub script: EditScript,
}

impl SequencePair {
    pub fn n(&self) -> usize {
        self.s.len()
    }

    pub fn m(&self) -> usize {
        self.s_prime.len()
    }
}

pub fn generate_reference<R: Rng + ?Sized>(n: usize, sigma: u8, rng: &mut R) -> Result<Vec<u8>> {
    if n == 0 {
        return param("reference length must be at least 1");
    }
    if sigma < 2 {
        return param(format!("alphabet size must be at least 2, got {sigma}"));
    }
    Ok((0..n).map(|_| rng.random_range(0..sigma)).collect())
}

/// Passes `S[p+1 ..= p+m']` through the channel.
///
/// At each position the insertion, deletion and substitution coins are drawn
/// independently and in that order. The inserted string goes to the left of
/// the position; a deletion makes a simultaneous substitution moot, so it is
/// not recorded.
pub fn mutate<R: Rng + ?Sized>(
    s: &[u8],
    p: usize,
    m_prime: usize,
    params: &MutationParams,
    rng: &mut R,
) -> Result<SequencePair> {
    params.validate()?;
    if p + m_prime > s.len() {
        return param(format!(
            "generative region {}..={} exceeds reference length {}",
            p + 1,
            p + m_prime,
            s.len()
        ));
    }
    let sigma = params.sigma;
    let lengths = Geometric::new(1.0 - params.rho_i)
        .map_err(|e| crate::Error::Param(format!("insertion length distribution: {e}")))?;

    let mut records = Vec::with_capacity(m_prime);
    for j in 0..m_prime {
        let original = s[p + j];
        let mut rec = EditRecord::default();
        if rng.random::<f64>() < params.theta_i {
            let len = 1 + lengths.sample(rng) as usize;
            rec.inserted = (0..len).map(|_| rng.random_range(0..sigma)).collect();
        }
        rec.deleted = rng.random::<f64>() < params.theta_d;
        if rng.random::<f64>() < params.theta_s {
            let shift = rng.random_range(1..sigma);
            if !rec.deleted {
                rec.substituted = Some(((original as u16 + shift as u16) % sigma as u16) as u8);
            }
        }
        records.push(rec);
    }

    let script = EditScript { p, records };
    let s_prime = script.apply(s)?;
    Ok(SequencePair {
        s: s.to_vec(),
        s_prime,
        script,
    })
}

/// The reference, query and script of the TACTTCGC → TACTTTAC example used
/// throughout the documentation and tests.
pub fn worked_example() -> SequencePair {
    let s = dna_to_letters("TACTTCGC").expect("static DNA");
    let mut script = EditScript::unmutated(0, 8);
    script.records[3].inserted = dna_to_letters("T").unwrap();
    script.records[4].deleted = true;
    script.records[5].substituted = Some(dna_to_letters("T").unwrap()[0]);
    script.records[6].substituted = Some(dna_to_letters("A").unwrap()[0]);
    let s_prime = script.apply(&s).expect("worked example is consistent");
    SequencePair { s, s_prime, script }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::rng_from_seed;

    #[test]
    fn reference_is_deterministic_and_in_range() {
        let a = generate_reference(1, 4, &mut rng_from_seed(3)).unwrap();
        assert_eq!(a.len(), 1);
        assert!(a[0] < 4);
        let x = generate_reference(500, 4, &mut rng_from_seed(11)).unwrap();
        let y = generate_reference(500, 4, &mut rng_from_seed(11)).unwrap();
        assert_eq!(x, y);
    }

    #[test]
    fn reference_rejects_bad_parameters() {
        assert!(generate_reference(0, 4, &mut rng_from_seed(1)).is_err());
        assert!(generate_reference(10, 1, &mut rng_from_seed(1)).is_err());
    }

    #[test]
    fn letter_frequencies_are_uniform() {
        let s = generate_reference(1_000_000, 4, &mut rng_from_seed(2024)).unwrap();
        let mut counts = [0usize; 4];
        for &c in &s {
            counts[c as usize] += 1;
        }
        for c in counts {
            let f = c as f64 / s.len() as f64;
            assert!((f - 0.25).abs() < 0.005, "frequency {f}");
        }
    }

    #[test]
    fn identity_channel_copies_the_region() {
        let s = generate_reference(100, 4, &mut rng_from_seed(5)).unwrap();
        let pair = mutate(&s, 10, 50, &MutationParams::identity(4), &mut rng_from_seed(6)).unwrap();
        assert_eq!(pair.s_prime, s[10..60].to_vec());
        assert!(pair.script.records.iter().all(|r| !r.is_mutated()));
    }

    #[test]
    fn worked_example_replays() {
        let pair = worked_example();
        assert_eq!(letters_to_dna(&pair.s_prime), "TACTTTAC");
    }

    #[test]
    fn mutate_rejects_out_of_bounds_region() {
        let s = vec![0u8; 10];
        let err = mutate(&s, 5, 6, &MutationParams::identity(4), &mut rng_from_seed(1));
        assert!(err.is_err());
    }

    #[test]
    fn params_validation() {
        assert!(MutationParams::new(0.05, 0.05, 0.05, 0.5, 0.5, 4).is_ok());
        assert!(MutationParams::new(0.5, 0.3, 0.3, 0.1, 0.5, 4).is_err());
        assert!(MutationParams::new(0.05, 0.05, 0.05, 0.6, 0.5, 4).is_err());
        assert!(MutationParams::new(0.05, 0.05, 0.05, 0.1, 1.0, 4).is_err());
        let at_gamma = MutationParams::new(0.05, 0.05, 0.05, 0.5, 0.5, 4).unwrap();
        assert!(at_gamma.strict().is_err());
        let hot = MutationParams::new(0.06, 0.06, 0.06, 0.1, 0.5, 4).unwrap();
        assert!(hot.strict().is_err());
    }

    #[test]
    fn deletion_only_length_is_binomial() {
        let m_prime = 100_000;
        let s = generate_reference(m_prime, 4, &mut rng_from_seed(8)).unwrap();
        let params = MutationParams::new(0.0, 0.1, 0.0, 0.0, 0.5, 4).unwrap();
        let pair = mutate(&s, 0, m_prime, &params, &mut rng_from_seed(9)).unwrap();
        // Binomial(m', 0.9): mean 90000, sd sqrt(m' * 0.9 * 0.1) ≈ 94.9
        let mean = 0.9 * m_prime as f64;
        let sd = (m_prime as f64 * 0.9 * 0.1).sqrt();
        assert!((pair.m() as f64 - mean).abs() <= 3.0 * sd, "m = {}", pair.m());
    }

    #[test]
    fn insertion_lengths_are_geometric() {
        let rho = 0.6;
        let m_prime = 300_000;
        let s = generate_reference(m_prime, 4, &mut rng_from_seed(10)).unwrap();
        let params = MutationParams::new(0.0, 0.0, 0.5, rho, 0.6, 4).unwrap();
        let pair = mutate(&s, 0, m_prime, &params, &mut rng_from_seed(12)).unwrap();
        let lens: Vec<usize> = pair
            .script
            .records
            .iter()
            .filter(|r| !r.inserted.is_empty())
            .map(|r| r.inserted.len())
            .collect();
        assert!(lens.len() >= 100_000);
        let mean = lens.iter().sum::<usize>() as f64 / lens.len() as f64;
        let expected = 1.0 / (1.0 - rho);
        assert!((mean - expected).abs() / expected < 0.02, "mean {mean}");
    }

    #[test]
    fn substitutions_change_the_letter() {
        let s = generate_reference(5000, 4, &mut rng_from_seed(13)).unwrap();
        let params = MutationParams::new(0.3, 0.0, 0.0, 0.0, 0.5, 4).unwrap();
        let pair = mutate(&s, 0, 5000, &params, &mut rng_from_seed(14)).unwrap();
        for (j, rec) in pair.script.records.iter().enumerate() {
            if let Some(to) = rec.substituted {
                assert_ne!(to, s[j]);
            }
        }
    }
}

#![allow(dead_code)]

use sce::rng::rng_from_seed;
use sce::seqgen::{generate_reference, mutate, MutationParams, SequencePair};

/// A random mutated pair with rates split evenly and the whole reference as
/// the generative region unless `m_prime` is smaller.
pub fn random_pair(seed: u64, n: usize, m_prime: usize, theta: f64, sigma: u8) -> SequencePair {
    let mut rng = rng_from_seed(seed);
    let s = generate_reference(n, sigma, &mut rng).unwrap();
    let p = (seed as usize) % (n - m_prime + 1);
    let params = MutationParams::new(theta / 3.0, theta / 3.0, theta / 3.0, 0.5, 0.5, sigma).unwrap();
    mutate(&s, p, m_prime, &params, &mut rng).unwrap()
}

pub fn legal_step(a: (usize, usize), b: (usize, usize)) -> bool {
    matches!((b.0 as i64 - a.0 as i64, b.1 as i64 - a.1 as i64), (1, 0) | (0, 1) | (1, 1))
}

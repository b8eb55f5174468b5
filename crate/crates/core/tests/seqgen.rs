mod common;

use std::collections::HashSet;

use proptest::prelude::*;
use sce::rng::rng_from_seed;
use sce::seqgen::{
    build_homologous_path, correspondence, generate_reference, mutate, read_edit_script, read_fasta,
    write_edit_script, write_fasta, EditScript, FastaRecord, MutationParams,
};

use common::legal_step;

/// Builds S' straight from the records, without `EditScript::apply`.
fn oracle_apply(s: &[u8], script: &EditScript) -> Vec<u8> {
    let mut out = Vec::new();
    for (t, r) in script.records.iter().enumerate() {
        out.extend_from_slice(&r.inserted);
        if !r.deleted {
            out.push(r.substituted.unwrap_or(s[script.p + t]));
        }
    }
    out
}

fn params() -> impl Strategy<Value = (f64, f64, f64, f64)> {
    (0.0..0.2f64, 0.0..0.2f64, 0.0..0.2f64, 0.05..0.95f64)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(10_000))]

    #[test]
    fn script_round_trip(seed: u64, n in 1usize..60, (ts, td, ti, g) in params()) {
        let mut rng = rng_from_seed(seed);
        let s = generate_reference(n, 4, &mut rng).unwrap();
        let m_prime = 1 + (seed as usize >> 3) % n;
        let p = (seed as usize >> 17) % (n - m_prime + 1);
        let params = MutationParams::new(ts, td, ti, g, g, 4).unwrap();
        let pair = mutate(&s, p, m_prime, &params, &mut rng).unwrap();

        prop_assert_eq!(&pair.s_prime, &oracle_apply(&s, &pair.script));
        prop_assert_eq!(pair.m(), pair.script.output_len());

        let mut text = Vec::new();
        write_edit_script(&mut text, &pair.script).unwrap();
        let back = read_edit_script(&text[..]).unwrap();
        prop_assert_eq!(&back, &pair.script);
        prop_assert_eq!(back.apply(&s).unwrap(), pair.s_prime.clone());

        let mut fa = Vec::new();
        let recs = vec![
            FastaRecord { name: "S".into(), seq: pair.s.clone() },
            FastaRecord { name: "Q".into(), seq: pair.s_prime.clone() },
        ];
        write_fasta(&mut fa, &recs).unwrap();
        prop_assert_eq!(read_fasta(&fa[..]).unwrap(), recs);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(2_000))]

    #[test]
    fn path_is_a_legal_monotone_walk(seed: u64, n in 1usize..80, (ts, td, ti, g) in params()) {
        let mut rng = rng_from_seed(seed);
        let s = generate_reference(n, 4, &mut rng).unwrap();
        let m_prime = 1 + (seed as usize >> 5) % n;
        let p = (seed as usize >> 23) % (n - m_prime + 1);
        let pair = mutate(&s, p, m_prime, &MutationParams::new(ts, td, ti, g, g, 4).unwrap(), &mut rng).unwrap();
        let path = build_homologous_path(&pair.script);
        prop_assert_eq!(path.first(), (p, 0));
        prop_assert_eq!(path.last(), (p + m_prime, pair.m()));
        for w in path.points().windows(2) {
            prop_assert!(legal_step(w[0], w[1]), "{:?} -> {:?}", w[0], w[1]);
        }
        // Every letter on either side is consumed by exactly one step.
        prop_assert!(path.len() > m_prime.max(pair.m()));
        prop_assert!(path.len() <= 1 + m_prime + pair.m());

        // f is strictly increasing where defined, hence injective, and
        // undefined exactly on deleted positions.
        let f = correspondence(&path, &pair.script, n);
        let mut seen = HashSet::new();
        let mut last = 0;
        for x in p + 1..=p + m_prime {
            let deleted = pair.script.record_at(x).unwrap().deleted;
            match f.forward(x) {
                Some(y) => {
                    prop_assert!(!deleted);
                    prop_assert!(y > last && y <= pair.m());
                    prop_assert!(seen.insert(y));
                    prop_assert_eq!(f.inverse(y), Some(x));
                    prop_assert!(path.contains(x, y));
                    last = y;
                }
                None => prop_assert!(deleted),
            }
        }
        prop_assert_eq!(f.forward(p), None);
    }
}

#[test]
fn length_change_matches_indel_counts() {
    let mut rng = rng_from_seed(99);
    let s = generate_reference(20_000, 4, &mut rng).unwrap();
    let params = MutationParams::new(0.03, 0.03, 0.03, 0.5, 0.5, 4).unwrap();
    let pair = mutate(&s, 0, 20_000, &params, &mut rng).unwrap();
    let script = &pair.script;
    assert_eq!(pair.m() + script.deletions(), 20_000 + script.inserted_len());
    // E[inserted letters] = theta_i * m' / (1 - rho) = 0.03 * 20000 * 2.
    let ins = script.inserted_len() as f64;
    assert!((ins - 1200.0).abs() < 5.0 * (1200.0f64 * 3.0).sqrt(), "{ins}");
}

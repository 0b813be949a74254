//! Shared helpers for integration tests: seeded random necklace
//! generators with rejection against the exact predicates.
#![allow(dead_code)] // each test target uses a different subset

use rand::rngs::StdRng;
use rand::Rng;

use shangles::fixed_angles::{classify_polytope, PolytopeClass};
use shangles::necklace::{Necklace, Rational};

pub fn rational(num: i64, den: i64) -> Rational {
    Rational::new(num.into(), den.into())
}

/// Random positive rationals near 1, rejected until majority dominant.
/// The band is wide enough that the predicate genuinely rejects.
pub fn random_majority_dominant(rng: &mut StdRng, n: usize) -> Necklace {
    loop {
        let den = 3 * n as i64;
        let entries: Vec<Rational> =
            (0..n).map(|_| rational(rng.random_range(den..=den + n as i64 + 4), den)).collect();
        let necklace = Necklace::new(entries).expect("entries positive");
        if necklace.is_majority_dominant() {
            return necklace;
        }
    }
}

/// Majority-dominant necklaces with dipole tie-breaking: near-1 entries
/// with one boosted entry, rejected by both predicates.
pub fn random_dipole(rng: &mut StdRng, n: usize) -> Necklace {
    assert!(n % 2 == 0);
    loop {
        let den = 4 * n as i64;
        let mut entries: Vec<Rational> =
            (0..n).map(|_| rational(rng.random_range(den..=den + n as i64), den)).collect();
        let boosted = rng.random_range(0..n);
        entries[boosted] += rational(rng.random_range(1..=3), 4);
        let necklace = Necklace::new(entries).expect("entries positive");
        if necklace.is_majority_dominant()
            && necklace.dipole_tie_breaking().expect("n is even").is_some()
        {
            return necklace;
        }
    }
}

/// Arbitrary full-dimensional necklaces with spread-out entries.
pub fn random_full_dim(rng: &mut StdRng, n: usize) -> Necklace {
    loop {
        let entries: Vec<Rational> =
            (0..n).map(|_| rational(rng.random_range(1..=12), rng.random_range(1..=4))).collect();
        let necklace = Necklace::new(entries).expect("entries positive");
        if classify_polytope(&necklace) == PolytopeClass::FullDim {
            return necklace;
        }
    }
}

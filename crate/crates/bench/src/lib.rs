//! Fixtures shared by the benchmarks.

use anongame::{generate_game, AnonymousGame, GameKind, MixedProfile, MixedStrategy};

pub fn random_game(n: usize, k: usize, seed: u64) -> AnonymousGame {
    generate_game(n, k, GameKind::UniformRandom, seed).expect("valid size")
}

/// Deterministic interior profile: player i tilts towards strategy i mod k.
pub fn tilted_profile(n: usize, k: usize) -> MixedProfile {
    let strategies = (0..n)
        .map(|i| {
            let mut p = vec![1.0 / (2 * k) as f64; k];
            p[i % k] += 0.5;
            MixedStrategy::new(p).expect("sums to one")
        })
        .collect();
    MixedProfile::new(strategies).expect("same k")
}

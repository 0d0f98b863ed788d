#![allow(dead_code)]

use std::collections::HashMap;

use anongame::{MixedProfile, MixedStrategy};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    use rand::SeedableRng;
    ChaCha8Rng::seed_from_u64(seed)
}

/// Random point of the simplex; about one draw in five zeroes a coordinate.
pub fn random_crv(rng: &mut ChaCha8Rng, k: usize) -> MixedStrategy {
    let mut w: Vec<f64> = (0..k)
        .map(|_| if rng.random_bool(0.2) { 0.0 } else { -rng.random::<f64>().max(1e-300).ln() })
        .collect();
    if w.iter().all(|&x| x == 0.0) {
        w[rng.random_range(0..k)] = 1.0;
    }
    normalize(w)
}

/// Random CRV with every probability at least `floor`.
pub fn floored_crv(rng: &mut ChaCha8Rng, k: usize, floor: f64) -> MixedStrategy {
    let free = 1.0 - floor * k as f64;
    assert!(free >= 0.0);
    let w: Vec<f64> = (0..k).map(|_| -rng.random::<f64>().max(1e-300).ln()).collect();
    let total: f64 = w.iter().sum();
    let mut p: Vec<f64> = w.iter().map(|x| floor + free * x / total).collect();
    let head: f64 = p[..k - 1].iter().sum();
    p[k - 1] = (1.0 - head).max(floor);
    MixedStrategy::new(p).unwrap()
}

pub fn normalize(w: Vec<f64>) -> MixedStrategy {
    let total: f64 = w.iter().sum();
    let mut p: Vec<f64> = w.iter().map(|x| x / total).collect();
    // put the rounding residue on the largest entry so the sum is 1 to the ulp
    let big = (0..p.len()).max_by(|&a, &b| p[a].total_cmp(&p[b])).unwrap();
    let rest: f64 = p.iter().enumerate().filter(|(j, _)| *j != big).map(|(_, x)| x).sum();
    p[big] = 1.0 - rest;
    MixedStrategy::new(p).unwrap()
}

pub fn random_profile(rng: &mut ChaCha8Rng, n: usize, k: usize) -> MixedProfile {
    MixedProfile::new((0..n).map(|_| random_crv(rng, k)).collect()).unwrap()
}

/// Sum-of-CRVs pmf by walking all k^m pure outcomes, keyed by counts.
pub fn enumerate_pmf(k: usize, crvs: &[MixedStrategy]) -> HashMap<Vec<usize>, f64> {
    let mut out = HashMap::new();
    let outcomes = k.pow(crvs.len() as u32);
    for code in 0..outcomes {
        let mut c = code;
        let mut counts = vec![0usize; k];
        let mut p = 1.0;
        for crv in crvs {
            let a = c % k;
            c /= k;
            counts[a] += 1;
            p *= crv.prob(a);
        }
        *out.entry(counts).or_insert(0.0) += p;
    }
    out
}

/// Random unit vector orthogonal to the all-ones vector.
pub fn random_direction(rng: &mut ChaCha8Rng, k: usize) -> Vec<f64> {
    loop {
        let mut v: Vec<f64> = (0..k).map(|_| rng.random::<f64>() * 2.0 - 1.0).collect();
        let mean = v.iter().sum::<f64>() / k as f64;
        v.iter_mut().for_each(|x| *x -= mean);
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm > 1e-3 {
            v.iter_mut().for_each(|x| *x /= norm);
            return v;
        }
    }
}

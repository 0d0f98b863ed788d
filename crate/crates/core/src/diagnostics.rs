//! Seeded sweeps that check the structural facts the solvers rely on:
//! the covariance spectrum under a probability floor, the variance of
//! trembling CRVs, and the Fourier transform of a PMD.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{invalid, Result};
use crate::game::MixedStrategy;
use crate::partition::PartitionLattice;
use crate::pmd::{covariance, fourier_at, min_orthogonal_eigenvalue, pmd_pmf, unit_phase};
use crate::smoothing::crv_direction_variance;

/// A random CRV with every probability at least `floor`. Needs `k·floor <= 1`.
pub fn floored_crv(rng: &mut impl Rng, k: usize, floor: f64) -> Result<MixedStrategy> {
    let spare = 1.0 - k as f64 * floor;
    if k == 0 || floor < 0.0 || spare < -1e-12 {
        return Err(invalid(format!("cannot floor {k} probabilities at {floor}")));
    }
    let w: Vec<f64> = (0..k).map(|_| rng.random::<f64>() + 1e-3).collect();
    let total: f64 = w.iter().sum();
    MixedStrategy::new(w.iter().map(|x| floor + spare.max(0.0) * x / total).collect())
}

#[derive(Clone, Debug)]
pub struct SpectrumCell {
    pub n: usize,
    pub k: usize,
    pub eps: f64,
    pub trials: usize,
    /// Smallest `λ_min⊥ − n·eps/(k−1)` seen; nonnegative when the bound holds.
    pub min_margin: f64,
}

/// For each `(n, k, eps)`, draws `trials` PMDs whose CRVs put at least
/// `eps/(k−1)` on every outcome and records how far the smallest eigenvalue
/// off the ones direction sits above `n·eps/(k−1)`.
pub fn spectrum_sweep(ns: &[usize], ks: &[usize], epss: &[f64], trials: usize, seed: u64) -> Result<Vec<SpectrumCell>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::new();
    for &n in ns {
        for &k in ks {
            if k < 2 {
                return Err(invalid("spectrum sweep needs k >= 2"));
            }
            for &eps in epss {
                let floor = eps / (k - 1) as f64;
                let mut min_margin = f64::INFINITY;
                for _ in 0..trials {
                    let crvs = (0..n).map(|_| floored_crv(&mut rng, k, floor)).collect::<Result<Vec<_>>>()?;
                    let lam = min_orthogonal_eigenvalue(&covariance(k, &crvs)?)?;
                    min_margin = min_margin.min(lam - n as f64 * floor);
                }
                out.push(SpectrumCell {
                    n,
                    k,
                    eps,
                    trials,
                    min_margin,
                });
            }
        }
    }
    Ok(out)
}

/// Uniformly random unit vector orthogonal to the all-ones vector.
pub fn random_centered_direction(rng: &mut impl Rng, k: usize) -> Vec<f64> {
    loop {
        let mut v: Vec<f64> = (0..k).map(|_| rng.random::<f64>() * 2.0 - 1.0).collect();
        let mean = v.iter().sum::<f64>() / k as f64;
        v.iter_mut().for_each(|x| *x -= mean);
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm > 1e-6 {
            v.iter_mut().for_each(|x| *x /= norm);
            return v;
        }
    }
}

/// Smallest `Var[vᵀX] − δ/(k−1)` over `samples` random `(k, δ, j, v)` with
/// `2 <= k <= max_k` and `δ` in `[0, (k−1)/k]`.
pub fn variance_sweep(samples: usize, max_k: usize, seed: u64) -> Result<f64> {
    if max_k < 2 {
        return Err(invalid("variance sweep needs max_k >= 2"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst = f64::INFINITY;
    for _ in 0..samples {
        let k = rng.random_range(2..=max_k);
        let delta = rng.random_range(0.0..=(k - 1) as f64 / k as f64);
        let j = rng.random_range(0..k);
        let v = random_centered_direction(&mut rng, k);
        worst = worst.min(crv_direction_variance(j, delta, k, &v)? - delta / (k - 1) as f64);
    }
    Ok(worst)
}

#[derive(Clone, Debug, Default)]
pub struct FourierCheck {
    /// `|X̂(0) − 1|`.
    pub at_zero: f64,
    /// Largest `|X̂(ξ)| − 1`.
    pub modulus_excess: f64,
    /// Largest gap to the DFT of the exact pmf.
    pub dft_gap: f64,
}

/// Compares `fourier_at` with the DFT of the exact pmf on `pmds` random
/// PMDs at `freqs` random frequencies each.
pub fn fourier_check(pmds: usize, freqs: usize, seed: u64) -> Result<FourierCheck> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = FourierCheck {
        modulus_excess: f64::NEG_INFINITY,
        ..FourierCheck::default()
    };
    for _ in 0..pmds {
        let m = rng.random_range(1..=10usize);
        let k = rng.random_range(2..=4usize);
        let crvs = (0..m).map(|_| floored_crv(&mut rng, k, 0.0)).collect::<Result<Vec<_>>>()?;
        out.at_zero = out.at_zero.max((fourier_at(&crvs, &vec![0.0; k])? - 1.0).norm());
        let dist = pmd_pmf(k, &crvs)?;
        let lattice = PartitionLattice::new(m, k)?;
        for _ in 0..freqs {
            let xi: Vec<f64> = (0..k).map(|_| rng.random::<f64>() * 2.0 - 1.0).collect();
            let value = fourier_at(&crvs, &xi)?;
            let dft: Complex64 = lattice
                .points()
                .iter()
                .zip(dist.mass())
                .map(|(x, &p)| unit_phase(x.counts().iter().zip(&xi).map(|(&c, f)| c as f64 * f).sum()) * p)
                .sum();
            out.modulus_excess = out.modulus_excess.max(value.norm() - 1.0);
            out.dft_gap = out.dft_gap.max((value - dft).norm());
        }
    }
    Ok(out)
}

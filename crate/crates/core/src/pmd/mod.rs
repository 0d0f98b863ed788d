//! Exact Poisson multinomial distributions.
//!
//! A PMD of order m is the sum of m independent k-CRVs; its support is
//! Π^k_m and its pmf is stored densely in canonical partition order.

mod covariance;
mod gaussian;
mod moments;

use std::fmt::Write as _;

use num_complex::Complex64;

use crate::error::{invalid, Result};
use crate::game::MixedStrategy;
use crate::partition::{next_partition, PartitionLattice, Ranker};

pub use covariance::{covariance, jacobi_eigen, min_orthogonal_eigenvalue, CovarianceSummary, SymmetricEigen};
pub use gaussian::{discretized_gaussian_pmf, GaussianLatticeTable, IntegerBox};
pub use moments::{
    component_decomposition, data_vector, data_vector_sum, default_moment_degree, maximal_index, parameter_moment, DataSpec,
    DataVector, MomentIndex,
};

/// Dense pmf over Π^k_m.
#[derive(Clone, Debug, PartialEq)]
pub struct LatticeDistribution {
    m: usize,
    k: usize,
    mass: Vec<f64>,
}

impl LatticeDistribution {
    /// Masses above `-1e-15` are accepted and clipped to zero; the total must
    /// be within `1e-9` of one.
    pub fn new(m: usize, k: usize, mut mass: Vec<f64>) -> Result<Self> {
        let expected = crate::partition::lattice_size(m, k);
        if mass.len() != expected {
            return Err(invalid(format!(
                "expected {expected} masses for order {m}, k = {k}, got {}",
                mass.len()
            )));
        }
        for p in &mut mass {
            if *p < -1e-15 || !p.is_finite() {
                return Err(invalid(format!("negative mass {p}")));
            }
            *p = p.max(0.0);
        }
        let total: f64 = mass.iter().sum();
        if (total - 1.0).abs() > 1e-9 {
            return Err(invalid(format!("masses sum to {total}")));
        }
        Ok(Self { m, k, mass })
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn mass(&self) -> &[f64] {
        &self.mass
    }

    pub fn into_mass(self) -> Vec<f64> {
        self.mass
    }

    /// `rank partition mass` lines, one per lattice point.
    pub fn dump(&self) -> String {
        let lattice = PartitionLattice::new(self.m, self.k).expect("k >= 1 by construction");
        let mut out = String::new();
        for (r, (x, p)) in lattice.points().iter().zip(&self.mass).enumerate() {
            let _ = writeln!(out, "{r} {x} {p}");
        }
        out
    }
}

/// Convolution engine reusable across calls with the same `k` and orders up
/// to `max_m`.
#[derive(Clone, Debug)]
pub struct PmdEngine {
    ranker: Ranker,
}

impl PmdEngine {
    pub fn new(max_m: usize, k: usize) -> Result<Self> {
        Ok(Self {
            ranker: Ranker::new(max_m, k)?,
        })
    }

    pub fn k(&self) -> usize {
        self.ranker.k()
    }

    /// Exact pmf of `Σ crvs` by folding in one CRV at a time, starting from
    /// the point mass at the zero partition.
    pub fn pmf(&self, crvs: &[MixedStrategy]) -> Result<LatticeDistribution> {
        let k = self.k();
        let m = crvs.len();
        if m > self.ranker.max_m() {
            return Err(invalid(format!(
                "engine sized for order {}, got {m} CRVs",
                self.ranker.max_m()
            )));
        }
        if let Some(bad) = crvs.iter().find(|c| c.k() != k) {
            return Err(invalid(format!(
                "CRV of dimension {} in a k = {k} distribution",
                bad.k()
            )));
        }
        let mut cur = vec![1.0];
        let mut counts = vec![0usize; k];
        for (level, crv) in crvs.iter().enumerate() {
            let mut next = vec![0.0; self.ranker.size(level + 1)];
            counts.iter_mut().for_each(|c| *c = 0);
            counts[k - 1] = level;
            for &here in &cur {
                if here != 0.0 {
                    for (j, &p) in crv.probs().iter().enumerate() {
                        if p != 0.0 {
                            counts[j] += 1;
                            next[self.ranker.rank(&counts)] += here * p;
                            counts[j] -= 1;
                        }
                    }
                }
                next_partition(&mut counts);
            }
            cur = next;
        }
        Ok(LatticeDistribution { m, k, mass: cur })
    }
}

/// Exact pmf of the sum of `crvs`, each a k-CRV.
pub fn pmd_pmf(k: usize, crvs: &[MixedStrategy]) -> Result<LatticeDistribution> {
    PmdEngine::new(crvs.len(), k)?.pmf(crvs)
}

/// `(1/2)·‖p − q‖₁`.
pub fn tv_distance(p: &LatticeDistribution, q: &LatticeDistribution) -> Result<f64> {
    if p.m != q.m || p.k != q.k {
        return Err(invalid(format!(
            "cannot compare order {} k={} with order {} k={}",
            p.m, p.k, q.m, q.k
        )));
    }
    Ok(0.5 * p.mass.iter().zip(&q.mass).map(|(a, b)| (a - b).abs()).sum::<f64>())
}

/// `e(x) = exp(−2πi x)`.
pub fn unit_phase(x: f64) -> Complex64 {
    Complex64::from_polar(1.0, -2.0 * std::f64::consts::PI * x)
}

/// `X̂(ξ) = Π_i Σ_j e(ξ_j)·p_{i,j}`.
pub fn fourier_at(crvs: &[MixedStrategy], xi: &[f64]) -> Result<Complex64> {
    let phases: Vec<Complex64> = xi.iter().map(|&x| unit_phase(x)).collect();
    crvs.iter().try_fold(Complex64::new(1.0, 0.0), |acc, crv| {
        if crv.k() != xi.len() {
            return Err(invalid(format!(
                "frequency has {} coordinates, CRV has {}",
                xi.len(),
                crv.k()
            )));
        }
        let factor: Complex64 = crv.probs().iter().zip(&phases).map(|(p, e)| e * p).sum();
        Ok(acc * factor)
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ms(p: &[f64]) -> MixedStrategy {
        MixedStrategy::new(p.to_vec()).unwrap()
    }

    #[test]
    fn deterministic_crv_is_point_mass() {
        let d = pmd_pmf(2, &[ms(&[1.0, 0.0])]).unwrap();
        // Π^2_1 = [(0,1), (1,0)]
        assert_eq!(d.mass(), &[0.0, 1.0]);
    }

    #[test]
    fn two_fair_coins() {
        let d = pmd_pmf(2, &[ms(&[0.5, 0.5]), ms(&[0.5, 0.5])]).unwrap();
        assert_eq!(d.mass(), &[0.25, 0.5, 0.25]);
    }

    #[test]
    fn three_biased_coins_by_enumeration() {
        let crvs = [ms(&[0.2, 0.8]), ms(&[0.5, 0.5]), ms(&[0.9, 0.1])];
        let d = pmd_pmf(2, &crvs).unwrap();
        // mass at (x1, 3-x1) sums over the 8 outcomes with x1 heads on strategy 1
        let mut expected = [0.0; 4];
        for mask in 0..8u32 {
            let mut p = 1.0;
            let mut ones = 0;
            for (b, c) in crvs.iter().enumerate() {
                if mask >> b & 1 == 1 {
                    p *= c.prob(0);
                    ones += 1;
                } else {
                    p *= c.prob(1);
                }
            }
            expected[ones] += p;
        }
        for (a, b) in d.mass().iter().zip(expected) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn empty_sum_is_point_mass_at_zero() {
        let d = pmd_pmf(3, &[]).unwrap();
        assert_eq!(d.m(), 0);
        assert_eq!(d.mass(), &[1.0]);
    }

    #[test]
    fn mixed_dimensions_rejected() {
        assert!(pmd_pmf(2, &[ms(&[0.5, 0.5]), ms(&[0.2, 0.3, 0.5])]).is_err());
    }

    #[test]
    fn tv_identity_and_disjoint() {
        let p = pmd_pmf(2, &[ms(&[0.3, 0.7]), ms(&[0.6, 0.4])]).unwrap();
        assert_eq!(tv_distance(&p, &p).unwrap(), 0.0);
        let a = pmd_pmf(2, &[ms(&[1.0, 0.0])]).unwrap();
        let b = pmd_pmf(2, &[ms(&[0.0, 1.0])]).unwrap();
        assert_eq!(tv_distance(&a, &b).unwrap(), 1.0);
    }

    #[test]
    fn tv_two_order_two_pbds() {
        let p = pmd_pmf(2, &[ms(&[0.5, 0.5]), ms(&[0.5, 0.5])]).unwrap();
        let q = pmd_pmf(2, &[ms(&[0.2, 0.8]), ms(&[0.9, 0.1])]).unwrap();
        // q over [(0,2),(1,1),(2,0)] = [0.8*0.1, 0.2*0.1+0.8*0.9, 0.2*0.9] = [0.08, 0.74, 0.18]
        let direct = 0.5 * ((0.25f64 - 0.08).abs() + (0.5f64 - 0.74).abs() + (0.25f64 - 0.18).abs());
        assert!((tv_distance(&p, &q).unwrap() - direct).abs() < 1e-15);
        assert!((direct - 0.24).abs() < 1e-15);
    }

    #[test]
    fn tv_shape_mismatch() {
        let p = pmd_pmf(2, &[ms(&[0.5, 0.5])]).unwrap();
        let q = pmd_pmf(2, &[ms(&[0.5, 0.5]), ms(&[0.5, 0.5])]).unwrap();
        assert!(tv_distance(&p, &q).is_err());
    }

    #[test]
    fn fourier_at_zero_is_one() {
        let crvs = [ms(&[0.2, 0.3, 0.5]), ms(&[0.6, 0.2, 0.2])];
        let v = fourier_at(&crvs, &[0.0, 0.0, 0.0]).unwrap();
        assert!((v - Complex64::new(1.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn fourier_of_fair_coin_at_half() {
        let v = fourier_at(&[ms(&[0.5, 0.5])], &[0.5, 0.0]).unwrap();
        assert!(v.norm() < 1e-15);
    }

    #[test]
    fn lattice_distribution_validation() {
        assert!(LatticeDistribution::new(1, 2, vec![0.5, 0.5]).is_ok());
        assert!(LatticeDistribution::new(1, 2, vec![0.5, 0.4]).is_err());
        assert!(LatticeDistribution::new(1, 2, vec![1.0 + 1e-16, -1e-16]).is_ok());
        assert!(LatticeDistribution::new(1, 2, vec![1.1, -0.1]).is_err());
        assert!(LatticeDistribution::new(1, 2, vec![1.0]).is_err());
    }

    #[test]
    fn dump_lists_every_point() {
        let d = pmd_pmf(2, &[ms(&[0.5, 0.5])]).unwrap();
        assert_eq!(d.dump(), "0 (0,1) 0.5\n1 (1,0) 0.5\n");
    }
}

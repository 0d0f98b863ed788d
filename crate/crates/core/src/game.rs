//! Anonymous games, mixed strategies and the exact equilibrium verifiers.
//!
//! Strategies and players are 0-based in the API. File formats and the CLI
//! print strategies 1-based.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{invalid, Error, Result};
use crate::partition::{lattice_size, PartitionLattice};
use crate::pmd::pmd_pmf;

/// Absolute tolerance used by every verifier comparison.
pub const VERIFY_TOL: f64 = 1e-9;

/// Tolerance on `Σ probs = 1` for a mixed strategy.
pub const SIMPLEX_TOL: f64 = 1e-12;

/// A probability vector over the k strategies (equivalently, a k-CRV).
#[derive(Clone, Debug, PartialEq)]
pub struct MixedStrategy {
    probs: Vec<f64>,
}

impl MixedStrategy {
    pub fn new(probs: Vec<f64>) -> Result<Self> {
        if probs.is_empty() {
            return Err(invalid("a mixed strategy needs at least one entry"));
        }
        if let Some(p) = probs.iter().find(|p| !p.is_finite() || **p < 0.0) {
            return Err(invalid(format!("probability {p} is negative or not finite")));
        }
        let total: f64 = probs.iter().sum();
        if (total - 1.0).abs() > SIMPLEX_TOL {
            return Err(invalid(format!("probabilities sum to {total}, not 1")));
        }
        Ok(Self { probs })
    }

    /// Internal constructor for vectors that are simplex points by construction.
    pub(crate) fn from_raw(probs: Vec<f64>) -> Self {
        debug_assert!(probs.iter().all(|p| *p >= 0.0));
        debug_assert!((probs.iter().sum::<f64>() - 1.0).abs() <= 1e-9);
        Self { probs }
    }

    pub fn pure(k: usize, a: usize) -> Self {
        assert!(a < k, "strategy {a} out of range for k = {k}");
        let mut probs = vec![0.0; k];
        probs[a] = 1.0;
        Self { probs }
    }

    pub fn uniform(k: usize) -> Self {
        Self {
            probs: vec![1.0 / k as f64; k],
        }
    }

    pub fn k(&self) -> usize {
        self.probs.len()
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn prob(&self, a: usize) -> f64 {
        self.probs[a]
    }

    /// Expected value of `values` (one per strategy) under this strategy.
    pub fn expect(&self, values: &[f64]) -> f64 {
        self.probs.iter().zip(values).map(|(p, v)| p * v).sum()
    }

    /// `(1/2)·‖self − other‖₁`.
    pub fn tv_distance(&self, other: &MixedStrategy) -> f64 {
        0.5 * self
            .probs
            .iter()
            .zip(&other.probs)
            .map(|(a, b)| (a - b).abs())
            .sum::<f64>()
    }
}

/// One mixed strategy per player.
#[derive(Clone, Debug, PartialEq)]
pub struct MixedProfile {
    strategies: Vec<MixedStrategy>,
}

impl MixedProfile {
    pub fn new(strategies: Vec<MixedStrategy>) -> Result<Self> {
        if let Some(first) = strategies.first() {
            let k = first.k();
            if strategies.iter().any(|s| s.k() != k) {
                return Err(invalid("all strategies in a profile must share k"));
            }
        }
        Ok(Self { strategies })
    }

    /// Every player on pure strategy `a`.
    pub fn pure(n: usize, k: usize, a: usize) -> Self {
        Self {
            strategies: vec![MixedStrategy::pure(k, a); n],
        }
    }

    pub fn n(&self) -> usize {
        self.strategies.len()
    }

    pub fn strategies(&self) -> &[MixedStrategy] {
        &self.strategies
    }

    pub fn get(&self, i: usize) -> &MixedStrategy {
        &self.strategies[i]
    }

    pub fn into_strategies(self) -> Vec<MixedStrategy> {
        self.strategies
    }

    /// The strategies of every player except `i`.
    pub fn others(&self, i: usize) -> Vec<MixedStrategy> {
        self.strategies
            .iter()
            .enumerate()
            .filter(|(j, _)| *j != i)
            .map(|(_, s)| s.clone())
            .collect()
    }
}

/// An n-player, k-strategy anonymous game with a dense payoff table
/// `u[i][a][rank(x)]`, `x ∈ Π^k_{n-1}`, all values in `[0, 1]`.
#[derive(Clone, Debug)]
pub struct AnonymousGame {
    n: usize,
    k: usize,
    cells: usize,
    payoffs: Vec<f64>,
    lattice: PartitionLattice,
}

impl PartialEq for AnonymousGame {
    fn eq(&self, other: &Self) -> bool {
        self.n == other.n && self.k == other.k && self.payoffs == other.payoffs
    }
}

impl AnonymousGame {
    /// `payoffs` is laid out player-major, then strategy, then partition rank.
    pub fn new(n: usize, k: usize, payoffs: Vec<f64>) -> Result<Self> {
        if n == 0 || k == 0 {
            return Err(invalid(format!("need n >= 1 and k >= 1, got n={n} k={k}")));
        }
        let cells = lattice_size(n - 1, k);
        let expected = n
            .checked_mul(k)
            .and_then(|v| v.checked_mul(cells))
            .ok_or_else(|| invalid("payoff table size overflows"))?;
        if payoffs.len() != expected {
            return Err(invalid(format!(
                "expected {expected} payoff cells, got {}",
                payoffs.len()
            )));
        }
        if let Some(v) = payoffs.iter().find(|v| !(0.0..=1.0).contains(*v)) {
            return Err(invalid(format!("payoff {v} outside [0, 1]")));
        }
        Ok(Self {
            n,
            k,
            cells,
            payoffs,
            lattice: PartitionLattice::new(n - 1, k)?,
        })
    }

    /// Builds a game from a payoff function of `(player, strategy, partition counts)`.
    pub fn from_fn(n: usize, k: usize, mut f: impl FnMut(usize, usize, &[usize]) -> f64) -> Result<Self> {
        if n == 0 || k == 0 {
            return Err(invalid(format!("need n >= 1 and k >= 1, got n={n} k={k}")));
        }
        let lattice = PartitionLattice::new(n - 1, k)?;
        let mut payoffs = Vec::with_capacity(n * k * lattice.len());
        for i in 0..n {
            for a in 0..k {
                for x in lattice.points() {
                    payoffs.push(f(i, a, x.counts()));
                }
            }
        }
        Self::new(n, k, payoffs)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    /// `|Π^k_{n-1}|`, the number of cells per (player, strategy).
    pub fn cells(&self) -> usize {
        self.cells
    }

    /// Π^k_{n-1}, the opponents' outcome space.
    pub fn lattice(&self) -> &PartitionLattice {
        &self.lattice
    }

    pub fn payoff(&self, i: usize, a: usize, rank: usize) -> f64 {
        self.payoffs[(i * self.k + a) * self.cells + rank]
    }

    /// `u^i_a` over Π^k_{n-1} in canonical order.
    pub fn table(&self, i: usize, a: usize) -> &[f64] {
        let start = (i * self.k + a) * self.cells;
        &self.payoffs[start..start + self.cells]
    }

    pub fn raw_payoffs(&self) -> &[f64] {
        &self.payoffs
    }

    pub fn check_profile(&self, profile: &MixedProfile) -> Result<()> {
        if profile.n() != self.n {
            return Err(invalid(format!(
                "profile has {} players, game has {}",
                profile.n(),
                self.n
            )));
        }
        if profile.strategies().iter().any(|s| s.k() != self.k) {
            return Err(invalid(format!("profile strategies must have k = {}", self.k)));
        }
        Ok(())
    }
}

/// `E[u^i_a(X_{-i})]` for every strategy `a`, where the others play `others`.
pub fn expected_payoffs(game: &AnonymousGame, i: usize, others: &[MixedStrategy]) -> Result<Vec<f64>> {
    if i >= game.n() {
        return Err(invalid(format!("player {i} out of range")));
    }
    if others.len() + 1 != game.n() {
        return Err(invalid(format!(
            "expected {} opposing strategies, got {}",
            game.n() - 1,
            others.len()
        )));
    }
    let dist = pmd_pmf(game.k(), others)?;
    Ok(payoffs_under(game, i, dist.mass()))
}

/// Expected payoffs of player `i` for each strategy when the opponents'
/// partition has pmf `mass` over Π^k_{n-1}.
pub fn payoffs_under(game: &AnonymousGame, i: usize, mass: &[f64]) -> Vec<f64> {
    (0..game.k())
        .map(|a| {
            game.table(i, a)
                .iter()
                .zip(mass)
                .map(|(u, p)| u * p)
                .sum::<f64>()
        })
        .collect()
}

pub fn expected_payoff(game: &AnonymousGame, i: usize, a: usize, others: &[MixedStrategy]) -> Result<f64> {
    if a >= game.k() {
        return Err(invalid(format!("strategy {a} out of range")));
    }
    Ok(expected_payoffs(game, i, others)?[a])
}

/// Best-response slack of mixed strategy `s` given per-strategy payoffs.
pub fn slack(payoffs: &[f64], s: &MixedStrategy) -> f64 {
    let best = payoffs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    (best - s.expect(payoffs)).max(0.0)
}

/// How much player `i` gains by the best unilateral pure deviation.
pub fn regret(game: &AnonymousGame, profile: &MixedProfile, i: usize) -> Result<f64> {
    game.check_profile(profile)?;
    let payoffs = expected_payoffs(game, i, &profile.others(i))?;
    Ok(slack(&payoffs, profile.get(i)))
}

/// Regret of every player, computed in parallel.
pub fn regrets(game: &AnonymousGame, profile: &MixedProfile) -> Result<Vec<f64>> {
    game.check_profile(profile)?;
    (0..game.n())
        .into_par_iter()
        .map(|i| regret(game, profile, i))
        .collect()
}

/// `max_i regret(i)`: the profile is an ε-approximate equilibrium iff this is `<= ε`.
pub fn max_regret(game: &AnonymousGame, profile: &MixedProfile) -> Result<f64> {
    Ok(regrets(game, profile)?.into_iter().fold(0.0, f64::max))
}

/// A strategy in some player's support that is not an ε-best response.
#[derive(Clone, Debug, PartialEq)]
pub struct SupportViolation {
    pub player: usize,
    pub strategy: usize,
    /// `max_a' E[u_a'] − E[u_strategy]`.
    pub gap: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct WellSupportedReport {
    pub holds: bool,
    pub violations: Vec<SupportViolation>,
}

/// Checks that every strategy played with positive probability is an
/// `eps`-best response (up to [`VERIFY_TOL`]).
pub fn verify_well_supported(game: &AnonymousGame, profile: &MixedProfile, eps: f64) -> Result<WellSupportedReport> {
    if !(eps >= 0.0) {
        return Err(invalid(format!("eps must be >= 0, got {eps}")));
    }
    game.check_profile(profile)?;
    let per_player: Vec<Vec<SupportViolation>> = (0..game.n())
        .into_par_iter()
        .map(|i| -> Result<Vec<SupportViolation>> {
            let payoffs = expected_payoffs(game, i, &profile.others(i))?;
            let best = payoffs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            Ok(payoffs
                .iter()
                .enumerate()
                .filter(|(a, u)| profile.get(i).prob(*a) > 0.0 && **u < best - eps - VERIFY_TOL)
                .map(|(a, u)| SupportViolation {
                    player: i,
                    strategy: a,
                    gap: best - u,
                })
                .collect())
        })
        .collect::<Result<_>>()?;
    let violations: Vec<_> = per_player.into_iter().flatten().collect();
    Ok(WellSupportedReport {
        holds: violations.is_empty(),
        violations,
    })
}

/// Families of generated games.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GameKind {
    /// Every cell i.i.d. uniform on `[0, 1]`.
    UniformRandom,
    /// `u^i_a(x) = 1 − (x_a + 1)/n`.
    Congestion,
    /// Strategy 1 pays 1, everything else pays 0.
    Dominant,
    /// 0.5 everywhere.
    Constant,
}

impl FromStr for GameKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "uniform-random" => Ok(Self::UniformRandom),
            "congestion" => Ok(Self::Congestion),
            "dominant" => Ok(Self::Dominant),
            "constant" => Ok(Self::Constant),
            other => Err(invalid(format!("unknown game kind '{other}'"))),
        }
    }
}

impl fmt::Display for GameKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::UniformRandom => "uniform-random",
            Self::Congestion => "congestion",
            Self::Dominant => "dominant",
            Self::Constant => "constant",
        })
    }
}

/// Deterministic per `seed`; only `UniformRandom` consumes randomness.
pub fn generate_game(n: usize, k: usize, kind: GameKind, seed: u64) -> Result<AnonymousGame> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    AnonymousGame::from_fn(n, k, |_, a, x| match kind {
        GameKind::UniformRandom => rng.random::<f64>(),
        GameKind::Congestion => 1.0 - (x[a] + 1) as f64 / n as f64,
        GameKind::Dominant => {
            if a == 0 {
                1.0
            } else {
                0.0
            }
        }
        GameKind::Constant => 0.5,
    })
}

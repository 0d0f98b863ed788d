//! Brute-force ground truth for small games: outcome enumeration and
//! exhaustive grid search over mixed profiles.

use std::collections::BTreeMap;

use rayon::prelude::*;

use crate::error::{invalid, Error, Result};
use crate::game::{payoffs_under, slack, AnonymousGame, MixedProfile, MixedStrategy, VERIFY_TOL};
use crate::pmd::pmd_pmf;

/// Largest player count the enumerators accept.
pub const MAX_BRUTE_FORCE_PLAYERS: usize = 12;

pub const DEFAULT_PROFILE_CAP: u64 = 10_000_000;

fn outcome_guard(count: usize) -> Result<()> {
    if count > MAX_BRUTE_FORCE_PLAYERS {
        return Err(Error::ResourceLimit(format!(
            "brute force over {count} players exceeds the limit of {MAX_BRUTE_FORCE_PLAYERS}"
        )));
    }
    Ok(())
}

// Calls `visit(counts, probability)` for each of the k^m pure outcomes.
fn for_each_outcome(k: usize, crvs: &[MixedStrategy], mut visit: impl FnMut(&[usize], f64)) {
    let m = crvs.len();
    let mut choice = vec![0usize; m];
    let mut counts = vec![0usize; k];
    loop {
        counts.iter_mut().for_each(|c| *c = 0);
        let mut p = 1.0;
        for (crv, &a) in crvs.iter().zip(&choice) {
            counts[a] += 1;
            p *= crv.prob(a);
        }
        visit(&counts, p);
        let mut pos = 0;
        loop {
            if pos == m {
                return;
            }
            choice[pos] += 1;
            if choice[pos] < k {
                break;
            }
            choice[pos] = 0;
            pos += 1;
        }
    }
}

/// Pmf of the sum of `crvs` by enumerating every pure outcome.
pub fn brute_force_pmf(k: usize, crvs: &[MixedStrategy]) -> Result<BTreeMap<Vec<usize>, f64>> {
    outcome_guard(crvs.len())?;
    if k == 0 || crvs.iter().any(|c| c.k() != k) {
        return Err(invalid("every CRV must have the stated k >= 1"));
    }
    let mut out = BTreeMap::new();
    for_each_outcome(k, crvs, |counts, p| *out.entry(counts.to_vec()).or_insert(0.0) += p);
    Ok(out)
}

/// `E[u^i_a]` by enumerating the k^{n−1} pure outcomes of the opponents.
pub fn brute_force_payoff(game: &AnonymousGame, i: usize, a: usize, others: &[MixedStrategy]) -> Result<f64> {
    outcome_guard(game.n())?;
    if i >= game.n() || a >= game.k() {
        return Err(invalid("player or strategy out of range"));
    }
    if others.len() + 1 != game.n() || others.iter().any(|c| c.k() != game.k()) {
        return Err(invalid("opponent strategies do not match the game"));
    }
    let table = game.table(i, a);
    let mut total = 0.0;
    for_each_outcome(game.k(), others, |counts, p| {
        total += p * table[game.lattice().rank(counts)];
    });
    Ok(total)
}

/// Every k-CRV whose probabilities are multiples of `step`, in ascending
/// lexicographic order. `1/step` must be an integer.
pub fn simplex_grid(k: usize, step: f64) -> Result<Vec<MixedStrategy>> {
    if k == 0 || !(step > 0.0 && step <= 1.0) {
        return Err(invalid(format!("need k >= 1 and step in (0, 1], got k = {k}, step = {step}")));
    }
    let units = (1.0 / step).round();
    if (units * step - 1.0).abs() > 1e-9 {
        return Err(invalid(format!("1/step must be an integer, got step {step}")));
    }
    let units = units as usize;
    let mut out = Vec::new();
    for point in crate::partition::enumerate_partitions(units, k)? {
        let probs = point.counts().iter().map(|&c| c as f64 / units as f64).collect();
        out.push(MixedStrategy::from_raw(probs));
    }
    Ok(out)
}

/// What a grid profile must satisfy to be returned.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum SearchTarget {
    /// Max regret at most `eps`.
    Approximate,
    /// Every support strategy an `eps`-best response.
    WellSupported,
}

/// First grid profile (players ordered slowest to fastest) with max regret
/// at most `eps`.
pub fn grid_profile_search(game: &AnonymousGame, step: f64, eps: f64, cap: u64) -> Result<MixedProfile> {
    grid_search(game, step, eps, cap, SearchTarget::Approximate)
}

pub fn grid_search(game: &AnonymousGame, step: f64, eps: f64, cap: u64, target: SearchTarget) -> Result<MixedProfile> {
    if !(eps >= 0.0) {
        return Err(invalid(format!("eps must be >= 0, got {eps}")));
    }
    let n = game.n();
    let grid = simplex_grid(game.k(), step)?;
    let g = grid.len() as u64;
    let total = (0..n).try_fold(1u64, |acc, _| acc.checked_mul(g)).filter(|t| *t <= cap);
    let Some(total) = total else {
        return Err(Error::ResourceLimit(format!(
            "{} grid points per player over {n} players exceeds the cap of {cap} profiles",
            g
        )));
    };
    let found = (0..total).into_par_iter().find_map_first(|idx| {
        let mut rest = idx;
        let mut picks = vec![0usize; n];
        for p in picks.iter_mut().rev() {
            *p = (rest % g) as usize;
            rest /= g;
        }
        let profile = MixedProfile::new(picks.iter().map(|&p| grid[p].clone()).collect()).ok()?;
        accepts(game, &profile, eps, target).ok()?.then_some(profile)
    });
    found.ok_or_else(|| Error::NotFound(format!("no grid profile at step {step} meets eps {eps}")))
}

fn accepts(game: &AnonymousGame, profile: &MixedProfile, eps: f64, target: SearchTarget) -> Result<bool> {
    for i in 0..game.n() {
        let dist = pmd_pmf(game.k(), &profile.others(i))?;
        let payoffs = payoffs_under(game, i, dist.mass());
        let s = profile.get(i);
        let ok = match target {
            SearchTarget::Approximate => slack(&payoffs, s) <= eps + VERIFY_TOL,
            SearchTarget::WellSupported => {
                let best = payoffs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
                (0..game.k()).all(|a| s.prob(a) == 0.0 || payoffs[a] >= best - eps - VERIFY_TOL)
            }
        };
        if !ok {
            return Ok(false);
        }
    }
    Ok(true)
}

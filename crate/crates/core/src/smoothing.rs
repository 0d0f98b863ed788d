//! Smoothing a game by forcing every player to tremble, then solving the
//! resulting Lipschitz game for an approximate pure equilibrium.

use std::fmt;

use rayon::prelude::*;

use crate::error::{invalid, Error, Result};
use crate::flow::FlowNetwork;
use crate::game::{max_regret, AnonymousGame, MixedProfile, MixedStrategy, VERIFY_TOL};
use crate::partition::{next_partition, Partition, PartitionLattice, Ranker};
use crate::pmd::{discretized_gaussian_pmf, IntegerBox, PmdEngine};

/// Probability `1 − delta` on `j` and `delta/(k−1)` on every other strategy.
pub fn perturbed_crv(j: usize, delta: f64, k: usize) -> Result<MixedStrategy> {
    if j >= k {
        return Err(invalid(format!("strategy {j} out of range for k = {k}")));
    }
    if !(0.0..=1.0).contains(&delta) {
        return Err(invalid(format!("delta must lie in [0, 1], got {delta}")));
    }
    if k == 1 {
        if delta > 0.0 {
            return Err(invalid("a single-strategy CRV cannot be perturbed"));
        }
        return Ok(MixedStrategy::pure(1, 0));
    }
    let spread = delta / (k - 1) as f64;
    let mut probs = vec![spread; k];
    probs[j] = 1.0 - delta;
    Ok(MixedStrategy::from_raw(probs))
}

/// The game in which intending strategy `a` means playing
/// `perturbed_crv(a, delta, k)`, with payoffs averaged over everyone's
/// trembles.
#[derive(Clone, Debug)]
pub struct PerturbedGame {
    delta: f64,
    game: AnonymousGame,
}

impl PerturbedGame {
    pub fn delta(&self) -> f64 {
        self.delta
    }

    /// The perturbed payoffs as an ordinary game.
    pub fn game(&self) -> &AnonymousGame {
        &self.game
    }
}

/// Builds the perturbed payoff tables. The outcome pmf of each opponent
/// partition is computed once and shared by every `(i, a)`.
pub fn build_perturbed_game(game: &AnonymousGame, delta: f64) -> Result<PerturbedGame> {
    if !(0.0..1.0).contains(&delta) {
        return Err(invalid(format!("delta must lie in [0, 1), got {delta}")));
    }
    let n = game.n();
    let k = game.k();
    if k == 1 {
        if delta > 0.0 {
            return Err(invalid("single-strategy games cannot be perturbed"));
        }
        return Ok(PerturbedGame {
            delta,
            game: game.clone(),
        });
    }
    let crvs: Vec<MixedStrategy> = (0..k).map(|j| perturbed_crv(j, delta, k)).collect::<Result<_>>()?;
    let engine = PmdEngine::new(n - 1, k)?;
    let lattice = game.lattice();
    let cells = lattice.len();
    let spread = delta / (k - 1) as f64;
    // per partition: the n·k perturbed payoffs, player-major
    let columns: Vec<Vec<f64>> = (0..cells)
        .into_par_iter()
        .map(|r| -> Result<Vec<f64>> {
            let x = lattice.unrank(r).counts();
            let opponents: Vec<MixedStrategy> = x
                .iter()
                .enumerate()
                .flat_map(|(j, &c)| std::iter::repeat_n(crvs[j].clone(), c))
                .collect();
            let dist = engine.pmf(&opponents)?;
            let mut out = Vec::with_capacity(n * k);
            for i in 0..n {
                let expect: Vec<f64> = (0..k)
                    .map(|a| game.table(i, a).iter().zip(dist.mass()).map(|(u, p)| u * p).sum())
                    .collect();
                let total: f64 = expect.iter().sum();
                for a in 0..k {
                    let v = (1.0 - delta) * expect[a] + spread * (total - expect[a]);
                    out.push(v.clamp(0.0, 1.0));
                }
            }
            Ok(out)
        })
        .collect::<Result<_>>()?;
    let mut payoffs = vec![0.0; n * k * cells];
    for (r, col) in columns.iter().enumerate() {
        for (ia, v) in col.iter().enumerate() {
            payoffs[ia * cells + r] = *v;
        }
    }
    Ok(PerturbedGame {
        delta,
        game: AnonymousGame::new(n, k, payoffs)?,
    })
}

/// The smallest λ with `|u(x) − u(y)| <= λ‖x − y‖₁` for all partitions,
/// found by scanning pairs that differ by moving one opponent.
pub fn empirical_lipschitz(game: &AnonymousGame) -> f64 {
    let n = game.n();
    let k = game.k();
    if n < 2 || k < 2 {
        return 0.0;
    }
    let lattice = game.lattice();
    let ranker = Ranker::new(n - 1, k).expect("k >= 1");
    (0..n * k)
        .into_par_iter()
        .map(|ia| {
            let table = game.table(ia / k, ia % k);
            let mut worst = 0.0f64;
            let mut y = vec![0usize; k];
            for (r, x) in lattice.points().iter().enumerate() {
                y.copy_from_slice(x.counts());
                for from in 0..k {
                    if y[from] == 0 {
                        continue;
                    }
                    y[from] -= 1;
                    // each unordered pair is seen from both ends; one suffices
                    for to in from + 1..k {
                        y[to] += 1;
                        let s = ranker.rank(&y);
                        worst = worst.max((table[r] - table[s]).abs());
                        y[to] -= 1;
                    }
                    y[from] += 1;
                }
            }
            worst / 2.0
        })
        .reduce(|| 0.0, f64::max)
}

/// A pure strategy per player together with the partition it induces.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PureProfile {
    assignment: Vec<usize>,
    partition: Partition,
}

impl PureProfile {
    pub fn new(k: usize, assignment: Vec<usize>) -> Result<Self> {
        if assignment.iter().any(|&a| a >= k) {
            return Err(invalid(format!("assignment uses a strategy outside 0..{k}")));
        }
        let mut counts = vec![0; k];
        for &a in &assignment {
            counts[a] += 1;
        }
        Ok(Self {
            assignment,
            partition: Partition::new(counts)?,
        })
    }

    pub fn assignment(&self) -> &[usize] {
        &self.assignment
    }

    pub fn partition(&self) -> &Partition {
        &self.partition
    }

    /// Maps each intended strategy to its trembling CRV.
    pub fn to_mixed(&self, delta: f64) -> Result<MixedProfile> {
        let k = self.partition.k();
        MixedProfile::new(
            self.assignment
                .iter()
                .map(|&a| perturbed_crv(a, delta, k))
                .collect::<Result<_>>()?,
        )
    }
}

impl fmt::Display for PureProfile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, a) in self.assignment.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            write!(f, "{}", a + 1)?;
        }
        Ok(())
    }
}

/// Largest gain of any player from a pure deviation at a pure profile.
pub fn pure_regret(game: &AnonymousGame, profile: &PureProfile) -> Result<f64> {
    let n = game.n();
    let k = game.k();
    if profile.assignment.len() != n || profile.partition.k() != k {
        return Err(invalid("pure profile does not match the game"));
    }
    let mut worst = 0.0f64;
    let mut rest = profile.partition.counts().to_vec();
    for (i, &a) in profile.assignment.iter().enumerate() {
        rest[a] -= 1;
        let r = game.lattice().rank(&rest);
        let best = (0..k).map(|b| game.payoff(i, b, r)).fold(f64::NEG_INFINITY, f64::max);
        worst = worst.max(best - game.payoff(i, a, r));
        rest[a] += 1;
    }
    Ok(worst)
}

/// Scans partitions of the n players in canonical order and returns the
/// first one whose slots can be filled by players for whom the slot's
/// strategy is a `tau`-best response, matching players to slots by max flow.
pub fn pure_eq_search(game: &AnonymousGame, tau: f64) -> Result<PureProfile> {
    if !(tau >= 0.0) {
        return Err(invalid(format!("tau must be >= 0, got {tau}")));
    }
    let n = game.n();
    let k = game.k();
    let opp = game.lattice();
    // best[i * cells + r] = max_a u^i_a at opponent partition r
    let cells = opp.len();
    let mut best = vec![f64::NEG_INFINITY; n * cells];
    for i in 0..n {
        for a in 0..k {
            for (r, u) in game.table(i, a).iter().enumerate() {
                let b = &mut best[i * cells + r];
                *b = b.max(*u);
            }
        }
    }
    let lattice = PartitionLattice::new(n, k)?;
    let total = lattice.len();
    let found = lattice
        .points()
        .par_iter()
        .find_map_first(|x| match_players(game, &best, x.counts(), tau));
    let assignment = found.ok_or_else(|| {
        Error::NotFound(format!("no {tau}-approximate pure equilibrium among {total} partitions"))
    })?;
    let profile = PureProfile::new(k, assignment)?;
    let regret = pure_regret(game, &profile)?;
    if regret > tau + VERIFY_TOL {
        return Err(Error::InternalConsistency(format!(
            "matched pure profile has regret {regret} above tau {tau}"
        )));
    }
    Ok(profile)
}

fn match_players(game: &AnonymousGame, best: &[f64], x: &[usize], tau: f64) -> Option<Vec<usize>> {
    let n = game.n();
    let k = game.k();
    let cells = game.cells();
    let opp = game.lattice();
    // nodes: source 0, players 1..=n, strategies n+1..=n+k, sink n+k+1
    let sink = n + k + 1;
    let mut net = FlowNetwork::new(n + k + 2);
    let mut rest = x.to_vec();
    let mut edges = Vec::new();
    for i in 0..n {
        net.add_edge(0, 1 + i, 1);
        let mut any = false;
        for a in 0..k {
            if x[a] == 0 {
                continue;
            }
            rest[a] -= 1;
            let r = opp.rank(&rest);
            rest[a] += 1;
            if game.payoff(i, a, r) >= best[i * cells + r] - tau - VERIFY_TOL {
                edges.push((i, a, net.add_edge(1 + i, 1 + n + a, 1)));
                any = true;
            }
        }
        if !any {
            return None;
        }
    }
    for (a, &slots) in x.iter().enumerate() {
        net.add_edge(1 + n + a, sink, slots as u64);
    }
    if net.max_flow(0, sink) < n as u64 {
        return None;
    }
    let mut assignment = vec![usize::MAX; n];
    for (i, a, e) in edges {
        if net.flow(e) == 1 {
            assignment[i] = a;
        }
    }
    Some(assignment)
}

/// `min(0.5, k^{11/3} · n^{-1/3})`.
pub fn default_delta(n: usize, k: usize) -> f64 {
    ((k as f64).powf(11.0 / 3.0) * (n as f64).powf(-1.0 / 3.0)).min(0.5)
}

#[derive(Clone, Debug)]
pub struct SmoothOutcome {
    pub pure: PureProfile,
    pub profile: MixedProfile,
    pub delta: f64,
    pub lipschitz: f64,
    pub tau: f64,
    /// Independently verified max regret in the original game.
    pub regret: f64,
    /// `delta + tau`.
    pub bound: f64,
}

pub fn solve_smooth(game: &AnonymousGame) -> Result<SmoothOutcome> {
    solve_smooth_with(game, None)
}

/// Perturbs, measures λ̂, searches for a `2kλ̂`-approximate pure equilibrium
/// of the perturbed game and maps it back.
pub fn solve_smooth_with(game: &AnonymousGame, delta: Option<f64>) -> Result<SmoothOutcome> {
    let n = game.n();
    let k = game.k();
    if k == 1 {
        let pure = PureProfile::new(1, vec![0; n])?;
        let profile = pure.to_mixed(0.0)?;
        let regret = max_regret(game, &profile)?;
        return Ok(SmoothOutcome {
            pure,
            profile,
            delta: 0.0,
            lipschitz: 0.0,
            tau: 0.0,
            regret,
            bound: 0.0,
        });
    }
    let delta = delta.unwrap_or_else(|| default_delta(n, k));
    let perturbed = build_perturbed_game(game, delta)?;
    let lipschitz = empirical_lipschitz(perturbed.game());
    let tau = 2.0 * k as f64 * lipschitz;
    let pure = pure_eq_search(perturbed.game(), tau).map_err(|e| match e {
        Error::NotFound(msg) => Error::InternalConsistency(format!(
            "{msg}, although the measured Lipschitz constant guarantees one"
        )),
        other => other,
    })?;
    let profile = pure.to_mixed(delta)?;
    let regret = max_regret(game, &profile)?;
    let bound = delta + tau;
    if regret > bound + VERIFY_TOL {
        return Err(Error::InternalConsistency(format!(
            "mapped-back profile has regret {regret} above delta + 2k·lambda = {bound}"
        )));
    }
    Ok(SmoothOutcome {
        pure,
        profile,
        delta,
        lipschitz,
        tau,
        regret,
        bound,
    })
}

/// Exact `Var[vᵀX]` for `X = perturbed_crv(j, delta, k)`, with `v` a unit
/// vector orthogonal to the all-ones vector.
pub fn crv_direction_variance(j: usize, delta: f64, k: usize, v: &[f64]) -> Result<f64> {
    if v.len() != k {
        return Err(invalid(format!("direction has {} coordinates, expected {k}", v.len())));
    }
    let norm: f64 = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    let along_ones: f64 = v.iter().sum();
    if (norm - 1.0).abs() > 1e-9 || along_ones.abs() > 1e-9 {
        return Err(invalid("direction must be a unit vector orthogonal to the all-ones vector"));
    }
    let crv = perturbed_crv(j, delta, k)?;
    let mean = crv.expect(v);
    let second: f64 = crv.probs().iter().zip(v).map(|(p, x)| p * x * x).sum();
    Ok((second - mean * mean).max(0.0))
}

/// Total variation between the perturbed outcome of partition `x`
/// (projected onto its first k−1 coordinates) and the discretized Gaussian
/// with the same mean and covariance. Gaussian mass outside the support
/// box counts toward the distance.
pub fn perturbed_gaussian_tv(x: &[usize], delta: f64) -> Result<f64> {
    let k = x.len();
    if k < 2 {
        return Err(invalid("need k >= 2"));
    }
    if !(delta > 0.0 && delta < 1.0) {
        return Err(invalid(format!("delta must lie in (0, 1), got {delta}")));
    }
    let m: usize = x.iter().sum();
    let kinds: Vec<MixedStrategy> = (0..k).map(|j| perturbed_crv(j, delta, k)).collect::<Result<_>>()?;
    let crvs: Vec<MixedStrategy> = x
        .iter()
        .enumerate()
        .flat_map(|(j, &c)| std::iter::repeat_n(kinds[j].clone(), c))
        .collect();
    let dist = PmdEngine::new(m, k)?.pmf(&crvs)?;
    let d = k - 1;
    let mut mu = vec![0.0; d];
    let mut sigma = vec![vec![0.0; d]; d];
    for crv in &crvs {
        let p = crv.probs();
        for a in 0..d {
            mu[a] += p[a];
            sigma[a][a] += p[a];
            for b in 0..d {
                sigma[a][b] -= p[a] * p[b];
            }
        }
    }
    let bounds = IntegerBox::new(vec![0; d], vec![m as i64; d])?;
    let gauss = discretized_gaussian_pmf(&mu, &sigma, &bounds)?;
    let mut seen = vec![0.0; bounds.len()];
    let mut counts = vec![0usize; k];
    counts[k - 1] = m;
    for &p in dist.mass() {
        let z: Vec<i64> = counts[..d].iter().map(|&c| c as i64).collect();
        seen[bounds.offset(&z).expect("partition lies in the box")] = p;
        next_partition(&mut counts);
    }
    let diff: f64 = seen.iter().zip(&gauss.mass).map(|(p, g)| (p - g).abs()).sum();
    Ok(0.5 * (diff + gauss.truncated_mass))
}

//! Approximate to well-supported conversion, padding with dummy players,
//! and their composition around an arbitrary base solver.

use rayon::prelude::*;

use crate::error::{invalid, Error, Result};
use crate::game::{
    expected_payoffs, max_regret, verify_well_supported, AnonymousGame, MixedProfile, MixedStrategy, VERIFY_TOL,
};

pub const DEFAULT_PADDING_CAP: usize = 10_000;

/// Turns an `eps²/(4n)`-approximate equilibrium into an `eps`-well-supported
/// one: every player moves the mass on strategies that are not
/// `eps/2`-best responses onto its lowest-index exact best response.
pub fn ane2wsne(game: &AnonymousGame, profile: &MixedProfile, eps: f64) -> Result<MixedProfile> {
    if !(eps > 0.0) {
        return Err(invalid(format!("eps must be positive, got {eps}")));
    }
    game.check_profile(profile)?;
    let n = game.n() as f64;
    let budget = eps * eps / (4.0 * n);
    let regret = max_regret(game, profile)?;
    if regret > budget + VERIFY_TOL {
        return Err(Error::Precondition(format!(
            "profile has regret {regret}, above the required eps^2/(4n) = {budget}"
        )));
    }
    let moved: Vec<MixedStrategy> = (0..game.n())
        .into_par_iter()
        .map(|i| -> Result<MixedStrategy> {
            let payoffs = expected_payoffs(game, i, &profile.others(i))?;
            let best = payoffs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            let target = payoffs.iter().position(|&u| u == best).expect("k >= 1");
            let mut probs = profile.get(i).probs().to_vec();
            let mut bad = 0.0;
            for (a, p) in probs.iter_mut().enumerate() {
                if payoffs[a] < best - eps / 2.0 - VERIFY_TOL {
                    bad += *p;
                    *p = 0.0;
                }
            }
            let allowed = eps / (2.0 * n) + VERIFY_TOL;
            if bad > allowed {
                return Err(Error::InternalConsistency(format!(
                    "player {i} has {bad} mass on bad strategies, above {allowed}"
                )));
            }
            probs[target] += bad;
            Ok(MixedStrategy::from_raw(probs))
        })
        .collect::<Result<_>>()?;
    let out = MixedProfile::new(moved)?;
    let report = verify_well_supported(game, &out, eps)?;
    if !report.holds {
        return Err(Error::InternalConsistency(format!(
            "converted profile is not {eps}-well-supported: {:?}",
            report.violations
        )));
    }
    Ok(out)
}

/// A game padded with dummy players who always prefer strategy 1. Real
/// players keep their indices; dummies follow them.
#[derive(Clone, Debug)]
pub struct PaddedGame {
    game: AnonymousGame,
    original_n: usize,
}

impl PaddedGame {
    pub fn game(&self) -> &AnonymousGame {
        &self.game
    }

    pub fn original_n(&self) -> usize {
        self.original_n
    }

    pub fn dummies(&self) -> usize {
        self.game.n() - self.original_n
    }
}

/// Dummies earn 1 on strategy 1 and 0 elsewhere. A real player facing
/// partition `x` earns its original payoff at `x` with the dummies removed
/// from strategy 1, or 0 if fewer than all dummies are there.
pub fn pad_game(game: &AnonymousGame, n_prime: usize) -> Result<PaddedGame> {
    let n = game.n();
    if n_prime < n {
        return Err(invalid(format!("cannot pad {n} players down to {n_prime}")));
    }
    let extra = n_prime - n;
    let mut shifted = vec![0usize; game.k()];
    let padded = AnonymousGame::from_fn(n_prime, game.k(), |i, a, x| {
        if i >= n {
            return if a == 0 { 1.0 } else { 0.0 };
        }
        if x[0] < extra {
            return 0.0;
        }
        shifted.copy_from_slice(x);
        shifted[0] -= extra;
        game.payoff(i, a, game.lattice().rank(&shifted))
    })?;
    Ok(PaddedGame {
        game: padded,
        original_n: n,
    })
}

/// Drops the dummies from an `eps`-well-supported equilibrium of the padded
/// game.
pub fn unpad_profile(padded: &PaddedGame, profile: &MixedProfile, eps: f64, original: &AnonymousGame) -> Result<MixedProfile> {
    if original.n() != padded.original_n || original.k() != padded.game.k() {
        return Err(invalid("original game does not match the padded game"));
    }
    let report = verify_well_supported(&padded.game, profile, eps)?;
    if !report.holds {
        return Err(Error::Precondition(format!(
            "profile is not {eps}-well-supported in the padded game"
        )));
    }
    if let Some(d) = (padded.original_n..padded.game.n()).find(|&d| profile.get(d).prob(0) != 1.0) {
        return Err(Error::Precondition(format!(
            "dummy player {} does not play strategy 1 purely",
            d + 1
        )));
    }
    let out = MixedProfile::new(profile.strategies()[..padded.original_n].to_vec())?;
    let report = verify_well_supported(original, &out, eps)?;
    if !report.holds {
        return Err(Error::InternalConsistency(format!(
            "unpadded profile is not {eps}-well-supported: {:?}",
            report.violations
        )));
    }
    Ok(out)
}

#[derive(Clone, Debug)]
pub struct PipelineOutcome {
    pub profile: MixedProfile,
    /// Player count after padding, if padding was needed.
    pub padded_n: Option<usize>,
    /// Regret requested from the base solver.
    pub base_target: f64,
}

/// `base_solver(game, target)` must return a profile with regret at most
/// `target`. The output is `eps`-well-supported in `game`.
pub fn fptas_pipeline<F>(game: &AnonymousGame, eps: f64, gamma: f64, cap: usize, base_solver: F) -> Result<PipelineOutcome>
where
    F: Fn(&AnonymousGame, f64) -> Result<MixedProfile>,
{
    if !(eps > 0.0 && eps < 1.0) {
        return Err(invalid(format!("eps must lie in (0, 1), got {eps}")));
    }
    if !(gamma > 0.0) {
        return Err(invalid(format!("gamma must be positive, got {gamma}")));
    }
    let n = game.n();
    if (n as f64).powf(-gamma) <= eps {
        let target = eps * eps / (4.0 * n as f64);
        let approx = base_solver(game, target)?;
        return Ok(PipelineOutcome {
            profile: ane2wsne(game, &approx, eps)?,
            padded_n: None,
            base_target: target,
        });
    }
    let wanted = (1.0 / eps).powf(1.0 / gamma);
    if wanted > cap as f64 {
        return Err(Error::ResourceLimit(format!(
            "padding needs n' = {} players, above the cap of {cap}",
            wanted.ceil()
        )));
    }
    let n_prime = (wanted - 1e-9).ceil() as usize;
    let padded = pad_game(game, n_prime)?;
    let target = eps * eps / (4.0 * n_prime as f64);
    let approx = base_solver(padded.game(), target)?;
    let ws = ane2wsne(padded.game(), &approx, eps)?;
    Ok(PipelineOutcome {
        profile: unpad_profile(&padded, &ws, eps, game)?,
        padded_n: Some(n_prime),
        base_target: target,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::{generate_game, regret, GameKind};
    use crate::oracle::grid_profile_search;

    fn ms(p: &[f64]) -> MixedStrategy {
        MixedStrategy::new(p.to_vec()).unwrap()
    }

    #[test]
    fn exact_equilibrium_unchanged() {
        let g = generate_game(3, 2, GameKind::Dominant, 0).unwrap();
        let p = MixedProfile::pure(3, 2, 0);
        assert_eq!(ane2wsne(&g, &p, 0.2).unwrap(), p);
    }

    #[test]
    fn dominated_mass_is_moved() {
        let g = generate_game(2, 2, GameKind::Dominant, 0).unwrap();
        // regret 0.001 <= 0.2^2/8 = 0.005
        let p = MixedProfile::new(vec![ms(&[0.999, 0.001]), ms(&[1.0, 0.0])]).unwrap();
        let out = ane2wsne(&g, &p, 0.2).unwrap();
        assert_eq!(out, MixedProfile::pure(2, 2, 0));
    }

    #[test]
    fn precondition_checked() {
        let g = generate_game(2, 2, GameKind::Dominant, 0).unwrap();
        let p = MixedProfile::new(vec![ms(&[0.9, 0.1]), ms(&[1.0, 0.0])]).unwrap();
        assert!(matches!(ane2wsne(&g, &p, 0.2), Err(Error::Precondition(_))));
    }

    #[test]
    fn padding_to_same_size_is_identity() {
        let g = generate_game(3, 3, GameKind::UniformRandom, 4).unwrap();
        assert_eq!(pad_game(&g, 3).unwrap().game(), &g);
    }

    #[test]
    fn padded_cells_follow_shift() {
        let g = generate_game(2, 2, GameKind::UniformRandom, 6).unwrap();
        let pg = pad_game(&g, 4).unwrap();
        let padded = pg.game();
        for (r, x) in padded.lattice().points().iter().enumerate() {
            let x = x.counts();
            for i in 0..2 {
                for a in 0..2 {
                    let expected = if x[0] >= 2 {
                        g.payoff(i, a, g.lattice().rank(&[x[0] - 2, x[1]]))
                    } else {
                        0.0
                    };
                    assert_eq!(padded.payoff(i, a, r), expected);
                }
            }
            for d in 2..4 {
                assert_eq!(padded.payoff(d, 0, r), 1.0);
                assert_eq!(padded.payoff(d, 1, r), 0.0);
            }
        }
    }

    #[test]
    fn dummy_has_no_regret_on_strategy_one() {
        let g = generate_game(2, 3, GameKind::UniformRandom, 1).unwrap();
        let pg = pad_game(&g, 4).unwrap();
        let p = MixedProfile::new(vec![
            ms(&[0.2, 0.3, 0.5]),
            ms(&[0.1, 0.1, 0.8]),
            MixedStrategy::pure(3, 0),
            MixedStrategy::pure(3, 0),
        ])
        .unwrap();
        assert_eq!(regret(pg.game(), &p, 3).unwrap(), 0.0);
    }

    #[test]
    fn unpad_rejects_mixed_dummy() {
        let g = generate_game(1, 2, GameKind::Constant, 0).unwrap();
        let pg = pad_game(&g, 2).unwrap();
        let p = MixedProfile::new(vec![ms(&[0.5, 0.5]), ms(&[0.5, 0.5])]).unwrap();
        assert!(matches!(unpad_profile(&pg, &p, 0.1, &g), Err(Error::Precondition(_))));
    }

    #[test]
    fn padded_dominant_round_trip() {
        let g = generate_game(2, 2, GameKind::Dominant, 0).unwrap();
        let pg = pad_game(&g, 3).unwrap();
        let sol = crate::oracle::grid_search(pg.game(), 0.5, 0.1, 1000, crate::oracle::SearchTarget::WellSupported).unwrap();
        assert_eq!(unpad_profile(&pg, &sol, 0.1, &g).unwrap(), MixedProfile::pure(2, 2, 0));
    }

    #[test]
    fn pipeline_branches() {
        let oracle = |g: &AnonymousGame, target: f64| grid_profile_search(g, 0.5, target, 100_000);
        let g = generate_game(4, 2, GameKind::Dominant, 0).unwrap();
        let direct = fptas_pipeline(&g, 0.5, 1.0, 100, oracle).unwrap();
        assert_eq!(direct.padded_n, None);

        let tiny = generate_game(1, 2, GameKind::UniformRandom, 2).unwrap();
        let padded = fptas_pipeline(&tiny, 0.5, 1.0, 100, oracle).unwrap();
        assert_eq!(padded.padded_n, Some(2));
        assert!(verify_well_supported(&tiny, &padded.profile, 0.5).unwrap().holds);

        assert!(matches!(
            fptas_pipeline(&tiny, 0.001, 0.5, 10_000, oracle),
            Err(Error::ResourceLimit(_))
        ));
    }
}

use std::str::FromStr;
use std::time::Instant;

use anongame::diagnostics::{fourier_check, spectrum_sweep, variance_sweep};
use anongame::game::VERIFY_TOL;
use anongame::io::{load_game, load_profile, save_game, save_profile};
use anongame::moment_search::{representative_diagnostic, MomentSearchPlan};
use anongame::oracle::{grid_search, SearchTarget};
use anongame::pmd::default_moment_degree;
use anongame::smoothing::solve_smooth_with;
use anongame::{
    ane2wsne, fptas_pipeline, generate_game, grid_profile_search, max_regret, moment_search_with, pad_game, pmd_pmf,
    verify_well_supported, AnonymousGame, Error, GameKind, GridSpec, MixedProfile, MomentSearchConfig, Result, RunReport,
};

use crate::{Algo, Base, BenchArgs, Cli, Command, ConvertCommand, DiagArgs, MomentArgs, OracleCommand, PmfCommand, SolveArgs};

/// How a command that ran to completion ended.
pub enum Outcome {
    Verified,
    Failed,
}

impl Outcome {
    fn from_bool(ok: bool) -> Self {
        if ok {
            Self::Verified
        } else {
            Self::Failed
        }
    }
}

pub fn run(cli: &Cli) -> Result<Outcome> {
    match &cli.command {
        Command::Gen(a) => {
            let kind = GameKind::from_str(&a.kind)?;
            let game = generate_game(a.n, a.k, kind, a.seed)?;
            save_game(&game, &a.output)?;
            let mut r = RunReport::new("gen");
            r.push("n", a.n).push("k", a.k).push("kind", kind).push("seed", a.seed);
            r.push("output", a.output.display());
            print!("{r}");
            Ok(Outcome::Verified)
        }
        Command::Solve(a) => solve(cli, a),
        Command::Verify(a) => {
            let game = load_game(&a.game)?;
            let profile = load_profile(&a.profile)?;
            game.check_profile(&profile)?;
            let regret = max_regret(&game, &profile)?;
            let mut r = RunReport::new("verify");
            r.push("n", game.n()).push("k", game.k()).push("eps", a.eps).push("regret", regret);
            let ok = if a.well_supported {
                let ws = verify_well_supported(&game, &profile, a.eps)?;
                r.push("violations", ws.violations.len());
                for v in &ws.violations {
                    r.push(&format!("violation.{}.{}", v.player + 1, v.strategy + 1), v.gap);
                }
                ws.holds
            } else {
                regret <= a.eps + VERIFY_TOL
            };
            r.push("criterion", if a.well_supported { "well-supported" } else { "approximate" });
            r.push("verified", ok);
            print!("{r}");
            Ok(Outcome::from_bool(ok))
        }
        Command::Convert(ConvertCommand::Ws {
            game,
            profile,
            eps,
            output,
        }) => {
            let game = load_game(game)?;
            let profile = load_profile(profile)?;
            let before = max_regret(&game, &profile)?;
            let out = ane2wsne(&game, &profile, *eps)?;
            let ws = verify_well_supported(&game, &out, *eps)?;
            let mut r = RunReport::new("convert-ws");
            r.push("n", game.n()).push("k", game.k()).push("eps", eps);
            r.push("regret_in", before).push("regret", max_regret(&game, &out)?);
            r.push("well_supported", ws.holds);
            push_profile(&mut r, &out);
            if ws.holds {
                save_profile(&out, output)?;
            }
            print!("{r}");
            Ok(Outcome::from_bool(ws.holds))
        }
        Command::Convert(ConvertCommand::Pad { game, n_prime, output }) => {
            let game = load_game(game)?;
            let padded = pad_game(&game, *n_prime)?;
            save_game(padded.game(), output)?;
            let mut r = RunReport::new("convert-pad");
            r.push("n", game.n()).push("k", game.k()).push("n_prime", n_prime);
            r.push("dummies", padded.dummies()).push("output", output.display());
            print!("{r}");
            Ok(Outcome::Verified)
        }
        Command::Pipeline(a) => {
            let game = load_game(&a.game)?;
            let cfg = moment_config(&a.moment);
            let base = |g: &AnonymousGame, target: f64| -> Result<MixedProfile> {
                match a.base {
                    Base::Oracle => grid_profile_search(g, a.step, target, a.profile_cap),
                    Base::MomentSearch => {
                        let out = moment_search_with(g, &cfg)?;
                        if out.regret > target + VERIFY_TOL {
                            return Err(Error::NotFound(format!(
                                "moment search reached regret {} but the pipeline needs {target}",
                                out.regret
                            )));
                        }
                        Ok(out.profile)
                    }
                }
            };
            let out = fptas_pipeline(&game, a.eps, a.gamma, a.padding_cap, base)?;
            let ws = verify_well_supported(&game, &out.profile, a.eps)?;
            let mut r = RunReport::new("pipeline");
            r.push("n", game.n()).push("k", game.k()).push("eps", a.eps).push("gamma", a.gamma);
            r.push("base", if a.base == Base::Oracle { "oracle" } else { "moment-search" });
            match out.padded_n {
                Some(n) => r.push("padded_n", n),
                None => r.push("padded_n", "none"),
            };
            r.push("base_target", out.base_target);
            r.push("regret", max_regret(&game, &out.profile)?);
            r.push("well_supported", ws.holds);
            push_profile(&mut r, &out.profile);
            if let (true, Some(path)) = (ws.holds, &a.output) {
                save_profile(&out.profile, path)?;
            }
            print!("{r}");
            Ok(Outcome::from_bool(ws.holds))
        }
        Command::Bench(a) => bench(a),
        Command::Diag(a) => diag(a),
        Command::Oracle(OracleCommand::Search {
            game,
            step,
            eps,
            well_supported,
            cap,
            output,
        }) => {
            let game = load_game(game)?;
            let target = if *well_supported {
                SearchTarget::WellSupported
            } else {
                SearchTarget::Approximate
            };
            let started = Instant::now();
            let profile = grid_search(&game, *step, *eps, *cap, target)?;
            let elapsed = started.elapsed();
            let regret = max_regret(&game, &profile)?;
            let ok = if *well_supported {
                verify_well_supported(&game, &profile, *eps)?.holds
            } else {
                regret <= eps + VERIFY_TOL
            };
            let mut r = RunReport::new("oracle-search");
            r.push("n", game.n()).push("k", game.k()).push("step", step).push("eps", eps);
            r.push("criterion", if *well_supported { "well-supported" } else { "approximate" });
            r.push("regret", regret).push("verified", ok);
            if cli.timings {
                r.push("search_ms", elapsed.as_millis());
            }
            push_profile(&mut r, &profile);
            if let (true, Some(path)) = (ok, output) {
                save_profile(&profile, path)?;
            }
            print!("{r}");
            Ok(Outcome::from_bool(ok))
        }
        Command::Pmf(PmfCommand::Dump { profile, player }) => {
            let profile = load_profile(profile)?;
            let k = profile.get(0).k();
            let crvs = match player {
                Some(i) if (1..=profile.n()).contains(i) => profile.others(i - 1),
                Some(i) => return Err(Error::InvalidArgument(format!("player {i} out of range 1..={}", profile.n()))),
                None => profile.strategies().to_vec(),
            };
            print!("{}", pmd_pmf(k, &crvs)?.dump());
            Ok(Outcome::Verified)
        }
    }
}

fn moment_config(a: &MomentArgs) -> MomentSearchConfig {
    let mut cfg = MomentSearchConfig::new(a.c).with_coarsen(a.grid_coarsen);
    cfg.moment_degree = a.moment_degree;
    cfg.data_fraction = a.data_fraction;
    cfg.admit_fraction = a.admit_fraction;
    cfg
}

// Refuses grids above the cap up front so the message can point at the
// coarsening knob.
fn check_grid(n: usize, k: usize, cfg: &MomentSearchConfig) -> Result<GridSpec> {
    if !(cfg.c > 0.0 && cfg.c < 1.0) {
        return Err(Error::InvalidArgument(format!("--c must lie in (0, 1), got {}", cfg.c)));
    }
    let eps = (n as f64).powf(-cfg.c);
    let grid = GridSpec::for_game(n, k, eps)?.coarsened(cfg.grid_coarsen)?;
    let size = grid.size()?;
    if size > cfg.grid_cap as u128 {
        return Err(Error::ResourceLimit(format!(
            "the strategy grid at step {} has {size} points per player, above the guardrail of {}; \
             rerun with a larger --grid-coarsen",
            grid.step(),
            cfg.grid_cap
        )));
    }
    Ok(grid)
}

fn push_profile(r: &mut RunReport, profile: &MixedProfile) {
    for (i, s) in profile.strategies().iter().enumerate() {
        let probs: Vec<String> = s.probs().iter().map(f64::to_string).collect();
        r.push(&format!("strategy.{}", i + 1), probs.join(","));
    }
}

fn solve(cli: &Cli, a: &SolveArgs) -> Result<Outcome> {
    let game = load_game(&a.game)?;
    let (n, k) = (game.n(), game.k());
    let mut r;
    let profile;
    let ok;
    match a.algo {
        Algo::MomentSearch => {
            let cfg = moment_config(&a.moment);
            check_grid(n, k, &cfg)?;
            let out = moment_search_with(&game, &cfg).map_err(|e| match e {
                Error::ResourceLimit(m) => Error::ResourceLimit(format!(
                    "{m}; rerun with a larger --grid-coarsen or a smaller --moment-degree"
                )),
                other => other,
            })?;
            let regret = max_regret(&game, &out.profile)?;
            ok = regret <= out.eps + VERIFY_TOL;
            r = RunReport::new("moment-search");
            r.push("n", n).push("k", k).push("c", cfg.c).push("eps", out.eps);
            r.push("grid_coarsen", cfg.grid_coarsen).push("grid_step", out.grid.step());
            r.push("grid_size", out.grid_size).push("grid_classes", out.grid_classes);
            r.push("moment_degree", cfg.moment_degree.unwrap_or_else(|| default_moment_degree(cfg.c)));
            let sizes: Vec<String> = out.cover_sizes.iter().map(usize::to_string).collect();
            r.push("cover_sizes", sizes.join(","));
            r.push("candidate", out.candidates_examined).push("work", out.work);
            if cli.timings {
                r.push("build_ms", out.build_time.as_millis()).push("search_ms", out.search_time.as_millis());
            }
            r.push("regret", regret).push("verified", ok);
            profile = out.profile;
        }
        Algo::Smooth => {
            let started = Instant::now();
            let out = solve_smooth_with(&game, a.delta)?;
            let elapsed = started.elapsed();
            let regret = max_regret(&game, &out.profile)?;
            let bound = out.delta + 2.0 * k as f64 * out.lipschitz;
            ok = regret <= bound + VERIFY_TOL;
            r = RunReport::new("smooth");
            r.push("n", n).push("k", k).push("delta", out.delta).push("lambda", out.lipschitz);
            r.push("tau", out.tau).push("bound", bound);
            let pure: Vec<String> = out.pure.assignment().iter().map(|a| (a + 1).to_string()).collect();
            r.push("pure", pure.join(","));
            if cli.timings {
                r.push("solve_ms", elapsed.as_millis());
            }
            r.push("regret", regret).push("verified", ok);
            profile = out.profile;
        }
    }
    push_profile(&mut r, &profile);
    if let (true, Some(path)) = (ok, &a.output) {
        save_profile(&profile, path)?;
        r.push("output", path.display());
    }
    print!("{r}");
    Ok(Outcome::from_bool(ok))
}

fn parse_list(arg: &str, key: &str) -> Result<Vec<usize>> {
    let bad = || Error::InvalidArgument(format!("expected {key}=<comma-separated list>, got '{arg}'"));
    let rest = arg.strip_prefix(key).and_then(|s| s.strip_prefix('=')).ok_or_else(bad)?;
    rest.split(',').map(|v| v.trim().parse().map_err(|_| bad())).collect()
}

fn bench(a: &BenchArgs) -> Result<Outcome> {
    let [ns, ks] = a.sweep.as_slice() else {
        return Err(Error::InvalidArgument("--sweep takes n=<list> k=<list>".into()));
    };
    let ns = parse_list(ns, "n")?;
    let ks = parse_list(ks, "k")?;
    let cfg = moment_config(&a.moment);
    let mut all_ok = true;
    println!("n\tk\tseed\tstatus\tregret\tbound\tdelta\tlambda\tms");
    for &n in &ns {
        for &k in &ks {
            let plan = match a.algo {
                Algo::MomentSearch => Some(check_grid(n, k, &cfg).and_then(|_| MomentSearchPlan::new(n, k, &cfg))),
                Algo::Smooth => None,
            };
            for g in 0..a.games {
                let seed = a.seed + g;
                let game = generate_game(n, k, GameKind::UniformRandom, seed)?;
                let started = Instant::now();
                let row = match (&plan, a.algo) {
                    (Some(Err(e)), _) => Err(clone_error(e)),
                    (Some(Ok(plan)), _) => plan.solve(&game).and_then(|out| {
                        let regret = max_regret(&game, &out.profile)?;
                        Ok((regret, out.eps, "-".to_string(), "-".to_string()))
                    }),
                    (None, _) => solve_smooth_with(&game, a.delta).and_then(|out| {
                        let regret = max_regret(&game, &out.profile)?;
                        let bound = out.delta + 2.0 * k as f64 * out.lipschitz;
                        Ok((regret, bound, format!("{:.4}", out.delta), format!("{:.6}", out.lipschitz)))
                    }),
                };
                let ms = format!("{:.1}", started.elapsed().as_secs_f64() * 1e3);
                match row {
                    Ok((regret, bound, delta, lambda)) => {
                        let ok = regret <= bound + VERIFY_TOL;
                        all_ok &= ok;
                        let status = if ok { "ok" } else { "over-bound" };
                        println!("{n}\t{k}\t{seed}\t{status}\t{regret:.6}\t{bound:.6}\t{delta}\t{lambda}\t{ms}");
                    }
                    Err(e) => {
                        all_ok = false;
                        let status = match e {
                            Error::ResourceLimit(_) => "resource-limit",
                            _ => "error",
                        };
                        println!("{n}\t{k}\t{seed}\t{status}\t-\t-\t-\t-\t{ms}");
                    }
                }
            }
        }
    }
    Ok(Outcome::from_bool(all_ok))
}

fn clone_error(e: &Error) -> Error {
    match e {
        Error::ResourceLimit(m) => Error::ResourceLimit(m.clone()),
        other => Error::InternalConsistency(other.to_string()),
    }
}

fn diag(a: &DiagArgs) -> Result<Outcome> {
    let mut r = RunReport::new("diag");
    r.push("seed", a.seed);
    let mut ok = true;

    for &n in &a.representative_n {
        let rep = representative_diagnostic(n, 2, 0.5, a.pairs, 1.0, a.seed)?;
        let gap = rep.max_moment_gap();
        ok &= gap <= rep.eps + 1e-12;
        r.push(&format!("representative.n{n}.eps"), rep.eps);
        r.push(&format!("representative.n{n}.max_tv"), rep.max_tv());
        r.push(&format!("representative.n{n}.max_moment_gap"), gap);
    }

    let cells = spectrum_sweep(&[10, 50], &[2, 3], &[0.05, 0.2], a.trials, a.seed.wrapping_add(1))?;
    for c in &cells {
        ok &= c.min_margin >= -1e-9;
        r.push(&format!("spectrum.n{}.k{}.eps{}.min_margin", c.n, c.k, c.eps), c.min_margin);
    }

    let var = variance_sweep(a.samples, 5, a.seed.wrapping_add(2))?;
    ok &= var >= -1e-12;
    r.push("variance.min_margin", var);

    let f = fourier_check(20, 100, a.seed.wrapping_add(3))?;
    ok &= f.at_zero <= 1e-12 && f.modulus_excess <= 1e-12 && f.dft_gap <= 1e-10;
    r.push("fourier.at_zero", f.at_zero);
    r.push("fourier.modulus_excess", f.modulus_excess);
    r.push("fourier.dft_gap", f.dft_gap);

    r.push("verified", ok);
    print!("{r}");
    Ok(Outcome::from_bool(ok))
}

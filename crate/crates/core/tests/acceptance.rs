//! Acceptance gate: every criterion prints one PASS/FAIL line and the
//! binary exits nonzero if any hard criterion fails.

mod common;

use std::f64::consts::PI;
use std::time::{Duration, Instant};

use anongame::game::{expected_payoff, expected_payoffs, max_regret, regret, slack};
use anongame::moment_search::{representative_diagnostic, round_profile_to_grid, GridSpec, MomentSearchConfig, MomentSearchPlan};
use anongame::oracle::{brute_force_payoff, grid_search, SearchTarget};
use anongame::partition::PartitionLattice;
use anongame::pmd::{covariance, fourier_at, min_orthogonal_eigenvalue, pmd_pmf, tv_distance};
use anongame::reductions::{ane2wsne, pad_game, unpad_profile};
use anongame::smoothing::{crv_direction_variance, solve_smooth, solve_smooth_with};
use anongame::{generate_game, verify_well_supported, AnonymousGame, GameKind, MixedProfile};
use common::*;
use num_complex::Complex64;
use rand::Rng;

struct Verdict {
    pass: bool,
    detail: String,
}

fn verdict(pass: bool, detail: impl Into<String>) -> Verdict {
    Verdict {
        pass,
        detail: detail.into(),
    }
}

fn secs(d: Duration) -> String {
    format!("{:.2}s", d.as_secs_f64())
}

// 1. pmd_pmf against outcome enumeration, n <= 6, k <= 3, 50 collections each.
fn pmd_exactness() -> Verdict {
    let started = Instant::now();
    let mut worst = 0.0f64;
    let mut cases = 0;
    for m in 0..=6usize {
        for k in 1..=3usize {
            for seed in 0..50u64 {
                let mut r = rng(1_000 + seed * 97 + (m * 7 + k) as u64);
                let crvs: Vec<_> = (0..m).map(|_| random_crv(&mut r, k)).collect();
                let dist = pmd_pmf(k, &crvs).unwrap();
                let truth = enumerate_pmf(k, &crvs);
                let lattice = PartitionLattice::new(m, k).unwrap();
                for (x, p) in lattice.points().iter().zip(dist.mass()) {
                    let q = truth.get(x.counts()).copied().unwrap_or(0.0);
                    worst = worst.max((p - q).abs());
                }
                cases += 1;
            }
        }
    }
    let elapsed = started.elapsed();
    verdict(
        worst <= 1e-12 && elapsed < Duration::from_secs(5),
        format!("{cases} collections, max |diff| {worst:.2e}, {}", secs(elapsed)),
    )
}

// 2. expected_payoff against brute_force_payoff on 200 tuples.
fn payoff_agreement() -> Verdict {
    let mut r = rng(2_024);
    let mut worst = 0.0f64;
    for t in 0..200u64 {
        let n = r.random_range(1..=6usize);
        let k = r.random_range(1..=3usize);
        let game = generate_game(n, k, GameKind::UniformRandom, 50_000 + t).unwrap();
        let profile = random_profile(&mut r, n, k);
        let i = r.random_range(0..n);
        let a = r.random_range(0..k);
        let others = profile.others(i);
        let fast = expected_payoff(&game, i, a, &others).unwrap();
        let slow = brute_force_payoff(&game, i, a, &others).unwrap();
        worst = worst.max((fast - slow).abs());
    }
    verdict(worst <= 1e-10, format!("200 tuples, max |diff| {worst:.2e}"))
}

// 3. Moment search at c = 0.5, 20 seeds per configuration.
fn moment_search_contract() -> Verdict {
    let started = Instant::now();
    // (n, k, grid coarsening, moment degree)
    let configs = [(3usize, 2usize, 1.0, None), (4, 2, 1.0, None), (5, 2, 2.0, Some(3u32)), (3, 3, 24.0, None)];
    let mut failures = Vec::new();
    let mut notes = Vec::new();
    for (n, k, coarsen, degree) in configs {
        let mut cfg = MomentSearchConfig::new(0.5).with_coarsen(coarsen);
        cfg.moment_degree = degree;
        let plan = match MomentSearchPlan::new(n, k, &cfg) {
            Ok(p) => p,
            Err(e) => {
                failures.push(format!("n={n} k={k}: {e}"));
                continue;
            }
        };
        let eps = (n as f64).powf(-0.5);
        let mut worst = 0.0f64;
        for seed in 0..20u64 {
            let game = generate_game(n, k, GameKind::UniformRandom, 300 + seed).unwrap();
            match plan.solve(&game) {
                Ok(out) => {
                    let r = max_regret(&game, &out.profile).unwrap();
                    worst = worst.max(r);
                    if r > eps + 1e-9 {
                        failures.push(format!("n={n} k={k} seed={seed}: regret {r:.4} > {eps:.4}"));
                    }
                }
                Err(e) => failures.push(format!("n={n} k={k} seed={seed}: {e}")),
            }
        }
        notes.push(format!("n={n},k={k},F={coarsen}: max regret {worst:.3}/{eps:.3}"));
    }
    let elapsed = started.elapsed();
    if elapsed > Duration::from_secs(600) {
        failures.push(format!("runtime {} over 10 min", secs(elapsed)));
    }
    let detail = format!("{}; {}", notes.join("; "), secs(elapsed));
    if failures.is_empty() {
        verdict(true, detail)
    } else {
        verdict(false, format!("{detail}; failures: {}", failures.join(" | ")))
    }
}

// 4. Grid rounding moves each player by at most (k-1)·eps/(20n).
fn grid_rounding() -> Verdict {
    let mut r = rng(404);
    let mut worst_ratio = 0.0f64;
    for t in 0..100 {
        let n = r.random_range(1..=20usize);
        let k = r.random_range(2..=4usize);
        let eps = r.random_range(0.05..0.9);
        let spec = GridSpec::for_game(n, k, eps).unwrap();
        let profile = MixedProfile::new((0..n).map(|_| floored_crv(&mut r, k, spec.floor_prob())).collect()).unwrap();
        let rounded = match round_profile_to_grid(&profile, &spec) {
            Ok(p) => p,
            Err(e) => return verdict(false, format!("profile {t}: {e}")),
        };
        let bound = eps / (20.0 * n as f64) * (k - 1) as f64;
        for (a, b) in profile.strategies().iter().zip(rounded.strategies()) {
            let on_grid = b.probs()[..k - 1].iter().all(|p| {
                let u = p / spec.step();
                (u - u.round()).abs() < 1e-6
            });
            if !on_grid {
                return verdict(false, format!("profile {t} not on grid: {:?}", b.probs()));
            }
            worst_ratio = worst_ratio.max(a.tv_distance(b) / bound);
        }
    }
    verdict(
        worst_ratio <= 1.0 + 1e-9,
        format!("100 profiles, max TV / bound {worst_ratio:.4}"),
    )
}

// 5. Spectrum off the ones direction is at least n·eps/(k-1).
fn covariance_spectrum() -> Verdict {
    let mut worst_margin = f64::INFINITY;
    for n in [10usize, 50] {
        for k in [2usize, 3] {
            for eps in [0.05, 0.2] {
                let floor = eps / (k - 1) as f64;
                for seed in 0..100u64 {
                    let mut r = rng(5_000 + seed + 1000 * n as u64 + 100 * k as u64 + (eps * 100.0) as u64);
                    let crvs: Vec<_> = (0..n).map(|_| floored_crv(&mut r, k, floor)).collect();
                    let lam = min_orthogonal_eigenvalue(&covariance(k, &crvs).unwrap()).unwrap();
                    worst_margin = worst_margin.min(lam - n as f64 * floor);
                }
            }
        }
    }
    verdict(
        worst_margin >= -1e-9,
        format!("800 instances, min (lambda - n·eps/(k-1)) {worst_margin:.4}"),
    )
}

// 6. Smoothing: pure search never fails at tau = 2kλ̂ and the regret bound holds.
fn smoothing_contract() -> Verdict {
    let started = Instant::now();
    let mut failures = Vec::new();
    let mut notes = Vec::new();
    for k in [2usize, 3] {
        for n in [10usize, 20, 30] {
            let mut worst = 0.0f64;
            let mut lam = 0.0f64;
            for seed in 0..10u64 {
                let game = generate_game(n, k, GameKind::UniformRandom, 600 + seed).unwrap();
                match solve_smooth(&game) {
                    Ok(out) => {
                        let r = max_regret(&game, &out.profile).unwrap();
                        let bound = out.delta + 2.0 * k as f64 * out.lipschitz;
                        if r > bound + 1e-9 {
                            failures.push(format!("n={n} k={k} seed={seed}: regret {r} > {bound}"));
                        }
                        worst = worst.max(r / bound.max(1e-300));
                        lam = lam.max(out.lipschitz);
                    }
                    Err(e) => failures.push(format!("n={n} k={k} seed={seed}: {e}")),
                }
            }
            notes.push(format!("n={n},k={k}: max λ̂ {lam:.4}, regret/bound {worst:.3}"));
        }
    }
    // at the default delta = 0.5 two-strategy perturbations are uniform and
    // λ̂ vanishes; a smaller delta exercises the matching for k = 2 too
    for n in [10usize, 20, 30] {
        for seed in 0..10u64 {
            let game = generate_game(n, 2, GameKind::UniformRandom, 700 + seed).unwrap();
            match solve_smooth_with(&game, Some(0.2)) {
                Ok(out) => {
                    let r = max_regret(&game, &out.profile).unwrap();
                    if r > out.delta + out.tau + 1e-9 {
                        failures.push(format!("delta=0.2 n={n} seed={seed}: regret {r}"));
                    }
                }
                Err(e) => failures.push(format!("delta=0.2 n={n} seed={seed}: {e}")),
            }
        }
    }
    let elapsed = started.elapsed();
    if elapsed > Duration::from_secs(300) {
        failures.push(format!("runtime {} over 5 min", secs(elapsed)));
    }
    let detail = format!("{}; plus k=2 at delta=0.2; {}", notes.join("; "), secs(elapsed));
    if failures.is_empty() {
        verdict(true, detail)
    } else {
        verdict(false, format!("{detail}; failures: {}", failures.join(" | ")))
    }
}

// 7. Directional variance of a trembling CRV.
fn variance_bound() -> Verdict {
    let mut r = rng(707);
    let mut worst = f64::INFINITY;
    for _ in 0..1000 {
        let k = r.random_range(2..=5usize);
        let delta = r.random_range(0.0..=(k - 1) as f64 / k as f64);
        let j = r.random_range(0..k);
        let v = random_direction(&mut r, k);
        let var = crv_direction_variance(j, delta, k, &v).unwrap();
        worst = worst.min(var - delta / (k - 1) as f64);
    }
    verdict(worst >= -1e-12, format!("1000 samples, min (Var - delta/(k-1)) {worst:.2e}"))
}

// Builds a game in which `profile` is an approximate equilibrium with a
// chosen structure: support strategies of each player tie at the top, a few
// are slightly worse but still eps/2-good, and a small mass sits on clearly
// bad strategies. Payoffs are an affine image of a random game, so the
// tables stay generic.
fn constructed_instance(r: &mut rand_chacha::ChaCha8Rng, n: usize, k: usize, eps: f64, seed: u64) -> (AnonymousGame, MixedProfile) {
    let base = generate_game(n, k, GameKind::UniformRandom, seed).unwrap();
    let budget = eps * eps / (4.0 * n as f64);
    let mut strategies = Vec::with_capacity(n);
    let mut targets = Vec::with_capacity(n);
    for _ in 0..n {
        // role per strategy: 0 best, 1 slightly worse (good), 2 bad
        let mut role: Vec<u8> = (0..k).map(|_| r.random_range(0..3u8)).collect();
        role[r.random_range(0..k)] = 0;
        let gaps: Vec<f64> = role
            .iter()
            .map(|&t| match t {
                0 => 0.0,
                1 => r.random_range(0.0..eps / 2.0 * 0.9),
                _ => r.random_range(eps / 2.0 + 0.01..=0.35),
            })
            .collect();
        // spend at most 90% of the regret budget off the top strategies
        let mut w: Vec<f64> = (0..k).map(|a| if role[a] == 0 { r.random::<f64>() + 0.1 } else { 0.0 }).collect();
        let top: f64 = w.iter().sum();
        w.iter_mut().for_each(|x| *x /= top);
        let off: Vec<usize> = (0..k).filter(|&a| role[a] != 0).collect();
        let mut spent = 0.0;
        for &a in &off {
            let share = 0.9 * budget / off.len() as f64;
            let mass = (share / gaps[a]).min(0.5 / k as f64);
            w[a] = mass;
            spent += mass;
        }
        for a in 0..k {
            if role[a] == 0 {
                w[a] *= 1.0 - spent;
            }
        }
        strategies.push(normalize(w));
        targets.push(gaps);
    }
    let profile = MixedProfile::new(strategies).unwrap();
    let expected: Vec<Vec<f64>> = (0..n).map(|i| expected_payoffs(&base, i, &profile.others(i)).unwrap()).collect();
    let game = AnonymousGame::from_fn(n, k, |i, a, x| {
        let r_ = base.lattice().rank(x);
        // E' = 0.25·E + beta hits 0.6 − gap
        let beta = 0.6 - targets[i][a] - 0.25 * expected[i][a];
        (0.25 * base.payoff(i, a, r_) + beta).clamp(0.0, 1.0)
    })
    .unwrap();
    (game, profile)
}

// 8. Approximate to well-supported conversion, and the padding round trip.
fn reductions_contract() -> Verdict {
    let mut failures = Vec::new();
    let mut r = rng(808);
    let mut converted = 0;
    let mut moved_any = 0;
    for (n, k, eps) in [(3usize, 2usize, 0.5), (4, 3, 0.4), (5, 2, 0.2), (2, 4, 0.6)] {
        for t in 0..20u64 {
            let (game, profile) = constructed_instance(&mut r, n, k, eps, 8_000 + t);
            let budget = eps * eps / (4.0 * n as f64);
            let reg = max_regret(&game, &profile).unwrap();
            if reg > budget + 1e-9 {
                failures.push(format!("fixture n={n} k={k} t={t} has regret {reg} > {budget}"));
                continue;
            }
            match ane2wsne(&game, &profile, eps) {
                Ok(out) => {
                    if !verify_well_supported(&game, &out, eps).unwrap().holds {
                        failures.push(format!("n={n} k={k} t={t}: not well-supported"));
                    }
                    if out != profile {
                        moved_any += 1;
                    }
                    converted += 1;
                }
                Err(e) => failures.push(format!("n={n} k={k} t={t}: {e}")),
            }
        }
    }
    let mut round_trips = 0;
    for seed in 0..10u64 {
        let game = generate_game(2, 2, GameKind::UniformRandom, 900 + seed).unwrap();
        let eps = 0.6;
        let padded = pad_game(&game, 3).unwrap();
        let solved = match grid_search(padded.game(), 0.02, eps, 1_000_000, SearchTarget::WellSupported) {
            Ok(p) => p,
            Err(e) => {
                failures.push(format!("pad seed={seed}: {e}"));
                continue;
            }
        };
        match unpad_profile(&padded, &solved, eps, &game) {
            Ok(p) if verify_well_supported(&game, &p, eps).unwrap().holds => round_trips += 1,
            Ok(_) => failures.push(format!("pad seed={seed}: unpadded profile fails verification")),
            Err(e) => failures.push(format!("pad seed={seed}: {e}")),
        }
    }
    let detail = format!("{converted}/80 conversions ({moved_any} moved mass), {round_trips}/10 padding round trips");
    if failures.is_empty() {
        verdict(true, detail)
    } else {
        verdict(false, format!("{detail}; failures: {}", failures.join(" | ")))
    }
}

// 9. A δ-best response against X stays a (δ + 2ε)-best response against any
// Y whose opponent distribution is within ε in total variation.
fn tv_robustness() -> Verdict {
    let mut r = rng(909);
    let mut worst = f64::NEG_INFINITY;
    let mut max_tv = 0.0f64;
    for t in 0..50u64 {
        let n = r.random_range(2..=6usize);
        let k = r.random_range(2..=3usize);
        let game = generate_game(n, k, GameKind::UniformRandom, 9_000 + t).unwrap();
        let x = random_profile(&mut r, n, k);
        let i = r.random_range(0..n);
        let delta = regret(&game, &x, i).unwrap();
        let mix = r.random_range(0.0..0.5);
        let y = MixedProfile::new(
            x.strategies()
                .iter()
                .map(|s| {
                    let other = random_crv(&mut r, k);
                    normalize(s.probs().iter().zip(other.probs()).map(|(a, b)| (1.0 - mix) * a + mix * b).collect())
                })
                .collect(),
        )
        .unwrap();
        let eps = tv_distance(&pmd_pmf(k, &x.others(i)).unwrap(), &pmd_pmf(k, &y.others(i)).unwrap()).unwrap();
        max_tv = max_tv.max(eps);
        let payoffs = expected_payoffs(&game, i, &y.others(i)).unwrap();
        let against_y = slack(&payoffs, x.get(i));
        worst = worst.max(against_y - (delta + 2.0 * eps));
    }
    verdict(
        worst <= 1e-9,
        format!("50 pairs (TV up to {max_tv:.3}), max (regret - delta - 2eps) {worst:.3}"),
    )
}

// 10. Fourier transform identities against the DFT of the exact pmf.
fn fourier_identities() -> Verdict {
    let mut worst_dft = 0.0f64;
    let mut worst_norm = 0.0f64;
    let mut worst_zero = 0.0f64;
    for seed in 0..20u64 {
        let mut r = rng(10_000 + seed);
        let m = r.random_range(1..=12usize);
        let k = r.random_range(2..=4usize);
        let crvs: Vec<_> = (0..m).map(|_| random_crv(&mut r, k)).collect();
        worst_zero = worst_zero.max((fourier_at(&crvs, &vec![0.0; k]).unwrap() - Complex64::new(1.0, 0.0)).norm());
        let dist = pmd_pmf(k, &crvs).unwrap();
        let lattice = PartitionLattice::new(m, k).unwrap();
        for _ in 0..100 {
            let xi: Vec<f64> = (0..k).map(|_| r.random::<f64>() * 2.0 - 1.0).collect();
            let value = fourier_at(&crvs, &xi).unwrap();
            worst_norm = worst_norm.max(value.norm() - 1.0);
            let dft: Complex64 = lattice
                .points()
                .iter()
                .zip(dist.mass())
                .map(|(x, p)| {
                    let phase: f64 = x.counts().iter().zip(&xi).map(|(&c, &f)| c as f64 * f).sum();
                    Complex64::from_polar(*p, -2.0 * PI * phase)
                })
                .sum();
            worst_dft = worst_dft.max((value - dft).norm());
        }
    }
    verdict(
        worst_zero <= 1e-12 && worst_norm <= 1e-12 && worst_dft <= 1e-10,
        format!("20 PMDs x 100 frequencies, |X(0)-1| {worst_zero:.1e}, max |X|-1 {worst_norm:.1e}, max DFT diff {worst_dft:.1e}"),
    )
}

// 11. Equal data implies moment closeness (asserted); TV is reported only.
fn representative_property() -> Verdict {
    let mut pass = true;
    let mut notes = Vec::new();
    for n in [50usize, 100, 200] {
        let rep = representative_diagnostic(n, 2, 0.5, 20, 1.0, 1_100 + n as u64).unwrap();
        let gap = rep.max_moment_gap();
        pass &= gap <= rep.eps + 1e-12;
        notes.push(format!(
            "n={n}: max TV {:.4} vs eps {:.4}, max moment gap {:.2e}",
            rep.max_tv(),
            rep.eps,
            gap
        ));
    }
    verdict(pass, notes.join("; "))
}

fn main() {
    let criteria: [(&str, fn() -> Verdict); 11] = [
        ("pmd exactness", pmd_exactness),
        ("payoff oracle agreement", payoff_agreement),
        ("moment search regret", moment_search_contract),
        ("grid rounding distance", grid_rounding),
        ("covariance spectrum", covariance_spectrum),
        ("smoothing pure equilibrium", smoothing_contract),
        ("trembling variance bound", variance_bound),
        ("well-supported conversion and padding", reductions_contract),
        ("best response under TV shift", tv_robustness),
        ("fourier identities", fourier_identities),
        ("equal-data moment closeness", representative_property),
    ];
    let mut failed = 0;
    for (idx, (name, run)) in criteria.iter().enumerate() {
        let started = Instant::now();
        let v = run();
        let tag = if v.pass { "PASS" } else { "FAIL" };
        println!(
            "criterion {:>2} {tag} {name}: {} [{}]",
            idx + 1,
            v.detail,
            secs(started.elapsed())
        );
        if !v.pass {
            failed += 1;
        }
    }
    println!("acceptance: {} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}

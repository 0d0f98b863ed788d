//! Cover construction over quantized moment data and the equilibrium search
//! built on top of it.
//!
//! The cover of level ℓ holds one witness PMD (a CRV per player) for each
//! distinct data vector reachable by ℓ players drawing from their allowed
//! sets. Levels are stored as back-pointers, so a witness is recovered by
//! walking down to level 0.

use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::{Arc, OnceLock};
use std::time::{Duration, Instant};

use indexmap::map::Entry;
use indexmap::IndexMap;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{invalid, Error, Result};
use crate::game::{max_regret, payoffs_under, AnonymousGame, MixedProfile, MixedStrategy, VERIFY_TOL};
use crate::partition::binomial;
use crate::pmd::{
    component_decomposition, data_vector, parameter_moment, pmd_pmf, tv_distance, DataSpec, DataVector, PmdEngine,
};

pub const DEFAULT_GRID_CAP: usize = 1_000_000;
pub const DEFAULT_COVER_CAP: usize = 2_000_000;
pub const DEFAULT_WORK_CAP: u64 = 2_000_000_000;

/// The strategy grid: CRVs whose first k−1 probabilities are multiples of
/// `step`, every probability at least `floor_prob`, and the last coordinate
/// taking the residual.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GridSpec {
    k: usize,
    step: f64,
    floor_prob: f64,
}

impl GridSpec {
    pub fn new(k: usize, step: f64, floor_prob: f64) -> Result<Self> {
        if k == 0 {
            return Err(invalid("grid needs k >= 1"));
        }
        if !(step > 0.0 && step <= 1.0) {
            return Err(invalid(format!("grid step must lie in (0, 1], got {step}")));
        }
        if !(floor_prob >= 0.0) {
            return Err(invalid(format!("probability floor must be >= 0, got {floor_prob}")));
        }
        Ok(Self { k, step, floor_prob })
    }

    /// Step `eps/(20kn)` and floor `eps/(10k)`.
    pub fn for_game(n: usize, k: usize, eps: f64) -> Result<Self> {
        if n == 0 {
            return Err(invalid("grid needs n >= 1"));
        }
        Self::new(k, eps / (20.0 * k as f64 * n as f64), eps / (10.0 * k as f64))
    }

    /// Multiplies the step by `factor`; the floor is unchanged.
    pub fn coarsened(self, factor: f64) -> Result<Self> {
        if !(factor >= 1.0 && factor.is_finite()) {
            return Err(invalid(format!("coarsening factor must be >= 1, got {factor}")));
        }
        Self::new(self.k, self.step * factor, self.floor_prob)
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn step(&self) -> f64 {
        self.step
    }

    pub fn floor_prob(&self) -> f64 {
        self.floor_prob
    }

    fn min_units(&self) -> u64 {
        (self.floor_prob / self.step - 1e-9).ceil().max(0.0) as u64
    }

    // Largest total of the first k−1 unit counts that leaves the last
    // coordinate at least the floor.
    fn max_units(&self) -> u64 {
        ((1.0 - self.floor_prob) / self.step + 1e-9).floor() as u64
    }

    fn check_feasible(&self) -> Result<()> {
        if self.floor_prob * self.k as f64 > 1.0 + 1e-12 {
            return Err(Error::InfeasibleGrid(format!(
                "{} strategies with probability floor {} exceed total mass 1",
                self.k, self.floor_prob
            )));
        }
        let need = self.min_units() * (self.k as u64 - 1);
        if self.k > 1 && need > self.max_units() {
            return Err(Error::InfeasibleGrid(format!(
                "step {} leaves no grid point above floor {}",
                self.step, self.floor_prob
            )));
        }
        Ok(())
    }

    /// Number of grid points, computed without enumerating them.
    pub fn size(&self) -> Result<u128> {
        self.check_feasible()?;
        if self.k == 1 {
            return Ok(1);
        }
        let slack = self.max_units() - self.min_units() * (self.k as u64 - 1);
        Ok(binomial_u128(slack + self.k as u64 - 1, self.k as u64 - 1))
    }
}

fn binomial_u128(n: u64, r: u64) -> u128 {
    if let (Ok(n), Ok(r)) = (usize::try_from(n), usize::try_from(r)) {
        if n < 64 {
            return binomial(n, r) as u128;
        }
    }
    let r = r.min(n - r);
    let mut acc: u128 = 1;
    for i in 0..r {
        acc = acc.saturating_mul((n - i) as u128) / (i as u128 + 1);
    }
    acc
}

/// All grid points in ascending lexicographic order of the first k−1
/// coordinates. Fails with a resource-limit error above `cap` points.
pub fn strategy_grid(spec: &GridSpec, cap: usize) -> Result<Vec<MixedStrategy>> {
    let size = spec.size()?;
    if size > cap as u128 {
        return Err(Error::ResourceLimit(format!(
            "strategy grid has {size} points, above the cap of {cap}; coarsen the grid"
        )));
    }
    let k = spec.k;
    if k == 1 {
        return Ok(vec![MixedStrategy::pure(1, 0)]);
    }
    let mut out = Vec::with_capacity(size as usize);
    let mut units = Vec::with_capacity(k - 1);
    push_grid(spec, spec.max_units(), &mut units, &mut out);
    Ok(out)
}

// Lexicographic over the first k−1 unit counts, each at least the floor,
// with room left for the residual coordinate.
fn push_grid(spec: &GridSpec, budget: u64, units: &mut Vec<u64>, out: &mut Vec<MixedStrategy>) {
    let lo = spec.min_units();
    if units.len() == spec.k - 1 {
        let mut probs: Vec<f64> = units.iter().map(|&u| u as f64 * spec.step).collect();
        let head: f64 = probs.iter().sum();
        probs.push((1.0 - head).max(0.0));
        out.push(MixedStrategy::from_raw(probs));
        return;
    }
    // leave the floor for every later axis except the residual one
    let later = (spec.k - 2 - units.len()) as u64 * lo;
    if budget < lo + later {
        return;
    }
    for u in lo..=budget - later {
        units.push(u);
        push_grid(spec, budget - u, units, out);
        units.pop();
    }
}

/// Floors coordinates 1..k−1 to multiples of the step (never below the
/// floor) and puts the residual on the last coordinate.
pub fn round_profile_to_grid(profile: &MixedProfile, spec: &GridSpec) -> Result<MixedProfile> {
    let k = spec.k;
    let lo = spec.min_units();
    let mut out = Vec::with_capacity(profile.n());
    for (i, s) in profile.strategies().iter().enumerate() {
        if s.k() != k {
            return Err(invalid(format!("player {i} has {} strategies, grid has {k}", s.k())));
        }
        if let Some(p) = s.probs().iter().find(|&&p| p < spec.floor_prob - 1e-12) {
            return Err(invalid(format!(
                "player {i} has probability {p} below the grid floor {}",
                spec.floor_prob
            )));
        }
        let mut probs: Vec<f64> = s.probs()[..k - 1]
            .iter()
            .map(|&p| ((p / spec.step + 1e-9).floor() as u64).max(lo) as f64 * spec.step)
            .collect();
        let head: f64 = probs.iter().sum();
        let last = 1.0 - head;
        if last < -1e-12 {
            return Err(Error::InfeasibleGrid(format!("player {i} cannot be rounded onto the grid")));
        }
        probs.push(last.max(0.0));
        let rounded = MixedStrategy::from_raw(probs);
        let tv = s.tv_distance(&rounded);
        let bound = (k - 1) as f64 * spec.step + 1e-12;
        if tv > bound {
            return Err(Error::InternalConsistency(format!(
                "rounding moved player {i} by {tv}, above {bound}"
            )));
        }
        out.push(rounded);
    }
    MixedProfile::new(out)
}

/// Shared budget on key-combination steps across cover builds.
#[derive(Debug)]
pub struct WorkMeter {
    used: AtomicU64,
    cap: u64,
}

impl WorkMeter {
    pub fn new(cap: u64) -> Self {
        Self {
            used: AtomicU64::new(0),
            cap,
        }
    }

    pub fn used(&self) -> u64 {
        self.used.load(Ordering::Relaxed)
    }

    fn charge(&self, amount: u64) -> Result<()> {
        let total = self.used.fetch_add(amount, Ordering::Relaxed).saturating_add(amount);
        if total > self.cap {
            return Err(Error::ResourceLimit(format!(
                "cover construction exceeded the work cap of {} steps",
                self.cap
            )));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug)]
struct Back {
    parent: u32,
    choice: u32,
}

/// One data value of a cover together with a witness PMD realizing it.
#[derive(Clone, Debug, PartialEq)]
pub struct CoverEntry {
    pub data: DataVector,
    pub witness: Vec<MixedStrategy>,
}

/// Levels `0..=depth` of a cover. Witness CRVs index into a shared pool.
#[derive(Clone, Debug)]
pub struct CoverTable {
    pool: Arc<[MixedStrategy]>,
    levels: Vec<IndexMap<DataVector, Back>>,
}

impl CoverTable {
    pub fn depth(&self) -> usize {
        self.levels.len() - 1
    }

    /// Number of distinct data values at each level, starting from level 0.
    pub fn sizes(&self) -> Vec<usize> {
        self.levels.iter().map(IndexMap::len).collect()
    }

    pub fn len(&self, level: usize) -> usize {
        self.levels[level].len()
    }

    pub fn keys(&self, level: usize) -> impl Iterator<Item = &DataVector> {
        self.levels[level].keys()
    }

    pub fn key(&self, level: usize, idx: usize) -> &DataVector {
        self.levels[level].get_index(idx).expect("index in range").0
    }

    pub fn index_of(&self, level: usize, key: &DataVector) -> Option<usize> {
        self.levels[level].get_index_of(key)
    }

    pub fn contains(&self, level: usize, key: &DataVector) -> bool {
        self.levels[level].contains_key(key)
    }

    /// Witness CRVs of the `idx`-th key, in player order.
    pub fn witness_at(&self, level: usize, mut idx: usize) -> Vec<MixedStrategy> {
        let mut out = Vec::with_capacity(level);
        for l in (1..=level).rev() {
            let back = self.levels[l][idx];
            out.push(self.pool[back.choice as usize].clone());
            idx = back.parent as usize;
        }
        out.reverse();
        out
    }

    pub fn witness(&self, level: usize, key: &DataVector) -> Option<Vec<MixedStrategy>> {
        self.index_of(level, key).map(|idx| self.witness_at(level, idx))
    }

    pub fn entry(&self, level: usize, idx: usize) -> CoverEntry {
        CoverEntry {
            data: self.key(level, idx).clone(),
            witness: self.witness_at(level, idx),
        }
    }

    pub fn entries(&self, level: usize) -> impl Iterator<Item = CoverEntry> + '_ {
        (0..self.len(level)).map(move |idx| self.entry(level, idx))
    }
}

// Level ℓ is built from level ℓ−1 and the (data, pool index) choices of
// player ℓ. Keys not fitting under `bound` are dropped: data entries are
// nonnegative, so they can never grow back under it.
fn build_cover(
    pool: Arc<[MixedStrategy]>,
    zero: DataVector,
    choices: &[Vec<(&DataVector, u32)>],
    bound: Option<&DataVector>,
    cover_cap: usize,
    work: &WorkMeter,
) -> Result<CoverTable> {
    let mut levels: Vec<IndexMap<DataVector, Back>> = Vec::with_capacity(choices.len() + 1);
    let mut base = IndexMap::new();
    base.insert(zero, Back { parent: 0, choice: 0 });
    levels.push(base);
    for (l, options) in choices.iter().enumerate() {
        let prev = &levels[l];
        work.charge(prev.len() as u64 * options.len() as u64)?;
        let mut next: IndexMap<DataVector, Back> = IndexMap::new();
        for (parent, key) in prev.keys().enumerate() {
            for &(data, choice) in options {
                let sum = key + data;
                if bound.is_some_and(|b| !sum.fits_under(b)) {
                    continue;
                }
                if let Entry::Vacant(slot) = next.entry(sum) {
                    slot.insert(Back {
                        parent: parent as u32,
                        choice,
                    });
                    if next.len() > cover_cap {
                        return Err(Error::ResourceLimit(format!(
                            "cover level {} exceeds {cover_cap} data values",
                            l + 1
                        )));
                    }
                }
            }
        }
        levels.push(next);
    }
    Ok(CoverTable {
        pool,
        levels,
    })
}

/// Pool members grouped by data value, in first-appearance order.
#[derive(Debug)]
struct DataClasses {
    data: Vec<DataVector>,
    members: Vec<Vec<u32>>,
}

impl DataClasses {
    fn new(spec: &DataSpec, pool: &[MixedStrategy], indices: impl IntoIterator<Item = u32>) -> Result<Self> {
        let mut map: IndexMap<DataVector, Vec<u32>> = IndexMap::new();
        for idx in indices {
            map.entry(data_vector(spec, &pool[idx as usize])?).or_default().push(idx);
        }
        let (data, members) = map.into_iter().unzip();
        Ok(Self { data, members })
    }

    fn choices(&self) -> Vec<(&DataVector, u32)> {
        self.data.iter().zip(&self.members).map(|(d, m)| (d, m[0])).collect()
    }
}

/// Cover of `{D(X_1 + … + X_n) : X_i ∈ allowed[i]}` with one witness per
/// value.
pub fn generate_data(spec: &DataSpec, allowed: &[Vec<MixedStrategy>]) -> Result<CoverTable> {
    generate_data_bounded(spec, allowed, DEFAULT_COVER_CAP, &WorkMeter::new(DEFAULT_WORK_CAP))
}

pub fn generate_data_bounded(
    spec: &DataSpec,
    allowed: &[Vec<MixedStrategy>],
    cover_cap: usize,
    work: &WorkMeter,
) -> Result<CoverTable> {
    if let Some(i) = allowed.iter().position(Vec::is_empty) {
        return Err(invalid(format!("allowed set of player {i} is empty")));
    }
    let pool: Arc<[MixedStrategy]> = allowed.iter().flatten().cloned().collect();
    let mut classes = Vec::with_capacity(allowed.len());
    let mut start = 0u32;
    for set in allowed {
        let end = start + set.len() as u32;
        classes.push(DataClasses::new(spec, &pool, start..end)?);
        start = end;
    }
    let choices: Vec<_> = classes.iter().map(DataClasses::choices).collect();
    build_cover(pool.clone(), spec.zero(), &choices, None, cover_cap, work)
}

/// Knobs of the moment search. The defaults follow the algorithm as stated:
/// data at accuracy ε/5, admission at 3ε/5, uncoarsened grid.
#[derive(Clone, Debug)]
pub struct MomentSearchConfig {
    pub c: f64,
    pub grid_coarsen: f64,
    pub moment_degree: Option<u32>,
    /// Data accuracy as a fraction of ε.
    pub data_fraction: f64,
    /// Best-response admission slack as a fraction of ε.
    pub admit_fraction: f64,
    pub grid_cap: usize,
    pub cover_cap: usize,
    pub work_cap: u64,
}

impl MomentSearchConfig {
    pub fn new(c: f64) -> Self {
        Self {
            c,
            grid_coarsen: 1.0,
            moment_degree: None,
            data_fraction: 0.2,
            admit_fraction: 0.6,
            grid_cap: DEFAULT_GRID_CAP,
            cover_cap: DEFAULT_COVER_CAP,
            work_cap: DEFAULT_WORK_CAP,
        }
    }

    pub fn with_coarsen(mut self, factor: f64) -> Self {
        self.grid_coarsen = factor;
        self
    }

    pub fn with_degree(mut self, degree: u32) -> Self {
        self.moment_degree = Some(degree);
        self
    }
}

#[derive(Clone, Debug)]
pub struct MomentSearchOutcome {
    pub profile: MixedProfile,
    /// Independently verified max regret.
    pub regret: f64,
    pub eps: f64,
    pub grid: GridSpec,
    pub grid_size: usize,
    pub grid_classes: usize,
    /// Full cover sizes, levels 0..=n.
    pub cover_sizes: Vec<usize>,
    /// Canonical position (1-based) of the data value that produced the output.
    pub candidates_examined: usize,
    pub work: u64,
    pub build_time: Duration,
    pub search_time: Duration,
}

/// Runs the search with default knobs and returns just the profile.
pub fn moment_search(game: &AnonymousGame, c: f64) -> Result<MixedProfile> {
    Ok(moment_search_with(game, &MomentSearchConfig::new(c))?.profile)
}

pub fn moment_search_with(game: &AnonymousGame, cfg: &MomentSearchConfig) -> Result<MomentSearchOutcome> {
    MomentSearchPlan::new(game.n(), game.k(), cfg)?.solve(game)
}

/// The game-independent part of the search: grid, data classes, the full
/// cover of levels 0..=n, and witness pmfs of level n−1 computed on demand.
/// One plan serves every game with the same n and k.
#[derive(Debug)]
pub struct MomentSearchPlan {
    n: usize,
    k: usize,
    eps: f64,
    admit: f64,
    cover_cap: usize,
    work_cap: u64,
    grid: GridSpec,
    spec: DataSpec,
    pool: Arc<[MixedStrategy]>,
    classes: DataClasses,
    full: CoverTable,
    engine: PmdEngine,
    // pmf of the level n−1 witness, by key index
    pmf_cache: Vec<OnceLock<Result<Vec<f64>>>>,
    build_time: Duration,
    build_work: u64,
}

impl MomentSearchPlan {
    pub fn new(n: usize, k: usize, cfg: &MomentSearchConfig) -> Result<Self> {
        if !(cfg.c > 0.0 && cfg.c < 1.0) {
            return Err(invalid(format!("exponent c must lie in (0, 1), got {}", cfg.c)));
        }
        if !(cfg.data_fraction > 0.0 && cfg.admit_fraction >= 0.0) {
            return Err(invalid("data and admission fractions must be positive"));
        }
        if n == 0 || k == 0 {
            return Err(invalid("moment search needs n >= 1 and k >= 1"));
        }
        let eps = (n as f64).powf(-cfg.c);
        let grid = GridSpec::for_game(n, k, eps)?.coarsened(cfg.grid_coarsen)?;
        let degree = cfg.moment_degree.unwrap_or_else(|| crate::pmd::default_moment_degree(cfg.c));
        let spec = DataSpec::new(n, k, cfg.data_fraction * eps, degree)?;
        let work = WorkMeter::new(cfg.work_cap);

        let started = Instant::now();
        let pool: Arc<[MixedStrategy]> = strategy_grid(&grid, cfg.grid_cap)?.into();
        let classes = DataClasses::new(&spec, &pool, 0..pool.len() as u32)?;
        let all_choices = classes.choices();
        let per_level: Vec<_> = (0..n).map(|_| all_choices.clone()).collect();
        let full = build_cover(pool.clone(), spec.zero(), &per_level, None, cfg.cover_cap, &work)?;
        let pmf_cache = (0..full.len(n - 1)).map(|_| OnceLock::new()).collect();
        Ok(Self {
            n,
            k,
            eps,
            admit: cfg.admit_fraction * eps,
            cover_cap: cfg.cover_cap,
            work_cap: cfg.work_cap,
            grid,
            spec,
            engine: PmdEngine::new(n - 1, k)?,
            pool,
            classes,
            full,
            pmf_cache,
            build_time: started.elapsed(),
            build_work: work.used(),
        })
    }

    pub fn eps(&self) -> f64 {
        self.eps
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn data_spec(&self) -> &DataSpec {
        &self.spec
    }

    pub fn cover(&self) -> &CoverTable {
        &self.full
    }

    /// Searches the full cover in canonical order; the lowest-index data
    /// value whose restricted cover yields a verified profile wins.
    pub fn solve(&self, game: &AnonymousGame) -> Result<MomentSearchOutcome> {
        if game.n() != self.n || game.k() != self.k {
            return Err(invalid(format!(
                "plan built for n = {}, k = {}; game has n = {}, k = {}",
                self.n,
                self.k,
                game.n(),
                game.k()
            )));
        }
        let n = self.n;
        let started = Instant::now();
        let work = WorkMeter::new(self.work_cap.saturating_sub(self.build_work));
        let ctx = SearchContext {
            plan: self,
            game,
            work: &work,
        };
        let found = (0..self.full.len(n))
            .into_par_iter()
            .map(|d| ctx.try_candidate(d).map(|hit| hit.map(|(p, r)| (d, p, r))))
            .find_map_first(|res| match res {
                Ok(None) => None,
                other => Some(other),
            });
        let (d, profile, regret) = match found {
            Some(res) => res?.expect("filtered to hits"),
            None => {
                return Err(Error::InternalConsistency(format!(
                    "moment search exhausted all {} data values without a verified profile",
                    self.full.len(n)
                )))
            }
        };
        Ok(MomentSearchOutcome {
            profile,
            regret,
            eps: self.eps,
            grid: self.grid,
            grid_size: self.pool.len(),
            grid_classes: self.classes.data.len(),
            cover_sizes: self.full.sizes(),
            candidates_examined: d + 1,
            work: self.build_work + work.used(),
            build_time: self.build_time,
            search_time: started.elapsed(),
        })
    }
}

struct SearchContext<'a> {
    plan: &'a MomentSearchPlan,
    game: &'a AnonymousGame,
    work: &'a WorkMeter,
}

impl SearchContext<'_> {
    fn others_pmf(&self, idx: usize) -> Result<&[f64]> {
        let n = self.game.n();
        let res = self.plan.pmf_cache[idx].get_or_init(|| {
            let witness = self.plan.full.witness_at(n - 1, idx);
            Ok(self.plan.engine.pmf(&witness)?.into_mass())
        });
        match res {
            Ok(v) => Ok(v),
            Err(e) => Err(Error::InternalConsistency(format!("witness pmf failed: {e}"))),
        }
    }

    // Admits, for each player, the grid CRVs that are near-best responses to
    // the witness of the remaining data, then checks whether the target is
    // still reachable with only admitted CRVs.
    fn try_candidate(&self, d: usize) -> Result<Option<(MixedProfile, f64)>> {
        let n = self.game.n();
        let target = self.plan.full.key(n, d);
        let mut per_player: Vec<Vec<(&DataVector, u32)>> = Vec::with_capacity(n);
        for i in 0..n {
            let mut admitted = Vec::new();
            for (data, members) in self.plan.classes.data.iter().zip(&self.plan.classes.members) {
                let Some(rest) = target.checked_sub(data) else {
                    continue;
                };
                let Some(y) = self.plan.full.index_of(n - 1, &rest) else {
                    continue;
                };
                let payoffs = payoffs_under(self.game, i, self.others_pmf(y)?);
                let best = payoffs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
                // members share data, so one admitted member stands for the class
                if let Some(&x) = members
                    .iter()
                    .find(|&&x| self.plan.pool[x as usize].expect(&payoffs) >= best - self.plan.admit - VERIFY_TOL)
                {
                    admitted.push((data, x));
                }
            }
            if admitted.is_empty() {
                return Ok(None);
            }
            per_player.push(admitted);
        }
        let restricted = build_cover(
            self.plan.pool.clone(),
            self.plan.spec.zero(),
            &per_player,
            Some(target),
            self.plan.cover_cap,
            self.work,
        )?;
        let Some(witness) = restricted.witness(n, target) else {
            return Ok(None);
        };
        let profile = MixedProfile::new(witness)?;
        let regret = max_regret(self.game, &profile)?;
        if regret <= self.plan.eps + VERIFY_TOL {
            Ok(Some((profile, regret)))
        } else {
            Ok(None)
        }
    }
}

/// One sampled pair of grid PMDs with equal data.
#[derive(Clone, Debug, PartialEq)]
pub struct RepresentativeSample {
    /// Exact total variation distance between the two PMDs.
    pub tv: f64,
    /// Largest `|M_m(X^t) − M_m(Y^t)|` over the data index set.
    pub max_moment_gap: f64,
}

#[derive(Clone, Debug)]
pub struct RepresentativeReport {
    pub n: usize,
    pub k: usize,
    /// `n^{-c}`: both the data accuracy and the target TV.
    pub eps: f64,
    pub samples: Vec<RepresentativeSample>,
}

impl RepresentativeReport {
    pub fn max_tv(&self) -> f64 {
        self.samples.iter().map(|s| s.tv).fold(0.0, f64::max)
    }

    pub fn max_moment_gap(&self) -> f64 {
        self.samples.iter().map(|s| s.max_moment_gap).fold(0.0, f64::max)
    }
}

/// Largest per-component moment difference over the data index set.
pub fn moment_gap(spec: &DataSpec, x: &[MixedStrategy], y: &[MixedStrategy]) -> Result<f64> {
    let gx = component_decomposition(spec.k(), x);
    let gy = component_decomposition(spec.k(), y);
    let mut gap = 0.0f64;
    for (t, m) in spec.index() {
        let a = parameter_moment(&gx[*t], m)?;
        let b = parameter_moment(&gy[*t], m)?;
        gap = gap.max((a - b).abs());
    }
    Ok(gap)
}

/// Samples pairs of grid PMDs with identical data at accuracy `n^{-c}` and
/// measures how far apart they are. Each pair is built by drawing `X_i`
/// uniformly from the grid and `Y_i` uniformly from the grid points sharing
/// `X_i`'s data.
pub fn representative_diagnostic(
    n: usize,
    k: usize,
    c: f64,
    pairs: usize,
    grid_coarsen: f64,
    seed: u64,
) -> Result<RepresentativeReport> {
    let spec = DataSpec::from_exponent(n, k, c, None)?;
    let eps = spec.accuracy();
    let grid = GridSpec::for_game(n, k, eps)?.coarsened(grid_coarsen)?;
    let pool = strategy_grid(&grid, DEFAULT_GRID_CAP)?;
    let classes = DataClasses::new(&spec, &pool, 0..pool.len() as u32)?;
    let mut class_of = vec![0usize; pool.len()];
    for (c, members) in classes.members.iter().enumerate() {
        for &m in members {
            class_of[m as usize] = c;
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut samples = Vec::with_capacity(pairs);
    for _ in 0..pairs {
        let mut x = Vec::with_capacity(n);
        let mut y = Vec::with_capacity(n);
        for _ in 0..n {
            let a = rng.random_range(0..pool.len());
            let members = &classes.members[class_of[a]];
            let b = members[rng.random_range(0..members.len())] as usize;
            x.push(pool[a].clone());
            y.push(pool[b].clone());
        }
        let tv = tv_distance(&pmd_pmf(k, &x)?, &pmd_pmf(k, &y)?)?;
        samples.push(RepresentativeSample {
            tv,
            max_moment_gap: moment_gap(&spec, &x, &y)?,
        });
    }
    Ok(RepresentativeReport { n, k, eps, samples })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::{generate_game, GameKind};
    use crate::pmd::data_vector_sum;

    fn ms(p: &[f64]) -> MixedStrategy {
        MixedStrategy::new(p.to_vec()).unwrap()
    }

    #[test]
    fn quarter_grid() {
        let g = strategy_grid(&GridSpec::new(2, 0.25, 0.25).unwrap(), 100).unwrap();
        let probs: Vec<_> = g.iter().map(|s| s.probs().to_vec()).collect();
        assert_eq!(probs, vec![vec![0.25, 0.75], vec![0.5, 0.5], vec![0.75, 0.25]]);
    }

    #[test]
    fn infeasible_floor() {
        let spec = GridSpec::new(2, 0.1, 0.6).unwrap();
        assert!(matches!(strategy_grid(&spec, 100), Err(Error::InfeasibleGrid(_))));
    }

    #[test]
    fn three_strategy_count() {
        let spec = GridSpec::new(3, 0.125, 0.125).unwrap();
        assert_eq!(spec.size().unwrap(), 21);
        let g = strategy_grid(&spec, 100).unwrap();
        assert_eq!(g.len(), 21);
        for s in &g {
            assert!(s.probs().iter().all(|&p| p >= 0.125 - 1e-12));
        }
    }

    #[test]
    fn grid_cap_is_enforced() {
        let spec = GridSpec::new(3, 0.01, 0.01).unwrap();
        assert!(matches!(strategy_grid(&spec, 10), Err(Error::ResourceLimit(_))));
    }

    #[test]
    fn grid_size_matches_enumeration_when_coarsened() {
        let base = GridSpec::for_game(5, 3, 5f64.powf(-0.5)).unwrap();
        for f in [1.0, 1.5, 2.0, 3.7] {
            let spec = base.coarsened(f).unwrap();
            let g = strategy_grid(&spec, 1_000_000).unwrap();
            assert_eq!(g.len() as u128, spec.size().unwrap(), "factor {f}");
            assert!(g.iter().all(|s| s.probs().iter().all(|&p| p >= spec.floor_prob() - 1e-12)));
        }
    }

    #[test]
    fn rounding_to_grid() {
        let spec = GridSpec::new(2, 0.1, 0.1).unwrap();
        let p = MixedProfile::new(vec![ms(&[0.57, 0.43])]).unwrap();
        let r = round_profile_to_grid(&p, &spec).unwrap();
        assert!((r.get(0).prob(0) - 0.5).abs() < 1e-12);
        assert!((r.get(0).prob(1) - 0.5).abs() < 1e-12);

        let on_grid = MixedProfile::new(vec![ms(&[0.25, 0.75])]).unwrap();
        let quarter = GridSpec::new(2, 0.25, 0.25).unwrap();
        assert_eq!(round_profile_to_grid(&on_grid, &quarter).unwrap(), on_grid);

        let low = MixedProfile::new(vec![ms(&[0.05, 0.95])]).unwrap();
        assert!(round_profile_to_grid(&low, &spec).is_err());
    }

    #[test]
    fn singleton_sets_scale_data() {
        let spec = DataSpec::new(2, 2, 0.5, 3).unwrap();
        let w = ms(&[0.3, 0.7]);
        let cover = generate_data(&spec, &[vec![w.clone()], vec![w.clone()]]).unwrap();
        assert_eq!(cover.len(2), 1);
        let d = data_vector(&spec, &w).unwrap();
        assert!(cover.contains(2, &(&d + &d)));
    }

    #[test]
    fn base_case_two_entries() {
        let spec = DataSpec::new(1, 2, 0.05, 3).unwrap();
        let cover = generate_data(&spec, &[vec![ms(&[0.9, 0.1]), ms(&[0.2, 0.8])]]).unwrap();
        assert_eq!(cover.len(1), 2);
    }

    #[test]
    fn witnesses_reproduce_keys() {
        let spec = DataSpec::new(3, 3, 0.3, 4).unwrap();
        let grid = strategy_grid(&GridSpec::new(3, 0.125, 0.125).unwrap(), 100).unwrap();
        let cover = generate_data(&spec, &[grid.clone(), grid.clone(), grid]).unwrap();
        for level in 0..=3 {
            for entry in cover.entries(level) {
                let parts: Vec<_> = entry.witness.iter().map(|w| data_vector(&spec, w).unwrap()).collect();
                assert_eq!(data_vector_sum(&spec, &parts), entry.data);
            }
        }
    }

    #[test]
    fn constant_game_first_candidate() {
        let g = generate_game(3, 2, GameKind::Constant, 0).unwrap();
        let out = moment_search_with(&g, &MomentSearchConfig::new(0.5).with_coarsen(4.0)).unwrap();
        assert_eq!(out.candidates_examined, 1);
        assert_eq!(out.regret, 0.0);
    }

    #[test]
    fn dominant_game_within_eps() {
        let g = generate_game(3, 2, GameKind::Dominant, 0).unwrap();
        let out = moment_search_with(&g, &MomentSearchConfig::new(0.5)).unwrap();
        assert!(out.regret <= 3f64.powf(-0.5) + 1e-9);
        assert!(max_regret(&g, &out.profile).unwrap() <= out.eps + 1e-9);
    }

    #[test]
    fn single_strategy_games() {
        let g = generate_game(3, 1, GameKind::UniformRandom, 1).unwrap();
        let out = moment_search_with(&g, &MomentSearchConfig::new(0.5)).unwrap();
        assert_eq!(out.regret, 0.0);
    }

    #[test]
    fn representative_pairs_are_moment_close() {
        let rep = representative_diagnostic(20, 2, 0.5, 5, 1.0, 3).unwrap();
        assert_eq!(rep.samples.len(), 5);
        assert!(rep.max_moment_gap() <= rep.eps + 1e-12);
    }
}

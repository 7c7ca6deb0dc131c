//! Verification batteries and the deterministic JSON report.
//!
//! Every battery draws from its own ChaCha stream derived from one global
//! seed, generates its instances sequentially and checks them in parallel,
//! so the report depends only on the seed, the scale and the code version.
//! Timings and cache activity are kept out of the report.

use std::collections::BTreeMap;
use std::path::PathBuf;
use std::str::FromStr;

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::analysis::index2_check;
use crate::cache::{Cache, CacheStatus, CODE_VERSION};
use crate::census::{self, lower_bound, CensusOptions, Method};
use crate::error::{Error, Result};
use crate::fourier::{bohr_cover, chang_check};
use crate::group::{abelian_groups_of_order, Character, GroupSpec};
use crate::hypergraph::{
    build_mod_hypergraph, conjecture_gap, count_independent_generic, disjoint_union, mod_lower_bound, validate,
};
use crate::mask::MaskKernel;
use crate::structure::{decompose, general_pollard_bound, pollard_applies, pollard_bound};
use crate::subset::Subset;
use crate::sumset::thick_threshold;
use crate::tolerance::THRESHOLD;

pub const REPORT_SCHEMA: &str = "sumset-census/suite/v1";
pub const DEFAULT_SEED: u64 = 0x5EED_2024;

/// Groups of order at most 12 for the exhaustive Kneser battery.
pub const KNESER_GROUPS: [&str; 10] = ["4", "6", "8", "9", "10", "12", "2x2", "2x4", "3x3", "2x6"];
pub const CAUCHY_DAVENPORT_PRIMES: [usize; 4] = [2, 3, 5, 7];
pub const POLLARD_PRIMES: [usize; 3] = [5, 7, 11];
pub const POLLARD_GENERAL_GROUPS: [&str; 5] = ["4", "6", "8", "2x2", "2x4"];
pub const POLLARD_EPS: [f64; 3] = [0.01, 0.02, 0.05];
pub const CHANG_PRIMES: [usize; 2] = [31, 101];
pub const BOHR_ORDERS: [usize; 3] = [101, 257, 1009];
pub const DECOMPOSE_PRIMES: [usize; 3] = [31, 61, 101];
pub const DECOMPOSE_DELTA: f64 = 0.25;
pub const DECOMPOSE_EPS: f64 = 0.5;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Battery {
    Kneser,
    Pollard,
    Chang,
    Bohr,
    Decompose,
    CensusOracle,
    HypergraphIdentity,
}

impl Battery {
    pub const ALL: [Battery; 7] = [
        Battery::Kneser,
        Battery::Pollard,
        Battery::Chang,
        Battery::Bohr,
        Battery::Decompose,
        Battery::CensusOracle,
        Battery::HypergraphIdentity,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Battery::Kneser => "kneser",
            Battery::Pollard => "pollard",
            Battery::Chang => "chang",
            Battery::Bohr => "bohr",
            Battery::Decompose => "decompose",
            Battery::CensusOracle => "census-oracle",
            Battery::HypergraphIdentity => "hypergraph-identity",
        }
    }

    /// `"all"` or a comma-separated list of names.
    pub fn parse_list(s: &str) -> Result<Vec<Battery>> {
        if s.trim() == "all" {
            return Ok(Battery::ALL.to_vec());
        }
        let mut out: Vec<Battery> = s.split(',').map(|t| t.trim().parse()).collect::<Result<_>>()?;
        out.sort();
        out.dedup();
        Ok(out)
    }

    fn stream(self) -> u64 {
        self as u64 + 1
    }
}

impl FromStr for Battery {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Battery::ALL
            .into_iter()
            .find(|b| b.name() == s)
            .ok_or_else(|| Error::UnknownBattery(s.to_string()))
    }
}

/// `Quick` shrinks sample counts and exhaustive ranges for smoke runs.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Scale {
    Quick,
    Full,
}

impl FromStr for Scale {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "quick" => Ok(Scale::Quick),
            "full" => Ok(Scale::Full),
            _ => Err(Error::Parse(format!("unknown scale {s:?}"))),
        }
    }
}

#[derive(Clone, Debug)]
pub struct SuiteConfig {
    pub batteries: Vec<Battery>,
    pub seed: u64,
    pub scale: Scale,
    pub workers: Option<usize>,
    /// Census results are read from and written to this cache when set.
    pub cache: Option<PathBuf>,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        SuiteConfig {
            batteries: Battery::ALL.to_vec(),
            seed: DEFAULT_SEED,
            scale: Scale::Full,
            workers: None,
            cache: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BatteryReport {
    pub name: String,
    #[serde(serialize_with = "crate::cache::ser_decimal")]
    pub checks: u64,
    #[serde(serialize_with = "crate::cache::ser_decimal")]
    pub failures: u64,
    #[serde(serialize_with = "crate::cache::ser_decimal")]
    pub skipped: u64,
    pub passed: bool,
    pub notes: BTreeMap<String, String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SuiteReport {
    pub schema: String,
    pub version: String,
    #[serde(serialize_with = "crate::cache::ser_decimal")]
    pub seed: u64,
    pub scale: Scale,
    pub batteries: Vec<BatteryReport>,
    pub passed: bool,
}

impl SuiteReport {
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn battery(&self, name: &str) -> Option<&BatteryReport> {
        self.batteries.iter().find(|b| b.name == name)
    }
}

#[derive(Clone, Debug)]
pub struct SuiteOutcome {
    pub report: SuiteReport,
    /// Cache misses and rebuilds, for logging only.
    pub cache_events: Vec<String>,
}

#[derive(Default)]
struct Tally {
    checks: u64,
    failures: u64,
    skipped: u64,
    notes: BTreeMap<String, String>,
    events: Vec<String>,
}

impl Tally {
    fn check(&mut self, ok: bool, what: impl FnOnce() -> String) {
        self.checks += 1;
        if !ok {
            self.failures += 1;
            self.notes.entry("first_failure".into()).or_insert_with(what);
        }
    }

    fn add(&mut self, checks: u64, failures: u64, skipped: u64) {
        self.checks += checks;
        self.failures += failures;
        self.skipped += skipped;
    }

    fn note(&mut self, key: &str, value: impl ToString) {
        self.notes.insert(key.to_string(), value.to_string());
    }

    fn into_report(self, battery: Battery) -> (BatteryReport, Vec<String>) {
        let report = BatteryReport {
            name: battery.name().to_string(),
            checks: self.checks,
            failures: self.failures,
            skipped: self.skipped,
            passed: self.failures == 0,
            notes: self.notes,
        };
        (report, self.events)
    }
}

fn group(s: &str) -> Result<GroupSpec> {
    s.parse()
}

fn battery_rng(seed: u64, battery: Battery) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(battery.stream());
    rng
}

/// Nonempty random subset with each element kept with probability `density`.
pub fn random_subset(n: usize, density: f64, rng: &mut impl Rng) -> Subset {
    let mut s = Subset::empty(n);
    for x in 0..n {
        if rng.gen_bool(density) {
            s.insert(x);
        }
    }
    if s.is_empty() {
        s.insert(rng.gen_range(0..n));
    }
    s
}

/// `A, B ⊆ F_p` with densities drawn from `[0.2, 0.45]`; see
/// [`structured_pair_with`].
pub fn structured_pair(p: usize, rng: &mut impl Rng) -> (Subset, Subset) {
    let alpha = rng.gen_range(0.2..=0.45);
    let beta = rng.gen_range(0.2..=0.45);
    structured_pair_with(p, alpha, beta, rng).expect("densities sum below 1")
}

/// Random subsets of two intervals, both dilated by one random unit, with
/// interval lengths summing to at most `p` so that `A + B ≠ F_p`.
pub fn structured_pair_with(p: usize, alpha: f64, beta: f64, rng: &mut impl Rng) -> Result<(Subset, Subset)> {
    let pf = p as f64;
    let a = ((alpha * pf).round() as usize).max(1);
    let b = ((beta * pf).round() as usize).max(1);
    if p < 2 || a + b >= p {
        return Err(Error::Precondition(format!("densities {alpha} + {beta} leave no room in F_{p}")));
    }
    let slack = p - a - b;
    let ea = rng.gen_range(0..=slack / 2);
    let eb = rng.gen_range(0..=(slack - ea) / 2);
    let lambda = rng.gen_range(1..p);
    let mut pick = |size: usize, len: usize| {
        let shift = rng.gen_range(0..p);
        let idx = sample(rng, len, size);
        Subset::from_indices(p, idx.into_iter().map(|i| (i + shift) % p * lambda % p))
    };
    let sa = pick(a, a + ea)?;
    let sb = pick(b, b + eb)?;
    Ok((sa, sb))
}

fn run_kneser(scale: Scale) -> Result<Tally> {
    let mut tally = Tally::default();
    for name in KNESER_GROUPS {
        let g = group(name)?;
        if scale == Scale::Quick && g.order() > 9 {
            continue;
        }
        let k = MaskKernel::new(&g);
        let full = k.full();
        let (checks, failures) = (1..=full)
            .into_par_iter()
            .map(|a| {
                let mut fails = 0u64;
                for b in 1..=full {
                    let s = k.sumset(a, b);
                    let h = k.stabilizer(s);
                    let bound = k.sumset(a, h).count_ones() as i64 + k.sumset(b, h).count_ones() as i64
                        - h.count_ones() as i64;
                    fails += u64::from((s.count_ones() as i64) < bound);
                }
                (full, fails)
            })
            .reduce(|| (0, 0), |x, y| (x.0 + y.0, x.1 + y.1));
        tally.add(checks, failures, 0);
        tally.note(&format!("kneser_{name}_pairs"), checks);
    }
    for p in CAUCHY_DAVENPORT_PRIMES {
        let g = GroupSpec::cyclic(p)?;
        let k = MaskKernel::new(&g);
        let full = k.full();
        for a in 1..=full {
            for b in 1..=full {
                let bound = p.min((a.count_ones() + b.count_ones()) as usize - 1);
                tally.check(k.sumset(a, b).count_ones() as usize >= bound, || {
                    format!("Cauchy-Davenport in Z_{p}: {a:#x} + {b:#x}")
                });
            }
        }
    }
    Ok(tally)
}

/// Exhaustive Pollard checks for one group; `h` selects the general form.
fn pollard_group(g: &GroupSpec, h: Option<usize>) -> (u64, u64, u64) {
    let k = MaskKernel::new(g);
    let n = g.order();
    let full = k.full();
    let thresholds: Vec<u64> = POLLARD_EPS.iter().map(|&e| thick_threshold(e, n)).collect();
    (1..=full)
        .into_par_iter()
        .map(|a| {
            let (mut checks, mut fails, mut skipped) = (0u64, 0u64, 0u64);
            let na = a.count_ones() as usize;
            for b in 1..=full {
                let nb = b.count_ones() as usize;
                let conv = k.convolution(a, b);
                for (&eps, &th) in POLLARD_EPS.iter().zip(&thresholds) {
                    if !pollard_applies(n, na, nb, eps) {
                        skipped += 1;
                        continue;
                    }
                    let thick = conv.iter().filter(|&&c| c as u64 >= th).count();
                    let bound = match h {
                        None => pollard_bound(n, na, nb, eps),
                        Some(h) => general_pollard_bound(n, na, nb, h, eps),
                    };
                    checks += 1;
                    fails += u64::from((thick as f64) < bound - THRESHOLD);
                }
            }
            (checks, fails, skipped)
        })
        .reduce(|| (0, 0, 0), |x, y| (x.0 + y.0, x.1 + y.1, x.2 + y.2))
}

fn run_pollard(scale: Scale) -> Result<Tally> {
    let mut tally = Tally::default();
    for p in POLLARD_PRIMES {
        if scale == Scale::Quick && p > 7 {
            continue;
        }
        let (c, f, s) = pollard_group(&GroupSpec::cyclic(p)?, None);
        tally.add(c, f, s);
        tally.note(&format!("prime_{p}_checks"), c);
    }
    for name in POLLARD_GENERAL_GROUPS {
        let g = group(name)?;
        let h = g.maximal_proper_subgroup()?.order();
        let (c, f, s) = pollard_group(&g, Some(h));
        tally.add(c, f, s);
        tally.note(&format!("general_{name}_checks"), c);
    }
    Ok(tally)
}

fn samples(scale: Scale, full: usize, quick: usize) -> usize {
    match scale {
        Scale::Full => full,
        Scale::Quick => quick,
    }
}

fn run_chang(scale: Scale, rng: &mut ChaCha8Rng) -> Result<Tally> {
    let mut tally = Tally::default();
    for p in CHANG_PRIMES {
        let g = GroupSpec::cyclic(p)?;
        let instances: Vec<(Subset, f64)> = (0..samples(scale, 500, 40))
            .map(|_| {
                let density = rng.gen_range(0.05..0.5);
                (random_subset(p, density, rng), rng.gen_range(0.15..0.9))
            })
            .collect();
        let results: Vec<Result<bool>> = instances
            .par_iter()
            .map(|(a, eps)| Ok(chang_check(&g, a, *eps)?.ok))
            .collect();
        let mut exact = 0;
        for (r, (a, eps)) in results.into_iter().zip(&instances) {
            let ok = r?;
            tally.check(ok, || format!("Chang in Z_{p}: |A| = {}, eps = {eps}", a.len()));
            exact += 1;
        }
        tally.note(&format!("p{p}_instances"), exact);
    }
    Ok(tally)
}

fn run_bohr(scale: Scale, rng: &mut ChaCha8Rng) -> Result<Tally> {
    let mut tally = Tally::default();
    for n in BOHR_ORDERS {
        let g = GroupSpec::cyclic(n)?;
        let instances: Vec<(Vec<Character>, f64)> = (0..samples(scale, 200, 20))
            .map(|_| {
                let dim = rng.gen_range(1..=3);
                let mut gamma: Vec<Character> =
                    sample(rng, n - 1, dim).into_iter().map(|i| Character(i + 1)).collect();
                gamma.sort();
                (gamma, rng.gen_range(0.3..2.0))
            })
            .collect();
        let results: Vec<std::result::Result<usize, String>> = instances
            .par_iter()
            .map(|(gamma, radius)| {
                bohr_cover(&g, gamma, *radius)
                    .map(|c| c.t)
                    .map_err(|e| e.to_string())
            })
            .collect();
        let mut total_t = 0;
        for (r, (gamma, radius)) in results.into_iter().zip(&instances) {
            match r {
                Ok(t) => {
                    total_t += t;
                    tally.check(true, String::new);
                }
                Err(e) => tally.check(false, || format!("Bohr N = {n}, gamma = {gamma:?}, radius = {radius}: {e}")),
            }
        }
        tally.note(&format!("n{n}_total_shifts"), total_t);
    }
    Ok(tally)
}

fn run_decompose(scale: Scale, rng: &mut ChaCha8Rng) -> Result<Tally> {
    let mut tally = Tally::default();
    for p in DECOMPOSE_PRIMES {
        let g = GroupSpec::cyclic(p)?;
        let instances: Vec<(Subset, Subset)> =
            (0..samples(scale, 100, 10)).map(|_| structured_pair(p, rng)).collect();
        let results: Vec<Result<(bool, usize, usize)>> = instances
            .par_iter()
            .map(|(a, b)| {
                let d = decompose(&g, a, b, DECOMPOSE_DELTA, DECOMPOSE_EPS)?;
                let extra = d.w_raw.difference(&d.w).len();
                Ok((d.checks.all_hold() && extra <= d.y.len(), d.checks.raw_violations, d.y.len()))
            })
            .collect();
        let (mut raw, mut ys) = (0, 0);
        for (r, (a, b)) in results.into_iter().zip(&instances) {
            let (ok, violations, y) = r?;
            raw += violations;
            ys += y;
            tally.check(ok, || format!("decompose in F_{p}: A = {a:?}, B = {b:?}"));
        }
        tally.note(&format!("p{p}_raw_violations"), raw);
        tally.note(&format!("p{p}_total_y"), ys);
    }
    Ok(tally)
}

fn census_value(
    g: &GroupSpec,
    method: Method,
    cache: Option<&Cache>,
    opts: &CensusOptions,
    tally: &mut Tally,
) -> Result<num_bigint::BigUint> {
    match cache {
        None => Ok(census::count(g, method, opts)?.t),
        Some(c) => {
            let (r, status) = c.get_or_compute(g, method, opts)?;
            match status {
                CacheStatus::Hit => {}
                CacheStatus::Miss => tally.events.push(format!("cache miss {g} {method}")),
                CacheStatus::Rebuilt(why) => tally.events.push(format!("cache rebuilt {g} {method}: {why}")),
            }
            Ok(r.t)
        }
    }
}

fn run_census_oracle(scale: Scale, cache: Option<&Cache>) -> Result<Tally> {
    let mut tally = Tally::default();
    let opts = CensusOptions::default();
    let (brute_max, symmetric_max) = match scale {
        Scale::Full => (6, 12),
        Scale::Quick => (4, 8),
    };
    for n in 1..=symmetric_max {
        for g in abelian_groups_of_order(n)? {
            let reduced = census_value(&g, Method::Reduced, cache, &opts, &mut tally)?;
            let symmetric = census_value(&g, Method::Symmetric, cache, &opts, &mut tally)?;
            tally.check(reduced == symmetric, || format!("reduced != symmetric for {g}"));
            if n <= brute_max {
                let brute = census_value(&g, Method::Brute, cache, &opts, &mut tally)?;
                tally.check(brute == reduced, || format!("brute != reduced for {g}"));
            }
            tally.check(reduced >= lower_bound(n), || format!("T({g}) below the lower bound"));
            if n % 2 == 0 {
                let index2 = num_bigint::BigUint::from(1u8) << (3 * n / 2);
                tally.check(reduced >= index2, || format!("T({g}) below 2^(3N/2)"));
            }
            tally.note(&format!("T_{g}"), &reduced);
        }
    }
    for name in ["2", "4", "2x2"] {
        let g = group(name)?;
        let r = index2_check(&g)?;
        tally.check(r.ok && r.exhaustive, || format!("index-2 triples fail for {g}"));
    }
    Ok(tally)
}

fn run_hypergraph_identity(scale: Scale) -> Result<Tally> {
    let mut tally = Tally::default();
    let (count_max, validate_max) = match scale {
        Scale::Full => (5, 50),
        Scale::Quick => (4, 12),
    };
    for d in 1..=count_max {
        let h = build_mod_hypergraph(d)?;
        let generic = count_independent_generic(&h)?;
        let census = census::count_reduced(&GroupSpec::cyclic(d)?)?.t;
        tally.check(generic == census, || format!("i(H^mod_{d}) != T(Z_{d})"));
        tally.check(generic >= mod_lower_bound(d)?, || format!("i(H^mod_{d}) below the lower bound"));
        let gap = conjecture_gap(&h, &generic)?;
        tally.note(&format!("margin_d{d}"), format!("{:.6}", gap.margin));
    }
    for d in 1..=validate_max {
        let v = validate(&build_mod_hypergraph(d)?);
        let ok = v.linear && v.uniform_k == Some(3) && v.regular_d == Some(d) && v.tripartite;
        tally.check(ok, || format!("validate(H^mod_{d}) = {v:?}"));
    }
    for (d1, d2) in [(1, 1), (1, 2), (2, 2), (1, 3), (2, 3)] {
        let (h1, h2) = (build_mod_hypergraph(d1)?, build_mod_hypergraph(d2)?);
        let joint = count_independent_generic(&disjoint_union(&h1, &h2))?;
        let product = count_independent_generic(&h1)? * count_independent_generic(&h2)?;
        tally.check(joint == product, || format!("i(H_{d1} + H_{d2}) is not multiplicative"));
    }
    Ok(tally)
}

fn run_battery(battery: Battery, cfg: &SuiteConfig, cache: Option<&Cache>) -> Result<Tally> {
    let mut rng = battery_rng(cfg.seed, battery);
    match battery {
        Battery::Kneser => run_kneser(cfg.scale),
        Battery::Pollard => run_pollard(cfg.scale),
        Battery::Chang => run_chang(cfg.scale, &mut rng),
        Battery::Bohr => run_bohr(cfg.scale, &mut rng),
        Battery::Decompose => run_decompose(cfg.scale, &mut rng),
        Battery::CensusOracle => run_census_oracle(cfg.scale, cache),
        Battery::HypergraphIdentity => run_hypergraph_identity(cfg.scale),
    }
}

pub fn run_suite(cfg: &SuiteConfig) -> Result<SuiteOutcome> {
    if cfg.batteries.is_empty() {
        return Err(Error::EmptyInput("battery list"));
    }
    let cache = cfg.cache.as_ref().map(Cache::new);
    let job = || -> Result<Vec<(BatteryReport, Vec<String>)>> {
        cfg.batteries
            .par_iter()
            .map(|&b| Ok(run_battery(b, cfg, cache.as_ref())?.into_report(b)))
            .collect()
    };
    let results = match cfg.workers {
        None => job()?,
        Some(w) => rayon::ThreadPoolBuilder::new()
            .num_threads(w.max(1))
            .build()
            .map_err(|e| Error::Precondition(format!("thread pool: {e}")))?
            .install(job)?,
    };
    let mut batteries = Vec::with_capacity(results.len());
    let mut cache_events = Vec::new();
    for (report, events) in results {
        batteries.push(report);
        cache_events.extend(events);
    }
    let passed = batteries.iter().all(|b| b.passed);
    Ok(SuiteOutcome {
        report: SuiteReport {
            schema: REPORT_SCHEMA.to_string(),
            version: CODE_VERSION.to_string(),
            seed: cfg.seed,
            scale: cfg.scale,
            batteries,
            passed,
        },
        cache_events,
    })
}

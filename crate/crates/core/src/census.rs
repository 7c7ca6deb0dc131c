//! Exact counts `T(G)` of triples `(A, B, C)` of subsets with `(A + B) ∩ C = ∅`.
//!
//! Three independent methods:
//!
//! * [`count_brute`] walks all `8^N` triples and tests `x + y = z` directly.
//! * [`count_reduced`] uses `T = sum_{A,B} 2^{N - |A+B|}` over all pairs.
//! * [`count_symmetric`] enumerates `A` up to affine maps `x -> lambda x + s`
//!   (`lambda` a unit mod the exponent), `B` up to translation, and folds
//!   the `A <-> B` swap by class order.
//!
//! Both fast methods first build a [`PairHistogram`] of weighted pair counts
//! by `(|A|, |B|, |A+B|)`, from which the total and the stratified table
//! `N_{a,b,c}` follow.

use std::str::FromStr;
use std::time::Instant;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::group::GroupSpec;
use crate::mask::{MaskKernel, PermTable};

pub const BRUTE_LIMIT: usize = 8;
pub const REDUCED_LIMIT: usize = 16;
pub const SYMMETRIC_LIMIT: usize = 20;
pub const STRATIFIED_LIMIT: usize = 14;

/// Default number of `A` values (or `A` classes) per parallel work unit.
pub const DEFAULT_CHUNK: usize = 256;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Brute,
    Reduced,
    Symmetric,
}

impl Method {
    pub fn as_str(self) -> &'static str {
        match self {
            Method::Brute => "brute",
            Method::Reduced => "reduced",
            Method::Symmetric => "symmetric",
        }
    }

    pub fn limit(self) -> usize {
        match self {
            Method::Brute => BRUTE_LIMIT,
            Method::Reduced => REDUCED_LIMIT,
            Method::Symmetric => SYMMETRIC_LIMIT,
        }
    }
}

impl std::fmt::Display for Method {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "brute" => Ok(Method::Brute),
            "reduced" => Ok(Method::Reduced),
            "symmetric" => Ok(Method::Symmetric),
            _ => Err(Error::Parse(format!("unknown census method {s:?}"))),
        }
    }
}

/// Parallelism knobs. Results never depend on either value.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CensusOptions {
    /// Worker threads; `None` uses the global rayon pool.
    pub workers: Option<usize>,
    pub chunk: usize,
}

impl Default for CensusOptions {
    fn default() -> Self {
        CensusOptions {
            workers: None,
            chunk: DEFAULT_CHUNK,
        }
    }
}

impl CensusOptions {
    pub fn with_workers(workers: usize) -> Self {
        CensusOptions {
            workers: Some(workers.max(1)),
            ..Self::default()
        }
    }

    /// Reads the worker count from `SUMSET_WORKERS`.
    pub fn from_env() -> Self {
        let workers = std::env::var("SUMSET_WORKERS")
            .ok()
            .and_then(|v| v.trim().parse::<usize>().ok())
            .filter(|&w| w > 0);
        CensusOptions {
            workers,
            ..Self::default()
        }
    }

    fn run<T: Send>(&self, job: impl FnOnce() -> T + Send) -> Result<T> {
        match self.workers {
            None => Ok(job()),
            Some(w) => {
                let pool = rayon::ThreadPoolBuilder::new()
                    .num_threads(w)
                    .build()
                    .map_err(|e| Error::Precondition(format!("thread pool: {e}")))?;
                Ok(pool.install(job))
            }
        }
    }
}

/// Weighted counts of pairs `(A, B)` by `(|A|, |B|, |A+B|)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PairHistogram {
    n: usize,
    counts: Vec<u64>,
}

impl PairHistogram {
    fn new(n: usize) -> Self {
        PairHistogram {
            n,
            counts: vec![0; (n + 1).pow(3)],
        }
    }

    #[inline]
    fn slot(&self, a: usize, b: usize, k: usize) -> usize {
        (a * (self.n + 1) + b) * (self.n + 1) + k
    }

    #[inline]
    fn add(&mut self, a: usize, b: usize, k: usize, w: u64) {
        let i = self.slot(a, b, k);
        self.counts[i] += w;
    }

    fn merge(mut self, other: PairHistogram) -> PairHistogram {
        for (x, y) in self.counts.iter_mut().zip(other.counts) {
            *x += y;
        }
        self
    }

    pub fn order(&self) -> usize {
        self.n
    }

    pub fn get(&self, a: usize, b: usize, k: usize) -> u64 {
        self.counts[self.slot(a, b, k)]
    }

    /// Number of pairs counted; `4^N` for a complete histogram.
    pub fn pairs(&self) -> u64 {
        self.counts.iter().sum()
    }

    /// `sum 2^{N - |A+B|}`.
    pub fn total(&self) -> BigUint {
        let mut by_k = vec![0u128; self.n + 1];
        for a in 0..=self.n {
            for b in 0..=self.n {
                for (k, slot) in by_k.iter_mut().enumerate() {
                    *slot += self.get(a, b, k) as u128;
                }
            }
        }
        by_k.iter()
            .enumerate()
            .map(|(k, &c)| BigUint::from(c) << (self.n - k))
            .sum()
    }

    /// `N_{a,b,c} = sum_k hist[a][b][k] binom(N - k, c)`.
    pub fn stratify(&self) -> StratifiedTable {
        let n = self.n;
        let binom = pascal(n);
        let mut table = StratifiedTable::zero(n);
        for a in 0..=n {
            for b in 0..=n {
                for k in 0..=n {
                    let w = self.get(a, b, k);
                    if w == 0 {
                        continue;
                    }
                    let w = BigUint::from(w);
                    for c in 0..=n - k {
                        let i = table.slot(a, b, c);
                        table.entries[i] += &w * &binom[n - k][c];
                    }
                }
            }
        }
        table
    }
}

fn pascal(n: usize) -> Vec<Vec<BigUint>> {
    let mut rows: Vec<Vec<BigUint>> = Vec::with_capacity(n + 1);
    for i in 0..=n {
        let mut row = vec![BigUint::one(); i + 1];
        for j in 1..i {
            row[j] = &rows[i - 1][j - 1] + &rows[i - 1][j];
        }
        rows.push(row);
    }
    rows
}

/// Counts `N_{a,b,c}` of avoiding triples with `|A| = a`, `|B| = b`, `|C| = c`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct StratifiedTable {
    pub n: usize,
    entries: Vec<BigUint>,
}

impl StratifiedTable {
    fn zero(n: usize) -> Self {
        StratifiedTable {
            n,
            entries: vec![BigUint::zero(); (n + 1).pow(3)],
        }
    }

    fn slot(&self, a: usize, b: usize, c: usize) -> usize {
        (a * (self.n + 1) + b) * (self.n + 1) + c
    }

    pub fn get(&self, a: usize, b: usize, c: usize) -> &BigUint {
        &self.entries[self.slot(a, b, c)]
    }

    pub fn total(&self) -> BigUint {
        self.entries.iter().sum()
    }

    /// `sum_c N_{a,b,c}`.
    pub fn pair_marginal(&self, a: usize, b: usize) -> BigUint {
        (0..=self.n).map(|c| self.get(a, b, c)).sum()
    }

    /// Nonzero entries as `(a, b, c, count)`.
    pub fn nonzero(&self) -> impl Iterator<Item = (usize, usize, usize, &BigUint)> + '_ {
        let m = self.n + 1;
        self.entries
            .iter()
            .enumerate()
            .filter(|(_, v)| !v.is_zero())
            .map(move |(i, v)| (i / (m * m), i / m % m, i % m, v))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CensusResult {
    pub group: GroupSpec,
    #[serde(serialize_with = "crate::cache::ser_decimal")]
    pub t: BigUint,
    pub method: Method,
    pub elapsed: f64,
    #[serde(skip)]
    pub stratified: Option<StratifiedTable>,
}

impl CensusResult {
    pub fn order(&self) -> usize {
        self.group.order()
    }
}

fn guard(g: &GroupSpec, op: &'static str, limit: usize) -> Result<()> {
    if g.order() > limit {
        return Err(Error::GuardExceeded {
            op,
            limit,
            got: g.order(),
        });
    }
    Ok(())
}

/// `3 * 4^N - 3 * 2^N + 1`: triples with at least one empty set.
pub fn lower_bound(n: usize) -> BigUint {
    BigUint::from(3u8) * (BigUint::one() << (2 * n)) + BigUint::one() - BigUint::from(3u8) * (BigUint::one() << n)
}

/// Direct test of every triple against `x + y = z`.
pub fn count_brute(g: &GroupSpec) -> Result<CensusResult> {
    guard(g, "count_brute", BRUTE_LIMIT)?;
    let start = Instant::now();
    let n = g.order();
    let sums: Vec<usize> = (0..n * n).map(|i| g.add_idx(i / n, i % n)).collect();
    let subsets = 1u64 << n;
    let count: u64 = (0..subsets)
        .into_par_iter()
        .map(|a| {
            let mut local = 0u64;
            for b in 0..subsets {
                for c in 0..subsets {
                    let hit = (0..n).any(|x| {
                        a >> x & 1 == 1 && (0..n).any(|y| b >> y & 1 == 1 && c >> sums[x * n + y] & 1 == 1)
                    });
                    local += u64::from(!hit);
                }
            }
            local
        })
        .sum();
    Ok(CensusResult {
        group: g.clone(),
        t: BigUint::from(count),
        method: Method::Brute,
        elapsed: start.elapsed().as_secs_f64(),
        stratified: None,
    })
}

fn chunk_starts(len: usize, chunk: usize) -> Vec<(usize, usize)> {
    let chunk = chunk.max(1);
    (0..len.div_ceil(chunk))
        .map(|i| (i * chunk, ((i + 1) * chunk).min(len)))
        .collect()
}

/// Pair histogram over all `4^N` pairs.
pub fn reduced_histogram(g: &GroupSpec, opts: &CensusOptions) -> Result<PairHistogram> {
    guard(g, "count_reduced", REDUCED_LIMIT)?;
    let n = g.order();
    let kernel = MaskKernel::new(g);
    let subsets = 1usize << n;
    opts.run(|| {
        chunk_starts(subsets, opts.chunk)
            .into_par_iter()
            .map(|(lo, hi)| {
                let mut hist = PairHistogram::new(n);
                for a in lo as u64..hi as u64 {
                    let at = kernel.translates(a);
                    let wa = a.count_ones() as usize;
                    for b in 0..subsets as u64 {
                        let s = or_translates(&at, b);
                        hist.add(wa, b.count_ones() as usize, s.count_ones() as usize, 1);
                    }
                }
                hist
            })
            .reduce(|| PairHistogram::new(n), PairHistogram::merge)
    })
}

#[inline]
fn or_translates(at: &[u64], b: u64) -> u64 {
    let mut out = 0;
    let mut m = b;
    while m != 0 {
        out |= at[m.trailing_zeros() as usize];
        m &= m - 1;
    }
    out
}

/// Orbits of masks under the affine group, and translation classes.
struct OrbitPlan {
    /// Affine class of every mask.
    class: Vec<u32>,
    /// Least mask of each affine class, and the class size.
    reps: Vec<(u64, u64)>,
    /// Translation-least masks with their translation orbit size, sorted
    /// by affine class.
    translation_reps: Vec<(u64, u64)>,
}

fn units_mod(l: usize) -> Vec<usize> {
    (1..=l.max(1)).filter(|&u| u.gcd(&l) == 1).collect()
}

impl OrbitPlan {
    fn build(g: &GroupSpec, kernel: &MaskKernel) -> Self {
        let n = g.order();
        let dilations: Vec<PermTable> = units_mod(g.exponent())
            .into_iter()
            .map(|u| PermTable::new(&(0..n).map(|x| g.scale_idx(u, x)).collect::<Vec<_>>()))
            .collect();
        let subsets = 1usize << n;
        let mut class = vec![u32::MAX; subsets];
        let mut reps = Vec::new();
        for m in 0..subsets {
            if class[m] != u32::MAX {
                continue;
            }
            let id = reps.len() as u32;
            let mut size = 0u64;
            let mut stab = 0u64;
            for d in &dilations {
                let dm = d.apply(m as u64);
                for t in 0..n {
                    let img = kernel.translate(dm, t) as usize;
                    if img == m {
                        stab += 1;
                    }
                    if class[img] == u32::MAX {
                        class[img] = id;
                        size += 1;
                    }
                }
            }
            debug_assert_eq!(size * stab, (dilations.len() * n) as u64);
            reps.push((m as u64, size));
        }

        let mut translation_reps = Vec::new();
        for m in 0..subsets as u64 {
            let mut least = true;
            let mut stab = 0u64;
            for t in 0..n {
                let img = kernel.translate(m, t);
                if img < m {
                    least = false;
                    break;
                }
                stab += u64::from(img == m);
            }
            if least {
                translation_reps.push((m, n as u64 / stab));
            }
        }
        translation_reps.sort_by_key(|&(m, _)| (class[m as usize], m));
        OrbitPlan {
            class,
            reps,
            translation_reps,
        }
    }
}

/// Pair histogram from affine classes of `A` and translation classes of `B`.
pub fn symmetric_histogram(g: &GroupSpec, opts: &CensusOptions) -> Result<PairHistogram> {
    guard(g, "count_symmetric", SYMMETRIC_LIMIT)?;
    let n = g.order();
    let kernel = MaskKernel::new(g);
    let plan = OrbitPlan::build(g, &kernel);
    let hist = opts.run(|| {
        chunk_starts(plan.reps.len(), opts.chunk)
            .into_par_iter()
            .map(|(lo, hi)| {
                let mut hist = PairHistogram::new(n);
                for (i, &(rep, orbit)) in plan.reps.iter().enumerate().take(hi).skip(lo) {
                    let at = kernel.translates(rep);
                    let wa = rep.count_ones() as usize;
                    let first = plan
                        .translation_reps
                        .partition_point(|&(m, _)| (plan.class[m as usize] as usize) < i);
                    for &(b, wb) in &plan.translation_reps[first..] {
                        let s = or_translates(&at, b);
                        let k = s.count_ones() as usize;
                        let nb = b.count_ones() as usize;
                        let w = orbit * wb;
                        if plan.class[b as usize] as usize == i {
                            hist.add(wa, nb, k, w);
                        } else {
                            hist.add(wa, nb, k, w);
                            hist.add(nb, wa, k, w);
                        }
                    }
                }
                hist
            })
            .reduce(|| PairHistogram::new(n), PairHistogram::merge)
    })?;
    debug_assert_eq!(hist.pairs(), 1u64 << (2 * n));
    Ok(hist)
}

/// Histogram with the given method; brute force has none.
pub fn pair_histogram(g: &GroupSpec, method: Method, opts: &CensusOptions) -> Result<PairHistogram> {
    match method {
        Method::Reduced => reduced_histogram(g, opts),
        Method::Symmetric => symmetric_histogram(g, opts),
        Method::Brute => Err(Error::Precondition("brute force produces no pair histogram".into())),
    }
}

fn from_histogram(g: &GroupSpec, method: Method, opts: &CensusOptions) -> Result<CensusResult> {
    let start = Instant::now();
    let hist = pair_histogram(g, method, opts)?;
    let t = hist.total();
    let stratified = (g.order() <= STRATIFIED_LIMIT).then(|| hist.stratify());
    Ok(CensusResult {
        group: g.clone(),
        t,
        method,
        elapsed: start.elapsed().as_secs_f64(),
        stratified,
    })
}

pub fn count_reduced(g: &GroupSpec) -> Result<CensusResult> {
    count_reduced_with(g, &CensusOptions::default())
}

pub fn count_reduced_with(g: &GroupSpec, opts: &CensusOptions) -> Result<CensusResult> {
    from_histogram(g, Method::Reduced, opts)
}

pub fn count_symmetric(g: &GroupSpec) -> Result<CensusResult> {
    count_symmetric_with(g, &CensusOptions::default())
}

pub fn count_symmetric_with(g: &GroupSpec, opts: &CensusOptions) -> Result<CensusResult> {
    from_histogram(g, Method::Symmetric, opts)
}

pub fn count(g: &GroupSpec, method: Method, opts: &CensusOptions) -> Result<CensusResult> {
    match method {
        Method::Brute => count_brute(g),
        Method::Reduced => count_reduced_with(g, opts),
        Method::Symmetric => count_symmetric_with(g, opts),
    }
}

/// Stratified table; marginals are checked against the total.
pub fn stratified_census(g: &GroupSpec) -> Result<StratifiedTable> {
    guard(g, "stratified_census", STRATIFIED_LIMIT)?;
    let hist = symmetric_histogram(g, &CensusOptions::default())?;
    let table = hist.stratify();
    if table.total() != hist.total() {
        return Err(Error::Invariant("stratified total differs from the census".into()));
    }
    Ok(table)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ResidualReport {
    /// `T - (3 4^N - 3 2^N + 1)`.
    #[serde(serialize_with = "crate::cache::ser_decimal")]
    pub r_lb: BigInt,
    /// `T - 3 4^N`.
    #[serde(serialize_with = "crate::cache::ser_decimal")]
    pub r1: BigInt,
    /// `T - 3 4^N - 3 N 3^N`.
    #[serde(serialize_with = "crate::cache::ser_decimal")]
    pub r2: BigInt,
}

pub fn residuals_of(n: usize, t: &BigUint) -> Result<ResidualReport> {
    let t = BigInt::from(t.clone());
    let four = BigInt::from(3u8) * (BigInt::one() << (2 * n));
    let three = BigInt::from(3 * n) * num_traits::pow(BigInt::from(3u8), n);
    let r_lb = &t - BigInt::from(lower_bound(n));
    if r_lb < BigInt::zero() {
        return Err(Error::Invariant(format!("T = {t} is below the empty-set lower bound")));
    }
    Ok(ResidualReport {
        r_lb,
        r1: &t - &four,
        r2: t - four - three,
    })
}

pub fn residuals(result: &CensusResult) -> Result<ResidualReport> {
    residuals_of(result.order(), &result.t)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::abelian_groups_of_order;

    fn cyc(n: usize) -> GroupSpec {
        GroupSpec::cyclic(n).unwrap()
    }

    #[test]
    fn small_anchors_all_methods() {
        for (n, t) in [(1, 7u32), (2, 41), (3, 214)] {
            let g = cyc(n);
            assert_eq!(count_brute(&g).unwrap().t, BigUint::from(t));
            assert_eq!(count_reduced(&g).unwrap().t, BigUint::from(t));
            assert_eq!(count_symmetric(&g).unwrap().t, BigUint::from(t));
        }
    }

    #[test]
    fn methods_agree_up_to_order_five() {
        for n in 1..=5 {
            for g in abelian_groups_of_order(n).unwrap() {
                let brute = count_brute(&g).unwrap().t;
                assert_eq!(count_reduced(&g).unwrap().t, brute, "{g}");
                assert_eq!(count_symmetric(&g).unwrap().t, brute, "{g}");
            }
        }
    }

    #[test]
    fn partitioning_does_not_change_results() {
        let g = GroupSpec::new(&[2, 4]).unwrap();
        let base = symmetric_histogram(&g, &CensusOptions::default()).unwrap();
        for chunk in [1, 3, 17, 10_000] {
            for workers in [1, 2] {
                let opts = CensusOptions {
                    workers: Some(workers),
                    chunk,
                };
                assert_eq!(symmetric_histogram(&g, &opts).unwrap(), base);
                assert_eq!(reduced_histogram(&g, &opts).unwrap(), base);
            }
        }
    }

    #[test]
    fn guards() {
        assert!(matches!(count_brute(&cyc(9)), Err(Error::GuardExceeded { .. })));
        assert!(matches!(count_reduced(&cyc(17)), Err(Error::GuardExceeded { .. })));
        assert!(matches!(count_symmetric(&cyc(21)), Err(Error::GuardExceeded { .. })));
        assert!(matches!(stratified_census(&cyc(15)), Err(Error::GuardExceeded { .. })));
    }

    #[test]
    fn stratified_examples() {
        let z3 = stratified_census(&cyc(3)).unwrap();
        assert_eq!(*z3.get(1, 1, 1), BigUint::from(18u8));
        assert_eq!(z3.total(), BigUint::from(214u16));
        let n = 5;
        let f5 = stratified_census(&cyc(n)).unwrap();
        assert!(f5.get(3, 3, 1).is_zero());
        let binom = pascal(n);
        for b in 0..=n {
            for c in 0..=n {
                assert_eq!(*f5.get(0, b, c), &binom[n][b] * &binom[n][c]);
            }
        }
        // Cauchy-Davenport zeros
        for (a, b, c, _) in f5.nonzero() {
            if a >= 1 && b >= 1 {
                assert!(c <= (n + 1).saturating_sub(a + b), "({a},{b},{c})");
            }
        }
    }

    #[test]
    fn residual_examples() {
        let r = residuals_of(2, &BigUint::from(41u8)).unwrap();
        assert_eq!((r.r1.clone(), r.r_lb.clone()), (BigInt::from(-7), BigInt::from(4)));
        let r = residuals_of(3, &BigUint::from(214u8)).unwrap();
        assert_eq!(r.r2, BigInt::from(-221));
        let r = residuals_of(1, &BigUint::from(7u8)).unwrap();
        assert!(r.r_lb.is_zero());
        assert!(residuals_of(2, &BigUint::from(30u8)).is_err());
        assert_eq!(lower_bound(10), BigUint::from(3_142_657u32));
    }

    #[test]
    fn method_names_round_trip() {
        for m in [Method::Brute, Method::Reduced, Method::Symmetric] {
            assert_eq!(m.as_str().parse::<Method>().unwrap(), m);
        }
        assert!("fast".parse::<Method>().is_err());
    }
}

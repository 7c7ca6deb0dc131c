//! Numerical side of the census: residual slope fits, the entropy
//! optimisation over `gamma`, an exact audit of the binomial chain for
//! small set sizes, a seeded Chernoff experiment and the index-2 check.

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::group::GroupSpec;
use crate::subset::Subset;
use crate::sumset::sumset;

/// Exhaustive triple enumeration in [`index2_check`] up to this order.
pub const INDEX2_EXHAUSTIVE_LIMIT: usize = 8;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SlopeFit {
    /// `(N, value)` points used, zero values dropped.
    pub series: Vec<(usize, f64)>,
    /// `exp` of the least-squares slope of `ln |value|` against `N`.
    pub fitted_base: f64,
    pub slope: f64,
    pub intercept: f64,
    /// `ln |value| - (intercept + slope N)` per point.
    pub residuals: Vec<f64>,
    /// Inclusive range of `N` covered.
    pub window: (usize, usize),
}

/// Geometric growth rate of `|value|` by log-linear least squares.
pub fn slope_fit(series: &[(usize, f64)]) -> Result<SlopeFit> {
    let pts: Vec<(usize, f64)> = series.iter().copied().filter(|&(_, v)| v != 0.0 && v.is_finite()).collect();
    if pts.len() < 3 {
        return Err(Error::InsufficientData(format!("{} nonzero points, need 3", pts.len())));
    }
    let m = pts.len() as f64;
    let xs: Vec<f64> = pts.iter().map(|&(n, _)| n as f64).collect();
    let ys: Vec<f64> = pts.iter().map(|&(_, v)| v.abs().ln()).collect();
    let mx = xs.iter().sum::<f64>() / m;
    let my = ys.iter().sum::<f64>() / m;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    if sxx == 0.0 {
        return Err(Error::InsufficientData("all points share one N".into()));
    }
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let residuals = xs.iter().zip(&ys).map(|(x, y)| y - intercept - slope * x).collect();
    let window = (pts.iter().map(|p| p.0).min().unwrap_or(0), pts.iter().map(|p| p.0).max().unwrap_or(0));
    Ok(SlopeFit {
        series: pts,
        fitted_base: slope.exp(),
        slope,
        intercept,
        residuals,
        window,
    })
}

/// `ln |x|` for big integers beyond `f64` range; `None` for zero.
pub fn ln_abs(x: &BigInt) -> Option<f64> {
    if x.is_zero() {
        return None;
    }
    let bits = x.bits();
    let shift = bits.saturating_sub(60);
    let top = (x.magnitude() >> shift).to_f64()?;
    Some(top.ln() + shift as f64 * std::f64::consts::LN_2)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct GammaProfile {
    pub gamma_star: f64,
    pub base: f64,
}

/// `exp(-g ln g - (1-g) ln(1-g) + (1-g)^2 ln 2)`, extended continuously to `[0, 1]`.
pub fn gamma_f(g: f64) -> f64 {
    let xlx = |x: f64| if x <= 0.0 { 0.0 } else { x * x.ln() };
    (-xlx(g) - xlx(1.0 - g) + (1.0 - g).powi(2) * std::f64::consts::LN_2).exp()
}

/// Golden-section maximisation of [`gamma_f`] on `(0, 1)`.
pub fn gamma_optimize(tol: f64) -> Result<GammaProfile> {
    if !(tol >= 1e-10) {
        return Err(Error::Precondition(format!("tolerance must be at least 1e-10, got {tol}")));
    }
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    let mut x1 = hi - inv_phi * (hi - lo);
    let mut x2 = lo + inv_phi * (hi - lo);
    let (mut f1, mut f2) = (gamma_f(x1), gamma_f(x2));
    while hi - lo > tol {
        if f1 < f2 {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + inv_phi * (hi - lo);
            f2 = gamma_f(x2);
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - inv_phi * (hi - lo);
            f1 = gamma_f(x1);
        }
    }
    let gamma_star = (lo + hi) / 2.0;
    Ok(GammaProfile {
        gamma_star,
        base: gamma_f(gamma_star),
    })
}

/// Exact evaluation of the small-`a` chain
///
/// ```text
/// L  = sum_{1<=a<=M} C(p,a) sum_{1<=b<=p} C(p,b) sum_{1<=c<=p-a-b+1} C(p-a-b+1,c)
///   <= 2^{p+1} sum_a C(p,a) 2^-a sum_b C(p,b) 2^-b        (step 1)
///   <= 4 3^p C(p,M) 2^-M                                  (step 2)
///   <= 4 3^p (e p / 2M)^M                                 (step 3)
///    < 4 (15/4)^p                                         (step 4)
/// ```
///
/// Steps involving `e` use rational enclosures `e_lo < e < e_hi`, so every
/// comparison is exact.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ProofAudit {
    pub p: usize,
    pub m: usize,
    #[serde(serialize_with = "crate::cache::ser_decimal")]
    pub lhs: BigUint,
    pub log2_lhs: f64,
    /// `log2` of the step-1 and step-2 right-hand sides.
    pub log2_mid: [f64; 2],
    /// `log2 (4 3^p (e p / 2M)^M)`.
    pub log2_e_bound: f64,
    /// `log2 (4 (15/4)^p)`.
    pub log2_final: f64,
    pub steps: [bool; 4],
    pub ok: bool,
}

fn binomial_row(p: usize) -> Vec<BigUint> {
    let mut row = vec![BigUint::one(); p + 1];
    for k in 1..=p {
        row[k] = &row[k - 1] * BigUint::from(p - k + 1) / BigUint::from(k);
    }
    row
}

/// Rational `(lo, hi)` with `lo < e < hi`, width below `1e-30`.
fn e_enclosure() -> (BigRational, BigRational) {
    let mut sum = BigRational::zero();
    let mut term = BigRational::one();
    let mut k = 0u32;
    while k < 32 {
        sum += &term;
        k += 1;
        term /= BigRational::from_integer(BigInt::from(k));
    }
    // tail after k terms is below 2 / k!
    let hi = &sum + &term * BigRational::from_integer(BigInt::from(2));
    (sum, hi)
}

fn log2_rational(x: &BigRational) -> f64 {
    let ln = |v: &BigInt| ln_abs(v).unwrap_or(f64::NEG_INFINITY);
    (ln(x.numer()) - ln(x.denom())) / std::f64::consts::LN_2
}

pub fn proof_audit(p: usize, m: usize) -> Result<ProofAudit> {
    if m < 1 || 16 * m > p {
        return Err(Error::Precondition(format!("need 1 <= M <= p/16, got p = {p}, M = {m}")));
    }
    let row = binomial_row(p);
    let big = |v: BigUint| BigInt::from(v);
    let rat = |v: BigInt| BigRational::from_integer(v);
    let pow2 = |e: usize| BigUint::one() << e;

    let mut lhs = BigUint::zero();
    for a in 1..=m {
        let mut inner = BigUint::zero();
        for b in 1..=p {
            if a + b > p {
                break;
            }
            let q = p - a - b + 1;
            inner += &row[b] * (pow2(q) - 1u32);
        }
        lhs += &row[a] * inner;
    }

    // step 1, scaled by 2^{M + p}: sum_a sum_b C(p,a) C(p,b) 2^{2p+1+M-a-b}
    let mut step1_scaled = BigUint::zero();
    for a in 1..=m {
        for b in 1..=p {
            step1_scaled += (&row[a] * &row[b]) << (2 * p + 1 + m - a - b);
        }
    }
    let scale = rat(big(pow2(m + p)));
    let step1 = rat(big(step1_scaled)) / &scale;
    let three_p = BigUint::from(3u8).pow(p as u32);
    let step2 = rat(big(BigUint::from(4u8) * &three_p * &row[m])) / rat(big(pow2(m)));

    let (e_lo, e_hi) = e_enclosure();
    let ratio = |e: &BigRational| e * rat(BigInt::from(p)) / rat(BigInt::from(2 * m));
    let e_term = |e: &BigRational| rat(big(BigUint::from(4u8) * &three_p)) * num_traits::pow(ratio(e), m);
    let step3_lo = e_term(&e_lo);
    let step3_hi = e_term(&e_hi);
    let fin = rat(big(BigUint::from(4u8) * BigUint::from(15u8).pow(p as u32))) / rat(big(pow2(2 * p)));

    let lhs_r = rat(big(lhs.clone()));
    let steps = [lhs_r <= step1, step1 <= step2, step2 <= step3_lo, step3_hi < fin];
    Ok(ProofAudit {
        p,
        m,
        log2_lhs: log2_rational(&lhs_r),
        lhs,
        log2_mid: [log2_rational(&step1), log2_rational(&step2)],
        log2_e_bound: log2_rational(&step3_hi),
        log2_final: log2_rational(&fin),
        ok: steps.iter().all(|&s| s),
        steps,
    })
}

/// `2 max(e^{-lambda^2/4}, e^{-lambda sigma/2})`.
pub fn chernoff_bound(lambda: f64, sigma: f64) -> f64 {
    2.0 * (-lambda * lambda / 4.0).exp().max((-lambda * sigma / 2.0).exp())
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TailRow {
    pub lambda: f64,
    pub frequency: f64,
    pub bound: f64,
    /// Binomial standard error of a frequency at the bound.
    pub std_error: f64,
    pub ok: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ChernoffReport {
    pub p: usize,
    pub gamma: f64,
    pub trials: usize,
    pub seed: u64,
    pub mean_size: f64,
    pub sigma_size: f64,
    pub tails: Vec<TailRow>,
    pub mean_adjacent: f64,
    pub expected_adjacent: f64,
    pub sd_adjacent: f64,
    /// Fraction of trials with `| |C ∩ (C+1)| - gamma^2 p | >= lambda sd` for
    /// `lambda = 1, 2, 3`, `sd` the empirical standard deviation.
    pub adjacent_tail: Vec<(f64, f64)>,
    pub adjacent_mean_within_3se: bool,
    /// Only the independent-summand tails are asserted.
    pub ok: bool,
}

/// Tail deviations tested for `|C|`.
pub const CHERNOFF_LAMBDAS: [f64; 5] = [0.0, 1.0, 2.0, 3.0, 10.0];

/// Random `C ⊆ Z_p` with independent `Pr[x in C] = gamma`.
pub fn chernoff_experiment(p: usize, gamma: f64, trials: usize, seed: u64) -> Result<ChernoffReport> {
    if p < 100 || trials < 1000 || !(gamma > 0.0 && gamma < 1.0) {
        return Err(Error::Precondition(format!(
            "need p >= 100, trials >= 1000, 0 < gamma < 1; got ({p}, {trials}, {gamma})"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(0xC4E7);
    let mut sizes = Vec::with_capacity(trials);
    let mut adjacent = Vec::with_capacity(trials);
    let mut bits = vec![false; p];
    for _ in 0..trials {
        for b in bits.iter_mut() {
            *b = rng.gen_bool(gamma);
        }
        sizes.push(bits.iter().filter(|&&b| b).count() as f64);
        adjacent.push((0..p).filter(|&x| bits[x] && bits[(x + 1) % p]).count() as f64);
    }
    let pf = p as f64;
    let mean_size = gamma * pf;
    let sigma_size = (pf * gamma * (1.0 - gamma)).sqrt();
    let t = trials as f64;
    let tails: Vec<TailRow> = CHERNOFF_LAMBDAS
        .iter()
        .map(|&lambda| {
            let hits = sizes.iter().filter(|&&s| (s - mean_size).abs() >= lambda * sigma_size).count();
            let frequency = hits as f64 / t;
            let bound = chernoff_bound(lambda, sigma_size);
            let q = bound.min(1.0);
            let std_error = (q * (1.0 - q) / t).sqrt();
            TailRow {
                lambda,
                frequency,
                bound,
                std_error,
                ok: frequency <= bound + 3.0 * std_error,
            }
        })
        .collect();

    let mean_adjacent = adjacent.iter().sum::<f64>() / t;
    let sd_adjacent = (adjacent.iter().map(|k| (k - mean_adjacent).powi(2)).sum::<f64>() / (t - 1.0)).sqrt();
    let expected_adjacent = gamma * gamma * pf;
    let adjacent_tail = [1.0, 2.0, 3.0]
        .iter()
        .map(|&lambda| {
            let hits = adjacent
                .iter()
                .filter(|&&k| (k - expected_adjacent).abs() >= lambda * sd_adjacent)
                .count();
            (lambda, hits as f64 / t)
        })
        .collect();
    let ok = tails.iter().all(|r| r.ok);
    Ok(ChernoffReport {
        p,
        gamma,
        trials,
        seed,
        mean_size: sizes.iter().sum::<f64>() / t,
        sigma_size,
        tails,
        mean_adjacent,
        expected_adjacent,
        sd_adjacent,
        adjacent_tail,
        adjacent_mean_within_3se: (mean_adjacent - expected_adjacent).abs() <= 3.0 * sd_adjacent / t.sqrt(),
        ok,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Index2Report {
    pub group: GroupSpec,
    /// `2^{3N/2}` triples `A, B ⊆ H`, `C ⊆ G \ H`.
    #[serde(serialize_with = "crate::cache::ser_decimal")]
    pub count: BigUint,
    pub exhaustive: bool,
    pub ok: bool,
}

/// Checks that all triples with `A, B` in an index-2 subgroup `H` and `C`
/// in its complement avoid `x + y = z`.
pub fn index2_check(g: &GroupSpec) -> Result<Index2Report> {
    let subgroups = g.index_two_subgroups()?;
    let h = subgroups
        .first()
        .ok_or_else(|| Error::NoIndexTwoSubgroup(g.to_string()))?;
    let n = g.order();
    let inside = h.carrier.indices();
    let outside = h.carrier.complement().indices();
    let count = BigUint::one() << (3 * n / 2);
    let exhaustive = n <= INDEX2_EXHAUSTIVE_LIMIT;
    let ok = if exhaustive {
        let sub = |pick: &[usize], mask: u64| Subset::from_indices(n, pick.iter().enumerate().filter(|(i, _)| mask >> i & 1 == 1).map(|(_, &x)| x));
        let half = 1u64 << inside.len();
        let mut ok = true;
        let mut checked = 0u64;
        for am in 0..half {
            let a = sub(&inside, am)?;
            for bm in 0..half {
                let b = sub(&inside, bm)?;
                for cm in 0..1u64 << outside.len() {
                    let c = sub(&outside, cm)?;
                    let hit = a.iter().any(|x| b.iter().any(|y| c.contains(g.add_idx(x, y))));
                    ok &= !hit;
                    checked += 1;
                }
            }
        }
        ok && BigUint::from(checked) == count
    } else {
        sumset(g, &h.carrier, &h.carrier).is_disjoint(&h.carrier.complement())
    };
    Ok(Index2Report {
        group: g.clone(),
        count,
        exhaustive,
        ok,
    })
}

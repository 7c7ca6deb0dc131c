//! Fourier analysis on finite abelian groups: the naive DFT, large spectra,
//! dissociated sets (additive dimension), Chang's bound, Bohr sets and
//! greedy Bohr-set covers.
//!
//! The transform is `f^(chi) = sum_x f(x) conj(chi(x))` and the inverse is
//! `f(x) = N^-1 sum_chi f^(chi) chi(x)`. Transforms are `O(N^2)`; groups here
//! have at most a few thousand elements and exact comparisons matter more
//! than speed.

use num_complex::Complex64;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::group::{Character, Element, GroupSpec};
use crate::subset::Subset;
use crate::tolerance::{BOHR_MEMBERSHIP, DFT_SELF_CHECK, SPECTRUM_THRESHOLD};

/// Largest group order accepted by [`dft`].
pub const DFT_GUARD: usize = 4096;

/// Largest input accepted by exact additive dimension.
pub const EXACT_DIMENSION_GUARD: usize = 20;

/// Cap on the size of greedily built dissociated sets.
pub const GREEDY_DIMENSION_CAP: usize = 20;

/// Precomputed roots of unity and coordinates for fast phase evaluation.
struct PhaseTable {
    exponent: usize,
    roots: Vec<Complex64>,
    coords: Vec<Vec<usize>>,
    weights: Vec<usize>,
}

impl PhaseTable {
    fn new(g: &GroupSpec) -> Self {
        let l = g.exponent();
        let roots = (0..l)
            .map(|k| Complex64::from_polar(1.0, std::f64::consts::TAU * k as f64 / l as f64))
            .collect();
        let coords = (0..g.order()).map(|x| g.coords(x)).collect();
        let weights = g.moduli().iter().map(|&m| l / m).collect();
        PhaseTable {
            exponent: l,
            roots,
            coords,
            weights,
        }
    }

    /// `phase(r, x)` for every `x`, where `chi_r(x) = roots[phase]`.
    fn row(&self, r: usize) -> Vec<usize> {
        let l = self.exponent as u128;
        let c: Vec<u128> = self.coords[r]
            .iter()
            .zip(&self.weights)
            .map(|(&rj, &w)| rj as u128 * w as u128 % l)
            .collect();
        self.coords
            .iter()
            .map(|xc| (xc.iter().zip(&c).map(|(&xj, &cj)| xj as u128 * cj).sum::<u128>() % l) as usize)
            .collect()
    }
}

/// Fourier coefficients indexed by dual index.
#[derive(Clone, Debug)]
pub struct SpectrumCoefficients {
    pub coeffs: Vec<Complex64>,
    /// `sum_x |f(x)|`; equals `|A|` for an indicator.
    pub source_norm: f64,
}

impl SpectrumCoefficients {
    pub fn magnitude(&self, chi: Character) -> f64 {
        self.coeffs[chi.0].norm()
    }
}

fn check_len(g: &GroupSpec, len: usize) -> Result<()> {
    if len != g.order() {
        return Err(Error::LengthMismatch {
            expected: g.order(),
            got: len,
        });
    }
    if g.order() > DFT_GUARD {
        return Err(Error::GuardExceeded {
            op: "dft",
            limit: DFT_GUARD,
            got: g.order(),
        });
    }
    Ok(())
}

fn raw_dft(g: &GroupSpec, table: &PhaseTable, f: &[Complex64]) -> Vec<Complex64> {
    let l = table.exponent;
    (0..g.order())
        .map(|r| {
            table
                .row(r)
                .iter()
                .zip(f)
                .map(|(&k, &v)| v * table.roots[(l - k) % l])
                .sum()
        })
        .collect()
}

fn raw_inverse(g: &GroupSpec, table: &PhaseTable, coeffs: &[Complex64]) -> Vec<Complex64> {
    let n = g.order() as f64;
    // chi_r(x) is symmetric in (r, x) under the fixed identification
    (0..g.order())
        .map(|x| {
            table
                .row(x)
                .iter()
                .zip(coeffs)
                .map(|(&k, &c)| c * table.roots[k])
                .sum::<Complex64>()
                / n
        })
        .collect()
}

/// Naive DFT with Parseval and inversion self-checks.
pub fn dft(g: &GroupSpec, f: &[Complex64]) -> Result<SpectrumCoefficients> {
    check_len(g, f.len())?;
    let table = PhaseTable::new(g);
    let coeffs = raw_dft(g, &table, f);
    let n = g.order() as f64;

    let energy: f64 = f.iter().map(|v| v.norm_sqr()).sum();
    let spectral: f64 = coeffs.iter().map(|c| c.norm_sqr()).sum::<f64>() / n;
    if (energy - spectral).abs() > DFT_SELF_CHECK * energy.max(f64::MIN_POSITIVE) {
        return Err(Error::NumericalCheck(format!(
            "Parseval: sum |f|^2 = {energy}, N^-1 sum |f^|^2 = {spectral}"
        )));
    }
    let back = raw_inverse(g, &table, &coeffs);
    let scale = f.iter().map(|v| v.norm()).fold(0.0, f64::max).max(1.0);
    let err = back
        .iter()
        .zip(f)
        .map(|(b, v)| (b - v).norm())
        .fold(0.0, f64::max);
    if err > DFT_SELF_CHECK * scale {
        return Err(Error::NumericalCheck(format!("inversion error {err}")));
    }
    Ok(SpectrumCoefficients {
        coeffs,
        source_norm: f.iter().map(|v| v.norm()).sum(),
    })
}

/// `N^-1 sum_{r in support} coeffs[r] chi_r(x)` for every `x`.
pub fn partial_inverse(g: &GroupSpec, coeffs: &[Complex64], support: &[Character]) -> Result<Vec<Complex64>> {
    check_len(g, coeffs.len())?;
    let table = PhaseTable::new(g);
    let n = g.order() as f64;
    let mut out = vec![Complex64::new(0.0, 0.0); g.order()];
    for chi in support {
        let c = coeffs[chi.0] / n;
        for (o, &k) in out.iter_mut().zip(&table.row(chi.0)) {
            *o += c * table.roots[k];
        }
    }
    Ok(out)
}

pub fn inverse_dft(g: &GroupSpec, coeffs: &[Complex64]) -> Result<Vec<Complex64>> {
    check_len(g, coeffs.len())?;
    Ok(raw_inverse(g, &PhaseTable::new(g), coeffs))
}

pub fn dft_real(g: &GroupSpec, f: &[f64]) -> Result<SpectrumCoefficients> {
    let f: Vec<Complex64> = f.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    dft(g, &f)
}

pub fn indicator(a: &Subset) -> Vec<f64> {
    (0..a.universe()).map(|x| if a.contains(x) { 1.0 } else { 0.0 }).collect()
}

pub fn dft_subset(g: &GroupSpec, a: &Subset) -> Result<SpectrumCoefficients> {
    dft_real(g, &indicator(a))
}

/// Characters whose coefficient reaches `eps * size`, inclusive at the
/// threshold up to a relative slack of [`SPECTRUM_THRESHOLD`].
pub fn spectrum_from(coeffs: &SpectrumCoefficients, size: usize, eps: f64) -> Vec<Character> {
    let threshold = eps * size as f64 - SPECTRUM_THRESHOLD * (size as f64).max(1.0);
    coeffs
        .coeffs
        .iter()
        .enumerate()
        .filter(|(_, c)| c.norm() >= threshold)
        .map(|(r, _)| Character(r))
        .collect()
}

/// `Spec_eps(A) = {chi : |A^(chi)| >= eps |A|}`.
pub fn spectrum(g: &GroupSpec, a: &Subset, eps: f64) -> Result<Vec<Character>> {
    if a.is_empty() {
        return Err(Error::EmptyInput("spectrum"));
    }
    Ok(spectrum_from(&dft_subset(g, a)?, a.len(), eps))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DimensionMode {
    Exact,
    Greedy,
}

/// A dissociated set of characters certifying a dimension lower bound.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ChangBasis {
    pub lambda: Vec<Character>,
    pub claimed_dim: usize,
}

/// All `2^k` subset sums as a set; `None` as soon as two collide.
/// Distinct subset sums is equivalent to having no nontrivial relation
/// `sum e_l l = 0` with `e_l in {-1, 0, 1}`.
fn subset_sums(g: &GroupSpec, set: &[Character]) -> Option<Subset> {
    let mut sums = Subset::empty(g.order());
    sums.insert(0);
    for chi in set {
        let shifted = g.translate(&sums, Element(chi.0));
        if !shifted.is_disjoint(&sums) {
            return None;
        }
        sums.union_with(&shifted);
    }
    Some(sums)
}

pub fn is_dissociated(g: &GroupSpec, set: &[Character]) -> bool {
    subset_sums(g, set).is_some()
}

fn dedup_sorted(set: &[Character]) -> Vec<Character> {
    let mut v = set.to_vec();
    v.sort();
    v.dedup();
    v
}

fn exact_search(
    g: &GroupSpec,
    cands: &[Character],
    start: usize,
    chosen: &mut Vec<Character>,
    sums: &Subset,
    best: &mut Vec<Character>,
    cap: usize,
) {
    if chosen.len() > best.len() {
        *best = chosen.clone();
    }
    if chosen.len() == cap {
        return;
    }
    for i in start..cands.len() {
        if chosen.len() + (cands.len() - i) <= best.len() {
            return;
        }
        let shifted = g.translate(sums, Element(cands[i].0));
        if !shifted.is_disjoint(sums) {
            continue;
        }
        let mut next = sums.clone();
        next.union_with(&shifted);
        chosen.push(cands[i]);
        exact_search(g, cands, i + 1, chosen, &next, best, cap);
        chosen.pop();
    }
}

/// Size of the largest dissociated subset of `set` (exact) or a certified
/// lower bound (greedy scan by increasing dual index).
pub fn additive_dimension(g: &GroupSpec, set: &[Character], mode: DimensionMode) -> Result<(usize, ChangBasis)> {
    let cands = dedup_sorted(set);
    for chi in &cands {
        g.check(Element(chi.0))?;
    }
    let lambda = match mode {
        DimensionMode::Exact => {
            if set.len() > EXACT_DIMENSION_GUARD {
                return Err(Error::GuardExceeded {
                    op: "additive_dimension(exact)",
                    limit: EXACT_DIMENSION_GUARD,
                    got: set.len(),
                });
            }
            // 2^k distinct sums fit in the group, so k <= log2 N
            let cap = (usize::BITS - 1 - g.order().leading_zeros()) as usize;
            let mut sums = Subset::empty(g.order());
            sums.insert(0);
            let mut best = Vec::new();
            exact_search(g, &cands, 0, &mut Vec::new(), &sums, &mut best, cap);
            best
        }
        DimensionMode::Greedy => greedy_dissociated(g, &cands),
    };
    let dim = lambda.len();
    Ok((
        dim,
        ChangBasis {
            lambda,
            claimed_dim: dim,
        },
    ))
}

fn greedy_dissociated(g: &GroupSpec, cands: &[Character]) -> Vec<Character> {
    let mut sums = Subset::empty(g.order());
    sums.insert(0);
    let mut out = Vec::new();
    for &chi in cands {
        if out.len() == GREEDY_DIMENSION_CAP {
            break;
        }
        let shifted = g.translate(&sums, Element(chi.0));
        if shifted.is_disjoint(&sums) {
            sums.union_with(&shifted);
            out.push(chi);
        }
    }
    out
}

/// A maximal dissociated subset of `set`: every member of `set` is then a
/// `{-1, 0, 1}` combination of the result.
pub fn spanning_basis(g: &GroupSpec, set: &[Character]) -> ChangBasis {
    let lambda = greedy_dissociated(g, &dedup_sorted(set));
    ChangBasis {
        claimed_dim: lambda.len(),
        lambda,
    }
}

/// All `sum xi_l l` with `xi_l in {-1, 0, 1}`.
pub fn signed_combinations(g: &GroupSpec, basis: &[Character]) -> Subset {
    let mut reach = Subset::empty(g.order());
    reach.insert(0);
    for chi in basis {
        let plus = g.translate(&reach, Element(chi.0));
        let minus = g.translate(&reach, Element(g.neg_idx(chi.0)));
        reach.union_with(&plus);
        reach.union_with(&minus);
    }
    reach
}

/// True when every target is a `{-1, 0, 1}` combination of `basis`.
pub fn spans(g: &GroupSpec, basis: &[Character], targets: &[Character]) -> bool {
    let reach = signed_combinations(g, basis);
    targets.iter().all(|chi| reach.contains(chi.0))
}

/// Outcome of checking `dim Spec_eps(A) <= 2 eps^-2 log2(N / |A|)`.
#[derive(Clone, Debug, Serialize)]
pub struct ChangCheck {
    pub spectrum_size: usize,
    pub dim_lower_bound: usize,
    pub exact: bool,
    pub chang_bound: f64,
    pub ok: bool,
}

pub fn chang_bound(n: usize, size: usize, eps: f64) -> f64 {
    2.0 / (eps * eps) * (n as f64 / size as f64).log2()
}

pub fn chang_check(g: &GroupSpec, a: &Subset, eps: f64) -> Result<ChangCheck> {
    let spec = spectrum(g, a, eps)?;
    let exact = spec.len() <= EXACT_DIMENSION_GUARD;
    let mode = if exact { DimensionMode::Exact } else { DimensionMode::Greedy };
    let (dim, basis) = additive_dimension(g, &spec, mode)?;
    debug_assert!(is_dissociated(g, &basis.lambda));
    let bound = chang_bound(g.order(), a.len(), eps);
    Ok(ChangCheck {
        spectrum_size: spec.len(),
        dim_lower_bound: dim,
        exact,
        chang_bound: bound,
        ok: dim as f64 <= bound + 1e-12,
    })
}

/// `2 |sin(pi k / L)| = |chi(x) - 1|` for phase `k`.
#[inline]
fn chord(k: usize, l: usize) -> f64 {
    2.0 * (std::f64::consts::PI * k as f64 / l as f64).sin().abs()
}

/// `Bohr(Gamma, radius) = {x : |chi(x) - 1| <= radius for all chi in Gamma}`.
#[derive(Clone, Debug)]
pub struct BohrSpec {
    pub gamma: Vec<Character>,
    pub radius: f64,
    pub realized: Subset,
}

impl BohrSpec {
    pub fn dim(&self) -> usize {
        self.gamma.len()
    }

    pub fn size(&self) -> usize {
        self.realized.len()
    }

    /// `(radius / 2 pi)^dim N`, capped at `N` (the bound is stated for
    /// radii up to `2 pi`; beyond `2` the Bohr set is everything anyway).
    pub fn size_bound(&self) -> f64 {
        let n = self.realized.universe() as f64;
        ((self.radius / std::f64::consts::TAU).powi(self.dim() as i32) * n).min(n)
    }

    pub fn meets_size_bound(&self) -> bool {
        self.size() as f64 >= self.size_bound() * (1.0 - 1e-12)
    }
}

impl Serialize for BohrSpec {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Repr {
            gamma: Vec<usize>,
            radius: f64,
            size: usize,
            dim: usize,
        }
        Repr {
            gamma: self.gamma.iter().map(|c| c.0).collect(),
            radius: self.radius,
            size: self.size(),
            dim: self.dim(),
        }
        .serialize(serializer)
    }
}

pub fn bohr_set(g: &GroupSpec, gamma: &[Character], radius: f64) -> Result<BohrSpec> {
    if !(radius > 0.0) {
        return Err(Error::Precondition(format!("Bohr radius must be positive, got {radius}")));
    }
    for chi in gamma {
        g.check(Element(chi.0))?;
    }
    let l = g.exponent();
    let rows: Vec<Vec<usize>> = if gamma.is_empty() {
        Vec::new()
    } else {
        let table = PhaseTable::new(g);
        gamma.iter().map(|chi| table.row(chi.0)).collect()
    };
    let realized = Subset::from_indices(
        g.order(),
        (0..g.order()).filter(|&x| rows.iter().all(|row| chord(row[x], l) <= radius + BOHR_MEMBERSHIP)),
    )?;
    let spec = BohrSpec {
        gamma: gamma.to_vec(),
        radius,
        realized,
    };
    if !spec.meets_size_bound() {
        return Err(Error::Invariant(format!(
            "Bohr set of dim {} radius {} has size {} < {}",
            spec.dim(),
            radius,
            spec.size(),
            spec.size_bound()
        )));
    }
    Ok(spec)
}

/// Shifts `s_i` such that `s_i + Bohr(Gamma, radius)` cover the group,
/// found as a maximal packing of the half-radius Bohr set.
#[derive(Clone, Debug, Serialize)]
pub struct BohrCover {
    pub shifts: Vec<Element>,
    pub t: usize,
    pub half: BohrSpec,
    pub full: BohrSpec,
}

pub fn bohr_cover(g: &GroupSpec, gamma: &[Character], radius: f64) -> Result<BohrCover> {
    let half = bohr_set(g, gamma, radius / 2.0)?;
    let full = bohr_set(g, gamma, radius)?;
    let mut occupied = Subset::empty(g.order());
    let mut shifts = Vec::new();
    for s in 0..g.order() {
        if occupied.contains(s) {
            continue;
        }
        let placed = g.translate(&half.realized, Element(s));
        if placed.is_disjoint(&occupied) {
            occupied.union_with(&placed);
            shifts.push(Element(s));
        }
    }
    let t = shifts.len();
    let mut covered = Subset::empty(g.order());
    for &s in &shifts {
        covered.union_with(&g.translate(&full.realized, s));
    }
    if covered.len() != g.order() {
        return Err(Error::Invariant(format!(
            "Bohr cover misses {} elements",
            g.order() - covered.len()
        )));
    }
    if t * half.size() > g.order() {
        return Err(Error::Invariant(format!(
            "packing of {t} shifts of a size-{} set exceeds N",
            half.size()
        )));
    }
    Ok(BohrCover { shifts, t, half, full })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: Complex64, b: f64) -> bool {
        (a - Complex64::new(b, 0.0)).norm() < 1e-9
    }

    #[test]
    fn dft_examples() {
        let z6 = GroupSpec::new(&[6]).unwrap();
        let delta = dft_subset(&z6, &z6.subset([0]).unwrap()).unwrap();
        assert!(delta.coeffs.iter().all(|&c| close(c, 1.0)));
        let ones = dft_real(&z6, &[1.0; 6]).unwrap();
        assert!(close(ones.coeffs[0], 6.0));
        assert!(ones.coeffs[1..].iter().all(|&c| close(c, 0.0)));
        let z4 = GroupSpec::new(&[4]).unwrap();
        let h = dft_subset(&z4, &z4.subset([0, 2]).unwrap()).unwrap();
        let expect = [2.0, 0.0, 2.0, 0.0];
        for (c, e) in h.coeffs.iter().zip(expect) {
            assert!(close(*c, e));
        }
        assert!(matches!(dft_real(&z4, &[1.0; 3]), Err(Error::LengthMismatch { .. })));
    }

    #[test]
    fn spectrum_examples() {
        let z4 = GroupSpec::new(&[4]).unwrap();
        assert_eq!(spectrum(&z4, &Subset::full(4), 0.3).unwrap(), vec![Character(0)]);
        let s = spectrum(&z4, &z4.subset([0, 2]).unwrap(), 0.9).unwrap();
        assert_eq!(s, vec![Character(0), Character(2)]);
        assert!(matches!(spectrum(&z4, &Subset::empty(4), 0.5), Err(Error::EmptyInput(_))));
    }

    #[test]
    fn dimension_examples() {
        let z7 = GroupSpec::new(&[7]).unwrap();
        let c = |v: &[usize]| v.iter().map(|&x| Character(x)).collect::<Vec<_>>();
        assert_eq!(additive_dimension(&z7, &c(&[0]), DimensionMode::Exact).unwrap().0, 0);
        assert_eq!(additive_dimension(&z7, &c(&[1, 2]), DimensionMode::Exact).unwrap().0, 2);
        assert_eq!(additive_dimension(&z7, &c(&[1, 2, 3]), DimensionMode::Exact).unwrap().0, 2);
        assert!(!is_dissociated(&z7, &c(&[1, 2, 3])));
        let many: Vec<Character> = (0..21).map(|i| Character(i % 7)).collect();
        assert!(matches!(
            additive_dimension(&z7, &many, DimensionMode::Exact),
            Err(Error::GuardExceeded { .. })
        ));
        let (d, basis) = additive_dimension(&z7, &many, DimensionMode::Greedy).unwrap();
        assert_eq!(d, basis.lambda.len());
        assert!(is_dissociated(&z7, &basis.lambda));
    }

    #[test]
    fn chang_examples() {
        let z4 = GroupSpec::new(&[4]).unwrap();
        let full = chang_check(&z4, &Subset::full(4), 0.5).unwrap();
        assert_eq!((full.dim_lower_bound, full.chang_bound, full.ok), (0, 0.0, true));
        let r = chang_check(&z4, &z4.subset([0, 2]).unwrap(), 0.9).unwrap();
        assert_eq!(r.dim_lower_bound, 1);
        assert!((r.chang_bound - 2.0 / 0.81).abs() < 1e-12);
        assert!(r.ok);
    }

    #[test]
    fn bohr_examples() {
        let f5 = GroupSpec::new(&[5]).unwrap();
        assert_eq!(bohr_set(&f5, &[], 0.1).unwrap().size(), 5);
        assert_eq!(bohr_set(&f5, &[Character(1)], 2.0).unwrap().size(), 5);
        assert_eq!(bohr_set(&f5, &[Character(1)], 1.0).unwrap().realized.indices(), vec![0]);
        assert_eq!(bohr_set(&f5, &[Character(1)], 1.3).unwrap().realized.indices(), vec![0, 1, 4]);
        assert!(bohr_set(&f5, &[Character(1)], 0.0).is_err());
        let json = serde_json::to_value(bohr_set(&f5, &[Character(1)], 1.3).unwrap()).unwrap();
        assert_eq!(json["gamma"], serde_json::json!([1]));
        assert_eq!(json["size"], 3);
        assert_eq!(json["dim"], 1);
    }

    #[test]
    fn bohr_cover_examples() {
        let f5 = GroupSpec::new(&[5]).unwrap();
        let c = bohr_cover(&f5, &[], 1.0).unwrap();
        assert_eq!((c.t, c.shifts.clone()), (1, vec![Element(0)]));
        let c = bohr_cover(&f5, &[Character(1)], 0.1).unwrap();
        assert_eq!(c.t, 5);
        let c = bohr_cover(&f5, &[Character(1)], 2.6).unwrap();
        assert_eq!(c.half.realized.indices(), vec![0, 1, 4]);
        assert_eq!(c.t, 1);
        assert_eq!(c.full.size(), 5);
    }

    #[test]
    fn spanning_basis_spans_its_input() {
        let g = GroupSpec::new(&[3, 9]).unwrap();
        let set: Vec<Character> = [1usize, 4, 5, 10, 13, 26].iter().map(|&x| Character(x)).collect();
        let b = spanning_basis(&g, &set);
        assert!(is_dissociated(&g, &b.lambda));
        assert!(spans(&g, &b.lambda, &set));
    }
}

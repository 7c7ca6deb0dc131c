//! Structure of dense sets whose sumset misses part of the group.
//!
//! * Pollard's thick-sumset inequality, for `Z_p` and in the general form
//!   with a maximal proper subgroup, plus the size-sum consequence for three
//!   mutually avoiding sets.
//! * The robust filtering lemma: if `Z` avoids `X +_delta Y`, removing a
//!   small `X'` makes `X \ X'` avoid `Z -_eta Y`.
//! * The Bohr-cover decomposition: for `C` avoiding `A + B` (or `A +_eta B`)
//!   an exceptional set `Y` and a container `W` built from shifts of one
//!   Bohr set, with `C \ Y ⊆ W` and `W` avoiding `A +_{eta+delta} B`.
//!
//! `W` is the union of the selected shifts with `Y` removed. The raw union
//! is kept alongside it, together with the number of its elements that
//! break the avoidance property.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::fourier::{
    bohr_cover, dft_subset, partial_inverse, spanning_basis, spans, spectrum_from, BohrSpec,
    ChangBasis,
};
use crate::group::{Element, GroupSpec};
use crate::subset::Subset;
use crate::sumset::{avoids, convolution, thick_difference, thick_sumset, thick_threshold};
use crate::tolerance::THRESHOLD;

/// `delta <= eps^2 / REMARK_DELTA_DIVISOR` in [`size_sum_check`]. Any value
/// above 9 keeps `3 sqrt(delta) < eps`.
pub const REMARK_DELTA_DIVISOR: f64 = 16.0;

/// Spanning of the spectrum by the basis is checked exhaustively up to
/// this basis size (`3^k` combinations).
pub const SPAN_CHECK_LIMIT: usize = 16;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PollardReport {
    pub thick_size: usize,
    pub rhs_bound: f64,
    pub slack: f64,
    /// `|H|` for the general-group form.
    pub subgroup_size: Option<usize>,
}

impl PollardReport {
    pub fn holds(&self) -> bool {
        self.slack >= -THRESHOLD
    }
}

/// A check either ran, or its hypotheses did not hold.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub enum Outcome<T> {
    Checked(T),
    Skipped(String),
}

impl<T> Outcome<T> {
    pub fn checked(&self) -> Option<&T> {
        match self {
            Outcome::Checked(r) => Some(r),
            Outcome::Skipped(_) => None,
        }
    }
}

/// `min(p, a + b) - 2 p sqrt(eps)`.
pub fn pollard_bound(p: usize, a: usize, b: usize, eps: f64) -> f64 {
    p.min(a + b) as f64 - 2.0 * p as f64 * eps.sqrt()
}

/// `min(N, a + b - h) - 3 sqrt(eps) N`.
pub fn general_pollard_bound(n: usize, a: usize, b: usize, h: usize, eps: f64) -> f64 {
    (n as i64).min(a as i64 + b as i64 - h as i64) as f64 - 3.0 * eps.sqrt() * n as f64
}

/// Both Pollard forms need `sqrt(eps) N < |A|, |B|`.
pub fn pollard_applies(n: usize, a: usize, b: usize, eps: f64) -> bool {
    let lhs = eps.sqrt() * n as f64;
    lhs < a as f64 && lhs < b as f64
}

fn pollard_precondition(g: &GroupSpec, a: &Subset, b: &Subset, eps: f64) -> Option<String> {
    let lhs = eps.sqrt() * g.order() as f64;
    (!pollard_applies(g.order(), a.len(), b.len(), eps)).then(|| {
        format!(
            "sqrt(eps) N = {lhs:.4} is not below |A| = {} and |B| = {}",
            a.len(),
            b.len()
        )
    })
}

fn check_unit(name: &str, v: f64) -> Result<()> {
    if v > 0.0 && v <= 1.0 {
        Ok(())
    } else {
        Err(Error::Precondition(format!("{name} must lie in (0, 1], got {v}")))
    }
}

/// `|A +_eps B| >= min(p, |A| + |B|) - 2 p sqrt(eps)` in `Z_p`.
pub fn pollard_slack(g: &GroupSpec, a: &Subset, b: &Subset, eps: f64) -> Result<Outcome<PollardReport>> {
    if !g.is_prime_cyclic() {
        return Err(Error::Precondition(format!("{g} is not a prime cyclic group")));
    }
    check_unit("eps", eps)?;
    if let Some(why) = pollard_precondition(g, a, b, eps) {
        return Ok(Outcome::Skipped(why));
    }
    let thick_size = thick_sumset(g, a, b, eps).len();
    let rhs_bound = pollard_bound(g.order(), a.len(), b.len(), eps);
    Ok(Outcome::Checked(PollardReport {
        thick_size,
        rhs_bound,
        slack: thick_size as f64 - rhs_bound,
        subgroup_size: None,
    }))
}

/// `|A +_eps B| >= min(N, |A| + |B| - |H|) - 3 sqrt(eps) N`, `H` a maximal
/// proper subgroup.
pub fn general_pollard_slack(g: &GroupSpec, a: &Subset, b: &Subset, eps: f64) -> Result<Outcome<PollardReport>> {
    let h = g.maximal_proper_subgroup()?;
    check_unit("eps", eps)?;
    if let Some(why) = pollard_precondition(g, a, b, eps) {
        return Ok(Outcome::Skipped(why));
    }
    let thick_size = thick_sumset(g, a, b, eps).len();
    let rhs_bound = general_pollard_bound(g.order(), a.len(), b.len(), h.order(), eps);
    Ok(Outcome::Checked(PollardReport {
        thick_size,
        rhs_bound,
        slack: thick_size as f64 - rhs_bound,
        subgroup_size: Some(h.order()),
    }))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SizeSumReport {
    pub size_sum: usize,
    pub bound: f64,
    pub holds: bool,
}

/// For `W_a, W_b, W_c` of size at least `eps N` with `W_a` avoiding
/// `W_b +_delta W_c` and `delta <= eps^2 / 16`:
/// `|W_a| + |W_b| + |W_c| <= N + |H| + 3 sqrt(delta) N`.
pub fn size_sum_check(
    g: &GroupSpec,
    wa: &Subset,
    wb: &Subset,
    wc: &Subset,
    eps: f64,
    delta: f64,
) -> Result<Outcome<SizeSumReport>> {
    let h = g.maximal_proper_subgroup()?;
    check_unit("eps", eps)?;
    check_unit("delta", delta)?;
    let n = g.order() as f64;
    if [wa, wb, wc].iter().any(|w| (w.len() as f64) < eps * n) {
        return Ok(Outcome::Skipped("some set is smaller than eps N".into()));
    }
    if delta > eps * eps / REMARK_DELTA_DIVISOR {
        return Ok(Outcome::Skipped(format!("delta {delta} exceeds eps^2/{REMARK_DELTA_DIVISOR}")));
    }
    if let Some(why) = pollard_precondition(g, wb, wc, delta) {
        return Ok(Outcome::Skipped(why));
    }
    if !avoids(wa, &thick_sumset(g, wb, wc, delta)) {
        return Ok(Outcome::Skipped("W_a meets W_b +_delta W_c".into()));
    }
    let size_sum = wa.len() + wb.len() + wc.len();
    let bound = n + h.order() as f64 + 3.0 * delta.sqrt() * n;
    Ok(Outcome::Checked(SizeSumReport {
        size_sum,
        bound,
        holds: size_sum as f64 <= bound + THRESHOLD,
    }))
}

#[derive(Clone, Debug, Serialize)]
pub struct RobustFilter {
    pub x_prime: Subset,
    pub eta: f64,
    /// `|X| / T`.
    pub size_bound: f64,
    pub size_ok: bool,
    pub avoidance_ok: bool,
}

impl RobustFilter {
    pub fn holds(&self) -> bool {
        self.size_ok && self.avoidance_ok
    }
}

/// With `eta = delta T / eps`, returns `X' = X ∩ (Z -_eta Y)`, so that
/// `X \ X'` avoids `Z -_eta Y`, and checks `|X'| <= |X| / T`.
pub fn robust_filter(
    g: &GroupSpec,
    x: &Subset,
    y: &Subset,
    z: &Subset,
    delta: f64,
    eps: f64,
    t: f64,
) -> Result<RobustFilter> {
    check_unit("delta", delta)?;
    check_unit("eps", eps)?;
    if !(t > 1.0) {
        return Err(Error::Precondition(format!("T must exceed 1, got {t}")));
    }
    if z.is_empty() || x.is_empty() || y.is_empty() {
        return Err(Error::EmptyInput("robust_filter"));
    }
    if (x.len() as f64) < eps * g.order() as f64 {
        return Err(Error::Precondition(format!(
            "|X| = {} is below eps p = {}",
            x.len(),
            eps * g.order() as f64
        )));
    }
    if !avoids(z, &thick_sumset(g, x, y, delta)) {
        return Err(Error::Precondition("Z meets X +_delta Y".into()));
    }
    let eta = delta * t / eps;
    let diff = thick_difference(g, z, y, eta);
    let x_prime = x.intersection(&diff);
    let size_bound = x.len() as f64 / t;
    let avoidance_ok = avoids(&x.difference(&x_prime), &diff);
    Ok(RobustFilter {
        size_ok: x_prime.len() as f64 <= size_bound + THRESHOLD,
        avoidance_ok,
        x_prime,
        eta,
        size_bound,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DecompositionParams {
    pub alpha: f64,
    pub beta: f64,
    pub delta: f64,
    pub eps: f64,
    pub eta: f64,
    /// `delta (alpha beta)^{-1/2}`.
    pub zeta: f64,
}

/// Pass/fail of each structural guarantee, with the quantities behind it.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DecompositionChecks {
    /// `C \ Y ⊆ W`.
    pub containment: bool,
    pub y_size: usize,
    pub y_bound: f64,
    pub y_bound_ok: bool,
    /// Every `w` in `W` has `(A*B)(w) < (eta + delta) p`.
    pub avoidance: bool,
    /// Elements of the raw shift union that break avoidance.
    pub raw_violations: usize,
    /// `|W| <= p - |A| - |B| + 2 p sqrt(eta + delta)`; `None` when
    /// `|A| + |B| > p`.
    pub w_bound: Option<f64>,
    pub w_bound_ok: bool,
    /// `sum_x (f - g)^2 <= eps^2 |A|^2 |B|`.
    pub energy: f64,
    pub energy_bound: f64,
    pub energy_ok: bool,
    /// Whether the basis spans the spectrum; `None` if too large to check.
    pub spans_spectrum: Option<bool>,
}

impl DecompositionChecks {
    /// The four container invariants plus the truncation-energy bound.
    pub fn all_hold(&self) -> bool {
        self.containment && self.y_bound_ok && self.avoidance && self.w_bound_ok && self.energy_ok
    }
}

#[derive(Clone, Debug)]
pub struct Decomposition {
    pub params: DecompositionParams,
    /// Points where the spectral approximant is off by more than `delta p`.
    pub y: Subset,
    pub w_raw: Subset,
    pub w: Subset,
    pub lambda: ChangBasis,
    pub spectrum_size: usize,
    pub bohr: BohrSpec,
    pub shifts_used: Vec<Element>,
    pub t_total: usize,
    /// `(4 pi |Lambda| / zeta)^{|Lambda|}`, reported only.
    pub t_reference: f64,
    pub checks: DecompositionChecks,
}

/// Flat JSON view of a [`Decomposition`].
#[derive(Clone, Debug, Serialize)]
pub struct DecompositionSummary {
    pub p: usize,
    pub alpha: f64,
    pub beta: f64,
    pub delta: f64,
    pub eps: f64,
    pub eta: f64,
    pub y_size: usize,
    pub w_size: usize,
    pub w_raw_size: usize,
    pub spectrum_size: usize,
    pub lambda_dim: usize,
    pub bohr_radius: f64,
    pub bohr_size: usize,
    pub shifts_used: usize,
    pub t_total: usize,
    pub checks: DecompositionChecks,
    pub all_hold: bool,
}

impl Decomposition {
    pub fn summary(&self) -> DecompositionSummary {
        DecompositionSummary {
            p: self.w.universe(),
            alpha: self.params.alpha,
            beta: self.params.beta,
            delta: self.params.delta,
            eps: self.params.eps,
            eta: self.params.eta,
            y_size: self.y.len(),
            w_size: self.w.len(),
            w_raw_size: self.w_raw.len(),
            spectrum_size: self.spectrum_size,
            lambda_dim: self.lambda.lambda.len(),
            bohr_radius: self.bohr.radius,
            bohr_size: self.bohr.size(),
            shifts_used: self.shifts_used.len(),
            t_total: self.t_total,
            checks: self.checks.clone(),
            all_hold: self.checks.all_hold(),
        }
    }
}

/// Bohr-cover decomposition for `C = G \ (A + B)`.
///
/// Avoidance of `A +_delta B` on `W` is checked, not guaranteed: the
/// construction bounds `(A*B)(w)` by `4 delta p`.
pub fn decompose(g: &GroupSpec, a: &Subset, b: &Subset, delta: f64, eps: f64) -> Result<Decomposition> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::EmptyInput("decompose"));
    }
    let c = crate::sumset::sumset(g, a, b).complement();
    if c.is_empty() {
        return Err(Error::EmptyComplement);
    }
    decompose_inner(g, a, b, &c, 0.0, delta, eps)
}

/// Decomposition for any `C` avoiding `A +_eta B`; thresholds shift by `eta`.
pub fn decompose_thick(
    g: &GroupSpec,
    a: &Subset,
    b: &Subset,
    c: &Subset,
    eta: f64,
    delta: f64,
    eps: f64,
) -> Result<Decomposition> {
    if a.is_empty() || b.is_empty() || c.is_empty() {
        return Err(Error::EmptyInput("decompose_thick"));
    }
    if !(eta >= 0.0) {
        return Err(Error::Precondition(format!("eta must be non-negative, got {eta}")));
    }
    if !avoids(c, &thick_sumset(g, a, b, eta)) {
        return Err(Error::Precondition("C meets A +_eta B".into()));
    }
    decompose_inner(g, a, b, c, eta, delta, eps)
}

fn decompose_inner(
    g: &GroupSpec,
    a: &Subset,
    b: &Subset,
    c: &Subset,
    eta: f64,
    delta: f64,
    eps: f64,
) -> Result<Decomposition> {
    if !g.is_prime_cyclic() {
        return Err(Error::Precondition(format!("{g} is not a prime cyclic group")));
    }
    check_unit("delta", delta)?;
    check_unit("eps", eps)?;
    let n = g.order();
    let p = n as f64;
    let (alpha, beta) = (a.len() as f64 / p, b.len() as f64 / p);
    let zeta = delta / (alpha * beta).sqrt();

    // f = A*B and its truncation g to the large spectrum of A
    let f = convolution(g, a, b).counts;
    let a_hat = dft_subset(g, a)?;
    let b_hat = dft_subset(g, b)?;
    let spec = spectrum_from(&a_hat, a.len(), eps);
    let f_hat: Vec<_> = a_hat.coeffs.iter().zip(&b_hat.coeffs).map(|(x, y)| x * y).collect();
    let approx = partial_inverse(g, &f_hat, &spec)?;

    let energy: f64 = f
        .iter()
        .zip(&approx)
        .map(|(&fx, gx)| (fx as f64 - gx.re).powi(2) + gx.im.powi(2))
        .sum();
    let energy_bound = eps * eps * (a.len() as f64).powi(2) * b.len() as f64;

    let y = Subset::from_indices(
        n,
        (0..n).filter(|&x| (approx[x] - f[x] as f64).norm() > delta * p + THRESHOLD),
    )?;
    let y_bound = eps * eps * alpha * alpha * beta / (delta * delta) * p;

    let lambda = spanning_basis(g, &spec);
    let spans_spectrum = (lambda.lambda.len() <= SPAN_CHECK_LIMIT).then(|| spans(g, &lambda.lambda, &spec));
    let k = lambda.lambda.len();
    let radius = if k == 0 { zeta } else { zeta / k as f64 };
    let cover = bohr_cover(g, &lambda.lambda, radius)?;

    let target = c.difference(&y);
    let mut w_raw = Subset::empty(n);
    let mut shifts_used = Vec::new();
    for &s in &cover.shifts {
        let piece = g.translate(&cover.full.realized, s);
        if !piece.is_disjoint(&target) {
            w_raw.union_with(&piece);
            shifts_used.push(s);
        }
    }
    let w = w_raw.difference(&y);

    let threshold = thick_threshold(eta + delta, n);
    let avoidance = w.iter().all(|x| f[x] < threshold);
    let raw_violations = w_raw.iter().filter(|&x| f[x] >= threshold).count();
    let w_bound = (a.len() + b.len() <= n).then(|| p - a.len() as f64 - b.len() as f64 + 2.0 * p * (eta + delta).sqrt());

    let checks = DecompositionChecks {
        containment: target.is_subset(&w),
        y_size: y.len(),
        y_bound,
        y_bound_ok: y.len() as f64 <= y_bound + THRESHOLD,
        avoidance,
        raw_violations,
        w_bound_ok: w_bound.is_none_or(|bound| w.len() as f64 <= bound + THRESHOLD),
        w_bound,
        energy,
        energy_bound,
        energy_ok: energy <= energy_bound * (1.0 + 1e-9) + THRESHOLD,
        spans_spectrum,
    };
    let t_reference = if k == 0 {
        1.0
    } else {
        (4.0 * std::f64::consts::PI * k as f64 / zeta).powi(k as i32)
    };
    Ok(Decomposition {
        params: DecompositionParams {
            alpha,
            beta,
            delta,
            eps,
            eta,
            zeta,
        },
        y,
        w_raw,
        w,
        lambda,
        spectrum_size: spec.len(),
        bohr: cover.full,
        shifts_used,
        t_total: cover.t,
        t_reference,
        checks,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn set(g: &GroupSpec, xs: impl IntoIterator<Item = usize>) -> Subset {
        g.subset(xs).unwrap()
    }

    #[test]
    fn pollard_examples() {
        let f7 = GroupSpec::new(&[7]).unwrap();
        let full = Subset::full(7);
        let r = pollard_slack(&f7, &full, &full, 0.01).unwrap();
        let r = r.checked().unwrap();
        assert_eq!(r.thick_size, 7);
        assert!((r.rhs_bound - 5.6).abs() < 1e-12 && (r.slack - 1.4).abs() < 1e-12);

        let a = set(&f7, 0..3);
        let r = pollard_slack(&f7, &a, &a, 0.02).unwrap();
        let r = r.checked().unwrap();
        assert_eq!(r.thick_size, 5);
        assert!((r.rhs_bound - (6.0 - 14.0 * 0.02f64.sqrt())).abs() < 1e-12);
        assert!((r.slack - 0.98).abs() < 0.01);

        let tiny = set(&f7, [0]);
        assert!(matches!(pollard_slack(&f7, &tiny, &full, 0.05).unwrap(), Outcome::Skipped(_)));
        let z6 = GroupSpec::new(&[6]).unwrap();
        assert!(pollard_slack(&z6, &Subset::full(6), &Subset::full(6), 0.01).is_err());
    }

    #[test]
    fn general_pollard_examples() {
        let z4 = GroupSpec::new(&[4]).unwrap();
        let a = set(&z4, [0, 2]);
        let r = general_pollard_slack(&z4, &a, &a, 0.1).unwrap();
        let r = r.checked().unwrap();
        assert_eq!(r.thick_size, 2);
        assert!(r.rhs_bound < 0.0 && r.slack > 0.0);

        let full = Subset::full(4);
        let r = general_pollard_slack(&z4, &full, &full, 0.05).unwrap();
        let r = r.checked().unwrap();
        assert_eq!(r.thick_size, 4);
        assert!(r.rhs_bound <= 4.0 && r.holds());

        let z6 = GroupSpec::new(&[6]).unwrap();
        let a = set(&z6, [0, 2, 4]);
        let r = general_pollard_slack(&z6, &a, &a, 0.05).unwrap();
        let r = r.checked().unwrap();
        assert_eq!((r.subgroup_size, r.thick_size), (Some(3), 3));
        assert!((r.rhs_bound - (3.0 - 18.0 * 0.05f64.sqrt())).abs() < 1e-12);
        assert!(r.slack > 0.0);

        let trivial = GroupSpec::new(&[]).unwrap();
        assert!(matches!(
            general_pollard_slack(&trivial, &Subset::full(1), &Subset::full(1), 0.1),
            Err(Error::TrivialGroup)
        ));
    }

    #[test]
    fn robust_filter_examples() {
        let f7 = GroupSpec::new(&[7]).unwrap();
        let (x, y, z) = (set(&f7, 0..4), set(&f7, [0]), set(&f7, [5, 6]));
        let r = robust_filter(&f7, &x, &y, &z, 1.0 / 7.0, 4.0 / 7.0, 2.0).unwrap();
        assert!((r.eta - 0.5).abs() < 1e-12);
        assert!(r.x_prime.is_empty());
        assert!(r.holds());
        // Z meets X + Y
        assert!(robust_filter(&f7, &x, &y, &set(&f7, [2]), 1.0 / 7.0, 4.0 / 7.0, 2.0).is_err());
    }

    #[test]
    fn decompose_examples() {
        let f11 = GroupSpec::new(&[11]).unwrap();
        assert!(matches!(
            decompose(&f11, &Subset::full(11), &Subset::full(11), 0.3, 0.5),
            Err(Error::EmptyComplement)
        ));
        let a = set(&f11, 0..3);
        let d = decompose(&f11, &a, &a, 0.3, 0.5).unwrap();
        assert!(d.y.is_empty());
        assert!((d.checks.y_bound - 0.25 * (27.0 / 1331.0) / 0.09 * 11.0).abs() < 1e-12);
        assert!(set(&f11, 5..11).is_subset(&d.w));
        let f = convolution(&f11, &a, &a).counts;
        assert!(d.w.iter().all(|w| (f[w] as f64) < 3.3));
        assert!(d.checks.all_hold(), "{:?}", d.checks);
        assert!(avoids(&d.w, &thick_sumset(&f11, &a, &a, 0.3)));
    }

    #[test]
    fn decompose_thick_examples() {
        let f11 = GroupSpec::new(&[11]).unwrap();
        let a = set(&f11, 0..3);
        let c = crate::sumset::sumset(&f11, &a, &a).complement();
        let plain = decompose(&f11, &a, &a, 0.3, 0.5).unwrap();
        let thick = decompose_thick(&f11, &a, &a, &c, 0.0, 0.3, 0.5).unwrap();
        assert_eq!(plain.w, thick.w);
        assert_eq!(plain.y, thick.y);
        assert!(decompose_thick(&f11, &a, &a, &set(&f11, [2]), 0.1, 0.3, 0.5).is_err());

        let f31 = GroupSpec::new(&[31]).unwrap();
        let a = set(&f31, 0..10);
        let c = crate::sumset::sumset(&f31, &a, &a).complement();
        let d = decompose_thick(&f31, &a, &a, &c, 1.0 / 31.0, 0.25, 0.5).unwrap();
        assert!(d.checks.all_hold(), "{:?}", d.checks);
        assert!(d.w_raw.difference(&d.w).len() <= d.y.len());
    }
}

//! Sumsets, convolutions, thick sumsets and the Kneser / Cauchy-Davenport
//! slack checks.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::group::{Element, GroupSpec};
use crate::subset::Subset;
use crate::tolerance::INTEGRALITY;

/// `counts[x] = (A*B)(x) = #{(a, b) in A x B : a + b = x}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ConvolutionTable {
    pub counts: Vec<u64>,
}

impl ConvolutionTable {
    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }

    pub fn max(&self) -> u64 {
        self.counts.iter().copied().max().unwrap_or(0)
    }

    pub fn support(&self) -> Subset {
        let n = self.counts.len();
        Subset::from_indices(n, (0..n).filter(|&x| self.counts[x] > 0)).expect("in range")
    }

    /// `{x : counts[x] >= threshold}`.
    pub fn at_least(&self, threshold: u64) -> Subset {
        let n = self.counts.len();
        Subset::from_indices(n, (0..n).filter(|&x| self.counts[x] >= threshold)).expect("in range")
    }
}

/// `A + B`, computed as the union of word-level translates of the larger
/// operand by each element of the smaller one.
pub fn sumset(g: &GroupSpec, a: &Subset, b: &Subset) -> Subset {
    if a.is_empty() || b.is_empty() {
        return Subset::empty(g.order());
    }
    let (small, large) = if a.len() <= b.len() { (a, b) } else { (b, a) };
    let mut out = Subset::empty(g.order());
    for t in small.iter() {
        out.union_with(&g.translate(large, Element(t)));
        if out.len() == g.order() {
            break;
        }
    }
    out
}

/// `A - B`.
pub fn difference_set(g: &GroupSpec, a: &Subset, b: &Subset) -> Subset {
    sumset(g, a, &g.negate(b))
}

pub fn convolution(g: &GroupSpec, a: &Subset, b: &Subset) -> ConvolutionTable {
    let mut counts = vec![0u64; g.order()];
    let (small, large) = if a.len() <= b.len() { (a, b) } else { (b, a) };
    for t in small.iter() {
        for x in g.translate(large, Element(t)).iter() {
            counts[x] += 1;
        }
    }
    ConvolutionTable { counts }
}

/// Integer threshold for "at least `eps * n` representations": `eps * n`
/// itself when it is integral, its ceiling otherwise, and never below 1 so
/// that small `eps` recovers the plain sumset.
pub fn thick_threshold(eps: f64, n: usize) -> u64 {
    let v = eps * n as f64;
    let r = v.round();
    let t = if (v - r).abs() <= INTEGRALITY * v.abs().max(1.0) {
        r
    } else {
        v.ceil()
    };
    (t.max(1.0)) as u64
}

/// `A +_eps B = {x : (A*B)(x) >= eps N}`.
pub fn thick_sumset(g: &GroupSpec, a: &Subset, b: &Subset, eps: f64) -> Subset {
    convolution(g, a, b).at_least(thick_threshold(eps, g.order()))
}

/// `Z -_eta Y = {x : #{(z, y) : z - y = x} >= eta N}`.
pub fn thick_difference(g: &GroupSpec, z: &Subset, y: &Subset, eta: f64) -> Subset {
    thick_sumset(g, z, &g.negate(y), eta)
}

/// True iff `X` and `Y` share no element.
pub fn avoids(x: &Subset, y: &Subset) -> bool {
    x.is_disjoint(y)
}

/// Kneser's bound `|A+B| >= |A+H| + |B+H| - |H|`, `H` the stabilizer of `A+B`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct KneserReport {
    pub sumset_size: usize,
    pub stab_size: usize,
    pub a_plus_h: usize,
    pub b_plus_h: usize,
    pub bound: i64,
    pub slack: i64,
}

impl KneserReport {
    pub fn holds(&self) -> bool {
        self.slack >= 0
    }
}

pub fn kneser_slack(g: &GroupSpec, a: &Subset, b: &Subset) -> Result<KneserReport> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::EmptyInput("kneser_slack"));
    }
    let s = sumset(g, a, b);
    let h = g.stabilizer(&s);
    let a_plus_h = sumset(g, a, &h.carrier).len();
    let b_plus_h = sumset(g, b, &h.carrier).len();
    let bound = a_plus_h as i64 + b_plus_h as i64 - h.order() as i64;
    Ok(KneserReport {
        sumset_size: s.len(),
        stab_size: h.order(),
        a_plus_h,
        b_plus_h,
        bound,
        slack: s.len() as i64 - bound,
    })
}

/// Cauchy-Davenport for nonempty `A, B` in `Z_p`: `|A+B| >= min(p, |A|+|B|-1)`.
pub fn cauchy_davenport_holds(g: &GroupSpec, a: &Subset, b: &Subset) -> Result<bool> {
    if !g.is_prime_cyclic() {
        return Err(Error::Precondition(format!("{g} is not a prime cyclic group")));
    }
    if a.is_empty() || b.is_empty() {
        return Err(Error::EmptyInput("cauchy_davenport"));
    }
    let s = sumset(g, a, b).len();
    Ok(s >= g.order().min(a.len() + b.len() - 1))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn set(g: &GroupSpec, xs: &[usize]) -> Subset {
        g.subset(xs.iter().copied()).unwrap()
    }

    fn brute_sumset(g: &GroupSpec, a: &Subset, b: &Subset) -> Subset {
        let mut out = Subset::empty(g.order());
        for x in a.iter() {
            for y in b.iter() {
                out.insert(g.add_idx(x, y));
            }
        }
        out
    }

    #[test]
    fn sumset_examples() {
        let z5 = GroupSpec::new(&[5]).unwrap();
        assert!(sumset(&z5, &Subset::empty(5), &set(&z5, &[1, 2])).is_empty());
        assert_eq!(sumset(&z5, &set(&z5, &[1, 2]), &set(&z5, &[3])).indices(), vec![0, 4]);
        let z4 = GroupSpec::new(&[4]).unwrap();
        assert_eq!(sumset(&z4, &set(&z4, &[0, 2]), &set(&z4, &[0, 2])).indices(), vec![0, 2]);
    }

    #[test]
    fn convolution_examples() {
        let z4 = GroupSpec::new(&[4]).unwrap();
        let full = Subset::full(4);
        assert_eq!(convolution(&z4, &full, &full).counts, vec![4; 4]);
        let b = set(&z4, &[1, 3]);
        assert_eq!(convolution(&z4, &set(&z4, &[0]), &b).counts, vec![0, 1, 0, 1]);
        let ab = set(&z4, &[0, 1]);
        assert_eq!(convolution(&z4, &ab, &ab).counts, vec![1, 2, 1, 0]);
    }

    #[test]
    fn thick_sumset_examples() {
        let z4 = GroupSpec::new(&[4]).unwrap();
        let ab = set(&z4, &[0, 1]);
        assert_eq!(thick_sumset(&z4, &ab, &ab, 0.25), sumset(&z4, &ab, &ab));
        let full = Subset::full(4);
        assert_eq!(thick_sumset(&z4, &full, &full, 1.0), full);
        assert_eq!(thick_sumset(&z4, &ab, &ab, 0.5).indices(), vec![1]);
    }

    #[test]
    fn threshold_rounding() {
        assert_eq!(thick_threshold(0.5, 4), 2);
        assert_eq!(thick_threshold(0.51, 4), 3);
        assert_eq!(thick_threshold(1.0 / 3.0, 3), 1);
        assert_eq!(thick_threshold(0.1, 30), 3);
        assert_eq!(thick_threshold(0.0, 30), 1);
        assert_eq!(thick_threshold(0.02, 7), 1);
    }

    #[test]
    fn avoids_examples() {
        let z5 = GroupSpec::new(&[5]).unwrap();
        assert!(avoids(&Subset::empty(5), &Subset::full(5)));
        assert!(!avoids(&set(&z5, &[1]), &set(&z5, &[1])));
        let s = sumset(&z5, &set(&z5, &[0, 1]), &set(&z5, &[1]));
        assert!(avoids(&s.complement(), &s));
    }

    #[test]
    fn kneser_examples() {
        let z4 = GroupSpec::new(&[4]).unwrap();
        let r = kneser_slack(&z4, &set(&z4, &[0, 1]), &set(&z4, &[0, 1])).unwrap();
        assert_eq!((r.sumset_size, r.stab_size, r.bound, r.slack), (3, 1, 3, 0));
        let r = kneser_slack(&z4, &set(&z4, &[0, 2]), &set(&z4, &[0, 2])).unwrap();
        assert_eq!((r.sumset_size, r.stab_size, r.bound, r.slack), (2, 2, 2, 0));
        let z6 = GroupSpec::new(&[6]).unwrap();
        let r = kneser_slack(&z6, &Subset::full(6), &set(&z6, &[4])).unwrap();
        assert_eq!((r.stab_size, r.bound, r.slack), (6, 6, 0));
        assert!(matches!(
            kneser_slack(&z6, &Subset::empty(6), &Subset::full(6)),
            Err(Error::EmptyInput(_))
        ));
    }

    #[test]
    fn brute_equals_shift_or_exhaustive_small() {
        for n in 1..=6 {
            for g in crate::group::abelian_groups_of_order(n).unwrap() {
                for a in 0u64..1 << n {
                    for b in 0u64..1 << n {
                        let (sa, sb) = (Subset::from_mask(n, a), Subset::from_mask(n, b));
                        assert_eq!(sumset(&g, &sa, &sb), brute_sumset(&g, &sa, &sb));
                    }
                }
            }
        }
    }

    #[test]
    fn cauchy_davenport_exhaustive_small_primes() {
        for p in [2usize, 3, 5, 7] {
            let g = GroupSpec::new(&[p]).unwrap();
            for a in 1u64..1 << p {
                for b in 1u64..1 << p {
                    let (sa, sb) = (Subset::from_mask(p, a), Subset::from_mask(p, b));
                    assert!(cauchy_davenport_holds(&g, &sa, &sb).unwrap());
                }
            }
        }
    }

    fn sampled_pair() -> impl Strategy<Value = (GroupSpec, Subset, Subset)> {
        prop::sample::select(vec![vec![7usize], vec![11], vec![20], vec![2, 10], vec![3, 6], vec![130], vec![2, 65]])
            .prop_flat_map(|m| {
                let g = GroupSpec::new(&m).unwrap();
                let n = g.order();
                (Just(g), prop::collection::vec(any::<bool>(), n), prop::collection::vec(prop::bool::weighted(0.2), n))
            })
            .prop_map(|(g, a, b)| {
                let n = g.order();
                let pick = |v: &Vec<bool>| Subset::from_indices(n, (0..n).filter(|&i| v[i])).unwrap();
                let (a, b) = (pick(&a), pick(&b));
                (g, a, b)
            })
    }

    proptest! {
        #[test]
        fn sampled_sumset_properties((g, a, b) in sampled_pair()) {
            let s = sumset(&g, &a, &b);
            prop_assert_eq!(&s, &brute_sumset(&g, &a, &b));
            let conv = convolution(&g, &a, &b);
            prop_assert_eq!(conv.total(), (a.len() * b.len()) as u64);
            prop_assert!(conv.max() <= a.len().min(b.len()) as u64);
            prop_assert_eq!(conv.support(), s.clone());
            if !a.is_empty() && !b.is_empty() {
                prop_assert!(s.len() >= a.len().max(b.len()));
                prop_assert!(s.len() <= g.order().min(a.len() * b.len()));
                prop_assert!(kneser_slack(&g, &a, &b).unwrap().holds());
            }
        }

        #[test]
        fn thick_sumset_is_monotone((g, a, b) in sampled_pair(), e1 in 0.0f64..1.0, e2 in 0.0f64..1.0) {
            let (lo, hi) = if e1 <= e2 { (e1, e2) } else { (e2, e1) };
            let s = sumset(&g, &a, &b);
            let t_lo = thick_sumset(&g, &a, &b, lo);
            let t_hi = thick_sumset(&g, &a, &b, hi);
            prop_assert!(t_hi.is_subset(&t_lo));
            prop_assert!(t_lo.is_subset(&s));
        }
    }
}

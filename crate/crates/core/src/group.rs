//! Finite abelian groups `Z_{m_1} x ... x Z_{m_k}`.
//!
//! Elements are indexed in mixed radix with the first modulus varying
//! fastest: the tuple `(x_1, .., x_k)` has index `x_1 + m_1 (x_2 + m_2 (..))`.
//! Cached census results depend on this ordering, so it must not change.
//!
//! The dual group is identified with the group itself through the same
//! moduli: the dual index `r = (r_1, .., r_k)` names the character
//! `x -> exp(2 pi i sum_j r_j x_j / m_j)`.

use std::collections::HashSet;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use num_integer::Integer;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::subset::Subset;

/// Default ceiling on the group order.
pub const DEFAULT_CEILING: usize = 1 << 20;

/// Closure-based subgroup enumeration is limited to groups of this order.
pub const SUBGROUP_GUARD: usize = 4096;

/// A group element, by mixed-radix index.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Element(pub usize);

impl Element {
    pub fn index(self) -> usize {
        self.0
    }
}

/// A character of the group, by dual index.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Character(pub usize);

impl Character {
    pub const TRIVIAL: Character = Character(0);

    pub fn dual_index(self) -> usize {
        self.0
    }
}

/// The binary and unary group operations exposed by [`GroupSpec::group_op`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GroupOp {
    Add,
    Neg,
}

/// A finite abelian group given by its cyclic moduli.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct GroupSpec {
    moduli: Vec<usize>,
    strides: Vec<usize>,
    order: usize,
    exponent: usize,
}

impl GroupSpec {
    /// Builds the group with the default order ceiling of `2^20`.
    pub fn new(moduli: &[usize]) -> Result<Self> {
        Self::with_ceiling(moduli, DEFAULT_CEILING)
    }

    pub fn with_ceiling(moduli: &[usize], ceiling: usize) -> Result<Self> {
        let mut order: u128 = 1;
        let mut strides = Vec::with_capacity(moduli.len());
        let mut exponent = 1usize;
        for &m in moduli {
            if m < 2 {
                return Err(Error::InvalidModulus(m));
            }
            strides.push(order as usize);
            order *= m as u128;
            if order > ceiling as u128 {
                return Err(Error::CeilingExceeded { order, ceiling });
            }
            exponent = exponent.lcm(&m);
        }
        Ok(GroupSpec {
            moduli: moduli.to_vec(),
            strides,
            order: order as usize,
            exponent,
        })
    }

    /// The cyclic group `Z_n`; `n = 1` gives the trivial group.
    pub fn cyclic(n: usize) -> Result<Self> {
        match n {
            0 => Err(Error::InvalidModulus(0)),
            1 => Self::new(&[]),
            _ => Self::new(&[n]),
        }
    }

    pub fn moduli(&self) -> &[usize] {
        &self.moduli
    }

    pub fn order(&self) -> usize {
        self.order
    }

    /// Least common multiple of the moduli.
    pub fn exponent(&self) -> usize {
        self.exponent
    }

    pub fn rank(&self) -> usize {
        self.moduli.len()
    }

    pub fn is_cyclic(&self) -> bool {
        self.moduli.len() <= 1 || self.exponent == self.order
    }

    /// True for `Z_p` with `p` prime.
    pub fn is_prime_cyclic(&self) -> bool {
        self.moduli.len() == 1 && is_prime(self.order)
    }

    pub fn elements(&self) -> impl Iterator<Item = Element> {
        (0..self.order).map(Element)
    }

    pub fn check(&self, x: Element) -> Result<()> {
        if x.0 < self.order {
            Ok(())
        } else {
            Err(Error::IndexOutOfRange {
                index: x.0,
                order: self.order,
            })
        }
    }

    pub fn coords(&self, x: usize) -> Vec<usize> {
        self.moduli
            .iter()
            .zip(&self.strides)
            .map(|(&m, &s)| (x / s) % m)
            .collect()
    }

    pub fn from_coords(&self, coords: &[usize]) -> Result<Element> {
        if coords.len() != self.rank() {
            return Err(Error::LengthMismatch {
                expected: self.rank(),
                got: coords.len(),
            });
        }
        let mut idx = 0;
        for ((&c, &m), &s) in coords.iter().zip(&self.moduli).zip(&self.strides) {
            if c >= m {
                return Err(Error::IndexOutOfRange { index: c, order: m });
            }
            idx += c * s;
        }
        Ok(Element(idx))
    }

    #[inline]
    pub(crate) fn add_idx(&self, x: usize, y: usize) -> usize {
        let mut out = 0;
        for (&m, &s) in self.moduli.iter().zip(&self.strides) {
            let d = ((x / s) % m + (y / s) % m) % m;
            out += d * s;
        }
        out
    }

    #[inline]
    pub(crate) fn neg_idx(&self, x: usize) -> usize {
        let mut out = 0;
        for (&m, &s) in self.moduli.iter().zip(&self.strides) {
            let d = (m - (x / s) % m) % m;
            out += d * s;
        }
        out
    }

    #[inline]
    pub(crate) fn sub_idx(&self, x: usize, y: usize) -> usize {
        self.add_idx(x, self.neg_idx(y))
    }

    /// `lambda * x`, componentwise.
    #[inline]
    pub(crate) fn scale_idx(&self, lambda: usize, x: usize) -> usize {
        let mut out = 0;
        for (&m, &s) in self.moduli.iter().zip(&self.strides) {
            let d = ((x / s) % m * (lambda % m)) % m;
            out += d * s;
        }
        out
    }

    pub fn add(&self, x: Element, y: Element) -> Result<Element> {
        self.check(x)?;
        self.check(y)?;
        Ok(Element(self.add_idx(x.0, y.0)))
    }

    pub fn neg(&self, x: Element) -> Result<Element> {
        self.check(x)?;
        Ok(Element(self.neg_idx(x.0)))
    }

    pub fn sub(&self, x: Element, y: Element) -> Result<Element> {
        self.check(x)?;
        self.check(y)?;
        Ok(Element(self.sub_idx(x.0, y.0)))
    }

    /// Dispatches `add(x, y)` or `neg(x)`; `y` is required for `Add` and
    /// ignored for `Neg`.
    pub fn group_op(&self, op: GroupOp, x: Element, y: Option<Element>) -> Result<Element> {
        match op {
            GroupOp::Add => {
                let y = y.ok_or_else(|| Error::Precondition("add needs two operands".into()))?;
                self.add(x, y)
            }
            GroupOp::Neg => self.neg(x),
        }
    }

    /// Order of the element `x`.
    pub fn element_order(&self, x: usize) -> usize {
        self.moduli
            .iter()
            .zip(&self.strides)
            .map(|(&m, &s)| m / ((x / s) % m).gcd(&m))
            .fold(1, |a, b| a.lcm(&b))
    }

    /// Phase numerator `k` with `chi_r(x) = exp(2 pi i k / exponent)`.
    #[inline]
    pub fn phase(&self, r: usize, x: usize) -> usize {
        let l = self.exponent;
        let mut k: u128 = 0;
        for (&m, &s) in self.moduli.iter().zip(&self.strides) {
            let rj = ((r / s) % m) as u128;
            let xj = ((x / s) % m) as u128;
            k += (rj * xj % m as u128) * (l / m) as u128;
        }
        (k % l as u128) as usize
    }

    pub fn char_eval(&self, chi: Character, x: Element) -> Result<Complex64> {
        self.check(Element(chi.0))?;
        self.check(x)?;
        let k = self.phase(chi.0, x.0);
        let theta = std::f64::consts::TAU * k as f64 / self.exponent as f64;
        Ok(Complex64::from_polar(1.0, theta))
    }

    fn tail_add(&self, block: usize, shift_coords: &[usize]) -> usize {
        // mixed-radix addition over moduli[1..], indices measured in blocks of m_1
        let m1 = self.moduli[0];
        let mut out = 0;
        for (j, (&m, &s)) in self.moduli.iter().zip(&self.strides).enumerate().skip(1) {
            let sb = s / m1;
            let d = ((block / sb) % m + shift_coords[j]) % m;
            out += d * sb;
        }
        out
    }

    /// `S + t`, built block-wise: each run of `m_1` consecutive indices is
    /// rotated by `t_1` and moved to its translated block.
    pub fn translate(&self, s: &Subset, t: Element) -> Subset {
        assert_eq!(s.universe(), self.order, "subset from a different group");
        if self.order == 1 || t.0 == 0 || s.is_empty() {
            return s.clone();
        }
        let m1 = self.moduli[0];
        let coords = self.coords(t.0);
        let t1 = coords[0];
        let mut words = vec![0u64; s.words().len()];
        for block in 0..self.order / m1 {
            let src = block * m1;
            let dst = self.tail_add(block, &coords) * m1;
            Subset::copy_range(s, src, &mut words, dst + t1, m1 - t1);
            Subset::copy_range(s, src + m1 - t1, &mut words, dst, t1);
        }
        Subset::from_words(self.order, words)
    }

    /// `-S`.
    pub fn negate(&self, s: &Subset) -> Subset {
        let mut out = Subset::empty(self.order);
        for x in s.iter() {
            out.insert(self.neg_idx(x));
        }
        out
    }

    /// Subsets given by element lists, with range checks.
    pub fn subset<I: IntoIterator<Item = usize>>(&self, indices: I) -> Result<Subset> {
        Subset::from_indices(self.order, indices)
    }

    /// Subgroup generated by `gens`.
    pub fn span(&self, gens: &[Element]) -> Subset {
        let mut h = Subset::empty(self.order);
        h.insert(0);
        for &g in gens {
            let mut next = h.clone();
            let mut mult = g.0;
            while !h.contains(mult) {
                next.union_with(&self.translate(&h, Element(mult)));
                mult = self.add_idx(mult, g.0);
            }
            h = next;
        }
        h
    }

    /// `{x : chi_r(x) = 1 for every r in dual}`.
    pub fn annihilator(&self, dual: &Subset) -> Subset {
        let rs: Vec<usize> = dual.iter().collect();
        let mut out = Subset::empty(self.order);
        for x in 0..self.order {
            if rs.iter().all(|&r| self.phase(r, x) == 0) {
                out.insert(x);
            }
        }
        out
    }

    /// All subgroups of index at most `n`, sorted by index and then by
    /// carrier. Each subgroup of index `k` is the annihilator of a dual
    /// subgroup of order `k`; those are found by closing generator sets.
    pub fn subgroups_up_to_index(&self, n: usize) -> Result<Vec<Subgroup>> {
        if self.order > SUBGROUP_GUARD {
            return Err(Error::GuardExceeded {
                op: "subgroups_up_to_index",
                limit: SUBGROUP_GUARD,
                got: self.order,
            });
        }
        let mut trivial = Subset::empty(self.order);
        trivial.insert(0);
        let mut seen: HashSet<Subset> = HashSet::new();
        let mut stack = Vec::new();
        if n >= 1 {
            seen.insert(trivial.clone());
            stack.push(trivial);
        }
        while let Some(k) = stack.pop() {
            for r in 0..self.order {
                if k.contains(r) {
                    continue;
                }
                // <K, r> = K + <r>; its order is |K| times the least i with i r in K
                let mut steps = 1;
                let mut mult = r;
                while !k.contains(mult) {
                    steps += 1;
                    mult = self.add_idx(mult, r);
                }
                if k.len() * steps > n {
                    continue;
                }
                let mut bigger = k.clone();
                let mut shift = r;
                for _ in 1..steps {
                    bigger.union_with(&self.translate(&k, Element(shift)));
                    shift = self.add_idx(shift, r);
                }
                if seen.insert(bigger.clone()) {
                    stack.push(bigger);
                }
            }
        }
        let mut out: Vec<Subgroup> = seen
            .into_iter()
            .map(|dual| {
                let carrier = self.annihilator(&dual);
                Subgroup::new(self, carrier)
            })
            .collect::<Result<_>>()?;
        out.sort_by(|a, b| {
            a.index_in_group
                .cmp(&b.index_in_group)
                .then_with(|| a.carrier.indices().cmp(&b.carrier.indices()))
        });
        Ok(out)
    }

    /// A subgroup of index `q`, `q` the smallest prime factor of the order;
    /// this is a largest proper subgroup. Built directly as
    /// `{x : q | x_j}` for a coordinate `j` with `q | m_j`, so no size guard.
    pub fn maximal_proper_subgroup(&self) -> Result<Subgroup> {
        if self.order == 1 {
            return Err(Error::TrivialGroup);
        }
        let q = smallest_prime_factor(self.order);
        let j = self
            .moduli
            .iter()
            .position(|&m| m % q == 0)
            .expect("some modulus is divisible by a prime factor of the order");
        let (m, s) = (self.moduli[j], self.strides[j]);
        let carrier = Subset::from_indices(
            self.order,
            (0..self.order).filter(|&x| ((x / s) % m) % q == 0),
        )?;
        Ok(Subgroup {
            index_in_group: q,
            carrier,
        })
    }

    /// Subgroups of index exactly 2.
    pub fn index_two_subgroups(&self) -> Result<Vec<Subgroup>> {
        if self.order % 2 != 0 {
            return Ok(Vec::new());
        }
        Ok(self
            .subgroups_up_to_index(2)?
            .into_iter()
            .filter(|h| h.index_in_group == 2)
            .collect())
    }

    /// `{x : S + x = S}`; the stabilizer of the empty set is the whole group.
    pub fn stabilizer(&self, s: &Subset) -> Subgroup {
        if s.is_empty() {
            return Subgroup {
                carrier: Subset::full(self.order),
                index_in_group: 1,
            };
        }
        let s0 = s.iter().next().expect("nonempty");
        let mut carrier = Subset::empty(self.order);
        for x in s.iter() {
            let t = self.sub_idx(x, s0);
            if self.translate(s, Element(t)) == *s {
                carrier.insert(t);
            }
        }
        let index_in_group = self.order / carrier.len();
        Subgroup {
            carrier,
            index_in_group,
        }
    }
}

impl fmt::Display for GroupSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.moduli.is_empty() {
            return write!(f, "1");
        }
        let parts: Vec<String> = self.moduli.iter().map(|m| m.to_string()).collect();
        write!(f, "{}", parts.join("x"))
    }
}

impl fmt::Debug for GroupSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "GroupSpec({self})")
    }
}

/// Parses `"12"`, `"2x3"` or `"1"` (the trivial group).
impl FromStr for GroupSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s == "1" {
            return GroupSpec::new(&[]);
        }
        let moduli = s
            .split(['x', 'X', '*'])
            .map(|p| {
                p.trim()
                    .parse::<usize>()
                    .map_err(|e| Error::Parse(format!("bad modulus `{p}` in `{s}`: {e}")))
            })
            .collect::<Result<Vec<_>>>()?;
        GroupSpec::new(&moduli)
    }
}

impl Serialize for GroupSpec {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for GroupSpec {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// A subgroup, stored by its carrier set.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Subgroup {
    pub carrier: Subset,
    pub index_in_group: usize,
}

impl Subgroup {
    /// Wraps `carrier` after an explicit closure check.
    pub fn new(g: &GroupSpec, carrier: Subset) -> Result<Self> {
        if !is_subgroup(g, &carrier) {
            return Err(Error::Invariant(format!(
                "{:?} is not a subgroup of {g}",
                carrier.indices()
            )));
        }
        let index_in_group = g.order() / carrier.len();
        Ok(Subgroup {
            carrier,
            index_in_group,
        })
    }

    pub fn order(&self) -> usize {
        self.carrier.len()
    }
}

/// Contains 0, closed under addition and negation, and of order dividing `N`.
pub fn is_subgroup(g: &GroupSpec, h: &Subset) -> bool {
    if h.universe() != g.order() || !h.contains(0) || g.order() % h.len() != 0 {
        return false;
    }
    let members: Vec<usize> = h.iter().collect();
    members.iter().all(|&x| h.contains(g.neg_idx(x)))
        && members
            .iter()
            .all(|&x| members.iter().all(|&y| h.contains(g.add_idx(x, y))))
}

pub fn is_prime(n: usize) -> bool {
    n >= 2 && smallest_prime_factor(n) == n
}

pub fn smallest_prime_factor(n: usize) -> usize {
    if n % 2 == 0 {
        return 2;
    }
    let mut d = 3;
    while d * d <= n {
        if n % d == 0 {
            return d;
        }
        d += 2;
    }
    n
}

fn factorize(mut n: usize) -> Vec<(usize, u32)> {
    let mut out = Vec::new();
    while n > 1 {
        let p = smallest_prime_factor(n);
        let mut e = 0;
        while n % p == 0 {
            n /= p;
            e += 1;
        }
        out.push((p, e));
    }
    out
}

fn partitions(n: u32, max: u32) -> Vec<Vec<u32>> {
    if n == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for first in (1..=n.min(max)).rev() {
        for mut rest in partitions(n - first, first) {
            rest.insert(0, first);
            out.push(rest);
        }
    }
    out
}

/// One representative of each isomorphism class of abelian groups of order
/// `n`, in invariant-factor form `m_1 | m_2 | ... | m_k`.
pub fn abelian_groups_of_order(n: usize) -> Result<Vec<GroupSpec>> {
    if n == 0 {
        return Err(Error::InvalidModulus(0));
    }
    // per prime: list of partitions of the exponent (largest part first)
    let mut combos: Vec<Vec<(usize, Vec<u32>)>> = vec![Vec::new()];
    for (p, e) in factorize(n) {
        let mut next = Vec::new();
        for c in &combos {
            for part in partitions(e, e) {
                let mut c2 = c.clone();
                c2.push((p, part));
                next.push(c2);
            }
        }
        combos = next;
    }
    let mut out = Vec::new();
    for c in combos {
        let len = c.iter().map(|(_, part)| part.len()).max().unwrap_or(0);
        // factor i (largest first) multiplies p^{part[i]} over all primes
        let mut factors = vec![1usize; len];
        for (p, part) in &c {
            for (i, &k) in part.iter().enumerate() {
                factors[i] *= p.pow(k);
            }
        }
        factors.reverse();
        out.push(GroupSpec::new(&factors)?);
    }
    Ok(out)
}

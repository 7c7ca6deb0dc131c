//! Hypergraphs, the tripartite mod hypergraph and exact independent-set counts.
//!
//! The independent sets of `H^mod_d` are exactly the triples `(A, B, C)` of
//! subsets of `Z_d` with `A + B` avoiding `C`, so [`count_independent`]
//! hands mod hypergraphs to the census and everything else to a
//! branch-and-prune counter.

use std::collections::HashSet;

use num_bigint::BigUint;
use num_traits::One;
use serde::{Deserialize, Serialize};

use crate::census::{self, SYMMETRIC_LIMIT};
use crate::error::{Error, Result};
use crate::group::GroupSpec;

/// Largest vertex count for [`count_independent_generic`].
pub const GENERIC_LIMIT: usize = 26;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawHypergraph")]
pub struct Hypergraph {
    n: usize,
    edges: Vec<Vec<usize>>,
}

#[derive(Deserialize)]
struct RawHypergraph {
    n: usize,
    edges: Vec<Vec<usize>>,
}

impl TryFrom<RawHypergraph> for Hypergraph {
    type Error = Error;

    fn try_from(raw: RawHypergraph) -> Result<Self> {
        Hypergraph::new(raw.n, raw.edges)
    }
}

impl Hypergraph {
    /// Edges are stored sorted; each needs at least two distinct vertices
    /// below `n`, and no edge may repeat.
    pub fn new(n: usize, edges: Vec<Vec<usize>>) -> Result<Self> {
        let mut seen = HashSet::new();
        let mut out = Vec::with_capacity(edges.len());
        for mut e in edges {
            e.sort_unstable();
            e.dedup();
            if e.len() < 2 {
                return Err(Error::Precondition(format!("edge {e:?} has fewer than two vertices")));
            }
            if let Some(&v) = e.iter().find(|&&v| v >= n) {
                return Err(Error::IndexOutOfRange { index: v, order: n });
            }
            if !seen.insert(e.clone()) {
                return Err(Error::Precondition(format!("duplicate edge {e:?}")));
            }
            out.push(e);
        }
        Ok(Hypergraph { n, edges: out })
    }

    pub fn n_vertices(&self) -> usize {
        self.n
    }

    pub fn edges(&self) -> &[Vec<usize>] {
        &self.edges
    }

    pub fn degrees(&self) -> Vec<usize> {
        let mut deg = vec![0; self.n];
        for e in &self.edges {
            for &v in e {
                deg[v] += 1;
            }
        }
        deg
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }
}

/// `H^mod_d`: parts `0..d`, `d..2d`, `2d..3d` and an edge `(x, y, z)` for
/// every `x + y = z (mod d)`.
pub fn build_mod_hypergraph(d: usize) -> Result<Hypergraph> {
    if d < 1 {
        return Err(Error::InvalidModulus(d));
    }
    let edges = (0..d)
        .flat_map(|x| (0..d).map(move |y| vec![x, d + y, 2 * d + (x + y) % d]))
        .collect();
    Hypergraph::new(3 * d, edges)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Validation {
    pub linear: bool,
    pub uniform_k: Option<usize>,
    pub regular_d: Option<usize>,
    /// 3-uniform with a vertex 3-colouring that is rainbow on every edge.
    pub tripartite: bool,
}

pub fn validate(h: &Hypergraph) -> Validation {
    let mut pairs = HashSet::new();
    let linear = h.edges.iter().all(|e| {
        e.iter()
            .enumerate()
            .all(|(i, &u)| e[i + 1..].iter().all(|&v| pairs.insert((u, v))))
    });
    let uniform_k = h
        .edges
        .first()
        .map(|e| e.len())
        .filter(|&k| h.edges.iter().all(|e| e.len() == k));
    let deg = h.degrees();
    let regular_d = deg.first().copied().filter(|&d| deg.iter().all(|&x| x == d));
    let tripartite = (h.edges.is_empty() || uniform_k == Some(3)) && rainbow_colouring(h).is_some();
    Validation {
        linear,
        uniform_k,
        regular_d,
        tripartite,
    }
}

const UNCOLOURED: u8 = u8::MAX;

/// A colouring of the vertices with three colours, rainbow on every edge.
pub fn rainbow_colouring(h: &Hypergraph) -> Option<Vec<u8>> {
    if h.edges.iter().any(|e| e.len() != 3) {
        return None;
    }
    let mut incident = vec![Vec::new(); h.n];
    for (i, e) in h.edges.iter().enumerate() {
        for &v in e {
            incident[v].push(i);
        }
    }
    let mut colour = vec![UNCOLOURED; h.n];
    if extend_colouring(h, &incident, &mut colour) {
        for c in colour.iter_mut().filter(|c| **c == UNCOLOURED) {
            *c = 0;
        }
        Some(colour)
    } else {
        None
    }
}

fn consistent(h: &Hypergraph, incident: &[Vec<usize>], colour: &[u8], v: usize) -> bool {
    incident[v].iter().all(|&i| {
        let cs: Vec<u8> = h.edges[i].iter().map(|&u| colour[u]).filter(|&c| c != UNCOLOURED).collect();
        cs.iter().enumerate().all(|(j, c)| !cs[j + 1..].contains(c))
    })
}

fn extend_colouring(h: &Hypergraph, incident: &[Vec<usize>], colour: &mut [u8]) -> bool {
    // most constrained unfinished edge first
    let mut best: Option<(usize, usize)> = None;
    for (i, e) in h.edges.iter().enumerate() {
        let done = e.iter().filter(|&&u| colour[u] != UNCOLOURED).count();
        if done < 3 && best.is_none_or(|(_, d)| done > d) {
            best = Some((i, done));
            if done == 2 {
                break;
            }
        }
    }
    let Some((i, done)) = best else {
        return true;
    };
    let e = &h.edges[i];
    let free: Vec<usize> = e.iter().copied().filter(|&u| colour[u] == UNCOLOURED).collect();
    let used: Vec<u8> = e.iter().map(|&u| colour[u]).filter(|&c| c != UNCOLOURED).collect();
    let missing: Vec<u8> = (0..3).filter(|c| !used.contains(c)).collect();
    let options: Vec<Vec<u8>> = match done {
        2 => vec![missing],
        1 => vec![missing.clone(), vec![missing[1], missing[0]]],
        // a fresh component: colour names are interchangeable
        _ => vec![vec![0, 1, 2]],
    };
    for option in options {
        for (&u, &c) in free.iter().zip(&option) {
            colour[u] = c;
        }
        if free.iter().all(|&u| consistent(h, incident, colour, u)) && extend_colouring(h, incident, colour) {
            return true;
        }
        for &u in &free {
            colour[u] = UNCOLOURED;
        }
    }
    false
}

/// `i(H)` by branching on vertices of largest live degree.
pub fn count_independent_generic(h: &Hypergraph) -> Result<BigUint> {
    if h.n > GENERIC_LIMIT {
        return Err(Error::GuardExceeded {
            op: "count_independent_generic",
            limit: GENERIC_LIMIT,
            got: h.n,
        });
    }
    let undecided = if h.n == 0 { 0 } else { u64::MAX >> (64 - h.n) };
    let edges: Vec<u64> = h.edges.iter().map(|e| e.iter().fold(0, |m, &v| m | 1 << v)).collect();
    Ok(BigUint::from(branch(undecided, edges)))
}

/// Independent sets on `undecided`, where every live edge mask lists the
/// undecided vertices still needed to complete it.
fn branch(undecided: u64, mut edges: Vec<u64>) -> u64 {
    if edges.contains(&0) {
        return 0;
    }
    // drop edges that contain another live edge
    edges.sort_unstable_by_key(|e| e.count_ones());
    edges.dedup();
    let mut kept: Vec<u64> = Vec::with_capacity(edges.len());
    for e in edges {
        if !kept.iter().any(|&k| k & e == k) {
            kept.push(e);
        }
    }
    let touched = kept.iter().fold(0, |m, &e| m | e);
    let free = (undecided & !touched).count_ones();
    if kept.is_empty() {
        return 1 << free;
    }
    let mut best = (0, 0);
    let mut m = touched;
    while m != 0 {
        let v = m.trailing_zeros() as usize;
        let deg = kept.iter().filter(|&&e| e >> v & 1 == 1).count();
        if deg > best.1 {
            best = (v, deg);
        }
        m &= m - 1;
    }
    let bit = 1u64 << best.0;
    let rest = touched & !bit;
    let excluded: Vec<u64> = kept.iter().copied().filter(|&e| e & bit == 0).collect();
    let included: Vec<u64> = kept.iter().map(|&e| e & !bit).collect();
    (branch(rest, excluded) + branch(rest, included)) << free
}

/// The `d` with `h = H^mod_d`, if any.
pub fn as_mod_hypergraph(h: &Hypergraph) -> Option<usize> {
    if h.n == 0 || h.n % 3 != 0 {
        return None;
    }
    let d = h.n / 3;
    if h.edges.len() != d * d {
        return None;
    }
    let ours: HashSet<&Vec<usize>> = h.edges.iter().collect();
    let model = build_mod_hypergraph(d).ok()?;
    model.edges.iter().all(|e| ours.contains(e)).then_some(d)
}

/// `i(H)`: the census for `H^mod_d` with `d <= 20`, otherwise the generic counter.
pub fn count_independent(h: &Hypergraph) -> Result<BigUint> {
    match as_mod_hypergraph(h) {
        Some(d) if d <= SYMMETRIC_LIMIT => Ok(census::count_symmetric(&GroupSpec::cyclic(d)?)?.t),
        _ => count_independent_generic(h),
    }
}

/// Vertices of `h2` are shifted past those of `h1`.
pub fn disjoint_union(h1: &Hypergraph, h2: &Hypergraph) -> Hypergraph {
    let edges = h1
        .edges
        .iter()
        .cloned()
        .chain(h2.edges.iter().map(|e| e.iter().map(|&v| v + h1.n).collect()))
        .collect();
    Hypergraph {
        n: h1.n + h2.n,
        edges,
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConjectureGap {
    pub k: usize,
    pub d: usize,
    pub n: usize,
    /// `log2 i / n`.
    pub lhs: f64,
    /// `(k - 1)/k + log2 k / (k d)`.
    pub rhs: f64,
    pub margin: f64,
}

pub fn conjecture_gap_params(k: usize, d: usize, n: usize, i_value: &BigUint) -> Result<ConjectureGap> {
    if k < 2 || d < 1 || n < 1 {
        return Err(Error::Precondition(format!("need k >= 2, d >= 1, n >= 1; got ({k}, {d}, {n})")));
    }
    let lhs = log2_big(i_value) / n as f64;
    let rhs = (k - 1) as f64 / k as f64 + (k as f64).log2() / (k * d) as f64;
    Ok(ConjectureGap {
        k,
        d,
        n,
        lhs,
        rhs,
        margin: rhs - lhs,
    })
}

/// Margin for a validated `k`-uniform, `d`-regular linear hypergraph.
pub fn conjecture_gap(h: &Hypergraph, i_value: &BigUint) -> Result<ConjectureGap> {
    let v = validate(h);
    match (v.linear, v.uniform_k, v.regular_d) {
        (true, Some(k), Some(d)) => conjecture_gap_params(k, d, h.n, i_value),
        _ => Err(Error::Precondition(format!("not a uniform regular linear hypergraph: {v:?}"))),
    }
}

fn log2_big(x: &BigUint) -> f64 {
    let bits = x.bits();
    if bits <= 64 {
        return (x.iter_u64_digits().next().unwrap_or(0) as f64).log2();
    }
    let shift = bits - 64;
    let top = (x >> shift).iter_u64_digits().next().unwrap_or(0) as f64;
    top.log2() + shift as f64
}

/// `3 4^d - 3 2^d + 1`.
pub fn mod_lower_bound(d: usize) -> Result<BigUint> {
    if d < 1 {
        return Err(Error::InvalidModulus(d));
    }
    Ok(census::lower_bound(d))
}

/// `2^n`, the count for an edgeless hypergraph.
pub fn edgeless_count(n: usize) -> BigUint {
    BigUint::one() << n
}

use num_complex::Complex64;
use proptest::prelude::*;
use sumset_census::fourier::{
    additive_dimension, bohr_cover, bohr_set, chang_check, dft, inverse_dft, is_dissociated, DimensionMode,
};
use sumset_census::{Character, Element, GroupSpec, Subset};

fn arb_signal(n: usize) -> impl Strategy<Value = Vec<Complex64>> {
    prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0).prop_map(|(r, i)| Complex64::new(r, i)), n)
}

fn max_err(a: &[Complex64], b: &[Complex64]) -> f64 {
    let scale = b.iter().map(|v| v.norm()).fold(1e-300, f64::max);
    a.iter().zip(b).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max) / scale
}

fn identities(g: &GroupSpec, f: &[Complex64], h: &[Complex64]) {
    let n = g.order();
    let fh = dft(g, f).unwrap().coeffs;
    let hh = dft(g, h).unwrap().coeffs;
    let energy: f64 = f.iter().map(|v| v.norm_sqr()).sum();
    let spectral: f64 = fh.iter().map(|v| v.norm_sqr()).sum::<f64>() / n as f64;
    assert!((energy - spectral).abs() <= 1e-8 * energy);
    assert!(max_err(&inverse_dft(g, &fh).unwrap(), f) <= 1e-8);
    let conv: Vec<Complex64> = (0..n)
        .map(|x| (0..n).map(|y| f[y] * h[g.sub(Element(x), Element(y)).unwrap().0]).sum())
        .collect();
    let prod: Vec<Complex64> = fh.iter().zip(&hh).map(|(a, b)| a * b).collect();
    assert!(max_err(&dft(g, &conv).unwrap().coeffs, &prod) <= 1e-8);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn identities_n16(f in arb_signal(16), h in arb_signal(16), which in 0usize..3) {
        let g: GroupSpec = ["16", "4x4", "2x2x2x2"][which].parse().unwrap();
        identities(&g, &f, &h);
    }

    #[test]
    fn identities_n101(f in arb_signal(101), h in arb_signal(101)) {
        identities(&GroupSpec::cyclic(101).unwrap(), &f, &h);
    }

    #[test]
    fn identities_n257(f in arb_signal(257), h in arb_signal(257)) {
        identities(&GroupSpec::cyclic(257).unwrap(), &f, &h);
    }
}

/// Largest subset of `set` with no nontrivial `{-1, 0, 1}` relation, by
/// trying every subset and every sign pattern.
fn dimension_oracle(g: &GroupSpec, set: &[usize]) -> usize {
    let k = set.len();
    let mut best = 0;
    for pick in 0u32..1 << k {
        let members: Vec<usize> = (0..k).filter(|i| pick >> i & 1 == 1).map(|i| set[i]).collect();
        if members.len() <= best {
            continue;
        }
        let patterns = 3usize.pow(members.len() as u32);
        let dissociated = (1..patterns).all(|mut code| {
            let mut total = Element(0);
            for &m in &members {
                let e = match code % 3 {
                    0 => Element(0),
                    1 => Element(m),
                    _ => g.neg(Element(m)).unwrap(),
                };
                total = g.add(total, e).unwrap();
                code /= 3;
            }
            total != Element(0)
        });
        if dissociated {
            best = members.len();
        }
    }
    best
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn exact_dimension_matches_sign_patterns(which in 0usize..4, raw in prop::collection::vec(0usize..1000, 1..=8)) {
        let g: GroupSpec = ["31", "64", "2x2x2x2", "3x9"][which].parse().unwrap();
        let mut set: Vec<usize> = raw.iter().map(|r| r % g.order()).collect();
        set.sort();
        set.dedup();
        let chars: Vec<Character> = set.iter().map(|&x| Character(x)).collect();
        let (dim, basis) = additive_dimension(&g, &chars, DimensionMode::Exact).unwrap();
        prop_assert_eq!(dim, dimension_oracle(&g, &set));
        prop_assert!(is_dissociated(&g, &basis.lambda));
        let (greedy, _) = additive_dimension(&g, &chars, DimensionMode::Greedy).unwrap();
        prop_assert!(greedy <= dim);
    }

    #[test]
    fn bohr_membership_matches_characters(which in 0usize..3, raw in prop::collection::vec(0usize..1000, 0..=3), radius in 0.05f64..2.5) {
        let g: GroupSpec = ["101", "12", "3x9"][which].parse().unwrap();
        let gamma: Vec<Character> = raw.iter().map(|r| Character(r % g.order())).collect();
        let b = bohr_set(&g, &gamma, radius).unwrap();
        let direct = Subset::from_indices(
            g.order(),
            (0..g.order()).filter(|&x| {
                gamma.iter().all(|&chi| (g.char_eval(chi, Element(x)).unwrap() - 1.0).norm() <= radius + 1e-9)
            }),
        )
        .unwrap();
        prop_assert_eq!(&b.realized, &direct);
        prop_assert!(b.realized.contains(0));
        prop_assert!(b.meets_size_bound());

        let cover = bohr_cover(&g, &gamma, radius).unwrap();
        let mut union = Subset::empty(g.order());
        for &s in &cover.shifts {
            union.union_with(&g.translate(&cover.full.realized, s));
        }
        prop_assert_eq!(union.len(), g.order());
        prop_assert!(cover.t * cover.half.size() <= g.order());
    }

    #[test]
    fn chang_bound_holds(p in prop::sample::select(vec![31usize, 101]), bits in prop::collection::vec(any::<bool>(), 101), eps in 0.15f64..0.9) {
        let a = Subset::from_indices(p, (0..p).filter(|&x| bits[x])).unwrap();
        prop_assume!(!a.is_empty());
        let c = chang_check(&GroupSpec::cyclic(p).unwrap(), &a, eps).unwrap();
        prop_assert!(c.ok, "{:?}", c);
    }
}

use proptest::prelude::*;
use sumset_census::mask::MaskKernel;
use sumset_census::sumset::{convolution, kneser_slack, sumset, thick_sumset, thick_threshold};
use sumset_census::{Element, GroupSpec, Subset};

const GROUPS: [&str; 8] = ["1", "5", "8", "12", "2x2", "2x6", "3x3", "2x2x2"];

fn naive_sumset(g: &GroupSpec, a: &Subset, b: &Subset) -> Subset {
    let mut out = Subset::empty(g.order());
    for x in a.iter() {
        for y in b.iter() {
            out.insert(g.add(Element(x), Element(y)).unwrap().0);
        }
    }
    out
}

fn naive_stabilizer_order(g: &GroupSpec, s: &Subset) -> usize {
    (0..g.order()).filter(|&t| g.translate(s, Element(t)) == *s).count()
}

fn arb_group_pair() -> impl Strategy<Value = (GroupSpec, u64, u64)> {
    (0..GROUPS.len(), any::<u64>(), any::<u64>()).prop_map(|(i, a, b)| {
        let g: GroupSpec = GROUPS[i].parse().unwrap();
        let full = (1u64 << g.order()) - 1;
        (g, a & full, b & full)
    })
}

proptest! {
    #[test]
    fn sumset_matches_double_loop((g, a, b) in arb_group_pair()) {
        let (sa, sb) = (Subset::from_mask(g.order(), a), Subset::from_mask(g.order(), b));
        let s = sumset(&g, &sa, &sb);
        prop_assert_eq!(&s, &naive_sumset(&g, &sa, &sb));
        prop_assert_eq!(s.to_mask().unwrap(), MaskKernel::new(&g).sumset(a, b));
    }

    #[test]
    fn kneser_matches_direct_stabilizer((g, a, b) in arb_group_pair()) {
        prop_assume!(a != 0 && b != 0);
        let (sa, sb) = (Subset::from_mask(g.order(), a), Subset::from_mask(g.order(), b));
        let r = kneser_slack(&g, &sa, &sb).unwrap();
        let s = naive_sumset(&g, &sa, &sb);
        prop_assert_eq!(r.stab_size, naive_stabilizer_order(&g, &s));
        prop_assert_eq!(MaskKernel::new(&g).stabilizer(s.to_mask().unwrap()).count_ones() as usize, r.stab_size);
        prop_assert!(r.holds());
    }

    #[test]
    fn convolution_counts_representations((g, a, b) in arb_group_pair()) {
        let (sa, sb) = (Subset::from_mask(g.order(), a), Subset::from_mask(g.order(), b));
        let table = convolution(&g, &sa, &sb);
        let kernel = MaskKernel::new(&g).convolution(a, b);
        for x in 0..g.order() {
            let direct = sa.iter().filter(|&y| sb.contains(g.sub(Element(x), Element(y)).unwrap().0)).count();
            prop_assert_eq!(table.counts[x] as usize, direct);
            prop_assert_eq!(kernel[x] as usize, direct);
        }
        prop_assert_eq!(table.total() as usize, sa.len() * sb.len());
    }

    #[test]
    fn thick_sumsets_shrink_with_eps((g, a, b) in arb_group_pair(), e1 in 0.0f64..1.0, e2 in 0.0f64..1.0) {
        let (lo, hi) = if e1 <= e2 { (e1, e2) } else { (e2, e1) };
        let (sa, sb) = (Subset::from_mask(g.order(), a), Subset::from_mask(g.order(), b));
        let wide = thick_sumset(&g, &sa, &sb, lo);
        let narrow = thick_sumset(&g, &sa, &sb, hi);
        prop_assert!(narrow.is_subset(&wide));
        prop_assert!(wide.is_subset(&sumset(&g, &sa, &sb)));
    }
}

#[test]
fn thick_threshold_at_integral_products() {
    assert_eq!(thick_threshold(0.1, 30), 3);
    assert_eq!(thick_threshold(0.11, 30), 4);
    assert_eq!(thick_threshold(1e-9, 30), 1);
}

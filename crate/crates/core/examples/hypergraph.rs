//! The mod hypergraph `H^mod_d` on `[3] x Z_2^d`, its independent sets and the
//! gap to the conjectured bound for uniform regular linear hypergraphs.
//!
//! `cargo run --example hypergraph -- 3`

use sumset_census::hypergraph::{
    build_mod_hypergraph, conjecture_gap, count_independent, count_independent_generic, disjoint_union,
    mod_lower_bound, validate, Hypergraph,
};

fn main() -> sumset_census::Result<()> {
    let max: usize = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(3);
    for d in 1..=max {
        let h = build_mod_hypergraph(d)?;
        let v = validate(&h);
        let i = count_independent(&h)?;
        let gap = conjecture_gap(&h, &i)?;
        println!(
            "d = {d}: {} vertices, {} edges, linear {}, tripartite {}, i(H) = {i} >= {}, margin {:.6}",
            h.n_vertices(),
            h.edges().len(),
            v.linear,
            v.tripartite,
            mod_lower_bound(d)?,
            gap.margin
        );
    }

    // The Fano plane is 3-uniform, 3-regular and linear but has no rainbow colouring.
    let fano = Hypergraph::new(
        7,
        vec![
            vec![0, 1, 2],
            vec![0, 3, 4],
            vec![0, 5, 6],
            vec![1, 3, 5],
            vec![1, 4, 6],
            vec![2, 3, 6],
            vec![2, 4, 5],
        ],
    )?;
    let i = count_independent_generic(&fano)?;
    println!("Fano: {:?}, i = {i}", validate(&fano));
    println!("Fano: {}", serde_json::to_string(&conjecture_gap(&fano, &i)?)?);

    let two = disjoint_union(&fano, &fano);
    println!("two Fano planes: i = {} = {i}^2", count_independent_generic(&two)?);
    println!("json: {}", fano.to_json()?);
    Ok(())
}

//! Numerical side of the counting argument: the entropy optimum, the exact
//! binomial chain for small `|A|`, Chernoff tails and the index-2 family.
//!
//! `cargo run --release --example analysis`

use sumset_census::analysis::{chernoff_experiment, gamma_optimize, index2_check, proof_audit, slope_fit};
use sumset_census::GroupSpec;

fn main() -> sumset_census::Result<()> {
    let g = gamma_optimize(1e-10)?;
    println!("gamma* = {:.6}, base = {:.6}", g.gamma_star, g.base);

    for p in [64, 160, 320] {
        let a = proof_audit(p, p / 16)?;
        println!(
            "audit p = {p}, M = {}: log2 LHS {:.2} <= {:.2} <= {:.2} <= {:.2} < {:.2}: {:?}",
            a.m, a.log2_lhs, a.log2_mid[0], a.log2_mid[1], a.log2_e_bound, a.log2_final, a.steps
        );
    }

    let c = chernoff_experiment(1009, 0.5, 2000, 7)?;
    println!("Chernoff p = 1009, gamma = 1/2, 2000 trials: mean |C| = {:.2}", c.mean_size);
    for row in &c.tails {
        println!("  lambda {:>4}: frequency {:.4} <= bound {:.4}: {}", row.lambda, row.frequency, row.bound, row.ok);
    }
    println!(
        "  |C ∩ (C+1)|: mean {:.2} vs {:.2}, sd {:.2}, tails {:?}",
        c.mean_adjacent, c.expected_adjacent, c.sd_adjacent, c.adjacent_tail
    );

    for spec in ["4", "2x2", "2x4"] {
        let r = index2_check(&spec.parse::<GroupSpec>()?)?;
        println!("index-2 family in {spec}: {} triples, exhaustive {}, ok {}", r.count, r.exhaustive, r.ok);
    }

    let series: Vec<(usize, f64)> = (5..=15).map(|n| (n, n as f64 * 2f64.powi(n as i32))).collect();
    let f = slope_fit(&series)?;
    println!("log-linear fit of N 2^N over 5..=15: base {:.4}", f.fitted_base);
    Ok(())
}

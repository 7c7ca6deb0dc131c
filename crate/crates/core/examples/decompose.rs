//! Container decomposition of `C = F_p \ (A + B)` into a small exceptional set
//! `Y` and a union `W` of Bohr-set translates on which `1_A * 1_B` is small.
//!
//! `cargo run --release --example decompose -- 101 0.3 7`

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use sumset_census::structure::{decompose, robust_filter};
use sumset_census::suite::structured_pair_with;
use sumset_census::sumset::sumset;
use sumset_census::GroupSpec;

fn main() -> sumset_census::Result<()> {
    let mut args = std::env::args().skip(1);
    let p: usize = args.next().and_then(|s| s.parse().ok()).unwrap_or(101);
    let density: f64 = args.next().and_then(|s| s.parse().ok()).unwrap_or(0.3);
    let seed: u64 = args.next().and_then(|s| s.parse().ok()).unwrap_or(7);

    let g = GroupSpec::cyclic(p)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (a, b) = structured_pair_with(p, density, density, &mut rng)?;
    let c = sumset(&g, &a, &b).complement();
    println!("p = {p}: |A| = {}, |B| = {}, |C| = {}", a.len(), b.len(), c.len());

    let d = decompose(&g, &a, &b, 0.25, 0.5)?;
    let s = d.summary();
    println!("spectrum {} -> basis of dimension {}", s.spectrum_size, s.lambda_dim);
    println!("Bohr radius {:.4}, size {}, {} of {} shifts kept", s.bohr_radius, s.bohr_size, s.shifts_used, s.t_total);
    println!("|Y| = {} (bound {:.1}), |W| = {}", s.y_size, s.checks.y_bound, s.w_size);
    println!("checks: {:?}", s.checks);
    println!("all invariants hold: {}", s.all_hold);

    // Robust filtering of A against (B, C): the part of A meeting C -_eta B is small.
    let f = robust_filter(&g, &a, &b, &c, 0.01, 0.2, 2.0)?;
    println!(
        "robust filter: eta = {:.3}, |A'| = {} <= {:.1}: {}, avoidance {}",
        f.eta,
        f.x_prime.len(),
        f.size_bound,
        f.size_ok,
        f.avoidance_ok
    );
    Ok(())
}

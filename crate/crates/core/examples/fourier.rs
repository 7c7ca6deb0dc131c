//! Fourier side: large spectrum, Chang's dimension bound, Bohr sets and the
//! covering by translates of a Bohr set.
//!
//! `cargo run --example fourier -- 101 0.3`

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use sumset_census::fourier::{bohr_cover, bohr_set, chang_check, dft_subset, spectrum};
use sumset_census::suite::random_subset;
use sumset_census::{GroupSpec, Subset};

fn main() -> sumset_census::Result<()> {
    let mut args = std::env::args().skip(1);
    let p: usize = args.next().and_then(|s| s.parse().ok()).unwrap_or(101);
    let eps: f64 = args.next().and_then(|s| s.parse().ok()).unwrap_or(0.3);
    let g = GroupSpec::cyclic(p)?;

    // An arithmetic progression has a large spectrum concentrated near 0.
    let ap = g.subset(0..p / 4)?;
    report(&g, "interval", &ap, eps)?;

    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let rand_set = random_subset(p, 0.25, &mut rng);
    report(&g, "random", &rand_set, eps)?;

    let gamma = spectrum(&g, &ap, eps)?;
    let gamma: Vec<_> = gamma.into_iter().filter(|c| c.0 != 0).take(2).collect();
    for radius in [0.5, 1.0, 2.0] {
        let b = bohr_set(&g, &gamma, radius)?;
        println!(
            "Bohr(dim {}, r = {radius}): size {} >= bound {:.2}: {}",
            b.dim(),
            b.size(),
            b.size_bound(),
            b.meets_size_bound()
        );
    }
    let cover = bohr_cover(&g, &gamma, 1.0)?;
    println!("cover by {} translates of the radius-1 Bohr set", cover.t);
    Ok(())
}

fn report(g: &GroupSpec, name: &str, a: &Subset, eps: f64) -> sumset_census::Result<()> {
    let coeffs = dft_subset(g, a)?;
    let top = (1..g.order())
        .map(|r| coeffs.magnitude(sumset_census::Character(r)))
        .fold(0.0, f64::max);
    let c = chang_check(g, a, eps)?;
    println!(
        "{name}: |A| = {}, max nontrivial |1_A^| = {top:.2}, |Spec| = {}, dim >= {} (exact {}), Chang bound {:.2}",
        a.len(),
        c.spectrum_size,
        c.dim_lower_bound,
        c.exact,
        c.chang_bound
    );
    Ok(())
}

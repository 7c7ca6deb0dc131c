//! Exact census `T(Z_d)` with residuals against `3 4^d` and `3 4^d + 3d 3^d`.
//!
//! `cargo run --release --example census -- 16`

use sumset_census::census::{count_symmetric, residuals};
use sumset_census::GroupSpec;

fn main() -> sumset_census::Result<()> {
    let max: usize = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(12);
    println!("{:>3} {:>16} {:>14} {:>14} {:>9}", "d", "T", "R1", "R2", "secs");
    for d in 1..=max {
        let r = count_symmetric(&GroupSpec::cyclic(d)?)?;
        let res = residuals(&r)?;
        println!("{d:>3} {:>16} {:>14} {:>14} {:>9.3}", r.t, res.r1, res.r2, r.elapsed);
    }
    Ok(())
}

//! Sumsets in small groups: Cauchy-Davenport, Kneser's stabilizer bound and
//! the thick-sumset form of Pollard.
//!
//! `cargo run --example sumsets`

use sumset_census::structure::{general_pollard_slack, pollard_slack, Outcome};
use sumset_census::sumset::{cauchy_davenport_holds, convolution, kneser_slack, sumset, thick_sumset};
use sumset_census::GroupSpec;

fn main() -> sumset_census::Result<()> {
    let z13 = GroupSpec::cyclic(13)?;
    let a = z13.subset([0, 1, 2, 5])?;
    let b = z13.subset([0, 3, 4])?;
    let s = sumset(&z13, &a, &b);
    println!("Z_13: A = {:?}, B = {:?}", a.indices(), b.indices());
    println!("  A+B = {:?} (|A+B| = {})", s.indices(), s.len());
    println!("  Cauchy-Davenport holds: {}", cauchy_davenport_holds(&z13, &a, &b)?);

    let conv = convolution(&z13, &a, &b);
    println!("  representation counts total {} max {}", conv.total(), conv.max());
    println!("  A +_0.1 B has {} elements", thick_sumset(&z13, &a, &b, 0.1).len());

    // A periodic sumset: the stabilizer of A+B in Z_12 is {0, 4, 8}.
    let z12 = GroupSpec::cyclic(12)?;
    let a = z12.subset([0, 1, 4, 5, 8])?;
    let b = z12.subset([0, 4])?;
    let k = kneser_slack(&z12, &a, &b)?;
    println!("Z_12: |A+B| = {}, |H| = {}, bound {}, slack {}", k.sumset_size, k.stab_size, k.bound, k.slack);

    let z2x6 = GroupSpec::new(&[2, 6])?;
    let a = z2x6.subset(0..6)?;
    let b = z2x6.subset([0, 1, 2, 7, 8])?;
    let k = kneser_slack(&z2x6, &a, &b)?;
    println!("Z_2 x Z_6: |A+B| = {}, |H| = {}, slack {}", k.sumset_size, k.stab_size, k.slack);

    let z101 = GroupSpec::cyclic(101)?;
    let a = z101.subset(0..40)?;
    let b = z101.subset(0..35)?;
    for (name, out) in [
        ("prime Pollard", pollard_slack(&z101, &a, &b, 0.05)?),
        ("general Pollard", general_pollard_slack(&z101, &a, &b, 0.05)?),
    ] {
        match out {
            Outcome::Checked(r) => println!(
                "Z_101 {name}: |A +_eps B| = {}, bound {:.2}, slack {:.2}",
                r.thick_size, r.rhs_bound, r.slack
            ),
            Outcome::Skipped(why) => println!("Z_101 {name}: skipped ({why})"),
        }
    }
    Ok(())
}

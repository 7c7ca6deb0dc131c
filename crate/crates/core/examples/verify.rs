//! Run the verification batteries in-process and print one line per battery.
//!
//! `cargo run --release --example verify -- quick`

use sumset_census::suite::{run_suite, Scale, SuiteConfig};

fn main() -> sumset_census::Result<()> {
    let scale: Scale = std::env::args().nth(1).as_deref().unwrap_or("quick").parse()?;
    let cfg = SuiteConfig {
        scale,
        ..SuiteConfig::default()
    };
    let out = run_suite(&cfg)?;
    for b in &out.report.batteries {
        println!(
            "{:<20} {:<4} checks {:>10} failures {} skipped {}",
            b.name,
            if b.passed { "pass" } else { "FAIL" },
            b.checks,
            b.failures,
            b.skipped
        );
    }
    println!("all passed: {}", out.report.passed);
    Ok(())
}

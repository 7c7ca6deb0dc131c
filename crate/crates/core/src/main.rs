use std::fs::File;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use sumset_census::analysis::{gamma_optimize, proof_audit, slope_fit};
use sumset_census::cache::{write_csv, Cache, CacheStatus};
use sumset_census::census::{residuals, CensusOptions, CensusResult, Method};
use sumset_census::hypergraph::{
    build_mod_hypergraph, conjecture_gap, count_independent, mod_lower_bound, validate, Hypergraph,
};
use sumset_census::structure::decompose;
use sumset_census::suite::{run_suite, structured_pair_with, Battery, Scale, SuiteConfig, DEFAULT_SEED};
use sumset_census::{GroupSpec, Result};

#[derive(Parser)]
#[command(name = "sumset-census", version, about = "Exact census of subset triples avoiding x + y = z")]
struct Cli {
    /// Worker threads for parallel enumeration.
    #[arg(long, global = true, env = "SUMSET_WORKERS")]
    workers: Option<usize>,
    /// Directory for cached census results.
    #[arg(long, global = true, env = "SUMSET_CACHE_DIR")]
    cache_dir: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Count triples for one group, e.g. `--group 12` or `--group 2x6`.
    Census {
        #[arg(long)]
        group: GroupSpec,
        #[arg(long, default_value = "symmetric")]
        method: Method,
        /// Print the nonzero stratified entries N_{a,b,c}.
        #[arg(long)]
        stratified: bool,
    },
    /// Validate and count a hypergraph.
    Hypergraph {
        /// Use the mod hypergraph H^mod_d.
        #[arg(long = "mod", conflicts_with = "input")]
        modulus: Option<usize>,
        /// Read `{n, edges}` JSON from a file.
        #[arg(long)]
        input: Option<PathBuf>,
    },
    /// Bohr-cover decomposition of a random structured pair in F_p.
    Decompose {
        #[arg(long)]
        p: usize,
        #[arg(long, default_value_t = 0.3)]
        a_density: f64,
        /// Defaults to the density of A.
        #[arg(long)]
        b_density: Option<f64>,
        #[arg(long, default_value_t = 0.25)]
        delta: f64,
        #[arg(long, default_value_t = 0.5)]
        eps: f64,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
    },
    /// Run verification batteries; exits nonzero unless all pass.
    Verify {
        /// `all` or a comma-separated list of battery names.
        #[arg(long, default_value = "all")]
        battery: String,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
        #[arg(long, default_value = "full")]
        scale: Scale,
        /// Write the JSON report here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Residuals of T(Z_d) and the fitted growth of |R2|.
    Analyze {
        #[arg(long)]
        residuals: bool,
        #[arg(long)]
        fit: bool,
        #[arg(long, default_value_t = 16)]
        max_d: usize,
        /// Smallest d in the fit window.
        #[arg(long, default_value_t = 6)]
        window_start: usize,
        /// Also print the gamma optimum and the binomial-chain audits.
        #[arg(long)]
        extras: bool,
    },
    /// Export census results for Z_1..Z_max as CSV.
    Report {
        #[arg(long)]
        csv: PathBuf,
        #[arg(long, default_value_t = 14)]
        max_d: usize,
    },
}

fn census_cached(cli: &Cli, g: &GroupSpec, method: Method) -> Result<CensusResult> {
    let opts = CensusOptions {
        workers: cli.workers,
        ..CensusOptions::default()
    };
    let cache = cli.cache_dir.clone().map_or_else(Cache::from_env, Cache::new);
    let (r, status) = cache.get_or_compute(g, method, &opts)?;
    if let CacheStatus::Rebuilt(why) = status {
        eprintln!("cache entry for {g} rebuilt: {why}");
    }
    Ok(r)
}

fn cyclic_series(cli: &Cli, max_d: usize) -> Result<Vec<CensusResult>> {
    (1..=max_d)
        .map(|d| census_cached(cli, &GroupSpec::cyclic(d)?, Method::Symmetric))
        .collect()
}

fn run(cli: &Cli) -> Result<bool> {
    match &cli.command {
        Command::Census {
            group,
            method,
            stratified,
        } => {
            let opts = CensusOptions {
                workers: cli.workers,
                ..CensusOptions::default()
            };
            let r = if *stratified {
                sumset_census::census::count(group, *method, &opts)?
            } else {
                census_cached(cli, group, *method)?
            };
            let res = residuals(&r)?;
            println!("group {}  N = {}  method {}", r.group, r.order(), r.method);
            println!("T    = {}", r.t);
            println!("R_lb = {}\nR1   = {}\nR2   = {}", res.r_lb, res.r1, res.r2);
            println!("elapsed {:.3}s", r.elapsed);
            if *stratified {
                match &r.stratified {
                    Some(table) => {
                        for (a, b, c, v) in table.nonzero() {
                            println!("N[{a},{b},{c}] = {v}");
                        }
                    }
                    None => eprintln!("no stratified table for this group or method"),
                }
            }
            Ok(true)
        }
        Command::Hypergraph { modulus, input } => {
            let h = match (modulus, input) {
                (Some(d), _) => build_mod_hypergraph(*d)?,
                (None, Some(path)) => Hypergraph::from_json(&std::fs::read_to_string(path)?)?,
                (None, None) => {
                    eprintln!("pass --mod d or --input file.json");
                    return Ok(false);
                }
            };
            let v = validate(&h);
            println!("vertices {}  edges {}", h.n_vertices(), h.edges().len());
            println!("{}", serde_json::to_string(&v)?);
            let i = count_independent(&h)?;
            println!("i(H) = {i}");
            if let Some(d) = modulus {
                println!("lower bound 3*4^d - 3*2^d + 1 = {}", mod_lower_bound(*d)?);
            }
            match conjecture_gap(&h, &i) {
                Ok(gap) => println!("{}", serde_json::to_string(&gap)?),
                Err(e) => eprintln!("conjecture gap unavailable: {e}"),
            }
            Ok(true)
        }
        Command::Decompose {
            p,
            a_density,
            b_density,
            delta,
            eps,
            seed,
        } => {
            let g = GroupSpec::cyclic(*p)?;
            let mut rng = ChaCha8Rng::seed_from_u64(*seed);
            let (a, b) = structured_pair_with(*p, *a_density, b_density.unwrap_or(*a_density), &mut rng)?;
            let d = decompose(&g, &a, &b, *delta, *eps)?;
            println!("{}", serde_json::to_string_pretty(&d.summary())?);
            Ok(d.checks.all_hold())
        }
        Command::Verify {
            battery,
            seed,
            scale,
            out,
        } => {
            let cfg = SuiteConfig {
                batteries: Battery::parse_list(battery)?,
                seed: *seed,
                scale: *scale,
                workers: cli.workers,
                cache: cli.cache_dir.clone(),
            };
            let outcome = run_suite(&cfg)?;
            for e in &outcome.cache_events {
                eprintln!("{e}");
            }
            let json = outcome.report.to_json()?;
            match out {
                Some(path) => std::fs::write(path, json + "\n")?,
                None => println!("{json}"),
            }
            for b in &outcome.report.batteries {
                eprintln!(
                    "{:<20} {} ({} checks, {} failures)",
                    b.name,
                    if b.passed { "pass" } else { "FAIL" },
                    b.checks,
                    b.failures
                );
            }
            Ok(outcome.report.passed)
        }
        Command::Analyze {
            residuals: show,
            fit,
            max_d,
            window_start,
            extras,
        } => {
            let series = cyclic_series(cli, *max_d)?;
            let mut r2 = Vec::new();
            if *show {
                println!("{:>3} {:>18} {:>16} {:>16} {:>16}", "d", "T", "R_lb", "R1", "R2");
            }
            for r in &series {
                let res = residuals(r)?;
                if *show {
                    println!("{:>3} {:>18} {:>16} {:>16} {:>16}", r.order(), r.t, res.r_lb, res.r1, res.r2);
                }
                if r.order() >= *window_start {
                    let sign = if res.r2.sign() == num_bigint::Sign::Minus { -1.0 } else { 1.0 };
                    let v = sumset_census::analysis::ln_abs(&res.r2).map_or(0.0, f64::exp);
                    r2.push((r.order(), sign * v));
                }
            }
            if *fit {
                let f = slope_fit(&r2)?;
                println!(
                    "|R2| fit over d = {}..={}: base {:.4} (slope {:.4})",
                    f.window.0, f.window.1, f.fitted_base, f.slope
                );
            }
            if *extras {
                let g = gamma_optimize(1e-10)?;
                println!("gamma* = {:.6}, base = {:.6}", g.gamma_star, g.base);
                for p in [64, 128, 256, 512] {
                    let a = proof_audit(p, p / 16)?;
                    println!("audit p = {p}, M = {}: {:?} ok = {}", a.m, a.steps, a.ok);
                }
            }
            Ok(true)
        }
        Command::Report { csv, max_d } => {
            let series = cyclic_series(cli, *max_d)?;
            write_csv(File::create(csv)?, &series)?;
            println!("wrote {} rows to {}", series.len(), csv.display());
            Ok(true)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

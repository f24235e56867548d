//! Runs every acceptance criterion at its stated tolerance and prints one
//! line per criterion. Set LCLAB_SEED to change the seed and LCLAB_ONLY to
//! a comma-separated list of criterion numbers to run a subset.

use lclab_cli::criteria::{run_criterion, CRITERIA, DEFAULT_SEED};

fn main() {
    let seed = std::env::var("LCLAB_SEED").ok().and_then(|s| s.parse().ok()).unwrap_or(DEFAULT_SEED);
    let only: Option<Vec<u32>> =
        std::env::var("LCLAB_ONLY").ok().map(|s| s.split(',').filter_map(|x| x.trim().parse().ok()).collect());
    println!("acceptance suite, seed {seed}");
    let mut failed = vec![];
    for c in CRITERIA.iter().filter(|c| only.as_ref().is_none_or(|o| o.contains(&c.id))) {
        let o = run_criterion(c, seed);
        println!("{}", o.line());
        if !o.pass() {
            for a in o.checks.iter().filter(|a| !a.pass) {
                println!("    failed: {}: observed {} expected {} ({})", a.name, a.observed, a.expected, a.tolerance);
            }
            failed.push(c.id);
        }
    }
    if failed.is_empty() {
        println!("all criteria passed");
    } else {
        println!("failed criteria: {failed:?}");
        std::process::exit(1);
    }
}

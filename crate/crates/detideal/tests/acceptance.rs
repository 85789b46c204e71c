//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on failure.

use detideal::acceptance::{report_json, run_all};

fn main() {
    let seed = std::env::var("DETIDEAL_SEED").ok().and_then(|s| s.parse().ok()).unwrap_or(2024);
    let outcomes = run_all(seed);
    for o in &outcomes {
        println!("{}", o.line());
    }
    let report = report_json(seed, &outcomes);
    let failed = outcomes.iter().filter(|o| !o.pass).count();
    println!("acceptance: {}/{} criteria pass (seed {seed})", outcomes.len() - failed, outcomes.len());
    if report["all_pass"] != true {
        std::process::exit(1);
    }
}

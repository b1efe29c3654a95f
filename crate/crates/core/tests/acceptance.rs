//! Runs every acceptance criterion and prints one PASS/FAIL line each.

use sftgroup::selftest;

fn main() {
    let seed = std::env::var("SFTGROUP_SEED").ok().and_then(|s| s.parse().ok()).unwrap_or(20240611);
    let mut failed = 0;
    for report in selftest::run_all(seed) {
        println!("{report}");
        if !report.passed {
            failed += 1;
        }
    }
    if failed > 0 {
        eprintln!("{failed} criteria failed");
        std::process::exit(1);
    }
}

//! Runs the nine acceptance criteria at full scope and prints one line per
//! criterion. Exits nonzero if any criterion fails or exceeds its time
//! budget. `ACCEPTANCE_CRITERIA=2,7` restricts the run to the listed ids.

use std::process::ExitCode;

use tangentcone::selfcheck::{run_criterion, Scope, CRITERIA};

const SEED: u64 = 20240901;

/// Wall-clock budget per criterion, in seconds.
const BUDGETS: [(u8, f64); 9] =
    [(1, 1.0), (2, 60.0), (3, 600.0), (4, 600.0), (5, 600.0), (6, 1800.0), (7, 300.0), (8, 1800.0), (9, 60.0)];

fn selected() -> Option<Vec<u8>> {
    let v = std::env::var("ACCEPTANCE_CRITERIA").ok()?;
    Some(v.split(',').filter_map(|s| s.trim().parse().ok()).collect())
}

fn main() -> ExitCode {
    let verbose = std::env::args().any(|a| a == "--verbose" || a == "-v");
    let only = selected();
    let mut failed = 0;
    let mut ran = 0;
    for (id, _) in CRITERIA {
        if only.as_ref().is_some_and(|o| !o.contains(&id)) {
            continue;
        }
        ran += 1;
        let report = run_criterion(id, Scope::Full, SEED).expect("known criterion");
        let budget = BUDGETS.iter().find(|(b, _)| *b == id).map(|(_, s)| *s).expect("budget for every criterion");
        let in_time = report.seconds <= budget;
        println!("{}", report.summary_line());
        if !in_time {
            println!("    [FAILED] time budget: {:.1} s exceeds {budget:.0} s", report.seconds);
        }
        for c in &report.checks {
            if verbose || !c.passed || c.informational {
                let tag = match (c.informational, c.passed) {
                    (true, true) => "info ok",
                    (true, false) => "info no",
                    (false, true) => "ok",
                    (false, false) => "FAILED",
                };
                println!("    [{tag}] {}: {}", c.name, c.detail);
            }
        }
        if !report.passed || !in_time {
            failed += 1;
        }
    }
    println!("acceptance: {} of {ran} criteria pass", ran - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}

//! Runs the numbered acceptance battery at full size and prints one verdict
//! line per criterion.

use std::io::Write;

use rigidsum::suite::{run_criterion, SuiteOptions, CRITERIA};

#[test]
fn acceptance() {
    let opts = SuiteOptions::default();
    let mut failed = Vec::new();
    // Written to the raw handle so the lines show without --nocapture.
    let mut err = std::io::stderr().lock();
    for (id, _) in CRITERIA {
        let report = run_criterion(id, &opts);
        let _ = writeln!(err, "{}", report.line());
        if !report.passed {
            failed.push(report.line());
        }
    }
    assert!(failed.is_empty(), "failing criteria:\n{}", failed.join("\n"));
}

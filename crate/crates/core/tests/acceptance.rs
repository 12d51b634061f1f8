//! Acceptance criteria: one PASS/FAIL line per criterion.

use std::io::Write;
use topoderiv::selftest::{SelftestOptions, Suite};

#[test]
fn acceptance() {
    let suite = Suite::new(SelftestOptions::default());
    let reports = suite.run_all();
    // straight to the handle so the lines survive libtest output capture
    let mut err = std::io::stderr().lock();
    for r in &reports {
        writeln!(err, "{}", r.line()).unwrap();
    }
    drop(err);
    let failed: Vec<u8> = reports.iter().filter(|r| !r.passed).map(|r| r.id).collect();
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}

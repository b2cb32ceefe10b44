//! The ten acceptance criteria at full size, one PASS/FAIL line each.

use hilbtaut::verify::{run_criterion, Bounds, Tier, CRITERIA};

#[test]
fn acceptance_criteria() {
    let bounds = Bounds { tier: Tier::Full, max_n: None };
    let mut failed = Vec::new();
    for c in &CRITERIA {
        let o = run_criterion(c, &bounds);
        println!(
            "{} criterion {:>2} ({}): {} [{} ms, budget {} ms]",
            if o.passed { "PASS" } else { "FAIL" },
            o.id,
            o.title,
            o.detail,
            o.elapsed_ms,
            o.budget_ms
        );
        if !o.passed {
            failed.push(o.id);
        }
    }
    assert!(failed.is_empty(), "failing criteria: {:?}", failed);
}

//! Acceptance suite: runs every criterion and prints one line per criterion.

use glfcert_cli::verify::{run_suite, Suite};

const SEED: u64 = 42;

#[test]
fn acceptance_criteria() {
    let report = run_suite(Suite::All, SEED, None);
    let mut failed = Vec::new();
    for c in &report.criteria {
        println!("{}", c.headline());
        for d in &c.details {
            println!("    {d}");
        }
        if !c.passed {
            failed.push(c.id);
        }
    }
    println!(
        "summary: {} of {} criteria passed",
        report.criteria.len() - failed.len(),
        report.criteria.len()
    );
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}

#[test]
fn suite_report_is_reproducible() {
    let a = run_suite(Suite::Trunc, SEED, None).render();
    let b = run_suite(Suite::Trunc, SEED, None).render();
    assert_eq!(a, b);
}

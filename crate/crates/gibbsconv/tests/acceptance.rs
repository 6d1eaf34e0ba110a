//! End-to-end verification sweep: one line per criterion, all must pass.
//!
//! Criteria 1-13 run through the library sweep; criterion 14 (bit-identical
//! reruns of the binary) shells out to the `gibbsconv` executable twice.

use std::process::Command;

use gibbsconv::scenarios::{verify_all, Config, CriterionResult};

#[test]
fn acceptance_sweep() {
    let mut results = verify_all(&Config::default()).expect("sweep runs");

    let exe = env!("CARGO_BIN_EXE_gibbsconv");
    let run = || {
        Command::new(exe)
            .args(["verify-all", "--seed", "42"])
            .output()
            .expect("binary runs")
    };
    let (first, second) = (run(), run());
    let identical = first.stdout == second.stdout && !first.stdout.is_empty();
    let clean_exits = first.status.success() && second.status.success();
    results.push(CriterionResult {
        id: 14,
        name: "determinism".into(),
        pass: identical && clean_exits,
        detail: format!(
            "reruns byte-identical {identical}; exit codes clean {clean_exits}; {} bytes",
            first.stdout.len()
        ),
    });

    let mut all_pass = true;
    for r in &results {
        println!("{}", r.line());
        all_pass &= r.pass;
    }
    assert!(all_pass, "at least one criterion failed; see lines above");
}

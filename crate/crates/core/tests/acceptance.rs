use std::process::ExitCode;

use corner_homology::acceptance::{run_criterion, CRITERIA};

fn main() -> ExitCode {
    let mut failed = Vec::new();
    for (id, _) in CRITERIA {
        let r = run_criterion(id);
        println!("criterion {:>2} {}: {} ({})", r.id, if r.passed { "PASS" } else { "FAIL" }, r.name, r.detail);
        if !r.passed {
            failed.push(id);
        }
    }
    if failed.is_empty() {
        println!("acceptance: all {} criteria pass", CRITERIA.len());
        ExitCode::SUCCESS
    } else {
        println!("acceptance: failing criteria {failed:?}");
        ExitCode::FAILURE
    }
}

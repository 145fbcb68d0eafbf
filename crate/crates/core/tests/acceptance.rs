//! One PASS/FAIL line per acceptance criterion; exits nonzero if any fails.

use std::process::ExitCode;

use treenorm::verify::{run_check, Suite, DEFAULT_SEED};

fn main() -> ExitCode {
    let mut failed = 0;
    for &id in Suite::All.criteria() {
        let check = run_check(id, DEFAULT_SEED);
        println!("{check}");
        failed += usize::from(!check.passed);
    }
    println!("acceptance: {} passed, {failed} failed", Suite::All.criteria().len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}

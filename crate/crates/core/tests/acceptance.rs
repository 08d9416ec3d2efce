//! Acceptance suite: one PASS/FAIL line per criterion with the observed error
//! and the pinned tolerance. Runs without the libtest harness so the lines
//! are always printed; exits non-zero if any criterion fails.

use std::process::ExitCode;

use lightcone_core::sweep::Execution;
use lightcone_core::verify;

fn main() -> ExitCode {
    // `cargo test -- <filter>` style arguments are accepted and ignored.
    let results = verify::run_all(Execution::Parallel);
    for r in &results {
        println!("{r}");
    }
    let failed = results.iter().filter(|r| !r.passed).count();
    println!("acceptance: {} passed, {failed} failed", results.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}

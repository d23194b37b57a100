use std::process::ExitCode;

use bmhull::acceptance::{run_suite, Profile};

fn main() -> ExitCode {
    let profile = if std::env::var_os("BMHULL_ACCEPTANCE_QUICK").is_some() {
        Profile::Quick
    } else {
        Profile::Full
    };
    let dir = tempfile::tempdir().expect("temporary directory");
    let outcomes = match run_suite(profile, 1, None, dir.path(), |o| println!("{o}")) {
        Ok(o) => o,
        Err(e) => {
            eprintln!("acceptance suite could not start: {e}");
            return ExitCode::FAILURE;
        }
    };
    let passed = outcomes.iter().filter(|o| o.passed).count();
    println!("{passed}/{} criteria passed", outcomes.len());
    if passed == outcomes.len() {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}

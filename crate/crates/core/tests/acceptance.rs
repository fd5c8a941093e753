use qdouble::acceptance;
use std::process::ExitCode;

fn main() -> ExitCode {
    let mut failed = 0;
    for id in 1..=acceptance::TITLES.len() {
        let r = acceptance::run(id);
        let status = if r.pass() { "PASS" } else { "FAIL" };
        let detail = match (&r.error, r.worst()) {
            (Some(e), _) => format!("error: {e}"),
            (None, Some(c)) => format!("{} checks, worst {} = {:.3e} (threshold {:.1e})", r.checks.len(), c.name, c.residual, c.threshold),
            (None, None) => "no checks".to_string(),
        };
        println!("criterion {id} [{status}] {}: {detail} ({:.1} s)", r.title, r.seconds);
        if !r.pass() {
            failed += 1;
            for c in r.checks.iter().filter(|c| !c.pass) {
                println!("    failed: {} = {:.6e} > {:.1e}", c.name, c.residual, c.threshold);
            }
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}

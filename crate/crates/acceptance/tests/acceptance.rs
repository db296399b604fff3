//! Acceptance criteria 1–16, one line per criterion.

use qcorr::verify::{check_name, run_check, VerifyConfig};

#[test]
fn acceptance_criteria() {
    let cfg = VerifyConfig::default();
    let mut failed = Vec::new();
    for id in 1..=16 {
        match run_check(id, &cfg) {
            Ok(r) => {
                println!(
                    "criterion {:>2} {} | {} | measured {:.3e} tol {:.1e} | {} ({:.2} s)",
                    r.id,
                    if r.pass { "PASS" } else { "FAIL" },
                    r.name,
                    r.measured,
                    r.tolerance,
                    r.detail,
                    r.seconds
                );
                if !r.pass {
                    failed.push(id);
                }
            }
            Err(e) => {
                println!("criterion {id:>2} FAIL | {} | error: {e}", check_name(id).unwrap_or("?"));
                failed.push(id);
            }
        }
    }
    assert!(failed.is_empty(), "failing criteria: {failed:?}");
}

//! Acceptance suite: one line per criterion. Exits non-zero if any fails.

use cond_hardy::validation::{run_all, Settings};

fn main() {
    let settings = Settings::default();
    let checks = run_all(&settings, |c| {
        let status = if c.passed { "PASS" } else { "FAIL" };
        let detail: Vec<String> = c
            .metrics
            .iter()
            .map(|m| {
                format!(
                    "{} = {:.3e} ({} {:.1e})",
                    m.name,
                    m.value,
                    if m.at_least { ">=" } else { "<=" },
                    m.limit
                )
            })
            .collect();
        let err = c
            .error
            .as_ref()
            .map(|e| format!(" error: {e}"))
            .unwrap_or_default();
        println!(
            "criterion {:>2} [{status}] {} ({:.1} s): {}{err}",
            c.id,
            c.name,
            c.seconds,
            detail.join("; ")
        );
    });
    let failed = checks.iter().filter(|c| !c.passed).count();
    println!(
        "acceptance: {} of {} criteria passed",
        checks.len() - failed,
        checks.len()
    );
    if failed > 0 {
        std::process::exit(1);
    }
}

//! One PASS/FAIL line per acceptance criterion, on the symbolic model.
//! Failing clauses are listed under their criterion.
//!
//! A FAIL line is printed whenever a criterion fails. The exit status is
//! non-zero unless the failures are exactly the known ones in `KNOWN_RED`,
//! so a regression anywhere else, or a known failure that goes away, still
//! breaks the build.

use std::process::ExitCode;
use std::time::Instant;

use qsphere::model::Model;
use qsphere_suite::CRITERIA;

/// Clauses that fail as stated; the analysis is in the README.
const KNOWN_RED: &[(usize, &str)] = &[(
    7,
    "S(mu12(u dv0)) = gamma^-1 mu23 P0_23(d v0_bar u) + alpha^-1 mu23 P2_23(d v0_bar u)",
)];

fn main() -> ExitCode {
    let model = Model::symbolic();
    let mut failing = 0;
    let mut unexpected = Vec::new();
    let mut seen_red = Vec::new();
    for c in &CRITERIA {
        let start = Instant::now();
        let verdict = (c.run)(&model);
        let secs = start.elapsed().as_secs_f64();
        let tag = if verdict.pass() { "PASS" } else { "FAIL" };
        println!(
            "{} criterion {}: {} ({} clauses, {:.1}s)",
            tag,
            c.number,
            c.title,
            verdict.clauses.len(),
            secs
        );
        for f in verdict.failures() {
            let known = KNOWN_RED.iter().any(|&(n, name)| n == c.number && name == f.name);
            println!("    failed{}: {}", if known { " (known)" } else { "" }, f.name);
            if !f.detail.is_empty() {
                println!("      {}", f.detail);
            }
            if known {
                seen_red.push((c.number, f.name.clone()));
            } else {
                unexpected.push(format!("criterion {}: {}", c.number, f.name));
            }
        }
        if !verdict.pass() {
            failing += 1;
        }
    }
    for &(n, name) in KNOWN_RED {
        if !seen_red.iter().any(|(m, s)| *m == n && s == name) {
            unexpected.push(format!("criterion {}: known failure now holds: {}", n, name));
        }
    }
    println!("{} of {} criteria pass", CRITERIA.len() - failing, CRITERIA.len());
    if unexpected.is_empty() {
        ExitCode::SUCCESS
    } else {
        for u in &unexpected {
            println!("unexpected: {}", u);
        }
        ExitCode::FAILURE
    }
}

//! One pass/fail line per acceptance criterion, with runtime limits.
//!
//! Criteria listed in `KNOWN_RED` are reported as FAIL but do not fail the
//! run; the run does fail if one of them turns green, so the list stays
//! accurate.

use std::process::ExitCode;

use siegel_lab::verify::{run_suite, Suite, VerifyConfig};

struct Criterion {
    id: u32,
    title: &'static str,
    suite: Suite,
    limit_s: f64,
}

const CRITERIA: [Criterion; 11] = [
    Criterion {
        id: 1,
        title: "determinant identity",
        suite: Suite::Identity,
        limit_s: 30.0,
    },
    Criterion {
        id: 2,
        title: "metric axioms and invariance",
        suite: Suite::Metric,
        limit_s: 60.0,
    },
    Criterion {
        id: 3,
        title: "genus-two volume closed form and bound",
        suite: Suite::Volume2,
        limit_s: 60.0,
    },
    Criterion {
        id: 4,
        title: "genus-three volume shape flatness",
        suite: Suite::Shape,
        limit_s: 300.0,
    },
    Criterion {
        id: 5,
        title: "Hua beta integral",
        suite: Suite::Hua,
        limit_s: 120.0,
    },
    Criterion {
        id: 6,
        title: "cosh product inequality",
        suite: Suite::Cosh,
        limit_s: 10.0,
    },
    Criterion {
        id: 7,
        title: "kernel majorant chain",
        suite: Suite::Kernel,
        limit_s: 120.0,
    },
    Criterion {
        id: 8,
        title: "off-diagonal decay shape",
        suite: Suite::Decay,
        limit_s: 180.0,
    },
    Criterion {
        id: 9,
        title: "translation-family cusp tail",
        suite: Suite::Cusp,
        limit_s: 120.0,
    },
    Criterion {
        id: 10,
        title: "counting and orbit-sum bounds",
        suite: Suite::Orbit,
        limit_s: 180.0,
    },
    Criterion {
        id: 11,
        title: "infrastructure",
        suite: Suite::Infra,
        limit_s: 30.0,
    },
];

/// Criteria that fail for reasons recorded in the project notes.
const KNOWN_RED: &[u32] = &[4];

fn main() -> ExitCode {
    let cfg = VerifyConfig::default();
    let mut unexpected = Vec::new();
    for c in &CRITERIA {
        let mut lines = Vec::new();
        let (ok, seconds) = match run_suite(c.suite, &cfg) {
            Ok(report) => {
                for check in &report.checks {
                    lines.push(format!(
                        "    [{}] {}: measured {:.6e}, threshold {:.6e} ({})",
                        if check.passed { "ok" } else { "FAIL" },
                        check.name,
                        check.measured,
                        check.threshold,
                        check.detail
                    ));
                }
                (report.passed(), report.seconds)
            }
            Err(e) => {
                lines.push(format!("    [FAIL] suite {} errored: {e}", c.suite));
                (false, 0.0)
            }
        };
        let passed = ok && seconds < c.limit_s;
        let known = KNOWN_RED.contains(&c.id);
        println!(
            "criterion {:>2} {} {} ({:.1} s, limit {:.0} s){}",
            c.id,
            if passed { "PASS" } else { "FAIL" },
            c.title,
            seconds,
            c.limit_s,
            if known && !passed { " [known red]" } else { "" }
        );
        for l in lines {
            println!("{l}");
        }
        if passed == known {
            unexpected.push(c.id);
        }
    }
    if unexpected.is_empty() {
        ExitCode::SUCCESS
    } else {
        println!("unexpected outcome for criteria {unexpected:?}");
        ExitCode::FAILURE
    }
}

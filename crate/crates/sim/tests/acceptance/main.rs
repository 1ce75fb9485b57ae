//! Acceptance suite: one line per criterion, non-zero exit when any fails.
//!
//! Run with `cargo test -p hts-sim --test acceptance`.

mod coverage;
mod determinism;
mod doppler;
mod formula;
mod intermod;
mod optimality;
mod statistics;

use std::process::ExitCode;
use std::time::{Duration, Instant};

/// Outcome of one criterion: a short summary on success, the failures otherwise.
pub type Outcome = Result<String, Vec<String>>;

struct Criterion {
    number: u32,
    name: &'static str,
    budget: Duration,
    run: fn() -> Outcome,
}

/// Collects failed checks so a criterion reports all of them at once.
#[derive(Default)]
pub struct Checks {
    pub passed: usize,
    pub failed: Vec<String>,
}

impl Checks {
    pub fn check(&mut self, ok: bool, what: impl FnOnce() -> String) {
        if ok {
            self.passed += 1;
        } else {
            self.failed.push(what());
        }
    }

    /// Record a named sub-check that returns its own failure message.
    pub fn case(&mut self, name: &str, f: impl FnOnce() -> Result<(), String>) {
        match std::panic::catch_unwind(std::panic::AssertUnwindSafe(f)) {
            Ok(Ok(())) => self.passed += 1,
            Ok(Err(e)) => self.failed.push(format!("{name}: {e}")),
            Err(_) => self.failed.push(format!("{name}: panicked")),
        }
    }

    pub fn finish(self, summary: impl FnOnce(usize) -> String) -> Outcome {
        if self.failed.is_empty() {
            Ok(summary(self.passed))
        } else {
            Err(self.failed)
        }
    }
}

/// `|a - b| <= tol * max(|a|, |b|)`, exact equality always accepted.
pub fn rel_close(a: f64, b: f64, tol: f64) -> bool {
    a == b || (a - b).abs() <= tol * a.abs().max(b.abs())
}

pub fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

pub fn scenario_path(name: &str) -> std::path::PathBuf {
    std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("scenarios").join(name)
}

fn main() -> ExitCode {
    let criteria = [
        Criterion { number: 1, name: "formula fidelity", budget: Duration::from_secs(10), run: formula::run },
        Criterion { number: 2, name: "trivial limits", budget: Duration::from_secs(10), run: trivial::run },
        Criterion { number: 3, name: "statistics", budget: Duration::from_secs(60), run: statistics::run },
        Criterion { number: 4, name: "doppler kinematics", budget: Duration::from_secs(5), run: doppler::run },
        Criterion { number: 5, name: "linear-algebra optimality", budget: Duration::from_secs(30), run: optimality::run },
        Criterion { number: 6, name: "coverage pipeline", budget: Duration::from_secs(60), run: coverage::run },
        Criterion { number: 7, name: "end-to-end determinism", budget: Duration::from_secs(60), run: determinism::run },
        Criterion { number: 8, name: "third-order intermodulation", budget: Duration::from_secs(10), run: intermod::run },
    ];
    let mut failures = 0;
    for c in &criteria {
        let start = Instant::now();
        let outcome = match std::panic::catch_unwind(c.run) {
            Ok(o) => o,
            Err(_) => Err(vec!["panicked".to_string()]),
        };
        let elapsed = start.elapsed();
        let over = elapsed > c.budget;
        let verdict = if outcome.is_ok() && !over { "PASS" } else { "FAIL" };
        let secs = elapsed.as_secs_f64();
        let budget = c.budget.as_secs();
        match &outcome {
            Ok(summary) => println!("criterion {} ({}): {verdict} in {secs:.2} s (budget {budget} s); {summary}", c.number, c.name),
            Err(errors) => {
                println!("criterion {} ({}): FAIL in {secs:.2} s (budget {budget} s); {} failed check(s)", c.number, c.name, errors.len());
                for e in errors.iter().take(20) {
                    println!("    {e}");
                }
            }
        }
        if over && outcome.is_ok() {
            println!("    runtime over budget");
        }
        if verdict == "FAIL" {
            failures += 1;
        }
    }
    if failures == 0 {
        println!("acceptance: all {} criteria passed", criteria.len());
        ExitCode::SUCCESS
    } else {
        println!("acceptance: {failures} of {} criteria failed", criteria.len());
        ExitCode::FAILURE
    }
}

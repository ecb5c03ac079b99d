//! Suite reports: a plain-text summary and JSON-lines records.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::Serialize;

/// Counterexamples kept per suite.
pub const MAX_COUNTEREXAMPLES: usize = 10;

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct SuiteReport {
    pub property: String,
    pub seed: u64,
    pub instances: u64,
    pub failures: u64,
    pub counterexamples: Vec<String>,
    pub coverage: BTreeMap<String, u64>,
}

impl SuiteReport {
    pub fn new(property: &str, seed: u64) -> Self {
        SuiteReport { property: property.to_string(), seed, ..Default::default() }
    }

    pub fn passed(&self) -> bool {
        self.failures == 0
    }

    pub fn fail(&mut self, counterexample: impl Into<String>) {
        self.failures += 1;
        if self.counterexamples.len() < MAX_COUNTEREXAMPLES {
            self.counterexamples.push(counterexample.into());
        }
    }

    pub fn count(&mut self, key: &str, by: u64) {
        *self.coverage.entry(key.to_string()).or_default() += by;
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct VerifyReport {
    pub suites: Vec<SuiteReport>,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.suites.iter().all(SuiteReport::passed)
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for s in &self.suites {
            let verdict = if s.passed() { "PASS" } else { "FAIL" };
            let _ = writeln!(
                out,
                "{verdict} {:<20} seed={} instances={} failures={}",
                s.property, s.seed, s.instances, s.failures
            );
            if !s.coverage.is_empty() {
                let stats: Vec<String> = s.coverage.iter().map(|(k, v)| format!("{k}={v}")).collect();
                let _ = writeln!(out, "     coverage: {}", stats.join(" "));
            }
            for c in &s.counterexamples {
                let _ = writeln!(out, "     counterexample: {}", c.replace('\n', "\n       "));
            }
        }
        let passed = self.suites.iter().filter(|s| s.passed()).count();
        let _ = writeln!(out, "{passed}/{} suites passed", self.suites.len());
        out
    }

    /// One JSON object per line, one line per property.
    pub fn to_records(&self) -> String {
        let mut out = String::new();
        for s in &self.suites {
            out.push_str(&serde_json::to_string(s).expect("serializable report"));
            out.push('\n');
        }
        out
    }
}

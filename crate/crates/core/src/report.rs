//! Pass/fail reports for checks whose failures are data, not errors.

use std::fmt;

use serde::Serialize;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    /// Located failures (offending strata, pairs, entries).
    pub details: Vec<String>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct Report {
    pub checks: Vec<Check>,
}

impl Report {
    pub fn new() -> Self {
        Self::default()
    }

    /// Records a check; it passes iff `failures` is empty.
    pub fn record(&mut self, name: impl Into<String>, failures: Vec<String>) {
        self.checks.push(Check {
            name: name.into(),
            passed: failures.is_empty(),
            details: failures,
        });
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }

    /// True if the named check exists and passed.
    pub fn check_passed(&self, name: &str) -> bool {
        self.check(name).map_or(false, |c| c.passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = (&str, &str)> {
        self.checks
            .iter()
            .flat_map(|c| c.details.iter().map(move |d| (c.name.as_str(), d.as_str())))
    }

    pub fn merge(&mut self, other: Report) {
        self.checks.extend(other.checks);
    }
}

impl fmt::Display for Report {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.checks {
            writeln!(f, "{} {}", if c.passed { "PASS" } else { "FAIL" }, c.name)?;
            for d in &c.details {
                writeln!(f, "    {d}")?;
            }
        }
        Ok(())
    }
}

use std::fmt;

/// One named check with an optional witness describing the first failure.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Check {
    pub name: &'static str,
    pub passed: bool,
    pub witness: Option<String>,
}

/// Failures are data: validators never error, they report.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ValidationReport {
    pub checks: Vec<Check>,
}

impl ValidationReport {
    pub fn record(&mut self, name: &'static str, witness: Option<String>) {
        self.checks.push(Check {
            name,
            passed: witness.is_none(),
            witness,
        });
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.passed)
    }

    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn extend(&mut self, other: ValidationReport) {
        self.checks.extend(other.checks);
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.checks {
            match &c.witness {
                None => writeln!(f, "  {}: pass", c.name)?,
                Some(w) => writeln!(f, "  {}: FAIL at {w}", c.name)?,
            }
        }
        Ok(())
    }
}

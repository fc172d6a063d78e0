//! Report type shared by every validator.

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Severity {
    Warning,
    Violation,
}

/// One finding: which condition was checked, and the offending witness.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Issue {
    pub severity: Severity,
    pub condition: String,
    pub detail: String,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ValidationReport {
    pub issues: Vec<Issue>,
}

impl ValidationReport {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn violation(&mut self, condition: impl Into<String>, detail: impl Into<String>) {
        self.issues.push(Issue {
            severity: Severity::Violation,
            condition: condition.into(),
            detail: detail.into(),
        });
    }

    pub fn warning(&mut self, condition: impl Into<String>, detail: impl Into<String>) {
        self.issues.push(Issue {
            severity: Severity::Warning,
            condition: condition.into(),
            detail: detail.into(),
        });
    }

    /// No violations (warnings allowed).
    pub fn is_ok(&self) -> bool {
        self.violations().next().is_none()
    }

    /// Neither violations nor warnings.
    pub fn is_empty(&self) -> bool {
        self.issues.is_empty()
    }

    pub fn violations(&self) -> impl Iterator<Item = &Issue> {
        self.issues
            .iter()
            .filter(|i| i.severity == Severity::Violation)
    }

    pub fn warnings(&self) -> impl Iterator<Item = &Issue> {
        self.issues.iter().filter(|i| i.severity == Severity::Warning)
    }

    /// True if some violation was recorded under `condition`.
    pub fn fails(&self, condition: &str) -> bool {
        self.violations().any(|i| i.condition == condition)
    }

    pub fn extend(&mut self, other: ValidationReport) {
        self.issues.extend(other.issues);
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.issues.is_empty() {
            return write!(f, "ok");
        }
        for (i, issue) in self.issues.iter().enumerate() {
            if i > 0 {
                writeln!(f)?;
            }
            let tag = match issue.severity {
                Severity::Warning => "warning",
                Severity::Violation => "violation",
            };
            write!(f, "{tag} [{}]: {}", issue.condition, issue.detail)?;
        }
        Ok(())
    }
}

//! Outcome records shared by every verification routine.

use serde::{Deserialize, Serialize};

/// One labeled scalar attached to a certificate.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Diagnostic {
    pub label: String,
    pub value: f64,
}

/// Result of checking an inequality `lhs <= rhs` (up to a stated slack).
///
/// Checks that only count violations use `lhs = violations`, `rhs = 0`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Certificate {
    pub lhs: f64,
    pub rhs: f64,
    pub margin: f64,
    pub passed: bool,
    #[serde(default)]
    pub diagnostics: Vec<Diagnostic>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
}

impl Certificate {
    /// Certificate for `lhs <= rhs + slack`.
    pub fn inequality(lhs: f64, rhs: f64, slack: f64) -> Self {
        Self {
            lhs,
            rhs,
            margin: rhs - lhs,
            passed: lhs <= rhs + slack,
            diagnostics: Vec::new(),
            notes: Vec::new(),
        }
    }

    /// Certificate for a violation count that must be zero.
    pub fn violations(count: usize) -> Self {
        Self::inequality(count as f64, 0.0, 0.0)
    }

    pub fn with(mut self, label: impl Into<String>, value: f64) -> Self {
        self.push(label, value);
        self
    }

    pub fn push(&mut self, label: impl Into<String>, value: f64) {
        self.diagnostics.push(Diagnostic {
            label: label.into(),
            value,
        });
    }

    pub fn note(mut self, note: impl Into<String>) -> Self {
        self.notes.push(note.into());
        self
    }

    /// Marks the certificate failed without touching lhs/rhs; used when a
    /// gating sub-check (e.g. a pointwise hypothesis) fails.
    pub fn gate(mut self, ok: bool, label: &str) -> Self {
        self.push(label, if ok { 1.0 } else { 0.0 });
        if !ok {
            self.passed = false;
        }
        self
    }

    pub fn get(&self, label: &str) -> Option<f64> {
        self.diagnostics
            .iter()
            .find(|d| d.label == label)
            .map(|d| d.value)
    }

    /// Relative margin `(rhs - lhs) / |rhs|`.
    pub fn relative_margin(&self) -> f64 {
        if self.rhs == 0.0 {
            self.margin
        } else {
            self.margin / self.rhs.abs()
        }
    }
}

//! Structured pass/fail records and their serialization.
//!
//! Every certification routine in the crate emits [`CheckReport`] values.
//! The JSON layout is versioned through the `schema` field and kept
//! deterministic: struct field order is fixed, collections are sorted by the
//! caller, and no timestamps or durations ever enter the payload, so repeated
//! runs are byte-identical.

use serde::{Deserialize, Serialize};

/// Version tag for every serialized report.
pub const REPORT_SCHEMA: &str = "newspace.report/1";

/// Identifying inputs of one check.
#[derive(Clone, Debug, Default, Serialize, Deserialize, PartialEq, Eq)]
pub struct CheckInputs {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub level: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub weight: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub p: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub primes: Option<Vec<u64>>,
}

impl CheckInputs {
    pub fn local(p: u64, n: u32) -> Self {
        CheckInputs { p: Some(p), n: Some(n), ..Default::default() }
    }

    pub fn level(level: u32, weight: u32) -> Self {
        CheckInputs { level: Some(level), weight: Some(weight), ..Default::default() }
    }

    pub fn with_p(mut self, p: u64) -> Self {
        self.p = Some(p);
        self
    }

    pub fn with_primes(mut self, primes: Vec<u64>) -> Self {
        self.primes = Some(primes);
        self
    }
}

/// Pass/fail record for one certified identity.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CheckReport {
    pub id: String,
    pub inputs: CheckInputs,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub left_dim: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub right_dim: Option<usize>,
    pub pass: bool,
    pub detail: String,
    /// Basis vector of the symmetric difference on a failed subspace check.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<Vec<String>>,
}

impl CheckReport {
    pub fn identity(id: impl Into<String>, inputs: CheckInputs, pass: bool, detail: impl Into<String>) -> Self {
        CheckReport {
            id: id.into(),
            inputs,
            left_dim: None,
            right_dim: None,
            pass,
            detail: detail.into(),
            witness: None,
        }
    }

    pub fn subspaces(
        id: impl Into<String>,
        inputs: CheckInputs,
        left_dim: usize,
        right_dim: usize,
        pass: bool,
        detail: impl Into<String>,
    ) -> Self {
        CheckReport {
            id: id.into(),
            inputs,
            left_dim: Some(left_dim),
            right_dim: Some(right_dim),
            pass,
            detail: detail.into(),
            witness: None,
        }
    }

    pub fn with_witness(mut self, witness: Vec<String>) -> Self {
        self.witness = Some(witness);
        self
    }
}

/// A batch of checks under one schema header.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ReportSet {
    pub schema: String,
    pub checks: Vec<CheckReport>,
}

impl ReportSet {
    pub fn new(checks: Vec<CheckReport>) -> Self {
        ReportSet { schema: REPORT_SCHEMA.to_string(), checks }
    }

    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn to_json(&self) -> String {
        // serde_json with struct ordering is deterministic.
        serde_json::to_string_pretty(self).expect("report serialization cannot fail")
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for c in &self.checks {
            let dims = match (c.left_dim, c.right_dim) {
                (Some(l), Some(r)) => format!(" dims=({l}, {r})"),
                _ => String::new(),
            };
            out.push_str(&format!(
                "{} {}{} — {}\n",
                if c.pass { "PASS" } else { "FAIL" },
                c.id,
                dims,
                c.detail
            ));
        }
        out
    }
}

/// A rectangular table (eigenvalue tables, dimension grids) for CSV output.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TableReport {
    pub title: String,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl TableReport {
    /// When the table carries a `verified` column, every row must say so.
    pub fn all_verified(&self) -> bool {
        match self.columns.iter().position(|c| c == "verified") {
            None => true,
            Some(i) => self.rows.iter().all(|r| r.get(i).map(String::as_str) == Some("true")),
        }
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        out.push_str(&self.columns.join(","));
        out.push('\n');
        for row in &self.rows {
            out.push_str(&row.join(","));
            out.push('\n');
        }
        out
    }

    pub fn to_text(&self) -> String {
        let mut out = format!("{}\n", self.title);
        out.push_str(&self.columns.join("\t"));
        out.push('\n');
        for row in &self.rows {
            out.push_str(&row.join("\t"));
            out.push('\n');
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn json_is_deterministic_and_versioned() {
        let make = || {
            ReportSet::new(vec![CheckReport::subspaces(
                "demo",
                CheckInputs::level(22, 2).with_p(11),
                2,
                2,
                true,
                "example",
            )])
        };
        let a = make().to_json();
        let b = make().to_json();
        assert_eq!(a, b);
        assert!(a.contains(REPORT_SCHEMA));
        let parsed: ReportSet = serde_json::from_str(&a).unwrap();
        assert!(parsed.all_pass());
    }

    #[test]
    fn text_rendering_marks_failures() {
        let set = ReportSet::new(vec![CheckReport::identity(
            "bad",
            CheckInputs::local(2, 2),
            false,
            "left != right",
        )]);
        assert!(set.to_text().starts_with("FAIL bad"));
        assert!(!set.all_pass());
    }
}

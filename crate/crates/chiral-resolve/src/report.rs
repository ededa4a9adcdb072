//! Structured verification reports.
//!
//! One report per claim checked: a name, the parameters, and a list of
//! cells comparing an expected value against a computed one. Reports
//! serialize to single JSON lines so that report files diff cleanly.

use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::fmt;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Cell {
    pub key: String,
    pub expected: String,
    pub computed: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub check_name: String,
    pub parameters: BTreeMap<String, String>,
    pub status: Status,
    pub cells: Vec<Cell>,
    pub first_mismatch: Option<Cell>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub timestamp: Option<u64>,
}

impl VerificationReport {
    pub fn passed(&self) -> bool {
        self.status == Status::Pass
    }

    pub fn to_json_line(&self) -> String {
        serde_json::to_string(self).expect("report serialization cannot fail")
    }

    pub fn render_table(&self) -> String {
        let mut out = String::new();
        let params: Vec<String> =
            self.parameters.iter().map(|(k, v)| format!("{k}={v}")).collect();
        out.push_str(&format!(
            "[{}] {} ({})\n",
            match self.status {
                Status::Pass => "pass",
                Status::Fail => "FAIL",
            },
            self.check_name,
            params.join(", ")
        ));
        if let Some(cell) = &self.first_mismatch {
            out.push_str(&format!(
                "    first mismatch at {}: expected {}, computed {}\n",
                cell.key, cell.expected, cell.computed
            ));
        }
        out
    }
}

/// Collects cells and derives the status.
pub struct ReportBuilder {
    check_name: String,
    parameters: BTreeMap<String, String>,
    cells: Vec<Cell>,
}

impl ReportBuilder {
    pub fn new(check_name: impl Into<String>) -> Self {
        ReportBuilder { check_name: check_name.into(), parameters: BTreeMap::new(), cells: Vec::new() }
    }

    pub fn param(mut self, key: impl Into<String>, value: impl fmt::Display) -> Self {
        self.parameters.insert(key.into(), value.to_string());
        self
    }

    pub fn cell(&mut self, key: impl Into<String>, expected: impl fmt::Display, computed: impl fmt::Display) {
        self.cells.push(Cell {
            key: key.into(),
            expected: expected.to_string(),
            computed: computed.to_string(),
        });
    }

    pub fn finish(self) -> VerificationReport {
        let first_mismatch = self.cells.iter().find(|c| c.expected != c.computed).cloned();
        VerificationReport {
            check_name: self.check_name,
            parameters: self.parameters,
            status: if first_mismatch.is_none() { Status::Pass } else { Status::Fail },
            cells: self.cells,
            first_mismatch,
            timestamp: None,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn status_follows_cells() {
        let mut b = ReportBuilder::new("demo").param("m", 1);
        b.cell("E=0", 1, 1);
        b.cell("E=1", 0, 0);
        let r = b.finish();
        assert!(r.passed());
        assert!(r.first_mismatch.is_none());

        let mut b = ReportBuilder::new("demo");
        b.cell("E=0", 1, 2);
        let r = b.finish();
        assert!(!r.passed());
        assert_eq!(r.first_mismatch.as_ref().unwrap().key, "E=0");
    }

    #[test]
    fn json_round_trip() {
        let mut b = ReportBuilder::new("roundtrip").param("cutoff", 10);
        b.cell("E=2", 1, 1);
        let mut r = b.finish();
        r.timestamp = Some(123);
        let line = r.to_json_line();
        let back: VerificationReport = serde_json::from_str(&line).unwrap();
        assert_eq!(back, r);
        // timestamp field disappears when suppressed
        r.timestamp = None;
        assert!(!r.to_json_line().contains("timestamp"));
    }
}

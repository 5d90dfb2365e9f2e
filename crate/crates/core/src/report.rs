//! Pass/fail tallies shared by the empirical checks.

use serde::{Deserialize, Serialize};

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Verdict {
    pub checked: usize,
    pub passed: usize,
    pub skipped_incomplete: usize,
    /// Human-readable descriptions of failing cases.
    pub witnesses: Vec<String>,
}

impl Verdict {
    pub fn record(&mut self, ok: bool, witness: impl FnOnce() -> String) {
        self.checked += 1;
        if ok {
            self.passed += 1;
        } else {
            self.witnesses.push(witness());
        }
    }

    pub fn skip(&mut self) {
        self.skipped_incomplete += 1;
    }

    pub fn ok(&self) -> bool {
        self.passed == self.checked
    }

    pub fn merge(&mut self, other: Verdict) {
        self.checked += other.checked;
        self.passed += other.passed;
        self.skipped_incomplete += other.skipped_incomplete;
        self.witnesses.extend(other.witnesses);
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("serializable")
    }
}

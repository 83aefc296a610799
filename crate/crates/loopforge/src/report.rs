//! Self-describing experiment reports.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::stats::TestResult;

/// How replicate generators are derived from the master seed.
pub const SEED_RULE: &str = "replicate i of arm a draws from stream(derive_seed(seed, a), i)";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub name: String,
    pub parameters: serde_json::Value,
    pub replicates: u64,
    pub statistics: serde_json::Value,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub test_result: Option<TestResult>,
    pub thresholds: BTreeMap<String, f64>,
    pub checks: Vec<Check>,
    pub flags: Vec<String>,
    pub passed: bool,
    pub seed: u64,
    pub seed_rule: String,
}

impl ExperimentReport {
    pub fn new(name: &str, parameters: &impl Serialize, seed: u64) -> Self {
        ExperimentReport {
            name: name.into(),
            parameters: serde_json::to_value(parameters).expect("serialisable parameters"),
            replicates: 0,
            statistics: serde_json::Value::Null,
            test_result: None,
            thresholds: BTreeMap::new(),
            checks: Vec::new(),
            flags: Vec::new(),
            passed: true,
            seed,
            seed_rule: SEED_RULE.into(),
        }
    }

    pub fn threshold(&mut self, name: &str, value: f64) {
        self.thresholds.insert(name.into(), value);
    }

    pub fn check(&mut self, name: &str, passed: bool, detail: impl Into<String>) {
        self.passed &= passed;
        self.checks.push(Check { name: name.into(), passed, detail: detail.into() });
    }

    pub fn flag(&mut self, f: impl Into<String>) {
        self.flags.push(f.into());
    }

    pub fn set_statistics(&mut self, s: &impl Serialize) {
        self.statistics = serde_json::to_value(s).expect("serialisable statistics");
    }

    pub fn failed_checks(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.passed)
    }
}

//! Structured verification outcomes.

use serde::{Deserialize, Serialize};
use serde_json::Value;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CheckStatus {
    /// A deterministic invariant held.
    Pass,
    /// A deterministic invariant was violated; always a hard failure.
    Fail,
    /// A statistical observation; recorded, never fatal.
    Statistical,
}

/// Outcome of one property check. Every field is always serialized so report
/// consumers see a fixed shape.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct VerificationReport {
    pub property: String,
    pub status: CheckStatus,
    pub value: Value,
    pub witness: Value,
    pub params: Value,
    pub seed: Option<u64>,
    pub elapsed_ms: u64,
}

impl VerificationReport {
    pub fn new(property: impl Into<String>, status: CheckStatus) -> Self {
        VerificationReport {
            property: property.into(),
            status,
            value: Value::Null,
            witness: Value::Null,
            params: Value::Null,
            seed: None,
            elapsed_ms: 0,
        }
    }

    pub fn with_value(mut self, value: Value) -> Self {
        self.value = value;
        self
    }

    pub fn with_witness(mut self, witness: Value) -> Self {
        self.witness = witness;
        self
    }

    pub fn with_params(mut self, params: Value) -> Self {
        self.params = params;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = Some(seed);
        self
    }

    pub fn with_elapsed_ms(mut self, ms: u64) -> Self {
        self.elapsed_ms = ms;
        self
    }

    pub fn is_hard_fail(&self) -> bool {
        self.status == CheckStatus::Fail
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn serializes_all_keys() {
        let r = VerificationReport::new("linearity", CheckStatus::Pass);
        let json = serde_json::to_value(&r).unwrap();
        for key in ["property", "status", "value", "witness", "params", "seed", "elapsed_ms"] {
            assert!(json.get(key).is_some(), "missing {key}");
        }
        assert_eq!(json["status"], "pass");
    }
}

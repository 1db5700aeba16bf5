//! Uniform pass/fail reports for the verification suites.

use serde::Serialize;
use serde_json::Value;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
}

/// `{claim, instance, status, witness?, counterexample?}`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Report {
    pub claim: String,
    pub instance: String,
    pub status: Status,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<Value>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub counterexample: Option<Value>,
}

impl Report {
    pub fn pass(claim: impl Into<String>, instance: impl Into<String>, witness: Value) -> Self {
        Report {
            claim: claim.into(),
            instance: instance.into(),
            status: Status::Pass,
            witness: Some(witness),
            counterexample: None,
        }
    }

    pub fn fail(
        claim: impl Into<String>,
        instance: impl Into<String>,
        counterexample: Value,
    ) -> Self {
        Report {
            claim: claim.into(),
            instance: instance.into(),
            status: Status::Fail,
            witness: None,
            counterexample: Some(counterexample),
        }
    }

    /// Pass with `witness` when `ok`, otherwise fail with `counterexample`.
    pub fn check(
        ok: bool,
        claim: impl Into<String>,
        instance: impl Into<String>,
        witness: Value,
        counterexample: Value,
    ) -> Self {
        if ok {
            Self::pass(claim, instance, witness)
        } else {
            Self::fail(claim, instance, counterexample)
        }
    }

    pub fn passed(&self) -> bool {
        self.status == Status::Pass
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn report_shape() {
        let r = Report::pass("claim", "p=2", json!({"n": 1}));
        assert_eq!(
            serde_json::to_value(&r).unwrap(),
            json!({"claim": "claim", "instance": "p=2", "status": "pass", "witness": {"n": 1}})
        );
        let f = Report::check(false, "c", "i", json!(null), json!([1]));
        assert!(!f.passed());
        assert_eq!(
            serde_json::to_value(&f).unwrap()["counterexample"],
            json!([1])
        );
    }
}

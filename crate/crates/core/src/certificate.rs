//! The JSON certificate: a ledger plus enough context to re-check it offline.

use serde::{Deserialize, Serialize};

use crate::arith::PrecisionPolicy;
use crate::error::{Error, Result};
use crate::pipeline::{BoundLedger, PhaseTiming};
use crate::recurrence::ProblemSpec;
use crate::search::SolutionTuple;

/// Bumped whenever a field changes meaning.
pub const SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "state")]
pub enum Status {
    Complete,
    Failed { error: String },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Certificate {
    pub schema_version: u32,
    pub tool: String,
    pub tool_version: String,
    pub command: String,
    pub precision_ceiling_bits: u32,
    pub spec: Option<ProblemSpec>,
    pub status: Status,
    pub solutions: Vec<SolutionTuple>,
    pub ledger: BoundLedger,
    /// Wall-clock milliseconds per phase. Off by default so that reruns are byte-identical.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub timings: Option<Vec<PhaseTiming>>,
}

impl Certificate {
    pub fn new(command: &str, policy: &PrecisionPolicy, spec: Option<ProblemSpec>, ledger: BoundLedger) -> Self {
        Certificate {
            schema_version: SCHEMA_VERSION,
            tool: "recsum".to_string(),
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            command: command.to_string(),
            precision_ceiling_bits: policy.ceiling_bits,
            spec,
            status: Status::Complete,
            solutions: Vec::new(),
            ledger,
            timings: None,
        }
    }

    pub fn with_solutions(mut self, solutions: Vec<SolutionTuple>) -> Self {
        self.solutions = solutions;
        self
    }

    pub fn failed(mut self, error: &Error) -> Self {
        self.status = Status::Failed { error: error.to_string() };
        self
    }

    pub fn with_timings(mut self, timings: Vec<PhaseTiming>) -> Self {
        self.timings = Some(timings);
        self
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("certificate serializes");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let cert: Certificate = serde_json::from_str(text).map_err(|e| Error::Invalid(format!("certificate: {e}")))?;
        if cert.schema_version != SCHEMA_VERSION {
            return Err(Error::Invalid(format!(
                "certificate schema {} is not supported (expected {SCHEMA_VERSION})",
                cert.schema_version
            )));
        }
        Ok(cert)
    }

    /// Re-check every solution and replay the ledger under the recorded ceiling.
    pub fn validate(&self) -> Result<()> {
        if let Some(bad) = self.solutions.iter().find(|s| !s.verify()) {
            return Err(Error::Invalid(format!("{bad} does not satisfy the equation")));
        }
        self.ledger.replay(&PrecisionPolicy::with_ceiling(self.precision_ceiling_bits))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pipeline::{Check, LedgerStep, StepOutput};
    use crate::search::enumerate_box;

    #[test]
    fn json_round_trip() {
        let mut ledger = BoundLedger::new("certified");
        ledger.push(LedgerStep::new(
            "box",
            "all solutions with n_1 <= 12",
            "finite search",
            StepOutput::Solutions(enumerate_box(12)),
            Check::Enumeration { n_max: 12 },
        ));
        let cert = Certificate::new("enumerate", &PrecisionPolicy::default(), Some(ProblemSpec::fibonacci_2_3()), ledger)
            .with_solutions(enumerate_box(12));
        let text = cert.to_json();
        let back = Certificate::from_json(&text).unwrap();
        assert_eq!(back, cert);
        assert_eq!(back.to_json(), text);
        back.validate().unwrap();
        assert!(!text.contains("timings"));
    }

    #[test]
    fn rejects_other_schemas() {
        let cert = Certificate::new("x", &PrecisionPolicy::default(), None, BoundLedger::new("f64"));
        let text = cert.to_json().replace("\"schema_version\": 1", "\"schema_version\": 99");
        assert!(Certificate::from_json(&text).is_err());
    }
}

use serde::{Deserialize, Serialize};
use serde_json::Value;
use sha2::{Digest, Sha256};

/// Top-level verdict of a command.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Outcome {
    Pass,
    Fail,
    Feasible,
    Infeasible,
    Value,
    /// Usage error, bad input, or a refused sweep.
    Error,
}

impl Outcome {
    pub fn exit_code(self) -> i32 {
        match self {
            Outcome::Pass | Outcome::Feasible | Outcome::Value => 0,
            Outcome::Fail | Outcome::Infeasible => 1,
            Outcome::Error => 2,
        }
    }
}

/// The document every command prints. Rationals inside `payload` are
/// `"p/q"` strings.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub command: Vec<String>,
    /// SHA-256 over the arguments and the contents of every file read.
    pub inputs_digest: String,
    pub result: Outcome,
    pub payload: Value,
    pub stats: Value,
    /// Not covered by the determinism guarantee.
    pub duration_ms: u64,
}

impl Report {
    pub fn exit_code(&self) -> i32 {
        self.result.exit_code()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn from_json(text: &str) -> Result<Report, serde_json::Error> {
        serde_json::from_str(text)
    }

    /// Copy with the duration zeroed, for byte-level comparisons.
    pub fn without_timing(&self) -> Report {
        Report {
            duration_ms: 0,
            ..self.clone()
        }
    }
}

/// Accumulates everything a command reads.
pub struct Inputs {
    hasher: Sha256,
}

impl Inputs {
    pub fn new(argv: &[String]) -> Self {
        let mut hasher = Sha256::new();
        for a in argv {
            hasher.update(a.as_bytes());
            hasher.update([0u8]);
        }
        Inputs { hasher }
    }

    pub fn read(&mut self, path: &str) -> std::io::Result<String> {
        let text = std::fs::read_to_string(path)?;
        self.hasher.update(path.as_bytes());
        self.hasher.update([0u8]);
        self.hasher.update(text.as_bytes());
        self.hasher.update([0u8]);
        Ok(text)
    }

    pub fn digest(&self) -> String {
        self.hasher
            .clone()
            .finalize()
            .iter()
            .map(|b| format!("{b:02x}"))
            .collect()
    }
}

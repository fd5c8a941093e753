use qdouble::hopf::Check;
use qdouble::network::sha256_hex;
use qdouble::Error;
use serde::Serialize;
use std::collections::BTreeMap;
use std::path::Path;

#[derive(Clone, Debug, Serialize)]
pub struct Input {
    pub name: String,
    pub sha256: String,
}

impl Input {
    /// A built-in reference is hashed by its text, a file by its bytes.
    pub fn reference(name: &str) -> Self {
        Input { name: name.to_string(), sha256: sha256_hex(name.as_bytes()) }
    }

    pub fn file(path: &Path, bytes: &[u8]) -> Self {
        Input { name: path.display().to_string(), sha256: sha256_hex(bytes) }
    }
}

/// Everything a command reports. Only `timing` varies between identical runs.
#[derive(Clone, Debug, Serialize)]
pub struct RunReport {
    pub command: String,
    pub inputs: Vec<Input>,
    pub checks: Vec<Check>,
    pub results: serde_json::Value,
    pub errors: Vec<String>,
    pub pass: bool,
    pub timing: BTreeMap<String, f64>,
}

impl RunReport {
    pub fn new(command: &str) -> Self {
        RunReport {
            command: command.to_string(),
            inputs: Vec::new(),
            checks: Vec::new(),
            results: serde_json::Value::Null,
            errors: Vec::new(),
            pass: false,
            timing: BTreeMap::new(),
        }
    }

    pub fn finish(&mut self) {
        self.pass = self.errors.is_empty() && self.checks.iter().all(|c| c.pass);
    }

    /// Human-readable summary for stderr, 17 significant digits.
    pub fn summary(&self) -> String {
        let mut s = String::new();
        for c in &self.checks {
            let status = if c.pass { "ok  " } else { "FAIL" };
            s.push_str(&format!("{status} {} residual {:.16e} threshold {:.16e}\n", c.name, c.residual, c.threshold));
        }
        for e in &self.errors {
            s.push_str(&format!("error {e}\n"));
        }
        s.push_str(&format!("{}: {}\n", self.command, if self.pass { "pass" } else { "FAIL" }));
        s
    }
}

#[derive(Debug, Serialize)]
pub struct ErrorReport {
    pub command: String,
    pub error: ErrorBody,
    pub pass: bool,
}

#[derive(Debug, Serialize)]
pub struct ErrorBody {
    pub kind: &'static str,
    pub message: String,
}

pub fn error_kind(e: &Error) -> &'static str {
    match e {
        Error::ParentMismatch { .. } => "parent_mismatch",
        Error::InvalidInput(_) => "invalid_input",
        Error::InvalidGroup(_) => "invalid_group",
        Error::NotSemisimple(_) => "not_semisimple",
        Error::InvalidStar(_) => "invalid_star",
        Error::NotHopfSubalgebra(_) => "not_hopf_subalgebra",
        Error::NotSeparable(_) => "not_separable",
        Error::NotAugmented => "not_augmented",
        Error::Degenerate(_) => "degenerate",
        Error::Lattice(_) => "lattice",
        Error::UnsupportedConfiguration(_) => "unsupported_configuration",
        Error::TooLarge { .. } => "too_large",
        Error::ModelInconsistency(_) => "model_inconsistency",
        Error::UnknownRef(_) => "unknown_ref",
        Error::Io(_) => "io",
        Error::Json(_) => "parse",
    }
}

impl ErrorReport {
    pub fn new(command: &str, e: &Error) -> Self {
        ErrorReport {
            command: command.to_string(),
            error: ErrorBody { kind: error_kind(e), message: e.to_string() },
            pass: false,
        }
    }
}

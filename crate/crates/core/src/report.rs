//! Run reports: one JSON object per invocation.

use std::io::{self, Write};
use std::path::Path;

use serde::Serialize;
use serde_json::Value;

use crate::tolerance::Tolerances;

pub const SCHEMA_VERSION: &str = "1";

/// One checked property with its worst residual.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Property {
    pub id: String,
    pub description: String,
    pub passed: bool,
    pub cases: usize,
    pub max_residual: f64,
    pub tolerance: f64,
}

impl Property {
    pub fn new(id: &str, description: &str, tolerance: f64) -> Self {
        Self {
            id: id.into(),
            description: description.into(),
            passed: true,
            cases: 0,
            max_residual: 0.0,
            tolerance,
        }
    }

    /// Records a residual; the property fails once one exceeds the tolerance.
    pub fn record(&mut self, residual: f64) {
        self.cases += 1;
        if residual.is_nan() {
            self.max_residual = f64::INFINITY;
        } else {
            self.max_residual = self.max_residual.max(residual);
        }
        if residual.is_nan() || residual > self.tolerance {
            self.passed = false;
        }
    }

    /// Records a yes/no outcome as residual 0 or 1.
    pub fn record_ok(&mut self, ok: bool) {
        self.cases += 1;
        if !ok {
            self.max_residual = self.max_residual.max(1.0);
            self.passed = false;
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Report {
    pub schema_version: &'static str,
    pub command: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub suite: Option<String>,
    pub inputs: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    pub tolerances: Tolerances,
    pub passed: bool,
    pub properties: Vec<Property>,
    pub details: Value,
}

impl Report {
    pub fn new(command: &'static str, inputs: &[&Path], tolerances: Tolerances) -> Self {
        Self {
            schema_version: SCHEMA_VERSION,
            command,
            suite: None,
            inputs: inputs.iter().map(|p| p.display().to_string()).collect(),
            seed: None,
            tolerances,
            passed: true,
            properties: Vec::new(),
            details: Value::Null,
        }
    }

    pub fn push(&mut self, property: Property) {
        self.passed &= property.passed;
        self.properties.push(property);
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("reports serialize");
        s.push('\n');
        s
    }

    /// Writes to `out` atomically (temporary file and rename), or to stdout.
    pub fn write(&self, out: Option<&Path>) -> io::Result<()> {
        let text = self.to_json();
        match out {
            None => {
                let mut stdout = io::stdout().lock();
                stdout.write_all(text.as_bytes())?;
                stdout.flush()
            }
            Some(path) => {
                let dir = match path.parent() {
                    Some(p) if !p.as_os_str().is_empty() => p,
                    _ => Path::new("."),
                };
                let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
                tmp.write_all(text.as_bytes())?;
                tmp.as_file().sync_all()?;
                tmp.persist(path).map_err(|e| e.error)?;
                Ok(())
            }
        }
    }
}

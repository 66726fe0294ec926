use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use anyhow::Context;
use serde::{Deserialize, Serialize};
use serde_json::Value;

/// Record of one successful command: enough to rerun it exactly.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub command: String,
    /// Every flag with its resolved value (defaults included).
    pub flags: BTreeMap<String, Value>,
    pub seed: Option<u64>,
    pub artifacts: Vec<PathBuf>,
    pub version: String,
    pub duration_secs: f64,
}

impl RunManifest {
    pub fn new(command: &str, flags: &impl Serialize) -> Self {
        let flags = match serde_json::to_value(flags).expect("flags serialize") {
            Value::Object(map) => map.into_iter().collect(),
            other => panic!("flags must serialize to an object, got {other}"),
        };
        Self {
            command: command.into(),
            flags,
            seed: None,
            artifacts: Vec::new(),
            version: env!("CARGO_PKG_VERSION").into(),
            duration_secs: 0.0,
        }
    }

    /// Command line that reproduces the run.
    pub fn argv(&self) -> Vec<String> {
        let mut argv = vec![self.command.clone()];
        for (flag, value) in &self.flags {
            match value {
                Value::Null | Value::Bool(false) => {}
                Value::Bool(true) => argv.push(format!("--{flag}")),
                Value::String(s) => argv.extend([format!("--{flag}"), s.clone()]),
                other => argv.extend([format!("--{flag}"), other.to_string()]),
            }
        }
        argv
    }

    pub fn write(&self, path: &Path) -> anyhow::Result<()> {
        let json = serde_json::to_string_pretty(self)?;
        fs::write(path, json + "\n").with_context(|| format!("writing manifest {}", path.display()))
    }

    pub fn read(path: &Path) -> anyhow::Result<Self> {
        let text = fs::read_to_string(path).with_context(|| format!("reading manifest {}", path.display()))?;
        serde_json::from_str(&text).with_context(|| format!("parsing manifest {}", path.display()))
    }
}

/// `design.csv` → `design.csv.manifest.json`.
pub fn default_manifest_path(artifact: &Path) -> PathBuf {
    let mut name = artifact.as_os_str().to_owned();
    name.push(".manifest.json");
    PathBuf::from(name)
}

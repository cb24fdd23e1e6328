use std::path::PathBuf;
use std::time::{SystemTime, UNIX_EPOCH};

use serde::{Deserialize, Serialize};

use dirmod::dm::DmSessionConfig;
use dirmod::sweep::{TableConfig, TableSettings};

pub const MANIFEST_FILE: &str = "manifest.json";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum PatternSource {
    /// Analytic five-port antenna tabulated at `step_deg`.
    Synth {
        step_deg: f64,
    },
    File {
        path: PathBuf,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "command", rename_all = "kebab-case")]
pub enum RunSpec {
    Sweep {
        session: DmSessionConfig,
        step_deg: f64,
    },
    CompareSubsets {
        settings: TableSettings,
        configs: Vec<TableConfig>,
    },
}

/// Written next to every output set; `dirmod replay` re-runs it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub tool: String,
    pub version: String,
    pub timestamp_unix: u64,
    pub run: RunSpec,
    pub pattern: PatternSource,
    pub outputs: Vec<PathBuf>,
}

impl RunManifest {
    pub fn new(run: RunSpec, pattern: PatternSource, outputs: Vec<PathBuf>) -> Self {
        Self {
            tool: env!("CARGO_PKG_NAME").to_string(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            timestamp_unix: SystemTime::now().duration_since(UNIX_EPOCH).map_or(0, |d| d.as_secs()),
            run,
            pattern,
            outputs,
        }
    }
}

use std::path::{Path, PathBuf};

use anyhow::Context;
use serde::{Deserialize, Serialize};

use crate::args::Command;

/// Everything needed to reproduce a run bit for bit.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunManifest {
    pub tool: String,
    pub version: String,
    pub command: Command,
    pub step: Option<f64>,
    pub outputs: Vec<PathBuf>,
}

impl RunManifest {
    pub fn new(command: &Command, outputs: Vec<PathBuf>) -> Self {
        Self {
            tool: env!("CARGO_PKG_NAME").into(),
            version: env!("CARGO_PKG_VERSION").into(),
            command: command.clone(),
            step: command.step(),
            outputs,
        }
    }
}

pub fn load(path: &Path) -> anyhow::Result<RunManifest> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    serde_json::from_str(&text).with_context(|| format!("parsing manifest {}", path.display()))
}

pub fn save(path: &Path, m: &RunManifest) -> anyhow::Result<()> {
    let text = serde_json::to_string_pretty(m)?;
    std::fs::write(path, text + "\n").with_context(|| format!("writing {}", path.display()))
}

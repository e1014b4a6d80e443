use std::collections::BTreeMap;
use std::path::Path;

use anyhow::Context;
use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::failure::{Classify, CliResult};

pub const TOOL: &str = concat!("topoplan ", env!("CARGO_PKG_VERSION"));

/// Provenance written into every output file.
#[derive(Clone, Debug, Default, Serialize)]
pub struct Stamp {
    pub tool: String,
    pub command: String,
    /// Input role to `sha256:<hex>` of the file content.
    pub inputs: BTreeMap<String, String>,
    pub settings: BTreeMap<String, serde_json::Value>,
}

impl Stamp {
    pub fn new(command: &str) -> Self {
        Self { tool: TOOL.to_string(), command: command.to_string(), ..Default::default() }
    }

    pub fn input(&mut self, role: &str, content: &[u8]) {
        self.inputs.insert(role.to_string(), sha256(content));
    }

    pub fn setting(&mut self, key: &str, value: impl Serialize) {
        self.settings.insert(key.to_string(), serde_json::to_value(value).expect("settings serialize"));
    }

    /// Single `#` comment line for line-oriented formats.
    pub fn comment(&self) -> String {
        format!("# stamp {}\n", serde_json::to_string(self).expect("stamp serializes"))
    }
}

pub fn sha256(bytes: &[u8]) -> String {
    let digest = Sha256::digest(bytes);
    let hex: String = digest.iter().map(|b| format!("{b:02x}")).collect();
    format!("sha256:{hex}")
}

/// Reads an input file, recording its hash under `role`.
pub fn read_input(stamp: &mut Stamp, role: &str, path: &Path) -> CliResult<String> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {role} file {}", path.display())).input()?;
    stamp.input(role, text.as_bytes());
    Ok(text)
}

pub fn write_output(path: &Path, content: &str) -> CliResult {
    std::fs::write(path, content).with_context(|| format!("writing {}", path.display())).internal()
}

/// Pretty JSON with a trailing newline.
pub fn to_json(value: &impl Serialize) -> String {
    serde_json::to_string_pretty(value).expect("output serializes") + "\n"
}

/// Fails early when an output path's directory does not exist.
pub fn check_output(path: &Path) -> CliResult {
    match path.parent() {
        Some(dir) if !dir.as_os_str().is_empty() && !dir.is_dir() => {
            Err(crate::failure::Failure::input(format!("output directory {} does not exist", dir.display())))
        }
        _ => Ok(()),
    }
}

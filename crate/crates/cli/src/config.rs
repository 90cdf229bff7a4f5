//! JSON config files, value resolution and run headers.

use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::error::{CliError, Result};

/// Optional settings read from `--config`; command-line flags take precedence.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FileConfig {
    pub theorem: Option<String>,
    pub trials: Option<usize>,
    pub seed_start: Option<u64>,
    pub seed: Option<u64>,
    pub n: Option<u32>,
    pub d: Option<usize>,
    pub m: Option<usize>,
    pub m_max: Option<usize>,
    pub c_min: Option<f64>,
    pub kappa: Option<f64>,
    pub jitter_min: Option<f64>,
    pub jitter_max: Option<f64>,
    pub norm: Option<String>,
    pub q: Option<f64>,
    pub window: Option<String>,
    pub grid: Option<usize>,
    pub extent: Option<f64>,
    pub freq_extent: Option<f64>,
    pub angles: Option<usize>,
    pub pencil_rows: Option<usize>,
    pub tau: Option<f64>,
    pub pairs: Option<usize>,
    pub singles: Option<usize>,
}

impl FileConfig {
    pub fn load(path: Option<&Path>) -> Result<Self> {
        let Some(path) = path else { return Ok(Self::default()) };
        let text = read(path)?;
        serde_json::from_str(&text).map_err(|e| CliError::Config {
            path: path.to_path_buf(),
            message: format!("line {} column {}: {e}", e.line(), e.column()),
        })
    }
}

/// First of flag, file value and default.
pub fn pick<T>(flag: Option<T>, file: Option<T>, default: T) -> T {
    flag.or(file).unwrap_or(default)
}

/// First of flag and file value, or a usage error naming the setting.
pub fn require<T>(flag: Option<T>, file: Option<T>, name: &str) -> Result<T> {
    flag.or(file)
        .ok_or_else(|| CliError::Usage(format!("missing required setting `{name}` (flag or config file)")))
}

pub fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|source| CliError::Read {
        path: path.to_path_buf(),
        source,
    })
}

pub fn write(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text).map_err(|source| CliError::Write {
        path: path.to_path_buf(),
        source,
    })
}

/// Header shared by every output: command, resolved config, seeds, inputs.
#[derive(Debug, Clone)]
pub struct RunHeader {
    pub deterministic: bool,
    pub command: &'static str,
    pub config: Value,
    pub seeds: Vec<u64>,
    pub inputs: Vec<PathBuf>,
}

impl RunHeader {
    pub fn new(deterministic: bool, command: &'static str, config: Value) -> Self {
        Self {
            deterministic,
            command,
            config,
            seeds: Vec::new(),
            inputs: Vec::new(),
        }
    }

    fn display_path(&self, p: &Path) -> String {
        if self.deterministic {
            p.file_name().map_or_else(|| p.display().to_string(), |f| f.to_string_lossy().into_owned())
        } else {
            std::fs::canonicalize(p).unwrap_or_else(|_| p.to_path_buf()).display().to_string()
        }
    }

    pub fn to_json(&self) -> Value {
        let mut v = json!({
            "tool": "pronylab",
            "version": env!("CARGO_PKG_VERSION"),
            "command": self.command,
            "config": self.config,
            "seeds": self.seeds,
            "inputs": self.inputs.iter().map(|p| self.display_path(p)).collect::<Vec<_>>(),
        });
        if !self.deterministic {
            let secs = SystemTime::now().duration_since(UNIX_EPOCH).map_or(0, |d| d.as_secs());
            v["timestamp"] = json!(secs);
        }
        v
    }

    /// `# ` lines for CSV outputs.
    pub fn to_csv_comment(&self) -> String {
        pronylab::io::csv_comment(&format!("pronylab {}", serde_json::to_string(&self.to_json()).expect("header serializes")))
    }

    /// Leading JSON-lines record.
    pub fn to_jsonl_line(&self) -> String {
        format!("{}\n", json!({ "header": self.to_json() }))
    }
}

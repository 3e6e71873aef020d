//! The run manifest written next to every output, so a run can be reproduced
//! from the manifest alone.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunManifest {
    pub tool_version: String,
    pub command: String,
    pub seed: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub config_path: Option<PathBuf>,
    /// Input name -> path, sorted for stable serialization.
    pub inputs: BTreeMap<String, PathBuf>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub train_start: Option<chrono::NaiveDate>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub train_end: Option<chrono::NaiveDate>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub test_start: Option<chrono::NaiveDate>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub test_end: Option<chrono::NaiveDate>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    /// Fixed arm-to-strategy mapping, recorded for the reader.
    pub arm_strategy_map: BTreeMap<String, String>,
    pub out_dir: PathBuf,
}

impl RunManifest {
    pub fn new(command: &str, seed: u64, out_dir: &Path) -> Self {
        let mut arm_strategy_map = BTreeMap::new();
        arm_strategy_map.insert("A".to_string(), "popular".to_string());
        arm_strategy_map.insert("B".to_string(), "cf".to_string());
        arm_strategy_map.insert("C".to_string(), "random".to_string());
        Self {
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            command: command.to_string(),
            seed,
            config_path: None,
            inputs: BTreeMap::new(),
            train_start: None,
            train_end: None,
            test_start: None,
            test_end: None,
            alpha: None,
            arm_strategy_map,
            out_dir: out_dir.to_path_buf(),
        }
    }

    pub fn input(mut self, name: &str, path: &Path) -> Self {
        self.inputs.insert(name.to_string(), path.to_path_buf());
        self
    }

    pub fn write(&self, dir: &Path) -> std::io::Result<()> {
        let mut json = serde_json::to_string_pretty(self).expect("manifest serializes");
        json.push('\n');
        std::fs::write(dir.join("run_manifest.json"), json)
    }
}

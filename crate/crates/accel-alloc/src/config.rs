//! Tool configuration: hardware constants, level tables, and named budget
//! presets, loadable from a JSON file.
//!
//! Resolution order for the config file: an explicit `--config` path wins,
//! then the `ACCEL_ALLOC_CONFIG` environment variable, then built-in
//! defaults. Presets map a name to an area budget (null = unconstrained)
//! so runs can say `--preset iot` instead of repeating numbers.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::cost_model::HwConstants;
use crate::error::{Error, Result};
use crate::search_space::ActionLevels;

/// Environment variable consulted when no `--config` path is given.
pub const CONFIG_ENV_VAR: &str = "ACCEL_ALLOC_CONFIG";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ToolConfig {
    pub hw: HwConstants,
    pub pe_values: Vec<u64>,
    pub buf_values: Vec<u64>,
    /// Named area budgets; `None` means unconstrained.
    pub presets: BTreeMap<String, Option<f64>>,
}

impl Default for ToolConfig {
    fn default() -> ToolConfig {
        let levels = ActionLevels::default_levels();
        let mut presets = BTreeMap::new();
        presets.insert("cloud".to_string(), Some(600_000.0));
        presets.insert("iot".to_string(), Some(60_000.0));
        presets.insert("iotx".to_string(), Some(12_000.0));
        presets.insert("unconstrained".to_string(), None);
        ToolConfig {
            hw: HwConstants::default(),
            pe_values: levels.pe_values,
            buf_values: levels.buf_values,
            presets,
        }
    }
}

impl ToolConfig {
    pub fn levels(&self) -> Result<ActionLevels> {
        ActionLevels::new(self.pe_values.clone(), self.buf_values.clone())
    }

    /// Looks up a preset area budget by name.
    pub fn preset(&self, name: &str) -> Result<Option<f64>> {
        self.presets.get(name).copied().ok_or_else(|| {
            let known: Vec<&str> = self.presets.keys().map(String::as_str).collect();
            Error::InvalidConfig(format!(
                "unknown preset '{}' (known: {})",
                name,
                known.join(", ")
            ))
        })
    }

    pub fn parse(text: &str) -> Result<ToolConfig> {
        let cfg: ToolConfig =
            serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        cfg.levels()?; // validate tables up front
        for (name, budget) in &cfg.presets {
            if let Some(v) = budget {
                if !(*v > 0.0) {
                    return Err(Error::InvalidConfig(format!(
                        "preset '{}' must be positive or null, got {}",
                        name, v
                    )));
                }
            }
        }
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<ToolConfig> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        ToolConfig::parse(&text)
    }

    /// Applies the resolution order. `explicit` is the `--config` flag.
    pub fn resolve(explicit: Option<&Path>) -> Result<ToolConfig> {
        if let Some(path) = explicit {
            return ToolConfig::load(path);
        }
        if let Ok(path) = std::env::var(CONFIG_ENV_VAR) {
            if !path.is_empty() {
                return ToolConfig::load(Path::new(&path));
            }
        }
        Ok(ToolConfig::default())
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("config serialization cannot fail");
        s.push('\n');
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_are_usable() {
        let cfg = ToolConfig::default();
        cfg.levels().unwrap();
        assert_eq!(cfg.preset("iot").unwrap(), Some(60_000.0));
        assert_eq!(cfg.preset("unconstrained").unwrap(), None);
        assert!(cfg.preset("embedded").is_err());
    }

    #[test]
    fn partial_config_keeps_defaults_elsewhere() {
        let cfg = ToolConfig::parse(r#"{"pe_values": [1, 2, 4]}"#).unwrap();
        assert_eq!(cfg.pe_values, vec![1, 2, 4]);
        assert_eq!(cfg.buf_values.len(), 12);
        assert_eq!(cfg.hw, HwConstants::default());
    }

    #[test]
    fn hw_overrides_apply() {
        let cfg = ToolConfig::parse(r#"{"hw": {"bandwidth": 32.0}}"#).unwrap();
        assert_eq!(cfg.hw.bandwidth, 32.0);
        assert_eq!(cfg.hw.e_dram, HwConstants::default().e_dram);
    }

    #[test]
    fn bad_tables_rejected() {
        assert!(ToolConfig::parse(r#"{"pe_values": [4, 2]}"#).is_err());
        assert!(ToolConfig::parse(r#"{"presets": {"tiny": -3.0}}"#).is_err());
        assert!(matches!(
            ToolConfig::parse("not json"),
            Err(Error::Parse(_))
        ));
    }

    #[test]
    fn config_round_trips() {
        let cfg = ToolConfig::default();
        let back = ToolConfig::parse(&cfg.to_json()).unwrap();
        assert_eq!(cfg, back);
    }

    #[test]
    fn resolve_prefers_explicit_path() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("cfg.json");
        std::fs::write(&path, r#"{"pe_values": [1, 2]}"#).unwrap();
        let cfg = ToolConfig::resolve(Some(&path)).unwrap();
        assert_eq!(cfg.pe_values, vec![1, 2]);
        let missing = dir.path().join("nope.json");
        assert!(matches!(
            ToolConfig::resolve(Some(&missing)),
            Err(Error::Io { .. })
        ));
    }
}

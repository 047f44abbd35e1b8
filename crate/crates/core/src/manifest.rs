//! Provenance record written next to every CLI artifact.

use crate::geometry::{ChannelModel, NetworkModel};
use crate::metadist::QuadratureSpec;
use crate::simkit::SimulationConfig;
use serde::{Deserialize, Serialize};
use std::path::{Path, PathBuf};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub command: String,
    pub tool_version: String,
    pub seed: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub model: Option<NetworkModel>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub channel: Option<ChannelModel>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub quad: Option<QuadratureSpec>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sim: Option<SimulationConfig>,
    /// Anything else the command was given (grids, methods, flags).
    #[serde(default)]
    pub parameters: serde_json::Value,
    /// Seconds. Left out of anything embedded in an output so reruns stay
    /// byte-identical; present only in the sidecar file.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub wall_time: Option<f64>,
}

impl RunManifest {
    pub fn new(command: &str, seed: u64) -> Self {
        Self {
            command: command.into(),
            tool_version: env!("CARGO_PKG_VERSION").into(),
            seed,
            model: None,
            channel: None,
            quad: None,
            sim: None,
            parameters: serde_json::Value::Null,
            wall_time: None,
        }
    }

    /// Two runs with equal manifests (ignoring wall time) must produce
    /// equal outputs.
    pub fn same_run(&self, other: &Self) -> bool {
        Self { wall_time: None, ..self.clone() } == Self { wall_time: None, ..other.clone() }
    }

    pub fn sidecar_path(out: &Path) -> PathBuf {
        let mut s = out.as_os_str().to_owned();
        s.push(".manifest.json");
        PathBuf::from(s)
    }

    pub fn write_sidecar(&self, out: &Path) -> std::io::Result<PathBuf> {
        let p = Self::sidecar_path(out);
        let body = serde_json::to_string_pretty(self).map_err(std::io::Error::other)?;
        std::fs::write(&p, body + "\n")?;
        Ok(p)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sidecar_roundtrip() {
        let dir = tempfile::tempdir().unwrap();
        let out = dir.path().join("curve.csv");
        let mut m = RunManifest::new("curve", 7);
        m.model = Some(NetworkModel::Ppp { lambda: 1.0 });
        m.wall_time = Some(1.5);
        let p = m.write_sidecar(&out).unwrap();
        assert_eq!(p, dir.path().join("curve.csv.manifest.json"));
        let back: RunManifest = serde_json::from_str(&std::fs::read_to_string(p).unwrap()).unwrap();
        assert_eq!(back, m);
        assert!(back.same_run(&RunManifest { wall_time: Some(9.0), ..m.clone() }));
        assert!(!back.same_run(&RunManifest { seed: 8, ..m }));
    }
}

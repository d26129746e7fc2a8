//! Replay records written next to every output file.

use std::path::{Path, PathBuf};
use std::time::{Duration, SystemTime, UNIX_EPOCH};

use dris_core::simulate::SweepConfig;

use crate::config::render_config;

#[derive(Debug, Clone, PartialEq)]
pub struct RunManifest {
    /// Config file the run came from, if any.
    pub config_path: Option<PathBuf>,
    pub preset: Option<String>,
    pub config: SweepConfig,
    pub outputs: Vec<PathBuf>,
    pub tool_version: String,
    /// Seconds since the Unix epoch.
    pub timestamp: u64,
    pub wall_time: Duration,
}

impl RunManifest {
    pub fn new(config: SweepConfig) -> Self {
        Self {
            config_path: None,
            preset: None,
            config,
            outputs: Vec::new(),
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            timestamp: SystemTime::now()
                .duration_since(UNIX_EPOCH)
                .map_or(0, |d| d.as_secs()),
            wall_time: Duration::ZERO,
        }
    }

    /// The fully resolved config preceded by `manifest.*` metadata keys, which
    /// the config parser skips. Feeding the file to `--config` replays the run.
    pub fn render(&self) -> String {
        let mut out = String::new();
        let mut meta = |k: &str, v: String| out.push_str(&format!("manifest.{k} = {v}\n"));
        meta("tool_version", self.tool_version.clone());
        meta("timestamp", self.timestamp.to_string());
        meta("wall_time_s", format!("{:.3}", self.wall_time.as_secs_f64()));
        if let Some(p) = &self.config_path {
            meta("config_path", p.display().to_string());
        }
        if let Some(p) = &self.preset {
            meta("preset", p.clone());
        }
        meta(
            "outputs",
            self.outputs
                .iter()
                .map(|p| p.display().to_string())
                .collect::<Vec<_>>()
                .join(", "),
        );
        out.push('\n');
        out.push_str(&render_config(&self.config));
        out
    }

    pub fn write(&self, path: &Path) -> std::io::Result<()> {
        std::fs::write(path, self.render())
    }
}

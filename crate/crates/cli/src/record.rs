use std::path::{Path, PathBuf};
use std::time::Instant;

use ratchet_core::config::RunConfig;
use serde::Serialize;

use crate::settings::Sources;

/// One per invocation of `simulate` or `sweep`, written as `run_record.json`.
#[derive(Debug, Serialize)]
pub struct RunRecord {
    pub command: &'static str,
    pub status: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    pub sources: Sources,
    pub config: Option<RunConfig>,
    pub engine_version: &'static str,
    pub started_at: String,
    pub wall_clock_s: f64,
    pub outputs: Vec<PathBuf>,
    pub summary: serde_json::Value,
}

pub struct Recorder {
    command: &'static str,
    started: Instant,
    started_at: String,
    pub outputs: Vec<PathBuf>,
}

impl Recorder {
    pub fn start(command: &'static str) -> Self {
        Recorder {
            command,
            started: Instant::now(),
            started_at: chrono::Utc::now().to_rfc3339(),
            outputs: Vec::new(),
        }
    }

    pub fn finish(
        self,
        sources: Sources,
        config: Option<RunConfig>,
        outcome: Result<serde_json::Value, String>,
    ) -> RunRecord {
        let (status, error, summary) = match outcome {
            Ok(s) => ("ok", None, s),
            Err(e) => ("failed", Some(e), serde_json::Value::Null),
        };
        RunRecord {
            command: self.command,
            status,
            error,
            sources,
            config,
            engine_version: ratchet_core::ENGINE_VERSION,
            started_at: self.started_at,
            wall_clock_s: self.started.elapsed().as_secs_f64(),
            outputs: self.outputs,
            summary,
        }
    }
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> anyhow::Result<()> {
    let text = serde_json::to_string_pretty(value)?;
    std::fs::write(path, text + "\n")?;
    Ok(())
}

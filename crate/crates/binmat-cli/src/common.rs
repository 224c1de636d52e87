//! Shared CLI plumbing: exit-code mapping, output routing, and the run
//! manifest written alongside file outputs.

use std::fmt;
use std::fs;
use std::path::PathBuf;

use serde::Serialize;

/// Documented exit codes.
pub const EXIT_OK: i32 = 0;
pub const EXIT_INVALID: i32 = 1;
pub const EXIT_GUARD: i32 = 2;
pub const EXIT_USAGE: i32 = 64;

#[derive(Debug)]
pub struct CliError {
    pub message: String,
    pub code: i32,
}

impl CliError {
    pub fn usage(message: impl Into<String>) -> Self {
        Self {
            message: message.into(),
            code: EXIT_USAGE,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.message)
    }
}

impl From<binmat::Error> for CliError {
    fn from(e: binmat::Error) -> Self {
        let code = match &e {
            binmat::Error::GuardExceeded(_) => EXIT_GUARD,
            binmat::Error::DimensionOutOfRange { .. }
            | binmat::Error::InvalidArgument(_)
            | binmat::Error::MalformedReduction(_) => EXIT_USAGE,
            _ => EXIT_INVALID,
        };
        Self {
            message: e.to_string(),
            code,
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        Self {
            message: format!("i/o error: {e}"),
            code: EXIT_INVALID,
        }
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        Self {
            message: format!("bad JSON: {e}"),
            code: EXIT_USAGE,
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Table,
    Json,
    Csv,
}

#[derive(Serialize)]
struct RunManifest<'a> {
    command: &'a str,
    config: &'a serde_json::Value,
    seed: u64,
    tool_version: &'a str,
    started_at: &'a str,
    finished_at: String,
    outputs: &'a [String],
}

/// Collects the resolved configuration and any file outputs of one command
/// run; on `finish` a manifest is written next to the outputs. Machine
/// output goes only to `--out` paths; stdout stays human-readable.
pub struct Ctx {
    pub seed: u64,
    pub jobs: Option<usize>,
    pub format: Format,
    command: String,
    config: serde_json::Value,
    out_dir: Option<PathBuf>,
    outputs: Vec<String>,
    started_at: String,
}

impl Ctx {
    pub fn new(
        command: &str,
        config: serde_json::Value,
        seed: u64,
        jobs: Option<usize>,
        out_dir: Option<PathBuf>,
        format: Format,
    ) -> Self {
        Self {
            seed,
            jobs,
            format,
            command: command.to_string(),
            config,
            out_dir,
            outputs: Vec::new(),
            started_at: chrono::Utc::now().to_rfc3339(),
        }
    }

    pub fn has_out_dir(&self) -> bool {
        self.out_dir.is_some()
    }

    /// Writes `content` into the output directory (if one was requested)
    /// and records it for the manifest.
    pub fn write_output(&mut self, name: &str, content: &str) -> CliResult<()> {
        let Some(dir) = &self.out_dir else {
            return Ok(());
        };
        fs::create_dir_all(dir)?;
        fs::write(dir.join(name), content)?;
        self.outputs.push(name.to_string());
        Ok(())
    }

    /// Writes the manifest alongside the outputs. A no-op without --out.
    pub fn finish(self) -> CliResult<()> {
        let Some(dir) = &self.out_dir else {
            return Ok(());
        };
        fs::create_dir_all(dir)?;
        let manifest = RunManifest {
            command: &self.command,
            config: &self.config,
            seed: self.seed,
            tool_version: env!("CARGO_PKG_VERSION"),
            started_at: &self.started_at,
            finished_at: chrono::Utc::now().to_rfc3339(),
            outputs: &self.outputs,
        };
        fs::write(
            dir.join("manifest.json"),
            serde_json::to_string_pretty(&manifest)?,
        )?;
        Ok(())
    }
}

pub fn to_pretty_json<T: Serialize>(value: &T) -> CliResult<String> {
    Ok(serde_json::to_string_pretty(value)?)
}

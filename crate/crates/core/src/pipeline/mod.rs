//! Stage runner: configuration, on-disk layout, atomic outputs and the
//! run log.

mod config;
mod stages;
mod store;

use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use chrono::{DateTime, Utc};
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use config::{PipelineConfig, RawConfig, DEFAULT_RATE_LIMIT, DEFAULT_WORKERS};
pub use stages::{layout, CrawlLine, FIXTURE_EPOCH};
pub use store::{csv_bytes, file_digest, jsonl_bytes, read_jsonl, write_atomic, RunLock, LOCK_FILE};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Command {
    Crawl,
    Parse,
    IngestTweets,
    IngestLinks,
    Couple,
    Analyze,
    Report,
}

impl Command {
    pub const ALL: [Command; 7] = [
        Command::Crawl,
        Command::Parse,
        Command::IngestTweets,
        Command::IngestLinks,
        Command::Couple,
        Command::Analyze,
        Command::Report,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Command::Crawl => "crawl",
            Command::Parse => "parse",
            Command::IngestTweets => "ingest-tweets",
            Command::IngestLinks => "ingest-links",
            Command::Couple => "couple",
            Command::Analyze => "analyze",
            Command::Report => "report",
        }
    }
}

impl fmt::Display for Command {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Command {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Command::ALL
            .into_iter()
            .find(|c| c.name() == s)
            .ok_or_else(|| format!("unknown command {s:?}"))
    }
}

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error("{command}: missing {path}; run `{requires}` first")]
    MissingPrerequisite {
        command: Command,
        requires: Command,
        path: PathBuf,
    },
    #[error("{command}: no {what} configured (set `{key}` or use --fixtures)")]
    MissingInput {
        command: Command,
        what: &'static str,
        key: &'static str,
    },
    #[error("run directory is locked by another run ({0}); remove it if stale")]
    Locked(PathBuf),
    #[error("config: {0}")]
    Config(String),
    #[error(transparent)]
    Core(#[from] crate::Error),
}

impl PipelineError {
    fn stage(command: Command, e: impl Into<crate::Error>) -> PipelineError {
        PipelineError::Core(crate::Error::invalid(format!("{command}: {}", e.into())))
    }
}

/// One line of `runs.jsonl`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RunManifest {
    pub command: String,
    pub started_at: DateTime<Utc>,
    pub finished_at: DateTime<Utc>,
    pub input_digests: BTreeMap<String, String>,
    pub output_digests: BTreeMap<String, String>,
    pub counts: BTreeMap<String, u64>,
}

pub const RUN_LOG: &str = "runs.jsonl";

/// Runs one stage with exclusive ownership of the corpus directory and
/// appends its manifest to the run log.
pub fn run(command: Command, config: &PipelineConfig) -> Result<RunManifest, PipelineError> {
    let _lock = RunLock::acquire(&config.corpus_dir)?;
    let started_at = Utc::now();
    let mut ctx = stages::StageRun::new(config);
    match command {
        Command::Crawl => stages::crawl(&mut ctx)?,
        Command::Parse => stages::parse(&mut ctx)?,
        Command::IngestTweets => stages::ingest_tweets(&mut ctx)?,
        Command::IngestLinks => stages::ingest_links(&mut ctx)?,
        Command::Couple => stages::couple(&mut ctx)?,
        Command::Analyze => stages::analyze(&mut ctx)?,
        Command::Report => stages::report(&mut ctx)?,
    }
    let manifest = RunManifest {
        command: command.name().to_string(),
        started_at,
        finished_at: Utc::now(),
        input_digests: ctx.inputs,
        output_digests: ctx.outputs,
        counts: ctx.counts,
    };
    append_run_log(&config.corpus_dir, &manifest)?;
    Ok(manifest)
}

/// Runs every stage in order.
pub fn run_all(config: &PipelineConfig) -> Result<Vec<RunManifest>, PipelineError> {
    Command::ALL.into_iter().map(|c| run(c, config)).collect()
}

fn append_run_log(dir: &Path, manifest: &RunManifest) -> Result<(), crate::Error> {
    let path = dir.join(RUN_LOG);
    let mut bytes = match std::fs::read(&path) {
        Ok(b) => b,
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => Vec::new(),
        Err(e) => return Err(crate::Error::io(&path, e)),
    };
    bytes.extend(jsonl_bytes([manifest])?);
    write_atomic(&path, &bytes)
}

pub fn read_run_log(dir: &Path) -> Result<Vec<RunManifest>, crate::Error> {
    read_jsonl(&dir.join(RUN_LOG))
}

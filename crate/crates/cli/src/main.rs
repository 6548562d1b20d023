use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand};
use prmetrics::analytics::Granularity;
use prmetrics::pipeline::{self, Command, PipelineConfig, RawConfig, RunManifest};

/// Harvest a press-release site and compute its descriptive statistics.
#[derive(Parser, Debug)]
#[command(name = "prmetrics", version)]
struct Cli {
    /// Flat key = value configuration file.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[arg(long, global = true)]
    corpus_dir: Option<PathBuf>,
    #[arg(long, global = true)]
    report_dir: Option<PathBuf>,
    /// Minimum seconds between requests to one host.
    #[arg(long, global = true)]
    rate_limit: Option<f64>,
    /// Redirect hops followed when unshortening URLs.
    #[arg(long, global = true)]
    max_depth: Option<usize>,
    /// Recorded-response directory; no network access when set. A
    /// `pipeline.conf` inside it is loaded when --config is absent.
    #[arg(long, global = true)]
    fixtures: Option<PathBuf>,
    #[arg(long, global = true)]
    granularity: Option<Granularity>,
    /// Crawl root, e.g. www.eurekalert.org/pub_releases/
    #[arg(long, global = true)]
    seed_path: Option<String>,
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    verbose: u8,
    #[command(subcommand)]
    command: Stage,
}

#[derive(Subcommand, Debug, Clone, Copy)]
enum Stage {
    /// Fetch every page under the seed path.
    Crawl,
    /// Extract release records from crawled pages.
    Parse,
    /// Unshorten and match tweet URLs against the corpus.
    IngestTweets,
    /// Merge and attach backlink aggregates.
    IngestLinks,
    /// Build release-DOI couplings and journal coverage.
    Couple,
    /// Write the statistics reports.
    Analyze,
    /// Render summary.md from the reports.
    Report,
    /// Run every stage in order.
    All,
}

impl Stage {
    fn commands(self) -> Vec<Command> {
        match self {
            Stage::Crawl => vec![Command::Crawl],
            Stage::Parse => vec![Command::Parse],
            Stage::IngestTweets => vec![Command::IngestTweets],
            Stage::IngestLinks => vec![Command::IngestLinks],
            Stage::Couple => vec![Command::Couple],
            Stage::Analyze => vec![Command::Analyze],
            Stage::Report => vec![Command::Report],
            Stage::All => Command::ALL.to_vec(),
        }
    }
}

fn build_config(cli: &Cli) -> Result<PipelineConfig> {
    let mut raw = match (&cli.config, &cli.fixtures) {
        (Some(path), _) => RawConfig::load(path)?,
        (None, Some(dir)) if dir.join("pipeline.conf").is_file() => {
            RawConfig::load(&dir.join("pipeline.conf"))?
        }
        _ => RawConfig::default(),
    };
    let path_str = |p: &PathBuf| p.to_string_lossy().into_owned();
    if let Some(p) = &cli.corpus_dir {
        raw.set("corpus_dir", path_str(p))?;
    }
    if let Some(p) = &cli.report_dir {
        raw.set("report_dir", path_str(p))?;
    }
    if let Some(r) = cli.rate_limit {
        raw.set("rate_limit", r.to_string())?;
    }
    if let Some(d) = cli.max_depth {
        raw.set("max_depth", d.to_string())?;
    }
    if let Some(p) = &cli.fixtures {
        raw.set("fixtures", path_str(p))?;
    }
    if let Some(g) = cli.granularity {
        raw.set("granularity", g.to_string())?;
    }
    if let Some(s) = &cli.seed_path {
        raw.set("seed_path", s.clone())?;
    }
    Ok(PipelineConfig::from_raw(&raw)?)
}

fn print_manifest(m: &RunManifest) {
    let counts: Vec<String> = m.counts.iter().map(|(k, v)| format!("{k}={v}")).collect();
    println!(
        "{}: {} outputs; {}",
        m.command,
        m.output_digests.len(),
        counts.join(" ")
    );
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let level = match cli.verbose {
        0 => "warn",
        1 => "info",
        _ => "debug",
    };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level)).init();

    let result = build_config(&cli).context("configuration").and_then(|cfg| {
        for command in cli.command.commands() {
            let manifest =
                pipeline::run(command, &cfg).with_context(|| format!("stage `{command}` failed"))?;
            print_manifest(&manifest);
        }
        Ok(())
    });
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use chrono::{DateTime, TimeZone, Utc};
use serde::{Deserialize, Serialize};

use super::store::{csv_bytes, file_digest, jsonl_bytes, read_jsonl, write_atomic};
use super::{Command, PipelineConfig, PipelineError};
use crate::analytics::{
    cooccurrence_graph, coverage_table, keyword_frequency, mention_series, output_series, pio_ranking,
    region_distribution, tweets_per_release, type_distribution, Granularity,
};
use crate::backlink::{link_coverage_index, merge_protocol_variants, read_link_csv_path, ReleaseBacklinks};
use crate::canon::{CanonicalUrl, ReleaseId};
use crate::coupling::{build_coupling_graph, journal_coverage, read_external_counts_path, DoiJournalTable};
use crate::harvester::{
    Clock, Crawler, Fetcher, FixtureFetcher, HttpFetcher, PageClass, SystemClock, VirtualClock,
};
use crate::index::CorpusIndex;
use crate::mention::{
    ingest_tweets as ingest, HttpOracle, MatchResult, RedirectOracle, TableOracle, TweetMention,
};
use crate::release::{parse_release, AliasTable, DoiExtractor, DoiRepair, DoiRewrite, PressRelease};
use crate::Error;

/// Virtual-clock origin for offline crawls.
pub static FIXTURE_EPOCH: once_cell::sync::Lazy<DateTime<Utc>> =
    once_cell::sync::Lazy::new(|| Utc.with_ymd_and_hms(2021, 1, 1, 0, 0, 0).unwrap());

/// File names inside the corpus and report directories.
pub mod layout {
    pub const STORE: &str = "store";
    pub const CRAWL_MANIFEST: &str = "crawl_manifest.jsonl";
    pub const CORPUS: &str = "corpus.jsonl";
    pub const PARSE_ERRORS: &str = "parse_errors.csv";
    pub const MENTIONS: &str = "mentions.jsonl";
    pub const BACKLINKS: &str = "backlinks.jsonl";
    pub const BACKLINK_TARGETS: &str = "backlink_targets.jsonl";
    pub const COUPLINGS: &str = "couplings.csv";

    pub const ANNUAL_OUTPUT: &str = "annual_output.csv";
    pub const DAILY_OUTPUT: &str = "daily_output.csv";
    pub const TYPE_DISTRIBUTION: &str = "type_distribution.csv";
    pub const REGION_DISTRIBUTION: &str = "region_distribution.csv";
    pub const KEYWORD_FREQUENCY: &str = "keyword_frequency.csv";
    pub const COOCCURRENCE: &str = "cooccurrence.json";
    pub const LINK_STRENGTH: &str = "keyword_link_strength.csv";
    pub const PIO_RANKING: &str = "pio_ranking.csv";
    pub const MENTION_SERIES: &str = "mention_series.csv";
    pub const TWEETS_PER_RELEASE: &str = "tweets_per_release.csv";
    pub const COVERAGE_TABLE: &str = "coverage_table.csv";
    pub const JOURNAL_COVERAGE: &str = "journal_coverage.csv";
    pub const OUTDATED_URLS: &str = "outdated_urls.csv";
    pub const LINK_WINDOW: &str = "link_window.csv";
    pub const POPULATIONS: &str = "populations.csv";
    pub const SUMMARY: &str = "summary.md";
}

/// One line of the crawl manifest.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CrawlLine {
    pub url: CanonicalUrl,
    pub status: u16,
    pub body_digest: String,
    pub fetched_at: Option<DateTime<Utc>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub redirect_to: Option<CanonicalUrl>,
    pub class: String,
}

#[derive(Serialize, Deserialize)]
struct TargetLine {
    target: CanonicalUrl,
    mentioning_webpages: u64,
    status: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    release_id: Option<ReleaseId>,
}

pub(super) struct StageRun<'a> {
    pub cfg: &'a PipelineConfig,
    pub inputs: BTreeMap<String, String>,
    pub outputs: BTreeMap<String, String>,
    pub counts: BTreeMap<String, u64>,
}

impl<'a> StageRun<'a> {
    pub fn new(cfg: &'a PipelineConfig) -> Self {
        StageRun {
            cfg,
            inputs: BTreeMap::new(),
            outputs: BTreeMap::new(),
            counts: BTreeMap::new(),
        }
    }

    fn corpus(&self, name: &str) -> PathBuf {
        self.cfg.corpus_dir.join(name)
    }

    fn report(&self, name: &str) -> PathBuf {
        self.cfg.report_dir.join(name)
    }

    fn input(&mut self, path: &Path) -> Result<(), Error> {
        let d = file_digest(path)?;
        self.inputs.insert(path.display().to_string(), d);
        Ok(())
    }

    /// Requires a file produced by an earlier stage.
    fn require(
        &mut self,
        command: Command,
        requires: Command,
        path: PathBuf,
    ) -> Result<PathBuf, PipelineError> {
        if !path.is_file() {
            return Err(PipelineError::MissingPrerequisite {
                command,
                requires,
                path,
            });
        }
        self.input(&path)?;
        Ok(path)
    }

    fn output(&mut self, path: PathBuf, bytes: &[u8]) -> Result<(), Error> {
        write_atomic(&path, bytes)?;
        self.outputs
            .insert(path.display().to_string(), crate::harvester::body_digest(bytes));
        Ok(())
    }

    fn count(&mut self, key: &str, n: impl TryInto<u64>) {
        self.counts
            .insert(key.to_string(), n.try_into().unwrap_or(u64::MAX));
    }

    fn load_corpus(&mut self, command: Command) -> Result<Vec<PressRelease>, PipelineError> {
        let path = self.require(command, Command::Parse, self.corpus(layout::CORPUS))?;
        Ok(read_jsonl(&path)?)
    }

    fn oracle(&mut self) -> Result<Box<dyn RedirectOracle>, PipelineError> {
        if let Some(p) = self.cfg.resolver_table.clone() {
            self.input(&p)?;
            return Ok(Box::new(TableOracle::from_csv_path(&p)?));
        }
        if self.cfg.fixtures.is_some() {
            return Ok(Box::new(TableOracle::default()));
        }
        let http = HttpOracle::new().map_err(|e| PipelineError::Config(format!("http client: {e}")))?;
        Ok(Box::new(http))
    }
}

pub(super) fn crawl(ctx: &mut StageRun) -> Result<(), PipelineError> {
    let cfg = ctx.cfg;
    let (fetcher, clock): (Box<dyn Fetcher>, Box<dyn Clock>) = match &cfg.fixtures {
        Some(dir) => (
            Box::new(FixtureFetcher::new(dir.join("site"))),
            Box::new(VirtualClock::new(*FIXTURE_EPOCH)),
        ),
        None => (
            Box::new(HttpFetcher::new(&cfg.scheme).map_err(|e| PipelineError::Config(e.to_string()))?),
            Box::new(SystemClock::new()),
        ),
    };
    let crawler = Crawler {
        scope: &cfg.scope,
        fetcher: fetcher.as_ref(),
        clock: clock.as_ref(),
        workers: cfg.workers,
    };
    let outcome = crawler.run(&cfg.seeds);

    let store = ctx.corpus(layout::STORE);
    let mut lines = Vec::with_capacity(outcome.pages.len());
    let mut by_class: BTreeMap<&str, u64> = BTreeMap::new();
    for page in &outcome.pages {
        let rec = &page.record;
        if rec.fetched_at.is_some() {
            let path = store.join(format!("{}.body", rec.body_digest));
            if !path.exists() {
                write_atomic(&path, &rec.body)?;
            }
        }
        *by_class.entry(page.class.label()).or_default() += 1;
        lines.push(CrawlLine {
            url: rec.url.clone(),
            status: rec.status,
            body_digest: rec.body_digest.clone(),
            fetched_at: rec.fetched_at,
            redirect_to: rec.redirect_to.clone(),
            class: page.class.label().to_string(),
        });
    }
    for f in &outcome.failures {
        log::warn!("crawl: {f}");
    }
    ctx.output(ctx.corpus(layout::CRAWL_MANIFEST), &jsonl_bytes(&lines)?)?;
    ctx.count("pages", outcome.pages.len());
    ctx.count("failures", outcome.failures.len());
    ctx.count("malformed_links", outcome.malformed_links);
    for (class, n) in by_class {
        ctx.count(&format!("class.{class}"), n);
    }
    Ok(())
}

pub(super) fn parse(ctx: &mut StageRun) -> Result<(), PipelineError> {
    let cmd = Command::Parse;
    let manifest = ctx.require(cmd, Command::Crawl, ctx.corpus(layout::CRAWL_MANIFEST))?;
    let lines: Vec<CrawlLine> = read_jsonl(&manifest)?;
    let rewrites = match ctx.cfg.doi_rewrites.clone() {
        Some(p) => {
            ctx.input(&p)?;
            DoiRewrite::load_path(&p)?
        }
        None => Vec::new(),
    };
    let oracle = ctx.oracle()?;
    let extractor = DoiExtractor::new(rewrites, Some(oracle.as_ref()), ctx.cfg.max_depth);

    let mut corpus: BTreeMap<ReleaseId, PressRelease> = BTreeMap::new();
    let mut errors: Vec<[String; 2]> = Vec::new();
    let (mut dropped, mut duplicates) = (0usize, 0usize);
    let mut repairs: BTreeMap<DoiRepair, u64> = BTreeMap::new();
    for line in &lines {
        let is_release = PageClass::from_label(&line.class).is_some_and(PageClass::is_press_release);
        if !is_release || !(200..300).contains(&line.status) {
            continue;
        }
        let path = ctx
            .corpus(layout::STORE)
            .join(format!("{}.body", line.body_digest));
        let body = fs::read(&path).map_err(|e| Error::io(&path, e))?;
        match parse_release(&line.url, &body, &extractor) {
            Ok((release, extraction)) => {
                dropped += extraction.dropped;
                if corpus.contains_key(&release.id) {
                    log::warn!("parse: duplicate release id {} at {}", release.id, line.url);
                    duplicates += 1;
                    continue;
                }
                for d in &release.dois {
                    *repairs.entry(d.repair).or_default() += 1;
                }
                corpus.insert(release.id.clone(), release);
            }
            Err(e) => {
                log::warn!("parse: {}: {e}", line.url);
                errors.push([line.url.to_string(), e.to_string()]);
            }
        }
    }
    let releases: Vec<&PressRelease> = corpus.values().collect();
    ctx.output(ctx.corpus(layout::CORPUS), &jsonl_bytes(&releases)?)?;
    ctx.output(
        ctx.corpus(layout::PARSE_ERRORS),
        &csv_bytes(&["url", "error"], &errors)?,
    )?;
    ctx.count("releases", releases.len());
    ctx.count("parse_errors", errors.len());
    ctx.count("duplicate_ids", duplicates);
    ctx.count(
        "date_anomalies",
        releases.iter().filter(|r| r.date_anomaly).count(),
    );
    ctx.count("dois", releases.iter().map(|r| r.dois.len()).sum::<usize>());
    ctx.count("dois_dropped", dropped);
    for (repair, n) in repairs {
        let key = serde_json::to_value(repair)
            .map_err(Error::from)?
            .as_str()
            .unwrap_or_default()
            .to_string();
        ctx.count(&format!("doi_repair.{key}"), n);
    }
    Ok(())
}

pub(super) fn ingest_tweets(ctx: &mut StageRun) -> Result<(), PipelineError> {
    let cmd = Command::IngestTweets;
    let corpus = ctx.load_corpus(cmd)?;
    let tweets = ctx.cfg.tweets.clone().ok_or(PipelineError::MissingInput {
        command: cmd,
        what: "tweet archive",
        key: "tweets",
    })?;
    ctx.input(&tweets)?;
    let text = fs::read_to_string(&tweets).map_err(|e| Error::io(&tweets, e))?;
    let oracle = ctx.oracle()?;
    let index = CorpusIndex::from_corpus(ctx.cfg.scope.seed_path().clone(), &corpus);
    let out = ingest(text.lines(), oracle.as_ref(), ctx.cfg.max_depth, &index);
    ctx.output(ctx.corpus(layout::MENTIONS), &jsonl_bytes(&out.mentions)?)?;
    let s = &out.stats;
    ctx.count("records", s.records);
    ctx.count("malformed", s.malformed);
    ctx.count("retweets", s.retweets);
    ctx.count("out_of_scope_only", s.out_of_scope_only);
    ctx.count("duplicates", s.duplicates);
    ctx.count("mentions", out.mentions.len());
    ctx.count("urls_matched", s.matched);
    ctx.count("urls_outdated", s.outdated);
    ctx.count("urls_out_of_scope", s.out_of_scope);
    Ok(())
}

pub(super) fn ingest_links(ctx: &mut StageRun) -> Result<(), PipelineError> {
    let cmd = Command::IngestLinks;
    let corpus = ctx.load_corpus(cmd)?;
    let path = ctx.cfg.backlinks.clone().ok_or(PipelineError::MissingInput {
        command: cmd,
        what: "backlink export",
        key: "backlinks",
    })?;
    ctx.input(&path)?;
    let records = read_link_csv_path(&path)?;
    let aggregates = merge_protocol_variants(&records)
        .map_err(|e| PipelineError::stage(cmd, Error::invalid(e.to_string())))?;
    let index = CorpusIndex::from_corpus(ctx.cfg.scope.seed_path().clone(), &corpus);
    let li = link_coverage_index(&aggregates, &index);

    let targets: Vec<TargetLine> = aggregates
        .iter()
        .map(|a| {
            let release_id = index.lookup(&a.target).cloned();
            let status = if release_id.is_some() {
                "attached"
            } else if index.in_fold(&a.target) {
                "outdated"
            } else {
                "rejected"
            };
            TargetLine {
                target: a.target.clone(),
                mentioning_webpages: a.mentioning_webpages,
                status: status.to_string(),
                release_id,
            }
        })
        .collect();
    let attached: Vec<&ReleaseBacklinks> = li.attached.values().collect();
    ctx.output(ctx.corpus(layout::BACKLINKS), &jsonl_bytes(&attached)?)?;
    ctx.output(ctx.corpus(layout::BACKLINK_TARGETS), &jsonl_bytes(&targets)?)?;
    ctx.count("records", records.len());
    ctx.count("targets", aggregates.len());
    ctx.count("releases_attached", li.attached.len());
    ctx.count("outdated", li.outdated.len());
    ctx.count("rejected", li.rejected.len());
    Ok(())
}

fn pct_cell(p: Option<crate::Fixed>) -> String {
    p.map(|p| p.to_string()).unwrap_or_default()
}

pub(super) fn couple(ctx: &mut StageRun) -> Result<(), PipelineError> {
    let cmd = Command::Couple;
    let corpus = ctx.load_corpus(cmd)?;
    let doi_journals = match ctx.cfg.doi_journals.clone() {
        Some(p) => {
            ctx.input(&p)?;
            let f = fs::File::open(&p).map_err(|e| Error::io(&p, e))?;
            Some(DoiJournalTable::from_csv_reader(f)?)
        }
        None => None,
    };
    let edges = build_coupling_graph(&corpus, doi_journals.as_ref());
    let rows: Vec<[String; 3]> = edges
        .iter()
        .map(|e| {
            [
                e.release_id.to_string(),
                e.doi.clone(),
                e.journal.clone().unwrap_or_default(),
            ]
        })
        .collect();
    ctx.output(
        ctx.corpus(layout::COUPLINGS),
        &csv_bytes(&["release_id", "doi", "journal"], &rows)?,
    )?;
    ctx.count("edges", edges.len());
    ctx.count(
        "releases_with_doi",
        corpus.iter().filter(|r| !r.dois.is_empty()).count(),
    );

    if let Some(p) = ctx.cfg.external_counts.clone() {
        ctx.input(&p)?;
        let external = read_external_counts_path(&p)?;
        let aliases = load_aliases(ctx, ctx.cfg.journal_aliases.clone())?;
        let report = journal_coverage(&corpus, &external, &aliases)?;
        let rows: Vec<[String; 4]> = report
            .rows
            .iter()
            .map(|r| {
                [
                    r.journal.clone(),
                    r.publications_with_doi.to_string(),
                    r.press_release_count.to_string(),
                    pct_cell(r.coverage_pct),
                ]
            })
            .collect();
        ctx.output(
            ctx.report(layout::JOURNAL_COVERAGE),
            &csv_bytes(
                &[
                    "journal",
                    "publications_with_doi",
                    "press_release_count",
                    "coverage_pct",
                ],
                &rows,
            )?,
        )?;
        ctx.count("journals", report.rows.len());
        ctx.count("releases_with_journal", report.population);
        ctx.count("coverage_warnings", report.warnings.len());
    }
    Ok(())
}

fn load_aliases(ctx: &mut StageRun, path: Option<PathBuf>) -> Result<AliasTable, PipelineError> {
    match path {
        Some(p) => {
            ctx.input(&p)?;
            Ok(AliasTable::from_csv_path(&p)?)
        }
        None => Ok(AliasTable::default()),
    }
}

pub(super) fn analyze(ctx: &mut StageRun) -> Result<(), PipelineError> {
    let cmd = Command::Analyze;
    let corpus = ctx.load_corpus(cmd)?;
    let aliases = load_aliases(ctx, ctx.cfg.institution_aliases.clone())?;
    let mut populations: Vec<(String, u64)> = Vec::new();
    let dated = corpus.iter().filter(|r| !r.date_anomaly).count() as u64;

    let (series_file, bucket_col) = match ctx.cfg.granularity {
        Granularity::Yearly => (layout::ANNUAL_OUTPUT, "year"),
        Granularity::Daily => (layout::DAILY_OUTPUT, "date"),
    };
    let series = output_series(&corpus, ctx.cfg.granularity);
    let rows: Vec<[String; 2]> = series
        .points
        .iter()
        .map(|(b, c)| [b.to_string(), c.to_string()])
        .collect();
    ctx.output(
        ctx.report(series_file),
        &csv_bytes(&[bucket_col, "releases"], &rows)?,
    )?;
    populations.push((series_file.into(), dated));

    let types = type_distribution(&corpus);
    let rows: Vec<[String; 3]> = types
        .rows
        .iter()
        .map(|s| [s.key.to_string(), s.count.to_string(), s.pct.to_string()])
        .collect();
    ctx.output(
        ctx.report(layout::TYPE_DISTRIBUTION),
        &csv_bytes(&["type", "count", "pct"], &rows)?,
    )?;
    populations.push((layout::TYPE_DISTRIBUTION.into(), types.population));

    let regions = region_distribution(&corpus);
    let rows: Vec<[String; 3]> = regions
        .rows
        .iter()
        .map(|s| [s.key.to_string(), s.count.to_string(), s.pct.to_string()])
        .collect();
    ctx.output(
        ctx.report(layout::REGION_DISTRIBUTION),
        &csv_bytes(&["region", "count", "pct"], &rows)?,
    )?;
    populations.push((layout::REGION_DISTRIBUTION.into(), regions.population));

    let with_keywords = corpus
        .iter()
        .filter(|r| r.metadata.keywords.iter().any(|k| !k.trim().is_empty()))
        .count() as u64;
    let freq = keyword_frequency(&corpus);
    let rows: Vec<[String; 3]> = freq
        .iter()
        .enumerate()
        .map(|(i, (k, n))| [(i + 1).to_string(), k.clone(), n.to_string()])
        .collect();
    ctx.output(
        ctx.report(layout::KEYWORD_FREQUENCY),
        &csv_bytes(&["rank", "keyword", "occurrences"], &rows)?,
    )?;
    populations.push((layout::KEYWORD_FREQUENCY.into(), with_keywords));

    let graph = cooccurrence_graph(&corpus);
    let mut json = serde_json::to_vec_pretty(&graph.export()).map_err(Error::from)?;
    json.push(b'\n');
    ctx.output(ctx.report(layout::COOCCURRENCE), &json)?;
    let rows: Vec<[String; 3]> = graph
        .by_link_strength()
        .into_iter()
        .map(|(k, s)| {
            let occ = graph.nodes[&k];
            [k, occ.to_string(), s.to_string()]
        })
        .collect();
    ctx.output(
        ctx.report(layout::LINK_STRENGTH),
        &csv_bytes(&["keyword", "occurrences", "link_strength"], &rows)?,
    )?;
    populations.push((layout::COOCCURRENCE.into(), with_keywords));
    populations.push((layout::LINK_STRENGTH.into(), with_keywords));

    let with_institution = corpus
        .iter()
        .filter(|r| !r.metadata.institution.trim().is_empty())
        .count() as u64;
    let ranking = pio_ranking(&corpus, &aliases);
    let rows: Vec<[String; 3]> = ranking
        .iter()
        .enumerate()
        .map(|(i, (name, n))| [(i + 1).to_string(), name.clone(), n.to_string()])
        .collect();
    ctx.output(
        ctx.report(layout::PIO_RANKING),
        &csv_bytes(&["rank", "institution", "releases"], &rows)?,
    )?;
    populations.push((layout::PIO_RANKING.into(), with_institution));

    let mentions_path = ctx.corpus(layout::MENTIONS);
    let backlinks_path = ctx.corpus(layout::BACKLINKS);
    let mut outdated: BTreeSet<(CanonicalUrl, &str)> = BTreeSet::new();
    let mentions: Option<Vec<TweetMention>> = if mentions_path.is_file() {
        ctx.input(&mentions_path)?;
        Some(read_jsonl(&mentions_path)?)
    } else {
        None
    };
    let links = if backlinks_path.is_file() {
        ctx.input(&backlinks_path)?;
        let attached: Vec<ReleaseBacklinks> = read_jsonl(&backlinks_path)?;
        let targets_path = ctx.corpus(layout::BACKLINK_TARGETS);
        if targets_path.is_file() {
            ctx.input(&targets_path)?;
            for t in read_jsonl::<TargetLine>(&targets_path)? {
                if t.status == "outdated" {
                    outdated.insert((t.target, "web"));
                }
            }
        }
        // the backlink index only sees links from its own observation
        // window; the coverage figures are not adjusted for it, so the
        // window travels with the reports instead
        let start = attached.iter().filter_map(|b| b.window_start).min();
        let end = attached.iter().filter_map(|b| b.window_end).max();
        let fmt = |d: Option<chrono::NaiveDate>| d.map(|d| d.to_string()).unwrap_or_default();
        let linked = attached.iter().filter(|b| b.mentioning_webpages > 0).count();
        ctx.output(
            ctx.report(layout::LINK_WINDOW),
            &csv_bytes(
                &["window_start", "window_end", "releases_linked"],
                [[fmt(start), fmt(end), linked.to_string()]],
            )?,
        )?;
        populations.push((layout::LINK_WINDOW.into(), attached.len() as u64));
        Some(crate::backlink::LinkCoverageIndex {
            attached: attached.into_iter().map(|b| (b.release_id.clone(), b)).collect(),
            ..Default::default()
        })
    } else {
        None
    };

    if let Some(mentions) = &mentions {
        for m in mentions {
            for (u, r) in m.resolved_urls.iter().zip(&m.matches) {
                if *r == MatchResult::OutdatedUrl {
                    outdated.insert((u.clone(), "tweet"));
                }
            }
        }
        let ms = mention_series(mentions);
        let rows: Vec<[String; 2]> = ms
            .points
            .iter()
            .map(|(b, c)| [b.to_string(), c.to_string()])
            .collect();
        ctx.output(
            ctx.report(layout::MENTION_SERIES),
            &csv_bytes(&["year", "tweets"], &rows)?,
        )?;
        populations.push((layout::MENTION_SERIES.into(), ms.total()));

        let tpr = tweets_per_release(&corpus, mentions);
        let rows: Vec<[String; 2]> = tpr.iter().map(|(y, r)| [y.to_string(), r.to_string()]).collect();
        ctx.output(
            ctx.report(layout::TWEETS_PER_RELEASE),
            &csv_bytes(&["year", "tweets_per_release"], &rows)?,
        )?;
        populations.push((layout::TWEETS_PER_RELEASE.into(), dated));
    }
    if mentions.is_some() || links.is_some() {
        let empty = Vec::new();
        let rows: Vec<[String; 6]> = coverage_table(
            &corpus,
            mentions.as_ref().unwrap_or(&empty),
            &links.unwrap_or_default(),
        )
        .into_iter()
        .map(|r| {
            [
                r.year.to_string(),
                r.published.to_string(),
                r.tweeted.to_string(),
                r.pct_tweeted.to_string(),
                r.web_linked.to_string(),
                r.pct_web.to_string(),
            ]
        })
        .collect();
        ctx.output(
            ctx.report(layout::COVERAGE_TABLE),
            &csv_bytes(
                &[
                    "year",
                    "published",
                    "tweeted",
                    "pct_tweeted",
                    "web_linked",
                    "pct_web",
                ],
                &rows,
            )?,
        )?;
        populations.push((layout::COVERAGE_TABLE.into(), dated));
        let rows: Vec<[&str; 2]> = outdated.iter().map(|(u, s)| [u.as_str(), *s]).collect();
        ctx.output(
            ctx.report(layout::OUTDATED_URLS),
            &csv_bytes(&["url", "source"], &rows)?,
        )?;
        populations.push((layout::OUTDATED_URLS.into(), outdated.len() as u64));
    }

    let rows: Vec<[String; 2]> = populations
        .iter()
        .map(|(r, n)| [r.clone(), n.to_string()])
        .collect();
    ctx.output(
        ctx.report(layout::POPULATIONS),
        &csv_bytes(&["report", "population_n"], &rows)?,
    )?;
    ctx.count("releases", corpus.len());
    ctx.count("reports", populations.len());
    Ok(())
}

const SUMMARY_ROWS: usize = 10;

/// Renders `summary.md` from the analyze outputs present in the report
/// directory.
pub(super) fn report(ctx: &mut StageRun) -> Result<(), PipelineError> {
    let cmd = Command::Report;
    let pop_path = ctx.require(cmd, Command::Analyze, ctx.report(layout::POPULATIONS))?;
    let mut rdr = csv::Reader::from_path(&pop_path).map_err(Error::from)?;
    let mut populations = Vec::new();
    for row in rdr.records() {
        let row = row.map_err(Error::from)?;
        populations.push((row[0].to_string(), row[1].to_string()));
    }
    let journal = ctx.report(layout::JOURNAL_COVERAGE);
    if journal.is_file() {
        populations.push((layout::JOURNAL_COVERAGE.to_string(), String::new()));
    }

    let mut md = String::from("# Press-release corpus report\n");
    let mut sections = 0;
    for (file, n) in &populations {
        if !file.ends_with(".csv") {
            continue;
        }
        let path = ctx.report(file);
        if !path.is_file() {
            continue;
        }
        ctx.input(&path)?;
        let mut rdr = csv::Reader::from_path(&path).map_err(Error::from)?;
        let header: Vec<String> = rdr
            .headers()
            .map_err(Error::from)?
            .iter()
            .map(str::to_string)
            .collect();
        let rows: Vec<csv::StringRecord> = rdr.records().collect::<Result<_, _>>().map_err(Error::from)?;
        let _ = write!(md, "\n## {file}\n\n");
        if !n.is_empty() {
            let _ = writeln!(md, "N = {n}, {} rows\n", rows.len());
        } else {
            let _ = writeln!(md, "{} rows\n", rows.len());
        }
        let _ = writeln!(md, "| {} |", header.join(" | "));
        let _ = writeln!(md, "|{}", "---|".repeat(header.len()));
        for row in rows.iter().take(SUMMARY_ROWS) {
            let cells: Vec<&str> = row.iter().collect();
            let _ = writeln!(md, "| {} |", cells.join(" | "));
        }
        if rows.len() > SUMMARY_ROWS {
            let _ = writeln!(md, "\n({} more rows)", rows.len() - SUMMARY_ROWS);
        }
        sections += 1;
    }
    ctx.output(ctx.report(layout::SUMMARY), md.as_bytes())?;
    ctx.count("sections", sections);
    Ok(())
}

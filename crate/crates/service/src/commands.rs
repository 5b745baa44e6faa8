//! The work behind each subcommand, callable without the CLI.

use std::collections::{BTreeMap, HashMap};
use std::path::{Path, PathBuf};
use std::sync::Arc;

use anyhow::{bail, Context};
use chrono::NaiveDate;
use debunk_core::cluster::GroupingOptions;
use debunk_core::embedding::load_embeddings;
use debunk_core::ingest::{load_tweets, parse_tz_offset, read_records, write_records, FileSource};
use debunk_core::pipeline::{archive_batch, parse_sidecar, ArchiveOptions, ExtractionStats};
use debunk_core::{cohen_kappa, partition_daily, DailyBatch, EmbeddingTable, Lang, RulesConfig, Tweet};

use crate::settings::Settings;
use crate::store::{to_ndjson, Store};

pub fn tweets_path(data_dir: &Path, date: NaiveDate, lang: &Lang) -> PathBuf {
    data_dir.join("tweets").join(format!("{date}.{lang}.jsonl"))
}

pub fn parses_path(data_dir: &Path, date: NaiveDate, lang: &Lang) -> PathBuf {
    data_dir.join("parses").join(format!("{date}.{lang}.conllu"))
}

pub fn load_rules(settings: &Settings) -> anyhow::Result<RulesConfig> {
    match &settings.rules {
        Some(path) => RulesConfig::load(path).with_context(|| format!("loading rules {}", path.display())),
        None => Ok(RulesConfig::default()),
    }
}

fn read_day_tweets(path: &Path, langs: &[Lang]) -> anyhow::Result<Vec<Tweet>> {
    if !path.exists() {
        return Ok(Vec::new());
    }
    let file = std::fs::File::open(path).with_context(|| format!("opening {}", path.display()))?;
    let report = read_records(std::io::BufReader::new(file), langs)?;
    for d in &report.diagnostics {
        log::warn!("{}:{}: {}", path.display(), d.line, d.message);
    }
    Ok(report.tweets)
}

#[derive(Debug, Default, PartialEq, Eq)]
pub struct CrawlSummary {
    pub loaded: usize,
    pub rejected: usize,
    /// (date, lang, tweets stored for that day after merging)
    pub days: Vec<(NaiveDate, Lang, usize)>,
}

/// Reads a tweet record file and merges it into the per-day tweet files;
/// a tweet already stored is replaced by the newer record.
pub fn crawl(settings: &Settings, source: &Path) -> anyhow::Result<CrawlSummary> {
    let rules = load_rules(settings)?;
    let langs: Vec<Lang> = rules.supported().cloned().collect();
    let tz = parse_tz_offset(&settings.timezone).with_context(|| format!("bad timezone {:?}", settings.timezone))?;
    let report = load_tweets(&FileSource::new(source), &langs)?;
    for d in &report.diagnostics {
        log::warn!("{}:{}: {}", source.display(), d.line, d.message);
    }
    let mut summary = CrawlSummary {
        loaded: report.tweets.len(),
        rejected: report.diagnostics.len(),
        days: Vec::new(),
    };
    for batch in partition_daily(report.tweets, tz) {
        let path = tweets_path(&settings.data_dir, batch.date, &batch.lang);
        let mut merged: BTreeMap<String, Tweet> =
            read_day_tweets(&path, &langs)?.into_iter().map(|t| (t.id.clone(), t)).collect();
        for t in batch.tweets {
            merged.insert(t.id.clone(), t);
        }
        let tweets: Vec<Tweet> = merged.into_values().collect();
        if let Some(dir) = path.parent() {
            std::fs::create_dir_all(dir)?;
        }
        let mut out = Vec::new();
        write_records(&mut out, &tweets)?;
        std::fs::write(&path, out).with_context(|| format!("writing {}", path.display()))?;
        summary.days.push((batch.date, batch.lang, tweets.len()));
    }
    Ok(summary)
}

#[derive(Debug, PartialEq)]
pub struct ArchiveSummary {
    pub stats: ExtractionStats,
    pub clusters: usize,
    pub parse_errors: usize,
}

/// Runs the pipeline on one batch and stores the ranked day.
pub fn archive_into_store(
    store: &Store,
    batch: &DailyBatch,
    sidecar: &str,
    rules: &RulesConfig,
    embeddings: &EmbeddingTable,
    opts: &ArchiveOptions,
) -> anyhow::Result<ArchiveSummary> {
    let raw: HashMap<String, String> = batch.tweets.iter().map(|t| (t.id.clone(), t.text.clone())).collect();
    let (parses, errors) = parse_sidecar(sidecar, &raw);
    for (id, e) in &errors {
        log::warn!("parse of tweet {id} skipped: {e}");
    }
    let day = archive_batch(batch, rules, &parses, embeddings, opts)?;
    let tweets = day.tweets_by_id();
    let clusters = day.ranked.len();
    store.persist_batch(batch.date, &batch.lang, day.ranked, &tweets)?;
    Ok(ArchiveSummary {
        stats: day.stats,
        clusters,
        parse_errors: errors.len(),
    })
}

/// `archive`: reads the stored tweets and parses of one day and archives it.
pub fn archive(
    settings: &Settings,
    date: NaiveDate,
    lang: &Lang,
    parses: Option<&Path>,
) -> anyhow::Result<ArchiveSummary> {
    let rules = load_rules(settings)?;
    if !rules.supports(lang) {
        bail!("language {lang} is not configured in the rules");
    }
    let Some(emb_path) = &settings.embeddings else {
        bail!("no embeddings file given (--embeddings or `embeddings` in the settings file)");
    };
    let embeddings = load_embeddings(emb_path).with_context(|| format!("loading {}", emb_path.display()))?;
    let tweets = read_day_tweets(&tweets_path(&settings.data_dir, date, lang), &[lang.clone()])?;
    if tweets.is_empty() {
        log::warn!("no stored tweets for {date} {lang}");
    }
    let parses_file = parses.map(Path::to_path_buf).unwrap_or_else(|| parses_path(&settings.data_dir, date, lang));
    let sidecar = match std::fs::read_to_string(&parses_file) {
        Ok(s) => s,
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => {
            log::warn!("no parses at {}; nothing can be extracted", parses_file.display());
            String::new()
        }
        Err(e) => return Err(e).with_context(|| format!("reading {}", parses_file.display())),
    };
    let store = Store::open(&settings.data_dir, settings.labels)?;
    let batch = DailyBatch {
        date,
        lang: lang.clone(),
        tweets,
    };
    let opts = ArchiveOptions {
        min_shares_exclusive: settings.min_shares,
        grouping: GroupingOptions {
            tau: settings.tau,
            ..GroupingOptions::default()
        },
    };
    archive_into_store(&store, &batch, &sidecar, &rules, &embeddings, &opts)
}

pub fn export(settings: &Settings, from: NaiveDate, to: NaiveDate, lang: Option<&Lang>) -> anyhow::Result<String> {
    if from > to {
        bail!("--from {from} is after --to {to}");
    }
    let store = Store::open(&settings.data_dir, settings.labels)?;
    Ok(to_ndjson(&store.export(from, to, lang)))
}

/// Labels, one per line; blank lines are skipped.
pub fn read_labels(path: &Path) -> anyhow::Result<Vec<String>> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    Ok(text.lines().map(str::trim).filter(|l| !l.is_empty()).map(String::from).collect())
}

pub fn eval_kappa(a: &Path, b: &Path) -> anyhow::Result<f64> {
    Ok(cohen_kappa(&read_labels(a)?, &read_labels(b)?)?)
}

pub async fn serve(settings: &Settings) -> anyhow::Result<()> {
    let store = Arc::new(Store::open(&settings.data_dir, settings.labels)?);
    let app = crate::api::router(store, settings.ui_dir.clone());
    let addr = std::net::SocketAddr::from(([0, 0, 0, 0], settings.port));
    let listener = tokio::net::TcpListener::bind(addr).await.with_context(|| format!("binding {addr}"))?;
    log::info!("listening on http://{addr}");
    axum::serve(listener, app)
        .with_graceful_shutdown(async {
            let _ = tokio::signal::ctrl_c().await;
        })
        .await?;
    Ok(())
}

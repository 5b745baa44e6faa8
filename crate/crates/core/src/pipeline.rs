//! One day's archiving: share filter, fake-part matching, event-phrase
//! extraction, grouping and ranking.

use std::collections::{BTreeMap, HashMap};

use rayon::prelude::*;
use thiserror::Error;

use crate::cluster::{group_tweets_with, GroupError, GroupingOptions};
use crate::config::{ConfigError, RulesConfig};
use crate::conllu::{parse_conllu_with_raw, split_sidecar, ConlluError, DependencyDocument};
use crate::embedding::EmbeddingTable;
use crate::extract::{locate_fake_part, run_cascade, EventPhrase};
use crate::ingest::{filter_by_shares, DailyBatch, Tweet};
use crate::pattern::first_match;
use crate::rank::{rank_clusters, RankedCluster};

#[derive(Clone, Debug, PartialEq)]
pub struct ArchiveOptions {
    /// Tweets need strictly more shares than this.
    pub min_shares_exclusive: u64,
    pub grouping: GroupingOptions,
}

impl Default for ArchiveOptions {
    fn default() -> Self {
        ArchiveOptions {
            min_shares_exclusive: 3,
            grouping: GroupingOptions::default(),
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct ExtractionStats {
    pub tweets: usize,
    pub kept_after_filter: usize,
    pub matched: usize,
    pub missing_parse: usize,
    pub unaligned: usize,
    pub extracted: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct DayArchive {
    pub batch: DailyBatch,
    pub phrases: BTreeMap<String, EventPhrase>,
    pub ranked: Vec<RankedCluster>,
    pub stats: ExtractionStats,
}

impl DayArchive {
    pub fn tweets_by_id(&self) -> BTreeMap<String, Tweet> {
        self.batch.tweets.iter().map(|t| (t.id.clone(), t.clone())).collect()
    }
}

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error("language {0} is not configured")]
    UnknownLanguage(String),
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Group(#[from] GroupError),
}

/// Parses every block of a sidecar CoNLL-U file, aligning against the
/// tweet text where offsets are missing. Blocks that fail are returned as
/// errors next to the documents that parsed.
pub fn parse_sidecar(
    text: &str,
    raw_texts: &HashMap<String, String>,
) -> (BTreeMap<String, DependencyDocument>, Vec<(String, ConlluError)>) {
    let mut docs = BTreeMap::new();
    let mut errors = Vec::new();
    for block in split_sidecar(text) {
        let raw = raw_texts.get(&block.tweet_id).map(String::as_str);
        match parse_conllu_with_raw(&block.text, &block.tweet_id, raw, block.line_offset) {
            Ok(doc) => {
                docs.insert(block.tweet_id, doc);
            }
            Err(e) => errors.push((block.tweet_id, e)),
        }
    }
    (docs, errors)
}

/// Extracts the event phrase of every tweet that carries a debunking
/// pattern and has a parse.
pub fn extract_phrases(
    batch: &DailyBatch,
    rules: &RulesConfig,
    parses: &BTreeMap<String, DependencyDocument>,
) -> Result<(BTreeMap<String, EventPhrase>, ExtractionStats), PipelineError> {
    let profile = rules
        .profile(&batch.lang)
        .ok_or_else(|| PipelineError::UnknownLanguage(batch.lang.to_string()))?;
    let patterns = rules.compile_patterns(&batch.lang)?;
    let outcomes: Vec<(bool, bool, bool, Option<EventPhrase>)> = batch
        .tweets
        .par_iter()
        .map(|t| {
            let Some(span) = first_match(&patterns, &t.text) else {
                return (false, false, false, None);
            };
            let Some(doc) = parses.get(&t.id) else {
                return (true, true, false, None);
            };
            match locate_fake_part(doc, &span) {
                Ok(fake) => (true, false, false, run_cascade(doc, &fake, rules, profile).phrase),
                Err(e) => {
                    log::warn!("{e}");
                    (true, false, true, None)
                }
            }
        })
        .collect();
    let mut stats = ExtractionStats {
        tweets: batch.tweets.len(),
        kept_after_filter: batch.tweets.len(),
        ..Default::default()
    };
    let mut phrases = BTreeMap::new();
    for (t, (matched, missing, unaligned, phrase)) in batch.tweets.iter().zip(outcomes) {
        stats.matched += usize::from(matched);
        stats.missing_parse += usize::from(missing);
        stats.unaligned += usize::from(unaligned);
        if let Some(p) = phrase {
            stats.extracted += 1;
            phrases.insert(t.id.clone(), p);
        }
    }
    Ok((phrases, stats))
}

pub fn archive_batch(
    batch: &DailyBatch,
    rules: &RulesConfig,
    parses: &BTreeMap<String, DependencyDocument>,
    embeddings: &EmbeddingTable,
    opts: &ArchiveOptions,
) -> Result<DayArchive, PipelineError> {
    let total = batch.tweets.len();
    let filtered = DailyBatch {
        date: batch.date,
        lang: batch.lang.clone(),
        tweets: filter_by_shares(batch.tweets.clone(), opts.min_shares_exclusive),
    };
    let (phrases, mut stats) = extract_phrases(&filtered, rules, parses)?;
    stats.tweets = total;
    let clusters = group_tweets_with(&filtered, &phrases, embeddings, &opts.grouping)?;
    let by_id: BTreeMap<String, Tweet> = filtered.tweets.iter().map(|t| (t.id.clone(), t.clone())).collect();
    let ranked = rank_clusters(&clusters, &by_id);
    log::info!(
        "{} {}: {} tweets, {} after share filter, {} matched, {} phrases, {} clusters",
        filtered.date,
        filtered.lang,
        total,
        stats.kept_after_filter,
        stats.matched,
        stats.extracted,
        ranked.len()
    );
    Ok(DayArchive {
        batch: filtered,
        phrases,
        ranked,
        stats,
    })
}

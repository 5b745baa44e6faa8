//! On-disk archive of ranked days and votes.
//!
//! Layout under the data directory:
//!
//! ```text
//! days/<date>.<lang>.json   one DayRecord per archived (date, lang)
//! votes.json                every stored vote, keyed by cluster then voter
//! ```
//!
//! Every file is replaced by writing a temporary file in the same directory
//! and renaming it over the old one, so a crash leaves either the old or the
//! new content. Readers work from an in-memory catalog whose day entries are
//! swapped whole, so a concurrent reader sees the old day or the new day.

use std::collections::{BTreeMap, HashMap};
use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::{Arc, Mutex, RwLock};

use chrono::NaiveDate;
use debunk_core::dataset::{derive_label_with, generate_recrawl_queries, DatasetRecord, LabelPolicy, Vote};
use debunk_core::{EventPhrase, Label, Lang, RankedCluster, Tally, Tweet};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum StoreError {
    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("corrupt store file {path}: {source}")]
    Corrupt {
        path: PathBuf,
        #[source]
        source: serde_json::Error,
    },
    #[error("unknown cluster {0}")]
    UnknownCluster(String),
    #[error("invalid day: {0}")]
    InvalidDay(String),
    #[error("language code {0:?} is not usable as a store key")]
    BadLang(String),
}

/// One archived (date, lang): ranked clusters plus the member tweets they
/// refer to.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DayRecord {
    pub date: NaiveDate,
    pub lang: Lang,
    pub clusters: Vec<RankedCluster>,
    pub tweets: BTreeMap<String, Tweet>,
}

impl DayRecord {
    fn check(&self) -> Result<(), StoreError> {
        for (i, rc) in self.clusters.iter().enumerate() {
            if rc.position != i + 1 {
                return Err(StoreError::InvalidDay(format!(
                    "cluster {} at slot {} has position {}",
                    rc.cluster.cluster_id,
                    i + 1,
                    rc.position
                )));
            }
            for id in &rc.cluster.tweet_ids {
                if !self.tweets.contains_key(id) {
                    return Err(StoreError::InvalidDay(format!("member tweet {id} is missing")));
                }
            }
        }
        Ok(())
    }
}

/// The three parts shown for a cluster: where the debunking tweet points.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PartsPointedOut {
    pub urls: Vec<String>,
    pub quote_of_id: Option<String>,
    pub reply_to_id: Option<String>,
}

/// A cluster as served to reviewers.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClusterView {
    pub cluster_id: String,
    pub date: NaiveDate,
    pub lang: Lang,
    pub position: usize,
    pub headline: Option<String>,
    pub debunking_tweet: Tweet,
    pub parts_pointed_out: PartsPointedOut,
    pub avg_rank: f64,
    pub member_ids: Vec<String>,
    pub tally: Tally,
    pub label: Label,
}

/// Headline: the representative's own event phrase, else the phrase of the
/// smallest member id that has one.
fn headline(rc: &RankedCluster) -> Option<String> {
    let phrases = &rc.cluster.phrases;
    phrases
        .get(&rc.representative_tweet_id)
        .or_else(|| phrases.values().next())
        .map(|p: &EventPhrase| p.text.clone())
}

#[derive(Default)]
struct Catalog {
    days: BTreeMap<(NaiveDate, Lang), Arc<DayRecord>>,
    /// cluster id → the day holding it
    index: HashMap<String, (NaiveDate, Lang)>,
}

type VoteBook = BTreeMap<String, BTreeMap<String, Vote>>;

pub struct Store {
    dir: PathBuf,
    policy: LabelPolicy,
    catalog: RwLock<Catalog>,
    votes: RwLock<VoteBook>,
    /// Serializes writers; readers never take it.
    write_lock: Mutex<()>,
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> StoreError + '_ {
    move |source| StoreError::Io {
        path: path.to_path_buf(),
        source,
    }
}

fn check_lang(lang: &Lang) -> Result<(), StoreError> {
    let s = lang.as_str();
    if s.is_empty() || !s.chars().all(|c| c.is_ascii_alphanumeric() || c == '-' || c == '_') {
        return Err(StoreError::BadLang(s.to_string()));
    }
    Ok(())
}

/// Writes `bytes` to `path` through a temporary file and a rename.
fn write_atomic(path: &Path, bytes: &[u8]) -> Result<(), StoreError> {
    let dir = path.parent().unwrap_or(Path::new("."));
    std::fs::create_dir_all(dir).map_err(io_err(dir))?;
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(io_err(dir))?;
    tmp.write_all(bytes).map_err(io_err(path))?;
    tmp.as_file().sync_all().map_err(io_err(path))?;
    tmp.persist(path).map_err(|e| StoreError::Io {
        path: path.to_path_buf(),
        source: e.error,
    })?;
    Ok(())
}

fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T, StoreError> {
    let bytes = std::fs::read(path).map_err(io_err(path))?;
    serde_json::from_slice(&bytes).map_err(|source| StoreError::Corrupt {
        path: path.to_path_buf(),
        source,
    })
}

impl Store {
    /// Opens (creating if needed) the store under `dir` and loads every day
    /// and vote into memory.
    pub fn open(dir: impl Into<PathBuf>, policy: LabelPolicy) -> Result<Self, StoreError> {
        let dir = dir.into();
        let days_dir = dir.join("days");
        std::fs::create_dir_all(&days_dir).map_err(io_err(&days_dir))?;
        let mut catalog = Catalog::default();
        let mut entries: Vec<PathBuf> = std::fs::read_dir(&days_dir)
            .map_err(io_err(&days_dir))?
            .filter_map(|e| e.ok().map(|e| e.path()))
            .filter(|p| p.extension().is_some_and(|x| x == "json"))
            .collect();
        entries.sort();
        for path in entries {
            let day: DayRecord = read_json(&path)?;
            day.check()?;
            for rc in &day.clusters {
                catalog.index.insert(rc.cluster.cluster_id.clone(), (day.date, day.lang.clone()));
            }
            catalog.days.insert((day.date, day.lang.clone()), Arc::new(day));
        }
        let votes_path = dir.join("votes.json");
        let votes = if votes_path.exists() {
            read_json(&votes_path)?
        } else {
            VoteBook::new()
        };
        log::info!("opened store {} with {} days", dir.display(), catalog.days.len());
        Ok(Store {
            dir,
            policy,
            catalog: RwLock::new(catalog),
            votes: RwLock::new(votes),
            write_lock: Mutex::new(()),
        })
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    pub fn policy(&self) -> &LabelPolicy {
        &self.policy
    }

    fn day_path(&self, date: NaiveDate, lang: &Lang) -> PathBuf {
        self.dir.join("days").join(format!("{date}.{lang}.json"))
    }

    /// Replaces the stored day for (`date`, `lang`). Votes are keyed by
    /// cluster id and survive the replacement.
    pub fn persist_batch(
        &self,
        date: NaiveDate,
        lang: &Lang,
        ranked: Vec<RankedCluster>,
        tweets: &BTreeMap<String, Tweet>,
    ) -> Result<Arc<DayRecord>, StoreError> {
        check_lang(lang)?;
        let members: BTreeMap<String, Tweet> = ranked
            .iter()
            .flat_map(|rc| rc.cluster.tweet_ids.iter())
            .filter_map(|id| tweets.get(id).map(|t| (id.clone(), t.clone())))
            .collect();
        let day = DayRecord {
            date,
            lang: lang.clone(),
            clusters: ranked,
            tweets: members,
        };
        day.check()?;
        let bytes = serde_json::to_vec_pretty(&day).expect("day serializes");

        let _guard = self.write_lock.lock().unwrap_or_else(|e| e.into_inner());
        write_atomic(&self.day_path(date, lang), &bytes)?;
        let day = Arc::new(day);
        let mut catalog = self.catalog.write().unwrap_or_else(|e| e.into_inner());
        if let Some(old) = catalog.days.get(&(date, lang.clone())).cloned() {
            for rc in &old.clusters {
                catalog.index.remove(&rc.cluster.cluster_id);
            }
        }
        for rc in &day.clusters {
            catalog.index.insert(rc.cluster.cluster_id.clone(), (date, lang.clone()));
        }
        catalog.days.insert((date, lang.clone()), Arc::clone(&day));
        log::info!("stored {date} {lang}: {} clusters", day.clusters.len());
        Ok(day)
    }

    pub fn day(&self, date: NaiveDate, lang: &Lang) -> Option<Arc<DayRecord>> {
        let catalog = self.catalog.read().unwrap_or_else(|e| e.into_inner());
        catalog.days.get(&(date, lang.clone())).cloned()
    }

    pub fn day_count(&self) -> usize {
        self.catalog.read().unwrap_or_else(|e| e.into_inner()).days.len()
    }

    pub fn tally(&self, cluster_id: &str) -> Tally {
        let votes = self.votes.read().unwrap_or_else(|e| e.into_inner());
        votes
            .get(cluster_id)
            .map(|by_voter| Tally::from_votes(by_voter.values()))
            .unwrap_or_default()
    }

    fn view(&self, day: &DayRecord, rc: &RankedCluster) -> ClusterView {
        let rep = day
            .tweets
            .get(&rc.representative_tweet_id)
            .cloned()
            .expect("checked on persist");
        let tally = self.tally(&rc.cluster.cluster_id);
        ClusterView {
            cluster_id: rc.cluster.cluster_id.clone(),
            date: day.date,
            lang: day.lang.clone(),
            position: rc.position,
            headline: headline(rc),
            parts_pointed_out: PartsPointedOut {
                urls: rep.urls.clone(),
                quote_of_id: rep.quote_of_id.clone(),
                reply_to_id: rep.reply_to_id.clone(),
            },
            debunking_tweet: rep,
            avg_rank: rc.representative_ranks.avg_rank,
            member_ids: rc.cluster.tweet_ids.iter().cloned().collect(),
            tally,
            label: derive_label_with(&tally, &self.policy),
        }
    }

    /// The first `limit` clusters of a day in position order; empty for a
    /// day that was never archived.
    pub fn top_clusters(&self, date: NaiveDate, lang: &Lang, limit: usize) -> Vec<ClusterView> {
        let Some(day) = self.day(date, lang) else {
            return Vec::new();
        };
        day.clusters.iter().take(limit).map(|rc| self.view(&day, rc)).collect()
    }

    fn locate(&self, cluster_id: &str) -> Option<(Arc<DayRecord>, usize)> {
        let catalog = self.catalog.read().unwrap_or_else(|e| e.into_inner());
        let key = catalog.index.get(cluster_id)?;
        let day = Arc::clone(catalog.days.get(key)?);
        let slot = day.clusters.iter().position(|rc| rc.cluster.cluster_id == cluster_id)?;
        Some((day, slot))
    }

    pub fn cluster(&self, cluster_id: &str) -> Option<ClusterView> {
        let (day, slot) = self.locate(cluster_id)?;
        Some(self.view(&day, &day.clusters[slot]))
    }

    /// Stores the vote, replacing an earlier vote by the same voter on the
    /// same cluster, and returns the new tally.
    pub fn record_vote(&self, vote: Vote) -> Result<Tally, StoreError> {
        if self.locate(&vote.cluster_id).is_none() {
            return Err(StoreError::UnknownCluster(vote.cluster_id));
        }
        let _guard = self.write_lock.lock().unwrap_or_else(|e| e.into_inner());
        let mut next = self.votes.read().unwrap_or_else(|e| e.into_inner()).clone();
        let cluster_id = vote.cluster_id.clone();
        next.entry(cluster_id.clone())
            .or_default()
            .insert(vote.voter_id.clone(), vote);
        let bytes = serde_json::to_vec_pretty(&next).expect("votes serialize");
        write_atomic(&self.dir.join("votes.json"), &bytes)?;
        let tally = Tally::from_votes(next[&cluster_id].values());
        *self.votes.write().unwrap_or_else(|e| e.into_inner()) = next;
        Ok(tally)
    }

    /// Dataset records for every stored cluster with `from <= date <= to`,
    /// optionally one language, ordered by date, language and position.
    pub fn export(&self, from: NaiveDate, to: NaiveDate, lang: Option<&Lang>) -> Vec<DatasetRecord> {
        let days: Vec<Arc<DayRecord>> = {
            let catalog = self.catalog.read().unwrap_or_else(|e| e.into_inner());
            catalog
                .days
                .range((from, Lang::new(""))..)
                .take_while(|((d, _), _)| *d <= to)
                .filter(|((_, l), _)| lang.is_none_or(|want| want == l))
                .map(|(_, day)| Arc::clone(day))
                .collect()
        };
        let mut out = Vec::new();
        for day in days {
            for rc in &day.clusters {
                let tally = self.tally(&rc.cluster.cluster_id);
                out.push(DatasetRecord {
                    cluster_id: rc.cluster.cluster_id.clone(),
                    date: day.date,
                    lang: day.lang.clone(),
                    position: rc.position,
                    label: derive_label_with(&tally, &self.policy),
                    headline: headline(rc),
                    representative: day.tweets[&rc.representative_tweet_id].clone(),
                    members: rc.cluster.tweet_ids.iter().map(|id| day.tweets[id].clone()).collect(),
                    recrawl_queries: generate_recrawl_queries(&rc.cluster, &day.tweets),
                    vote_tally: tally,
                });
            }
        }
        out
    }
}

/// One JSON object per line.
pub fn to_ndjson(records: &[DatasetRecord]) -> String {
    let mut out = String::new();
    for r in records {
        out.push_str(&serde_json::to_string(r).expect("record serializes"));
        out.push('\n');
    }
    out
}

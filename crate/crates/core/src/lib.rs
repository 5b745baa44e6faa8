//! Core of the debunk pipeline.
//!
//! Tweets that contain a debunking phrase ("is fake", "というデマ", ...) are a
//! free, real-time signal that some claim is circulating and being disputed.
//! This crate turns a day of such tweets into ranked event clusters:
//!
//! 1. [`ingest`] loads line-delimited tweet records, applies the share filter
//!    and cuts the stream into daily batches per language.
//! 2. [`pattern`] compiles the debunking-pattern grammar and finds the
//!    "fake part" inside each tweet.
//! 3. [`conllu`] reads externally produced Universal Dependencies parses.
//! 4. [`extract`] walks the dependency tree from the fake part to the
//!    suspicious event phrase.
//! 5. [`embedding`], [`transport`] and [`wmd`] provide the exact Word Mover's
//!    Distance between event phrases.
//! 6. [`cluster`] groups tweets by URL, reply/quote target and phrase
//!    distance.
//! 7. [`rank`] orders tweets and clusters by attention.
//! 8. [`dataset`] holds the labeling side: vote tallies, label derivation,
//!    recrawl queries and Cohen's kappa.
//!
//! [`pipeline`] wires steps 2 to 7 together for one daily batch.

pub mod cluster;
pub mod config;
pub mod conllu;
pub mod dataset;
pub mod embedding;
pub mod extract;
pub mod ingest;
pub mod pattern;
pub mod pipeline;
pub mod rank;
pub mod transport;
pub mod wmd;

pub use cluster::{group_tweets, EventCluster, LinkEvidence, LinkReason};
pub use config::{HopDirection, Lang, LanguageProfile, RulesConfig};
pub use conllu::{parse_conllu, DependencyDocument, UdToken};
pub use dataset::{cohen_kappa, derive_label, generate_recrawl_queries, Label, Tally, Verdict};
pub use embedding::EmbeddingTable;
pub use extract::{extract_event_phrase, locate_fake_part, EventPhrase, FakePart};
pub use ingest::{filter_by_shares, load_tweets, partition_daily, DailyBatch, Tweet};
pub use pattern::{CompiledPattern, MatchSpan, PatternSpec};
pub use rank::{rank_clusters, rank_tweets, FeatureRanks, RankedCluster};
pub use wmd::{wcd_lower_bound, wmd, NBow};

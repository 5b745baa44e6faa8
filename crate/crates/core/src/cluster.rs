//! Tweet grouping into event clusters.
//!
//! Two tweets are linked when they share a normalized URL, reply to or quote
//! the same tweet, or their event phrases are closer than `tau` in Word
//! Mover's Distance. Clusters are the connected components of those links,
//! computed with union-find over tweets sorted by id so that the result does
//! not depend on input order.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::embedding::EmbeddingTable;
use crate::extract::EventPhrase;
use crate::ingest::DailyBatch;
use crate::wmd::{nbow, wcd_lower_bound, wmd, NBow};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LinkReason {
    Url,
    Reply,
    Wmd,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LinkEvidence {
    pub a: String,
    pub b: String,
    pub reason: LinkReason,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub distance: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EventCluster {
    /// Smallest member tweet id.
    pub cluster_id: String,
    pub tweet_ids: BTreeSet<String>,
    pub phrases: BTreeMap<String, EventPhrase>,
    pub link_evidence: Vec<LinkEvidence>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct GroupingOptions {
    pub tau: f64,
    /// Skip the exact solve when the centroid bound already reaches tau.
    pub centroid_prefilter: bool,
    /// Refuse batches that would need more phrase pairs than this.
    pub max_pairs: Option<usize>,
}

impl Default for GroupingOptions {
    fn default() -> Self {
        GroupingOptions {
            tau: 0.25,
            centroid_prefilter: true,
            max_pairs: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Error)]
pub enum GroupError {
    #[error("tau must be positive, got {0}")]
    BadTau(f64),
    #[error("batch needs {pairs} phrase pairs, over the cap of {cap}")]
    TooManyPairs { pairs: usize, cap: usize },
}

struct DisjointSet {
    parent: Vec<usize>,
    rank: Vec<u8>,
}

impl DisjointSet {
    fn new(n: usize) -> Self {
        DisjointSet {
            parent: (0..n).collect(),
            rank: vec![0; n],
        }
    }

    fn find(&mut self, mut x: usize) -> usize {
        let mut root = x;
        while self.parent[root] != root {
            root = self.parent[root];
        }
        while self.parent[x] != root {
            let next = self.parent[x];
            self.parent[x] = root;
            x = next;
        }
        root
    }

    fn union(&mut self, a: usize, b: usize) {
        let (a, b) = (self.find(a), self.find(b));
        if a == b {
            return;
        }
        match self.rank[a].cmp(&self.rank[b]) {
            std::cmp::Ordering::Less => self.parent[a] = b,
            std::cmp::Ordering::Greater => self.parent[b] = a,
            std::cmp::Ordering::Equal => {
                self.parent[b] = a;
                self.rank[a] += 1;
            }
        }
    }
}

const TRACKING_PARAMS: &[&str] = &[
    "fbclid", "gclid", "igshid", "mc_cid", "mc_eid", "ref_src", "ref_url", "cmpid", "ocid",
];

/// Lowercases the host, drops the fragment and tracking query parameters.
/// Strings that do not parse as URLs are only trimmed.
pub fn normalize_url(raw: &str) -> String {
    let raw = raw.trim();
    let Ok(mut url) = url::Url::parse(raw) else {
        return raw.to_string();
    };
    url.set_fragment(None);
    let twitter = matches!(
        url.host_str(),
        Some("twitter.com" | "www.twitter.com" | "mobile.twitter.com" | "x.com")
    );
    let kept: Vec<(String, String)> = url
        .query_pairs()
        .filter(|(k, _)| {
            let k = k.to_ascii_lowercase();
            !(k.starts_with("utm_") || TRACKING_PARAMS.contains(&k.as_str()) || (twitter && (k == "s" || k == "t")))
        })
        .map(|(k, v)| (k.into_owned(), v.into_owned()))
        .collect();
    if kept.is_empty() {
        url.set_query(None);
    } else {
        url.query_pairs_mut().clear().extend_pairs(kept);
    }
    url.to_string()
}

pub fn group_tweets(
    batch: &DailyBatch,
    phrases: &BTreeMap<String, EventPhrase>,
    tau: f64,
    table: &EmbeddingTable,
) -> Result<Vec<EventCluster>, GroupError> {
    group_tweets_with(
        batch,
        phrases,
        table,
        &GroupingOptions {
            tau,
            ..GroupingOptions::default()
        },
    )
}

/// Links keyed by a shared attribute: each later tweet is tied to the first
/// tweet seen with the same key.
fn key_edges<'a>(
    keys: impl Iterator<Item = (usize, String)>,
    ids: &[&'a str],
    reason: LinkReason,
    out: &mut Vec<(usize, usize, LinkEvidence)>,
) {
    let mut first: HashMap<String, usize> = HashMap::new();
    let mut seen_pairs = BTreeSet::new();
    for (idx, key) in keys {
        let anchor = *first.entry(key).or_insert(idx);
        if anchor != idx && seen_pairs.insert((anchor, idx)) {
            out.push((
                anchor,
                idx,
                LinkEvidence {
                    a: ids[anchor].to_string(),
                    b: ids[idx].to_string(),
                    reason,
                    distance: None,
                },
            ));
        }
    }
}

pub fn group_tweets_with(
    batch: &DailyBatch,
    phrases: &BTreeMap<String, EventPhrase>,
    table: &EmbeddingTable,
    opts: &GroupingOptions,
) -> Result<Vec<EventCluster>, GroupError> {
    if !(opts.tau > 0.0) {
        return Err(GroupError::BadTau(opts.tau));
    }
    let mut tweets: Vec<_> = batch.tweets.iter().collect();
    tweets.sort_by(|a, b| a.id.cmp(&b.id));
    let ids: Vec<&str> = tweets.iter().map(|t| t.id.as_str()).collect();

    let mut edges: Vec<(usize, usize, LinkEvidence)> = Vec::new();
    key_edges(
        tweets
            .iter()
            .enumerate()
            .flat_map(|(i, t)| t.urls.iter().map(move |u| (i, normalize_url(u)))),
        &ids,
        LinkReason::Url,
        &mut edges,
    );
    key_edges(
        tweets.iter().enumerate().flat_map(|(i, t)| {
            t.reply_to_id
                .iter()
                .chain(t.quote_of_id.iter())
                .map(move |target| (i, target.clone()))
        }),
        &ids,
        LinkReason::Reply,
        &mut edges,
    );

    let bags: Vec<(usize, NBow)> = tweets
        .iter()
        .enumerate()
        .filter_map(|(i, t)| {
            let phrase = phrases.get(&t.id)?;
            match nbow(&phrase.tokens, table) {
                Ok(bag) => Some((i, bag)),
                Err(e) => {
                    log::debug!("tweet {}: phrase not linkable by distance: {e}", t.id);
                    None
                }
            }
        })
        .collect();
    let pairs = bags.len() * bags.len().saturating_sub(1) / 2;
    if let Some(cap) = opts.max_pairs {
        if pairs > cap {
            return Err(GroupError::TooManyPairs { pairs, cap });
        }
    }
    let wmd_edges: Vec<(usize, usize, LinkEvidence)> = (0..bags.len())
        .into_par_iter()
        .flat_map_iter(|x| {
            let bags = &bags;
            let ids = &ids;
            (x + 1..bags.len()).filter_map(move |y| {
                let (i, a) = &bags[x];
                let (j, b) = &bags[y];
                if opts.centroid_prefilter && wcd_lower_bound(a, b, table) >= opts.tau {
                    return None;
                }
                let d = wmd(a, b, table);
                (d < opts.tau).then(|| {
                    (
                        *i,
                        *j,
                        LinkEvidence {
                            a: ids[*i].to_string(),
                            b: ids[*j].to_string(),
                            reason: LinkReason::Wmd,
                            distance: Some(d),
                        },
                    )
                })
            })
        })
        .collect();
    edges.extend(wmd_edges);

    let mut dsu = DisjointSet::new(tweets.len());
    for (a, b, _) in &edges {
        dsu.union(*a, *b);
    }
    let mut by_root: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for i in 0..tweets.len() {
        by_root.entry(dsu.find(i)).or_default().push(i);
    }
    let mut evidence_by_root: HashMap<usize, Vec<LinkEvidence>> = HashMap::new();
    for (a, _, ev) in edges {
        evidence_by_root.entry(dsu.find(a)).or_default().push(ev);
    }

    let mut clusters: Vec<EventCluster> = by_root
        .into_iter()
        .map(|(root, members)| {
            let tweet_ids: BTreeSet<String> = members.iter().map(|&i| ids[i].to_string()).collect();
            let phrases = members
                .iter()
                .filter_map(|&i| phrases.get(ids[i]).map(|p| (ids[i].to_string(), p.clone())))
                .collect();
            let mut link_evidence = evidence_by_root.remove(&root).unwrap_or_default();
            link_evidence.sort_by(|x, y| (x.reason, &x.a, &x.b).cmp(&(y.reason, &y.a, &y.b)));
            EventCluster {
                cluster_id: tweet_ids.first().expect("non-empty component").clone(),
                tweet_ids,
                phrases,
                link_evidence,
            }
        })
        .collect();
    clusters.sort_by(|a, b| a.cluster_id.cmp(&b.cluster_id));
    Ok(clusters)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::Lang;
    use crate::ingest::Tweet;
    use chrono::NaiveDate;

    fn tweet(id: &str) -> Tweet {
        Tweet {
            id: id.into(),
            lang: Lang::new("en"),
            text: String::new(),
            created_at: "2019-12-07T10:00:00Z".parse().unwrap(),
            share_count: 5,
            like_count: 0,
            urls: vec![],
            reply_to_id: None,
            quote_of_id: None,
            retweeter_count: 0,
            follower_retweeter_count: 0,
            author_verified: false,
            retweet_of_id: None,
        }
    }

    fn phrase(id: &str, tokens: &[&str]) -> EventPhrase {
        EventPhrase {
            tweet_id: id.into(),
            text: tokens.join(" "),
            tokens: tokens.iter().map(|s| s.to_string()).collect(),
            token_indices: vec![],
            hop_count: 0,
        }
    }

    fn batch(tweets: Vec<Tweet>) -> DailyBatch {
        DailyBatch {
            date: NaiveDate::from_ymd_opt(2019, 12, 7).unwrap(),
            lang: Lang::new("en"),
            tweets,
        }
    }

    fn table() -> EmbeddingTable {
        let mut t = EmbeddingTable::new(1);
        t.insert("moon", &[0.0]);
        t.insert("lunar", &[0.2]);
        t.insert("alien", &[5.0]);
        t
    }

    #[test]
    fn shared_url_links_tweets() {
        let mut a = tweet("1");
        a.urls = vec!["https://Example.com/story#top".into()];
        let mut b = tweet("2");
        b.urls = vec!["https://example.com/story?utm_source=tw".into()];
        let clusters = group_tweets(&batch(vec![a, b]), &BTreeMap::new(), 0.25, &table()).unwrap();
        assert_eq!(clusters.len(), 1);
        assert_eq!(clusters[0].link_evidence[0].reason, LinkReason::Url);
        assert_eq!(clusters[0].cluster_id, "1");
    }

    #[test]
    fn lonely_tweet_is_a_singleton() {
        let clusters = group_tweets(&batch(vec![tweet("9")]), &BTreeMap::new(), 0.25, &table()).unwrap();
        assert_eq!(clusters.len(), 1);
        assert!(clusters[0].link_evidence.is_empty());
    }

    #[test]
    fn url_and_distance_links_chain() {
        let mut a = tweet("A");
        a.urls = vec!["https://u.example/x".into()];
        let mut b = tweet("B");
        b.urls = vec!["https://u.example/x".into()];
        let c = tweet("C");
        let phrases: BTreeMap<_, _> = [("B".to_string(), phrase("B", &["moon"])), ("C".to_string(), phrase("C", &["lunar"]))]
            .into_iter()
            .collect();
        let clusters = group_tweets(&batch(vec![c, b, a]), &phrases, 0.25, &table()).unwrap();
        assert_eq!(clusters.len(), 1);
        assert_eq!(clusters[0].tweet_ids.len(), 3);
        let wmd_ev = clusters[0].link_evidence.iter().find(|e| e.reason == LinkReason::Wmd).unwrap();
        assert!((wmd_ev.distance.unwrap() - 0.2).abs() < 1e-12);
    }

    #[test]
    fn threshold_is_strict_and_replies_link() {
        let mut a = tweet("1");
        a.reply_to_id = Some("77".into());
        let mut b = tweet("2");
        b.quote_of_id = Some("77".into());
        let c = tweet("3");
        let phrases: BTreeMap<_, _> = [("1".to_string(), phrase("1", &["moon"])), ("3".to_string(), phrase("3", &["lunar"]))]
            .into_iter()
            .collect();
        let split = group_tweets(&batch(vec![a.clone(), b.clone(), c.clone()]), &phrases, 0.2, &table()).unwrap();
        assert_eq!(split.len(), 2);
        let joined = group_tweets(&batch(vec![a, b, c]), &phrases, 0.2000001, &table()).unwrap();
        assert_eq!(joined.len(), 1);
    }

    #[test]
    fn oov_phrases_only_skip_distance_links() {
        let phrases: BTreeMap<_, _> = [("1".to_string(), phrase("1", &["zzz"])), ("2".to_string(), phrase("2", &["zzz"]))]
            .into_iter()
            .collect();
        let clusters = group_tweets(&batch(vec![tweet("1"), tweet("2")]), &phrases, 0.25, &table()).unwrap();
        assert_eq!(clusters.len(), 2);
    }

    #[test]
    fn bad_tau_and_pair_cap() {
        assert!(matches!(
            group_tweets(&batch(vec![]), &BTreeMap::new(), 0.0, &table()),
            Err(GroupError::BadTau(_))
        ));
        let phrases: BTreeMap<_, _> = ["1", "2", "3"].iter().map(|id| (id.to_string(), phrase(id, &["moon"]))).collect();
        let opts = GroupingOptions {
            max_pairs: Some(2),
            ..GroupingOptions::default()
        };
        let err = group_tweets_with(&batch(vec![tweet("1"), tweet("2"), tweet("3")]), &phrases, &table(), &opts);
        assert_eq!(err, Err(GroupError::TooManyPairs { pairs: 3, cap: 2 }));
    }

    #[test]
    fn url_normalization() {
        assert_eq!(normalize_url("HTTPS://Example.COM/a?b=1#frag"), "https://example.com/a?b=1");
        assert_eq!(normalize_url("https://x.com/u/status/1?s=20&t=abc"), "https://x.com/u/status/1");
        assert_eq!(normalize_url("https://blog.example/?s=moon"), "https://blog.example/?s=moon");
        assert_eq!(normalize_url(" not a url "), "not a url");
    }
}

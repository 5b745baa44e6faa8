//! Vote tallies, labels, recrawl queries and annotator agreement.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use chrono::{DateTime, NaiveDate, Utc};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::cluster::{normalize_url, EventCluster};
use crate::config::Lang;
use crate::ingest::Tweet;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Fake,
    NotFake,
}

impl FromStr for Verdict {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "fake" => Ok(Verdict::Fake),
            "not_fake" => Ok(Verdict::NotFake),
            other => Err(format!("unknown verdict {other:?}")),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Vote {
    pub cluster_id: String,
    pub voter_id: String,
    pub verdict: Verdict,
    pub cast_at: DateTime<Utc>,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Tally {
    pub fake: u64,
    pub not_fake: u64,
}

impl Tally {
    pub fn total(&self) -> u64 {
        self.fake + self.not_fake
    }

    pub fn from_votes<'a>(votes: impl IntoIterator<Item = &'a Vote>) -> Self {
        votes.into_iter().fold(Tally::default(), |mut t, v| {
            match v.verdict {
                Verdict::Fake => t.fake += 1,
                Verdict::NotFake => t.not_fake += 1,
            }
            t
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Label {
    Fake,
    NotFake,
    Unverified,
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Label::Fake => "fake",
            Label::NotFake => "not_fake",
            Label::Unverified => "unverified",
        })
    }
}

/// Quorum and majority needed before a cluster gets a definite label.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LabelPolicy {
    pub min_votes: u64,
    pub majority: f64,
}

impl Default for LabelPolicy {
    fn default() -> Self {
        LabelPolicy {
            min_votes: 5,
            majority: 0.6,
        }
    }
}

pub fn derive_label(tally: &Tally) -> Label {
    derive_label_with(tally, &LabelPolicy::default())
}

pub fn derive_label_with(tally: &Tally, policy: &LabelPolicy) -> Label {
    let total = tally.total();
    if total == 0 || total < policy.min_votes {
        return Label::Unverified;
    }
    let share = |n: u64| n as f64 / total as f64;
    if tally.fake > tally.not_fake && share(tally.fake) >= policy.majority {
        Label::Fake
    } else if tally.not_fake > tally.fake && share(tally.not_fake) >= policy.majority {
        Label::NotFake
    } else {
        Label::Unverified
    }
}

/// `url:<normalized>` for every member URL, then each distinct event phrase
/// as a quoted keyword query. Members are visited in id order.
pub fn generate_recrawl_queries(cluster: &EventCluster, tweets: &BTreeMap<String, Tweet>) -> Vec<String> {
    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    let mut push = |q: String| {
        if seen.insert(q.clone()) {
            out.push(q);
        }
    };
    for id in &cluster.tweet_ids {
        if let Some(t) = tweets.get(id) {
            for u in &t.urls {
                push(format!("url:{}", normalize_url(u)));
            }
        }
    }
    for phrase in cluster.phrases.values() {
        let keyword = phrase.text.replace('"', "");
        let keyword = keyword.trim();
        if !keyword.is_empty() {
            push(format!("\"{keyword}\""));
        }
    }
    out
}

/// One exported cluster.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DatasetRecord {
    pub cluster_id: String,
    pub date: NaiveDate,
    pub lang: Lang,
    pub position: usize,
    pub label: Label,
    pub headline: Option<String>,
    pub representative: Tweet,
    pub members: Vec<Tweet>,
    pub recrawl_queries: Vec<String>,
    pub vote_tally: Tally,
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum KappaError {
    #[error("label lists differ in length ({0} vs {1})")]
    LengthMismatch(usize, usize),
    #[error("label lists are empty")]
    Empty,
}

/// Cohen's kappa for two annotators over the same items.
pub fn cohen_kappa<T: Ord>(a: &[T], b: &[T]) -> Result<f64, KappaError> {
    if a.len() != b.len() {
        return Err(KappaError::LengthMismatch(a.len(), b.len()));
    }
    if a.is_empty() {
        return Err(KappaError::Empty);
    }
    let n = a.len() as f64;
    let agree = a.iter().zip(b).filter(|(x, y)| x == y).count() as f64;
    let p_o = agree / n;
    let mut marginals: BTreeMap<&T, (f64, f64)> = BTreeMap::new();
    for x in a {
        marginals.entry(x).or_default().0 += 1.0;
    }
    for y in b {
        marginals.entry(y).or_default().1 += 1.0;
    }
    let p_e: f64 = marginals.values().map(|(ca, cb)| (ca / n) * (cb / n)).sum();
    if p_e >= 1.0 {
        return Ok(if p_o >= 1.0 { 1.0 } else { 0.0 });
    }
    Ok((p_o - p_e) / (1.0 - p_e))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::extract::EventPhrase;

    #[test]
    fn label_thresholds() {
        let t = |fake, not_fake| Tally { fake, not_fake };
        assert_eq!(derive_label(&t(0, 0)), Label::Unverified);
        assert_eq!(derive_label(&t(6, 1)), Label::Fake);
        assert_eq!(derive_label(&t(3, 3)), Label::Unverified);
        assert_eq!(derive_label(&t(4, 0)), Label::Unverified);
        assert_eq!(derive_label(&t(2, 3)), Label::NotFake);
        assert_eq!(derive_label(&t(4, 3)), Label::Unverified);
    }

    #[test]
    fn tally_counts_votes() {
        let vote = |voter: &str, verdict| Vote {
            cluster_id: "c".into(),
            voter_id: voter.into(),
            verdict,
            cast_at: "2019-12-07T10:00:00Z".parse().unwrap(),
        };
        let votes = [vote("a", Verdict::Fake), vote("b", Verdict::Fake), vote("c", Verdict::NotFake)];
        assert_eq!(Tally::from_votes(&votes), Tally { fake: 2, not_fake: 1 });
    }

    fn tweet(id: &str, urls: &[&str]) -> Tweet {
        Tweet {
            id: id.into(),
            lang: Lang::new("en"),
            text: String::new(),
            created_at: "2019-12-07T10:00:00Z".parse().unwrap(),
            share_count: 5,
            like_count: 0,
            urls: urls.iter().map(|s| s.to_string()).collect(),
            reply_to_id: None,
            quote_of_id: None,
            retweeter_count: 0,
            follower_retweeter_count: 0,
            author_verified: false,
            retweet_of_id: None,
        }
    }

    #[test]
    fn recrawl_queries() {
        let u = "https://news.example/moon";
        let tweets: BTreeMap<_, _> = [tweet("1", &[u]), tweet("2", &[u]), tweet("3", &[])]
            .into_iter()
            .map(|t| (t.id.clone(), t))
            .collect();
        let mut phrases = BTreeMap::new();
        phrases.insert(
            "1".to_string(),
            EventPhrase {
                tweet_id: "1".into(),
                text: "moon base".into(),
                tokens: vec!["moon".into(), "base".into()],
                token_indices: vec![],
                hop_count: 0,
            },
        );
        let cluster = EventCluster {
            cluster_id: "1".into(),
            tweet_ids: ["1", "2"].iter().map(|s| s.to_string()).collect(),
            phrases,
            link_evidence: vec![],
        };
        assert_eq!(generate_recrawl_queries(&cluster, &tweets), [format!("url:{u}"), "\"moon base\"".to_string()]);
        let bare = EventCluster {
            cluster_id: "3".into(),
            tweet_ids: ["3".to_string()].into_iter().collect(),
            phrases: BTreeMap::new(),
            link_evidence: vec![],
        };
        assert!(generate_recrawl_queries(&bare, &tweets).is_empty());
    }

    #[test]
    fn kappa_hand_examples() {
        assert_eq!(cohen_kappa(&[1, 0, 1], &[1, 0, 1]).unwrap(), 1.0);
        assert_eq!(cohen_kappa(&[1, 1, 1], &[1, 1, 1]).unwrap(), 1.0);
        assert!(cohen_kappa(&[1, 1, 0, 0], &[1, 0, 1, 0]).unwrap().abs() < 1e-15);
        // p_o = 3/4, p_e = 3/4·1/2 + 1/4·1/2 = 1/2
        assert_eq!(cohen_kappa(&[1, 1, 1, 0], &[1, 1, 0, 0]).unwrap(), 0.5);
        // p_o = 4/5, p_e = 3/5·2/5 + 2/5·3/5 = 12/25, kappa = 8/13
        assert!((cohen_kappa(&[1, 1, 1, 0, 0], &[1, 1, 0, 0, 0]).unwrap() - 8.0 / 13.0).abs() < 1e-15);
        assert_eq!(cohen_kappa(&[1], &[1, 0]), Err(KappaError::LengthMismatch(1, 2)));
        assert_eq!(cohen_kappa::<u8>(&[], &[]), Err(KappaError::Empty));
    }
}

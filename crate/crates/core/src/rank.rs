//! Attention ranking.
//!
//! Every tweet gets three dense ranks: likes (more is better), retweets
//! (more is better) and public score (lower is better, i.e. the tweet spread
//! beyond its author's followers). The attention rank is their mean. A
//! cluster is represented by its best-ranked member, and clusters are ordered
//! by their representatives.

use std::cmp::Ordering;
use std::collections::{BTreeMap, HashMap};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::cluster::EventCluster;
use crate::ingest::Tweet;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FeatureRanks {
    pub tweet_id: String,
    pub like_rank: usize,
    pub retweet_rank: usize,
    pub public_rank: usize,
    pub avg_rank: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RankedCluster {
    pub cluster: EventCluster,
    pub representative_tweet_id: String,
    pub representative_ranks: FeatureRanks,
    /// 1 is the highest attention.
    pub position: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum RankError {
    #[error("cannot rank an empty set of tweets")]
    Empty,
}

/// Share of retweeters who follow the author; 1.0 when nobody retweeted.
pub fn public_score(t: &Tweet) -> f64 {
    if t.retweeter_count == 0 {
        1.0
    } else {
        t.follower_retweeter_count as f64 / t.retweeter_count as f64
    }
}

/// Dense ranks of `values`, where `better` orders the best value first.
fn dense_ranks<T: Copy>(values: &[T], better: impl Fn(&T, &T) -> Ordering) -> Vec<usize> {
    let mut distinct: Vec<T> = values.to_vec();
    distinct.sort_by(&better);
    distinct.dedup_by(|a, b| better(a, b) == Ordering::Equal);
    values
        .iter()
        .map(|v| {
            distinct
                .binary_search_by(|probe| better(probe, v))
                .expect("value is among the distinct values")
                + 1
        })
        .collect()
}

fn by_attention(a: &FeatureRanks, b: &FeatureRanks) -> Ordering {
    a.avg_rank
        .total_cmp(&b.avg_rank)
        .then_with(|| a.tweet_id.cmp(&b.tweet_id))
}

/// Ranks tweets, best first (ties by id).
pub fn rank_tweets(tweets: &[Tweet]) -> Result<Vec<FeatureRanks>, RankError> {
    if tweets.is_empty() {
        return Err(RankError::Empty);
    }
    let likes: Vec<u64> = tweets.iter().map(|t| t.like_count).collect();
    let shares: Vec<u64> = tweets.iter().map(|t| t.share_count).collect();
    let public: Vec<f64> = tweets.iter().map(public_score).collect();
    let like_rank = dense_ranks(&likes, |a, b| b.cmp(a));
    let retweet_rank = dense_ranks(&shares, |a, b| b.cmp(a));
    let public_rank = dense_ranks(&public, |a, b| a.total_cmp(b));
    let mut out: Vec<FeatureRanks> = tweets
        .iter()
        .enumerate()
        .map(|(i, t)| FeatureRanks {
            tweet_id: t.id.clone(),
            like_rank: like_rank[i],
            retweet_rank: retweet_rank[i],
            public_rank: public_rank[i],
            avg_rank: (like_rank[i] + retweet_rank[i] + public_rank[i]) as f64 / 3.0,
        })
        .collect();
    out.sort_by(by_attention);
    Ok(out)
}

/// Picks each cluster's representative from a global ranking of all member
/// tweets and orders clusters by their representatives. Members missing from
/// `tweets` are ignored; a cluster with no known member is dropped.
pub fn rank_clusters(clusters: &[EventCluster], tweets: &BTreeMap<String, Tweet>) -> Vec<RankedCluster> {
    let members: Vec<Tweet> = clusters
        .iter()
        .flat_map(|c| c.tweet_ids.iter())
        .filter_map(|id| tweets.get(id).cloned())
        .collect();
    let Ok(ranks) = rank_tweets(&members) else {
        return Vec::new();
    };
    let by_id: HashMap<&str, &FeatureRanks> = ranks.iter().map(|r| (r.tweet_id.as_str(), r)).collect();
    let mut ranked: Vec<RankedCluster> = clusters
        .iter()
        .filter_map(|c| {
            let best = c
                .tweet_ids
                .iter()
                .filter_map(|id| by_id.get(id.as_str()).copied())
                .min_by(|a, b| by_attention(a, b));
            if best.is_none() {
                log::warn!("cluster {} has no rankable member", c.cluster_id);
            }
            let best = best?;
            Some(RankedCluster {
                cluster: c.clone(),
                representative_tweet_id: best.tweet_id.clone(),
                representative_ranks: best.clone(),
                position: 0,
            })
        })
        .collect();
    ranked.sort_by(|a, b| {
        by_attention(&a.representative_ranks, &b.representative_ranks)
            .then_with(|| a.cluster.cluster_id.cmp(&b.cluster.cluster_id))
    });
    for (i, rc) in ranked.iter_mut().enumerate() {
        rc.position = i + 1;
    }
    ranked
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::Lang;
    use std::collections::BTreeSet;

    fn tweet(id: &str, likes: u64, shares: u64, rts: u64, followers: u64) -> Tweet {
        Tweet {
            id: id.into(),
            lang: Lang::new("en"),
            text: String::new(),
            created_at: "2019-12-07T10:00:00Z".parse().unwrap(),
            share_count: shares,
            like_count: likes,
            urls: vec![],
            reply_to_id: None,
            quote_of_id: None,
            retweeter_count: rts,
            follower_retweeter_count: followers,
            author_verified: false,
            retweet_of_id: None,
        }
    }

    /// T1(L=100,R=10,PS=0.9), T2(L=50,R=50,PS=0.5), T3(L=10,R=20,PS=0.1)
    fn worked_example() -> Vec<Tweet> {
        vec![
            tweet("T1", 100, 10, 10, 9),
            tweet("T2", 50, 50, 10, 5),
            tweet("T3", 10, 20, 10, 1),
        ]
    }

    fn cluster(ids: &[&str]) -> EventCluster {
        let tweet_ids: BTreeSet<String> = ids.iter().map(|s| s.to_string()).collect();
        EventCluster {
            cluster_id: tweet_ids.first().unwrap().clone(),
            tweet_ids,
            phrases: Default::default(),
            link_evidence: vec![],
        }
    }

    #[test]
    fn public_score_cases() {
        assert!((public_score(&tweet("a", 0, 0, 10, 4)) - 0.4).abs() < 1e-15);
        assert_eq!(public_score(&tweet("a", 0, 0, 0, 0)), 1.0);
        assert_eq!(public_score(&tweet("a", 0, 0, 7, 7)), 1.0);
    }

    #[test]
    fn worked_example_order() {
        let ranks = rank_tweets(&worked_example()).unwrap();
        let order: Vec<_> = ranks.iter().map(|r| r.tweet_id.as_str()).collect();
        assert_eq!(order, ["T2", "T3", "T1"]);
        assert_eq!(ranks[0].avg_rank, 5.0 / 3.0);
        assert_eq!(ranks[1].avg_rank, 2.0);
        assert_eq!(ranks[2].avg_rank, 7.0 / 3.0);
        assert_eq!((ranks[2].like_rank, ranks[2].retweet_rank, ranks[2].public_rank), (1, 3, 3));
    }

    #[test]
    fn single_and_tied_tweets() {
        let one = rank_tweets(&[tweet("x", 3, 3, 3, 1)]).unwrap();
        assert_eq!((one[0].like_rank, one[0].retweet_rank, one[0].public_rank, one[0].avg_rank), (1, 1, 1, 1.0));
        let tied = rank_tweets(&[tweet("b", 3, 3, 3, 1), tweet("a", 3, 3, 3, 1)]).unwrap();
        assert_eq!(tied[0].avg_rank, tied[1].avg_rank);
        assert_eq!(tied[0].tweet_id, "a");
        assert_eq!(rank_tweets(&[]), Err(RankError::Empty));
    }

    #[test]
    fn dense_ranks_share_values() {
        assert_eq!(dense_ranks(&[5u64, 9, 5, 1], |a, b| b.cmp(a)), [2, 1, 2, 3]);
    }

    #[test]
    fn clusters_follow_representatives() {
        let tweets: BTreeMap<_, _> = worked_example().into_iter().map(|t| (t.id.clone(), t)).collect();
        let ranked = rank_clusters(&[cluster(&["T1"]), cluster(&["T2"])], &tweets);
        assert_eq!(ranked[0].cluster.cluster_id, "T2");
        assert_eq!(ranked[0].position, 1);
        assert_eq!(ranked[1].position, 2);

        let ranked = rank_clusters(&[cluster(&["T1", "T3"]), cluster(&["T2"])], &tweets);
        assert_eq!(ranked[0].representative_tweet_id, "T2");
        assert_eq!(ranked[1].representative_tweet_id, "T3");
        assert_eq!(ranked[1].representative_ranks.avg_rank, 2.0);

        let ranked = rank_clusters(&[cluster(&["T1"])], &tweets);
        assert_eq!(ranked[0].position, 1);
    }
}

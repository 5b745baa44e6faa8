//! Tweet records: loading, the share filter and daily batching.
//!
//! Records are line-delimited JSON objects with snake_case keys and RFC 3339
//! timestamps. The same format is used for test fixtures and for the tweets
//! the `crawl` step stores on disk.

use std::collections::{BTreeMap, HashMap};
use std::fs::File;
use std::io::{BufRead, BufReader, Write};
use std::path::PathBuf;

use chrono::{DateTime, FixedOffset, NaiveDate, Utc};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::config::Lang;

/// One SNS post as crawled.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Tweet {
    pub id: String,
    pub lang: Lang,
    pub text: String,
    pub created_at: DateTime<Utc>,
    /// Retweet count.
    pub share_count: u64,
    pub like_count: u64,
    pub urls: Vec<String>,
    pub reply_to_id: Option<String>,
    pub quote_of_id: Option<String>,
    pub retweeter_count: u64,
    /// Retweeters who follow the author.
    pub follower_retweeter_count: u64,
    pub author_verified: bool,
    /// Set on plain retweets; they are folded into the source tweet on load.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub retweet_of_id: Option<String>,
}

impl Tweet {
    pub fn check_invariants(&self, supported: &[Lang]) -> Result<(), String> {
        if self.id.is_empty() {
            return Err("empty id".into());
        }
        if self.follower_retweeter_count > self.retweeter_count {
            return Err(format!(
                "follower_retweeter_count {} exceeds retweeter_count {}",
                self.follower_retweeter_count, self.retweeter_count
            ));
        }
        if !supported.is_empty() && !supported.contains(&self.lang) {
            return Err(format!("unsupported language {:?}", self.lang.as_str()));
        }
        Ok(())
    }

    /// Serializes the record as one canonical JSON line (no trailing newline).
    pub fn to_record_line(&self) -> String {
        serde_json::to_string(self).expect("tweet serializes")
    }
}

/// All tweets of one local calendar day in one language.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DailyBatch {
    pub date: NaiveDate,
    pub lang: Lang,
    pub tweets: Vec<Tweet>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RecordDiagnostic {
    pub line: usize,
    pub message: String,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct LoadReport {
    pub tweets: Vec<Tweet>,
    pub diagnostics: Vec<RecordDiagnostic>,
}

#[derive(Debug, Error)]
pub enum IngestError {
    #[error("cannot read tweet source {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

/// Anything that can hand over a set of crawled tweets.
///
/// Only the file-backed source ships; a live search client would implement
/// the same trait.
pub trait TweetSource {
    fn describe(&self) -> String;
    fn fetch(&self, supported: &[Lang]) -> Result<LoadReport, IngestError>;
}

/// Line-delimited JSON file.
#[derive(Clone, Debug)]
pub struct FileSource {
    pub path: PathBuf,
}

impl FileSource {
    pub fn new(path: impl Into<PathBuf>) -> Self {
        FileSource { path: path.into() }
    }
}

impl TweetSource for FileSource {
    fn describe(&self) -> String {
        self.path.display().to_string()
    }

    fn fetch(&self, supported: &[Lang]) -> Result<LoadReport, IngestError> {
        let io_err = |source| IngestError::Io {
            path: self.describe(),
            source,
        };
        let file = File::open(&self.path).map_err(io_err)?;
        read_records(BufReader::new(file), supported).map_err(io_err)
    }
}

pub fn load_tweets(source: &dyn TweetSource, supported: &[Lang]) -> Result<LoadReport, IngestError> {
    let report = source.fetch(supported)?;
    for d in &report.diagnostics {
        log::warn!("{}:{}: {}", source.describe(), d.line, d.message);
    }
    Ok(report)
}

/// Parses records from a reader. Bad lines become diagnostics; only I/O
/// failures abort.
pub fn read_records<R: BufRead>(reader: R, supported: &[Lang]) -> std::io::Result<LoadReport> {
    let mut report = LoadReport::default();
    let mut parsed = Vec::new();
    for (idx, line) in reader.lines().enumerate() {
        let line = line?;
        let line_no = idx + 1;
        if line.trim().is_empty() {
            continue;
        }
        match serde_json::from_str::<Tweet>(&line) {
            Ok(tweet) => match tweet.check_invariants(supported) {
                Ok(()) => parsed.push((line_no, tweet)),
                Err(message) => report.diagnostics.push(RecordDiagnostic {
                    line: line_no,
                    message,
                }),
            },
            Err(e) => report.diagnostics.push(RecordDiagnostic {
                line: line_no,
                message: format!("malformed record: {e}"),
            }),
        }
    }
    let (tweets, dups) = dedup_retweets(parsed);
    report.tweets = tweets;
    report.diagnostics.extend(dups);
    report.diagnostics.sort_by_key(|d| d.line);
    Ok(report)
}

pub fn write_records<W: Write>(mut out: W, tweets: &[Tweet]) -> std::io::Result<()> {
    for t in tweets {
        writeln!(out, "{}", t.to_record_line())?;
    }
    Ok(())
}

/// Folds plain retweets into their source tweet.
///
/// A retweet whose source is present is dropped. Otherwise the first retweet
/// seen stands in for the source: it takes the source id and loses the
/// `RT @user:` prefix. Its counters are the source's, as the crawler copies
/// them from the embedded original.
fn dedup_retweets(parsed: Vec<(usize, Tweet)>) -> (Vec<Tweet>, Vec<RecordDiagnostic>) {
    let originals: HashMap<String, ()> = parsed
        .iter()
        .filter(|(_, t)| t.retweet_of_id.is_none())
        .map(|(_, t)| (t.id.clone(), ()))
        .collect();
    let mut seen: HashMap<String, usize> = HashMap::new();
    let mut out = Vec::with_capacity(parsed.len());
    let mut diagnostics = Vec::new();
    for (line, mut tweet) in parsed {
        if let Some(source) = tweet.retweet_of_id.take() {
            if originals.contains_key(&source) || seen.contains_key(&source) {
                continue;
            }
            tweet.id = source;
            tweet.text = strip_retweet_prefix(&tweet.text).to_string();
        }
        if let Some(first) = seen.get(&tweet.id) {
            diagnostics.push(RecordDiagnostic {
                line,
                message: format!("duplicate tweet id {} (first seen on line {first})", tweet.id),
            });
            continue;
        }
        seen.insert(tweet.id.clone(), line);
        out.push(tweet);
    }
    (out, diagnostics)
}

fn strip_retweet_prefix(text: &str) -> &str {
    if let Some(rest) = text.strip_prefix("RT @") {
        if let Some(pos) = rest.find(": ") {
            return &rest[pos + 2..];
        }
    }
    text
}

/// Keeps tweets shared strictly more than `min_exclusive` times.
pub fn filter_by_shares(tweets: Vec<Tweet>, min_exclusive: u64) -> Vec<Tweet> {
    tweets
        .into_iter()
        .filter(|t| t.share_count > min_exclusive)
        .collect()
}

pub fn local_date(at: &DateTime<Utc>, tz: FixedOffset) -> NaiveDate {
    at.with_timezone(&tz).date_naive()
}

/// Splits tweets into batches keyed by (local day, language), sorted by
/// date then language. Tweet order inside a batch follows the input.
pub fn partition_daily(tweets: Vec<Tweet>, tz: FixedOffset) -> Vec<DailyBatch> {
    let mut groups: BTreeMap<(NaiveDate, Lang), Vec<Tweet>> = BTreeMap::new();
    for t in tweets {
        let key = (local_date(&t.created_at, tz), t.lang.clone());
        groups.entry(key).or_default().push(t);
    }
    groups
        .into_iter()
        .map(|((date, lang), tweets)| DailyBatch { date, lang, tweets })
        .collect()
}

/// Parses `+09:00`, `-05:30`, `Z` or `UTC`.
pub fn parse_tz_offset(s: &str) -> Option<FixedOffset> {
    let s = s.trim();
    if s.eq_ignore_ascii_case("z") || s.eq_ignore_ascii_case("utc") {
        return FixedOffset::east_opt(0);
    }
    let (sign, rest) = match s.as_bytes().first()? {
        b'+' => (1, &s[1..]),
        b'-' => (-1, &s[1..]),
        _ => return None,
    };
    let (h, m) = rest.split_once(':').unwrap_or((rest, "0"));
    let h: i32 = h.parse().ok()?;
    let m: i32 = m.parse().ok()?;
    if h > 23 || m > 59 {
        return None;
    }
    FixedOffset::east_opt(sign * (h * 3600 + m * 60))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Cursor;

    fn langs() -> Vec<Lang> {
        vec![Lang::new("en"), Lang::new("ja")]
    }

    fn tweet(id: &str, lang: &str, at: &str, shares: u64) -> Tweet {
        Tweet {
            id: id.into(),
            lang: Lang::new(lang),
            text: format!("tweet {id}"),
            created_at: at.parse().unwrap(),
            share_count: shares,
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

    #[test]
    fn empty_input_gives_no_tweets() {
        let report = read_records(Cursor::new(""), &langs()).unwrap();
        assert!(report.tweets.is_empty());
        assert!(report.diagnostics.is_empty());
    }

    #[test]
    fn three_records_round_trip_field_for_field() {
        let mut a = tweet("1", "en", "2019-12-07T10:00:00Z", 5);
        a.urls = vec!["https://example.com/a".into()];
        a.reply_to_id = Some("99".into());
        a.retweeter_count = 10;
        a.follower_retweeter_count = 4;
        let mut b = tweet("2", "ja", "2019-12-07T11:30:00Z", 7);
        b.text = "これはデマです".into();
        b.quote_of_id = Some("98".into());
        b.author_verified = true;
        let c = tweet("3", "en", "2019-12-08T00:00:00+09:00", 0);
        let original = vec![a, b, c];
        let mut buf = Vec::new();
        write_records(&mut buf, &original).unwrap();
        let report = read_records(Cursor::new(&buf), &langs()).unwrap();
        assert!(report.diagnostics.is_empty());
        assert_eq!(report.tweets, original);
    }

    #[test]
    fn canonical_line_is_byte_stable() {
        let line = r#"{"id":"7","lang":"en","text":"x is fake","created_at":"2019-12-07T23:00:00Z","share_count":4,"like_count":2,"urls":["https://a.example/x"],"reply_to_id":null,"quote_of_id":"5","retweeter_count":3,"follower_retweeter_count":1,"author_verified":false}"#;
        let report = read_records(Cursor::new(line), &langs()).unwrap();
        assert_eq!(report.tweets[0].to_record_line(), line);
    }

    #[test]
    fn invariant_violation_is_reported_with_line() {
        let mut bad = tweet("2", "en", "2019-12-07T10:00:00Z", 5);
        bad.retweeter_count = 2;
        bad.follower_retweeter_count = 3;
        let good = tweet("1", "en", "2019-12-07T10:00:00Z", 5);
        let text = format!("{}\n{}\nnot json\n", good.to_record_line(), bad.to_record_line());
        let report = read_records(Cursor::new(text), &langs()).unwrap();
        assert_eq!(report.tweets.len(), 1);
        assert_eq!(report.diagnostics.len(), 2);
        assert_eq!(report.diagnostics[0].line, 2);
        assert!(report.diagnostics[0].message.contains("follower_retweeter_count"));
        assert_eq!(report.diagnostics[1].line, 3);
    }

    #[test]
    fn unsupported_language_and_empty_id_are_rejected() {
        let fr = tweet("1", "fr", "2019-12-07T10:00:00Z", 5);
        let noid = tweet("", "en", "2019-12-07T10:00:00Z", 5);
        let text = format!("{}\n{}\n", fr.to_record_line(), noid.to_record_line());
        let report = read_records(Cursor::new(text), &langs()).unwrap();
        assert!(report.tweets.is_empty());
        assert_eq!(report.diagnostics.len(), 2);
    }

    #[test]
    fn retweets_fold_into_their_source() {
        let src = tweet("10", "en", "2019-12-07T10:00:00Z", 9);
        let mut rt1 = tweet("11", "en", "2019-12-07T10:05:00Z", 9);
        rt1.retweet_of_id = Some("10".into());
        let mut rt2 = tweet("21", "en", "2019-12-07T10:06:00Z", 6);
        rt2.retweet_of_id = Some("20".into());
        rt2.text = "RT @alice: The moon landing is fake".into();
        let mut rt3 = tweet("22", "en", "2019-12-07T10:07:00Z", 6);
        rt3.retweet_of_id = Some("20".into());
        let text = [src, rt1, rt2, rt3]
            .iter()
            .map(Tweet::to_record_line)
            .collect::<Vec<_>>()
            .join("\n");
        let report = read_records(Cursor::new(text), &langs()).unwrap();
        let ids: Vec<_> = report.tweets.iter().map(|t| t.id.as_str()).collect();
        assert_eq!(ids, ["10", "20"]);
        assert_eq!(report.tweets[1].text, "The moon landing is fake");
        assert_eq!(report.tweets[1].share_count, 6);
        assert!(report.diagnostics.is_empty());
    }

    #[test]
    fn filter_is_strict() {
        let tweets = vec![
            tweet("a", "en", "2019-12-07T10:00:00Z", 5),
            tweet("b", "en", "2019-12-07T10:00:00Z", 3),
            tweet("c", "en", "2019-12-07T10:00:00Z", 4),
        ];
        let kept = filter_by_shares(tweets.clone(), 3);
        let shares: Vec<_> = kept.iter().map(|t| t.share_count).collect();
        assert_eq!(shares, [5, 4]);
        assert!(filter_by_shares(vec![], 3).is_empty());
        let mut zero = tweets;
        zero.push(tweet("d", "en", "2019-12-07T10:00:00Z", 0));
        assert_eq!(filter_by_shares(zero, 0).len(), 3);
    }

    #[test]
    fn day_boundary_follows_offset() {
        let tweets = vec![
            tweet("a", "en", "2019-12-07T23:00:00Z", 5),
            tweet("b", "en", "2019-12-08T01:00:00Z", 5),
        ];
        let utc = partition_daily(tweets.clone(), parse_tz_offset("+00:00").unwrap());
        assert_eq!(utc.len(), 2);
        assert_eq!(utc[0].date, NaiveDate::from_ymd_opt(2019, 12, 7).unwrap());
        let jst = partition_daily(tweets, parse_tz_offset("+09:00").unwrap());
        assert_eq!(jst.len(), 1);
        assert_eq!(jst[0].date, NaiveDate::from_ymd_opt(2019, 12, 8).unwrap());
        assert_eq!(jst[0].tweets.len(), 2);
    }

    #[test]
    fn languages_are_split() {
        let tweets = vec![
            tweet("a", "ja", "2019-12-07T10:00:00Z", 5),
            tweet("b", "en", "2019-12-07T11:00:00Z", 5),
        ];
        let batches = partition_daily(tweets, FixedOffset::east_opt(0).unwrap());
        assert_eq!(batches.len(), 2);
        assert_eq!(batches[0].lang.as_str(), "en");
        assert_eq!(batches[1].lang.as_str(), "ja");
    }

    #[test]
    fn tz_offsets_parse() {
        assert_eq!(parse_tz_offset("+09:00").unwrap().local_minus_utc(), 9 * 3600);
        assert_eq!(parse_tz_offset("-05:30").unwrap().local_minus_utc(), -(5 * 3600 + 1800));
        assert_eq!(parse_tz_offset("Z").unwrap().local_minus_utc(), 0);
        assert!(parse_tz_offset("09:00").is_none());
        assert!(parse_tz_offset("+25:00").is_none());
    }
}

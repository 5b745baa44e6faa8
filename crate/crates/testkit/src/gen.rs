//! Seeded random inputs: pattern specs and probe texts, dependency trees,
//! grouping batches and a synthetic archive day with planted events.

use std::collections::{BTreeMap, BTreeSet};

use chrono::{DateTime, NaiveDate, Utc};
use debunk_core::conllu::parse_conllu_with_raw;
use debunk_core::extract::EventPhrase;
use debunk_core::{DailyBatch, DependencyDocument, EmbeddingTable, Lang, Tweet};
use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub use rand::SeedableRng;
pub type TestRng = ChaCha8Rng;

pub fn rng(seed: u64) -> TestRng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn base_time() -> DateTime<Utc> {
    "2019-12-07T12:00:00Z".parse().unwrap()
}

pub fn tweet(id: &str, lang: &str, text: &str) -> Tweet {
    Tweet {
        id: id.to_string(),
        lang: Lang::new(lang),
        text: text.to_string(),
        created_at: base_time(),
        share_count: 10,
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

// ---------------------------------------------------------------------------
// patterns

const PATTERN_ALPHABET: &[char] = &['a', 'b', 'c', 'é', 'デ'];

fn pattern_seq(rng: &mut TestRng, depth: usize) -> String {
    let items = rng.gen_range(1..=4);
    let mut out = String::new();
    for _ in 0..items {
        match rng.gen_range(0..10) {
            0..=4 => {
                for _ in 0..rng.gen_range(1..=3) {
                    out.push(*PATTERN_ALPHABET.choose(rng).unwrap());
                }
            }
            5 | 6 => out.push(' '),
            _ if depth > 0 => {
                let alts = rng.gen_range(1..=3);
                let parts: Vec<String> = (0..alts).map(|_| pattern_seq(rng, depth - 1)).collect();
                out.push('(');
                out.push_str(&parts.join("|"));
                out.push(')');
            }
            _ => out.push('a'),
        }
    }
    out
}

/// A random pattern source; may be invalid (for example an empty
/// expansion), which callers are expected to filter through the parser.
pub fn random_pattern_source(rng: &mut TestRng) -> String {
    pattern_seq(rng, 2)
}

/// Probe texts for a pattern: accepted strings with whitespace and case
/// noise, single-character mutations of them, and random strings.
pub fn probe_texts(rng: &mut TestRng, expansions: &[String], count: usize) -> Vec<String> {
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let base = expansions.choose(rng).unwrap().clone();
        let mut chars: Vec<char> = base.chars().collect();
        match rng.gen_range(0..6) {
            0 => {}
            1 => {
                let s: String = chars.iter().collect();
                let sep = ["  ", "\t", " \n "].choose(rng).unwrap();
                out.push(s.replace(' ', sep));
                continue;
            }
            2 => {
                for c in chars.iter_mut() {
                    if rng.gen_bool(0.5) {
                        *c = c.to_uppercase().next().unwrap_or(*c);
                    }
                }
            }
            3 if !chars.is_empty() => {
                chars.remove(rng.gen_range(0..chars.len()));
            }
            4 => {
                let at = rng.gen_range(0..=chars.len());
                chars.insert(at, *PATTERN_ALPHABET.choose(rng).unwrap());
            }
            _ => {
                chars = (0..rng.gen_range(1..=6))
                    .map(|_| *[' ', 'a', 'b', 'c', 'A'].choose(rng).unwrap())
                    .collect();
            }
        }
        let s: String = chars.iter().collect();
        if !s.is_empty() && s.trim() == s {
            out.push(s);
        }
    }
    out
}

// ---------------------------------------------------------------------------
// dependency trees

const RELATIONS: &[&str] = &["nsubj", "obj", "dobj", "amod", "det", "case", "nmod", "advmod", "appos", "csubj", "cop"];
const WORDS: &[&str] = &["it", "this", "cat", "moon", "ran", "big", "the", "fake", "news", "is"];

/// A random multi-sentence parse with heads drawn freely (non-projective
/// trees included) and the raw text it was built from.
pub fn random_document(rng: &mut TestRng, id: &str) -> (DependencyDocument, String) {
    let mut conllu = String::new();
    let mut raw = Vec::new();
    for _ in 0..rng.gen_range(1..=3) {
        let n = rng.gen_range(1..=12);
        // a random tree: shuffle the nodes, then every node but the first
        // attaches to an earlier one in that order
        let mut order: Vec<usize> = (1..=n).collect();
        order.shuffle(rng);
        let mut heads = vec![0; n + 1];
        for k in 1..n {
            heads[order[k]] = order[rng.gen_range(0..k)];
        }
        let mut words = Vec::new();
        for i in 1..=n {
            let form = *WORDS.choose(rng).unwrap();
            let rel = if heads[i] == 0 { "root" } else { RELATIONS.choose(rng).unwrap() };
            conllu.push_str(&format!("{i}\t{form}\t_\tX\t_\t_\t{}\t{rel}\t_\t_\n", heads[i]));
            words.push(form);
        }
        conllu.push('\n');
        raw.push(words.join(" "));
    }
    let raw = raw.join(" ");
    let doc = parse_conllu_with_raw(&conllu, id, Some(&raw), 0).expect("generated parse is well formed");
    (doc, raw)
}

// ---------------------------------------------------------------------------
// grouping

/// A random batch for grouping with everything needed to build the relation
/// graph independently.
pub struct GroupingCase {
    pub batch: DailyBatch,
    pub phrases: BTreeMap<String, EventPhrase>,
    pub table: EmbeddingTable,
    /// 1-D coordinate of every vocabulary word.
    pub positions: BTreeMap<String, f64>,
    /// Canonical story key behind each tweet's URLs, by tweet id.
    pub url_keys: BTreeMap<String, BTreeSet<usize>>,
}

const URL_VARIANTS: &[&str] = &[
    "https://news.example/story/{k}",
    "https://NEWS.example/story/{k}#top",
    "https://news.example/story/{k}?utm_source=twitter",
    "https://news.example/story/{k}?utm_medium=social&utm_campaign=x",
];

pub fn phrase(id: &str, tokens: &[String]) -> EventPhrase {
    EventPhrase {
        tweet_id: id.to_string(),
        text: tokens.join(" "),
        tokens: tokens.to_vec(),
        token_indices: (1..=tokens.len()).map(|i| (0, i)).collect(),
        hop_count: 0,
    }
}

pub fn random_grouping_case(rng: &mut TestRng, max_tweets: usize) -> GroupingCase {
    let n = rng.gen_range(1..=max_tweets);
    let vocab_size = rng.gen_range(3..=20);
    let mut table = EmbeddingTable::new(1);
    let mut positions = BTreeMap::new();
    for v in 0..vocab_size {
        let word = format!("w{v}");
        // a coarse grid keeps many distances near the thresholds; the
        // jitter keeps them off exact ties, where rounding decides
        let x = rng.gen_range(0..40) as f64 * 0.05 + rng.gen_range(-0.01..0.01);
        table.insert(word.clone(), &[x]);
        positions.insert(word, x);
    }
    let url_pool = rng.gen_range(1..=(n / 3).max(1));
    let target_pool = rng.gen_range(1..=(n / 3).max(1));
    let mut ids: Vec<usize> = (0..n).collect();
    ids.shuffle(rng);

    let mut tweets = Vec::new();
    let mut phrases = BTreeMap::new();
    let mut url_keys = BTreeMap::new();
    for &k in &ids {
        let id = format!("g{k:04}");
        let mut t = tweet(&id, "en", "x");
        let mut keys = BTreeSet::new();
        if rng.gen_bool(0.15) {
            for _ in 0..rng.gen_range(1..=2) {
                let key = rng.gen_range(0..url_pool);
                keys.insert(key);
                t.urls.push(URL_VARIANTS.choose(rng).unwrap().replace("{k}", &key.to_string()));
            }
        }
        if rng.gen_bool(0.1) {
            t.reply_to_id = Some(format!("target{}", rng.gen_range(0..target_pool)));
        }
        if rng.gen_bool(0.05) {
            t.quote_of_id = Some(format!("target{}", rng.gen_range(0..target_pool)));
        }
        if rng.gen_bool(0.6) {
            let len = rng.gen_range(1..=3);
            let tokens: Vec<String> = (0..len)
                .map(|_| {
                    if rng.gen_bool(0.1) {
                        "unknownword".to_string()
                    } else {
                        format!("w{}", rng.gen_range(0..vocab_size))
                    }
                })
                .collect();
            phrases.insert(id.clone(), phrase(&id, &tokens));
        }
        url_keys.insert(id, keys);
        tweets.push(t);
    }
    GroupingCase {
        batch: DailyBatch {
            date: NaiveDate::from_ymd_opt(2019, 12, 7).unwrap(),
            lang: Lang::new("en"),
            tweets,
        },
        phrases,
        table,
        positions,
        url_keys,
    }
}

// ---------------------------------------------------------------------------
// synthetic day

/// A 500-tweet English day with five planted events.
pub struct SyntheticDay {
    pub date: NaiveDate,
    pub lang: Lang,
    pub tweets: Vec<Tweet>,
    /// CoNLL-U for every tweet, blocks keyed by `# tweet_id`.
    pub sidecar: String,
    pub embeddings: EmbeddingTable,
    /// Tweet ids of each planted event.
    pub events: Vec<BTreeSet<String>>,
    /// Ground truth for the oracles: the event phrase each tweet should
    /// yield (lowercased tokens), the canonical page behind its URLs, and
    /// the 1-D coordinate of every vocabulary word.
    pub phrase_tokens: BTreeMap<String, Vec<String>>,
    pub url_keys: BTreeMap<String, BTreeSet<String>>,
    pub positions: BTreeMap<String, f64>,
}

const EVENT_WORDS: [[&str; 4]; 5] = [
    ["moon", "base", "lunar", "outpost"],
    ["vaccine", "chip", "jab", "microchip"],
    ["shark", "highway", "fish", "road"],
    ["senator", "arrest", "politician", "detention"],
    ["bank", "collapse", "lender", "failure"],
];

const PER_EVENT_PHRASES: usize = 30;
const PER_EVENT_REPLIES: usize = 5;
const PER_EVENT_URLS: usize = 5;
const CONTAMINANTS_PER_EVENT: usize = 2;
const DAY_SIZE: usize = 500;

fn block(id: &str, rows: &[(&str, usize, &str)]) -> String {
    let mut s = format!("# tweet_id = {id}\n");
    for (i, (form, head, rel)) in rows.iter().enumerate() {
        s.push_str(&format!("{}\t{form}\t_\tX\t_\t_\t{head}\t{rel}\t_\t_\n", i + 1));
    }
    s.push('\n');
    s
}

/// "<w1> <w2> is fake!"
fn phrase_tweet(id: &str, w1: &str, w2: &str) -> (String, String) {
    let text = format!("{w1} {w2} is fake!");
    let parse = block(
        id,
        &[(w1, 2, "compound"), (w2, 4, "nsubj"), ("is", 4, "cop"), ("fake", 0, "root"), ("!", 4, "punct")],
    );
    (text, parse)
}

fn demonstrative_tweet(id: &str) -> (String, String) {
    let text = "This is fake!".to_string();
    let parse = block(id, &[("This", 3, "nsubj"), ("is", 3, "cop"), ("fake", 0, "root"), ("!", 3, "punct")]);
    (text, parse)
}

fn hashtag_tweet(id: &str) -> (String, String) {
    ("#fakenews".to_string(), block(id, &[("#fakenews", 0, "root")]))
}

pub fn synthetic_day(seed: u64) -> SyntheticDay {
    let mut rng = rng(seed);
    let mut embeddings = EmbeddingTable::new(1);
    let mut positions = BTreeMap::new();
    let mut place = |embeddings: &mut EmbeddingTable, w: &str, x: f64| {
        embeddings.insert(w, &[x]);
        positions.insert(w.to_string(), x);
    };
    for (k, words) in EVENT_WORDS.iter().enumerate() {
        for (j, w) in words.iter().enumerate() {
            // paraphrases of one event lie within 0.15 of each other
            place(&mut embeddings, w, 100.0 * k as f64 + 0.05 * j as f64);
        }
    }
    let mut phrase_tokens = BTreeMap::new();
    let mut url_keys: BTreeMap<String, BTreeSet<String>> = BTreeMap::new();
    let mut ids: Vec<usize> = (0..DAY_SIZE).collect();
    ids.shuffle(&mut rng);
    let mut next_id = ids.into_iter().map(|k| format!("{:06}", 100_000 + k * 7));

    let mut tweets = Vec::new();
    let mut sidecar = String::new();
    let mut events = Vec::new();
    let mut push = |t: Tweet, parse: String, tweets: &mut Vec<Tweet>| {
        sidecar.push_str(&parse);
        tweets.push(t);
    };

    for (k, words) in EVENT_WORDS.iter().enumerate() {
        let mut members = BTreeSet::new();
        let url = format!("https://hoax.example/event-{k}");
        let target = format!("source-{k}");
        let popular = |rng: &mut TestRng, t: &mut Tweet| {
            t.like_count = rng.gen_range(50..500);
            t.share_count = rng.gen_range(20..200);
            t.retweeter_count = rng.gen_range(10..100);
            t.follower_retweeter_count = t.retweeter_count * rng.gen_range(1..5) / 10;
        };
        for i in 0..PER_EVENT_PHRASES {
            let id = next_id.next().unwrap();
            let w1 = words[rng.gen_range(0..4)];
            let w2 = words[rng.gen_range(0..4)];
            let w1 = if rng.gen_bool(0.5) { capitalize(w1) } else { w1.to_string() };
            let (text, parse) = phrase_tweet(&id, &w1, w2);
            let mut t = tweet(&id, "en", &text);
            popular(&mut rng, &mut t);
            if i == 0 {
                t.urls.push(url.clone());
                url_keys.entry(id.clone()).or_default().insert(url.clone());
            }
            phrase_tokens.insert(id.clone(), vec![w1.to_lowercase(), w2.to_string()]);
            if i == 1 {
                t.reply_to_id = Some(target.clone());
            }
            members.insert(id);
            push(t, parse, &mut tweets);
        }
        for _ in 0..PER_EVENT_REPLIES {
            let id = next_id.next().unwrap();
            let (text, parse) = demonstrative_tweet(&id);
            let mut t = tweet(&id, "en", &text);
            popular(&mut rng, &mut t);
            t.reply_to_id = Some(target.clone());
            members.insert(id);
            push(t, parse, &mut tweets);
        }
        for j in 0..PER_EVENT_URLS {
            let id = next_id.next().unwrap();
            let (text, parse) = hashtag_tweet(&id);
            let mut t = tweet(&id, "en", &text);
            popular(&mut rng, &mut t);
            t.urls.push(if j % 2 == 0 {
                format!("{url}?utm_source=twitter")
            } else {
                url.clone()
            });
            url_keys.entry(id.clone()).or_default().insert(url.clone());
            members.insert(id);
            push(t, parse, &mut tweets);
        }
        // unrelated tweets that happen to link the same page
        for _ in 0..CONTAMINANTS_PER_EVENT {
            let id = next_id.next().unwrap();
            let (text, parse) = hashtag_tweet(&id);
            let mut t = tweet(&id, "en", &text);
            t.share_count = 4;
            t.urls.push(url.clone());
            url_keys.entry(id.clone()).or_default().insert(url.clone());
            push(t, parse, &mut tweets);
        }
        events.push(members);
    }

    let mut noise = 0;
    while tweets.len() < DAY_SIZE {
        let id = next_id.next().unwrap();
        let a = format!("noise{noise}a");
        let b = format!("noise{noise}b");
        place(&mut embeddings, &a, 10_000.0 + 10.0 * noise as f64);
        place(&mut embeddings, &b, 10_000.0 + 10.0 * noise as f64 + 1.0);
        noise += 1;
        let (text, parse) = phrase_tweet(&id, &a, &b);
        phrase_tokens.insert(id.clone(), vec![a, b]);
        let mut t = tweet(&id, "en", &text);
        t.like_count = rng.gen_range(0..5);
        // half of the noise does not survive the share filter
        t.share_count = if rng.gen_bool(0.5) { rng.gen_range(0..=3) } else { rng.gen_range(4..=6) };
        push(t, parse, &mut tweets);
    }
    tweets.sort_by(|a, b| a.id.cmp(&b.id));

    SyntheticDay {
        date: NaiveDate::from_ymd_opt(2019, 12, 7).unwrap(),
        lang: Lang::new("en"),
        tweets,
        sidecar,
        embeddings,
        events,
        phrase_tokens,
        url_keys,
        positions,
    }
}

fn capitalize(w: &str) -> String {
    let mut c = w.chars();
    match c.next() {
        Some(f) => f.to_uppercase().chain(c).collect(),
        None => String::new(),
    }
}

// ---------------------------------------------------------------------------
// ranking

pub fn random_ranking_batch(rng: &mut TestRng, max: usize) -> Vec<Tweet> {
    (0..rng.gen_range(1..=max))
        .map(|i| {
            let mut t = tweet(&format!("r{i:03}"), "en", "x");
            t.like_count = rng.gen_range(0..50);
            t.share_count = rng.gen_range(0..50);
            t.retweeter_count = rng.gen_range(0..20);
            t.follower_retweeter_count = rng.gen_range(0..=t.retweeter_count);
            t
        })
        .collect()
}

/// A ranked day of `clusters` two-tweet clusters whose tweet ids start with
/// `prefix`; every cluster has an event phrase and a URL.
pub fn ranked_day(
    rng: &mut TestRng,
    clusters: usize,
    prefix: &str,
) -> (Vec<debunk_core::RankedCluster>, BTreeMap<String, Tweet>) {
    let mut tweets = BTreeMap::new();
    let mut out = Vec::new();
    for c in 0..clusters {
        let mut ids = BTreeSet::new();
        let mut phrases = BTreeMap::new();
        for m in 0..2 {
            let id = format!("{prefix}{c:03}{m}");
            let mut t = tweet(&id, "en", &format!("story {c} is fake"));
            t.like_count = rng.gen_range(0..1000);
            t.share_count = rng.gen_range(4..1000);
            t.retweeter_count = rng.gen_range(0..50);
            t.follower_retweeter_count = rng.gen_range(0..=t.retweeter_count);
            t.urls.push(format!("https://news.example/{prefix}{c}?utm_source=tw"));
            if m == 1 {
                t.reply_to_id = Some(format!("{prefix}src{c}"));
            }
            phrases.insert(id.clone(), phrase(&id, &[format!("story{c}")]));
            ids.insert(id.clone());
            tweets.insert(id, t);
        }
        out.push(debunk_core::EventCluster {
            cluster_id: ids.first().unwrap().clone(),
            tweet_ids: ids,
            phrases,
            link_evidence: vec![],
        });
    }
    (debunk_core::rank_clusters(&out, &tweets), tweets)
}

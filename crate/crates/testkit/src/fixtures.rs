//! Hand-built extraction fixtures under `fixtures/extraction`.
//!
//! `tweets.jsonl` holds the tweet records, `parses.conllu` one parse per
//! tweet (blocks introduced by `# tweet_id = ...`), and `expected.tsv` the
//! expected event phrase per tweet, `-` when extraction must fail.

use std::path::PathBuf;

use debunk_core::ingest::{read_records, Tweet};
use debunk_core::Lang;

pub fn fixtures_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures")
}

#[derive(Clone, Debug)]
pub struct ExtractionCase {
    pub tweet: Tweet,
    /// Behaviour being exercised, e.g. `r2_direct` or `demonstrative`.
    pub case: String,
    pub expected: Option<String>,
}

pub struct ExtractionFixtures {
    pub cases: Vec<ExtractionCase>,
    pub sidecar: String,
}

pub fn extraction_fixtures() -> ExtractionFixtures {
    let dir = fixtures_dir().join("extraction");
    let read = |name: &str| {
        std::fs::read_to_string(dir.join(name)).unwrap_or_else(|e| panic!("reading fixture {name}: {e}"))
    };
    let langs = [Lang::new("en"), Lang::new("ja")];
    let report = read_records(read("tweets.jsonl").as_bytes(), &langs).expect("fixture tweets");
    assert!(report.diagnostics.is_empty(), "{:?}", report.diagnostics);
    let mut cases = Vec::new();
    for line in read("expected.tsv").lines() {
        if line.starts_with('#') || line.trim().is_empty() {
            continue;
        }
        let cols: Vec<&str> = line.split('\t').collect();
        assert_eq!(cols.len(), 4, "bad expected.tsv row {line:?}");
        let tweet = report
            .tweets
            .iter()
            .find(|t| t.id == cols[0])
            .unwrap_or_else(|| panic!("no tweet record for {}", cols[0]))
            .clone();
        assert_eq!(tweet.lang.as_str(), cols[1]);
        cases.push(ExtractionCase {
            tweet,
            case: cols[2].to_string(),
            expected: (cols[3] != "-").then(|| cols[3].to_string()),
        });
    }
    ExtractionFixtures {
        cases,
        sidecar: read("parses.conllu"),
    }
}

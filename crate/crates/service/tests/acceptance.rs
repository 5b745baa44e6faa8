//! Acceptance suite: one line per criterion, PASS or FAIL.
//!
//! Criteria listed in `UNATTAINABLE` are expected to fail for a documented
//! reason; they are still run and reported as FAIL. The process exits
//! non-zero when any other criterion fails, or when an unattainable one
//! unexpectedly passes (so the list gets revisited).

mod common;

use std::collections::BTreeSet;
use std::time::{Duration, Instant};

use axum::http::StatusCode;
use chrono::NaiveDate;
use debunk_core::cluster::GroupingOptions;
use debunk_core::pipeline::ArchiveOptions;
use debunk_core::{DailyBatch, Lang, RulesConfig};
use debunk_service::commands::archive_into_store;
use debunk_service::ClusterView;
use debunk_testkit::checks::{self, CheckResult};
use debunk_testkit::gen;
use serde_json::Value;

const UNATTAINABLE: &[(&str, &str)] = &[(
    "kappa",
    "the example a=[1,1,1,0], b=[1,1,0,0] is stated as κ=1/3 with p_e=0.625, but the marginals \
     (3/4, 1/4) and (1/2, 1/2) give p_e=1/2 and κ=1/2 exactly",
)];

struct Criterion {
    id: &'static str,
    title: &'static str,
    budget: Option<Duration>,
    run: fn() -> CheckResult,
}

fn all(results: Vec<CheckResult>) -> CheckResult {
    let mut ok = Vec::new();
    let mut bad = Vec::new();
    for r in results {
        match r {
            Ok(s) => ok.push(s),
            Err(e) => bad.push(e),
        }
    }
    if bad.is_empty() {
        Ok(ok.join("; "))
    } else {
        Err(bad.join("; "))
    }
}

fn extraction() -> CheckResult {
    checks::extraction_fixture_suite()
}

fn patterns() -> CheckResult {
    all(vec![checks::pattern_expansion_equivalence(1000, 20, 101), checks::shipped_pattern_probes()])
}

fn wmd() -> CheckResult {
    all(vec![
        checks::wmd_grid_2x2(),
        checks::wmd_random_3x3(500, 102),
        checks::wmd_metric_properties(1000, 103),
    ])
}

fn grouping() -> CheckResult {
    checks::grouping_properties(200, 200, 104)
}

fn ranking() -> CheckResult {
    all(vec![checks::ranking_worked_example(), checks::ranking_scaling(100, 105)])
}

fn kappa() -> CheckResult {
    all(vec![checks::kappa_hand_examples(), checks::kappa_random_labels(10_000, 106)])
}

fn runtime() -> tokio::runtime::Runtime {
    tokio::runtime::Builder::new_current_thread().enable_all().build().unwrap()
}

fn end_to_end() -> CheckResult {
    let day = gen::synthetic_day(107);
    let opts = ArchiveOptions {
        min_shares_exclusive: 3,
        grouping: GroupingOptions::default(),
    };
    let expected = checks::synthetic_day_expected(&day, opts.grouping.tau, opts.min_shares_exclusive);
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let store = common::open_store(dir.path());
    let batch = DailyBatch {
        date: day.date,
        lang: day.lang.clone(),
        tweets: day.tweets.clone(),
    };
    let summary = archive_into_store(&store, &batch, &day.sidecar, &RulesConfig::default(), &day.embeddings, &opts)
        .map_err(|e| e.to_string())?;
    let app = common::app(&store);
    let (status, body) = runtime().block_on(common::get(&app, "/api/v1/clusters?date=2019-12-07&lang=en&limit=5"));
    if status != StatusCode::OK {
        return Err(format!("top clusters returned {status}: {body}"));
    }
    let views: Vec<ClusterView> = serde_json::from_str(&body).map_err(|e| e.to_string())?;
    let got: Vec<BTreeSet<String>> = views.iter().map(|v| v.member_ids.iter().cloned().collect()).collect();
    if got[..] != expected[..5.min(expected.len())] {
        return Err(format!("top 5 differ from the oracle ({} oracle clusters)", expected.len()));
    }
    let (purity, recall) = checks::planted_event_purity(&day.events, &got)?;
    let detail = format!(
        "{} tweets, {} kept, {} phrases, {} clusters; top 5 equal the oracle; min purity {:.1}%, min event coverage {:.1}%",
        summary.stats.tweets,
        summary.stats.kept_after_filter,
        summary.stats.extracted,
        summary.clusters,
        purity * 100.0,
        recall * 100.0
    );
    if purity >= 0.8 {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn service_contract() -> CheckResult {
    runtime().block_on(async {
        let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
        let store = common::open_store(dir.path());
        let date = NaiveDate::from_ymd_opt(2019, 12, 7).unwrap();
        let (ranked, tweets) = gen::ranked_day(&mut gen::rng(108), 13, "s");
        let first_id = ranked[0].cluster.cluster_id.clone();
        store.persist_batch(date, &Lang::new("en"), ranked, &tweets).map_err(|e| e.to_string())?;
        let app = common::app(&store);
        let day_uri = "/api/v1/clusters?date=2019-12-07&lang=en";
        let export_uri = "/api/v1/export?from=2019-12-07&to=2019-12-07&lang=en";
        let mut notes = Vec::new();

        let (_, listed) = common::get(&app, day_uri).await;
        let views: Vec<ClusterView> = serde_json::from_str(&listed).map_err(|e| e.to_string())?;
        if views.len() != 10 {
            return Err(format!("default limit returned {} clusters", views.len()));
        }
        notes.push("default limit 10");

        let reopened = common::app(&common::open_store(dir.path()));
        if common::get(&reopened, day_uri).await.1 != listed {
            return Err("day read after reopening the store differs".into());
        }
        notes.push("round trip byte-stable");

        let steps = [("v1", "fake", (1, 0)), ("v1", "not_fake", (0, 1)), ("v2", "fake", (1, 1))];
        for (voter, verdict, (f, n)) in steps {
            let (status, v): (StatusCode, Value) = common::vote(&app, &first_id, voter, verdict).await;
            if status != StatusCode::OK || v["tally"]["fake"] != f || v["tally"]["not_fake"] != n {
                return Err(format!("vote {voter}={verdict} gave {status} {v}"));
            }
        }
        notes.push("vote overwrite");

        let a = common::get(&app, export_uri).await.1;
        let b = common::get(&app, export_uri).await.1;
        if a != b || a.lines().count() != 13 {
            return Err("export is not deterministic".into());
        }
        notes.push("export deterministic");
        Ok(notes.join(", "))
    })
}

fn main() {
    let criteria = [
        Criterion { id: "extraction", title: "extraction fixture suite", budget: Some(Duration::from_secs(5)), run: extraction },
        Criterion { id: "patterns", title: "pattern engine", budget: None, run: patterns },
        Criterion { id: "wmd", title: "WMD exactness", budget: Some(Duration::from_secs(60)), run: wmd },
        Criterion { id: "grouping", title: "grouping", budget: None, run: grouping },
        Criterion { id: "ranking", title: "ranking", budget: None, run: ranking },
        Criterion { id: "end-to-end", title: "end-to-end synthetic day", budget: Some(Duration::from_secs(30)), run: end_to_end },
        Criterion { id: "kappa", title: "kappa utility", budget: None, run: kappa },
        Criterion { id: "service", title: "service contract over HTTP", budget: None, run: service_contract },
    ];
    let mut unexpected = Vec::new();
    for c in &criteria {
        let start = Instant::now();
        let mut result = (c.run)();
        let took = start.elapsed();
        if let (Ok(_), Some(budget)) = (&result, c.budget) {
            if took > budget {
                result = Err(format!("took {took:.1?}, over the {budget:?} budget"));
            }
        }
        let known = UNATTAINABLE.iter().find(|(id, _)| *id == c.id);
        let line = match &result {
            Ok(detail) => format!("PASS  {:<28} {detail} [{took:.2?}]", c.title),
            Err(detail) => format!("FAIL  {:<28} {detail} [{took:.2?}]", c.title),
        };
        println!("{line}");
        match (&result, known) {
            (Err(_), Some((_, why))) => println!("      known unattainable: {why}"),
            (Err(_), None) => unexpected.push(c.id),
            (Ok(_), Some(_)) => {
                println!("      listed as unattainable but passed; update the list");
                unexpected.push(c.id);
            }
            (Ok(_), None) => {}
        }
    }
    if !unexpected.is_empty() {
        eprintln!("unexpected acceptance results: {unexpected:?}");
        std::process::exit(1);
    }
}

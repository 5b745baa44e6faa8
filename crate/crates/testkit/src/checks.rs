//! Whole-criterion checks shared by the property tests and the acceptance
//! target. Each returns a short summary on success and the first few
//! counterexamples on failure.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use debunk_core::cluster::{group_tweets_with, normalize_url, GroupingOptions};
use debunk_core::extract::{locate_fake_part, run_cascade};
use debunk_core::pattern::{expand_alternations, first_match, fold_text, normalize_whitespace};
use debunk_core::pipeline::parse_sidecar;
use debunk_core::wmd::NBow;
use debunk_core::{
    cohen_kappa, rank_clusters, rank_tweets, wcd_lower_bound, wmd, CompiledPattern, EmbeddingTable, Lang,
    PatternSpec, RulesConfig, Tweet,
};
use rand::seq::SliceRandom;
use rand::Rng;

use crate::fixtures::extraction_fixtures;
use crate::gen::{self, TestRng};
use crate::oracle;

pub type CheckResult = Result<String, String>;

fn finish(label: &str, total: usize, failures: Vec<String>) -> CheckResult {
    if failures.is_empty() {
        Ok(format!("{total} {label}"))
    } else {
        let shown: Vec<&String> = failures.iter().take(5).collect();
        Err(format!("{}/{} {label} failed; first: {shown:?}", failures.len(), total))
    }
}

fn rel_close(a: f64, b: f64, rel: f64) -> bool {
    (a - b).abs() <= rel * a.abs().max(b.abs()).max(1e-12)
}

// ---------------------------------------------------------------------------
// extraction

pub fn extraction_fixture_suite() -> CheckResult {
    let fx = extraction_fixtures();
    let rules = RulesConfig::default();
    let raw: HashMap<String, String> = fx.cases.iter().map(|c| (c.tweet.id.clone(), c.tweet.text.clone())).collect();
    let (docs, errors) = parse_sidecar(&fx.sidecar, &raw);
    if !errors.is_empty() {
        return Err(format!("fixture parses failed: {errors:?}"));
    }
    let mut failures = Vec::new();
    let mut per_lang: BTreeMap<String, usize> = BTreeMap::new();
    for case in &fx.cases {
        *per_lang.entry(case.tweet.lang.to_string()).or_default() += 1;
        let lang = &case.tweet.lang;
        let profile = rules.profile(lang).expect("fixture language configured");
        let patterns = rules.compile_patterns(lang).expect("shipped patterns compile");
        let got = first_match(&patterns, &case.tweet.text).and_then(|span| {
            let doc = docs.get(&case.tweet.id)?;
            let fake = locate_fake_part(doc, &span).ok()?;
            run_cascade(doc, &fake, &rules, profile).phrase.map(|p| p.text)
        });
        if got != case.expected {
            failures.push(format!("{} ({}): expected {:?}, got {:?}", case.tweet.id, case.case, case.expected, got));
        }
    }
    let counts: Vec<String> = per_lang.iter().map(|(l, n)| format!("{n} {l}")).collect();
    finish(&format!("fixtures ({}) exact", counts.join(", ")), fx.cases.len(), failures)
}

// ---------------------------------------------------------------------------
// patterns

/// Full-match acceptance equals membership in the folded expansion set.
pub fn pattern_expansion_equivalence(specs: usize, probes_per_spec: usize, seed: u64) -> CheckResult {
    let mut rng = gen::rng(seed);
    let mut failures = Vec::new();
    let mut tested = 0;
    let mut probes = 0;
    while tested < specs {
        let source = gen::random_pattern_source(&mut rng);
        let ci = rng.gen_bool(0.5);
        let spec = PatternSpec::new(Lang::new(if ci { "en" } else { "ja" }), source.clone());
        let Ok(expansions) = expand_alternations(&spec) else {
            continue;
        };
        let compiled = CompiledPattern::with_options(&spec, ci, false).expect("spec that expands must compile");
        tested += 1;
        let language: BTreeSet<String> = expansions.iter().map(|e| fold_text(e, ci)).collect();
        for text in gen::probe_texts(&mut rng, &expansions, probes_per_spec) {
            probes += 1;
            let expected = language.contains(&normalize_whitespace(&fold_text(&text, ci)));
            if compiled.is_full_match(&text) != expected {
                failures.push(format!("{source:?} ci={ci} on {text:?}: expected {expected}"));
            }
        }
    }
    finish(&format!("specs ({probes} probes) agree with expansion"), tested, failures)
}

/// Hand-written probes for every shipped pattern: (lang, source, accepted, rejected).
pub const SHIPPED_PATTERN_PROBES: &[(&str, &str, &str, &str)] = &[
    ("en", "(isn't|is not) true", "The rumor isn't true at all", "It is true that he won"),
    ("en", "is (completely) (false|fake)", "That photo is completely fake", "This is falsely attributed"),
    ("en", "Don’t believe everything", "Don't believe everything you read", "I believe everything"),
    ("en", "spreading (false|fake)", "Stop spreading fake stories", "He is spreading joy"),
    ("en", "#fakenews", "Aliens in Ohio #fakenews", "#fakenewsletter is out"),
    ("ja", "は(デマ|フェイク)", "その話はデマだ", "その話は本当だ"),
    ("ja", "(デマ|フェイク|フェイクニュース)です", "これはフェイクニュースです", "これはニュースです"),
    ("ja", "(フェイク|間違い|デマ)である", "その写真は間違いである", "その写真は本物である"),
    ("ja", "というデマ", "地震が来るというデマが流れた", "地震が来るという噂"),
    ("ja", "(信じ|拡散し)ない", "そのツイートを拡散しない", "そのツイートを拡散した"),
];

pub fn shipped_pattern_probes() -> CheckResult {
    let rules = RulesConfig::default();
    let mut failures = Vec::new();
    let mut shipped = 0;
    for lang in rules.supported() {
        let profile = rules.profile(&lang).unwrap();
        for source in &profile.patterns {
            shipped += 1;
            if !SHIPPED_PATTERN_PROBES.iter().any(|p| p.0 == lang.as_str() && p.1 == source) {
                failures.push(format!("no probes for {lang}:{source}"));
            }
        }
        for p in SHIPPED_PATTERN_PROBES.iter().filter(|p| p.0 == lang.as_str()) {
            let compiled = CompiledPattern::compile(&PatternSpec::new(lang.clone(), p.1), profile)
                .map_err(|e| format!("{}: {e}", p.1))?;
            if compiled.find_all(p.2).is_empty() {
                failures.push(format!("{} does not match {:?}", p.1, p.2));
            }
            if !compiled.find_all(p.3).is_empty() {
                failures.push(format!("{} matches {:?}", p.1, p.3));
            }
        }
    }
    if shipped != SHIPPED_PATTERN_PROBES.len() {
        failures.push(format!("{shipped} shipped patterns, {} probed", SHIPPED_PATTERN_PROBES.len()));
    }
    finish("shipped patterns match and reject their probes", shipped, failures)
}

// ---------------------------------------------------------------------------
// wmd

fn grid_table(points: usize) -> EmbeddingTable {
    let mut t = EmbeddingTable::new(1);
    for p in 0..points {
        t.insert(format!("p{p}"), &[p as f64]);
    }
    t
}

fn bag(words: &[String], weights: &[f64]) -> NBow {
    NBow::from_weights(words.to_vec(), weights.to_vec()).expect("valid bag")
}

/// Every pair of distinct source points and distinct sink points on a
/// 10-point grid, with every marginal split in tenths.
pub fn wmd_grid_2x2() -> CheckResult {
    let table = grid_table(10);
    let mut failures = Vec::new();
    let mut count = 0;
    for a0 in 0..10 {
        for a1 in (a0 + 1)..10 {
            for b0 in 0..10 {
                for b1 in (b0 + 1)..10 {
                    for s in 1..10 {
                        for d in 1..10 {
                            count += 1;
                            let (s, d) = (s as f64 / 10.0, d as f64 / 10.0);
                            let wa = [format!("p{a0}"), format!("p{a1}")];
                            let wb = [format!("p{b0}"), format!("p{b1}")];
                            let got = wmd(&bag(&wa, &[s, 1.0 - s]), &bag(&wb, &[d, 1.0 - d]), &table);
                            let c = |x: usize, y: usize| (x as f64 - y as f64).abs();
                            let cost = [[c(a0, b0), c(a0, b1)], [c(a1, b0), c(a1, b1)]];
                            let want = oracle::transport_2x2([s, 1.0 - s], [d, 1.0 - d], cost, 16);
                            if !rel_close(got, want, 1e-9) {
                                failures.push(format!("A=({a0},{a1};{s}) B=({b0},{b1};{d}): {got} vs {want}"));
                            }
                        }
                    }
                }
            }
        }
    }
    finish("2×2 grid instances match the line-search oracle", count, failures)
}

fn random_simplex(rng: &mut TestRng, n: usize) -> Vec<f64> {
    let raw: Vec<f64> = (0..n).map(|_| rng.gen_range(0.05..1.0)).collect();
    let s: f64 = raw.iter().sum();
    raw.iter().map(|x| x / s).collect()
}

fn random_space(rng: &mut TestRng, words: usize, dim: usize) -> EmbeddingTable {
    let mut t = EmbeddingTable::new(dim);
    for w in 0..words {
        let v: Vec<f64> = (0..dim).map(|_| rng.gen_range(-2.0..2.0)).collect();
        t.insert(format!("v{w}"), &v);
    }
    t
}

fn random_bag(rng: &mut TestRng, table: &EmbeddingTable, size: usize) -> NBow {
    let mut words: Vec<String> = table.words().to_vec();
    words.shuffle(rng);
    words.truncate(size);
    let weights = random_simplex(rng, words.len());
    bag(&words, &weights)
}

/// Random 3×3 instances in a 3-D space against basic-solution enumeration.
pub fn wmd_random_3x3(instances: usize, seed: u64) -> CheckResult {
    let mut rng = gen::rng(seed);
    let mut failures = Vec::new();
    for k in 0..instances {
        let table = random_space(&mut rng, 6, 3);
        let a = random_bag(&mut rng, &table, 3);
        let b = random_bag(&mut rng, &table, 3);
        let got = wmd(&a, &b, &table);
        let mut cost = Vec::new();
        for wa in a.words() {
            for wb in b.words() {
                let (x, y) = (table.vector(wa).unwrap(), table.vector(wb).unwrap());
                cost.push(x.iter().zip(y).map(|(p, q)| (p - q) * (p - q)).sum::<f64>().sqrt());
            }
        }
        let want = oracle::transport_bfs(a.weights(), b.weights(), &cost);
        if !rel_close(got, want, 1e-9) {
            failures.push(format!("instance {k}: {got} vs {want}"));
        }
    }
    finish("random 3×3 instances match basic-solution enumeration", instances, failures)
}

/// Symmetry, identity, triangle inequality and the centroid lower bound on
/// random bags of 1 to 5 words in 2-D.
pub fn wmd_metric_properties(instances: usize, seed: u64) -> CheckResult {
    let mut rng = gen::rng(seed);
    let mut failures = Vec::new();
    let tol = 1e-9;
    for k in 0..instances {
        let table = random_space(&mut rng, 8, 2);
        let sizes: Vec<usize> = (0..3).map(|_| rng.gen_range(1..=5)).collect();
        let a = random_bag(&mut rng, &table, sizes[0]);
        let b = random_bag(&mut rng, &table, sizes[1]);
        let c = random_bag(&mut rng, &table, sizes[2]);
        let (ab, ba, bc, ac) = (wmd(&a, &b, &table), wmd(&b, &a, &table), wmd(&b, &c, &table), wmd(&a, &c, &table));
        let aa = wmd(&a, &a, &table);
        if (ab - ba).abs() > tol * ab.max(1.0) {
            failures.push(format!("{k}: asymmetric {ab} vs {ba}"));
        }
        if aa.abs() > tol {
            failures.push(format!("{k}: wmd(a,a) = {aa}"));
        }
        if ac > ab + bc + tol {
            failures.push(format!("{k}: triangle {ac} > {ab} + {bc}"));
        }
        let wcd = wcd_lower_bound(&a, &b, &table);
        if wcd > ab + tol {
            failures.push(format!("{k}: wcd {wcd} > wmd {ab}"));
        }
        if ab < 0.0 {
            failures.push(format!("{k}: negative {ab}"));
        }
    }
    finish("random instances satisfy symmetry, identity, triangle and WCD ≤ WMD", instances, failures)
}

// ---------------------------------------------------------------------------
// grouping

/// Clusters produced by `group_tweets_with`, as sorted id sets.
fn clusters_of(case: &gen::GroupingCase, tweets: &[Tweet], tau: f64) -> Result<BTreeSet<Vec<String>>, String> {
    let batch = debunk_core::DailyBatch {
        tweets: tweets.to_vec(),
        ..case.batch.clone()
    };
    let opts = GroupingOptions {
        tau,
        ..GroupingOptions::default()
    };
    let clusters = group_tweets_with(&batch, &case.phrases, &case.table, &opts).map_err(|e| e.to_string())?;
    Ok(clusters.into_iter().map(|c| c.tweet_ids.into_iter().collect()).collect())
}

/// The relation graph built pair by pair: shared story key, shared
/// reply/quote target, or 1-D transport distance below `tau`.
fn oracle_clusters(case: &gen::GroupingCase, tau: f64) -> BTreeSet<Vec<String>> {
    let tweets = &case.batch.tweets;
    let points: Vec<Option<Vec<(f64, f64)>>> = tweets
        .iter()
        .map(|t| {
            let p = case.phrases.get(&t.id)?;
            let known: Vec<f64> = p.tokens.iter().filter_map(|w| case.positions.get(w).copied()).collect();
            if known.is_empty() {
                return None;
            }
            let w = 1.0 / known.len() as f64;
            Some(known.into_iter().map(|x| (x, w)).collect())
        })
        .collect();
    let targets = |t: &Tweet| -> BTreeSet<String> { t.reply_to_id.iter().chain(t.quote_of_id.iter()).cloned().collect() };
    let mut edges = Vec::new();
    for i in 0..tweets.len() {
        for j in (i + 1)..tweets.len() {
            let (a, b) = (&tweets[i], &tweets[j]);
            let url = !case.url_keys[&a.id].is_disjoint(&case.url_keys[&b.id]);
            let reply = !targets(a).is_disjoint(&targets(b));
            let near = match (&points[i], &points[j]) {
                (Some(p), Some(q)) => oracle::emd_1d(p, q) < tau,
                _ => false,
            };
            if url || reply || near {
                edges.push((i, j));
            }
        }
    }
    oracle::components(tweets.len(), &edges)
        .into_iter()
        .map(|c| {
            let mut ids: Vec<String> = c.into_iter().map(|i| tweets[i].id.clone()).collect();
            ids.sort();
            ids
        })
        .collect()
}

/// Oracle equivalence at τ=0.25, shuffle invariance, and refinement as τ
/// grows over {0.1, 0.25, 0.5}.
pub fn grouping_properties(batches: usize, max_tweets: usize, seed: u64) -> CheckResult {
    let mut rng = gen::rng(seed);
    let mut failures = Vec::new();
    for k in 0..batches {
        let case = gen::random_grouping_case(&mut rng, max_tweets);
        // the story keys stand in for URL normalization; make sure they agree
        for t in &case.batch.tweets {
            let normalized: BTreeSet<String> = t.urls.iter().map(|u| normalize_url(u)).collect();
            if normalized.len() != case.url_keys[&t.id].len() {
                failures.push(format!("batch {k}: {} urls {:?} normalize to {normalized:?}", t.id, t.urls));
            }
        }
        let got = match clusters_of(&case, &case.batch.tweets, 0.25) {
            Ok(c) => c,
            Err(e) => {
                failures.push(format!("batch {k}: {e}"));
                continue;
            }
        };
        let want = oracle_clusters(&case, 0.25);
        if got != want {
            failures.push(format!("batch {k}: {} clusters vs oracle {}", got.len(), want.len()));
        }
        let mut shuffled = case.batch.tweets.clone();
        shuffled.shuffle(&mut rng);
        if clusters_of(&case, &shuffled, 0.25).ok().as_ref() != Some(&got) {
            failures.push(format!("batch {k}: shuffling changed the clusters"));
        }
        let mut previous: Option<BTreeSet<Vec<String>>> = None;
        for tau in [0.1, 0.25, 0.5] {
            let now = clusters_of(&case, &case.batch.tweets, tau).unwrap_or_default();
            if let Some(prev) = &previous {
                // every finer cluster must sit inside one coarser cluster
                let refines = prev.iter().all(|small| now.iter().any(|big| small.iter().all(|id| big.contains(id))));
                if !refines {
                    failures.push(format!("batch {k}: tau {tau} split a cluster"));
                }
            }
            previous = Some(now);
        }
    }
    finish("batches match the relation-graph components, shuffle and τ checks", batches, failures)
}

// ---------------------------------------------------------------------------
// ranking

pub fn ranking_worked_example() -> CheckResult {
    let mk = |id: &str, likes, shares, followers| {
        let mut t = gen::tweet(id, "en", "x");
        t.like_count = likes;
        t.share_count = shares;
        t.retweeter_count = 10;
        t.follower_retweeter_count = followers;
        t
    };
    let tweets = [mk("T1", 100, 10, 9), mk("T2", 50, 50, 5), mk("T3", 10, 20, 1)];
    let ranks = rank_tweets(&tweets).map_err(|e| e.to_string())?;
    let got: Vec<(&str, f64)> = ranks.iter().map(|r| (r.tweet_id.as_str(), r.avg_rank)).collect();
    let want = [("T2", 5.0 / 3.0), ("T3", 2.0), ("T1", 7.0 / 3.0)];
    if got.iter().zip(&want).all(|(g, w)| g.0 == w.0 && g.1 == w.1) && got.len() == 3 {
        Ok("T2 (5/3) < T3 (2) < T1 (7/3)".into())
    } else {
        Err(format!("got {got:?}"))
    }
}

/// Ranks against the counting oracle, then argmax invariance when every
/// count is multiplied by the same positive factor.
pub fn ranking_scaling(batches: usize, seed: u64) -> CheckResult {
    let mut rng = gen::rng(seed);
    let mut failures = Vec::new();
    for k in 0..batches {
        let tweets = gen::random_ranking_batch(&mut rng, 30);
        let ranks = rank_tweets(&tweets).expect("non-empty");
        let likes = oracle::dense_rank_by(&tweets.iter().map(|t| t.like_count).collect::<Vec<_>>(), |a, b| a > b);
        let shares = oracle::dense_rank_by(&tweets.iter().map(|t| t.share_count).collect::<Vec<_>>(), |a, b| a > b);
        let ps: Vec<f64> = tweets
            .iter()
            .map(|t| if t.retweeter_count == 0 { 1.0 } else { t.follower_retweeter_count as f64 / t.retweeter_count as f64 })
            .collect();
        let public = oracle::dense_rank_by(&ps, |a, b| a < b);
        for (i, t) in tweets.iter().enumerate() {
            let r = ranks.iter().find(|r| r.tweet_id == t.id).unwrap();
            if (r.like_rank, r.retweet_rank, r.public_rank) != (likes[i], shares[i], public[i]) {
                failures.push(format!("batch {k}: {} ranks {r:?}", t.id));
            }
        }
        let factor = rng.gen_range(2..=9);
        let scaled: Vec<Tweet> = tweets
            .iter()
            .map(|t| {
                let mut s = t.clone();
                s.like_count *= factor;
                s.share_count *= factor;
                s.retweeter_count *= factor;
                s.follower_retweeter_count *= factor;
                s
            })
            .collect();
        let top = &ranks[0].tweet_id;
        let scaled_top = &rank_tweets(&scaled).unwrap()[0].tweet_id;
        if top != scaled_top {
            failures.push(format!("batch {k}: top {top} became {scaled_top} under ×{factor}"));
        }
        // the same must hold for cluster order
        let clusters: Vec<debunk_core::EventCluster> = tweets
            .chunks(3)
            .map(|c| {
                let ids: BTreeSet<String> = c.iter().map(|t| t.id.clone()).collect();
                debunk_core::EventCluster {
                    cluster_id: ids.first().unwrap().clone(),
                    tweet_ids: ids,
                    phrases: BTreeMap::new(),
                    link_evidence: vec![],
                }
            })
            .collect();
        let by_id = |ts: &[Tweet]| ts.iter().map(|t| (t.id.clone(), t.clone())).collect::<BTreeMap<_, _>>();
        let order = |ts: &[Tweet]| -> Vec<String> {
            rank_clusters(&clusters, &by_id(ts)).into_iter().map(|r| r.cluster.cluster_id).collect()
        };
        if order(&tweets) != order(&scaled) {
            failures.push(format!("batch {k}: cluster order changed under ×{factor}"));
        }
    }
    finish("batches match the rank oracle and keep their argmax under scaling", batches, failures)
}

// ---------------------------------------------------------------------------
// kappa

pub fn kappa_examples() -> Vec<(&'static str, Vec<u8>, Vec<u8>, f64)> {
    vec![
        ("identical", vec![1, 0, 1, 1, 0], vec![1, 0, 1, 1, 0], 1.0),
        ("[1,1,0,0] vs [1,0,1,0]", vec![1, 1, 0, 0], vec![1, 0, 1, 0], 0.0),
        ("[1,1,1,0] vs [1,1,0,0]", vec![1, 1, 1, 0], vec![1, 1, 0, 0], 1.0 / 3.0),
    ]
}

/// Hand examples compared exactly, and agreement of the float kappa with the
/// rational oracle on random label lists.
pub fn kappa_hand_examples() -> CheckResult {
    let mut failures = Vec::new();
    let examples = kappa_examples();
    for (name, a, b, want) in &examples {
        let got = cohen_kappa(a, b).map_err(|e| e.to_string())?;
        if (got - want).abs() > 1e-12 {
            let exact = oracle::kappa_exact(a, b).unwrap();
            failures.push(format!("{name}: expected {want}, got {got} (exact {exact})"));
        }
    }
    finish("hand examples exact", examples.len(), failures)
}

pub fn kappa_random_labels(n: usize, seed: u64) -> CheckResult {
    let mut rng = gen::rng(seed);
    let a: Vec<u8> = (0..n).map(|_| rng.gen_range(0..2)).collect();
    let b: Vec<u8> = (0..n).map(|_| rng.gen_range(0..2)).collect();
    let k = cohen_kappa(&a, &b).map_err(|e| e.to_string())?;
    let exact = oracle::kappa_exact(&a, &b).unwrap();
    let exact_f = *exact.numer() as f64 / *exact.denom() as f64;
    if (k - exact_f).abs() > 1e-12 {
        return Err(format!("kappa {k} disagrees with exact {exact}"));
    }
    if k.abs() <= 0.05 {
        Ok(format!("κ = {k:.4} over n = {n}"))
    } else {
        Err(format!("κ = {k:.4} over n = {n}, outside ±0.05"))
    }
}

// ---------------------------------------------------------------------------
// end to end

/// Expected clusters of a synthetic day in rank order, computed from the
/// generator's ground truth: transitive closure of the relation graph over
/// the tweets that pass the share filter, then the counting rank oracle.
pub fn synthetic_day_expected(day: &gen::SyntheticDay, tau: f64, min_shares_exclusive: u64) -> Vec<BTreeSet<String>> {
    let kept: Vec<&Tweet> = day.tweets.iter().filter(|t| t.share_count > min_shares_exclusive).collect();
    let points: Vec<Option<Vec<(f64, f64)>>> = kept
        .iter()
        .map(|t| {
            let tokens = day.phrase_tokens.get(&t.id)?;
            let w = 1.0 / tokens.len() as f64;
            Some(tokens.iter().map(|tok| (day.positions[tok], w)).collect())
        })
        .collect();
    let no_urls = BTreeSet::new();
    let targets = |t: &Tweet| -> BTreeSet<String> { t.reply_to_id.iter().chain(t.quote_of_id.iter()).cloned().collect() };
    let mut edges = Vec::new();
    for i in 0..kept.len() {
        for j in (i + 1)..kept.len() {
            let (a, b) = (kept[i], kept[j]);
            let url = !day.url_keys.get(&a.id).unwrap_or(&no_urls).is_disjoint(day.url_keys.get(&b.id).unwrap_or(&no_urls));
            let reply = !targets(a).is_disjoint(&targets(b));
            let near = matches!((&points[i], &points[j]), (Some(p), Some(q)) if oracle::emd_1d(p, q) < tau);
            if url || reply || near {
                edges.push((i, j));
            }
        }
    }
    let comps = oracle::components(kept.len(), &edges);

    let likes = oracle::dense_rank_by(&kept.iter().map(|t| t.like_count).collect::<Vec<_>>(), |a, b| a > b);
    let shares = oracle::dense_rank_by(&kept.iter().map(|t| t.share_count).collect::<Vec<_>>(), |a, b| a > b);
    let ps: Vec<f64> = kept
        .iter()
        .map(|t| if t.retweeter_count == 0 { 1.0 } else { t.follower_retweeter_count as f64 / t.retweeter_count as f64 })
        .collect();
    let public = oracle::dense_rank_by(&ps, |a, b| a < b);
    let avg = |i: usize| (likes[i] + shares[i] + public[i]) as f64 / 3.0;
    let mut ordered: Vec<((f64, String), BTreeSet<String>)> = comps
        .into_iter()
        .map(|c| {
            let rep = c
                .iter()
                .map(|&i| (avg(i), kept[i].id.clone()))
                .min_by(|x, y| x.0.total_cmp(&y.0).then_with(|| x.1.cmp(&y.1)))
                .unwrap();
            (rep, c.into_iter().map(|i| kept[i].id.clone()).collect())
        })
        .collect();
    ordered.sort_by(|x, y| x.0 .0.total_cmp(&y.0 .0).then_with(|| x.0 .1.cmp(&y.0 .1)));
    ordered.into_iter().map(|(_, c)| c).collect()
}

/// Matches every planted event to the returned cluster holding most of it
/// and reports the lowest purity and the lowest share of an event found in
/// its cluster; `Err` when an event has no cluster of its own.
pub fn planted_event_purity(events: &[BTreeSet<String>], clusters: &[BTreeSet<String>]) -> Result<(f64, f64), String> {
    let mut used = BTreeSet::new();
    let mut worst = 1.0f64;
    let mut worst_recall = 1.0f64;
    for (k, event) in events.iter().enumerate() {
        let best = clusters
            .iter()
            .enumerate()
            .max_by_key(|(_, c)| c.intersection(event).count())
            .filter(|(_, c)| c.intersection(event).count() > 0);
        let Some((slot, cluster)) = best else {
            return Err(format!("event {k} not found in the returned clusters"));
        };
        if !used.insert(slot) {
            return Err(format!("event {k} shares cluster {slot} with another event"));
        }
        let shared = cluster.intersection(event).count() as f64;
        worst = worst.min(shared / cluster.len() as f64);
        worst_recall = worst_recall.min(shared / event.len() as f64);
    }
    Ok((worst, worst_recall))
}
